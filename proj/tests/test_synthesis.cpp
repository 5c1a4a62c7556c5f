#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>

#include "hinfobs/synthesis.hpp"
#include "test_support.hpp"

using namespace hinfobs;

namespace {

SynthesisOptions example_options() {
    SynthesisOptions o;
    o.beta = testsupport::kBeta;
    o.lambda = 0.95;
    o.margin = testsupport::kMargin;
    o.solver.feasibility_radius = testsupport::kRadius;
    return o;
}

} // namespace

TEST_CASE("trade-off solve reproduces the reference optimum") {
    UncertainSystem sys = testsupport::example_system();
    SynthesisResult r = pareto_point(sys, example_options());

    REQUIRE(r.feasible());
    CHECK(r.gamma_star == doctest::Approx(testsupport::kGammaStar095).epsilon(1e-5));
    CHECK(r.zeta_star == doctest::Approx(testsupport::kZetaStar095).epsilon(1e-5));
    CHECK(r.mu_star == doctest::Approx(testsupport::kMuStar095).epsilon(1e-5));
    CHECK(r.sigma_max_L == doctest::Approx(testsupport::kSigmaL095).epsilon(1e-5));
    CHECK(r.mu_star == doctest::Approx(std::sqrt(r.zeta_star)).epsilon(1e-12));

    // Certificate invariants.
    CHECK(r.residual.feasible(1e-6));
    Eigen::SelfAdjointEigenSolver<Matrix> p1(r.P1), p2(r.P2);
    CHECK(p1.eigenvalues().minCoeff() > 0.0);
    CHECK(p2.eigenvalues().minCoeff() > 0.0);

    // L = P1^{-1} G and its largest singular value.
    Matrix L_check = r.P1.ldlt().solve(r.G);
    CHECK((L_check - r.L).cwiseAbs().maxCoeff() <= 1e-8);
    CHECK(r.sigma_max_L ==
          doctest::Approx(r.L.jacobiSvd().singularValues()(0)).epsilon(1e-12));
}

TEST_CASE("endpoint optima of the trade-off") {
    UncertainSystem sys = testsupport::example_system();

    SUBCASE("lambda = 1 maximizes gamma alone") {
        SynthesisOptions o = example_options();
        o.lambda = 1.0;
        SynthesisResult r = pareto_point(sys, o);
        REQUIRE(r.feasible());
        CHECK(r.gamma_star == doctest::Approx(testsupport::kGammaStar1).epsilon(1e-5));
        // zeta rides the feasibility radius when it carries no weight.
        CHECK(r.zeta_star <= testsupport::kRadius + 1e-6);
        CHECK(r.zeta_star > 5.9);
    }
    SUBCASE("lambda = 0 minimizes zeta alone") {
        SynthesisOptions o = example_options();
        o.lambda = 0.0;
        SynthesisResult r = pareto_point(sys, o);
        REQUIRE(r.feasible());
        CHECK(r.mu_star == doctest::Approx(testsupport::kMuStar0).epsilon(1e-5));
        CHECK(r.gamma_star >= 0.0);
        CHECK(r.gamma_star < 1e-4);
    }
}

TEST_CASE("max_lipschitz at fixed attenuation") {
    UncertainSystem sys = testsupport::example_system();
    SynthesisResult r = max_lipschitz(sys, example_options(), 3.5);
    REQUIRE(r.feasible());
    CHECK(r.gamma_star == doctest::Approx(testsupport::kMaxGammaMu35).epsilon(1e-5));
    CHECK(r.mu_star == doctest::Approx(3.5));
    CHECK(r.zeta_star == doctest::Approx(12.25));
    CHECK(r.residual.feasible(1e-6));

    CHECK_THROWS_AS(max_lipschitz(sys, example_options(), -1.0), Error);
}

TEST_CASE("feasibility probes match the known feasible set") {
    UncertainSystem sys = testsupport::example_system();
    SynthesisOptions o = example_options();

    SUBCASE("inside") {
        SynthesisResult r = check_feasibility(sys, o, 0.2, 3.5);
        CHECK(r.feasible());
        CHECK(r.gamma_star == doctest::Approx(0.2));
        CHECK(r.mu_star == doctest::Approx(3.5));
        CHECK(r.residual.feasible(1e-6));
    }
    SUBCASE("outside") {
        SynthesisResult r = check_feasibility(sys, o, 0.5, 3.5);
        CHECK(!r.feasible());
        CHECK(r.report.status == SolveReport::Status::Infeasible);
        CHECK(r.report.detail.find("theorem1_block") != std::string::npos);
    }
    SUBCASE("published gain verifies at its operating point") {
        SynthesisResult r =
            check_feasibility(sys, o, 0.3, 3.5, testsupport::published_L());
        CHECK(r.feasible());
        CHECK((r.L - testsupport::published_L()).cwiseAbs().maxCoeff() <= 1e-9);
        CHECK(r.residual.feasible(1e-6));
    }
}

TEST_CASE("gain-bound level theta caps the observer gain") {
    UncertainSystem sys = testsupport::example_system();
    SynthesisOptions o = example_options();
    o.theta = 0.5;
    SynthesisResult r = pareto_point(sys, o);
    REQUIRE(r.feasible());
    Eigen::SelfAdjointEigenSolver<Matrix> p1(r.P1);
    CHECK(p1.eigenvalues().minCoeff() >= 0.5 - 1e-6);
    // The unconstrained solve sits at sigma(L) = 7.07; theta trades a little
    // gamma for a much smaller gain.
    CHECK(r.sigma_max_L < 3.0);
    CHECK(r.gamma_star == doctest::Approx(0.25452443925587354).epsilon(1e-4));

    SynthesisOptions bad = example_options();
    bad.theta = -1.0;
    CHECK_THROWS_AS(pareto_point(sys, bad), PreconditionViolated);
}

TEST_CASE("element-wise synthesis resolves directional slack") {
    UncertainSystem sys = testsupport::example_system();
    ElementwiseResult r =
        elementwise_max(sys, example_options(), Matrix::Ones(2, 2), 3.5);

    REQUIRE(r.feasible());
    CHECK(r.omega_star == doctest::Approx(testsupport::kOmegaStar).epsilon(1e-4));
    CHECK(r.sigma_max_Gamma ==
          doctest::Approx(testsupport::kSigmaGammaStar).epsilon(1e-4));
    REQUIRE(r.Gamma_star.rows() == 2);
    CHECK(r.Gamma_star.minCoeff() > 0.0);
    // Uniform weights on this example leave no directional preference.
    CHECK(r.Gamma_star.maxCoeff() - r.Gamma_star.minCoeff() <= 1e-4);
    // Each entry clears the scalarized objective value.
    CHECK(r.Gamma_star.minCoeff() >= r.omega_star - 1e-6);

    CHECK_THROWS_AS(
        elementwise_max(sys, example_options(), Matrix::Zero(2, 2), 3.5),
        NonpositiveWeight);
}

TEST_CASE("an undetectable system is reported infeasible, not an error") {
    UncertainSystem sys = testsupport::example_system();
    sys.A(1, 0) = 1.0; // unstable A with this output map and decay demand
    SynthesisResult r = pareto_point(sys, example_options());
    CHECK(!r.feasible());
    CHECK(r.report.status == SolveReport::Status::Infeasible);
}

TEST_CASE("option validation") {
    UncertainSystem sys = testsupport::example_system();
    SynthesisOptions o = example_options();

    o.lambda = 1.2;
    CHECK_THROWS_AS(pareto_point(sys, o), LambdaOutOfRange);
    o.lambda = 0.95;

    o.beta = -0.1;
    CHECK_THROWS_AS(pareto_point(sys, o), PreconditionViolated);
    o.beta = testsupport::kBeta;

    o.margin = 0.0;
    CHECK_THROWS_AS(pareto_point(sys, o), PreconditionViolated);
}

TEST_CASE("curve sweep matches its pointwise solves") {
    UncertainSystem sys = testsupport::example_system();
    SynthesisOptions o = example_options();
    std::vector<double> grid = {0.0, 0.5, 0.9, 0.95, 1.0};
    ParetoCurve curve = pareto_sweep(sys, o, grid);

    REQUIRE(curve.points.size() == grid.size());
    CHECK(curve.beta == doctest::Approx(testsupport::kBeta));
    for (size_t i = 0; i < grid.size(); ++i)
        CHECK(curve.points[i].lambda == doctest::Approx(grid[i]));

    // The lambda = 0.95 entry agrees with the dedicated solve.
    o.lambda = 0.95;
    SynthesisResult direct = pareto_point(sys, o);
    CHECK(curve.points[3].gamma_star ==
          doctest::Approx(direct.gamma_star).epsilon(1e-9));
    CHECK(curve.points[3].mu_star == doctest::Approx(direct.mu_star).epsilon(1e-9));

    // Monotone trade-off along lambda.
    for (size_t i = 1; i < curve.points.size(); ++i) {
        CHECK(curve.points[i].gamma_star >= curve.points[i - 1].gamma_star - 1e-4);
        CHECK(curve.points[i].mu_star >= curve.points[i - 1].mu_star - 1e-4);
    }
}

TEST_CASE("surface sweep records infeasible cells as data") {
    UncertainSystem sys = testsupport::example_system();
    SurfaceGrid grid =
        surface_sweep(sys, example_options(), {0.0, 0.35, 1.2}, {0.5, 0.95});

    REQUIRE(grid.betas.size() == 3);
    REQUIRE(grid.lambdas.size() == 2);
    REQUIRE(grid.cells.size() == 6);

    const SurfaceCell& mid = grid.at(1, 1);
    CHECK(mid.feasible);
    CHECK(mid.gamma_star == doctest::Approx(testsupport::kGammaStar095).epsilon(1e-5));

    const SurfaceCell& edge = grid.at(2, 0);
    CHECK(!edge.feasible);
    CHECK(std::isnan(edge.gamma_star));
    CHECK(std::isnan(edge.mu_star));

    CHECK(grid.at(0, 1).feasible);
}

TEST_CASE("sweep parallelism does not change the numbers") {
    UncertainSystem sys = testsupport::example_system();
    std::vector<double> grid = {0.3, 0.6, 0.95};

    ParetoCurve seq = pareto_sweep(sys, example_options(), grid);
    setenv("HINFOBS_THREADS", "3", 1);
    ParetoCurve par = pareto_sweep(sys, example_options(), grid);
    unsetenv("HINFOBS_THREADS");

    REQUIRE(par.points.size() == seq.points.size());
    for (size_t i = 0; i < seq.points.size(); ++i) {
        CHECK(par.points[i].gamma_star ==
              doctest::Approx(seq.points[i].gamma_star).epsilon(1e-12));
        CHECK(par.points[i].mu_star ==
              doctest::Approx(seq.points[i].mu_star).epsilon(1e-12));
    }
}

TEST_CASE("default grids have the documented shape") {
    std::vector<double> lambdas = default_lambda_grid();
    REQUIRE(lambdas.size() == 101);
    CHECK(lambdas.front() == doctest::Approx(0.0));
    CHECK(lambdas.back() == doctest::Approx(1.0));
    CHECK(lambdas[50] == doctest::Approx(0.5));

    std::vector<double> betas = default_beta_grid();
    REQUIRE(betas.size() == 25);
    CHECK(betas.front() == doctest::Approx(0.0));
    CHECK(betas.back() == doctest::Approx(1.2));
}
