#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "hinfobs/robustness.hpp"
#include "test_support.hpp"

using namespace hinfobs;

TEST_CASE("norm margin is a subtraction with a guarantee flag") {
    NormMargin m = norm_margin(0.2, testsupport::kGammaStar095);
    CHECK(m.delta_gamma ==
          doctest::Approx(testsupport::kGammaStar095 - 0.2).epsilon(1e-12));
    CHECK(m.guaranteed());

    NormMargin tight = norm_margin(0.3, 0.3);
    CHECK(tight.delta_gamma == doctest::Approx(0.0));
    CHECK(tight.guaranteed());

    NormMargin broken = norm_margin(0.4, 0.3);
    CHECK(broken.delta_gamma == doctest::Approx(-0.1));
    CHECK(!broken.guaranteed());

    CHECK_THROWS_AS(norm_margin(-0.1, 0.3), PreconditionViolated);
    CHECK_THROWS_AS(norm_margin(0.1, -0.3), PreconditionViolated);
}

TEST_CASE("entrywise domination certificate") {
    Matrix U(2, 2);
    U << 1.0, 0.5, 0.25, 1.0;
    Matrix T(2, 2);
    T << 0.9, -0.5, 0.2, -1.0;

    HadamardCheck chk = hadamard_bound_holds(T, U);
    CHECK(chk.holds);
    CHECK(chk.min_eigenvalue >= -1e-10);
    REQUIRE(chk.witness.rows() == 2);
    // Witness is n diag(U U^T) - T T^T.
    Matrix expected =
        Matrix(2.0 * (U * U.transpose()).diagonal().asDiagonal()) -
        T * T.transpose();
    CHECK((chk.witness - expected).cwiseAbs().maxCoeff() <= 1e-12);

    SUBCASE("violated domination is rejected, naming the entry") {
        Matrix Tbad = T;
        Tbad(1, 0) = 0.3;
        CHECK_THROWS_WITH_AS(hadamard_bound_holds(Tbad, U),
                             doctest::Contains("(1,0)"), PreconditionViolated);
    }
    SUBCASE("shape mismatch") {
        CHECK_THROWS_AS(hadamard_bound_holds(T, Matrix::Ones(3, 3)), ShapeMismatch);
    }
}

TEST_CASE("entrywise domination holds over random trials") {
    std::mt19937_64 rng(0x5eed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_real_distribution<double> sym(-1.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        int n = 1 + trial % 8;
        Matrix U(n, n), T(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                U(i, j) = 2.0 * unit(rng);
                T(i, j) = U(i, j) * sym(rng);
            }
        HadamardCheck chk = hadamard_bound_holds(T, U);
        CHECK(chk.holds);
        CHECK(chk.min_eigenvalue >= -1e-10);
    }
}

TEST_CASE("element-wise margin intervals") {
    Matrix Gamma_actual(2, 2);
    Gamma_actual << 0.0, 0.0, 0.2, 0.0;
    Matrix Gamma_star = Matrix::Constant(2, 2, 0.34073);

    ElementwiseMargin m = elementwise_margin(Gamma_actual, Gamma_star);
    const double factor = std::pow(2.0, -0.75);
    CHECK(factor == doctest::Approx(0.5946035575013605).epsilon(1e-15));

    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            double expected_half = factor * Gamma_star(i, j);
            CHECK(m.hi(i, j) ==
                  doctest::Approx(expected_half - Gamma_actual(i, j)).epsilon(1e-12));
            CHECK(m.lo(i, j) ==
                  doctest::Approx(-expected_half - Gamma_actual(i, j)).epsilon(1e-12));
            // The interval is centered: lo + hi = -2 Gamma_actual.
            CHECK(m.lo(i, j) + m.hi(i, j) ==
                  doctest::Approx(-2.0 * Gamma_actual(i, j)).epsilon(1e-12));
        }

    SUBCASE("randomized trials respect the singular value budget") {
        CHECK_NOTHROW(elementwise_margin(Gamma_actual, Gamma_star, 500, 0x5eed));
    }
    SUBCASE("shape and sign validation") {
        CHECK_THROWS_AS(elementwise_margin(Gamma_actual, Matrix::Ones(3, 3)),
                        ShapeMismatch);
        CHECK_THROWS_AS(
            elementwise_margin(Gamma_actual, Matrix(-Matrix::Ones(2, 2))),
            PreconditionViolated);
    }
}

TEST_CASE("scaled perturbations never exceed the reference singular value") {
    std::mt19937_64 rng(0x5eed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_real_distribution<double> sym(-1.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        int n = 2 + trial % 5;
        Matrix Gamma_star(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                Gamma_star(i, j) = unit(rng);
        double factor = std::pow(static_cast<double>(n), -0.75);
        Matrix Delta(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                Delta(i, j) = factor * Gamma_star(i, j) * sym(rng);
        double s_delta = Delta.jacobiSvd().singularValues()(0);
        double s_star = Gamma_star.jacobiSvd().singularValues()(0);
        CHECK(s_delta <= s_star + 1e-10);
    }
}

TEST_CASE("uncertain nonlinearity verification") {
    UncertainSystem sys = testsupport::example_system();
    NormMargin margin = norm_margin(sys.gamma_actual, testsupport::kGammaStar095);
    Box region = sys.effective_region();

    SUBCASE("certified perturbation") {
        Nonlinearity delta = [](const Vector& x, const Vector&) {
            Vector v = Vector::Zero(2);
            v(1) = 0.05 * std::sin(x(1));
            return v;
        };
        UncertaintyVerdict v =
            verify_uncertain_nonlinearity(sys, delta, margin, region);
        CHECK(v.certified);
        CHECK(v.worst_ratio <= 0.05 + 1e-9);
        CHECK(v.bound == doctest::Approx(margin.delta_gamma).epsilon(1e-12));
        CHECK(!v.violating_pair.has_value());
    }
    SUBCASE("oversized perturbation is rejected with a witness") {
        Nonlinearity delta = [](const Vector& x, const Vector&) {
            Vector v = Vector::Zero(2);
            v(1) = 0.5 * std::sin(x(1));
            return v;
        };
        UncertaintyVerdict v =
            verify_uncertain_nonlinearity(sys, delta, margin, region);
        CHECK(!v.certified);
        CHECK(v.worst_ratio > v.bound);
        REQUIRE(v.violating_pair.has_value());
        const auto& [x1, x2] = *v.violating_pair;
        double lhs = (delta(x1, Vector::Zero(1)) - delta(x2, Vector::Zero(1))).norm();
        CHECK(lhs > v.bound * (x1 - x2).norm());
    }
    SUBCASE("negative margin can certify nothing") {
        NormMargin broken = norm_margin(0.4, 0.3);
        Nonlinearity zero = [](const Vector& x, const Vector&) {
            return Vector(Vector::Zero(x.size()));
        };
        UncertaintyVerdict v =
            verify_uncertain_nonlinearity(sys, zero, broken, region);
        CHECK(!v.certified);
    }
    SUBCASE("perturbation must vanish at the origin") {
        Nonlinearity shifted = [](const Vector& x, const Vector&) {
            return Vector(Vector::Constant(x.size(), 0.1));
        };
        CHECK_THROWS_AS(
            verify_uncertain_nonlinearity(sys, shifted, margin, region),
            PreconditionViolated);
    }
    SUBCASE("empty region is rejected") {
        Box bad;
        bad.lo = Vector::Constant(2, 1.0);
        bad.hi = Vector::Constant(2, -1.0);
        Nonlinearity zero = [](const Vector& x, const Vector&) {
            return Vector(Vector::Zero(x.size()));
        };
        CHECK_THROWS_AS(verify_uncertain_nonlinearity(sys, zero, margin, bad),
                        EmptyRegion);
    }
}
