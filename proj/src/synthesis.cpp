#include "hinfobs/synthesis.hpp"

#include <Eigen/Cholesky>
#include <Eigen/SVD>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <future>
#include <limits>
#include <string>
#include <thread>

namespace hinfobs {

namespace {

void validate_options(const SynthesisOptions& options) {
    if (!(options.beta >= 0.0))
        throw PreconditionViolated("decay rate beta must be nonnegative, got " +
                                   std::to_string(options.beta));
    if (options.theta && *options.theta < 0.0)
        throw PreconditionViolated("theta must be nonnegative");
    if (!(options.margin > 0.0))
        throw PreconditionViolated("margin must be positive");
}

void apply_theta(LmiProblem& problem, const SynthesisOptions& options) {
    if (options.theta)
        problem.variable("P1").lower_bound = *options.theta;
}

double largest_singular_value(const Matrix& M) {
    if (M.size() == 0)
        return 0.0;
    return M.jacobiSvd().singularValues()(0);
}

// Pulls the decision matrices out of a finished solve and derives the gain.
SynthesisResult recover(const LmiProblem& problem, const StandardSdp& sdp,
                        SolveReport report, GammaMode gamma_mode, MuMode mu_mode,
                        const std::optional<Matrix>& fixed_gain) {
    SynthesisResult r;
    r.report = std::move(report);
    if (r.report.x.size() != sdp.map.size())
        return r;

    Assignment a = sdp.map.to_assignment(r.report.x);
    r.P1 = a.at("P1");
    r.P2 = a.at("P2");
    if (fixed_gain) {
        r.L = *fixed_gain;
        r.G = r.P1 * r.L;
    } else {
        r.G = a.at("G");
        r.L = Eigen::LLT<Matrix>(r.P1).solve(r.G);
    }
    r.gamma_star = gamma_mode.is_variable ? a.at("gamma")(0, 0) : gamma_mode.fixed_value;
    r.zeta_star = mu_mode.is_variable ? a.at("zeta")(0, 0)
                                      : mu_mode.fixed_mu * mu_mode.fixed_mu;
    r.mu_star = std::sqrt(std::max(r.zeta_star, 0.0));
    r.sigma_max_L = largest_singular_value(r.L);
    r.residual = evaluate_residual(problem, a);
    return r;
}

int sweep_thread_count() {
    if (const char* env = std::getenv("HINFOBS_THREADS")) {
        int n = std::atoi(env);
        if (n >= 1)
            return n;
    }
    return 1;
}

// Runs fn(i) for i in [0, count) across the configured thread count and
// keeps results ordered by index.
template <typename Fn>
void for_each_index(int count, Fn&& fn) {
    const int threads = std::min(sweep_thread_count(), std::max(count, 1));
    if (threads <= 1) {
        for (int i = 0; i < count; ++i)
            fn(i);
        return;
    }
    std::vector<std::future<void>> futures;
    futures.reserve(threads);
    std::atomic<int> next{0};
    for (int t = 0; t < threads; ++t)
        futures.push_back(std::async(std::launch::async, [&] {
            for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1))
                fn(i);
        }));
    for (auto& f : futures)
        f.get();
}

} // namespace

SynthesisResult max_lipschitz(const UncertainSystem& sys,
                              const SynthesisOptions& options, double mu) {
    validate_options(options);
    if (!(mu > 0.0))
        throw PreconditionViolated("mu must be positive");
    GammaMode gm = GammaMode::variable();
    MuMode mm = MuMode::fixed(mu);
    LmiProblem problem = build_theorem1(sys, options.beta, gm, mm, options.margin);
    apply_theta(problem, options);
    StandardSdp sdp = lower(problem);
    return recover(problem, sdp, solve(sdp, options.solver), gm, mm, std::nullopt);
}

SynthesisResult check_feasibility(const UncertainSystem& sys,
                                  const SynthesisOptions& options,
                                  double gamma, double mu,
                                  const std::optional<Matrix>& fixed_gain) {
    validate_options(options);
    if (!(gamma > 0.0) || !(mu > 0.0))
        throw PreconditionViolated("gamma and mu must be positive");
    if (fixed_gain) {
        const Dimensions d = sys.dims();
        if (fixed_gain->rows() != d.n || fixed_gain->cols() != d.p)
            throw DimensionMismatch("fixed gain is " + std::to_string(fixed_gain->rows()) +
                                    "x" + std::to_string(fixed_gain->cols()) +
                                    " but the system needs " + std::to_string(d.n) + "x" +
                                    std::to_string(d.p));
    }
    GammaMode gm = GammaMode::fixed(gamma);
    MuMode mm = MuMode::fixed(mu);
    LmiProblem problem =
        build_theorem1(sys, options.beta, gm, mm, options.margin, fixed_gain);
    apply_theta(problem, options);
    StandardSdp sdp = lower(problem);
    return recover(problem, sdp, solve(sdp, options.solver), gm, mm, fixed_gain);
}

SynthesisResult pareto_point(const UncertainSystem& sys,
                             const SynthesisOptions& options) {
    validate_options(options);
    if (options.lambda < 0.0 || options.lambda > 1.0)
        throw LambdaOutOfRange("lambda must lie in [0, 1], got " +
                               std::to_string(options.lambda));
    LmiProblem problem =
        build_theorem2(sys, options.beta, options.lambda, options.margin);
    apply_theta(problem, options);
    StandardSdp sdp = lower(problem);
    return recover(problem, sdp, solve(sdp, options.solver), GammaMode::variable(),
                   MuMode::variable(), std::nullopt);
}

ParetoCurve pareto_sweep(const UncertainSystem& sys,
                         const SynthesisOptions& options,
                         const std::vector<double>& lambda_grid) {
    validate_options(options);
    ParetoCurve curve;
    curve.beta = options.beta;
    curve.points.resize(lambda_grid.size());
    for_each_index(static_cast<int>(lambda_grid.size()), [&](int i) {
        SynthesisOptions local = options;
        local.lambda = lambda_grid[i];
        ParetoPoint& pt = curve.points[i];
        pt.lambda = lambda_grid[i];
        SynthesisResult r = pareto_point(sys, local);
        pt.feasible = r.feasible();
        if (pt.feasible) {
            pt.gamma_star = r.gamma_star;
            pt.mu_star = r.mu_star;
            pt.sigma_max_L = r.sigma_max_L;
        } else {
            pt.gamma_star = pt.mu_star = pt.sigma_max_L =
                std::numeric_limits<double>::quiet_NaN();
        }
    });
    return curve;
}

SurfaceGrid surface_sweep(const UncertainSystem& sys,
                          const SynthesisOptions& options,
                          const std::vector<double>& beta_grid,
                          const std::vector<double>& lambda_grid) {
    validate_options(options);
    SurfaceGrid grid;
    grid.betas = beta_grid;
    grid.lambdas = lambda_grid;
    grid.cells.resize(beta_grid.size() * lambda_grid.size());
    const int nl = static_cast<int>(lambda_grid.size());
    for_each_index(static_cast<int>(grid.cells.size()), [&](int idx) {
        const int bi = idx / nl;
        const int li = idx % nl;
        SynthesisOptions local = options;
        local.beta = beta_grid[bi];
        local.lambda = lambda_grid[li];
        SurfaceCell& cell = grid.cells[idx];
        cell.beta = local.beta;
        cell.lambda = local.lambda;
        SynthesisResult r = pareto_point(sys, local);
        cell.feasible = r.feasible();
        if (cell.feasible) {
            cell.gamma_star = r.gamma_star;
            cell.mu_star = r.mu_star;
            cell.sigma_max_L = r.sigma_max_L;
        } else {
            cell.gamma_star = cell.mu_star = cell.sigma_max_L =
                std::numeric_limits<double>::quiet_NaN();
        }
    });
    return grid;
}

ElementwiseResult elementwise_max(const UncertainSystem& sys,
                                  const SynthesisOptions& options,
                                  const Matrix& weights, double mu) {
    validate_options(options);
    if (!(mu > 0.0))
        throw PreconditionViolated("mu must be positive");
    MuMode mm = MuMode::fixed(mu);
    LmiProblem problem =
        build_corollary1(sys, options.beta, weights, mm, options.margin);
    apply_theta(problem, options);
    StandardSdp sdp = lower(problem);
    SolveReport report = solve(sdp, options.solver);

    ElementwiseResult r;
    r.report = std::move(report);
    if (r.report.x.size() != sdp.map.size())
        return r;
    Assignment a = sdp.map.to_assignment(r.report.x);
    r.P1 = a.at("P1");
    r.P2 = a.at("P2");
    r.G = a.at("G");
    r.L = Eigen::LLT<Matrix>(r.P1).solve(r.G);
    r.Gamma_star = a.at("Gamma");
    r.omega_star = a.at("omega")(0, 0);
    r.sigma_max_Gamma = largest_singular_value(r.Gamma_star);
    r.zeta_star = mu * mu;
    r.mu_star = mu;
    r.sigma_max_L = largest_singular_value(r.L);
    r.residual = evaluate_residual(problem, a);
    return r;
}

std::vector<double> default_lambda_grid() {
    std::vector<double> grid(101);
    for (int i = 0; i <= 100; ++i)
        grid[i] = i / 100.0;
    return grid;
}

std::vector<double> default_beta_grid() {
    std::vector<double> grid;
    for (int i = 0; i <= 24; ++i)
        grid.push_back(i * 0.05);
    return grid;
}

} // namespace hinfobs
