#pragma once

#include <optional>
#include <vector>

#include "hinfobs/lmi_builder.hpp"
#include "hinfobs/sdp_backend.hpp"
#include "hinfobs/system_model.hpp"

namespace hinfobs {

struct SynthesisOptions {
    double beta = 0.35;
    double lambda = 0.95;            // Pareto weight, only read by pareto ops
    std::optional<double> theta;     // lower bound P1 > theta I when set
    double margin = 1e-7;
    SolveOptions solver;
};

struct SynthesisResult {
    Matrix P1;
    Matrix P2;
    Matrix G;
    Matrix L;                        // observer gain, L = P1^-1 G
    double gamma_star = 0.0;
    double zeta_star = 0.0;
    double mu_star = 0.0;            // sqrt(zeta_star)
    double sigma_max_L = 0.0;
    SolveReport report;
    LmiResidual residual;

    bool feasible() const { return report.optimal(); }
};

// Element-wise Lipschitz synthesis output: Gamma_star collects the maximized
// per-entry constants, omega_star the weighted common lower bound.
struct ElementwiseResult {
    Matrix P1;
    Matrix P2;
    Matrix G;
    Matrix L;
    Matrix Gamma_star;
    double omega_star = 0.0;
    double sigma_max_Gamma = 0.0;
    double zeta_star = 0.0;
    double mu_star = 0.0;
    double sigma_max_L = 0.0;
    SolveReport report;
    LmiResidual residual;

    bool feasible() const { return report.optimal(); }
};

struct ParetoPoint {
    double lambda = 0.0;
    double gamma_star = 0.0;
    double mu_star = 0.0;
    double sigma_max_L = 0.0;
    bool feasible = false;
};

struct ParetoCurve {
    double beta = 0.0;
    std::vector<ParetoPoint> points;
};

struct SurfaceCell {
    double beta = 0.0;
    double lambda = 0.0;
    double gamma_star = 0.0;
    double mu_star = 0.0;
    double sigma_max_L = 0.0;
    bool feasible = false;
};

// Cells stored row-major: one row per beta, one column per lambda.
struct SurfaceGrid {
    std::vector<double> betas;
    std::vector<double> lambdas;
    std::vector<SurfaceCell> cells;

    const SurfaceCell& at(int bi, int li) const {
        return cells[static_cast<size_t>(bi) * lambdas.size() + li];
    }
};

// Maximum admissible Lipschitz constant at a fixed attenuation level mu:
// maximizes gamma subject to the synthesis LMI.
SynthesisResult max_lipschitz(const UncertainSystem& sys,
                              const SynthesisOptions& options, double mu);

// Pure feasibility probe at fixed gamma and mu. With `fixed_gain` = L the
// check runs for that specific observer gain instead of synthesizing one.
SynthesisResult check_feasibility(const UncertainSystem& sys,
                                  const SynthesisOptions& options,
                                  double gamma, double mu,
                                  const std::optional<Matrix>& fixed_gain = std::nullopt);

// Scalarized trade-off: minimize lambda * (-gamma) + (1 - lambda) * zeta at
// options.lambda, returning both optima.
SynthesisResult pareto_point(const UncertainSystem& sys,
                             const SynthesisOptions& options);

// One pareto_point per grid entry at fixed options.beta; infeasible points
// are recorded as gaps, never raised.
ParetoCurve pareto_sweep(const UncertainSystem& sys,
                         const SynthesisOptions& options,
                         const std::vector<double>& lambda_grid);

// Full (beta, lambda) surface of trade-off optima.
SurfaceGrid surface_sweep(const UncertainSystem& sys,
                          const SynthesisOptions& options,
                          const std::vector<double>& beta_grid,
                          const std::vector<double>& lambda_grid);

// Element-wise variant: maximizes omega with c_ij * Gamma_ij >= omega at
// fixed mu and returns the full Gamma_star matrix.
ElementwiseResult elementwise_max(const UncertainSystem& sys,
                                  const SynthesisOptions& options,
                                  const Matrix& weights, double mu);

std::vector<double> default_lambda_grid(); // 101 uniform points on [0, 1]
std::vector<double> default_beta_grid();   // 0 to 1.2 in steps of 0.05

} // namespace hinfobs
