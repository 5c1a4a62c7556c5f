#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "hinfobs/system_model.hpp"

namespace hinfobs {

enum class VarStructure {
    SymmetricPositiveDefinite,
    Rectangular,
    Scalar,
    EntrywisePositive,
};

struct MatrixVariable {
    std::string name;
    int rows = 0;
    int cols = 0;
    VarStructure structure = VarStructure::Rectangular;
    double lower_bound = 0.0; // SPD only: P >= lower_bound * I
};

// Variable values keyed by name; scalars are 1x1 matrices.
using Assignment = std::map<std::string, Matrix>;

enum class ConstraintSense { NegativeDefinite, PositiveDefinite };

// Symmetric matrix expression, affine in the registered variables.
struct MatrixConstraint {
    std::string name;
    int dim = 0;
    ConstraintSense sense = ConstraintSense::NegativeDefinite;
    std::function<Matrix(const Assignment&)> evaluate;
};

struct LinearTerm {
    std::string var;
    int row = 0;
    int col = 0;
    double coeff = 0.0;
};

// sum_i coeff_i * var_i(row, col) >= rhs (margin already folded into rhs).
struct ScalarConstraint {
    std::string name;
    std::vector<LinearTerm> terms;
    double rhs = 0.0;
};

// Linear objective over scalar coordinates, always minimized.
struct Objective {
    std::vector<LinearTerm> terms;
};

struct LmiProblem {
    std::vector<MatrixVariable> variables;
    std::vector<MatrixConstraint> constraints;
    std::vector<ScalarConstraint> scalar_constraints;
    Objective objective;
    double margin = 1e-7;

    const MatrixVariable& variable(const std::string& name) const;
    MatrixVariable& variable(const std::string& name);
    Assignment zero_assignment() const;
    nlohmann::json debug_dump() const;
};

struct LmiResidual {
    struct Entry {
        std::string name;
        // Largest eigenvalue after sign normalization: negative-definite
        // constraints report lambda_max, positive-definite ones -lambda_min.
        double normalized_max_eig = 0.0;
    };
    std::vector<Entry> entries;
    double margin = 0.0;

    bool feasible(double tol = 1e-6) const;
    double worst() const;
};

// gamma either a decision variable or a fixed constant.
struct GammaMode {
    bool is_variable = true;
    double fixed_value = 0.0;
    static GammaMode variable() { return {true, 0.0}; }
    static GammaMode fixed(double gamma) { return {false, gamma}; }
};

// zeta = mu^2 either a decision variable or fixed through mu.
struct MuMode {
    bool is_variable = true;
    double fixed_mu = 0.0;
    static MuMode variable() { return {true, 0.0}; }
    static MuMode fixed(double mu) { return {false, mu}; }
};

// Symmetric positive definite square root, S * S = M.
Matrix sym_sqrt(const Matrix& M);

// Observer synthesis LMI with decay rate beta:
//   [[Psi1, 0, Omega1], [*, Psi2, Omega2], [*, *, -zeta I]] < 0
// over P1, P2, G (and gamma / zeta per mode). With `fixed_gain` = L the
// feasibility reduction with a known gain is built instead: G is eliminated
// via G = P1 L and only P1, P2 remain.
LmiProblem build_theorem1(const UncertainSystem& sys, double beta,
                          GammaMode gamma_mode, MuMode mu_mode,
                          double margin = 1e-7,
                          const std::optional<Matrix>& fixed_gain = std::nullopt);

// Element-wise variant: gamma I replaced by the entrywise-positive matrix
// Gamma (transposed mirror in the upper blocks so the Schur complement gives
// Gamma^T Gamma); objective max omega subject to c_ij * Gamma_ij > omega.
LmiProblem build_corollary1(const UncertainSystem& sys, double beta,
                            const Matrix& weights, MuMode mu_mode,
                            double margin = 1e-7);

// Pareto scalarization: minimize lambda * (-gamma) + (1 - lambda) * zeta.
LmiProblem build_theorem2(const UncertainSystem& sys, double beta,
                          double lambda, double margin = 1e-7);

// Per-constraint extreme eigenvalues at the given assignment, including the
// SPD variable bounds and scalar constraints as 1x1 entries.
LmiResidual evaluate_residual(const LmiProblem& problem, const Assignment& assignment);

} // namespace hinfobs
