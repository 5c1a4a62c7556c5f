#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hinfobs/lmi_builder.hpp"

namespace hinfobs {

// Maps scalar decision coordinates to matrix-variable entries. Symmetric
// variables expose only their lower triangle; the coefficient matrices carry
// the mirrored entry, so coordinate values are plain matrix entries.
struct CoordinateMap {
    struct Entry {
        std::string var;
        int row = 0;
        int col = 0;
    };
    std::vector<Entry> coords;
    std::vector<MatrixVariable> registry;

    int size() const { return static_cast<int>(coords.size()); }
    int index_of(const std::string& var, int row, int col) const;
    Assignment to_assignment(const Eigen::VectorXd& x) const;
    Eigen::VectorXd from_assignment(const Assignment& a) const;

    static CoordinateMap build(const std::vector<MatrixVariable>& variables);
};

// One PSD cone constraint F0 + sum_i x_i F[i] >= 0 (margins already folded
// into F0). F is stored sparsely over `support`.
struct SdpBlock {
    std::string name;
    int dim = 0;
    Matrix F0;
    std::vector<int> support;
    std::vector<Matrix> F;
};

struct StandardSdp {
    Eigen::VectorXd c; // minimize c^T x
    std::vector<SdpBlock> blocks;
    CoordinateMap map;
};

struct SolveOptions {
    int max_iters = 200;
    double tolerance = 1e-8;
    std::optional<double> feasibility_radius; // caps ||x||_inf when set
};

struct SolveReport {
    enum class Status { Optimal, Infeasible, NumericalFailure, IterationLimit };

    Status status = Status::NumericalFailure;
    Eigen::VectorXd x;
    double objective = 0.0;
    int iterations = 0;
    double wall_time_s = 0.0;
    std::optional<double> radius_used;
    std::string detail;          // certificate kind or failure note
    double max_residual = 0.0;   // worst normalized block violation at x
    double duality_gap = 0.0;

    bool optimal() const { return status == Status::Optimal; }
};

const char* to_string(SolveReport::Status s);

// Lowers an LmiProblem to standard form by probing the affine constraint
// evaluators at unit coordinates. SPD variable bounds and scalar constraints
// become additional blocks.
StandardSdp lower(const LmiProblem& problem);

// Reference primal-dual interior-point solver (HKM direction with Mehrotra
// predictor-corrector). Phase 1 minimizes the uniform infeasibility shift t;
// phase 2 minimizes the objective from the phase-1 interior point.
SolveReport solve(const StandardSdp& sdp, const SolveOptions& options = {});

} // namespace hinfobs
