#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "hinfobs/system_model.hpp"

namespace hinfobs {

// Norm-wise uncertainty margin: the observer tolerates any additive
// nonlinearity whose Lipschitz constant stays below delta_gamma, equivalently
// any perturbation with Jacobian norm below the same bound.
struct NormMargin {
    double gamma_actual = 0.0;
    double gamma_star = 0.0;
    double delta_gamma = 0.0;

    bool guaranteed() const { return delta_gamma >= 0.0; }
};

// Element-wise uncertainty margin: per-entry admissible perturbation
// intervals [lo_ij, hi_ij] around the nominal constants.
struct ElementwiseMargin {
    Matrix Gamma_actual;
    Matrix Gamma_star;
    Matrix lo;
    Matrix hi;
};

struct HadamardCheck {
    bool holds = false;
    double min_eigenvalue = 0.0;
    Matrix witness; // U U^T o n I - T T^T, the matrix whose PSDness is tested
};

// Outcome of sampling a candidate perturbation against a margin. When the
// certificate fails, the violating sample pair is kept for diagnosis.
struct UncertaintyVerdict {
    bool certified = false;
    double worst_ratio = 0.0;
    double bound = 0.0;
    std::optional<std::pair<Vector, Vector>> violating_pair;
};

NormMargin norm_margin(double gamma_actual, double gamma_star);

// Tests U U^T o n I - T T^T >= 0 (o is the Hadamard product). Requires
// |t_ij| <= u_ij entrywise; under that premise the matrix is always PSD,
// which makes this the property-test oracle for the element-wise bounds.
HadamardCheck hadamard_bound_holds(const Matrix& T, const Matrix& U);

// Element-wise intervals lo_ij = -n^(-3/4) gamma*_ij - gamma_ij and
// hi_ij = n^(-3/4) gamma*_ij - gamma_ij. With `randomized_trials` > 0 also
// samples perturbations |Gamma_d| <= n^(-3/4) Gamma* and verifies
// sigma_max(Gamma_d) <= sigma_max(Gamma*).
ElementwiseMargin elementwise_margin(const Matrix& Gamma_actual,
                                     const Matrix& Gamma_star,
                                     int randomized_trials = 0,
                                     std::uint64_t seed = 0x5eed);

// Samples Lipschitz ratios of delta_phi over the region and checks them
// against the norm margin. True means the perturbation is certified
// tolerable by the synthesized observer.
UncertaintyVerdict verify_uncertain_nonlinearity(const UncertainSystem& sys,
                                                 const Nonlinearity& delta_phi,
                                                 const NormMargin& margin,
                                                 const Box& region,
                                                 int samples = 4000,
                                                 std::uint64_t seed = 0x5eed);

} // namespace hinfobs
