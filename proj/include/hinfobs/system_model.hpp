#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <optional>

#include "hinfobs/errors.hpp"

namespace hinfobs {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// State nonlinearity phi(x, u) -> R^n with phi(0, u) = 0.
using Nonlinearity = std::function<Vector(const Vector&, const Vector&)>;

struct Dimensions {
    int n = 0; // states
    int p = 0; // outputs
    int q = 0; // disturbances
    int k = 0; // uncertainty channels
    int m = 0; // controlled outputs
};

// Axis-aligned box used as the Lipschitz sampling region.
struct Box {
    Vector lo;
    Vector hi;

    static Box centered(int n, double half_width);
    bool empty() const;
};

// Uncertain Lipschitz system
//   xdot = (A + M1 F(t) N1) x + phi(x, u) + B w
//   y    = (C + M2 F(t) N2) x + D w
//   z    = H e
// with ||phi(x1,u) - phi(x2,u)|| <= gamma_actual ||x1 - x2|| on `region`.
struct UncertainSystem {
    Matrix A, B, C, D;
    Matrix M1, N1, M2, N2;
    Matrix H;
    Nonlinearity phi;
    double gamma_actual = 0.0;
    std::optional<Matrix> Gamma_actual;
    std::optional<Box> region;   // defaults to [-10, 10]^n
    Vector u_nominal;            // defaults to 0 (dimension free)

    Dimensions dims() const;
    Box effective_region() const;
    Vector eval_phi(const Vector& x) const;
};

// Time-varying uncertainty F(t), k x k with sigma_max(F(t)) <= 1.
struct UncertaintyRealization {
    std::function<Matrix(double)> f_of_t;
};

// Checks all type invariants and returns the system unchanged.
// Throws DimensionMismatch (naming the offending pair) or NonvanishingOrigin.
UncertainSystem validate_system(UncertainSystem sys);

// Sampled lower bound on the Lipschitz constant of phi over `region`.
double estimate_lipschitz(const UncertainSystem& sys, const Box& region,
                          int n_samples, std::uint64_t seed);

// Sampled matrix-type Lipschitz certificate: returns Gamma_hat with
// ||phi(x1,u) - phi(x2,u)|| <= ||Gamma_hat (x1 - x2)|| on all sampled pairs.
Matrix estimate_matrix_lipschitz(const UncertainSystem& sys, const Box& region,
                                 int n_samples, std::uint64_t seed);

} // namespace hinfobs
