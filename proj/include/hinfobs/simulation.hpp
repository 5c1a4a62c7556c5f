#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "hinfobs/system_model.hpp"

namespace hinfobs {

using Signal = std::function<Vector(double)>;            // t -> R^q
using MatrixSignal = std::function<Matrix(double)>;      // t -> k x k, sigma_max <= 1

// One simulation setup: plant with uncertainty realization F(t), additive
// nonlinear perturbation delta_phi, disturbance w, plus the observer gain.
// Null w / F mean identically zero; a scenario with neither disturbance nor
// uncertainty is nominal and eligible for decay checking.
struct Scenario {
    UncertainSystem sys;
    Matrix L;
    Vector x0;
    Vector xhat0;
    Signal w;
    MatrixSignal F;
    std::optional<Nonlinearity> delta_phi;
    double t_final = 20.0;
    double dt = 1e-3;
};

struct SimulationTrace {
    std::vector<double> t;
    std::vector<Vector> x;
    std::vector<Vector> xhat;
    std::vector<Vector> e; // x - xhat at every grid point
    std::vector<Vector> z; // H e at every grid point
    std::vector<Vector> w;
    bool nominal = false;

    size_t size() const { return t.size(); }
};

struct DecayCheck {
    bool passes = false;
    double worst_ratio = 0.0; // max over the grid of ||e|| / bound
    double kappa = 0.0;       // condition number of P1
};

// Classical fixed-step fourth-order Runge-Kutta over the coupled plant and
// observer dynamics.
SimulationTrace integrate(const Scenario& scenario);

// Verifies ||e(t)|| <= kappa(P1)^(1/2) exp(-beta t) ||e(0)|| on the grid.
// Only meaningful on nominal traces; anything else is rejected.
DecayCheck decay_check(const SimulationTrace& trace, double beta, const Matrix& P1);

// Largest ratio ||z||_L2 / ||w||_L2 over the traces, trapezoidal quadrature
// on the grid. Traces must carry a nonzero disturbance and start with zero
// estimation error.
double l2_gain_estimate(const std::vector<SimulationTrace>& traces);

} // namespace hinfobs
