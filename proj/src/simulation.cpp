#include "hinfobs/simulation.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <string>

namespace hinfobs {

namespace {

struct CoupledDynamics {
    const Scenario& sc;
    Dimensions d;

    Vector operator()(double t, const Vector& state) const {
        const Vector x = state.head(d.n);
        const Vector xhat = state.tail(d.n);

        Vector wt = sc.w ? sc.w(t) : Vector(Vector::Zero(d.q));
        Matrix A_t = sc.sys.A;
        Matrix C_t = sc.sys.C;
        if (sc.F) {
            Matrix Ft = sc.F(t);
            A_t += sc.sys.M1 * Ft * sc.sys.N1;
            C_t += sc.sys.M2 * Ft * sc.sys.N2;
        }

        Vector phi_x = sc.sys.eval_phi(x);
        if (sc.delta_phi) {
            Vector u = sc.sys.u_nominal.size() > 0 ? sc.sys.u_nominal
                                                   : Vector(Vector::Zero(1));
            phi_x += (*sc.delta_phi)(x, u);
        }

        Vector xdot = A_t * x + phi_x + sc.sys.B * wt;
        Vector y = C_t * x + sc.sys.D * wt;
        Vector xhatdot = sc.sys.A * xhat + sc.sys.eval_phi(xhat) +
                         sc.L * (y - sc.sys.C * xhat);

        Vector ds(2 * d.n);
        ds << xdot, xhatdot;
        return ds;
    }
};

} // namespace

SimulationTrace integrate(const Scenario& scenario) {
    const Dimensions d = scenario.sys.dims();
    if (!(scenario.dt > 0.0))
        throw PreconditionViolated("dt must be positive");
    if (scenario.t_final < scenario.dt)
        throw PreconditionViolated("t_final must be at least dt");
    if (scenario.x0.size() != d.n || scenario.xhat0.size() != d.n)
        throw DimensionMismatch("initial states must have dimension " +
                                std::to_string(d.n));
    if (scenario.L.rows() != d.n || scenario.L.cols() != d.p)
        throw DimensionMismatch("observer gain must be " + std::to_string(d.n) +
                                "x" + std::to_string(d.p));

    CoupledDynamics f{scenario, d};

    SimulationTrace trace;
    trace.nominal = !scenario.w && !scenario.F && !scenario.delta_phi;
    const int steps =
        static_cast<int>(std::ceil(scenario.t_final / scenario.dt - 1e-9));
    trace.t.reserve(steps + 1);
    trace.x.reserve(steps + 1);
    trace.xhat.reserve(steps + 1);
    trace.e.reserve(steps + 1);
    trace.z.reserve(steps + 1);
    trace.w.reserve(steps + 1);

    Vector state(2 * d.n);
    state << scenario.x0, scenario.xhat0;
    double t = 0.0;

    auto record = [&](double time, const Vector& s) {
        trace.t.push_back(time);
        Vector x = s.head(d.n);
        Vector xhat = s.tail(d.n);
        trace.x.push_back(x);
        trace.xhat.push_back(xhat);
        trace.e.push_back(x - xhat);
        trace.z.push_back(scenario.sys.H * (x - xhat));
        trace.w.push_back(scenario.w ? scenario.w(time) : Vector(Vector::Zero(d.q)));
    };
    record(t, state);

    for (int step = 0; step < steps; ++step) {
        const double h = std::min(scenario.dt, scenario.t_final - t);
        Vector k1 = f(t, state);
        Vector k2 = f(t + h / 2.0, state + (h / 2.0) * k1);
        Vector k3 = f(t + h / 2.0, state + (h / 2.0) * k2);
        Vector k4 = f(t + h, state + h * k3);
        state += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        t = step + 1 == steps ? scenario.t_final : t + h;
        if (!state.allFinite())
            throw NonFiniteState("state blew up at t=" + std::to_string(t));
        record(t, state);
    }
    return trace;
}

DecayCheck decay_check(const SimulationTrace& trace, double beta, const Matrix& P1) {
    if (!trace.nominal)
        throw PreconditionViolated(
            "decay check requires a nominal trace (no disturbance, no uncertainty)");
    if (trace.size() == 0)
        throw PreconditionViolated("empty trace");

    Eigen::SelfAdjointEigenSolver<Matrix> eig(P1, Eigen::EigenvaluesOnly);
    const double lmin = eig.eigenvalues().minCoeff();
    const double lmax = eig.eigenvalues().maxCoeff();
    if (!(lmin > 0.0))
        throw NotPositiveDefinite("P1 must be positive definite");

    DecayCheck check;
    check.kappa = lmax / lmin;
    const double e0 = trace.e.front().norm();
    const double front = std::sqrt(check.kappa) * e0;

    for (size_t i = 0; i < trace.size(); ++i) {
        const double bound = front * std::exp(-beta * trace.t[i]);
        const double en = trace.e[i].norm();
        double ratio;
        if (bound > 0.0)
            ratio = en / bound;
        else
            ratio = en > 1e-12 ? std::numeric_limits<double>::infinity() : 0.0;
        check.worst_ratio = std::max(check.worst_ratio, ratio);
    }
    check.passes = check.worst_ratio <= 1.0 + 1e-6;
    return check;
}

double l2_gain_estimate(const std::vector<SimulationTrace>& traces) {
    if (traces.empty())
        throw PreconditionViolated("need at least one trace");

    double worst = 0.0;
    for (const auto& trace : traces) {
        if (trace.size() < 2)
            throw PreconditionViolated("trace too short for quadrature");
        if (trace.e.front().norm() > 1e-9)
            throw PreconditionViolated(
                "gain estimation requires zero initial estimation error");

        double zz = 0.0, ww = 0.0;
        for (size_t i = 0; i + 1 < trace.size(); ++i) {
            const double h = trace.t[i + 1] - trace.t[i];
            zz += 0.5 * h *
                  (trace.z[i].squaredNorm() + trace.z[i + 1].squaredNorm());
            ww += 0.5 * h *
                  (trace.w[i].squaredNorm() + trace.w[i + 1].squaredNorm());
        }
        if (ww <= 0.0)
            throw ZeroDisturbance("trace has identically zero disturbance");
        worst = std::max(worst, std::sqrt(zz / ww));
    }
    return worst;
}

} // namespace hinfobs
