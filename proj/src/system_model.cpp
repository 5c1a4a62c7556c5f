#include "hinfobs/system_model.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace hinfobs {

namespace {

std::string shape_of(const Matrix& m) {
    std::ostringstream os;
    os << m.rows() << "x" << m.cols();
    return os.str();
}

void require_shape(const Matrix& m, int rows, int cols, const char* name,
                   const char* against) {
    if (m.rows() != rows || m.cols() != cols) {
        std::ostringstream os;
        os << name << " is " << shape_of(m) << " but " << against
           << " requires " << rows << "x" << cols;
        throw DimensionMismatch(os.str());
    }
}

Vector sample_in_box(const Box& box, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Vector x(box.lo.size());
    for (Eigen::Index i = 0; i < x.size(); ++i)
        x(i) = box.lo(i) + unit(rng) * (box.hi(i) - box.lo(i));
    return x;
}

} // namespace

Box Box::centered(int n, double half_width) {
    Box b;
    b.lo = Vector::Constant(n, -half_width);
    b.hi = Vector::Constant(n, half_width);
    return b;
}

bool Box::empty() const {
    return lo.size() == 0 || lo.size() != hi.size() || (hi.array() < lo.array()).any();
}

Dimensions UncertainSystem::dims() const {
    Dimensions d;
    d.n = static_cast<int>(A.rows());
    d.p = static_cast<int>(C.rows());
    d.q = static_cast<int>(B.cols());
    d.k = static_cast<int>(M1.cols());
    d.m = static_cast<int>(H.rows());
    return d;
}

Box UncertainSystem::effective_region() const {
    if (region)
        return *region;
    return Box::centered(static_cast<int>(A.rows()), 10.0);
}

Vector UncertainSystem::eval_phi(const Vector& x) const {
    Vector u = u_nominal.size() > 0 ? u_nominal : Vector::Zero(1);
    return phi ? phi(x, u) : Vector::Zero(x.size());
}

UncertainSystem validate_system(UncertainSystem sys) {
    const int n = static_cast<int>(sys.A.rows());
    if (sys.A.cols() != n)
        throw DimensionMismatch("A is " + shape_of(sys.A) + " but must be square");
    const int p = static_cast<int>(sys.C.rows());
    const int q = static_cast<int>(sys.B.cols());
    const int k = static_cast<int>(sys.M1.cols());
    const int m = static_cast<int>(sys.H.rows());

    require_shape(sys.C, p, n, "C", "A");
    require_shape(sys.B, n, q, "B", "A");
    require_shape(sys.D, p, q, "D", "C and B");
    require_shape(sys.M1, n, k, "M1", "A");
    require_shape(sys.N1, k, n, "N1", "M1");
    require_shape(sys.M2, p, k, "M2", "C and M1");
    require_shape(sys.N2, k, n, "N2", "M1");
    require_shape(sys.H, m, n, "H", "A");

    if (!(sys.gamma_actual > 0.0))
        throw Error("gamma_actual must be > 0");

    if (sys.Gamma_actual) {
        require_shape(*sys.Gamma_actual, n, n, "Gamma_actual", "A");
        if (!sys.Gamma_actual->allFinite())
            throw Error("Gamma_actual has non-finite entries");
    }

    if (sys.region && sys.region->empty())
        throw EmptyRegion("declared Lipschitz region is empty");

    if (sys.phi) {
        const Vector zero = Vector::Zero(n);
        std::mt19937_64 rng(0x5eed);
        std::uniform_real_distribution<double> unit(-1.0, 1.0);
        const Vector u0 = sys.u_nominal.size() > 0 ? sys.u_nominal : Vector::Zero(1);
        for (int trial = 0; trial < 4; ++trial) {
            Vector u = u0;
            if (trial > 0)
                for (Eigen::Index i = 0; i < u.size(); ++i)
                    u(i) += unit(rng);
            Vector at_origin = sys.phi(zero, u);
            if (at_origin.size() != n)
                throw DimensionMismatch("phi returns dimension " +
                                        std::to_string(at_origin.size()) +
                                        " but the state dimension is " + std::to_string(n));
            if (at_origin.norm() > 1e-9)
                throw NonvanishingOrigin("phi(0, u) has norm " +
                                         std::to_string(at_origin.norm()));
        }
    }
    return sys;
}

double estimate_lipschitz(const UncertainSystem& sys, const Box& region,
                          int n_samples, std::uint64_t seed) {
    if (region.empty())
        throw EmptyRegion("sampling region is empty");
    if (n_samples < 2)
        throw Error("estimate_lipschitz needs n_samples >= 2");

    std::mt19937_64 rng(seed);
    double best = 0.0;
    for (int i = 0; i < n_samples; ++i) {
        Vector x1 = sample_in_box(region, rng);
        Vector x2 = sample_in_box(region, rng);
        double dist = (x1 - x2).norm();
        if (dist < 1e-12)
            continue;
        double ratio = (sys.eval_phi(x1) - sys.eval_phi(x2)).norm() / dist;
        best = std::max(best, ratio);
    }
    return best;
}

Matrix estimate_matrix_lipschitz(const UncertainSystem& sys, const Box& region,
                                 int n_samples, std::uint64_t seed) {
    if (region.empty())
        throw EmptyRegion("sampling region is empty");
    const int n = static_cast<int>(sys.A.rows());

    std::mt19937_64 rng(seed);
    const double h = 1e-5 * std::max(1.0, (region.hi - region.lo).maxCoeff());

    // Per-entry directional slopes: Gamma_hat(i,j) bounds |d phi_i / d x_j|.
    Matrix gamma_hat = Matrix::Zero(n, n);
    const int probe_points = std::max(16, n_samples / 10);
    for (int s = 0; s < probe_points; ++s) {
        Vector x = sample_in_box(region, rng);
        Vector fx = sys.eval_phi(x);
        for (int j = 0; j < n; ++j) {
            Vector xh = x;
            xh(j) += h;
            Vector slope = (sys.eval_phi(xh) - fx) / h;
            for (int i = 0; i < n; ++i)
                gamma_hat(i, j) = std::max(gamma_hat(i, j), std::abs(slope(i)));
        }
    }

    // Verification pass on fresh pairs; inflate until the certificate holds.
    for (int attempt = 0; attempt < 8; ++attempt) {
        double worst = 0.0;
        std::mt19937_64 check_rng(seed ^ 0x9e3779b97f4a7c15ull ^ attempt);
        for (int i = 0; i < n_samples; ++i) {
            Vector x1 = sample_in_box(region, check_rng);
            Vector x2 = sample_in_box(region, check_rng);
            Vector d = x1 - x2;
            if (d.norm() < 1e-12)
                continue;
            double lhs = (sys.eval_phi(x1) - sys.eval_phi(x2)).norm();
            double rhs = (gamma_hat * d).norm();
            if (lhs > 1e-300)
                worst = std::max(worst, rhs > 0 ? lhs / rhs : std::numeric_limits<double>::infinity());
        }
        if (worst <= 1.0)
            return gamma_hat;
        if (!std::isfinite(worst)) {
            // Degenerate certificate (phi nonzero but slopes missed); fall back
            // to a scalar certificate spread over the diagonal.
            double g = estimate_lipschitz(sys, region, n_samples, seed ^ 0xabcdu);
            gamma_hat += Matrix::Identity(n, n) * std::max(g, 1e-12);
            continue;
        }
        gamma_hat *= worst * 1.02;
    }
    return gamma_hat;
}

} // namespace hinfobs
