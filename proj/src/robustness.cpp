#include "hinfobs/robustness.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>
#include <random>
#include <string>

namespace hinfobs {

NormMargin norm_margin(double gamma_actual, double gamma_star) {
    if (gamma_actual < 0.0 || gamma_star < 0.0)
        throw PreconditionViolated("Lipschitz constants must be nonnegative");
    NormMargin m;
    m.gamma_actual = gamma_actual;
    m.gamma_star = gamma_star;
    m.delta_gamma = gamma_star - gamma_actual;
    return m;
}

HadamardCheck hadamard_bound_holds(const Matrix& T, const Matrix& U) {
    const int n = static_cast<int>(T.rows());
    if (T.cols() != n || U.rows() != n || U.cols() != n)
        throw ShapeMismatch("T and U must be square matrices of equal size");
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (std::abs(T(i, j)) > U(i, j))
                throw PreconditionViolated("|T| <= U fails at entry (" +
                                           std::to_string(i) + "," + std::to_string(j) +
                                           "): |" + std::to_string(T(i, j)) + "| > " +
                                           std::to_string(U(i, j)));

    HadamardCheck check;
    Matrix UUT = U * U.transpose();
    check.witness = (n * UUT.diagonal()).asDiagonal();
    check.witness -= T * T.transpose();
    Eigen::SelfAdjointEigenSolver<Matrix> eig(check.witness, Eigen::EigenvaluesOnly);
    check.min_eigenvalue = eig.eigenvalues().minCoeff();
    const double scale = std::max(1.0, UUT.diagonal().maxCoeff());
    check.holds = check.min_eigenvalue >= -1e-10 * scale;
    return check;
}

ElementwiseMargin elementwise_margin(const Matrix& Gamma_actual,
                                     const Matrix& Gamma_star,
                                     int randomized_trials, std::uint64_t seed) {
    if (Gamma_actual.rows() != Gamma_star.rows() ||
        Gamma_actual.cols() != Gamma_star.cols())
        throw ShapeMismatch("Gamma_actual and Gamma_star shapes differ");
    if ((Gamma_star.array() < 0.0).any())
        throw PreconditionViolated("Gamma_star must be entrywise nonnegative");

    const int n = static_cast<int>(Gamma_star.rows());
    const double factor = std::pow(static_cast<double>(n), -0.75);

    ElementwiseMargin m;
    m.Gamma_actual = Gamma_actual;
    m.Gamma_star = Gamma_star;
    m.lo = -factor * Gamma_star - Gamma_actual;
    m.hi = factor * Gamma_star - Gamma_actual;

    if (randomized_trials > 0) {
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> unit(-1.0, 1.0);
        const double sigma_star = Gamma_star.jacobiSvd().singularValues()(0);
        for (int trial = 0; trial < randomized_trials; ++trial) {
            Matrix Gd(n, n);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    Gd(i, j) = unit(rng) * factor * Gamma_star(i, j);
            double sigma_d = Gd.jacobiSvd().singularValues()(0);
            if (sigma_d > sigma_star + 1e-10)
                throw Error("element-wise margin verification failed: sampled "
                            "perturbation has sigma_max " + std::to_string(sigma_d) +
                            " > " + std::to_string(sigma_star));
        }
    }
    return m;
}

UncertaintyVerdict verify_uncertain_nonlinearity(const UncertainSystem& sys,
                                                 const Nonlinearity& delta_phi,
                                                 const NormMargin& margin,
                                                 const Box& region, int samples,
                                                 std::uint64_t seed) {
    if (region.empty())
        throw EmptyRegion("sampling region is empty");
    const int n = static_cast<int>(region.lo.size());
    const Vector u = sys.u_nominal;

    Vector at_origin = delta_phi(Vector::Zero(n), u);
    if (at_origin.norm() > 1e-9)
        throw PreconditionViolated("delta_phi must vanish at the origin, got norm " +
                                   std::to_string(at_origin.norm()));

    UncertaintyVerdict verdict;
    verdict.bound = margin.delta_gamma;

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto draw = [&] {
        Vector x(n);
        for (int i = 0; i < n; ++i)
            x(i) = region.lo(i) + unit(rng) * (region.hi(i) - region.lo(i));
        return x;
    };

    Vector worst_a = Vector::Zero(n), worst_b = Vector::Zero(n);
    for (int s = 0; s < samples; ++s) {
        Vector a = draw();
        Vector b = s % 8 == 0 ? Vector(Vector::Zero(n)) : draw();
        double dist = (a - b).norm();
        if (dist < 1e-12)
            continue;
        double ratio = (delta_phi(a, u) - delta_phi(b, u)).norm() / dist;
        if (ratio > verdict.worst_ratio) {
            verdict.worst_ratio = ratio;
            worst_a = a;
            worst_b = b;
        }
    }

    verdict.certified = margin.guaranteed() && verdict.worst_ratio <= verdict.bound;
    if (!verdict.certified)
        verdict.violating_pair = std::make_pair(worst_a, worst_b);
    return verdict;
}

} // namespace hinfobs
