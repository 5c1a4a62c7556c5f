#include "hinfobs/sdp_backend.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <sstream>

namespace hinfobs {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

int triangle_size(int n) { return n * (n + 1) / 2; }

double trace_product(const Matrix& A, const Matrix& B) {
    // tr(A * B) without forming the product.
    return (A.cwiseProduct(B.transpose())).sum();
}

struct BlockState {
    Matrix S;
    Eigen::LLT<Matrix> chol;
};

// Largest step alpha with M + alpha * dM staying positive semidefinite.
// Works from the eigendecomposition of M so it stays usable when M sits
// numerically on the cone boundary.
double max_step(const Matrix& M, const Matrix& dM) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(M);
    const Eigen::VectorXd& d = eig.eigenvalues();
    const double dmax = d.maxCoeff();
    if (!(dmax > 0.0))
        return 0.0;
    Eigen::VectorXd scale = d.cwiseMax(1e-16 * dmax).cwiseSqrt().cwiseInverse();
    Matrix W = scale.asDiagonal() *
               (eig.eigenvectors().transpose() * dM * eig.eigenvectors()) *
               scale.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Matrix> ew((W + W.transpose()) / 2.0,
                                             Eigen::EigenvaluesOnly);
    double lmin = ew.eigenvalues().minCoeff();
    if (lmin >= -1e-14)
        return kInf;
    return -1.0 / lmin;
}

struct IpmOutcome {
    enum class Kind { Converged, EarlyExit, IterationLimit, Stalled, NumericalTrouble };
    Kind kind = Kind::NumericalTrouble;
    Eigen::VectorXd x;
    std::vector<Matrix> Z;
    int iterations = 0;
    double gap = 0.0;
    double dual_residual = 0.0;
    std::string note;
};

// Core HKM predictor-corrector loop for
//   minimize c^T x  s.t.  F0_b + sum_i x_i F_bi >= 0 for every block b,
// started from x0 with every F_b(x0) strictly positive definite.
IpmOutcome ipm_core(const std::vector<SdpBlock>& blocks, const Eigen::VectorXd& c,
                    const Eigen::VectorXd& x0, double tol, int max_iters,
                    int exit_coord, double exit_value) {
    const int N = static_cast<int>(c.size());
    const int nblk = static_cast<int>(blocks.size());

    int K = 0;
    for (const auto& b : blocks)
        K += b.dim;

    IpmOutcome out;
    out.x = x0;
    out.Z.resize(nblk);
    for (int b = 0; b < nblk; ++b)
        out.Z[b] = Matrix::Identity(blocks[b].dim, blocks[b].dim);

    auto assemble = [&](const Eigen::VectorXd& x, int b) {
        Matrix S = blocks[b].F0;
        for (size_t s = 0; s < blocks[b].support.size(); ++s)
            S += x(blocks[b].support[s]) * blocks[b].F[s];
        return S;
    };

    std::vector<BlockState> st(nblk);
    std::vector<double> metric_history;
    const double cnorm = 1.0 + c.cwiseAbs().maxCoeff();
    const bool trace = std::getenv("HINFOBS_IPM_TRACE") != nullptr;

    for (int iter = 0; iter < max_iters; ++iter) {
        out.iterations = iter;

        bool chol_ok = true;
        for (int b = 0; b < nblk; ++b) {
            st[b].S = assemble(out.x, b);
            st[b].chol.compute(st[b].S);
            if (st[b].chol.info() != Eigen::Success) {
                chol_ok = false;
                break;
            }
        }
        if (!chol_ok) {
            out.note = "slack lost positive definiteness";
            out.kind = IpmOutcome::Kind::NumericalTrouble;
            return out;
        }

        Eigen::VectorXd r = c;
        double compl_sum = 0.0;
        double dobj = 0.0;
        for (int b = 0; b < nblk; ++b) {
            for (size_t s = 0; s < blocks[b].support.size(); ++s)
                r(blocks[b].support[s]) -= trace_product(blocks[b].F[s], out.Z[b]);
            compl_sum += trace_product(st[b].S, out.Z[b]);
            dobj -= trace_product(blocks[b].F0, out.Z[b]);
        }
        const double mu = compl_sum / K;
        const double pobj = c.dot(out.x);
        const double gap = pobj - dobj;
        const double relgap = std::abs(gap) / (1.0 + std::abs(pobj) + std::abs(dobj));
        const double rnorm = r.cwiseAbs().maxCoeff() / cnorm;
        out.gap = relgap;
        out.dual_residual = rnorm;

        if (trace)
            std::fprintf(stderr, "[ipm] it=%3d mu=%10.3e gap=%10.3e res=%10.3e obj=%12.6e\n",
                         iter, mu, relgap, rnorm, pobj);
        if (!std::isfinite(mu) || mu < 0.0) {
            out.note = "complementarity became non-finite";
            out.kind = IpmOutcome::Kind::NumericalTrouble;
            return out;
        }
        if (relgap <= tol && rnorm <= tol) {
            out.kind = IpmOutcome::Kind::Converged;
            return out;
        }
        if (exit_coord >= 0 && out.x(exit_coord) <= exit_value) {
            out.kind = IpmOutcome::Kind::EarlyExit;
            return out;
        }

        const double metric = relgap + rnorm;
        metric_history.push_back(metric);
        if (metric_history.size() > 50) {
            double past = metric_history[metric_history.size() - 51];
            if (metric > 0.9 * past) {
                out.note = "progress stalled for 50 iterations";
                out.kind = IpmOutcome::Kind::Stalled;
                return out;
            }
        }

        // Schur complement B_ij = tr(F_i S^-1 F_j Z). Nonsymmetric for this
        // direction, so it is factored with partial-pivot LU.
        Matrix B = Matrix::Zero(N, N);
        std::vector<std::vector<Matrix>> SinvF(nblk), FZ(nblk);
        for (int b = 0; b < nblk; ++b) {
            const auto& blk = blocks[b];
            const size_t ns = blk.support.size();
            SinvF[b].resize(ns);
            FZ[b].resize(ns);
            for (size_t s = 0; s < ns; ++s) {
                SinvF[b][s] = st[b].chol.solve(blk.F[s]);
                FZ[b][s] = blk.F[s] * out.Z[b];
            }
            for (size_t si = 0; si < ns; ++si)
                for (size_t sj = 0; sj < ns; ++sj)
                    B(blk.support[si], blk.support[sj]) +=
                        (SinvF[b][si].cwiseProduct(FZ[b][sj])).sum();
        }

        Eigen::PartialPivLU<Matrix> blu(B);
        auto solve_schur = [&](const Eigen::VectorXd& rhs) {
            Eigen::VectorXd sol = blu.solve(rhs);
            double err = (B * sol - rhs).norm() / (1.0 + rhs.norm());
            double reg = 1e-12 * (1.0 + B.diagonal().cwiseAbs().maxCoeff());
            while ((!sol.allFinite() || err > 1e-8) && reg < 1e-2) {
                if (trace)
                    std::fprintf(stderr, "[ipm]   schur retry reg=%.1e err=%.3e\n", reg, err);
                Eigen::PartialPivLU<Matrix> rlu(B + reg * Matrix::Identity(N, N));
                sol = rlu.solve(rhs);
                err = (B * sol - rhs).norm() / (1.0 + rhs.norm());
                reg *= 100.0;
            }
            return sol;
        };

        // Predictor.
        Eigen::VectorXd dx_aff = solve_schur(-c);
        if (!dx_aff.allFinite()) {
            if (trace)
                std::fprintf(stderr, "[ipm] it=%3d schur breakdown\n", iter);
            out.note = "Schur system could not be solved";
            out.kind = IpmOutcome::Kind::NumericalTrouble;
            return out;
        }
        std::vector<Matrix> dS_aff(nblk), dZ_aff(nblk);
        double ap_aff = 1.0, ad_aff = 1.0;
        for (int b = 0; b < nblk; ++b) {
            const auto& blk = blocks[b];
            Matrix dS = Matrix::Zero(blk.dim, blk.dim);
            for (size_t s = 0; s < blk.support.size(); ++s)
                dS += dx_aff(blk.support[s]) * blk.F[s];
            Matrix dZ = -out.Z[b] - st[b].chol.solve(dS * out.Z[b]);
            dZ = (dZ + dZ.transpose()) / 2.0;
            dS_aff[b] = std::move(dS);
            dZ_aff[b] = std::move(dZ);
            ap_aff = std::min(ap_aff, max_step(st[b].S, dS_aff[b]));
            ad_aff = std::min(ad_aff, max_step(out.Z[b], dZ_aff[b]));
        }
        double mu_aff = 0.0;
        for (int b = 0; b < nblk; ++b)
            mu_aff += trace_product(Matrix(st[b].S + ap_aff * dS_aff[b]),
                                    Matrix(out.Z[b] + ad_aff * dZ_aff[b]));
        mu_aff = std::max(mu_aff / K, 0.0);
        double sigma = std::clamp(std::pow(mu_aff / mu, 3.0), 1e-9, 1.0);

        // Corrector. The second-order cross term can throw the dual iterate
        // out of the cone near the boundary; when the resulting step
        // collapses, fall back to a pure centering direction.
        const double tau = mu < 1e-4 ? 0.98 : 0.95;
        std::vector<Matrix> Sinv(nblk);
        for (int b = 0; b < nblk; ++b)
            Sinv[b] = st[b].chol.solve(Matrix::Identity(blocks[b].dim, blocks[b].dim));

        Eigen::VectorXd dx;
        std::vector<Matrix> dZ(nblk);
        double ap = 0.0, ad = 0.0;

        auto build_direction = [&](double nu, bool with_cross) -> bool {
            Eigen::VectorXd h(N);
            h.setZero();
            std::vector<Matrix> corr(nblk);
            for (int b = 0; b < nblk; ++b) {
                const auto& blk = blocks[b];
                if (with_cross)
                    corr[b] = st[b].chol.solve(Matrix(dS_aff[b] * dZ_aff[b]));
                else
                    corr[b] = Matrix::Zero(blk.dim, blk.dim);
                for (size_t s = 0; s < blk.support.size(); ++s)
                    h(blk.support[s]) += nu * trace_product(blk.F[s], Sinv[b]) -
                                         trace_product(blk.F[s], corr[b]);
            }
            h -= c;
            dx = solve_schur(h);
            if (!dx.allFinite())
                return false;
            ap = 1.0;
            ad = 1.0;
            for (int b = 0; b < nblk; ++b) {
                const auto& blk = blocks[b];
                Matrix dS = Matrix::Zero(blk.dim, blk.dim);
                for (size_t s = 0; s < blk.support.size(); ++s)
                    dS += dx(blk.support[s]) * blk.F[s];
                Matrix dZb = nu * Sinv[b] - out.Z[b] -
                             st[b].chol.solve(Matrix(dS * out.Z[b])) - corr[b];
                dZ[b] = (dZb + dZb.transpose()) / 2.0;
                ap = std::min(ap, tau * max_step(st[b].S, dS));
                ad = std::min(ad, tau * max_step(out.Z[b], dZ[b]));
            }
            ap = std::min(ap, 1.0);
            ad = std::min(ad, 1.0);
            return true;
        };

        if (!build_direction(sigma * mu, true)) {
            out.note = "Schur system could not be solved";
            out.kind = IpmOutcome::Kind::NumericalTrouble;
            return out;
        }
        if (std::min(ap, ad) < 0.05) {
            double nu_safe = std::max(sigma, 0.9) * mu;
            if (!build_direction(nu_safe, false)) {
                out.note = "Schur system could not be solved";
                out.kind = IpmOutcome::Kind::NumericalTrouble;
                return out;
            }
        }
        if (trace)
            std::fprintf(stderr,
                         "[ipm]   |dx|=%.3e ap=%.3e ad=%.3e sigma=%.3e apaff=%.3e adaff=%.3e\n",
                         dx.norm(), ap, ad, sigma, ap_aff, ad_aff);
        if (ap <= 1e-12 && ad <= 1e-12) {
            out.note = "step lengths collapsed";
            out.kind = IpmOutcome::Kind::Stalled;
            return out;
        }

        out.x += ap * dx;
        for (int b = 0; b < nblk; ++b)
            out.Z[b] += ad * dZ[b];
    }
    out.kind = IpmOutcome::Kind::IterationLimit;
    return out;
}

double worst_block_violation(const std::vector<SdpBlock>& blocks, const Eigen::VectorXd& x) {
    double worst = -kInf;
    for (const auto& blk : blocks) {
        Matrix S = blk.F0;
        for (size_t s = 0; s < blk.support.size(); ++s)
            S += x(blk.support[s]) * blk.F[s];
        Eigen::SelfAdjointEigenSolver<Matrix> eig((S + S.transpose()) / 2.0,
                                                  Eigen::EigenvaluesOnly);
        worst = std::max(worst, -eig.eigenvalues().minCoeff());
    }
    return worst;
}

} // namespace

const char* to_string(SolveReport::Status s) {
    switch (s) {
        case SolveReport::Status::Optimal: return "optimal";
        case SolveReport::Status::Infeasible: return "infeasible";
        case SolveReport::Status::NumericalFailure: return "numerical-failure";
        case SolveReport::Status::IterationLimit: return "iteration-limit";
    }
    return "unknown";
}

int CoordinateMap::index_of(const std::string& var, int row, int col) const {
    int offset = 0;
    for (const auto& v : registry) {
        int span = v.structure == VarStructure::SymmetricPositiveDefinite
                       ? triangle_size(v.rows)
                       : v.rows * v.cols;
        if (v.name == var) {
            if (row >= v.rows || col >= v.cols || row < 0 || col < 0)
                throw ShapeMismatch("coordinate (" + std::to_string(row) + "," +
                                    std::to_string(col) + ") outside " + var);
            if (v.structure == VarStructure::SymmetricPositiveDefinite) {
                int r = std::max(row, col), c = std::min(row, col);
                return offset + r * (r + 1) / 2 + c;
            }
            return offset + row * v.cols + col;
        }
        offset += span;
    }
    throw Error("no variable named " + var);
}

Assignment CoordinateMap::to_assignment(const Eigen::VectorXd& x) const {
    Assignment a;
    for (const auto& v : registry)
        a[v.name] = Matrix::Zero(v.rows, v.cols);
    for (int i = 0; i < size(); ++i) {
        const Entry& e = coords[i];
        Matrix& m = a[e.var];
        m(e.row, e.col) = x(i);
        const MatrixVariable* reg = nullptr;
        for (const auto& v : registry)
            if (v.name == e.var)
                reg = &v;
        if (reg && reg->structure == VarStructure::SymmetricPositiveDefinite)
            m(e.col, e.row) = x(i);
    }
    return a;
}

Eigen::VectorXd CoordinateMap::from_assignment(const Assignment& a) const {
    Eigen::VectorXd x(size());
    for (int i = 0; i < size(); ++i) {
        const Entry& e = coords[i];
        auto it = a.find(e.var);
        if (it == a.end())
            throw ShapeMismatch("assignment is missing variable " + e.var);
        x(i) = it->second(e.row, e.col);
    }
    return x;
}

CoordinateMap CoordinateMap::build(const std::vector<MatrixVariable>& variables) {
    CoordinateMap map;
    map.registry = variables;
    for (const auto& v : variables) {
        if (v.structure == VarStructure::SymmetricPositiveDefinite) {
            for (int r = 0; r < v.rows; ++r)
                for (int c = 0; c <= r; ++c)
                    map.coords.push_back({v.name, r, c});
        } else {
            for (int r = 0; r < v.rows; ++r)
                for (int c = 0; c < v.cols; ++c)
                    map.coords.push_back({v.name, r, c});
        }
    }
    return map;
}

StandardSdp lower(const LmiProblem& problem) {
    StandardSdp sdp;
    sdp.map = CoordinateMap::build(problem.variables);
    const int N = sdp.map.size();

    const Assignment zero = problem.zero_assignment();
    for (const auto& mc : problem.constraints) {
        const double sign = mc.sense == ConstraintSense::NegativeDefinite ? -1.0 : 1.0;
        Matrix F0raw = mc.evaluate(zero);
        if (F0raw.rows() != mc.dim || F0raw.cols() != mc.dim)
            throw ShapeMismatch("constraint " + mc.name + " evaluates to " +
                                std::to_string(F0raw.rows()) + "x" +
                                std::to_string(F0raw.cols()) + ", registered dim " +
                                std::to_string(mc.dim));
        SdpBlock blk;
        blk.name = mc.name;
        blk.dim = mc.dim;
        blk.F0 = sign * (F0raw + F0raw.transpose()) / 2.0 -
                 problem.margin * Matrix::Identity(mc.dim, mc.dim);
        for (int i = 0; i < N; ++i) {
            const auto& e = sdp.map.coords[i];
            Assignment probe = zero;
            Matrix& m = probe[e.var];
            m(e.row, e.col) = 1.0;
            if (problem.variable(e.var).structure == VarStructure::SymmetricPositiveDefinite)
                m(e.col, e.row) = 1.0;
            Matrix Fi = mc.evaluate(probe) - F0raw;
            Fi = (Fi + Fi.transpose()) / 2.0;
            if (Fi.cwiseAbs().maxCoeff() > 0.0) {
                blk.support.push_back(i);
                blk.F.push_back(sign * Fi);
            }
        }
        sdp.blocks.push_back(std::move(blk));
    }

    for (const auto& v : problem.variables) {
        if (v.structure != VarStructure::SymmetricPositiveDefinite)
            continue;
        SdpBlock blk;
        blk.name = v.name + "_spd";
        blk.dim = v.rows;
        blk.F0 = -(v.lower_bound + problem.margin) * Matrix::Identity(v.rows, v.rows);
        for (int r = 0; r < v.rows; ++r)
            for (int c = 0; c <= r; ++c) {
                Matrix E = Matrix::Zero(v.rows, v.rows);
                E(r, c) = 1.0;
                E(c, r) = 1.0;
                blk.support.push_back(sdp.map.index_of(v.name, r, c));
                blk.F.push_back(std::move(E));
            }
        sdp.blocks.push_back(std::move(blk));
    }

    for (const auto& sc : problem.scalar_constraints) {
        SdpBlock blk;
        blk.name = sc.name;
        blk.dim = 1;
        blk.F0 = Matrix::Constant(1, 1, -sc.rhs);
        std::map<int, double> coeffs;
        for (const auto& t : sc.terms)
            coeffs[sdp.map.index_of(t.var, t.row, t.col)] += t.coeff;
        for (const auto& [idx, coeff] : coeffs) {
            blk.support.push_back(idx);
            blk.F.push_back(Matrix::Constant(1, 1, coeff));
        }
        sdp.blocks.push_back(std::move(blk));
    }

    sdp.c = Eigen::VectorXd::Zero(N);
    for (const auto& t : problem.objective.terms)
        sdp.c(sdp.map.index_of(t.var, t.row, t.col)) += t.coeff;
    return sdp;
}

SolveReport solve(const StandardSdp& sdp, const SolveOptions& options) {
    const auto t_start = std::chrono::steady_clock::now();
    const int N = static_cast<int>(sdp.c.size());

    std::vector<SdpBlock> blocks = sdp.blocks;
    if (options.feasibility_radius) {
        const double R = *options.feasibility_radius;
        if (!(R > 0.0))
            throw Error("feasibility_radius must be > 0");
        for (int i = 0; i < N; ++i) {
            SdpBlock hi;
            hi.name = "radius_hi_" + std::to_string(i);
            hi.dim = 1;
            hi.F0 = Matrix::Constant(1, 1, R);
            hi.support = {i};
            hi.F = {Matrix::Constant(1, 1, -1.0)};
            blocks.push_back(std::move(hi));
            SdpBlock lo;
            lo.name = "radius_lo_" + std::to_string(i);
            lo.dim = 1;
            lo.F0 = Matrix::Constant(1, 1, R);
            lo.support = {i};
            lo.F = {Matrix::Constant(1, 1, 1.0)};
            blocks.push_back(std::move(lo));
        }
    }

    SolveReport report;
    report.radius_used = options.feasibility_radius;

    auto finish = [&](SolveReport::Status st, const Eigen::VectorXd& x,
                      const std::string& detail, int iters, double gap) {
        report.status = st;
        report.x = x;
        report.objective = x.size() == N ? sdp.c.dot(x) : 0.0;
        report.iterations = iters;
        report.detail = detail;
        report.duality_gap = gap;
        report.max_residual = x.size() == N ? worst_block_violation(blocks, x)
                                            : kInf;
        report.wall_time_s =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
        return report;
    };

    // Phase 1: minimize t with F_b(x) + t I >= 0, always strictly feasible.
    std::vector<SdpBlock> aug = blocks;
    double t0 = 0.0;
    for (auto& blk : aug) {
        Eigen::SelfAdjointEigenSolver<Matrix> eig(blk.F0, Eigen::EigenvaluesOnly);
        t0 = std::max(t0, -eig.eigenvalues().minCoeff());
        blk.support.push_back(N);
        blk.F.push_back(Matrix::Identity(blk.dim, blk.dim));
    }
    {
        // Keeps phase 1 bounded when the constraint set scales freely.
        SdpBlock tb;
        tb.name = "phase1_bound";
        tb.dim = 1;
        tb.F0 = Matrix::Constant(1, 1, 1.0);
        tb.support = {N};
        tb.F = {Matrix::Constant(1, 1, 1.0)};
        aug.push_back(std::move(tb));
    }
    Eigen::VectorXd c1 = Eigen::VectorXd::Zero(N + 1);
    c1(N) = 1.0;
    Eigen::VectorXd x1 = Eigen::VectorXd::Zero(N + 1);
    x1(N) = t0 + 1.0;

    const bool pure_feasibility = sdp.c.cwiseAbs().maxCoeff() == 0.0;
    const double exit_depth = pure_feasibility ? -0.05 : -1e-3;
    IpmOutcome p1 = ipm_core(aug, c1, x1, options.tolerance, options.max_iters, N, exit_depth);

    if (p1.kind == IpmOutcome::Kind::NumericalTrouble)
        return finish(SolveReport::Status::NumericalFailure, Eigen::VectorXd(),
                      "phase 1: " + p1.note, p1.iterations, p1.gap);
    if (p1.kind == IpmOutcome::Kind::IterationLimit)
        return finish(SolveReport::Status::IterationLimit, Eigen::VectorXd(),
                      "phase 1 hit the iteration limit", p1.iterations, p1.gap);

    const double t_reached = p1.x(N);
    if (t_reached > -1e-9 &&
        (p1.kind == IpmOutcome::Kind::Stalled || p1.kind == IpmOutcome::Kind::Converged)) {
        // The dual iterate acts as a Farkas certificate; the block with the
        // most negative weight <F0_b, Z_b> is the one refusing the shift.
        std::string blocking = "unknown";
        double worst = 0.0;
        for (size_t b = 0; b + 1 < aug.size(); ++b) {
            double w = trace_product(blocks[b].F0, p1.Z[b]);
            if (w < worst) {
                worst = w;
                blocking = blocks[b].name;
            }
        }
        std::ostringstream os;
        if (p1.kind == IpmOutcome::Kind::Stalled)
            os << "infeasible: " << p1.note;
        else
            os << "infeasible: dual improving ray found";
        os << " (best shift t*=" << t_reached << ", blocking constraint: " << blocking << ")";
        return finish(SolveReport::Status::Infeasible, Eigen::VectorXd(), os.str(),
                      p1.iterations, p1.gap);
    }
    if (t_reached > -1e-12)
        return finish(SolveReport::Status::NumericalFailure, Eigen::VectorXd(),
                      "phase 1 ended without strict interior: " + p1.note,
                      p1.iterations, p1.gap);

    Eigen::VectorXd x_feas = p1.x.head(N);
    if (pure_feasibility) {
        SolveReport r = finish(SolveReport::Status::Optimal, x_feas,
                               "feasibility problem, interior point returned",
                               p1.iterations, p1.gap);
        return r;
    }

    // Phase 2 from the interior point.
    IpmOutcome p2 = ipm_core(blocks, sdp.c, x_feas, options.tolerance,
                             options.max_iters, -1, 0.0);
    const int iters = p1.iterations + p2.iterations;
    switch (p2.kind) {
        case IpmOutcome::Kind::Converged:
            return finish(SolveReport::Status::Optimal, p2.x, "", iters, p2.gap);
        case IpmOutcome::Kind::IterationLimit:
            return finish(SolveReport::Status::IterationLimit, p2.x,
                          "phase 2 hit the iteration limit", iters, p2.gap);
        case IpmOutcome::Kind::Stalled:
            return finish(SolveReport::Status::NumericalFailure, p2.x,
                          "phase 2: " + p2.note, iters, p2.gap);
        default:
            return finish(SolveReport::Status::NumericalFailure, p2.x,
                          "phase 2: " + p2.note, iters, p2.gap);
    }
}

} // namespace hinfobs
