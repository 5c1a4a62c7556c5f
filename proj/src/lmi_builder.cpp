#include "hinfobs/lmi_builder.hpp"

#include <nlohmann/json.hpp>

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace hinfobs {

namespace {

const Matrix& fetch(const Assignment& a, const std::string& name, int rows, int cols) {
    auto it = a.find(name);
    if (it == a.end())
        throw ShapeMismatch("assignment is missing variable " + name);
    const Matrix& v = it->second;
    if (v.rows() != rows || v.cols() != cols) {
        std::ostringstream os;
        os << "variable " << name << " has shape " << v.rows() << "x" << v.cols()
           << " but is registered as " << rows << "x" << cols;
        throw ShapeMismatch(os.str());
    }
    return v;
}

double fetch_scalar(const Assignment& a, const std::string& name) {
    return fetch(a, name, 1, 1)(0, 0);
}

const char* structure_name(VarStructure s) {
    switch (s) {
        case VarStructure::SymmetricPositiveDefinite: return "symmetric-positive-definite";
        case VarStructure::Rectangular: return "rectangular";
        case VarStructure::Scalar: return "scalar";
        case VarStructure::EntrywisePositive: return "entrywise-positive-matrix";
    }
    return "unknown";
}

struct BlockLayout {
    int n, k, q;
    int off[8];
    int total;

    explicit BlockLayout(const Dimensions& d) : n(d.n), k(d.k), q(d.q) {
        int sizes[8] = {n, n, n, k, n, n, n, q};
        int pos = 0;
        for (int i = 0; i < 8; ++i) {
            off[i] = pos;
            pos += sizes[i];
        }
        total = pos;
    }
};

void place(Matrix& big, const BlockLayout& lay, int bi, int bj, const Matrix& block) {
    big.block(lay.off[bi], lay.off[bj], block.rows(), block.cols()) = block;
    if (bi != bj)
        big.block(lay.off[bj], lay.off[bi], block.cols(), block.rows()) = block.transpose();
}

// Shared assembly of the synthesis LMI. `gamma_block` supplies the coupling
// block placed at the upper (0,1)/(4,5) positions (its transpose goes to the
// mirrors, so a matrix-type Gamma yields Gamma^T Gamma under the Schur
// complement).
struct TheoremAssembly {
    Matrix A, B, C, D, H, M2, S, R_const;
    double beta = 0.0;
    Dimensions d;
    std::optional<Matrix> fixed_gain;
    GammaMode gamma_mode;
    MuMode mu_mode;
    bool matrix_gamma = false;

    Matrix operator()(const Assignment& a) const {
        const BlockLayout lay(d);
        const int n = d.n, p = d.p, k = d.k, q = d.q;

        const Matrix& P1 = fetch(a, "P1", n, n);
        const Matrix& P2 = fetch(a, "P2", n, n);
        Matrix G = fixed_gain ? Matrix(P1 * *fixed_gain) : fetch(a, "G", n, p);

        Matrix gamma_upper;
        if (matrix_gamma) {
            gamma_upper = fetch(a, "Gamma", n, n).transpose();
        } else {
            double gamma = gamma_mode.is_variable ? fetch_scalar(a, "gamma")
                                                  : gamma_mode.fixed_value;
            gamma_upper = gamma * Matrix::Identity(n, n);
        }
        double zeta = mu_mode.is_variable ? fetch_scalar(a, "zeta")
                                          : mu_mode.fixed_mu * mu_mode.fixed_mu;

        Matrix big = Matrix::Zero(lay.total, lay.total);
        place(big, lay, 0, 0,
              Matrix(H.transpose() * H + A.transpose() * P1 + P1 * A +
                     2.0 * beta * P1 - C.transpose() * G.transpose() - G * C));
        place(big, lay, 0, 1, gamma_upper);
        place(big, lay, 0, 2, Matrix(P1 * S));
        place(big, lay, 0, 3, Matrix(G * M2));
        place(big, lay, 0, 7, Matrix(P1 * B - G * D));
        place(big, lay, 1, 1, Matrix(-Matrix::Identity(n, n)));
        place(big, lay, 2, 2, Matrix(-Matrix::Identity(n, n)));
        place(big, lay, 3, 3, Matrix(-Matrix::Identity(k, k)));
        place(big, lay, 4, 4, Matrix(A.transpose() * P2 + P2 * A + R_const));
        place(big, lay, 4, 5, gamma_upper);
        place(big, lay, 4, 6, Matrix(P2 * S));
        place(big, lay, 4, 7, Matrix(P2 * B));
        place(big, lay, 5, 5, Matrix(-Matrix::Identity(n, n)));
        place(big, lay, 6, 6, Matrix(-Matrix::Identity(n, n)));
        place(big, lay, 7, 7, Matrix(-zeta * Matrix::Identity(q, q)));
        return big;
    }
};

TheoremAssembly make_assembly(const UncertainSystem& sys, double beta,
                              GammaMode gamma_mode, MuMode mu_mode,
                              const std::optional<Matrix>& fixed_gain) {
    if (!(beta >= 0.0))
        throw Error("beta must be >= 0");
    const Dimensions d = sys.dims();
    TheoremAssembly t;
    t.A = sys.A;
    t.B = sys.B;
    t.C = sys.C;
    t.D = sys.D;
    t.H = sys.H;
    t.M2 = sys.M2;
    t.S = sym_sqrt(Matrix::Identity(d.n, d.n) + sys.M1 * sys.M1.transpose());
    t.R_const = 2.0 * sys.N1.transpose() * sys.N1 + sys.N2.transpose() * sys.N2;
    t.beta = beta;
    t.d = d;
    t.gamma_mode = gamma_mode;
    t.mu_mode = mu_mode;
    if (fixed_gain) {
        if (fixed_gain->rows() != d.n || fixed_gain->cols() != d.p)
            throw ShapeMismatch("fixed gain must be n x p");
        t.fixed_gain = fixed_gain;
    }
    return t;
}

LmiProblem base_problem(const TheoremAssembly& t, double margin,
                        const char* constraint_name) {
    const Dimensions d = t.d;
    LmiProblem prob;
    prob.margin = margin;
    prob.variables.push_back({"P1", d.n, d.n, VarStructure::SymmetricPositiveDefinite, 0.0});
    prob.variables.push_back({"P2", d.n, d.n, VarStructure::SymmetricPositiveDefinite, 0.0});
    if (!t.fixed_gain)
        prob.variables.push_back({"G", d.n, d.p, VarStructure::Rectangular, 0.0});
    if (t.matrix_gamma)
        prob.variables.push_back({"Gamma", d.n, d.n, VarStructure::EntrywisePositive, 0.0});
    else if (t.gamma_mode.is_variable)
        prob.variables.push_back({"gamma", 1, 1, VarStructure::Scalar, 0.0});
    if (t.mu_mode.is_variable)
        prob.variables.push_back({"zeta", 1, 1, VarStructure::Scalar, 0.0});

    MatrixConstraint mc;
    mc.name = constraint_name;
    mc.dim = BlockLayout(d).total;
    mc.sense = ConstraintSense::NegativeDefinite;
    mc.evaluate = t;
    prob.constraints.push_back(std::move(mc));

    if (!t.matrix_gamma && t.gamma_mode.is_variable)
        prob.scalar_constraints.push_back({"gamma_positive", {{"gamma", 0, 0, 1.0}}, margin});
    if (t.mu_mode.is_variable)
        prob.scalar_constraints.push_back({"zeta_positive", {{"zeta", 0, 0, 1.0}}, margin});
    return prob;
}

} // namespace

const MatrixVariable& LmiProblem::variable(const std::string& name) const {
    for (const auto& v : variables)
        if (v.name == name)
            return v;
    throw Error("no variable named " + name);
}

MatrixVariable& LmiProblem::variable(const std::string& name) {
    for (auto& v : variables)
        if (v.name == name)
            return v;
    throw Error("no variable named " + name);
}

Assignment LmiProblem::zero_assignment() const {
    Assignment a;
    for (const auto& v : variables)
        a[v.name] = Matrix::Zero(v.rows, v.cols);
    return a;
}

nlohmann::json LmiProblem::debug_dump() const {
    nlohmann::json j;
    j["margin"] = margin;
    j["variables"] = nlohmann::json::array();
    for (const auto& v : variables)
        j["variables"].push_back({{"name", v.name},
                                  {"rows", v.rows},
                                  {"cols", v.cols},
                                  {"structure", structure_name(v.structure)},
                                  {"lower_bound", v.lower_bound}});
    j["constraints"] = nlohmann::json::array();
    for (const auto& c : constraints)
        j["constraints"].push_back(
            {{"name", c.name},
             {"dim", c.dim},
             {"sense", c.sense == ConstraintSense::NegativeDefinite
                           ? "negative-definite"
                           : "positive-definite"}});
    j["scalar_constraints"] = nlohmann::json::array();
    for (const auto& s : scalar_constraints) {
        nlohmann::json terms = nlohmann::json::array();
        for (const auto& t : s.terms)
            terms.push_back({{"var", t.var}, {"row", t.row}, {"col", t.col}, {"coeff", t.coeff}});
        j["scalar_constraints"].push_back({{"name", s.name}, {"terms", terms}, {"rhs", s.rhs}});
    }
    nlohmann::json obj = nlohmann::json::array();
    for (const auto& t : objective.terms)
        obj.push_back({{"var", t.var}, {"row", t.row}, {"col", t.col}, {"coeff", t.coeff}});
    j["objective"] = obj;
    return j;
}

bool LmiResidual::feasible(double tol) const {
    for (const auto& e : entries)
        if (!(e.normalized_max_eig < -margin + tol))
            return false;
    return true;
}

double LmiResidual::worst() const {
    double w = -std::numeric_limits<double>::infinity();
    for (const auto& e : entries)
        w = std::max(w, e.normalized_max_eig);
    return w;
}

Matrix sym_sqrt(const Matrix& M) {
    if (M.rows() != M.cols())
        throw NotPositiveDefinite("sym_sqrt input must be square");
    const double scale = std::max(1.0, M.cwiseAbs().maxCoeff());
    if ((M - M.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw NotPositiveDefinite("sym_sqrt input is not symmetric");
    Eigen::SelfAdjointEigenSolver<Matrix> eig(M);
    if (eig.info() != Eigen::Success)
        throw NotPositiveDefinite("sym_sqrt eigendecomposition failed");
    if (eig.eigenvalues().minCoeff() <= 0.0)
        throw NotPositiveDefinite("sym_sqrt input has smallest eigenvalue " +
                                  std::to_string(eig.eigenvalues().minCoeff()));
    Matrix S = eig.eigenvectors() *
               eig.eigenvalues().cwiseSqrt().asDiagonal() *
               eig.eigenvectors().transpose();
    return Matrix((S + S.transpose()) / 2.0);
}

LmiProblem build_theorem1(const UncertainSystem& sys, double beta,
                          GammaMode gamma_mode, MuMode mu_mode, double margin,
                          const std::optional<Matrix>& fixed_gain) {
    if (!gamma_mode.is_variable && !(gamma_mode.fixed_value > 0.0))
        throw Error("fixed gamma must be > 0");
    if (!mu_mode.is_variable && !(mu_mode.fixed_mu > 0.0))
        throw Error("fixed mu must be > 0");
    TheoremAssembly t = make_assembly(sys, beta, gamma_mode, mu_mode, fixed_gain);
    LmiProblem prob = base_problem(t, margin, "theorem1_block");
    if (gamma_mode.is_variable) {
        // Default objective: maximize the admissible Lipschitz constant.
        prob.objective.terms.push_back({"gamma", 0, 0, -1.0});
    }
    return prob;
}

LmiProblem build_corollary1(const UncertainSystem& sys, double beta,
                            const Matrix& weights, MuMode mu_mode, double margin) {
    const Dimensions d = sys.dims();
    if (weights.rows() != d.n || weights.cols() != d.n)
        throw ShapeMismatch("weights must be n x n");
    if ((weights.array() <= 0.0).any())
        throw NonpositiveWeight("all weights c_ij must be > 0");

    TheoremAssembly t = make_assembly(sys, beta, GammaMode::variable(), mu_mode, std::nullopt);
    t.matrix_gamma = true;
    LmiProblem prob = base_problem(t, margin, "corollary1_block");
    prob.variables.push_back({"omega", 1, 1, VarStructure::Scalar, 0.0});
    for (int i = 0; i < d.n; ++i)
        for (int j = 0; j < d.n; ++j) {
            std::string suffix = "_" + std::to_string(i + 1) + "_" + std::to_string(j + 1);
            prob.scalar_constraints.push_back(
                {"Gamma_positive" + suffix, {{"Gamma", i, j, 1.0}}, margin});
            prob.scalar_constraints.push_back(
                {"weighted_entry" + suffix,
                 {{"Gamma", i, j, weights(i, j)}, {"omega", 0, 0, -1.0}},
                 margin});
        }
    prob.objective.terms.push_back({"omega", 0, 0, -1.0});
    return prob;
}

LmiProblem build_theorem2(const UncertainSystem& sys, double beta,
                          double lambda, double margin) {
    if (!(lambda >= 0.0 && lambda <= 1.0))
        throw LambdaOutOfRange("lambda must lie in [0, 1], got " + std::to_string(lambda));
    LmiProblem prob = build_theorem1(sys, beta, GammaMode::variable(),
                                     MuMode::variable(), margin);
    prob.objective.terms.clear();
    prob.objective.terms.push_back({"gamma", 0, 0, -lambda});
    prob.objective.terms.push_back({"zeta", 0, 0, 1.0 - lambda});
    return prob;
}

LmiResidual evaluate_residual(const LmiProblem& problem, const Assignment& assignment) {
    LmiResidual res;
    res.margin = problem.margin;

    for (const auto& c : problem.constraints) {
        Matrix M = c.evaluate(assignment);
        Matrix sym = (M + M.transpose()) / 2.0;
        Eigen::SelfAdjointEigenSolver<Matrix> eig(sym, Eigen::EigenvaluesOnly);
        double v = c.sense == ConstraintSense::NegativeDefinite
                       ? eig.eigenvalues().maxCoeff()
                       : -eig.eigenvalues().minCoeff();
        res.entries.push_back({c.name, v});
    }

    for (const auto& v : problem.variables) {
        if (v.structure != VarStructure::SymmetricPositiveDefinite)
            continue;
        const Matrix& val = fetch(assignment, v.name, v.rows, v.cols);
        Matrix shifted = (val + val.transpose()) / 2.0 -
                         v.lower_bound * Matrix::Identity(v.rows, v.cols);
        Eigen::SelfAdjointEigenSolver<Matrix> eig(shifted, Eigen::EigenvaluesOnly);
        res.entries.push_back({v.name + "_spd", -eig.eigenvalues().minCoeff()});
    }

    for (const auto& s : problem.scalar_constraints) {
        double lhs = 0.0;
        for (const auto& t : s.terms) {
            const MatrixVariable& v = problem.variable(t.var);
            lhs += t.coeff * fetch(assignment, t.var, v.rows, v.cols)(t.row, t.col);
        }
        res.entries.push_back({s.name, -(lhs - s.rhs) - problem.margin});
    }
    return res;
}

} // namespace hinfobs
