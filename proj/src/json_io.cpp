#include "hinfobs/json_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <random>
#include <set>

#include <nlohmann/json.hpp>

namespace hinfobs {

using nlohmann::json;

namespace {

void expect_keys(const json& j, const std::string& where,
                 std::initializer_list<const char*> allowed) {
    if (!j.is_object())
        throw SchemaError(where + " must be a JSON object");
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& item : j.items())
        if (!ok.count(item.key()))
            throw SchemaError("unknown field \"" + item.key() + "\" in " + where);
}

const json& require(const json& j, const char* key, const std::string& where) {
    auto it = j.find(key);
    if (it == j.end())
        throw SchemaError(where + " is missing required field \"" + key + "\"");
    return *it;
}

double number(const json& j, const std::string& what) {
    if (!j.is_number())
        throw SchemaError(what + " must be a number");
    return j.get<double>();
}

int integer(const json& j, const std::string& what) {
    if (!j.is_number_integer())
        throw SchemaError(what + " must be an integer");
    return j.get<int>();
}

std::string text(const json& j, const std::string& what) {
    if (!j.is_string())
        throw SchemaError(what + " must be a string");
    return j.get<std::string>();
}

SignalSpec parse_signal(const json& j, const std::string& where) {
    expect_keys(j, where,
                {"kind", "amplitude", "omega", "t_on", "t_off", "hold", "seed"});
    SignalSpec s;
    s.kind = text(require(j, "kind", where), where + ".kind");
    if (s.kind != "zero" && s.kind != "sin" && s.kind != "pulse" && s.kind != "noise")
        throw SchemaError(where + ".kind must be zero, sin, pulse, or noise");
    if (j.contains("amplitude"))
        s.amplitude = number(j["amplitude"], where + ".amplitude");
    if (j.contains("omega"))
        s.omega = number(j["omega"], where + ".omega");
    if (j.contains("t_on"))
        s.t_on = number(j["t_on"], where + ".t_on");
    if (j.contains("t_off"))
        s.t_off = number(j["t_off"], where + ".t_off");
    if (j.contains("hold")) {
        s.hold = number(j["hold"], where + ".hold");
        if (!(s.hold > 0.0))
            throw SchemaError(where + ".hold must be positive");
    }
    if (j.contains("seed"))
        s.seed = j["seed"].get<std::uint64_t>();
    return s;
}

UncertaintySpec parse_uncertainty(const json& j, const std::string& where) {
    expect_keys(j, where, {"kind", "omega", "F0"});
    UncertaintySpec s;
    s.kind = text(require(j, "kind", where), where + ".kind");
    if (s.kind != "zero" && s.kind != "sin")
        throw SchemaError(where + ".kind must be zero or sin");
    if (j.contains("omega"))
        s.omega = number(j["omega"], where + ".omega");
    if (s.kind == "sin")
        s.F0 = matrix_from_json(require(j, "F0", where), where + ".F0");
    else if (j.contains("F0"))
        throw SchemaError(where + ".F0 is only valid for kind sin");
    return s;
}

PhiSpec parse_phi(const json& j, const std::string& where) {
    expect_keys(j, where, {"kind", "gain", "input", "output", "K"});
    PhiSpec s;
    s.kind = text(require(j, "kind", where), where + ".kind");
    if (s.kind == "zero") {
        if (j.size() != 1)
            throw SchemaError(where + " of kind zero takes no parameters");
    } else if (s.kind == "sin_channel") {
        s.gain = number(require(j, "gain", where), where + ".gain");
        s.input = integer(require(j, "input", where), where + ".input");
        s.output = integer(require(j, "output", where), where + ".output");
    } else if (s.kind == "linear") {
        s.K = matrix_from_json(require(j, "K", where), where + ".K");
    } else {
        throw SchemaError(where + ".kind must be zero, sin_channel, or linear");
    }
    return s;
}

SolveOptions parse_solver(const json& j, const std::string& where) {
    expect_keys(j, where, {"max_iters", "tolerance", "feasibility_radius"});
    SolveOptions s;
    if (j.contains("max_iters")) {
        s.max_iters = integer(j["max_iters"], where + ".max_iters");
        if (s.max_iters < 1)
            throw SchemaError(where + ".max_iters must be at least 1");
    }
    if (j.contains("tolerance")) {
        s.tolerance = number(j["tolerance"], where + ".tolerance");
        if (!(s.tolerance > 0.0))
            throw SchemaError(where + ".tolerance must be positive");
    }
    if (j.contains("feasibility_radius")) {
        double r = number(j["feasibility_radius"], where + ".feasibility_radius");
        if (!(r > 0.0))
            throw SchemaError(where + ".feasibility_radius must be positive");
        s.feasibility_radius = r;
    }
    return s;
}

} // namespace

json matrix_to_json(const Matrix& M) {
    json data = json::array();
    for (int r = 0; r < M.rows(); ++r)
        for (int c = 0; c < M.cols(); ++c)
            data.push_back(M(r, c));
    return json{{"rows", M.rows()}, {"cols", M.cols()}, {"data", std::move(data)}};
}

Matrix matrix_from_json(const json& j, const std::string& what) {
    expect_keys(j, what, {"rows", "cols", "data"});
    int rows = integer(require(j, "rows", what), what + ".rows");
    int cols = integer(require(j, "cols", what), what + ".cols");
    const json& data = require(j, "data", what);
    if (rows < 1 || cols < 1)
        throw SchemaError(what + " dimensions must be positive");
    if (!data.is_array() || data.size() != static_cast<size_t>(rows) * cols)
        throw SchemaError(what + ".data must hold exactly rows*cols numbers");
    Matrix M(rows, cols);
    size_t idx = 0;
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c)
            M(r, c) = number(data[idx++], what + ".data");
    return M;
}

json vector_to_json(const Vector& v) {
    json a = json::array();
    for (int i = 0; i < v.size(); ++i)
        a.push_back(v(i));
    return a;
}

Vector vector_from_json(const json& j, const std::string& what) {
    if (!j.is_array())
        throw SchemaError(what + " must be an array of numbers");
    Vector v(j.size());
    for (size_t i = 0; i < j.size(); ++i)
        v(static_cast<int>(i)) = number(j[i], what);
    return v;
}

Nonlinearity make_nonlinearity(const PhiSpec& spec, int n) {
    if (spec.kind == "zero")
        return [n](const Vector&, const Vector&) { return Vector(Vector::Zero(n)); };
    if (spec.kind == "sin_channel") {
        if (spec.input < 1 || spec.input > n || spec.output < 1 || spec.output > n)
            throw SchemaError("sin_channel indices must lie in 1.." + std::to_string(n));
        const int in = spec.input - 1;
        const int out = spec.output - 1;
        const double gain = spec.gain;
        return [n, in, out, gain](const Vector& x, const Vector&) {
            Vector v = Vector::Zero(n);
            v(out) = gain * std::sin(x(in));
            return v;
        };
    }
    if (spec.kind == "linear") {
        if (spec.K.rows() != n || spec.K.cols() != n)
            throw SchemaError("linear nonlinearity matrix K must be " +
                              std::to_string(n) + "x" + std::to_string(n));
        Matrix K = spec.K;
        return [K](const Vector& x, const Vector&) { return Vector(K * x); };
    }
    throw SchemaError("unknown nonlinearity kind " + spec.kind);
}

Signal make_signal(const SignalSpec& spec, int q) {
    if (spec.kind == "zero")
        return nullptr;
    if (spec.kind == "sin") {
        double a = spec.amplitude, om = spec.omega;
        return [a, om, q](double t) {
            return Vector(Vector::Constant(q, a * std::sin(om * t)));
        };
    }
    if (spec.kind == "pulse") {
        double a = spec.amplitude, on = spec.t_on, off = spec.t_off;
        return [a, on, off, q](double t) {
            return Vector(Vector::Constant(q, t >= on && t < off ? a : 0.0));
        };
    }
    if (spec.kind == "noise") {
        double a = spec.amplitude, hold = spec.hold;
        std::uint64_t seed = spec.seed;
        // Stateless sample-and-hold so the signal is a pure function of t.
        return [a, hold, seed, q](double t) {
            auto cell = static_cast<std::uint64_t>(std::floor(t / hold));
            Vector v(q);
            for (int i = 0; i < q; ++i) {
                std::mt19937_64 rng(seed ^ (cell * 0x9E3779B97F4A7C15ull) ^
                                    (static_cast<std::uint64_t>(i) << 32));
                std::uniform_real_distribution<double> unit(-1.0, 1.0);
                v(i) = a * unit(rng);
            }
            return v;
        };
    }
    throw SchemaError("unknown signal kind " + spec.kind);
}

MatrixSignal make_uncertainty(const UncertaintySpec& spec) {
    if (spec.kind == "zero")
        return nullptr;
    if (spec.kind == "sin") {
        Matrix F0 = spec.F0;
        double om = spec.omega;
        double scale = F0.jacobiSvd().singularValues()(0);
        if (scale > 1.0 + 1e-12)
            throw SchemaError("F0 must satisfy sigma_max(F0) <= 1, got " +
                              std::to_string(scale));
        return [F0, om](double t) { return Matrix(std::sin(om * t) * F0); };
    }
    throw SchemaError("unknown uncertainty kind " + spec.kind);
}

Scenario make_scenario(const ProblemFile& problem, const Matrix& L) {
    if (!problem.scenario)
        throw SchemaError("problem file has no scenario section");
    const ScenarioSpec& spec = *problem.scenario;
    const Dimensions d = problem.sys.dims();

    Scenario sc;
    sc.sys = problem.sys;
    sc.L = L;
    sc.x0 = spec.x0;
    sc.xhat0 = spec.xhat0;
    sc.w = make_signal(spec.w, d.q);
    sc.F = make_uncertainty(spec.F);
    if (spec.delta_phi && spec.delta_phi->kind != "zero")
        sc.delta_phi = make_nonlinearity(*spec.delta_phi, d.n);
    sc.t_final = spec.t_final;
    sc.dt = spec.dt;
    return sc;
}

ProblemFile parse_problem(const json& j) {
    expect_keys(j, "problem file", {"system", "options", "scenario"});
    const json& sys = require(j, "system", "problem file");
    expect_keys(sys, "system",
                {"A", "B", "C", "D", "M1", "N1", "M2", "N2", "H", "phi",
                 "gamma_actual", "Gamma_actual", "region", "u_nominal"});

    ProblemFile pf;
    pf.sys.A = matrix_from_json(require(sys, "A", "system"), "system.A");
    pf.sys.B = matrix_from_json(require(sys, "B", "system"), "system.B");
    pf.sys.C = matrix_from_json(require(sys, "C", "system"), "system.C");
    pf.sys.D = matrix_from_json(require(sys, "D", "system"), "system.D");
    pf.sys.M1 = matrix_from_json(require(sys, "M1", "system"), "system.M1");
    pf.sys.N1 = matrix_from_json(require(sys, "N1", "system"), "system.N1");
    pf.sys.M2 = matrix_from_json(require(sys, "M2", "system"), "system.M2");
    pf.sys.N2 = matrix_from_json(require(sys, "N2", "system"), "system.N2");
    pf.sys.H = matrix_from_json(require(sys, "H", "system"), "system.H");

    const int n = static_cast<int>(pf.sys.A.rows());
    PhiSpec phi = parse_phi(require(sys, "phi", "system"), "system.phi");
    pf.sys.phi = make_nonlinearity(phi, n);
    pf.sys.gamma_actual =
        number(require(sys, "gamma_actual", "system"), "system.gamma_actual");
    if (sys.contains("Gamma_actual"))
        pf.sys.Gamma_actual =
            matrix_from_json(sys["Gamma_actual"], "system.Gamma_actual");
    if (sys.contains("region")) {
        expect_keys(sys["region"], "system.region", {"lo", "hi"});
        Box box;
        box.lo = vector_from_json(require(sys["region"], "lo", "system.region"),
                                  "system.region.lo");
        box.hi = vector_from_json(require(sys["region"], "hi", "system.region"),
                                  "system.region.hi");
        pf.sys.region = box;
    }
    if (sys.contains("u_nominal"))
        pf.sys.u_nominal = vector_from_json(sys["u_nominal"], "system.u_nominal");

    validate_system(pf.sys);

    const json& opt = require(j, "options", "problem file");
    expect_keys(opt, "options", {"beta", "lambda", "theta", "margin", "solver"});
    pf.options.beta = number(require(opt, "beta", "options"), "options.beta");
    if (opt.contains("lambda"))
        pf.options.lambda = number(opt["lambda"], "options.lambda");
    if (opt.contains("theta"))
        pf.options.theta = number(opt["theta"], "options.theta");
    if (opt.contains("margin"))
        pf.options.margin = number(opt["margin"], "options.margin");
    if (opt.contains("solver"))
        pf.options.solver = parse_solver(opt["solver"], "options.solver");

    if (j.contains("scenario")) {
        const json& sc = j["scenario"];
        expect_keys(sc, "scenario",
                    {"x0", "xhat0", "w", "F", "delta_phi", "t_final", "dt"});
        ScenarioSpec spec;
        spec.x0 = vector_from_json(require(sc, "x0", "scenario"), "scenario.x0");
        spec.xhat0 =
            vector_from_json(require(sc, "xhat0", "scenario"), "scenario.xhat0");
        if (spec.x0.size() != n || spec.xhat0.size() != n)
            throw SchemaError("scenario initial states must have dimension " +
                              std::to_string(n));
        if (sc.contains("w"))
            spec.w = parse_signal(sc["w"], "scenario.w");
        if (sc.contains("F"))
            spec.F = parse_uncertainty(sc["F"], "scenario.F");
        if (sc.contains("delta_phi"))
            spec.delta_phi = parse_phi(sc["delta_phi"], "scenario.delta_phi");
        if (sc.contains("t_final"))
            spec.t_final = number(sc["t_final"], "scenario.t_final");
        if (sc.contains("dt"))
            spec.dt = number(sc["dt"], "scenario.dt");
        if (!(spec.dt > 0.0) || spec.t_final < spec.dt)
            throw SchemaError("scenario needs dt > 0 and t_final >= dt");
        if (spec.F.kind == "sin") {
            const Dimensions d = pf.sys.dims();
            if (spec.F.F0.rows() != d.k || spec.F.F0.cols() != d.k)
                throw SchemaError("scenario.F.F0 must be " + std::to_string(d.k) +
                                  "x" + std::to_string(d.k));
        }
        pf.scenario = std::move(spec);
    }
    return pf;
}

ProblemFile load_problem_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw Error("cannot open problem file " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw SchemaError("malformed JSON in " + path + ": " + e.what());
    }
    return parse_problem(j);
}

json report_to_json(const SolveReport& report) {
    json j{{"status", to_string(report.status)},
           {"objective", report.objective},
           {"iterations", report.iterations},
           {"wall_time_s", report.wall_time_s},
           {"duality_gap", report.duality_gap},
           {"max_residual", report.max_residual},
           {"detail", report.detail}};
    if (report.radius_used)
        j["radius_used"] = *report.radius_used;
    return j;
}

json residual_to_json(const LmiResidual& residual) {
    json entries = json::array();
    for (const auto& e : residual.entries)
        entries.push_back({{"name", e.name}, {"value", e.normalized_max_eig}});
    return json{{"feasible", residual.feasible()},
                {"worst", residual.worst()},
                {"margin", residual.margin},
                {"entries", std::move(entries)}};
}

namespace {

json result_common(const SynthesisOptions& options, const std::string& mode,
                   const SolveReport& report) {
    json j{{"mode", mode},
           {"status", to_string(report.status)},
           {"beta", options.beta},
           {"lambda", options.lambda},
           {"report", report_to_json(report)}};
    if (options.theta)
        j["theta"] = *options.theta;
    return j;
}

} // namespace

json result_to_json(const SynthesisResult& r, const SynthesisOptions& options,
                    const std::string& mode) {
    json j = result_common(options, mode, r.report);
    if (r.feasible()) {
        j["gamma_star"] = r.gamma_star;
        j["zeta_star"] = r.zeta_star;
        j["mu_star"] = r.mu_star;
        j["sigma_max_L"] = r.sigma_max_L;
        j["P1"] = matrix_to_json(r.P1);
        j["P2"] = matrix_to_json(r.P2);
        j["G"] = matrix_to_json(r.G);
        j["L"] = matrix_to_json(r.L);
        j["residual"] = residual_to_json(r.residual);
    }
    return j;
}

json result_to_json(const ElementwiseResult& r, const SynthesisOptions& options,
                    const std::string& mode) {
    json j = result_common(options, mode, r.report);
    if (r.feasible()) {
        j["omega_star"] = r.omega_star;
        j["Gamma_star"] = matrix_to_json(r.Gamma_star);
        j["sigma_max_Gamma"] = r.sigma_max_Gamma;
        j["zeta_star"] = r.zeta_star;
        j["mu_star"] = r.mu_star;
        j["sigma_max_L"] = r.sigma_max_L;
        j["P1"] = matrix_to_json(r.P1);
        j["P2"] = matrix_to_json(r.P2);
        j["G"] = matrix_to_json(r.G);
        j["L"] = matrix_to_json(r.L);
        j["residual"] = residual_to_json(r.residual);
    }
    return j;
}

StoredResult result_from_json(const json& j) {
    if (!j.is_object())
        throw SchemaError("result must be a JSON object");
    StoredResult r;
    r.mode = text(require(j, "mode", "result"), "result.mode");
    r.status = text(require(j, "status", "result"), "result.status");
    r.beta = number(require(j, "beta", "result"), "result.beta");
    r.lambda = number(require(j, "lambda", "result"), "result.lambda");
    if (r.status != "optimal")
        throw Error("stored result has status " + r.status +
                    ", no gain available");
    r.P1 = matrix_from_json(require(j, "P1", "result"), "result.P1");
    r.P2 = matrix_from_json(require(j, "P2", "result"), "result.P2");
    r.G = matrix_from_json(require(j, "G", "result"), "result.G");
    r.L = matrix_from_json(require(j, "L", "result"), "result.L");
    if (j.contains("gamma_star"))
        r.gamma_star = number(j["gamma_star"], "result.gamma_star");
    else if (j.contains("omega_star"))
        r.gamma_star = number(j["omega_star"], "result.omega_star");
    r.zeta_star = number(require(j, "zeta_star", "result"), "result.zeta_star");
    r.mu_star = number(require(j, "mu_star", "result"), "result.mu_star");
    r.sigma_max_L =
        number(require(j, "sigma_max_L", "result"), "result.sigma_max_L");
    if (j.contains("Gamma_star"))
        r.Gamma_star = matrix_from_json(j["Gamma_star"], "result.Gamma_star");
    if (j.contains("omega_star"))
        r.omega_star = number(j["omega_star"], "result.omega_star");
    if (j.contains("sigma_max_Gamma"))
        r.sigma_max_Gamma = number(j["sigma_max_Gamma"], "result.sigma_max_Gamma");
    return r;
}

StoredResult load_result(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw Error("cannot open result file " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw SchemaError("malformed JSON in " + path + ": " + e.what());
    }
    return result_from_json(j);
}

std::string csv_number(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_curve_csv(const ParetoCurve& curve, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw Error("cannot write " + path);
    out << "beta,lambda,gamma_star,mu_star,sigma_max_L,status\n";
    for (const auto& p : curve.points) {
        out << csv_number(curve.beta) << ',' << csv_number(p.lambda) << ',';
        if (p.feasible)
            out << csv_number(p.gamma_star) << ',' << csv_number(p.mu_star) << ','
                << csv_number(p.sigma_max_L) << ",optimal\n";
        else
            out << "nan,nan,nan,infeasible\n";
    }
}

void write_surface_csv(const SurfaceGrid& grid, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw Error("cannot write " + path);
    out << "beta,lambda,gamma_star,mu_star,sigma_max_L,status\n";
    for (const auto& c : grid.cells) {
        out << csv_number(c.beta) << ',' << csv_number(c.lambda) << ',';
        if (c.feasible)
            out << csv_number(c.gamma_star) << ',' << csv_number(c.mu_star) << ','
                << csv_number(c.sigma_max_L) << ",optimal\n";
        else
            out << "nan,nan,nan,infeasible\n";
    }
}

void write_trace_csv(const SimulationTrace& trace, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw Error("cannot write " + path);
    if (trace.size() == 0)
        throw PreconditionViolated("empty trace");
    const int n = static_cast<int>(trace.x.front().size());
    const int m = static_cast<int>(trace.z.front().size());
    const int q = static_cast<int>(trace.w.front().size());
    out << "t";
    for (int i = 1; i <= n; ++i)
        out << ",x_" << i;
    for (int i = 1; i <= n; ++i)
        out << ",xhat_" << i;
    for (int i = 1; i <= m; ++i)
        out << ",z_" << i;
    for (int i = 1; i <= q; ++i)
        out << ",w_" << i;
    out << '\n';
    for (size_t row = 0; row < trace.size(); ++row) {
        out << csv_number(trace.t[row]);
        for (int i = 0; i < n; ++i)
            out << ',' << csv_number(trace.x[row](i));
        for (int i = 0; i < n; ++i)
            out << ',' << csv_number(trace.xhat[row](i));
        for (int i = 0; i < m; ++i)
            out << ',' << csv_number(trace.z[row](i));
        for (int i = 0; i < q; ++i)
            out << ',' << csv_number(trace.w[row](i));
        out << '\n';
    }
}

void write_interval_csv(const ElementwiseMargin& margin, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw Error("cannot write " + path);
    out << "i,j,gamma_actual,gamma_star,lo,hi\n";
    for (int i = 0; i < margin.lo.rows(); ++i)
        for (int j = 0; j < margin.lo.cols(); ++j)
            out << i + 1 << ',' << j + 1 << ','
                << csv_number(margin.Gamma_actual(i, j)) << ','
                << csv_number(margin.Gamma_star(i, j)) << ','
                << csv_number(margin.lo(i, j)) << ',' << csv_number(margin.hi(i, j))
                << '\n';
}

} // namespace hinfobs
