// hinfobs command-line front end.
//
// Subcommands:
//   synth     synthesize an observer (maxgamma | feasibility | pareto | elementwise)
//   sweep     trade-off curve or (beta, lambda) surface as CSV
//   simulate  integrate a stored scenario with a synthesized gain
//   margins   robustness margins of a stored result against a problem file
//
// stdout carries exactly one JSON document per invocation; all diagnostics
// go to stderr. Exit codes: 0 success, 2 infeasible, 1 any error.

#include <cmath>
#include <cstdio>
#include <exception>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "hinfobs/errors.hpp"
#include "hinfobs/json_io.hpp"
#include "hinfobs/robustness.hpp"
#include "hinfobs/simulation.hpp"
#include "hinfobs/synthesis.hpp"
#include "hinfobs/system_model.hpp"

namespace {

using json = nlohmann::json;
using namespace hinfobs;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitInfeasible = 2;

// Grid syntax: "start:step:stop" or a comma-separated list of values.
std::vector<double> parse_grid(const std::string& text, const std::string& flag) {
    std::vector<double> grid;
    if (text.find(':') != std::string::npos) {
        double start = 0, step = 0, stop = 0;
        char extra = 0;
        if (std::sscanf(text.c_str(), "%lf:%lf:%lf%c", &start, &step, &stop,
                        &extra) != 3 ||
            step <= 0)
            throw Error(flag + ": expected start:step:stop with step > 0, got '" +
                        text + "'");
        int count = static_cast<int>(std::floor((stop - start) / step + 1e-9)) + 1;
        if (count < 1 || stop < start)
            throw Error(flag + ": empty grid '" + text + "'");
        grid.reserve(static_cast<size_t>(count));
        for (int i = 0; i < count; ++i)
            grid.push_back(start + step * i);
        return grid;
    }
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            size_t pos = 0;
            double v = std::stod(item, &pos);
            if (pos != item.size())
                throw std::invalid_argument(item);
            grid.push_back(v);
        } catch (const std::exception&) {
            throw Error(flag + ": bad number '" + item + "'");
        }
    }
    if (grid.empty())
        throw Error(flag + ": empty grid");
    return grid;
}

Matrix parse_weights(const std::string& text, int n) {
    std::vector<double> vals = parse_grid(text, "--weights");
    if (static_cast<int>(vals.size()) != n * n)
        throw Error("--weights: expected " + std::to_string(n * n) +
                    " row-major entries, got " + std::to_string(vals.size()));
    Matrix W(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            W(i, j) = vals[static_cast<size_t>(i * n + j)];
    return W;
}

void emit(const json& j, const std::string& out_path) {
    std::cout << j.dump(2) << "\n";
    if (!out_path.empty()) {
        FILE* f = std::fopen(out_path.c_str(), "w");
        if (!f)
            throw Error("cannot open output file '" + out_path + "'");
        std::string text = j.dump(2);
        std::fwrite(text.data(), 1, text.size(), f);
        std::fputc('\n', f);
        std::fclose(f);
    }
}

int status_to_exit(SolveReport::Status status) {
    switch (status) {
    case SolveReport::Status::Optimal:
        return kExitOk;
    case SolveReport::Status::Infeasible:
        return kExitInfeasible;
    default:
        return kExitError;
    }
}

struct SynthArgs {
    std::string file;
    std::string mode = "pareto";
    std::string out;
    std::string gain_from;
    std::string weights;
    std::optional<double> lambda, beta, theta, gamma, mu;
};

int run_synth(const SynthArgs& a) {
    ProblemFile problem = load_problem_file(a.file);
    SynthesisOptions options = problem.options;
    if (a.lambda)
        options.lambda = *a.lambda;
    if (a.beta)
        options.beta = *a.beta;
    if (a.theta)
        options.theta = *a.theta;
    const int n = problem.sys.dims().n;

    if (a.mode == "pareto") {
        SynthesisResult r = pareto_point(problem.sys, options);
        emit(result_to_json(r, options, a.mode), a.out);
        return status_to_exit(r.report.status);
    }
    if (a.mode == "maxgamma") {
        if (!a.mu)
            throw Error("--mode maxgamma requires --mu");
        SynthesisResult r = max_lipschitz(problem.sys, options, *a.mu);
        emit(result_to_json(r, options, a.mode), a.out);
        return status_to_exit(r.report.status);
    }
    if (a.mode == "feasibility") {
        if (!a.gamma || !a.mu)
            throw Error("--mode feasibility requires --gamma and --mu");
        std::optional<Matrix> fixed_gain;
        if (!a.gain_from.empty())
            fixed_gain = load_result(a.gain_from).L;
        SynthesisResult r =
            check_feasibility(problem.sys, options, *a.gamma, *a.mu, fixed_gain);
        emit(result_to_json(r, options, a.mode), a.out);
        return status_to_exit(r.report.status);
    }
    if (a.mode == "elementwise") {
        if (!a.mu)
            throw Error("--mode elementwise requires --mu");
        Matrix W = a.weights.empty() ? Matrix(Matrix::Ones(n, n))
                                     : parse_weights(a.weights, n);
        ElementwiseResult r = elementwise_max(problem.sys, options, W, *a.mu);
        emit(result_to_json(r, options, a.mode), a.out);
        return status_to_exit(r.report.status);
    }
    throw Error("unknown --mode '" + a.mode +
                "' (expected maxgamma|feasibility|pareto|elementwise)");
}

struct SweepArgs {
    std::string file;
    std::string lambda_grid;
    std::string beta_grid;
    std::string out;
    std::optional<double> beta;
};

int run_sweep(const SweepArgs& a) {
    ProblemFile problem = load_problem_file(a.file);
    SynthesisOptions options = problem.options;
    if (a.beta)
        options.beta = *a.beta;
    std::vector<double> lambdas = a.lambda_grid.empty()
                                      ? default_lambda_grid()
                                      : parse_grid(a.lambda_grid, "--lambda-grid");

    json summary;
    summary["out"] = a.out;
    if (a.beta_grid.empty()) {
        ParetoCurve curve = pareto_sweep(problem.sys, options, lambdas);
        write_curve_csv(curve, a.out);
        int feasible = 0;
        for (const ParetoPoint& pt : curve.points)
            feasible += pt.feasible ? 1 : 0;
        summary["kind"] = "curve";
        summary["beta"] = curve.beta;
        summary["rows"] = curve.points.size();
        summary["feasible_rows"] = feasible;
    } else {
        std::vector<double> betas = parse_grid(a.beta_grid, "--beta-grid");
        SurfaceGrid grid = surface_sweep(problem.sys, options, betas, lambdas);
        write_surface_csv(grid, a.out);
        int feasible = 0;
        for (const SurfaceCell& cell : grid.cells)
            feasible += cell.feasible ? 1 : 0;
        summary["kind"] = "surface";
        summary["rows"] = grid.cells.size();
        summary["feasible_rows"] = feasible;
    }
    std::cout << summary.dump(2) << "\n";
    return kExitOk;
}

struct SimulateArgs {
    std::string file;
    std::string gain_from;
    std::string out;
};

int run_simulate(const SimulateArgs& a) {
    ProblemFile problem = load_problem_file(a.file);
    if (!problem.scenario)
        throw Error("problem file has no \"scenario\" section");
    StoredResult stored = load_result(a.gain_from);
    if (stored.L.rows() != problem.sys.dims().n ||
        stored.L.cols() != problem.sys.dims().p)
        throw DimensionMismatch("stored gain L does not match system dimensions");

    Scenario sc = make_scenario(problem, stored.L);
    SimulationTrace trace = integrate(sc);
    write_trace_csv(trace, a.out);

    json summary;
    summary["out"] = a.out;
    summary["samples"] = trace.size();
    summary["t_final"] = trace.t.back();
    summary["nominal"] = trace.nominal;
    summary["initial_error_norm"] = trace.e.front().norm();
    summary["final_error_norm"] = trace.e.back().norm();
    if (trace.nominal) {
        DecayCheck dc = decay_check(trace, stored.beta, stored.P1);
        summary["decay"] = {{"passes", dc.passes},
                            {"worst_ratio", dc.worst_ratio},
                            {"kappa", dc.kappa},
                            {"beta", stored.beta}};
    }
    try {
        double estimate = l2_gain_estimate({trace});
        summary["l2_gain"] = {{"estimate", estimate},
                              {"mu_star", stored.mu_star},
                              {"within_bound", estimate <= stored.mu_star}};
    } catch (const ZeroDisturbance&) {
        // No disturbance energy in the scenario; no gain to estimate.
    } catch (const PreconditionViolated&) {
        // Nonzero initial error; the L2 ratio is not an induced-gain witness.
    }
    std::cout << summary.dump(2) << "\n";
    return kExitOk;
}

struct MarginsArgs {
    std::string result_file;
    std::string problem_file;
    std::string out;
    int trials = 0;
    std::uint64_t seed = 0x5eed;
};

int run_margins(const MarginsArgs& a) {
    StoredResult stored = load_result(a.result_file);
    ProblemFile problem = load_problem_file(a.problem_file);

    NormMargin nm = norm_margin(problem.sys.gamma_actual, stored.gamma_star);
    json out;
    out["mode"] = stored.mode;
    out["norm"] = {{"gamma_actual", nm.gamma_actual},
                   {"gamma_star", nm.gamma_star},
                   {"delta_gamma", nm.delta_gamma},
                   {"guaranteed", nm.guaranteed()}};

    if (stored.Gamma_star) {
        if (!problem.sys.Gamma_actual)
            throw Error("result has Gamma_star but the problem file defines no "
                        "Gamma_actual");
        ElementwiseMargin em = elementwise_margin(
            *problem.sys.Gamma_actual, *stored.Gamma_star, a.trials, a.seed);
        out["elementwise"] = {{"Gamma_actual", matrix_to_json(em.Gamma_actual)},
                              {"Gamma_star", matrix_to_json(em.Gamma_star)},
                              {"lo", matrix_to_json(em.lo)},
                              {"hi", matrix_to_json(em.hi)},
                              {"randomized_trials", a.trials}};
        if (!a.out.empty()) {
            write_interval_csv(em, a.out);
            out["elementwise"]["out"] = a.out;
        }
    } else if (!a.out.empty()) {
        throw Error("--out requires an elementwise result (no Gamma_star stored)");
    }
    std::cout << out.dump(2) << "\n";
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Robust H-infinity observer synthesis for Lipschitz nonlinear "
                 "systems with time-varying parametric uncertainty"};
    app.require_subcommand(1);

    SynthArgs synth_args;
    CLI::App* synth = app.add_subcommand("synth", "Synthesize an observer gain");
    synth->add_option("file", synth_args.file, "Problem JSON file")->required();
    synth->add_option("--mode", synth_args.mode,
                      "maxgamma|feasibility|pareto|elementwise");
    synth->add_option("--lambda", synth_args.lambda, "Trade-off weight override");
    synth->add_option("--beta", synth_args.beta, "Decay rate override");
    synth->add_option("--theta", synth_args.theta, "Gain-bound level P1 > theta I");
    synth->add_option("--gamma", synth_args.gamma,
                      "Lipschitz level (feasibility mode)");
    synth->add_option("--mu", synth_args.mu, "Attenuation level");
    synth->add_option("--weights", synth_args.weights,
                      "Element-wise objective weights, n*n row-major");
    synth->add_option("--gain-from", synth_args.gain_from,
                      "Result JSON fixing L (feasibility mode)");
    synth->add_option("--out", synth_args.out, "Also write the result JSON here");

    SweepArgs sweep_args;
    CLI::App* sweep =
        app.add_subcommand("sweep", "Trade-off curve or surface as CSV");
    sweep->add_option("file", sweep_args.file, "Problem JSON file")->required();
    sweep->add_option("--lambda-grid", sweep_args.lambda_grid,
                      "start:step:stop or comma list (default 101 points on [0,1])");
    sweep->add_option("--beta-grid", sweep_args.beta_grid,
                      "Adds the beta axis: full surface sweep");
    sweep->add_option("--beta", sweep_args.beta, "Decay rate override (curve)");
    sweep->add_option("--out", sweep_args.out, "Output CSV path")->required();

    SimulateArgs sim_args;
    CLI::App* simulate =
        app.add_subcommand("simulate", "Integrate the stored scenario");
    simulate->add_option("file", sim_args.file, "Problem JSON file")->required();
    simulate->add_option("--gain-from", sim_args.gain_from,
                         "Result JSON providing the observer gain")
        ->required();
    simulate->add_option("--out", sim_args.out, "Output trace CSV path")
        ->required();

    MarginsArgs margin_args;
    CLI::App* margins =
        app.add_subcommand("margins", "Robustness margins of a stored result");
    margins->add_option("result", margin_args.result_file, "Result JSON file")
        ->required();
    margins->add_option("problem", margin_args.problem_file, "Problem JSON file")
        ->required();
    margins->add_option("--out", margin_args.out,
                        "Interval CSV path (elementwise results)");
    margins->add_option("--trials", margin_args.trials,
                        "Randomized perturbation trials");
    margins->add_option("--seed", margin_args.seed, "Trial seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitError;
    }

    try {
        if (synth->parsed())
            return run_synth(synth_args);
        if (sweep->parsed())
            return run_sweep(sweep_args);
        if (simulate->parsed())
            return run_simulate(sim_args);
        if (margins->parsed())
            return run_margins(margin_args);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
    return kExitError;
}
