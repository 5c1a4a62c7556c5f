// Regenerates the CSV data behind the five report figures:
//   fig1  state estimation trace for the shipped scenario
//   fig2  gamma*/mu* trade-off curve over the 101-point lambda grid
//   fig3  gamma* surface over the (beta, lambda) grid
//   fig4  mu* surface over the (beta, lambda) grid
//   fig5  sigma_max(L) surface over the (beta, lambda) grid
//
// Usage: make_figures [problem.json] [out_dir]

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "hinfobs/json_io.hpp"
#include "hinfobs/simulation.hpp"
#include "hinfobs/synthesis.hpp"

using namespace hinfobs;
namespace fs = std::filesystem;

namespace {

void write_surface_slice(const SurfaceGrid& grid, const std::string& path,
                         double SurfaceCell::*field) {
    std::ofstream out(path);
    if (!out)
        throw Error("cannot write " + path);
    out << "beta,lambda,value,status\n";
    for (const auto& cell : grid.cells) {
        out << csv_number(cell.beta) << ',' << csv_number(cell.lambda) << ',';
        if (cell.feasible)
            out << csv_number(cell.*field) << ",optimal\n";
        else
            out << "nan,infeasible\n";
    }
}

} // namespace

int main(int argc, char** argv) {
    const std::string problem_path =
        argc > 1 ? argv[1] : "data/paper_example.json";
    const fs::path out_dir = argc > 2 ? argv[2] : "figures";

    try {
        ProblemFile problem = load_problem_file(problem_path);
        fs::create_directories(out_dir);

        std::cerr << "synthesizing observer for fig1...\n";
        SynthesisResult gain = pareto_point(problem.sys, problem.options);
        if (!gain.feasible())
            throw Error("synthesis infeasible for " + problem_path);
        if (!problem.scenario)
            throw Error(problem_path + " carries no scenario for fig1");
        SimulationTrace trace = integrate(make_scenario(problem, gain.L));
        write_trace_csv(trace, (out_dir / "fig1_states.csv").string());

        std::cerr << "sweeping trade-off curve for fig2...\n";
        ParetoCurve curve =
            pareto_sweep(problem.sys, problem.options, default_lambda_grid());
        write_curve_csv(curve, (out_dir / "fig2_tradeoff_curve.csv").string());

        std::cerr << "sweeping surface for fig3-fig5 (set HINFOBS_THREADS to "
                     "parallelize)...\n";
        SurfaceGrid surface = surface_sweep(problem.sys, problem.options,
                                            default_beta_grid(),
                                            default_lambda_grid());
        write_surface_slice(surface,
                            (out_dir / "fig3_gamma_star_surface.csv").string(),
                            &SurfaceCell::gamma_star);
        write_surface_slice(surface,
                            (out_dir / "fig4_mu_star_surface.csv").string(),
                            &SurfaceCell::mu_star);
        write_surface_slice(surface,
                            (out_dir / "fig5_sigma_max_L_surface.csv").string(),
                            &SurfaceCell::sigma_max_L);

        int feasible = 0;
        for (const auto& cell : surface.cells)
            if (cell.feasible)
                ++feasible;
        std::cout << "wrote 5 figure CSVs to " << out_dir.string() << " ("
                  << feasible << "/" << surface.cells.size()
                  << " feasible surface cells)\n";
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
