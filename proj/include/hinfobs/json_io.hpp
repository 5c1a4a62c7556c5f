#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "hinfobs/robustness.hpp"
#include "hinfobs/simulation.hpp"
#include "hinfobs/synthesis.hpp"
#include "hinfobs/system_model.hpp"

namespace hinfobs {

// Matrices travel as {"rows": r, "cols": c, "data": [row-major]} objects,
// vectors as plain arrays. Parsing is strict: unknown fields anywhere in a
// document are rejected.

nlohmann::json matrix_to_json(const Matrix& M);
Matrix matrix_from_json(const nlohmann::json& j, const std::string& what);
nlohmann::json vector_to_json(const Vector& v);
Vector vector_from_json(const nlohmann::json& j, const std::string& what);

// Declarative disturbance signal: zero, sin, pulse, or seeded
// zero-order-hold noise. Applied to every component of w.
struct SignalSpec {
    std::string kind = "zero";
    double amplitude = 1.0;
    double omega = 1.0;   // sin
    double t_on = 0.0;    // pulse
    double t_off = 1.0;   // pulse
    double hold = 0.1;    // noise sample-and-hold interval
    std::uint64_t seed = 1;
};

// Declarative uncertainty realization F(t): zero or sin(omega t) * F0.
struct UncertaintySpec {
    std::string kind = "zero";
    double omega = 2.0;
    Matrix F0;
};

// Named nonlinearity builtins: zero, sin_channel (gain * sin(x_input) fed
// into one state equation, indices 1-based), or linear (K x).
struct PhiSpec {
    std::string kind = "zero";
    double gain = 0.0;
    int input = 1;
    int output = 1;
    Matrix K;
};

struct ScenarioSpec {
    Vector x0;
    Vector xhat0;
    SignalSpec w;
    UncertaintySpec F;
    std::optional<PhiSpec> delta_phi;
    double t_final = 20.0;
    double dt = 1e-3;
};

struct ProblemFile {
    UncertainSystem sys;
    SynthesisOptions options;
    std::optional<ScenarioSpec> scenario;
};

ProblemFile parse_problem(const nlohmann::json& j);
ProblemFile load_problem_file(const std::string& path);

Nonlinearity make_nonlinearity(const PhiSpec& spec, int n);
// Null std::function for the zero kinds, so scenarios built from them count
// as nominal.
Signal make_signal(const SignalSpec& spec, int q);
MatrixSignal make_uncertainty(const UncertaintySpec& spec);
Scenario make_scenario(const ProblemFile& problem, const Matrix& L);

nlohmann::json report_to_json(const SolveReport& report);
nlohmann::json residual_to_json(const LmiResidual& residual);
nlohmann::json result_to_json(const SynthesisResult& r,
                              const SynthesisOptions& options,
                              const std::string& mode);
nlohmann::json result_to_json(const ElementwiseResult& r,
                              const SynthesisOptions& options,
                              const std::string& mode);

// The slice of a stored result needed to drive simulation and margin
// analysis. Matrices round-trip bit-identically through the JSON layer.
struct StoredResult {
    std::string mode;
    std::string status;
    double beta = 0.0;
    double lambda = 0.0;
    Matrix P1;
    Matrix P2;
    Matrix G;
    Matrix L;
    double gamma_star = 0.0;
    double zeta_star = 0.0;
    double mu_star = 0.0;
    double sigma_max_L = 0.0;
    std::optional<Matrix> Gamma_star;
    std::optional<double> omega_star;
    std::optional<double> sigma_max_Gamma;
};

StoredResult load_result(const std::string& path);
StoredResult result_from_json(const nlohmann::json& j);

// CSV output, 17 significant digits throughout.
std::string csv_number(double v);
void write_curve_csv(const ParetoCurve& curve, const std::string& path);
void write_surface_csv(const SurfaceGrid& grid, const std::string& path);
void write_trace_csv(const SimulationTrace& trace, const std::string& path);
void write_interval_csv(const ElementwiseMargin& margin, const std::string& path);

} // namespace hinfobs
