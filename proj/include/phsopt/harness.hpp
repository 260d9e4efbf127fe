#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "phsopt/integrators.hpp"

namespace phsopt {

struct ExperimentConfig {
  std::string graph_spec = "cycle:10";
  std::string cost_spec = "quadratic:3:42";
  std::string scheme_spec = "mid:tau=1";
  int steps = 1000;
  double accuracy_b = 1e-6;
  std::uint64_t seed = 42;  // initial condition q_i(0) ~ N(0, I)
  bool record_lyapunov = false;
  bool record_states = false;
  bool record_timing = false;      // off by default so exports are reproducible
  std::optional<double> stop_below;  // early stop once the error drops below
  std::string output_path;

  void validate() const;
};

/// Reads a JSON object whose keys mirror the CLI flags: graph, cost, scheme,
/// steps, B, seed, out, record_lyapunov. Missing keys keep `base` values.
ExperimentConfig load_config_json(const std::string& path, ExperimentConfig base = {});

enum class RunStatus { Converged, MaxSteps, Diverged, SolverFailed };

std::string to_string(RunStatus status);
RunStatus parse_run_status(const std::string& text);

struct RunTrace {
  std::vector<double> error;  // entry k is ‖q[k] - 1⊗θ*‖, entry 0 the initial state
  std::vector<double> lyapunov;
  std::vector<int> newton_max_iters;
  std::vector<std::int64_t> wall_ns;
  std::vector<NetworkState<double>> states;
  RunStatus status = RunStatus::MaxSteps;
  std::string failure;  // message of the solver error behind SolverFailed

  int steps_taken() const { return error.empty() ? 0 : static_cast<int>(error.size()) - 1; }
  double final_error() const;
};

/// Graph, costs, optimum and initial state shared by every run of a config.
struct Problem {
  Graph graph;
  CostEnsemble<double> costs;
  Vector<double> theta_star;
  NetworkState<double> initial;
};

Problem build_problem(const ExperimentConfig& config);

inline constexpr double kDivergenceNorm = 1e12;

RunTrace run(const ExperimentConfig& config);
RunTrace run(const Problem& problem, const Scheme& scheme, const ExperimentConfig& config);

/// First K with e_k ≤ B for every recorded k ≥ K. Empty when the trace
/// diverged or its last entry is above B.
std::optional<int> k_b(const RunTrace& trace, double b);

struct SweepRow {
  std::string scheme;
  double tau = 0.0;
  std::optional<int> k_b;
  double final_error = 0.0;
  RunStatus status = RunStatus::MaxSteps;
};

/// Runs every (scheme, τ) cell from the same problem and initial state. Cells
/// run concurrently; rows come back ordered by scheme, then τ.
std::vector<SweepRow> tau_sweep(const ExperimentConfig& base, const std::vector<double>& taus,
                                const std::vector<std::string>& schemes);

std::vector<double> linspace_grid(double a, double b, int count);
std::vector<double> logspace_grid(double a, double b, int count);

/// "a:b:count" (linear) or "log:a:b:count".
std::vector<double> parse_tau_grid(const std::string& spec);

/// Columns step,error,lyapunov,newton_max_iters,wall_ns.
void export_csv(const RunTrace& trace, const std::string& path);
/// Columns scheme,tau,k_b,final_error,status.
void export_csv(const std::vector<SweepRow>& table, const std::string& path);

std::string trace_csv(const RunTrace& trace);
std::string sweep_csv(const std::vector<SweepRow>& table);

RunTrace parse_trace_csv(const std::string& path);
std::vector<SweepRow> parse_sweep_csv(const std::string& path);

/// 17 significant digits, classic locale.
std::string format_real(double value);

}  // namespace phsopt
