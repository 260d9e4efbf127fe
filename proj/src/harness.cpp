#include "phsopt/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <future>
#include <locale>
#include <random>
#include <sstream>
#include <thread>

#include "json.hpp"

namespace phsopt {
namespace {

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string item;
  std::stringstream in(text);
  while (std::getline(in, item, sep)) parts.push_back(item);
  if (!text.empty() && text.back() == sep) parts.emplace_back();
  return parts;
}

double parse_real(const std::string& text) {
  if (text == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (text == "inf") return std::numeric_limits<double>::infinity();
  if (text == "-inf") return -std::numeric_limits<double>::infinity();
  double value = 0.0;
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (text.empty() || ec != std::errc() || ptr != end) {
    throw IoError("cannot parse number '" + text + "'");
  }
  return value;
}

template <typename Int>
Int parse_int(const std::string& text) {
  Int value = 0;
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (text.empty() || ec != std::errc() || ptr != end) {
    throw IoError("cannot parse integer '" + text + "'");
  }
  return value;
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << contents;
  if (!out) throw IoError("failed writing '" + path + "'");
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

/// Energy reference for the optional Lyapunov column: the Bregman distance
/// to the scheme's own limit point.
std::optional<NetworkState<double>> reference_equilibrium(const Problem& problem,
                                                          const Scheme& scheme) {
  switch (scheme.kind) {
    case SchemeKind::Mid:
      return mid_equilibrium<double>(problem.initial, problem.costs, problem.graph, scheme.tau,
                                     problem.theta_star);
    case SchemeKind::Euler:
    case SchemeKind::DiscreteGradientCentral:
      return continuous_equilibrium<double>(problem.initial, problem.costs, problem.graph,
                                            problem.theta_star);
    case SchemeKind::GradientTracking:
      return std::nullopt;
  }
  return std::nullopt;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (steps < 1) throw InvalidArgument("steps must be at least 1");
  if (!(accuracy_b > 0.0)) throw InvalidArgument("accuracy bound B must be positive");
  if (stop_below && !(*stop_below > 0.0)) throw InvalidArgument("stop_below must be positive");
}

ExperimentConfig load_config_json(const std::string& path, ExperimentConfig base) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw IoError("config '" + path + "': " + e.what());
  }
  if (!j.is_object()) throw IoError("config '" + path + "' must hold a JSON object");
  try {
    if (j.contains("graph")) base.graph_spec = j.at("graph").get<std::string>();
    if (j.contains("cost")) base.cost_spec = j.at("cost").get<std::string>();
    if (j.contains("scheme")) base.scheme_spec = j.at("scheme").get<std::string>();
    if (j.contains("steps")) base.steps = j.at("steps").get<int>();
    if (j.contains("B")) base.accuracy_b = j.at("B").get<double>();
    if (j.contains("seed")) base.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("out")) base.output_path = j.at("out").get<std::string>();
    if (j.contains("record_lyapunov")) base.record_lyapunov = j.at("record_lyapunov").get<bool>();
    if (j.contains("record_timing")) base.record_timing = j.at("record_timing").get<bool>();
  } catch (const nlohmann::json::exception& e) {
    throw IoError("config '" + path + "': " + e.what());
  }
  return base;
}

std::string to_string(RunStatus status) {
  switch (status) {
    case RunStatus::Converged: return "Converged";
    case RunStatus::MaxSteps: return "MaxSteps";
    case RunStatus::Diverged: return "Diverged";
    case RunStatus::SolverFailed: return "SolverFailed";
  }
  return "Unknown";
}

RunStatus parse_run_status(const std::string& text) {
  for (RunStatus s : {RunStatus::Converged, RunStatus::MaxSteps, RunStatus::Diverged,
                      RunStatus::SolverFailed}) {
    if (to_string(s) == text) return s;
  }
  throw IoError("unknown run status '" + text + "'");
}

double RunTrace::final_error() const {
  return error.empty() ? std::numeric_limits<double>::quiet_NaN() : error.back();
}

Problem build_problem(const ExperimentConfig& config) {
  Graph graph = parse_graph_spec(config.graph_spec);
  CostEnsemble<double> costs = parse_cost_spec(config.cost_spec, graph.size());
  Vector<double> theta = centralized_optimum<double>(costs);
  NetworkState<double> initial(graph.size(), costs.dim());
  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (Eigen::Index k = 0; k < initial.q().size(); ++k) initial.q()(k) = normal(rng);
  return Problem{std::move(graph), std::move(costs), std::move(theta), std::move(initial)};
}

RunTrace run(const ExperimentConfig& config) {
  config.validate();
  const Scheme scheme = parse_scheme_spec(config.scheme_spec);
  return run(build_problem(config), scheme, config);
}

RunTrace run(const Problem& problem, const Scheme& scheme, const ExperimentConfig& config) {
  config.validate();
  scheme.validate();
  const int m = problem.costs.dim();
  const auto& g = problem.graph;
  const auto& costs = problem.costs;
  std::optional<NetworkState<double>> reference;
  if (config.record_lyapunov) reference = reference_equilibrium(problem, scheme);

  RunTrace trace;
  NetworkState<double> x = problem.initial;
  std::optional<TrackingState<double>> tracking;
  if (scheme.kind == SchemeKind::GradientTracking) {
    tracking = gradient_tracking_init<double>(x.q(), costs);
  }

  auto record = [&](const NetworkState<double>& state, int newton, std::int64_t ns) {
    trace.error.push_back(consensus_error<double>(state.q(), problem.theta_star));
    if (config.record_lyapunov) {
      trace.lyapunov.push_back(
          reference ? bregman_lyapunov<double>(state, *reference)
                    : 0.5 * trace.error.back() * trace.error.back());
    }
    trace.newton_max_iters.push_back(newton);
    trace.wall_ns.push_back(ns);
    if (config.record_states) trace.states.push_back(state);
  };
  record(x, 0, 0);

  trace.status = RunStatus::MaxSteps;
  for (int k = 0; k < config.steps; ++k) {
    const auto start = std::chrono::steady_clock::now();
    NetworkState<double> next;
    int newton = 0;
    try {
      switch (scheme.kind) {
        case SchemeKind::Euler:
          next = euler_step<double>(x, costs, g, scheme.tau);
          break;
        case SchemeKind::DiscreteGradientCentral: {
          auto report = dg_central_step<double>(x, costs, g, scheme.tau, scheme.solver);
          newton = report.max_newton_iterations();
          next = std::move(report.next);
          break;
        }
        case SchemeKind::Mid: {
          auto report = mid_step<double>(x, costs, g, scheme.tau, scheme.solver);
          newton = report.max_newton_iterations();
          next = std::move(report.next);
          break;
        }
        case SchemeKind::GradientTracking:
          tracking = gradient_tracking_step<double>(*tracking, costs, g, scheme.tau);
          next = NetworkState<double>(g.size(), m, tracking->q, Vector<double>::Zero(g.size() * m));
          break;
      }
    } catch (const MaxIterationsExceeded& e) {
      trace.status = RunStatus::SolverFailed;
      trace.failure = e.what();
      break;
    }
    const auto stop = std::chrono::steady_clock::now();
    const bool blown_up = !next.finite() || next.norm() > kDivergenceNorm ||
                          (tracking && !tracking->tracker.allFinite());
    if (blown_up) {
      trace.status = RunStatus::Diverged;
      break;
    }
    x = std::move(next);
    const std::int64_t ns =
        config.record_timing
            ? std::chrono::duration_cast<std::chrono::nanoseconds>(stop - start).count()
            : 0;
    record(x, newton, ns);
    if (config.stop_below && trace.error.back() <= *config.stop_below) {
      trace.status = RunStatus::Converged;
      break;
    }
  }
  return trace;
}

std::optional<int> k_b(const RunTrace& trace, double b) {
  if (!(b > 0.0)) throw InvalidArgument("k_b: B must be positive");
  if (trace.status == RunStatus::Diverged || trace.status == RunStatus::SolverFailed ||
      trace.error.empty()) {
    return std::nullopt;
  }
  for (int k = static_cast<int>(trace.error.size()) - 1; k >= 0; --k) {
    if (!(trace.error[k] <= b)) {
      if (k == static_cast<int>(trace.error.size()) - 1) return std::nullopt;
      return k + 1;
    }
  }
  return 0;
}

std::vector<SweepRow> tau_sweep(const ExperimentConfig& base, const std::vector<double>& taus,
                                const std::vector<std::string>& schemes) {
  base.validate();
  for (double tau : taus) {
    if (!(tau > 0.0)) throw InvalidArgument("tau_sweep: every tau must be positive");
  }
  const Problem problem = build_problem(base);
  ExperimentConfig cell_config = base;
  cell_config.record_states = false;
  cell_config.record_lyapunov = false;

  struct Cell {
    std::string name;
    Scheme scheme;
  };
  std::vector<Cell> cells;
  for (const auto& name : schemes) {
    const Scheme proto = parse_scheme_spec(name);
    for (double tau : taus) {
      Scheme s = proto;
      s.tau = tau;
      cells.push_back({to_string(s.kind), s});
    }
  }

  std::vector<SweepRow> rows(cells.size());
  auto work = [&](std::size_t i) {
    const RunTrace trace = run(problem, cells[i].scheme, cell_config);
    rows[i] = SweepRow{cells[i].name, cells[i].scheme.tau, k_b(trace, base.accuracy_b),
                       trace.final_error(), trace.status};
  };
  const std::size_t workers =
      std::max<std::size_t>(1, std::min<std::size_t>(std::thread::hardware_concurrency(),
                                                     cells.size()));
  std::atomic<std::size_t> next{0};
  std::vector<std::future<void>> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.push_back(std::async(std::launch::async, [&] {
      for (std::size_t i = next++; i < cells.size(); i = next++) work(i);
    }));
  }
  for (auto& f : pool) f.get();
  return rows;
}

std::vector<double> linspace_grid(double a, double b, int count) {
  if (count < 1) throw InvalidArgument("grid needs at least one point");
  std::vector<double> out(count);
  for (int i = 0; i < count; ++i) {
    out[i] = count == 1 ? a : a + (b - a) * double(i) / double(count - 1);
  }
  return out;
}

std::vector<double> logspace_grid(double a, double b, int count) {
  if (!(a > 0.0 && b > 0.0)) throw InvalidArgument("log grid needs positive endpoints");
  std::vector<double> out = linspace_grid(std::log(a), std::log(b), count);
  for (double& v : out) v = std::exp(v);
  return out;
}

std::vector<double> parse_tau_grid(const std::string& spec) {
  auto parts = split(spec, ':');
  bool log = false;
  if (!parts.empty() && parts[0] == "log") {
    log = true;
    parts.erase(parts.begin());
  }
  if (parts.size() != 3) throw InvalidArgument("tau grid expects a:b:count or log:a:b:count");
  double a = 0.0;
  double b = 0.0;
  int count = 0;
  try {
    a = parse_real(parts[0]);
    b = parse_real(parts[1]);
    count = parse_int<int>(parts[2]);
  } catch (const IoError& e) {
    throw InvalidArgument(std::string("tau grid: ") + e.what());
  }
  if (log) return logspace_grid(a, b, count);
  std::vector<double> grid = linspace_grid(a, b, count);
  // The schemes are undefined at τ = 0, so a grid anchored there drops it.
  grid.erase(std::remove_if(grid.begin(), grid.end(), [](double t) { return !(t > 0.0); }),
             grid.end());
  return grid;
}

std::string format_real(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  std::ostringstream out;
  out.imbue(std::locale::classic());
  out.precision(17);
  out << value;
  return out.str();
}

std::string trace_csv(const RunTrace& trace) {
  std::string out = "step,error,lyapunov,newton_max_iters,wall_ns\n";
  for (std::size_t k = 0; k < trace.error.size(); ++k) {
    out += std::to_string(k);
    out += ',';
    out += format_real(trace.error[k]);
    out += ',';
    if (k < trace.lyapunov.size()) out += format_real(trace.lyapunov[k]);
    out += ',';
    out += std::to_string(k < trace.newton_max_iters.size() ? trace.newton_max_iters[k] : 0);
    out += ',';
    out += std::to_string(k < trace.wall_ns.size() ? trace.wall_ns[k] : 0);
    out += '\n';
  }
  return out;
}

std::string sweep_csv(const std::vector<SweepRow>& table) {
  std::string out = "scheme,tau,k_b,final_error,status\n";
  for (const auto& row : table) {
    out += row.scheme;
    out += ',';
    out += format_real(row.tau);
    out += ',';
    out += row.k_b ? std::to_string(*row.k_b) : std::string("NotReached");
    out += ',';
    out += format_real(row.final_error);
    out += ',';
    out += to_string(row.status);
    out += '\n';
  }
  return out;
}

void export_csv(const RunTrace& trace, const std::string& path) {
  write_file(path, trace_csv(trace));
}

void export_csv(const std::vector<SweepRow>& table, const std::string& path) {
  write_file(path, sweep_csv(table));
}

RunTrace parse_trace_csv(const std::string& path) {
  const auto lines = read_lines(path);
  if (lines.empty() || lines[0] != "step,error,lyapunov,newton_max_iters,wall_ns") {
    throw IoError("'" + path + "' is not a trace CSV");
  }
  RunTrace trace;
  bool has_lyapunov = false;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto cols = split(lines[i], ',');
    if (cols.size() != 5) throw IoError("trace CSV row " + std::to_string(i) + " malformed");
    trace.error.push_back(parse_real(cols[1]));
    if (!cols[2].empty()) {
      has_lyapunov = true;
      trace.lyapunov.push_back(parse_real(cols[2]));
    }
    trace.newton_max_iters.push_back(parse_int<int>(cols[3]));
    trace.wall_ns.push_back(parse_int<std::int64_t>(cols[4]));
  }
  if (has_lyapunov && trace.lyapunov.size() != trace.error.size()) {
    throw IoError("trace CSV has a partial lyapunov column");
  }
  return trace;
}

std::vector<SweepRow> parse_sweep_csv(const std::string& path) {
  const auto lines = read_lines(path);
  if (lines.empty() || lines[0] != "scheme,tau,k_b,final_error,status") {
    throw IoError("'" + path + "' is not a sweep CSV");
  }
  std::vector<SweepRow> rows;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto cols = split(lines[i], ',');
    if (cols.size() != 5) throw IoError("sweep CSV row " + std::to_string(i) + " malformed");
    SweepRow row;
    row.scheme = cols[0];
    row.tau = parse_real(cols[1]);
    if (cols[2] != "NotReached") row.k_b = parse_int<int>(cols[2]);
    row.final_error = parse_real(cols[3]);
    row.status = parse_run_status(cols[4]);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace phsopt
