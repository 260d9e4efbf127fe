#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "phsopt/harness.hpp"
#include "phsopt/stability.hpp"

namespace {

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

struct RunFlags {
  std::string config_path;
  std::optional<std::string> graph, cost, scheme, out;
  std::optional<int> steps;
  std::optional<double> b;
  std::optional<std::uint64_t> seed;
  bool lyapunov = false;
  bool timing = false;
};

void add_common(CLI::App* cmd, RunFlags& f) {
  cmd->add_option("--config", f.config_path, "JSON file with defaults for the other flags");
  cmd->add_option("--graph", f.graph, "cycle:N, complete:N, star:N, path:N or er:N:p:seed");
  cmd->add_option("--cost", f.cost, "quadratic:m:seed or logistic:m:d:C:seed");
  cmd->add_option("--steps", f.steps, "iteration horizon");
  cmd->add_option("--B", f.b, "accuracy bound for K_B");
  cmd->add_option("--seed", f.seed, "seed of the initial condition");
  cmd->add_option("--out", f.out, "CSV output path (stdout when omitted)");
  cmd->add_flag("--lyapunov", f.lyapunov, "record the Lyapunov column");
  cmd->add_flag("--timing", f.timing, "record wall-clock nanoseconds per step");
}

phsopt::ExperimentConfig resolve(const RunFlags& f) {
  phsopt::ExperimentConfig c;
  if (!f.config_path.empty()) c = phsopt::load_config_json(f.config_path, c);
  if (f.graph) c.graph_spec = *f.graph;
  if (f.cost) c.cost_spec = *f.cost;
  if (f.scheme) c.scheme_spec = *f.scheme;
  if (f.out) c.output_path = *f.out;
  if (f.steps) c.steps = *f.steps;
  if (f.b) c.accuracy_b = *f.b;
  if (f.seed) c.seed = *f.seed;
  if (f.lyapunov) c.record_lyapunov = true;
  if (f.timing) c.record_timing = true;
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulate and certify MID-discretized port-Hamiltonian consensus optimization"};
  app.require_subcommand(1);

  RunFlags run_flags;
  auto* run_cmd = app.add_subcommand("run", "run one scheme and write its error trace");
  add_common(run_cmd, run_flags);
  run_cmd->add_option("--scheme", run_flags.scheme, "euler|dg|mid|gt with :tau=<value>");

  RunFlags sweep_flags;
  std::string tau_grid = "0:10:200";
  std::string scheme_list = "mid,euler";
  auto* sweep_cmd = app.add_subcommand("sweep", "K_B over a grid of step sizes");
  add_common(sweep_cmd, sweep_flags);
  sweep_cmd->add_option("--tau-grid", tau_grid, "a:b:count (linear, tau=0 dropped) or log:a:b:count");
  sweep_cmd->add_option("--schemes", scheme_list, "comma separated scheme names");

  std::string cert_graph;
  double cert_tau = 1.0;
  std::optional<double> cert_mu, cert_lipschitz;
  int cert_m = 1;
  std::optional<std::string> cert_cost;
  bool cert_quadratic = false;
  bool cert_search = false;
  bool cert_header = false;
  auto* cert_cmd = app.add_subcommand("certify", "check the LMI stability certificate");
  cert_cmd->add_option("--graph", cert_graph, "graph spec")->required();
  cert_cmd->add_option("--tau", cert_tau, "step size")->required();
  cert_cmd->add_option("--mu", cert_mu, "strong convexity constant");
  cert_cmd->add_option("--lipschitz", cert_lipschitz, "gradient Lipschitz constant");
  cert_cmd->add_option("--m", cert_m, "decision dimension");
  cert_cmd->add_option("--cost", cert_cost, "cost spec supplying mu, L and Hessians");
  cert_cmd->add_flag("--quadratic", cert_quadratic, "use the exact quadratic-cost check");
  cert_cmd->add_flag("--search", cert_search, "scan the certificate family instead of the closed form");
  cert_cmd->add_flag("--header", cert_header, "print the CSV header first");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) {
      const auto config = resolve(run_flags);
      const auto trace = phsopt::run(config);
      if (config.output_path.empty()) {
        std::cout << phsopt::trace_csv(trace);
      } else {
        phsopt::export_csv(trace, config.output_path);
      }
      const auto kb = phsopt::k_b(trace, config.accuracy_b);
      std::cerr << "status=" << phsopt::to_string(trace.status)
                << " final_error=" << phsopt::format_real(trace.final_error())
                << " k_b=" << (kb ? std::to_string(*kb) : std::string("NotReached")) << '\n';
      if (!trace.failure.empty()) std::cerr << trace.failure << '\n';
    } else if (*sweep_cmd) {
      const auto config = resolve(sweep_flags);
      const auto table =
          phsopt::tau_sweep(config, phsopt::parse_tau_grid(tau_grid), split_list(scheme_list));
      if (config.output_path.empty()) {
        std::cout << phsopt::sweep_csv(table);
      } else {
        phsopt::export_csv(table, config.output_path);
      }
    } else if (*cert_cmd) {
      const phsopt::Graph g = phsopt::parse_graph_spec(cert_graph);
      std::optional<phsopt::CostEnsemble<double>> costs;
      if (cert_cost) {
        costs = phsopt::parse_cost_spec(*cert_cost, g.size());
        cert_m = costs->dim();
      }
      const double mu = cert_mu ? *cert_mu : costs ? costs->mu() : -1.0;
      if (!(mu > 0.0)) throw phsopt::InvalidArgument("certify needs --mu or --cost");
      const double lipschitz = cert_lipschitz ? *cert_lipschitz : costs ? costs->lipschitz() : mu;

      std::vector<phsopt::Matrix<double>> hessians;
      if (cert_quadratic) {
        if (costs) {
          hessians = costs->hessians();
        } else {
          hessians.assign(g.size(), mu * phsopt::Matrix<double>::Identity(cert_m, cert_m));
        }
      }
      std::optional<phsopt::LmiCertificate<double>> cert;
      if (cert_search) {
        phsopt::ProblemConstants<double> k{mu, lipschitz, std::nullopt};
        if (cert_quadratic) k.hessians = hessians;
        cert = phsopt::certificate_search<double>(g, cert_m, cert_tau, k);
      } else {
        cert = phsopt::corollary_certificate<double>(g, cert_m, cert_tau, mu);
      }
      if (cert_header) std::cout << "graph,tau,u,positivity,schur,decrease,verdict\n";
      std::cout << cert_graph << ',' << phsopt::format_real(cert_tau) << ',';
      if (!cert) {
        std::cout << ",,,,NotFound\n";
        return 0;
      }
      const auto verdict =
          cert_quadratic
              ? phsopt::check_certificate_quadratic<double>(*cert, g, cert_m, cert_tau, hessians)
              : phsopt::check_certificate<double>(*cert, g, cert_m, cert_tau, mu, lipschitz);
      std::cout << phsopt::format_real(cert->u) << ','
                << phsopt::format_real(verdict.positivity) << ','
                << (verdict.schur ? phsopt::format_real(*verdict.schur) : std::string()) << ','
                << phsopt::format_real(verdict.decrease) << ','
                << (verdict.feasible ? "feasible" : "infeasible") << '\n';
    }
  } catch (const phsopt::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
