// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <cmath>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "phsopt/harness.hpp"
#include "phsopt/stability.hpp"

using namespace phsopt;
using Mat = Matrix<double>;
using Vec = Vector<double>;

namespace {

// Tolerances and budgets.
constexpr double kB = 1e-6;
constexpr int kLongHorizon = 100000;
constexpr int kSweepHorizon = 10000;
constexpr int kCertifiedHorizon = 5000;
constexpr double kAuditTolerance = 1e-8;
constexpr double kAnalyticTolerance = 1e-14;
constexpr double kSecantTolerance = 1e-8;
constexpr double kLimitTolerance = 1e-5;
constexpr double kLimitStep = 1e-6;
constexpr double kMidRowTolerance = 1e-10;
constexpr double kLinearOracleTolerance = 1e-10;
constexpr double kIdentityTolerance = 1e-12;
constexpr double kCommuteTolerance = 1e-10;
constexpr double kSimilarityTolerance = 1e-9;

const std::string kDeskGraph = "cycle:10";
const std::string kDeskCost = "quadratic:3:42";
// The quadratic generator draws Hessian eigenvalues in [0.5, 3].
constexpr double kDeskMu = 0.5;
constexpr double kDeskLipschitz = 3.0;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

/// CSV text produced by each criterion, compared across two runs for
/// determinism.
using Artifacts = std::map<std::string, std::string>;

ExperimentConfig desk_config(const std::string& scheme, int steps) {
  ExperimentConfig c;
  c.graph_spec = kDeskGraph;
  c.cost_spec = kDeskCost;
  c.scheme_spec = scheme;
  c.steps = steps;
  c.accuracy_b = kB;
  return c;
}

std::string scheme_at(const std::string& name, double tau) {
  return name + ":tau=" + format_real(tau);
}

std::string k_b_text(const std::optional<int>& k) {
  return k ? std::to_string(*k) : std::string("NotReached");
}

Graph random_connected(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> size(2, 12);
  const int n = size(rng);
  std::vector<Edge> edges;
  for (int v = 1; v < n; ++v) {
    std::uniform_int_distribution<int> parent(0, v - 1);
    edges.emplace_back(parent(rng), v);
  }
  std::bernoulli_distribution extra(0.3);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (std::find(edges.begin(), edges.end(), Edge{i, j}) == edges.end() && extra(rng)) {
        edges.emplace_back(i, j);
      }
    }
  }
  return Graph(n, edges);
}

NetworkState<double> random_state(std::mt19937_64& rng, int n, int m, double scale) {
  std::normal_distribution<double> normal;
  NetworkState<double> x(n, m);
  for (Eigen::Index k = 0; k < x.q().size(); ++k) {
    x.q()(k) = scale * normal(rng);
    x.p()(k) = scale * normal(rng);
  }
  return x;
}

/// V(e) = eᵀPe/2 with e in (q, r) coordinates, r = p - τQq.
double lyapunov_value(const NetworkState<double>& x, const NetworkState<double>& eq,
                      const LmiCertificate<double>& cert, const Graph& g, int m, double tau) {
  const Mat p = lyapunov_matrix<double>(cert, g, m, tau);
  const Mat q = q_lifted<double>(g, m);
  const Eigen::Index n = q.rows();
  Vec e(2 * n);
  e.head(n) = x.q() - eq.q();
  e.tail(n) = (x.p() - eq.p()) - tau * q * (x.q() - eq.q());
  return e.dot(p * e) / 2.0;
}

/// Runs MID from the desk problem with states recorded and audits the
/// certificate along the trajectory.
double audited_run(const Problem& problem, double tau, int steps,
                   const LmiCertificate<double>& cert, RunTrace* out) {
  ExperimentConfig c = desk_config(scheme_at("mid", tau), steps);
  c.record_states = true;
  RunTrace trace = run(problem, parse_scheme_spec(c.scheme_spec), c);
  const int m = problem.costs.dim();
  const auto eq = mid_equilibrium<double>(problem.initial, problem.costs, problem.graph, tau,
                                          problem.theta_star);
  const double v0 = lyapunov_value(problem.initial, eq, cert, problem.graph, m, tau);
  const double worst = audit_lyapunov<double>(trace.states, cert, eq, problem.graph, m, tau);
  trace.states.clear();
  if (out) *out = std::move(trace);
  return worst / (1.0 + v0);
}

// 1 and 5 share runs: the audit covers every certified run of criteria 1
// and 4c.
struct AuditRow {
  std::string source;
  double tau;
  double relative_worst;
};

Outcome criterion_1(Artifacts& art, std::vector<AuditRow>& audits) {
  Outcome o;
  const Problem problem = build_problem(desk_config("mid", 1));
  const int m = problem.costs.dim();
  std::ostringstream csv;
  csv << "tau,k_b,final_error,status\n";
  for (double tau : {1.0, 10.0, 100.0, 1000.0}) {
    const auto cert =
        corollary_certificate<double>(problem.graph, m, tau, problem.costs.mu());
    const bool certified = check_certificate<double>(cert, problem.graph, m, tau,
                                                     problem.costs.mu(),
                                                     problem.costs.lipschitz())
                               .feasible;
    RunTrace trace;
    const double worst = audited_run(problem, tau, kLongHorizon, cert, &trace);
    if (certified) audits.push_back({"criterion 1", tau, worst});
    const auto k = k_b(trace, kB);
    csv << format_real(tau) << ',' << k_b_text(k) << ',' << format_real(trace.final_error()) << ','
        << to_string(trace.status) << '\n';
    o.detail << " tau=" << tau << ":K_B=" << k_b_text(k);
    o.require(trace.status != RunStatus::Diverged, "diverged at tau=" + format_real(tau));
    o.require(k.has_value(), "B not reached at tau=" + format_real(tau));
    o.require(certified, "corollary certificate rejected at tau=" + format_real(tau));
  }
  art["criterion_1.csv"] = csv.str();
  return o;
}

Outcome criterion_2(Artifacts& art) {
  Outcome o;
  const RunTrace euler = run(desk_config("euler:tau=10", 1000));
  const RunTrace mid = run(desk_config("mid:tau=10", kSweepHorizon));
  art["criterion_2_euler.csv"] = trace_csv(euler);
  art["criterion_2_mid.csv"] = trace_csv(mid);
  o.detail << " euler=" << to_string(euler.status) << " after " << euler.steps_taken()
           << " steps, mid final error=" << mid.final_error();
  o.require(euler.status == RunStatus::Diverged, "euler did not diverge");
  o.require(mid.final_error() <= kB && k_b(mid, kB).has_value(), "mid did not reach B");

  const CostEnsemble<double> half({QuadraticCost<double>(Mat::Identity(1, 1), Vec::Zero(1))});
  const Graph single(1, {});
  NetworkState<double> x(1, 1);
  x.q()(0) = 1.0;
  const double euler_mult = euler_step<double>(x, half, single, 3.0).q()(0);
  o.require(std::abs(euler_mult) > 1.0, "euler multiplier at tau=3 not above 1");
  double worst_gap = 0.0;
  for (double tau : {0.1, 1.0, 3.0, 3.78, 10.0, 100.0, 1000.0}) {
    const double analytic = (1.0 - tau / 2.0) / (1.0 + tau / 2.0);
    const double computed = mid_step<double>(x, half, single, tau).next.q()(0);
    worst_gap = std::max(worst_gap, std::abs(computed - analytic));
    o.require(std::abs(analytic) < 1.0, "mid multiplier not below 1");
  }
  o.require(worst_gap <= kAnalyticTolerance, "mid multiplier differs from analytic value");
  o.detail << ", |euler mult(3)|=" << std::abs(euler_mult) << ", mid mult gap=" << worst_gap;
  art["criterion_2_multipliers.csv"] =
      "euler_mult,mid_gap\n" + format_real(euler_mult) + ',' + format_real(worst_gap) + '\n';
  return o;
}

Outcome criterion_3(Artifacts& art) {
  Outcome o;
  const auto grid = logspace_grid(0.05, 50.0, 50);
  const auto rows = tau_sweep(desk_config("mid", kSweepHorizon), grid, {"mid", "euler"});
  art["criterion_3.csv"] = sweep_csv(rows);
  const auto big = static_cast<double>(std::numeric_limits<int>::max());
  auto as_number = [&](const SweepRow& r) { return r.k_b ? double(*r.k_b) : big; };
  std::vector<double> mid, euler;
  for (const auto& r : rows) (r.scheme == "mid" ? mid : euler).push_back(as_number(r));

  o.require(euler.front() < big, "euler K_B not finite at the smallest tau");
  o.require(euler.back() == big, "euler K_B finite at the largest tau");
  const auto mid_min = std::min_element(mid.begin(), mid.end());
  const auto at = std::distance(mid.begin(), mid_min);
  o.require(*mid_min < mid.front() && *mid_min < mid.back(), "mid minimum not interior");
  const double euler_min = *std::min_element(euler.begin(), euler.end());
  o.require(*mid_min < euler_min, "mid minimum not below euler minimum");
  o.detail << " mid min K_B=" << *mid_min << " at tau=" << grid[at]
           << " (endpoints " << k_b_text(rows.front().k_b) << ", "
           << k_b_text(rows[grid.size() - 1].k_b) << "), euler min K_B=" << euler_min;
  return o;
}

Outcome criterion_4(Artifacts& art, std::vector<AuditRow>& audits) {
  Outcome o;
  std::ostringstream csv;
  csv << "case,graph,tau,positivity,schur,decrease,feasible\n";
  auto log = [&](const std::string& label, const std::string& graph, double tau,
                 const CertificateVerdict<double>& v) {
    csv << label << ',' << graph << ',' << format_real(tau) << ',' << format_real(v.positivity)
        << ',' << (v.schur ? format_real(*v.schur) : std::string()) << ','
        << format_real(v.decrease) << ',' << (v.feasible ? "yes" : "no") << '\n';
  };

  int checked = 0;
  double worst = std::numeric_limits<double>::infinity();
  for (int n = 3; n <= 12; ++n) {
    for (const auto& [name, g] : {std::pair{"cycle:" + std::to_string(n), cycle(n)},
                                  std::pair{"complete:" + std::to_string(n), complete(n)}}) {
      for (double tau : {0.01, 1.0, 100.0}) {
        const auto cert = corollary_certificate<double>(g, 3, tau, kDeskMu);
        const auto v = check_certificate<double>(cert, g, 3, tau, kDeskMu, kDeskLipschitz);
        log("a", name, tau, v);
        ++checked;
        worst = std::min({worst, v.positivity, *v.schur, v.decrease});
        o.require(v.feasible, name + " at tau=" + format_real(tau));
      }
    }
  }
  o.detail << " (a) " << checked << " certificates, worst margin " << worst << ";";

  const Graph s4 = star(4);
  const double mu = 0.01;
  const auto small_cert = corollary_certificate<double>(s4, 1, 0.0009, mu);
  const auto small = check_certificate<double>(small_cert, s4, 1, 0.0009, mu, 1.0);
  const auto large_cert = corollary_certificate<double>(s4, 1, 1.0, mu);
  const auto large = check_certificate<double>(large_cert, s4, 1, 1.0, mu, 1.0);
  log("b", "star:4", 0.0009, small);
  log("b", "star:4", 1.0, large);
  o.require(small.feasible, "star at tau=0.0009 infeasible");
  o.require(!large.feasible, "star at tau=1 feasible");
  o.detail << " (b) star tau=0.0009 " << (small.feasible ? "feasible" : "infeasible")
           << ", tau=1 " << (large.feasible ? "feasible" : "infeasible") << ";";

  const Problem problem = build_problem(desk_config("mid", 1));
  const int m = problem.costs.dim();
  const ProblemConstants<double> k{problem.costs.mu(), problem.costs.lipschitz(),
                                   problem.costs.hessians()};
  for (double tau : {3.78, 10.0}) {
    const auto cert = certificate_search<double>(problem.graph, m, tau, k);
    o.require(cert.has_value(), "quadratic search found nothing at tau=" + format_real(tau));
    if (!cert) continue;
    const auto v =
        check_certificate_quadratic<double>(*cert, problem.graph, m, tau, problem.costs.hessians());
    log("c", kDeskGraph, tau, v);
    o.require(v.feasible, "quadratic check at tau=" + format_real(tau));
    o.detail << " (c) tau=" << tau << " " << (v.feasible ? "feasible" : "infeasible");
    if (v.feasible) {
      audits.push_back({"criterion 4c", tau, audited_run(problem, tau, kCertifiedHorizon, *cert, nullptr)});
    }
  }
  art["criterion_4.csv"] = csv.str();
  return o;
}

Outcome criterion_5(Artifacts& art, const std::vector<AuditRow>& audits) {
  Outcome o;
  std::ostringstream csv;
  csv << "source,tau,relative_worst\n";
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& a : audits) {
    csv << a.source << ',' << format_real(a.tau) << ',' << format_real(a.relative_worst) << '\n';
    worst = std::max(worst, a.relative_worst);
    o.require(a.relative_worst <= kAuditTolerance,
              a.source + " tau=" + format_real(a.tau) + " audit " + format_real(a.relative_worst));
  }
  o.require(audits.size() == 6, "expected six certified runs");
  o.detail << " " << audits.size() << " certified runs, worst (dV + u|qbar|^2)/(1+V0)=" << worst;
  art["criterion_5.csv"] = csv.str();
  return o;
}

Outcome criterion_6(Artifacts& art) {
  Outcome o;
  std::mt19937_64 rng(606);
  std::normal_distribution<double> normal;
  double worst_secant = 0.0;
  double worst_limit = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const auto ens = k % 2 == 0 ? random_quadratic_ensemble<double>(1, 3, 1000 + k)
                                : random_logistic_ensemble<double>(1, 3, 10, 0.1, 1000 + k);
    const auto& f = ens[0];
    Vec u(3), v(3), w(3);
    for (int j = 0; j < 3; ++j) {
      u(j) = 2.0 * normal(rng);
      v(j) = 2.0 * normal(rng);
      w(j) = normal(rng);
    }
    w.normalize();
    auto grad = [&](const Vec& x) { return gradient<double>(f, x); };
    const Vec dg = discrete_gradient<double>(grad, u, v);
    const double secant = std::abs(dg.dot(v - u) - (value<double>(f, v) - value<double>(f, u)));
    const Vec near = discrete_gradient<double>(grad, u, Vec(u + kLimitStep * w));
    const double limit = (near - grad(u)).norm();
    worst_secant = std::max(worst_secant, secant);
    worst_limit = std::max(worst_limit, limit);
  }
  o.require(worst_secant <= kSecantTolerance, "secant property");
  o.require(worst_limit <= kLimitTolerance, "limit property");
  o.detail << " 1000 draws, worst secant gap=" << worst_secant << ", worst limit gap=" << worst_limit;
  art["criterion_6.csv"] =
      "secant,limit\n" + format_real(worst_secant) + ',' + format_real(worst_limit) + '\n';
  return o;
}

/// Dense solve of the full MID update for quadratic costs, in unknowns
/// (q⁺, p⁺) with the neighbour sums written through D and A.
NetworkState<double> mid_dense_oracle(const NetworkState<double>& x, const CostEnsemble<double>& costs,
                                      const Graph& g, double tau) {
  const int n = g.size();
  const int m = costs.dim();
  const int nm = n * m;
  const Mat d = lift<double>(degree_matrix<double>(g), m);
  const Mat a = lift<double>(adjacency<double>(g), m);
  Mat h = Mat::Zero(nm, nm);
  Vec b(nm);
  for (int i = 0; i < n; ++i) {
    const auto& c = std::get<QuadraticCost<double>>(costs[i]);
    h.block(i * m, i * m, m, m) = c.hessian;
    b.segment(i * m, m) = c.linear;
  }
  const Mat eye = Mat::Identity(nm, nm);
  Mat sys(2 * nm, 2 * nm);
  sys << eye / tau + d + h / 2.0, d, -d, eye / tau;
  Vec rhs(2 * nm);
  rhs.head(nm) = x.q() / tau + a * x.q() + a * x.p() - h * x.q() / 2.0 - b;
  rhs.tail(nm) = x.p() / tau - a * x.q();
  const Vec sol = solve_linear<double>(sys, rhs);
  return NetworkState<double>(n, m, sol.head(nm), sol.tail(nm));
}

Outcome criterion_7(Artifacts& art) {
  Outcome o;
  std::mt19937_64 rng(707);
  double worst_rows = 0.0;
  for (int k = 0; k < 100; ++k) {
    const int n = 2 + k % 9;
    const Graph g = erdos_renyi(n, 0.5, 700 + k);
    const auto costs = k % 2 == 0 ? random_quadratic_ensemble<double>(n, 3, 700 + k)
                                  : random_logistic_ensemble<double>(n, 3, 10, 0.1, 700 + k);
    const double tau = std::pow(10.0, -1.0 + 2.0 * (k % 7) / 6.0);
    const auto x = random_state(rng, n, 3, 2.0);
    const auto next = mid_step<double>(x, costs, g, tau).next;
    for (int i = 0; i < n; ++i) {
      Vec q_row = (next.q(i) - x.q(i)) / tau +
                  gradient<double>(costs[i], Vec((next.q(i) + x.q(i)) / 2.0));
      Vec p_row = (next.p(i) - x.p(i)) / tau;
      for (int j : g.neighbors(i)) {
        q_row += next.q(i) - x.q(j) + next.p(i) - x.p(j);
        p_row -= next.q(i) - x.q(j);
      }
      worst_rows = std::max({worst_rows, q_row.cwiseAbs().maxCoeff(), p_row.cwiseAbs().maxCoeff()});
    }
  }
  o.require(worst_rows <= kMidRowTolerance, "update rows");

  double worst_dense = 0.0;
  for (int k = 0; k < 20; ++k) {
    const Graph g = erdos_renyi(8, 0.4, 750 + k);
    const auto costs = random_quadratic_ensemble<double>(8, 3, 750 + k);
    const double tau = std::pow(10.0, -1.0 + 3.0 * k / 19.0);
    const auto x = random_state(rng, 8, 3, 1.0);
    const Vec got = mid_step<double>(x, costs, g, tau).next.stacked();
    const Vec want = mid_dense_oracle(x, costs, g, tau).stacked();
    worst_dense = std::max(worst_dense, (got - want).norm() / (1.0 + want.norm()));
  }
  o.require(worst_dense <= kLinearOracleTolerance, "dense linear oracle");

  const CostEnsemble<double> half({QuadraticCost<double>(Mat::Identity(1, 1), Vec::Zero(1))});
  const Graph single(1, {});
  double worst_scalar = 0.0;
  for (double tau : {0.1, 1.0, 10.0, 1000.0}) {
    NetworkState<double> x(1, 1);
    x.q()(0) = -1.3;
    x.p()(0) = 0.4;
    const auto next = mid_step<double>(x, half, single, tau).next;
    worst_scalar = std::max({worst_scalar,
                             std::abs(next.q()(0) + 1.3 * (1.0 - tau / 2.0) / (1.0 + tau / 2.0)),
                             std::abs(next.p()(0) - 0.4)});
  }
  o.require(worst_scalar <= kAnalyticTolerance, "scalar closed form");

  bool local = true;
  const Graph path6 = path(6);
  const auto costs = random_logistic_ensemble<double>(6, 3, 10, 0.1, 77);
  const auto x = random_state(rng, 6, 3, 1.0);
  const auto base = mid_step<double>(x, costs, path6, 3.78).next;
  for (int j = 0; j < 6; ++j) {
    NetworkState<double> y = x;
    y.q(j) += Vec::Constant(3, 0.5);
    y.p(j) -= Vec::Constant(3, 0.25);
    const auto moved = mid_step<double>(y, costs, path6, 3.78).next;
    for (int i = 0; i < 6; ++i) {
      if (i == j || path6.has_edge(i, j)) continue;
      local = local && moved.q(i) == base.q(i) && moved.p(i) == base.p(i);
    }
  }
  o.require(local, "locality");
  o.detail << " rows " << worst_rows << ", dense oracle " << worst_dense << ", scalar "
           << worst_scalar << ", locality " << (local ? "exact" : "broken");
  art["criterion_7.csv"] = "rows,dense,scalar,local\n" + format_real(worst_rows) + ',' +
                           format_real(worst_dense) + ',' + format_real(worst_scalar) + ',' +
                           (local ? "1" : "0") + '\n';
  return o;
}

Outcome criterion_8(Artifacts& art) {
  Outcome o;
  std::mt19937_64 rng(808);
  std::uniform_real_distribution<double> log_tau(-1.0, 1.0);
  double incidence_gap = 0.0, lambda_min = std::numeric_limits<double>::infinity(), commute = 0.0,
         similarity = 0.0, d2a2 = 0.0;
  const int m = 2;
  for (int k = 0; k < 20; ++k) {
    const Graph g = random_connected(rng);
    const double tau = std::pow(10.0, log_tau(rng));
    const Mat e = incidence<double>(g);
    const Mat l = laplacian<double>(g);
    incidence_gap = std::max(incidence_gap, (e * e.transpose() - l).cwiseAbs().maxCoeff());
    const Mat lam = lambda_matrix<double>(g, m, tau);
    const Mat q = q_lifted<double>(g, m);
    lambda_min = std::min(lambda_min, min_eigenvalue_symmetric<double>(lam));
    commute = std::max(commute, (q * lam - lam * q).norm());
    const Mat t = change_of_variables<double>(g, m, tau);
    const Mat sr = s_r_matrix<double>(g, m, tau);
    const Mat sp = s_p_matrix<double>(g, m, tau);
    similarity = std::max(similarity, (sr - t * sp * t.inverse()).cwiseAbs().maxCoeff());
    const Mat lm = lift<double>(l, m);
    d2a2 = std::max(d2a2, (q * lm + lm * q - lift<double>(d2_minus_a2<double>(g), m))
                              .cwiseAbs()
                              .maxCoeff());
  }
  o.require(incidence_gap <= kIdentityTolerance, "L = E E^T");
  o.require(lambda_min > 0.0, "Lambda positive definite");
  o.require(commute <= kCommuteTolerance, "Q Lambda = Lambda Q");
  o.require(similarity <= kSimilarityTolerance, "S_r similar to S_p");
  o.require(d2a2 <= kIdentityTolerance, "QL + LQ = D^2 - A^2");
  o.detail << " 20 graphs: |EE^T-L|=" << incidence_gap << ", min eig Lambda=" << lambda_min
           << ", |QL-LQ|=" << commute << ", |S_r-TS_pT^-1|=" << similarity
           << ", |QL+LQ-(D^2-A^2)|=" << d2a2;
  art["criterion_8.csv"] = "incidence,lambda_min,commute,similarity,d2a2\n" +
                           format_real(incidence_gap) + ',' + format_real(lambda_min) + ',' +
                           format_real(commute) + ',' + format_real(similarity) + ',' +
                           format_real(d2a2) + '\n';
  return o;
}

Outcome criterion_9(Artifacts& art) {
  Outcome o;
  ExperimentConfig c;
  c.graph_spec = "er:10:0.4:42";
  c.cost_spec = "logistic:3:10:0.1:42";
  c.steps = kLongHorizon;
  c.accuracy_b = kB;
  c.scheme_spec = "mid:tau=3.78";
  const RunTrace mid = run(c);
  c.scheme_spec = "gt:tau=0.05";
  const RunTrace gt = run(c);
  art["criterion_9_mid.csv"] = trace_csv(mid);
  art["criterion_9_gt.csv"] = trace_csv(gt);
  const auto k_mid = k_b(mid, kB);
  const auto k_gt = k_b(gt, kB);
  o.require(k_mid.has_value(), "mid did not reach B");
  o.require(k_gt.has_value(), "gradient tracking did not reach B");
  o.require(k_mid && k_gt && *k_mid < *k_gt, "mid K_B not below gradient tracking K_B");
  o.detail << " K_B mid(3.78)=" << k_b_text(k_mid) << ", K_B gt(0.05)=" << k_b_text(k_gt);
  return o;
}

struct Criterion {
  int id;
  std::string title;
  std::function<Outcome(Artifacts&, std::vector<AuditRow>&)> body;
};

std::vector<Criterion> criteria() {
  return {
      {1, "parameter-free convergence", [](Artifacts& a, auto& au) { return criterion_1(a, au); }},
      {2, "euler instability contrast", [](Artifacts& a, auto&) { return criterion_2(a); }},
      {3, "sweep shape", [](Artifacts& a, auto&) { return criterion_3(a); }},
      {4, "certificate suite", [](Artifacts& a, auto& au) { return criterion_4(a, au); }},
      {5, "lyapunov decrease audit", [](Artifacts& a, auto& au) { return criterion_5(a, au); }},
      {6, "discrete-gradient identities", [](Artifacts& a, auto&) { return criterion_6(a); }},
      {7, "mid correctness oracles", [](Artifacts& a, auto&) { return criterion_7(a); }},
      {8, "matrix identities", [](Artifacts& a, auto&) { return criterion_8(a); }},
      {9, "logistic end-to-end", [](Artifacts& a, auto&) { return criterion_9(a); }},
  };
}

}  // namespace

int main() {
  bool all = true;
  auto print = [&](int id, const std::string& title, const Outcome& o) {
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << id << " (" << title << "):"
              << o.detail.str() << std::endl;
    all = all && o.pass;
  };

  Artifacts first;
  std::vector<AuditRow> audits;
  for (const auto& c : criteria()) {
    Outcome o;
    try {
      o = c.body(first, audits);
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    print(c.id, c.title, o);
  }

  Outcome determinism;
  try {
    Artifacts second;
    std::vector<AuditRow> audits2;
    for (const auto& c : criteria()) c.body(second, audits2);
    for (const auto& [name, text] : first) {
      const auto it = second.find(name);
      determinism.require(it != second.end() && it->second == text, name + " differs");
    }
    determinism.require(first.size() == second.size(), "artifact sets differ");
    determinism.detail << " " << first.size() << " CSV outputs compared byte for byte";
  } catch (const std::exception& e) {
    determinism.require(false, std::string("exception: ") + e.what());
  }
  print(10, "determinism", determinism);
  return all ? 0 : 1;
}
