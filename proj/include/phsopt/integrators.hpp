#pragma once

#include <string>
#include <vector>

#include "phsopt/dynamics.hpp"

namespace phsopt {

enum class SchemeKind { Euler, DiscreteGradientCentral, Mid, GradientTracking };

std::string to_string(SchemeKind kind);

struct Scheme {
  SchemeKind kind = SchemeKind::Mid;
  double tau = 1.0;
  SolverSettings solver{};

  void validate() const {
    if (!(tau > 0.0)) throw InvalidArgument("scheme step size tau must be positive");
    solver.validate();
  }
};

/// Parses "euler:tau=0.5", "dg:tau=1", "mid:tau=3.78" or "gt:tau=0.05".
Scheme parse_scheme_spec(const std::string& spec);

template <typename Scalar = double>
struct StepReport {
  NetworkState<Scalar> next;
  std::vector<int> newton_iterations;  // one entry per agent (one total for dg)
  Scalar max_residual = Scalar(0);

  int max_newton_iterations() const {
    int best = 0;
    for (int k : newton_iterations) best = std::max(best, k);
    return best;
  }
};

namespace detail {

inline void require_positive_tau(double tau) {
  if (!(tau > 0.0)) throw InvalidArgument("tau must be positive");
}

}  // namespace detail

/// x⁺ = x + τ ẋ(x).
template <typename Scalar>
NetworkState<Scalar> euler_step(const NetworkState<Scalar>& x, const CostEnsemble<Scalar>& costs,
                                const Graph& g, Scalar tau) {
  detail::require_positive_tau(double(tau));
  const NetworkState<Scalar> dx = continuous_rhs<Scalar>(x, costs, g);
  return NetworkState<Scalar>(x.agents(), x.dim(), x.q() + tau * dx.q(), x.p() + tau * dx.p());
}

/// Discrete-gradient step solved jointly for every agent:
///   (x⁺ - x)/τ = (L⊗M) x̄ + φ(x̄),   x̄ = (x + x⁺)/2.
/// Needs a central solver since each row couples neighbours' x⁺.
template <typename Scalar>
StepReport<Scalar> dg_central_step(const NetworkState<Scalar>& x, const CostEnsemble<Scalar>& costs,
                                   const Graph& g, Scalar tau, const SolverSettings& solver = {}) {
  detail::require_positive_tau(double(tau));
  detail::check_shapes(x, costs, g);
  const int n = g.size();
  const int m = x.dim();
  const Matrix<Scalar> coupling = PhsDesign<Scalar>(m).interconnection(g);
  const Vector<Scalar> x0 = x.stacked();

  auto residual = [&](const Vector<Scalar>& y) {
    const Vector<Scalar> mid = (x0 + y) / Scalar(2);
    Vector<Scalar> field = coupling * mid;
    for (int i = 0; i < n; ++i) {
      field.segment(2 * i * m, m) -=
          gradient<Scalar>(costs[i], Vector<Scalar>(mid.segment(2 * i * m, m)));
    }
    return Vector<Scalar>((y - x0) - tau * field);
  };
  auto jacobian = [&](const Vector<Scalar>& y) {
    const Vector<Scalar> mid = (x0 + y) / Scalar(2);
    Matrix<Scalar> jac = Matrix<Scalar>::Identity(y.size(), y.size()) - (tau / Scalar(2)) * coupling;
    for (int i = 0; i < n; ++i) {
      jac.block(2 * i * m, 2 * i * m, m, m) +=
          (tau / Scalar(2)) * hessian<Scalar>(costs[i], Vector<Scalar>(mid.segment(2 * i * m, m)));
    }
    return jac;
  };

  const auto sol = newton_solve<Scalar>(residual, jacobian, x0, solver);
  StepReport<Scalar> report;
  report.next = NetworkState<Scalar>::from_stacked(n, m, sol.x);
  report.newton_iterations = {sol.iterations};
  report.max_residual = sol.residual_norm;
  return report;
}

/// Local data agent i needs for its MID update, built from its own state and
/// its neighbours' current states only.
template <typename Scalar>
struct MidLocalProblem {
  Scalar gain;           // G_i = 1/τ + |N_i| + τ|N_i|²
  Vector<Scalar> shift;  // c_i
  Vector<Scalar> q;      // q_i
  Vector<Scalar> neighbor_q_sum;
  int degree;
};

/// Substituting p_i⁺ = p_i + τ(|N_i| q_i⁺ - Σ_j q_j) into the q-row of the MID
/// update leaves G_i q_i⁺ + ∇f_i((q_i⁺ + q_i)/2) + c_i = 0 with
///   c_i = -q_i/τ - (1 + τ|N_i|) Σ_j q_j + |N_i| p_i - Σ_j p_j.
template <typename Scalar>
MidLocalProblem<Scalar> mid_local_problem(const NetworkState<Scalar>& x, const Graph& g, int i,
                                          Scalar tau) {
  const int m = x.dim();
  const int d = g.degree(i);
  Vector<Scalar> sum_q = Vector<Scalar>::Zero(m);
  Vector<Scalar> sum_p = Vector<Scalar>::Zero(m);
  for (int j : g.neighbors(i)) {
    sum_q += x.q(j);
    sum_p += x.p(j);
  }
  MidLocalProblem<Scalar> lp;
  const Scalar deg = Scalar(d);
  lp.gain = Scalar(1) / tau + deg + tau * deg * deg;
  lp.shift = -x.q(i) / tau - (Scalar(1) + tau * deg) * sum_q + deg * x.p(i) - sum_p;
  lp.q = x.q(i);
  lp.neighbor_q_sum = sum_q;
  lp.degree = d;
  return lp;
}

/// One step of the mixed implicit discretization,
///   (q_i⁺ - q_i)/τ = -Σ_j (q_i⁺ - q_j + p_i⁺ - p_j) - ∇f_i((q_i⁺ + q_i)/2)
///   (p_i⁺ - p_i)/τ =  Σ_j (q_i⁺ - q_j),
/// where every agent solves only for its own next state.
template <typename Scalar>
StepReport<Scalar> mid_step(const NetworkState<Scalar>& x, const CostEnsemble<Scalar>& costs,
                            const Graph& g, Scalar tau, const SolverSettings& solver = {}) {
  detail::require_positive_tau(double(tau));
  detail::check_shapes(x, costs, g);
  const int m = x.dim();
  StepReport<Scalar> report;
  report.next = NetworkState<Scalar>(x.agents(), m);
  report.newton_iterations.resize(g.size());
  for (int i = 0; i < g.size(); ++i) {
    const MidLocalProblem<Scalar> lp = mid_local_problem<Scalar>(x, g, i, tau);
    const auto& cost = costs[i];
    // Divided through by G_i so the residual is measured in units of q.
    auto residual = [&](const Vector<Scalar>& z) {
      return Vector<Scalar>(z + (gradient<Scalar>(cost, Vector<Scalar>((z + lp.q) / Scalar(2))) +
                                 lp.shift) /
                                    lp.gain);
    };
    auto jacobian = [&](const Vector<Scalar>& z) {
      Matrix<Scalar> jac = hessian<Scalar>(cost, Vector<Scalar>((z + lp.q) / Scalar(2))) /
                           (Scalar(2) * lp.gain);
      jac.diagonal().array() += Scalar(1);
      return jac;
    };
    NewtonResult<Scalar> sol;
    try {
      sol = newton_solve<Scalar>(residual, jacobian, lp.q, solver);
    } catch (const MaxIterationsExceeded& e) {
      throw AgentSolveFailed(i, e);
    }
    report.next.q(i) = sol.x;
    report.next.p(i) = x.p(i) + tau * (Scalar(lp.degree) * sol.x - lp.neighbor_q_sum);
    report.newton_iterations[i] = sol.iterations;
    report.max_residual = std::max(report.max_residual, sol.residual_norm);
  }
  return report;
}

/// Fixed point reached by MID from `initial`.
///
/// MID conserves Σ_i (p_i - τ|N_i| q_i), so the limit is q* = 1 ⊗ θ* together
/// with the p* solving L p* = -∇f(q*) whose average matches that invariant.
template <typename Scalar>
NetworkState<Scalar> mid_equilibrium(const NetworkState<Scalar>& initial,
                                     const CostEnsemble<Scalar>& costs, const Graph& g,
                                     Scalar tau, const Vector<Scalar>& theta_star) {
  detail::require_positive_tau(double(tau));
  const int n = g.size();
  const int m = costs.dim();
  Vector<Scalar> invariant = Vector<Scalar>::Zero(m);
  Scalar degree_sum(0);
  for (int i = 0; i < n; ++i) {
    invariant += initial.p(i) - tau * Scalar(g.degree(i)) * initial.q(i);
    degree_sum += Scalar(g.degree(i));
  }
  const Vector<Scalar> p_mean = (invariant + tau * degree_sum * theta_star) / Scalar(n);
  NetworkState<Scalar> eq(n, m);
  for (int i = 0; i < n; ++i) eq.q(i) = theta_star;
  eq.p() = equilibrium_p<Scalar>(costs, g, theta_star, p_mean);
  return eq;
}

/// Doubly stochastic Metropolis weights: w_ij = 1/(1 + max(d_i, d_j)) on
/// edges, the diagonal takes the remainder.
template <typename Scalar = double>
Matrix<Scalar> metropolis_weights(const Graph& g) {
  Matrix<Scalar> w = Matrix<Scalar>::Zero(g.size(), g.size());
  for (const auto& [i, j] : g.edges()) {
    const Scalar wij = Scalar(1) / Scalar(1 + std::max(g.degree(i), g.degree(j)));
    w(i, j) = wij;
    w(j, i) = wij;
  }
  for (int i = 0; i < g.size(); ++i) w(i, i) = Scalar(1) - w.row(i).sum();
  return w;
}

/// Gradient-tracking baseline state: estimates q_i and trackers g_i of the
/// average gradient.
template <typename Scalar = double>
struct TrackingState {
  Vector<Scalar> q;
  Vector<Scalar> tracker;
};

template <typename Scalar>
Vector<Scalar> stacked_gradients(const Vector<Scalar>& q, const CostEnsemble<Scalar>& costs) {
  const int m = costs.dim();
  Vector<Scalar> out(q.size());
  for (int i = 0; i < costs.agents(); ++i) {
    out.segment(i * m, m) = gradient<Scalar>(costs[i], Vector<Scalar>(q.segment(i * m, m)));
  }
  return out;
}

template <typename Scalar>
TrackingState<Scalar> gradient_tracking_init(const Vector<Scalar>& q,
                                             const CostEnsemble<Scalar>& costs) {
  return {q, stacked_gradients<Scalar>(q, costs)};
}

///   q_i⁺ = Σ_j w_ij q_j - τ g_i
///   g_i⁺ = Σ_j w_ij g_j + ∇f_i(q_i⁺) - ∇f_i(q_i)
template <typename Scalar>
TrackingState<Scalar> gradient_tracking_step(const TrackingState<Scalar>& s,
                                             const CostEnsemble<Scalar>& costs, const Graph& g,
                                             Scalar tau) {
  detail::require_positive_tau(double(tau));
  const int m = costs.dim();
  const Matrix<Scalar> w = metropolis_weights<Scalar>(g);
  TrackingState<Scalar> next{Vector<Scalar>::Zero(s.q.size()), Vector<Scalar>::Zero(s.q.size())};
  for (int i = 0; i < g.size(); ++i) {
    next.q.segment(i * m, m) = w(i, i) * s.q.segment(i * m, m) - tau * s.tracker.segment(i * m, m);
    next.tracker.segment(i * m, m) = w(i, i) * s.tracker.segment(i * m, m);
    for (int j : g.neighbors(i)) {
      next.q.segment(i * m, m) += w(i, j) * s.q.segment(j * m, m);
      next.tracker.segment(i * m, m) += w(i, j) * s.tracker.segment(j * m, m);
    }
  }
  next.tracker += stacked_gradients<Scalar>(next.q, costs) - stacked_gradients<Scalar>(s.q, costs);
  return next;
}

}  // namespace phsopt
