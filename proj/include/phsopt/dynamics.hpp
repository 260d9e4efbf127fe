#pragma once

#include <utility>

#include "phsopt/costs.hpp"
#include "phsopt/graph.hpp"
#include "phsopt/numerics.hpp"

namespace phsopt {

/// Stacked per-agent states x_i = [q_i; p_i], stored as two stacked
/// m-vectors q = [q_1; …; q_N] and p = [p_1; …; p_N].
template <typename Scalar = double>
class NetworkState {
 public:
  NetworkState() = default;
  NetworkState(int agents, int dim)
      : agents_(agents), dim_(dim),
        q_(Vector<Scalar>::Zero(agents * dim)), p_(Vector<Scalar>::Zero(agents * dim)) {}
  NetworkState(int agents, int dim, Vector<Scalar> q, Vector<Scalar> p)
      : agents_(agents), dim_(dim), q_(std::move(q)), p_(std::move(p)) {
    if (q_.size() != agents * dim || p_.size() != agents * dim) {
      throw DimensionMismatch("NetworkState: stacked vectors have the wrong length");
    }
  }

  int agents() const { return agents_; }
  int dim() const { return dim_; }

  const Vector<Scalar>& q() const { return q_; }
  const Vector<Scalar>& p() const { return p_; }
  Vector<Scalar>& q() { return q_; }
  Vector<Scalar>& p() { return p_; }

  auto q(int i) const { return q_.segment(i * dim_, dim_); }
  auto p(int i) const { return p_.segment(i * dim_, dim_); }
  auto q(int i) { return q_.segment(i * dim_, dim_); }
  auto p(int i) { return p_.segment(i * dim_, dim_); }

  /// Interleaved layout [x_1; …; x_N] with x_i = [q_i; p_i].
  Vector<Scalar> stacked() const {
    Vector<Scalar> x(2 * agents_ * dim_);
    for (int i = 0; i < agents_; ++i) {
      x.segment(2 * i * dim_, dim_) = q(i);
      x.segment((2 * i + 1) * dim_, dim_) = p(i);
    }
    return x;
  }

  static NetworkState from_stacked(int agents, int dim, const Vector<Scalar>& x) {
    if (x.size() != 2 * agents * dim) {
      throw DimensionMismatch("NetworkState::from_stacked: wrong length");
    }
    NetworkState s(agents, dim);
    for (int i = 0; i < agents; ++i) {
      s.q(i) = x.segment(2 * i * dim, dim);
      s.p(i) = x.segment((2 * i + 1) * dim, dim);
    }
    return s;
  }

  /// ‖[q; p]‖.
  Scalar norm() const { return std::sqrt(q_.squaredNorm() + p_.squaredNorm()); }
  bool finite() const { return q_.allFinite() && p_.allFinite(); }

 private:
  int agents_ = 0;
  int dim_ = 0;
  Vector<Scalar> q_;
  Vector<Scalar> p_;
};

/// The PHS instantiation used throughout: F_i = 0, H_i(x) = xᵀx/2,
/// φ_i(x) = [-∇f_i(q); 0] and M = [[-1, -1], [1, 0]] ⊗ I_m.
template <typename Scalar = double>
struct PhsDesign {
  int dim;
  Matrix<Scalar> coupling;  // M, 2m × 2m

  explicit PhsDesign(int m) : dim(m) {
    Matrix<Scalar> base(2, 2);
    base << Scalar(-1), Scalar(-1), Scalar(1), Scalar(0);
    coupling = lift<Scalar>(base, m);
    if (max_eigenvalue_symmetric<Scalar>(symmetric_part<Scalar>(coupling)) > Scalar(1e-12)) {
      throw InvalidArgument("PhsDesign: M + Mᵀ must be negative semidefinite");
    }
  }

  /// F + L ⊗ M for the whole network (F = 0).
  Matrix<Scalar> interconnection(const Graph& g) const {
    return kron<Scalar>(laplacian<Scalar>(g), coupling);
  }
};

namespace detail {

template <typename Scalar>
void check_shapes(const NetworkState<Scalar>& x, const CostEnsemble<Scalar>& costs,
                  const Graph& g) {
  if (x.agents() != g.size() || costs.agents() != g.size()) {
    throw DimensionMismatch("state, costs and graph disagree on the agent count");
  }
  if (x.dim() != costs.dim()) {
    throw DimensionMismatch("state and costs disagree on the dimension m");
  }
}

}  // namespace detail

/// Continuous-time vector field, agent by agent:
///   q̇_i = -Σ_{j∈N_i}(q_i - q_j) - Σ_{j∈N_i}(p_i - p_j) - ∇f_i(q_i)
///   ṗ_i =  Σ_{j∈N_i}(q_i - q_j)
template <typename Scalar>
NetworkState<Scalar> continuous_rhs(const NetworkState<Scalar>& x,
                                    const CostEnsemble<Scalar>& costs, const Graph& g) {
  detail::check_shapes(x, costs, g);
  NetworkState<Scalar> dx(x.agents(), x.dim());
  for (int i = 0; i < g.size(); ++i) {
    Vector<Scalar> dq = Vector<Scalar>::Zero(x.dim());
    Vector<Scalar> dp = Vector<Scalar>::Zero(x.dim());
    for (int j : g.neighbors(i)) {
      dq += x.q(i) - x.q(j);
      dp += x.p(i) - x.p(j);
    }
    dx.q(i) = -dq - dp - gradient<Scalar>(costs[i], Vector<Scalar>(x.q(i)));
    dx.p(i) = dq;
  }
  return dx;
}

/// Same vector field through the compact network form ẋ = (F + L⊗M)∇H(x) + φ(∇H(x)).
template <typename Scalar>
NetworkState<Scalar> continuous_rhs_compact(const NetworkState<Scalar>& x,
                                            const CostEnsemble<Scalar>& costs, const Graph& g) {
  detail::check_shapes(x, costs, g);
  const PhsDesign<Scalar> design(x.dim());
  const Vector<Scalar> grad_h = x.stacked();  // ∇H(x) = x for H = xᵀx/2
  Vector<Scalar> xdot = design.interconnection(g) * grad_h;
  const int m = x.dim();
  for (int i = 0; i < g.size(); ++i) {
    xdot.segment(2 * i * m, m) -= gradient<Scalar>(costs[i], Vector<Scalar>(x.q(i)));
  }
  return NetworkState<Scalar>::from_stacked(x.agents(), m, xdot);
}

template <typename Scalar>
struct OptimalityResidual {
  Scalar gradient;   // ‖Σ_i ∇f_i(q_i)‖
  Scalar consensus;  // ‖(L ⊗ I_m) q‖
};

template <typename Scalar>
OptimalityResidual<Scalar> optimality_residual(const NetworkState<Scalar>& x,
                                               const CostEnsemble<Scalar>& costs, const Graph& g) {
  detail::check_shapes(x, costs, g);
  Vector<Scalar> grad_sum = Vector<Scalar>::Zero(x.dim());
  for (int i = 0; i < g.size(); ++i) {
    grad_sum += gradient<Scalar>(costs[i], Vector<Scalar>(x.q(i)));
  }
  const Vector<Scalar> lq = lift<Scalar>(laplacian<Scalar>(g), x.dim()) * x.q();
  return {grad_sum.norm(), lq.norm()};
}

/// ‖q - 1 ⊗ θ*‖, the consensus-optimality error.
template <typename Scalar>
Scalar consensus_error(const Vector<Scalar>& q, const Vector<Scalar>& theta_star) {
  const int m = static_cast<int>(theta_star.size());
  Scalar acc(0);
  for (Eigen::Index i = 0; i < q.size() / m; ++i) {
    acc += (q.segment(i * m, m) - theta_star).squaredNorm();
  }
  return std::sqrt(acc);
}

/// Bregman distance of H(x) = xᵀx/2, which is ‖x - x*‖²/2.
template <typename Scalar>
Scalar bregman_lyapunov(const NetworkState<Scalar>& x, const NetworkState<Scalar>& equilibrium) {
  if (x.agents() != equilibrium.agents() || x.dim() != equilibrium.dim()) {
    throw DimensionMismatch("bregman_lyapunov: states disagree in shape");
  }
  return Scalar(0.5) * ((x.q() - equilibrium.q()).squaredNorm() +
                        (x.p() - equilibrium.p()).squaredNorm());
}

/// Ḣ - yᵀφ along the network flow, i.e. ∇Hᵀ(F + L⊗M)∇H. Never positive.
template <typename Scalar>
Scalar passivity_check(const NetworkState<Scalar>& x, const CostEnsemble<Scalar>& costs,
                       const Graph& g) {
  detail::check_shapes(x, costs, g);
  const Vector<Scalar> grad_h = x.stacked();
  return grad_h.dot(PhsDesign<Scalar>(x.dim()).interconnection(g) * grad_h);
}

/// p* with L p* = -∇f(1 ⊗ θ*) and agent-average `p_mean`.
///
/// The equilibrium p is only fixed up to the kernel of L; the average picks
/// the representative.
template <typename Scalar>
Vector<Scalar> equilibrium_p(const CostEnsemble<Scalar>& costs, const Graph& g,
                             const Vector<Scalar>& theta_star, const Vector<Scalar>& p_mean) {
  const int n = g.size();
  const int m = costs.dim();
  Vector<Scalar> rhs(n * m);
  for (int i = 0; i < n; ++i) rhs.segment(i * m, m) = -gradient<Scalar>(costs[i], theta_star);
  // (L + 11ᵀ/N) is invertible on a connected graph and maps 1⊥ onto itself.
  Matrix<Scalar> shifted = laplacian<Scalar>(g);
  shifted.array() += Scalar(1) / Scalar(n);
  Vector<Scalar> p = solve_linear<Scalar>(lift<Scalar>(shifted, m), rhs);
  for (int i = 0; i < n; ++i) p.segment(i * m, m) += p_mean;
  return p;
}

template <typename Scalar>
Vector<Scalar> agent_mean(const Vector<Scalar>& stacked, int m) {
  const Eigen::Index n = stacked.size() / m;
  Vector<Scalar> mean = Vector<Scalar>::Zero(m);
  for (Eigen::Index i = 0; i < n; ++i) mean += stacked.segment(i * m, m);
  return mean / Scalar(n);
}

/// Equilibrium reached by the continuous flow (and by forward Euler), which
/// both conserve Σ_i p_i.
template <typename Scalar>
NetworkState<Scalar> continuous_equilibrium(const NetworkState<Scalar>& initial,
                                            const CostEnsemble<Scalar>& costs, const Graph& g,
                                            const Vector<Scalar>& theta_star) {
  const int m = costs.dim();
  NetworkState<Scalar> eq(g.size(), m);
  for (int i = 0; i < g.size(); ++i) eq.q(i) = theta_star;
  eq.p() = equilibrium_p<Scalar>(costs, g, theta_star, agent_mean<Scalar>(initial.p(), m));
  return eq;
}

}  // namespace phsopt
