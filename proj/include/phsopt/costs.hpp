#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "phsopt/numerics.hpp"

namespace phsopt {

/// f(θ) = θᵀHθ/2 + bᵀθ with H symmetric positive definite.
template <typename Scalar = double>
struct QuadraticCost {
  Matrix<Scalar> hessian;
  Vector<Scalar> linear;

  QuadraticCost(Matrix<Scalar> h, Vector<Scalar> b) : hessian(std::move(h)), linear(std::move(b)) {
    require_square(hessian, "QuadraticCost: H");
    if (hessian.rows() != linear.size()) {
      throw DimensionMismatch("QuadraticCost: H and b disagree in size");
    }
    require_finite(hessian, "QuadraticCost: H");
    require_finite(linear, "QuadraticCost: b");
    if (!(min_eigenvalue_symmetric<Scalar>(hessian) > Scalar(0))) {
      throw InvalidArgument("QuadraticCost: H must be positive definite");
    }
  }

  int dim() const { return static_cast<int>(linear.size()); }
};

/// Regularised logistic loss over labelled points,
///
///   f(θ) = Σ_k log(1 + exp(-l_k (θ̃ᵀ m_k + θ_b))) + C‖θ‖² / (2N),
///
/// with θ = [θ̃; θ_b]. Points are stored augmented with a trailing 1 so the
/// bias is the last coordinate.
template <typename Scalar = double>
struct LogisticCost {
  Matrix<Scalar> features;  // d × m, rows are [m_k, 1]
  Vector<Scalar> labels;    // ±1
  Scalar regularizer;       // C
  int agent_count;          // N

  LogisticCost(const Matrix<Scalar>& points, Vector<Scalar> labels_in, Scalar c, int n_agents)
      : labels(std::move(labels_in)), regularizer(c), agent_count(n_agents) {
    if (points.rows() < 1) throw InvalidArgument("LogisticCost: needs at least one point");
    if (points.rows() != labels.size()) {
      throw DimensionMismatch("LogisticCost: points and labels disagree in count");
    }
    if (!(c > Scalar(0))) throw InvalidArgument("LogisticCost: C must be positive");
    if (n_agents < 1) throw InvalidArgument("LogisticCost: agent count must be positive");
    for (Eigen::Index k = 0; k < labels.size(); ++k) {
      if (labels(k) != Scalar(1) && labels(k) != Scalar(-1)) {
        throw InvalidArgument("LogisticCost: labels must be +1 or -1");
      }
    }
    require_finite(points, "LogisticCost: points");
    features.resize(points.rows(), points.cols() + 1);
    features.leftCols(points.cols()) = points;
    features.col(points.cols()).setOnes();
  }

  int dim() const { return static_cast<int>(features.cols()); }
  Scalar ridge() const { return regularizer / Scalar(agent_count); }
};

template <typename Scalar = double>
using LocalCost = std::variant<QuadraticCost<Scalar>, LogisticCost<Scalar>>;

namespace detail {

// log(1 + exp(x)) without overflow.
template <typename Scalar>
Scalar softplus(Scalar x) {
  using std::exp;
  using std::log1p;
  return x > Scalar(0) ? x + log1p(exp(-x)) : log1p(exp(x));
}

template <typename Scalar>
Scalar sigmoid(Scalar x) {
  using std::exp;
  if (x >= Scalar(0)) return Scalar(1) / (Scalar(1) + exp(-x));
  const Scalar e = exp(x);
  return e / (Scalar(1) + e);
}

template <typename Scalar>
void check_dim(int expected, const Vector<Scalar>& theta) {
  if (theta.size() != expected) {
    throw DimensionMismatch("cost evaluated at a point of the wrong dimension");
  }
}

}  // namespace detail

template <typename Scalar>
int dimension(const LocalCost<Scalar>& cost) {
  return std::visit([](const auto& c) { return c.dim(); }, cost);
}

template <typename Scalar>
Scalar value(const QuadraticCost<Scalar>& c, const Vector<Scalar>& theta) {
  detail::check_dim(c.dim(), theta);
  return Scalar(0.5) * theta.dot(c.hessian * theta) + c.linear.dot(theta);
}

template <typename Scalar>
Vector<Scalar> gradient(const QuadraticCost<Scalar>& c, const Vector<Scalar>& theta) {
  detail::check_dim(c.dim(), theta);
  return c.hessian * theta + c.linear;
}

template <typename Scalar>
Matrix<Scalar> hessian(const QuadraticCost<Scalar>& c, const Vector<Scalar>& theta) {
  detail::check_dim(c.dim(), theta);
  return c.hessian;
}

template <typename Scalar>
Scalar value(const LogisticCost<Scalar>& c, const Vector<Scalar>& theta) {
  detail::check_dim(c.dim(), theta);
  const Vector<Scalar> margins = c.labels.cwiseProduct(c.features * theta);
  Scalar total(0);
  for (Eigen::Index k = 0; k < margins.size(); ++k) total += detail::softplus<Scalar>(-margins(k));
  return total + Scalar(0.5) * c.ridge() * theta.squaredNorm();
}

template <typename Scalar>
Vector<Scalar> gradient(const LogisticCost<Scalar>& c, const Vector<Scalar>& theta) {
  detail::check_dim(c.dim(), theta);
  const Vector<Scalar> margins = c.labels.cwiseProduct(c.features * theta);
  Vector<Scalar> weights(margins.size());
  for (Eigen::Index k = 0; k < margins.size(); ++k) {
    weights(k) = -c.labels(k) * detail::sigmoid<Scalar>(-margins(k));
  }
  return c.features.transpose() * weights + c.ridge() * theta;
}

template <typename Scalar>
Matrix<Scalar> hessian(const LogisticCost<Scalar>& c, const Vector<Scalar>& theta) {
  detail::check_dim(c.dim(), theta);
  const Vector<Scalar> margins = c.features * theta;
  Vector<Scalar> curvature(margins.size());
  for (Eigen::Index k = 0; k < margins.size(); ++k) {
    const Scalar s = detail::sigmoid<Scalar>(margins(k));
    curvature(k) = s * (Scalar(1) - s);
  }
  Matrix<Scalar> h = c.features.transpose() * curvature.asDiagonal() * c.features;
  h.diagonal().array() += c.ridge();
  return symmetric_part<Scalar>(h);
}

template <typename Scalar>
Scalar value(const LocalCost<Scalar>& cost, const Vector<Scalar>& theta) {
  return std::visit([&](const auto& c) { return value<Scalar>(c, theta); }, cost);
}

template <typename Scalar>
Vector<Scalar> gradient(const LocalCost<Scalar>& cost, const Vector<Scalar>& theta) {
  return std::visit([&](const auto& c) { return gradient<Scalar>(c, theta); }, cost);
}

template <typename Scalar>
Matrix<Scalar> hessian(const LocalCost<Scalar>& cost, const Vector<Scalar>& theta) {
  return std::visit([&](const auto& c) { return hessian<Scalar>(c, theta); }, cost);
}

template <typename Scalar = double>
struct CurvatureBounds {
  Scalar mu;
  Scalar lipschitz;
};

/// Strong-convexity and gradient-Lipschitz constants valid for every agent.
///
/// Quadratic costs use the extreme eigenvalues of the H_i. Logistic costs use
/// the ridge C/N as the convexity floor and C/N + λmax(Σ z zᵀ)/4 as the
/// Lipschitz bound, since the sigmoid derivative never exceeds 1/4.
template <typename Scalar>
CurvatureBounds<Scalar> ensemble_constants(const std::vector<LocalCost<Scalar>>& costs) {
  if (costs.empty()) throw InvalidArgument("ensemble_constants: no costs");
  Scalar mu = std::numeric_limits<Scalar>::infinity();
  Scalar lip(0);
  for (const auto& cost : costs) {
    if (const auto* q = std::get_if<QuadraticCost<Scalar>>(&cost)) {
      const Vector<Scalar> ev = eigenvalues_symmetric<Scalar>(q->hessian);
      mu = std::min(mu, ev(0));
      lip = std::max(lip, ev(ev.size() - 1));
    } else {
      const auto& l = std::get<LogisticCost<Scalar>>(cost);
      const Matrix<Scalar> gram = l.features.transpose() * l.features;
      mu = std::min(mu, l.ridge());
      lip = std::max(lip, l.ridge() + Scalar(0.25) * max_eigenvalue_symmetric<Scalar>(
                                                           symmetric_part<Scalar>(gram)));
    }
  }
  return {mu, lip};
}

/// Per-agent local costs sharing one dimension m, with certified curvature
/// bounds computed at construction.
template <typename Scalar = double>
class CostEnsemble {
 public:
  explicit CostEnsemble(std::vector<LocalCost<Scalar>> costs) : costs_(std::move(costs)) {
    if (costs_.empty()) throw InvalidArgument("CostEnsemble: needs at least one cost");
    dim_ = dimension<Scalar>(costs_.front());
    for (const auto& c : costs_) {
      if (dimension<Scalar>(c) != dim_) {
        throw DimensionMismatch("CostEnsemble: costs must share one dimension");
      }
    }
    bounds_ = ensemble_constants<Scalar>(costs_);
  }

  int agents() const { return static_cast<int>(costs_.size()); }
  int dim() const { return dim_; }
  Scalar mu() const { return bounds_.mu; }
  Scalar lipschitz() const { return bounds_.lipschitz; }
  const LocalCost<Scalar>& operator[](int i) const { return costs_.at(i); }
  const std::vector<LocalCost<Scalar>>& costs() const { return costs_; }

  bool is_quadratic() const {
    for (const auto& c : costs_) {
      if (!std::holds_alternative<QuadraticCost<Scalar>>(c)) return false;
    }
    return true;
  }

  /// The H_i of a fully quadratic ensemble.
  std::vector<Matrix<Scalar>> hessians() const {
    std::vector<Matrix<Scalar>> out;
    for (const auto& c : costs_) {
      const auto* q = std::get_if<QuadraticCost<Scalar>>(&c);
      if (q == nullptr) throw NonQuadraticCost("ensemble contains a non-quadratic cost");
      out.push_back(q->hessian);
    }
    return out;
  }

  Scalar total_value(const Vector<Scalar>& theta) const {
    Scalar v(0);
    for (const auto& c : costs_) v += value<Scalar>(c, theta);
    return v;
  }

  Vector<Scalar> total_gradient(const Vector<Scalar>& theta) const {
    Vector<Scalar> g = Vector<Scalar>::Zero(dim_);
    for (const auto& c : costs_) g += gradient<Scalar>(c, theta);
    return g;
  }

  Matrix<Scalar> total_hessian(const Vector<Scalar>& theta) const {
    Matrix<Scalar> h = Matrix<Scalar>::Zero(dim_, dim_);
    for (const auto& c : costs_) h += hessian<Scalar>(c, theta);
    return h;
  }

 private:
  std::vector<LocalCost<Scalar>> costs_;
  int dim_ = 0;
  CurvatureBounds<Scalar> bounds_{};
};

/// Minimiser of Σ_i f_i by damped Newton on the summed gradient.
template <typename Scalar>
Vector<Scalar> centralized_optimum(const CostEnsemble<Scalar>& ensemble, Scalar tol = Scalar(1e-12),
                                   int max_iterations = 100) {
  if (!(tol > Scalar(0))) throw InvalidArgument("centralized_optimum: tol must be positive");
  SolverSettings settings;
  settings.residual_tolerance = double(tol);
  settings.max_iterations = max_iterations;
  return newton_solve<Scalar>([&](const Vector<Scalar>& t) { return ensemble.total_gradient(t); },
                              [&](const Vector<Scalar>& t) { return ensemble.total_hessian(t); },
                              Vector<Scalar>::Zero(ensemble.dim()), settings)
      .x;
}

/// N random quadratic costs: H_i = R diag(λ) Rᵀ with R a random orthogonal
/// matrix and λ uniform in [0.5, 3]; b_i standard normal.
template <typename Scalar = double>
CostEnsemble<Scalar> random_quadratic_ensemble(int agents, int m, std::uint64_t seed,
                                               Scalar eig_lo = Scalar(0.5),
                                               Scalar eig_hi = Scalar(3)) {
  if (agents < 1 || m < 1) throw InvalidArgument("random_quadratic_ensemble: bad sizes");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> eig{double(eig_lo), double(eig_hi)};
  std::vector<LocalCost<Scalar>> costs;
  for (int i = 0; i < agents; ++i) {
    Matrix<Scalar> g(m, m);
    for (int r = 0; r < m; ++r)
      for (int c = 0; c < m; ++c) g(r, c) = Scalar(normal(rng));
    const Matrix<Scalar> rot = Eigen::HouseholderQR<Matrix<Scalar>>(g).householderQ();
    Vector<Scalar> lambda(m);
    for (int k = 0; k < m; ++k) lambda(k) = Scalar(eig(rng));
    Vector<Scalar> b(m);
    for (int k = 0; k < m; ++k) b(k) = Scalar(normal(rng));
    Matrix<Scalar> h = symmetric_part<Scalar>(rot * lambda.asDiagonal() * rot.transpose());
    costs.emplace_back(QuadraticCost<Scalar>(std::move(h), std::move(b)));
  }
  return CostEnsemble<Scalar>(std::move(costs));
}

/// N logistic costs over synthetic data: standard-normal points in R^{m-1},
/// labels from a random hyperplane with 10% of them flipped.
template <typename Scalar = double>
CostEnsemble<Scalar> random_logistic_ensemble(int agents, int m, int points_per_agent, Scalar c,
                                              std::uint64_t seed) {
  if (agents < 1 || m < 2 || points_per_agent < 1) {
    throw InvalidArgument("random_logistic_ensemble: bad sizes (m counts the bias, so m >= 2)");
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::bernoulli_distribution flip(0.1);
  Vector<Scalar> w(m - 1);
  for (int k = 0; k < m - 1; ++k) w(k) = Scalar(normal(rng));
  const Scalar bias = Scalar(normal(rng));
  std::vector<LocalCost<Scalar>> costs;
  for (int i = 0; i < agents; ++i) {
    Matrix<Scalar> pts(points_per_agent, m - 1);
    Vector<Scalar> labels(points_per_agent);
    for (int k = 0; k < points_per_agent; ++k) {
      for (int j = 0; j < m - 1; ++j) pts(k, j) = Scalar(normal(rng));
      Scalar l = pts.row(k).dot(w) + bias >= Scalar(0) ? Scalar(1) : Scalar(-1);
      if (flip(rng)) l = -l;
      labels(k) = l;
    }
    costs.emplace_back(LogisticCost<Scalar>(pts, std::move(labels), c, agents));
  }
  return CostEnsemble<Scalar>(std::move(costs));
}

/// Builds an ensemble from "quadratic:m:seed" or "logistic:m:d:C:seed".
CostEnsemble<double> parse_cost_spec(const std::string& spec, int agents);

}  // namespace phsopt
