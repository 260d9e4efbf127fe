#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include <Eigen/Dense>

#include "phsopt/errors.hpp"

namespace phsopt {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Settings for the damped Newton root finder.
struct SolverSettings {
  double residual_tolerance = 1e-12;
  int max_iterations = 100;
  double damping_shrink = 0.5;

  void validate() const {
    if (!(residual_tolerance > 0.0)) {
      throw InvalidArgument("residual_tolerance must be positive");
    }
    if (max_iterations < 1) {
      throw InvalidArgument("max_iterations must be at least 1");
    }
    if (!(damping_shrink > 0.0 && damping_shrink < 1.0)) {
      throw InvalidArgument("damping_shrink must lie in (0, 1)");
    }
  }
};

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& m) {
  return m.allFinite();
}

template <typename Derived>
void require_finite(const Eigen::MatrixBase<Derived>& m, const char* what) {
  if (!m.allFinite()) {
    throw InvalidArgument(std::string(what) + " contains non-finite entries");
  }
}

template <typename Scalar>
void require_square(const Matrix<Scalar>& a, const char* what) {
  if (a.rows() != a.cols()) {
    throw DimensionMismatch(std::string(what) + " must be square");
  }
}

/// Solves A x = b. Rank deficiency is detected by full pivoting with a
/// relative pivot threshold of 1e-12.
template <typename Scalar>
Vector<Scalar> solve_linear(const Matrix<Scalar>& a, const Vector<Scalar>& b) {
  require_square(a, "solve_linear: A");
  if (a.rows() != b.size()) {
    throw DimensionMismatch("solve_linear: A and b disagree in size");
  }
  if (a.rows() == 0) return Vector<Scalar>();
  Eigen::FullPivLU<Matrix<Scalar>> lu(a);
  lu.setThreshold(Scalar(1e-12));
  if (!lu.isInvertible()) {
    throw SingularMatrix("solve_linear: matrix is singular to working precision");
  }
  return lu.solve(b);
}

/// Inverse of a symmetric positive definite matrix by Cholesky.
template <typename Scalar>
Matrix<Scalar> inverse_spd(const Matrix<Scalar>& a) {
  require_square(a, "inverse_spd: A");
  Eigen::LLT<Matrix<Scalar>> llt(a);
  if (llt.info() != Eigen::Success) {
    throw SingularMatrix("inverse_spd: matrix is not positive definite");
  }
  return llt.solve(Matrix<Scalar>::Identity(a.rows(), a.cols()));
}

namespace detail {

template <typename Scalar>
void require_symmetric(const Matrix<Scalar>& s) {
  require_square(s, "symmetric matrix");
  const Scalar scale = std::max(Scalar(1), s.cwiseAbs().maxCoeff());
  if ((s - s.transpose()).cwiseAbs().maxCoeff() > Scalar(1e-12) * scale) {
    throw NonSymmetric("matrix is not symmetric within 1e-12");
  }
}

template <typename Scalar>
Vector<Scalar> symmetric_eigenvalues(const Matrix<Scalar>& s) {
  require_symmetric(s);
  const Matrix<Scalar> sym = (s + s.transpose()) / Scalar(2);
  Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> solver(sym, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw Error("symmetric eigenvalue iteration did not converge");
  }
  return solver.eigenvalues();
}

}  // namespace detail

/// Ascending eigenvalues of a symmetric matrix.
template <typename Scalar>
Vector<Scalar> eigenvalues_symmetric(const Matrix<Scalar>& s) {
  return detail::symmetric_eigenvalues(s);
}

template <typename Scalar>
Scalar min_eigenvalue_symmetric(const Matrix<Scalar>& s) {
  if (s.rows() == 0) return std::numeric_limits<Scalar>::infinity();
  return detail::symmetric_eigenvalues(s)(0);
}

template <typename Scalar>
Scalar max_eigenvalue_symmetric(const Matrix<Scalar>& s) {
  if (s.rows() == 0) return -std::numeric_limits<Scalar>::infinity();
  const Vector<Scalar> ev = detail::symmetric_eigenvalues(s);
  return ev(ev.size() - 1);
}

template <typename Scalar>
bool is_psd(const Matrix<Scalar>& s, Scalar tol) {
  if (tol < Scalar(0)) throw InvalidArgument("is_psd: tolerance must be non-negative");
  return min_eigenvalue_symmetric(s) >= -tol;
}

/// Induced 2-norm of a symmetric matrix (largest absolute eigenvalue).
template <typename Scalar>
Scalar spectral_norm_symmetric(const Matrix<Scalar>& s) {
  if (s.rows() == 0) return Scalar(0);
  const Vector<Scalar> ev = detail::symmetric_eigenvalues(s);
  return std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
}

template <typename Scalar>
Matrix<Scalar> symmetric_part(const Matrix<Scalar>& a) {
  return (a + a.transpose()) / Scalar(2);
}

template <typename Scalar>
Matrix<Scalar> kron(const Matrix<Scalar>& a, const Matrix<Scalar>& b) {
  Matrix<Scalar> out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

/// A ⊗ I_m, the lift of an agent-level matrix to stacked m-vectors.
template <typename Scalar>
Matrix<Scalar> lift(const Matrix<Scalar>& a, int m) {
  return kron<Scalar>(a, Matrix<Scalar>::Identity(m, m));
}

template <typename Scalar>
struct NewtonResult {
  Vector<Scalar> x;
  int iterations = 0;
  Scalar residual_norm = Scalar(0);
};

/// Damped Newton iteration for residual(x) = 0. Each step is halved (by
/// `damping_shrink`) until the residual norm decreases; if no shrink helps the
/// iterate is at the round-off floor and the full step is kept.
template <typename Scalar, typename Residual, typename Jacobian>
NewtonResult<Scalar> newton_solve(Residual&& residual, Jacobian&& jacobian,
                                  Vector<Scalar> x0, const SolverSettings& settings) {
  settings.validate();
  constexpr int kMaxHalvings = 60;
  NewtonResult<Scalar> out;
  out.x = std::move(x0);
  Vector<Scalar> r = residual(out.x);
  if (r.size() != out.x.size()) {
    throw DimensionMismatch("newton_solve: residual size differs from unknown size");
  }
  Scalar norm = r.norm();
  while (!(norm <= Scalar(settings.residual_tolerance))) {
    if (out.iterations >= settings.max_iterations || !std::isfinite(double(norm))) {
      out.residual_norm = norm;
      throw MaxIterationsExceeded("newton_solve: no convergence after " +
                                      std::to_string(out.iterations) + " iterations",
                                  out.x.template cast<double>(), double(norm));
    }
    const Matrix<Scalar> jac = jacobian(out.x);
    const Vector<Scalar> step = solve_linear<Scalar>(jac, -r);
    Scalar alpha(1);
    Vector<Scalar> trial = out.x + step;
    Vector<Scalar> r_trial = residual(trial);
    Scalar trial_norm = r_trial.norm();
    int halvings = 0;
    while (!(trial_norm < norm) && halvings < kMaxHalvings) {
      alpha *= Scalar(settings.damping_shrink);
      trial = out.x + alpha * step;
      r_trial = residual(trial);
      trial_norm = r_trial.norm();
      ++halvings;
    }
    if (!(trial_norm < norm)) {
      trial = out.x + step;
      r_trial = residual(trial);
      trial_norm = r_trial.norm();
    }
    out.x = std::move(trial);
    r = std::move(r_trial);
    norm = trial_norm;
    ++out.iterations;
  }
  out.residual_norm = norm;
  return out;
}

namespace detail {

// 5-point Gauss-Legendre rule mapped to [0, 1].
inline constexpr std::array<double, 5> kGaussNodes = {
    0.046910077030668003601, 0.23076534494715845448, 0.5,
    0.76923465505284154552, 0.95308992296933199640};
inline constexpr std::array<double, 5> kGaussWeights = {
    0.11846344252809454376, 0.23931433524968323402, 0.28444444444444444444,
    0.23931433524968323402, 0.11846344252809454376};

}  // namespace detail

/// Mean-value discrete gradient ∫₀¹ ∇g((1-s)u + s v) ds.
///
/// The integral uses composite 5-node Gauss-Legendre panels, doubled until two
/// successive estimates agree to 1e-14 relative (at most 1024 panels). It
/// satisfies dg(u,v)ᵀ(v-u) = g(v) - g(u) up to that accuracy and reduces to
/// ∇g(u) when v = u.
template <typename Scalar, typename Gradient>
Vector<Scalar> discrete_gradient(Gradient&& gradient, const Vector<Scalar>& u,
                                 const Vector<Scalar>& v) {
  if (u.size() != v.size()) {
    throw DimensionMismatch("discrete_gradient: u and v differ in dimension");
  }
  if ((v - u).norm() <= Scalar(1e-14)) {
    return gradient(u);
  }
  auto composite = [&](int panels) {
    Vector<Scalar> acc = Vector<Scalar>::Zero(u.size());
    const Scalar width = Scalar(1) / Scalar(panels);
    for (int p = 0; p < panels; ++p) {
      for (std::size_t k = 0; k < detail::kGaussNodes.size(); ++k) {
        const Scalar s = width * (Scalar(p) + Scalar(detail::kGaussNodes[k]));
        const Vector<Scalar> point = (Scalar(1) - s) * u + s * v;
        acc += (width * Scalar(detail::kGaussWeights[k])) * gradient(point);
      }
    }
    return acc;
  };
  constexpr int kMaxPanels = 1024;
  Vector<Scalar> coarse = composite(1);
  for (int panels = 2; panels <= kMaxPanels; panels *= 2) {
    Vector<Scalar> fine = composite(panels);
    if ((fine - coarse).norm() <= Scalar(1e-14) * (Scalar(1) + fine.norm())) return fine;
    coarse = std::move(fine);
  }
  return coarse;
}

/// Overload taking the scalar function too, matching the usual (g, ∇g) pair.
/// The value is not needed by the quadrature itself.
template <typename Scalar, typename Value, typename Gradient>
Vector<Scalar> discrete_gradient(Value&& /*value*/, Gradient&& gradient,
                                 const Vector<Scalar>& u, const Vector<Scalar>& v) {
  return discrete_gradient<Scalar>(std::forward<Gradient>(gradient), u, v);
}

}  // namespace phsopt
