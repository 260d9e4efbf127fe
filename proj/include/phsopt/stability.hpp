#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "phsopt/dynamics.hpp"

namespace phsopt {

/// Decision variables of the discrete-time Lyapunov LMI. P11 is fixed to Λ(τ).
template <typename Scalar = double>
struct LmiCertificate {
  Matrix<Scalar> p12;
  Matrix<Scalar> p22;
  Matrix<Scalar> u_matrix;  // U
  Scalar u = Scalar(0);
  Scalar epsilon = Scalar(0);
};

/// Margins are oriented so that non-negative means satisfied.
template <typename Scalar = double>
struct CertificateVerdict {
  bool feasible = false;
  Scalar positivity;             // λmin(P)
  std::optional<Scalar> schur;   // λmin([[U, P12ᵀ], [P12, I]]), absent for the quadratic check
  Scalar decrease;               // -λmax(W + u·blockdiag(I, 0))
};

inline constexpr double kLmiTolerance = 1e-9;

namespace detail {

template <typename Scalar>
void require_tau(Scalar tau) {
  if (!(tau > Scalar(0))) throw InvalidArgument("tau must be positive");
}

template <typename Scalar>
Matrix<Scalar> blocks(const Matrix<Scalar>& a, const Matrix<Scalar>& b, const Matrix<Scalar>& c,
                      const Matrix<Scalar>& d) {
  Matrix<Scalar> out(a.rows() + c.rows(), a.cols() + b.cols());
  out << a, b, c, d;
  return out;
}

}  // namespace detail

/// Q ⊗ I_m with Q = (D + A)/2.
template <typename Scalar = double>
Matrix<Scalar> q_lifted(const Graph& g, int m) {
  return lift<Scalar>(q_matrix<Scalar>(g), m);
}

/// Λ(τ) = I/τ² + Q/τ + Q².
template <typename Scalar = double>
Matrix<Scalar> lambda_matrix(const Graph& g, int m, Scalar tau) {
  detail::require_tau(tau);
  const Matrix<Scalar> q = q_lifted<Scalar>(g, m);
  Matrix<Scalar> lam = q / tau + q * q;
  lam.diagonal().array() += Scalar(1) / (tau * tau);
  return lam;
}

/// Linear part of the MID step in (q, p) coordinates.
template <typename Scalar = double>
Matrix<Scalar> s_p_matrix(const Graph& g, int m, Scalar tau) {
  detail::require_tau(tau);
  const Matrix<Scalar> q = q_lifted<Scalar>(g, m);
  const Matrix<Scalar> l = lift<Scalar>(laplacian<Scalar>(g), m);
  const Matrix<Scalar> lam_inv = inverse_spd<Scalar>(lambda_matrix<Scalar>(g, m, tau));
  const Matrix<Scalar> iq = Matrix<Scalar>::Identity(q.rows(), q.cols()) / tau + q;
  return detail::blocks<Scalar>(-lam_inv * iq * l, -lam_inv * l / tau, lam_inv * l / tau,
                                -lam_inv * q * l);
}

/// y = T [q; p] with r = p - τQq.
template <typename Scalar = double>
Matrix<Scalar> change_of_variables(const Graph& g, int m, Scalar tau) {
  detail::require_tau(tau);
  const Matrix<Scalar> q = q_lifted<Scalar>(g, m);
  const Eigen::Index n = q.rows();
  const Matrix<Scalar> eye = Matrix<Scalar>::Identity(n, n);
  return detail::blocks<Scalar>(eye, Matrix<Scalar>::Zero(n, n), -tau * q, eye);
}

/// Linear part of the MID step in (q, r) coordinates: the increment
/// e⁺ - e equals S_r ē - B ψ(q̄) with B = [Λ⁻¹/τ; 0].
template <typename Scalar = double>
Matrix<Scalar> s_r_matrix(const Graph& g, int m, Scalar tau) {
  detail::require_tau(tau);
  const Matrix<Scalar> q = q_lifted<Scalar>(g, m);
  const Matrix<Scalar> l = lift<Scalar>(laplacian<Scalar>(g), m);
  const Matrix<Scalar> lam_inv = inverse_spd<Scalar>(lambda_matrix<Scalar>(g, m, tau));
  return detail::blocks<Scalar>(-lam_inv * (l / tau + q * l + l * q), -lam_inv * l / tau, tau * l,
                                Matrix<Scalar>::Zero(l.rows(), l.cols()));
}

/// γ(τ) = (L/τ)‖Λ(τ)⁻¹‖.
template <typename Scalar = double>
Scalar gamma(const Graph& g, int m, Scalar tau, Scalar lipschitz) {
  const Scalar lam_min = min_eigenvalue_symmetric<Scalar>(lambda_matrix<Scalar>(g, m, tau));
  return lipschitz / (tau * lam_min);
}

/// Young's-inequality bound of the nonlinear cross terms,
/// blockdiag((γε/2 - μ/τ)I, γU/(2ε)). At ε = 0 the lower block is taken as 0,
/// which is only valid for U = 0.
template <typename Scalar = double>
Matrix<Scalar> s_gamma(const Graph& g, int m, Scalar tau, Scalar epsilon, Scalar mu,
                       Scalar lipschitz, const Matrix<Scalar>& u_matrix) {
  detail::require_tau(tau);
  if (!(epsilon >= Scalar(0))) throw InvalidEpsilon("epsilon must be non-negative");
  const Eigen::Index n = static_cast<Eigen::Index>(g.size()) * m;
  if (u_matrix.rows() != n || u_matrix.cols() != n) {
    throw DimensionMismatch("s_gamma: U has the wrong shape");
  }
  const Scalar gam = gamma<Scalar>(g, m, tau, lipschitz);
  Matrix<Scalar> out = Matrix<Scalar>::Zero(2 * n, 2 * n);
  out.topLeftCorner(n, n).diagonal().setConstant(gam * epsilon / Scalar(2) - mu / tau);
  if (epsilon == Scalar(0)) {
    if (!u_matrix.isZero(Scalar(0))) throw InvalidEpsilon("epsilon = 0 requires U = 0");
  } else {
    out.bottomRightCorner(n, n) = gam * u_matrix / (Scalar(2) * epsilon);
  }
  return out;
}

/// Exact quadratic-cost replacement of S_γ: ēᵀ S_h ē equals the cost term of
/// V(e⁺) - V(e) when ψ(q̄) = H(q̄ - q*).
template <typename Scalar = double>
Matrix<Scalar> s_h(const Graph& g, int m, Scalar tau, const std::vector<Matrix<Scalar>>& hessians,
                   const Matrix<Scalar>& p12) {
  detail::require_tau(tau);
  if (static_cast<int>(hessians.size()) != g.size()) {
    throw DimensionMismatch("s_h: one Hessian per agent required");
  }
  const Eigen::Index n = static_cast<Eigen::Index>(g.size()) * m;
  if (p12.rows() != n || p12.cols() != n) throw DimensionMismatch("s_h: P12 has the wrong shape");
  Matrix<Scalar> h = Matrix<Scalar>::Zero(n, n);
  for (int i = 0; i < g.size(); ++i) {
    if (hessians[i].rows() != m || hessians[i].cols() != m) {
      throw DimensionMismatch("s_h: Hessian has the wrong shape");
    }
    h.block(i * m, i * m, m, m) = hessians[i];
  }
  const Matrix<Scalar> lam_inv = inverse_spd<Scalar>(lambda_matrix<Scalar>(g, m, tau));
  Matrix<Scalar> out = Matrix<Scalar>::Zero(2 * n, 2 * n);
  out.topLeftCorner(n, n) = -h / tau;
  out.bottomLeftCorner(n, n) = -p12.transpose() * lam_inv * h / tau;
  return out;
}

/// P(τ) = [[Λ(τ), P12], [P12ᵀ, P22]].
template <typename Scalar>
Matrix<Scalar> lyapunov_matrix(const LmiCertificate<Scalar>& cert, const Graph& g, int m,
                               Scalar tau) {
  const Eigen::Index n = static_cast<Eigen::Index>(g.size()) * m;
  if (cert.p12.rows() != n || cert.p12.cols() != n || cert.p22.rows() != n ||
      cert.p22.cols() != n || cert.u_matrix.rows() != n || cert.u_matrix.cols() != n) {
    throw DimensionMismatch("certificate blocks must be Nm x Nm");
  }
  return detail::blocks<Scalar>(lambda_matrix<Scalar>(g, m, tau), cert.p12,
                                cert.p12.transpose(), cert.p22);
}

namespace detail {

template <typename Scalar>
void require_valid_certificate(const LmiCertificate<Scalar>& cert) {
  if (!(cert.u > Scalar(0))) throw InvalidCertificate("certificate needs u > 0");
  if (!(cert.epsilon >= Scalar(0))) throw InvalidEpsilon("epsilon must be non-negative");
  if (!cert.p22.isApprox(cert.p22.transpose(), Scalar(1e-12)) && !cert.p22.isZero()) {
    throw NonSymmetric("P22 must be symmetric");
  }
  if (!cert.u_matrix.isApprox(cert.u_matrix.transpose(), Scalar(1e-12)) &&
      !cert.u_matrix.isZero()) {
    throw NonSymmetric("U must be symmetric");
  }
}

/// Shared tail of both checks: positivity of P and the decrease condition
/// sym(P S_r) + extra ⪯ -u·blockdiag(I, 0).
template <typename Scalar>
CertificateVerdict<Scalar> verdict_for(const LmiCertificate<Scalar>& cert, const Graph& g, int m,
                                       Scalar tau, const Matrix<Scalar>& extra) {
  const Eigen::Index n = static_cast<Eigen::Index>(g.size()) * m;
  const Matrix<Scalar> p = lyapunov_matrix<Scalar>(cert, g, m, tau);
  Matrix<Scalar> w = symmetric_part<Scalar>(Matrix<Scalar>(p * s_r_matrix<Scalar>(g, m, tau)));
  w += symmetric_part<Scalar>(extra);
  w.topLeftCorner(n, n).diagonal().array() += cert.u;
  CertificateVerdict<Scalar> v;
  v.positivity = min_eigenvalue_symmetric<Scalar>(symmetric_part<Scalar>(p));
  v.decrease = -max_eigenvalue_symmetric<Scalar>(w);
  v.feasible = v.positivity > Scalar(kLmiTolerance) && v.decrease >= -Scalar(kLmiTolerance);
  return v;
}

}  // namespace detail

/// Verifies a certificate for strongly convex costs with constants μ and L.
template <typename Scalar = double>
CertificateVerdict<Scalar> check_certificate(const LmiCertificate<Scalar>& cert, const Graph& g,
                                             int m, Scalar tau, Scalar mu, Scalar lipschitz) {
  detail::require_tau(tau);
  detail::require_valid_certificate(cert);
  if (cert.epsilon == Scalar(0) && !cert.p12.isZero(Scalar(0))) {
    throw InvalidEpsilon("epsilon = 0 requires P12 = 0");
  }
  const Matrix<Scalar> sg = s_gamma<Scalar>(g, m, tau, cert.epsilon, mu, lipschitz, cert.u_matrix);
  CertificateVerdict<Scalar> v = detail::verdict_for<Scalar>(cert, g, m, tau, sg);
  // U ⪰ P12ᵀP12 is what bounds ‖P12 r̄‖² by r̄ᵀU r̄.
  const Eigen::Index n = cert.p12.rows();
  const Matrix<Scalar> schur = detail::blocks<Scalar>(
      cert.u_matrix, cert.p12.transpose(), cert.p12, Matrix<Scalar>::Identity(n, n));
  v.schur = min_eigenvalue_symmetric<Scalar>(symmetric_part<Scalar>(schur));
  v.feasible = v.feasible && *v.schur >= -Scalar(kLmiTolerance);
  return v;
}

/// Verifies a certificate for quadratic costs f_i = ½qᵀH_i q + b_iᵀq, using
/// the exact cost term instead of the μ/L bound.
template <typename Scalar = double>
CertificateVerdict<Scalar> check_certificate_quadratic(const LmiCertificate<Scalar>& cert,
                                                       const Graph& g, int m, Scalar tau,
                                                       const std::vector<Matrix<Scalar>>& hessians) {
  detail::require_tau(tau);
  detail::require_valid_certificate(cert);
  return detail::verdict_for<Scalar>(cert, g, m, tau,
                                     s_h<Scalar>(g, m, tau, hessians, cert.p12));
}

/// Closed-form certificate P12 = U = 0, ε = 0, P22 = I/τ².
///
/// This P22 cancels the off-diagonal block of sym(P S_r), leaving the upper
/// block -(L/τ + D² - A²) - μ/τ + u. The returned u is half the guaranteed
/// slack μ/τ - max(0, -λmin(D² - A²)) when that is positive; otherwise μ/(2τ)
/// is returned and the check will report the certificate infeasible.
template <typename Scalar = double>
LmiCertificate<Scalar> corollary_certificate(const Graph& g, int m, Scalar tau, Scalar mu) {
  detail::require_tau(tau);
  if (!(mu > Scalar(0))) throw InvalidArgument("corollary_certificate: mu must be positive");
  const Eigen::Index n = static_cast<Eigen::Index>(g.size()) * m;
  const Scalar deficit =
      std::max(Scalar(0), -min_eigenvalue_symmetric<Scalar>(d2_minus_a2<Scalar>(g)));
  const Scalar slack = mu / tau - deficit;
  LmiCertificate<Scalar> cert;
  cert.p12 = Matrix<Scalar>::Zero(n, n);
  cert.p22 = Matrix<Scalar>::Identity(n, n) / (tau * tau);
  cert.u_matrix = Matrix<Scalar>::Zero(n, n);
  cert.u = slack > Scalar(0) ? slack / Scalar(2) : mu / (Scalar(2) * tau);
  cert.epsilon = Scalar(0);
  return cert;
}

/// Constants the certificate search checks against. With `hessians` set the
/// quadratic check is used.
template <typename Scalar = double>
struct ProblemConstants {
  Scalar mu;
  Scalar lipschitz;
  std::optional<std::vector<Matrix<Scalar>>> hessians;
};

/// Scans P12 = U = 0, ε = 0, P22 = αI, u = β. α runs over 1/τ² and then a
/// log grid on [1e-4, 1e4]; β halves down from μ/τ. Returns the first
/// verified certificate, or nullopt when the family has none (which says
/// nothing about instability).
template <typename Scalar = double>
std::optional<LmiCertificate<Scalar>> certificate_search(const Graph& g, int m, Scalar tau,
                                                         const ProblemConstants<Scalar>& k) {
  detail::require_tau(tau);
  if (!(k.mu > Scalar(0))) throw InvalidArgument("certificate_search: mu must be positive");
  constexpr int kAlphaPoints = 81;
  constexpr int kBetaHalvings = 40;
  const Eigen::Index n = static_cast<Eigen::Index>(g.size()) * m;

  std::vector<Scalar> alphas{Scalar(1) / (tau * tau)};
  for (int i = 0; i < kAlphaPoints; ++i) {
    alphas.push_back(std::pow(Scalar(10), Scalar(-4) + Scalar(8) * Scalar(i) /
                                                           Scalar(kAlphaPoints - 1)));
  }

  LmiCertificate<Scalar> cert;
  cert.p12 = Matrix<Scalar>::Zero(n, n);
  cert.u_matrix = Matrix<Scalar>::Zero(n, n);
  cert.epsilon = Scalar(0);
  auto feasible = [&](const LmiCertificate<Scalar>& c) {
    if (k.hessians) return check_certificate_quadratic<Scalar>(c, g, m, tau, *k.hessians).feasible;
    return check_certificate<Scalar>(c, g, m, tau, k.mu, k.lipschitz).feasible;
  };
  for (Scalar alpha : alphas) {
    cert.p22 = alpha * Matrix<Scalar>::Identity(n, n);
    // The decrease margin only worsens as u grows, so the smallest β decides
    // whether this α can work at all.
    cert.u = k.mu / tau * std::pow(Scalar(2), Scalar(-kBetaHalvings));
    if (!feasible(cert)) continue;
    for (int h = 0; h <= kBetaHalvings; ++h) {
      cert.u = k.mu / tau * std::pow(Scalar(2), Scalar(-h));
      if (feasible(cert)) return cert;
    }
  }
  return std::nullopt;
}

/// Largest value of V(e⁺) - V(e) + u‖q̄ - q*‖² along consecutive states, with
/// V(e) = eᵀP e/2 in (q, r) coordinates. Non-positive up to round-off when the
/// certificate is valid for the run.
template <typename Scalar = double>
Scalar audit_lyapunov(const std::vector<NetworkState<Scalar>>& states,
                      const LmiCertificate<Scalar>& cert, const NetworkState<Scalar>& equilibrium,
                      const Graph& g, int m, Scalar tau) {
  detail::require_tau(tau);
  if (equilibrium.agents() != g.size() || equilibrium.dim() != m) {
    throw DimensionMismatch("audit_lyapunov: equilibrium shape");
  }
  const Matrix<Scalar> p = lyapunov_matrix<Scalar>(cert, g, m, tau);
  const Matrix<Scalar> q = q_lifted<Scalar>(g, m);
  const Eigen::Index n = static_cast<Eigen::Index>(g.size()) * m;
  auto error = [&](const NetworkState<Scalar>& x) {
    if (x.agents() != g.size() || x.dim() != m) {
      throw DimensionMismatch("audit_lyapunov: state shape");
    }
    Vector<Scalar> e(2 * n);
    e.head(n) = x.q() - equilibrium.q();
    e.tail(n) = (x.p() - equilibrium.p()) - tau * q * (x.q() - equilibrium.q());
    return e;
  };
  Scalar worst = states.size() < 2 ? Scalar(0) : -std::numeric_limits<Scalar>::infinity();
  for (std::size_t k = 0; k + 1 < states.size(); ++k) {
    const Vector<Scalar> e0 = error(states[k]);
    const Vector<Scalar> e1 = error(states[k + 1]);
    const Scalar dv = (e1.dot(p * e1) - e0.dot(p * e0)) / Scalar(2);
    const Scalar qbar = ((e0.head(n) + e1.head(n)) / Scalar(2)).squaredNorm();
    worst = std::max(worst, dv + cert.u * qbar);
  }
  return worst;
}

}  // namespace phsopt
