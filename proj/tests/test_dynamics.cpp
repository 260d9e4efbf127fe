#include <random>

#include "doctest.h"
#include "phsopt/dynamics.hpp"

using phsopt::CostEnsemble;
using phsopt::Graph;
using phsopt::NetworkState;
using Mat = phsopt::Matrix<double>;
using Vec = phsopt::Vector<double>;

namespace {

NetworkState<double> random_state(std::mt19937_64& rng, int n, int m, double scale = 1.0) {
  std::normal_distribution<double> normal;
  NetworkState<double> x(n, m);
  for (Eigen::Index k = 0; k < x.q().size(); ++k) {
    x.q()(k) = scale * normal(rng);
    x.p()(k) = scale * normal(rng);
  }
  return x;
}

CostEnsemble<double> single_quadratic() {
  Mat h(2, 2);
  h << 2, 0.5, 0.5, 1;
  Vec b(2);
  b << 1, -1;
  return CostEnsemble<double>({phsopt::QuadraticCost<double>(h, b)});
}

}  // namespace

TEST_CASE("network state layout") {
  NetworkState<double> x(3, 2);
  x.q(1) << 1, 2;
  x.p(2) << 3, 4;
  const Vec s = x.stacked();
  CHECK(s.size() == 12);
  CHECK(s(4) == 1);
  CHECK(s(5) == 2);
  CHECK(s(10) == 3);
  CHECK(s(11) == 4);
  const auto back = NetworkState<double>::from_stacked(3, 2, s);
  CHECK(back.q() == x.q());
  CHECK(back.p() == x.p());
  CHECK_THROWS_AS(NetworkState<double>(3, 2, Vec::Zero(5), Vec::Zero(6)),
                  phsopt::DimensionMismatch);
  CHECK_THROWS_AS(NetworkState<double>::from_stacked(3, 2, Vec::Zero(11)),
                  phsopt::DimensionMismatch);
}

TEST_CASE("design coupling matrix") {
  const phsopt::PhsDesign<double> design(2);
  Mat expected(4, 4);
  expected << -1, 0, -1, 0,
              0, -1, 0, -1,
              1, 0, 0, 0,
              0, 1, 0, 0;
  CHECK(design.coupling == expected);
}

TEST_CASE("single agent reduces to the gradient flow") {
  const auto costs = single_quadratic();
  const Graph g(1, {});
  std::mt19937_64 rng(1);
  const auto x = random_state(rng, 1, 2);
  const auto dx = phsopt::continuous_rhs<double>(x, costs, g);
  CHECK((dx.q() + phsopt::gradient<double>(costs[0], x.q())).norm() == 0.0);
  CHECK(dx.p().isZero(0.0));
  CHECK(phsopt::passivity_check<double>(x, costs, g) == 0.0);
}

TEST_CASE("the optimal consensus state with matching p is an equilibrium") {
  const Graph g = phsopt::erdos_renyi(8, 0.4, 3);
  const auto costs = phsopt::random_quadratic_ensemble<double>(8, 3, 4);
  const Vec theta = phsopt::centralized_optimum<double>(costs);
  Vec mean(3);
  mean << 0.2, -0.4, 1.5;
  NetworkState<double> eq(8, 3);
  for (int i = 0; i < 8; ++i) eq.q(i) = theta;
  eq.p() = phsopt::equilibrium_p<double>(costs, g, theta, mean);
  CHECK(phsopt::continuous_rhs<double>(eq, costs, g).stacked().norm() <= 1e-10);
  CHECK((phsopt::agent_mean<double>(eq.p(), 3) - mean).norm() <= 1e-12);

  const auto res = phsopt::optimality_residual<double>(eq, costs, g);
  CHECK(res.gradient <= 1e-10);
  CHECK(res.consensus <= 1e-10);

  NetworkState<double> off = eq;
  for (int i = 0; i < 8; ++i) off.q(i) << 1.0, 2.0, 3.0;
  const auto off_res = phsopt::optimality_residual<double>(off, costs, g);
  CHECK(off_res.consensus == 0.0);
  CHECK(off_res.gradient > 0.1);
}

TEST_CASE("consensus states do not move p") {
  const Graph g = phsopt::cycle(5);
  const auto costs = phsopt::random_quadratic_ensemble<double>(5, 2, 5);
  NetworkState<double> x(5, 2);
  for (int i = 0; i < 5; ++i) {
    x.q(i) << 0.7, -0.1;
    x.p(i) << 3.0, 2.0;
  }
  CHECK(phsopt::continuous_rhs<double>(x, costs, g).p().isZero(0.0));
  CHECK(phsopt::passivity_check<double>(x, costs, g) == 0.0);
}

TEST_CASE("optimality residual on a two-node path") {
  const Graph g = phsopt::path(2);
  const CostEnsemble<double> costs({phsopt::QuadraticCost<double>(Mat::Identity(1, 1), Vec::Zero(1)),
                                    phsopt::QuadraticCost<double>(Mat::Identity(1, 1), Vec::Zero(1))});
  NetworkState<double> x(2, 1);
  x.q() << 1, -1;
  const auto res = phsopt::optimality_residual<double>(x, costs, g);
  CHECK(res.consensus == doctest::Approx(std::sqrt(8.0)));
  CHECK(res.gradient == 0.0);
}

TEST_CASE("bregman lyapunov examples") {
  std::mt19937_64 rng(2);
  const auto eq = random_state(rng, 4, 2);
  CHECK(phsopt::bregman_lyapunov<double>(eq, eq) == 0.0);
  NetworkState<double> x = eq;
  x.p()(3) += 1.0;
  CHECK(phsopt::bregman_lyapunov<double>(x, eq) == doctest::Approx(0.5));
  for (int k = 0; k < 20; ++k) {
    const auto y = random_state(rng, 4, 2);
    const double dist2 = (y.stacked() - eq.stacked()).squaredNorm();
    CHECK(phsopt::bregman_lyapunov<double>(y, eq) == doctest::Approx(0.5 * dist2));
  }
  CHECK_THROWS_AS(phsopt::bregman_lyapunov<double>(NetworkState<double>(3, 2), eq),
                  phsopt::DimensionMismatch);
}

TEST_CASE("passivity is never violated") {
  std::mt19937_64 rng(3);
  const Graph g = phsopt::cycle(4);
  const auto costs = phsopt::random_quadratic_ensemble<double>(4, 2, 6);
  for (int k = 0; k < 50; ++k) {
    CHECK(phsopt::passivity_check<double>(random_state(rng, 4, 2, 3.0), costs, g) <= 1e-10);
  }
}

TEST_CASE("neighbour-sum and compact vector fields agree") {
  std::mt19937_64 rng(4);
  for (int k = 0; k < 50; ++k) {
    const int n = 2 + k % 9;
    const Graph g = phsopt::erdos_renyi(n, 0.5, 100 + k);
    const int m = 1 + k % 3;
    const auto costs = k % 2 == 0 ? phsopt::random_quadratic_ensemble<double>(n, m, k)
                                  : phsopt::random_logistic_ensemble<double>(n, m + 1, 5, 0.5, k);
    const auto x = random_state(rng, n, costs.dim(), 2.0);
    const auto a = phsopt::continuous_rhs<double>(x, costs, g);
    const auto b = phsopt::continuous_rhs_compact<double>(x, costs, g);
    CHECK((a.stacked() - b.stacked()).cwiseAbs().maxCoeff() <= 1e-12);

    // Summing over agents cancels every Laplacian term.
    Vec grad_sum = Vec::Zero(costs.dim());
    for (int i = 0; i < n; ++i) grad_sum += phsopt::gradient<double>(costs[i], Vec(x.q(i)));
    CHECK((phsopt::agent_mean<double>(a.q(), costs.dim()) * n + grad_sum).norm() <= 1e-12);
    CHECK(phsopt::agent_mean<double>(a.p(), costs.dim()).norm() <= 1e-12);

    const Mat j = phsopt::PhsDesign<double>(costs.dim()).interconnection(g);
    CHECK(phsopt::max_eigenvalue_symmetric<double>(phsopt::symmetric_part<double>(j)) <= 1e-10);
  }
}

TEST_CASE("shape mismatches are rejected") {
  const Graph g = phsopt::cycle(4);
  const auto costs = phsopt::random_quadratic_ensemble<double>(4, 2, 6);
  CHECK_THROWS_AS(phsopt::continuous_rhs<double>(NetworkState<double>(3, 2), costs, g),
                  phsopt::DimensionMismatch);
  CHECK_THROWS_AS(phsopt::continuous_rhs<double>(NetworkState<double>(4, 3), costs, g),
                  phsopt::DimensionMismatch);
}

TEST_CASE("consensus error") {
  Vec q(6);
  q << 1, 2, 1, 2, 1, 2;
  Vec theta(2);
  theta << 1, 2;
  CHECK(phsopt::consensus_error<double>(q, theta) == 0.0);
  q(5) = 5;
  CHECK(phsopt::consensus_error<double>(q, theta) == doctest::Approx(3.0));
}
