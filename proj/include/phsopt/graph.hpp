#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "phsopt/numerics.hpp"

namespace phsopt {

/// Undirected edge stored with first < second.
using Edge = std::pair<int, int>;

/// Fixed undirected connected communication graph on agents 0..n-1.
///
/// Construction rejects self-loops, duplicate or out-of-range edges, and
/// disconnected topologies. A single agent with no edges is a valid graph.
class Graph {
 public:
  Graph(int n, std::vector<Edge> edges);

  int size() const { return n_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<int>& neighbors(int i) const { return neighbors_.at(i); }
  int degree(int i) const { return static_cast<int>(neighbors_.at(i).size()); }
  bool has_edge(int i, int j) const;

  friend bool operator==(const Graph& a, const Graph& b) {
    return a.n_ == b.n_ && a.edges_ == b.edges_;
  }

 private:
  int n_;
  std::vector<Edge> edges_;
  std::vector<std::vector<int>> neighbors_;
};

/// Breadth-first connectivity test on an arbitrary edge list.
bool is_connected(int n, const std::vector<Edge>& edges);

Graph path(int n);
Graph cycle(int n);
Graph complete(int n);
Graph star(int n);

/// Erdős–Rényi G(n, p), redrawn from the same seeded stream until connected.
/// Throws GenerationFailed after 10,000 draws.
Graph erdos_renyi(int n, double p, std::uint64_t seed);

/// Parses "cycle:N", "complete:N", "star:N", "path:N" or "er:N:p:seed".
Graph parse_graph_spec(const std::string& spec);

template <typename Scalar = double>
Matrix<Scalar> adjacency(const Graph& g) {
  Matrix<Scalar> a = Matrix<Scalar>::Zero(g.size(), g.size());
  for (const auto& [i, j] : g.edges()) {
    a(i, j) = Scalar(1);
    a(j, i) = Scalar(1);
  }
  return a;
}

template <typename Scalar = double>
Matrix<Scalar> degree_matrix(const Graph& g) {
  Matrix<Scalar> d = Matrix<Scalar>::Zero(g.size(), g.size());
  for (int i = 0; i < g.size(); ++i) d(i, i) = Scalar(g.degree(i));
  return d;
}

/// L = D - A.
template <typename Scalar = double>
Matrix<Scalar> laplacian(const Graph& g) {
  return degree_matrix<Scalar>(g) - adjacency<Scalar>(g);
}

/// Oriented incidence matrix, +1 at the smaller endpoint. E Eᵀ = L.
template <typename Scalar = double>
Matrix<Scalar> incidence(const Graph& g) {
  Matrix<Scalar> e = Matrix<Scalar>::Zero(g.size(), static_cast<Eigen::Index>(g.edges().size()));
  for (std::size_t k = 0; k < g.edges().size(); ++k) {
    const auto [i, j] = g.edges()[k];
    e(i, static_cast<Eigen::Index>(k)) = Scalar(1);
    e(j, static_cast<Eigen::Index>(k)) = Scalar(-1);
  }
  return e;
}

/// Q = (D + A) / 2, the signless-Laplacian half used by the MID analysis.
template <typename Scalar = double>
Matrix<Scalar> q_matrix(const Graph& g) {
  return (degree_matrix<Scalar>(g) + adjacency<Scalar>(g)) / Scalar(2);
}

template <typename Scalar = double>
Matrix<Scalar> d2_minus_a2(const Graph& g) {
  const Matrix<Scalar> d = degree_matrix<Scalar>(g);
  const Matrix<Scalar> a = adjacency<Scalar>(g);
  return d * d - a * a;
}

/// μ / ‖D² - A²‖; +∞ when D² - A² vanishes.
template <typename Scalar = double>
Scalar tau_upper_bound(const Graph& g, Scalar mu) {
  if (!(mu > Scalar(0))) throw InvalidArgument("tau_upper_bound: mu must be positive");
  const Scalar norm = spectral_norm_symmetric<Scalar>(d2_minus_a2<Scalar>(g));
  if (norm == Scalar(0)) return std::numeric_limits<Scalar>::infinity();
  return mu / norm;
}

}  // namespace phsopt
