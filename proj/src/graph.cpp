#include "phsopt/graph.hpp"

#include <algorithm>
#include <queue>
#include <random>
#include <set>

namespace phsopt {

bool is_connected(int n, const std::vector<Edge>& edges) {
  if (n <= 1) return n == 1;
  std::vector<std::vector<int>> adj(n);
  for (const auto& [i, j] : edges) {
    adj[i].push_back(j);
    adj[j].push_back(i);
  }
  std::vector<bool> seen(n, false);
  std::queue<int> frontier;
  frontier.push(0);
  seen[0] = true;
  int visited = 1;
  while (!frontier.empty()) {
    const int v = frontier.front();
    frontier.pop();
    for (int w : adj[v]) {
      if (!seen[w]) {
        seen[w] = true;
        ++visited;
        frontier.push(w);
      }
    }
  }
  return visited == n;
}

Graph::Graph(int n, std::vector<Edge> edges) : n_(n) {
  if (n < 1) throw InvalidArgument("graph needs at least one agent");
  std::set<Edge> unique;
  for (auto [i, j] : edges) {
    if (i < 0 || j < 0 || i >= n || j >= n) {
      throw InvalidArgument("edge endpoint out of range");
    }
    if (i == j) throw InvalidArgument("self-loops are not allowed");
    if (i > j) std::swap(i, j);
    if (!unique.insert({i, j}).second) {
      throw InvalidArgument("duplicate edge");
    }
  }
  edges_.assign(unique.begin(), unique.end());
  if (!is_connected(n, edges_)) {
    throw DisconnectedGraph("graph is not connected");
  }
  neighbors_.resize(n);
  for (const auto& [i, j] : edges_) {
    neighbors_[i].push_back(j);
    neighbors_[j].push_back(i);
  }
  for (auto& list : neighbors_) std::sort(list.begin(), list.end());
}

bool Graph::has_edge(int i, int j) const {
  const auto& list = neighbors_.at(i);
  return std::binary_search(list.begin(), list.end(), j);
}

Graph path(int n) {
  if (n < 1) throw InvalidArgument("path needs n >= 1");
  std::vector<Edge> edges;
  for (int i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
  return Graph(n, std::move(edges));
}

Graph cycle(int n) {
  if (n < 3) throw InvalidArgument("cycle needs n >= 3");
  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i) edges.emplace_back(i, (i + 1) % n);
  return Graph(n, std::move(edges));
}

Graph complete(int n) {
  if (n < 2) throw InvalidArgument("complete graph needs n >= 2");
  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) edges.emplace_back(i, j);
  }
  return Graph(n, std::move(edges));
}

Graph star(int n) {
  if (n < 2) throw InvalidArgument("star needs n >= 2");
  std::vector<Edge> edges;
  for (int i = 1; i < n; ++i) edges.emplace_back(0, i);
  return Graph(n, std::move(edges));
}

Graph erdos_renyi(int n, double p, std::uint64_t seed) {
  if (n < 2) throw InvalidArgument("erdos_renyi needs n >= 2");
  if (!(p > 0.0 && p <= 1.0)) throw InvalidArgument("erdos_renyi needs 0 < p <= 1");
  constexpr int kMaxDraws = 10000;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int draw = 0; draw < kMaxDraws; ++draw) {
    std::vector<Edge> edges;
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        if (unit(rng) < p) edges.emplace_back(i, j);
      }
    }
    if (is_connected(n, edges)) return Graph(n, std::move(edges));
  }
  throw GenerationFailed("erdos_renyi: no connected sample after 10000 draws");
}

}  // namespace phsopt
