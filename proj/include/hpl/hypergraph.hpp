#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "hpl/neighbor_index.hpp"
#include "hpl/parallel.hpp"
#include "hpl/point_cloud.hpp"

namespace hpl {

// ---------------------------------------------------------------------------
// Scaling radii
// ---------------------------------------------------------------------------

// Effective connection radius of a k-NN structure on n points in R^d:
// (k / (alpha_d * n))^(1/d), alpha_d the volume of the d-dimensional unit
// ball. Chosen so that a ball of this radius holds a k/n fraction of a
// uniform sample.
inline double bar_epsilon(std::size_t k, std::size_t n, int d) {
  if (d < 1) throw std::invalid_argument("bar_epsilon: d must be >= 1");
  if (k < 1 || k > n) throw std::invalid_argument("bar_epsilon: need 1 <= k <= n");
  const double alpha_d = std::pow(std::numbers::pi, 0.5 * d) /
                         std::tgamma(0.5 * d + 1.0);
  return std::pow(static_cast<double>(k) / (alpha_d * static_cast<double>(n)),
                  1.0 / d);
}

// Rate below which random geometric graphs on n uniform points in R^d
// disconnect; used only to warn when a requested radius is too small.
inline double delta_n(std::size_t n, int d) {
  if (n < 3) throw std::invalid_argument("delta_n: n must be >= 3");
  if (d < 1) throw std::invalid_argument("delta_n: d must be >= 1");
  const double nn = static_cast<double>(n);
  if (d == 1) return std::sqrt(std::log(std::log(nn)) / nn);
  if (d == 2) return std::pow(std::log(nn), 0.75) / std::sqrt(nn);
  return std::pow(std::log(nn), 1.0 / d) / std::pow(nn, 1.0 / d);
}

// ---------------------------------------------------------------------------
// Weights
// ---------------------------------------------------------------------------

enum class WeightVariant { homogeneous, self_tuning };

struct WeightScheme {
  WeightVariant variant = WeightVariant::homogeneous;
  int k0 = 0;  // neighbor rank that sets the local scale (self-tuning only)

  static WeightScheme homogeneous() { return {}; }
  static WeightScheme self_tuning(int k0) {
    WeightScheme s;
    s.variant = WeightVariant::self_tuning;
    s.k0 = k0;
    return s;
  }
};

// Per-vertex scales sigma(x_i) for the self-tuning weight
// w(i,j) = exp(-|x_i - x_j|^2 / sigma(x_i)^2). The function is asymmetric in
// (i,j); sigma[i] <= 0 marks a degenerate vertex whose row falls back to
// weight 1 (all coincident points).
struct SelfTuningScales {
  std::vector<double> sigma;

  double weight(const PointCloud& pc, int i, int j) const {
    if (i == j) return 1.0;
    const double s = sigma[static_cast<std::size_t>(i)];
    if (!(s > 0.0)) return 1.0;
    return std::exp(-squared_distance(pc, i, j) / (s * s));
  }
};

// sigma(x_i) = distance from x_i to its k0-th nearest neighbor excluding
// itself. A zero distance (duplicate points) falls back to the smallest
// positive distance from x_i; if none exists the row gets unit weights.
inline SelfTuningScales self_tuning_weights(const PointCloud& pc,
                                            const NeighborIndex& index,
                                            int k0) {
  const std::size_t n = pc.size();
  if (k0 < 1 || static_cast<std::size_t>(k0) >= n)
    throw std::invalid_argument("self_tuning_weights: need 1 <= k0 < n");
  SelfTuningScales st;
  st.sigma.assign(n, 0.0);
  parallel_for(n, [&](std::size_t i) {
    const auto knn = index.query_knn(static_cast<int>(i), k0 + 1);
    double d2 = squared_distance(pc, i, static_cast<std::size_t>(knn.back()));
    if (d2 <= 0.0) {
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        const double c = squared_distance(pc, i, j);
        if (c > 0.0 && c < best) best = c;
      }
      d2 = std::isinf(best) ? 0.0 : best;
    }
    st.sigma[i] = d2 > 0.0 ? std::sqrt(d2) : 0.0;
  });
  return st;
}

// ---------------------------------------------------------------------------
// Hyperedges
// ---------------------------------------------------------------------------

// One hyperedge: a centroid vertex and its neighborhood. Pair weights are
// stored per unordered member pair in lexicographic order by (i, j), i < j
// over the sorted member list; an empty vector means homogeneous weight 1
// for every pair. For an asymmetric weight function the stored value is
// max(w(i,j), w(j,i)), which is the orientation an ordered max would select.
struct Hyperedge {
  int centroid = 0;
  std::vector<int> members;          // sorted ascending, centroid included
  std::vector<double> pair_weights;  // empty == all ones
  double max_pair_weight = 1.0;
  double op_norm_sq = 0.0;  // cached upper bound on ||A_k||^2

  std::size_t member_count() const { return members.size(); }
  std::size_t pair_count() const {
    const std::size_t m = members.size();
    return m * (m - 1) / 2;
  }
  bool homogeneous_weights() const { return pair_weights.empty(); }
  double pair_weight(std::size_t r) const {
    return pair_weights.empty() ? 1.0 : pair_weights[r];
  }
};

// Upper bound on the squared spectral norm of the edge's weighted
// pairwise-difference operator. For m members the complete pairwise
// difference Gram m*I - 11^T has top eigenvalue m; weights w <= max_w scale
// rows by w^(1/p), so m * max(1, max_w)^2 dominates for every p >= 1.
inline double edge_operator_norm_sq(const Hyperedge& edge) {
  const std::size_t m = edge.member_count();
  if (m < 2) return 0.0;
  const double w = std::max(1.0, edge.max_pair_weight);
  return static_cast<double>(m) * w * w;
}

// ---------------------------------------------------------------------------
// Hypergraph
// ---------------------------------------------------------------------------

enum class HypergraphKind { eps_ball, knn, pair_graph_eps, pair_graph_knn };

inline const char* to_string(HypergraphKind k) {
  switch (k) {
    case HypergraphKind::eps_ball: return "eps_ball";
    case HypergraphKind::knn: return "knn";
    case HypergraphKind::pair_graph_eps: return "pair_graph_eps";
    case HypergraphKind::pair_graph_knn: return "pair_graph_knn";
  }
  return "?";
}

struct Hypergraph {
  std::size_t n_vertices = 0;
  HypergraphKind kind = HypergraphKind::eps_ball;
  double scale_radius = 0.0;  // eps_n, or bar_epsilon(k, n, d) for knn kinds
  int knn_k = 0;              // k_n for knn kinds, 0 otherwise
  WeightScheme scheme;
  bool connected = true;
  std::vector<Hyperedge> edges;

  bool is_pair_graph() const {
    return kind == HypergraphKind::pair_graph_eps ||
           kind == HypergraphKind::pair_graph_knn;
  }
  double max_op_norm_sq() const {
    double m = 0.0;
    for (const auto& e : edges) m = std::max(m, e.op_norm_sq);
    return m;
  }
};

// True iff the union of cliques induced by all hyperedges forms a single
// connected component over all vertices.
inline bool is_connected(const Hypergraph& hg) {
  const std::size_t n = hg.n_vertices;
  if (n <= 1) return true;
  std::vector<int> parent(n);
  for (std::size_t i = 0; i < n; ++i) parent[i] = static_cast<int>(i);
  auto find = [&](int a) {
    while (parent[a] != a) {
      parent[a] = parent[parent[a]];
      a = parent[a];
    }
    return a;
  };
  auto unite = [&](int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[b] = a;
  };
  for (const auto& e : hg.edges)
    for (std::size_t t = 1; t < e.members.size(); ++t)
      unite(e.members[0], e.members[t]);
  const int root = find(0);
  for (std::size_t i = 1; i < n; ++i)
    if (find(static_cast<int>(i)) != root) return false;
  return true;
}

namespace detail {

// Borrows a caller-supplied index or owns a freshly built one.
struct IndexRef {
  std::optional<NeighborIndex> own;
  const NeighborIndex* ptr = nullptr;

  IndexRef(const PointCloud& pc, const NeighborIndex* external) {
    if (external != nullptr) {
      if (external->size() != pc.size() || external->dim() != pc.dim())
        throw std::invalid_argument("neighbor index does not match cloud");
      ptr = external;
    } else {
      own.emplace(pc);
      ptr = &*own;
    }
  }
  const NeighborIndex& operator*() const { return *ptr; }
  const NeighborIndex* operator->() const { return ptr; }
};

inline void finish_edge(Hyperedge& e, const PointCloud& pc,
                        const SelfTuningScales* st) {
  e.max_pair_weight = 1.0;
  if (st != nullptr) {
    const std::size_t m = e.members.size();
    e.pair_weights.assign(m * (m - 1) / 2, 1.0);
    double mx = 0.0;
    std::size_t r = 0;
    for (std::size_t a = 0; a < m; ++a) {
      for (std::size_t b = a + 1; b < m; ++b, ++r) {
        const int i = e.members[a];
        const int j = e.members[b];
        const double w = std::max(st->weight(pc, i, j), st->weight(pc, j, i));
        e.pair_weights[r] = w;
        mx = std::max(mx, w);
      }
    }
    if (r > 0) e.max_pair_weight = mx;
  }
  e.op_norm_sq = edge_operator_norm_sq(e);
}

inline SelfTuningScales maybe_scales(const PointCloud& pc,
                                     const NeighborIndex& index,
                                     const WeightScheme& scheme) {
  if (scheme.variant == WeightVariant::self_tuning)
    return self_tuning_weights(pc, index, scheme.k0);
  return {};
}

// Deduplicated unordered pairs -> size-2 hyperedges.
inline std::vector<Hyperedge> pairs_to_edges(
    std::vector<std::pair<int, int>>&& pairs, const PointCloud& pc,
    const SelfTuningScales* st) {
  for (auto& pr : pairs)
    if (pr.first > pr.second) std::swap(pr.first, pr.second);
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
  std::vector<Hyperedge> edges(pairs.size());
  parallel_for(pairs.size(), [&](std::size_t t) {
    Hyperedge& e = edges[t];
    e.centroid = pairs[t].first;
    e.members = {pairs[t].first, pairs[t].second};
    finish_edge(e, pc, st);
  });
  return edges;
}

}  // namespace detail

// One hyperedge per vertex holding its closed eps-ball. A disconnected
// result is flagged, not rejected; degenerate single-member edges are kept
// and simply contribute nothing to the energy.
inline Hypergraph build_eps_ball(const PointCloud& pc, double eps,
                                 const WeightScheme& scheme,
                                 const NeighborIndex* index = nullptr) {
  if (!(eps > 0.0))
    throw std::invalid_argument("build_eps_ball: eps must be > 0");
  detail::IndexRef local(pc, index);
  const auto st = detail::maybe_scales(pc, *local, scheme);
  const SelfTuningScales* stp =
      scheme.variant == WeightVariant::self_tuning ? &st : nullptr;

  Hypergraph hg;
  hg.n_vertices = pc.size();
  hg.kind = HypergraphKind::eps_ball;
  hg.scale_radius = eps;
  hg.scheme = scheme;
  hg.edges.resize(pc.size());
  parallel_for(pc.size(), [&](std::size_t k) {
    Hyperedge& e = hg.edges[k];
    e.centroid = static_cast<int>(k);
    e.members = local->query_ball(static_cast<int>(k), eps);
    detail::finish_edge(e, pc, stp);
  });
  hg.connected = is_connected(hg);
  return hg;
}

// One hyperedge per vertex holding its k nearest neighbors (self included),
// hence k-uniform. Records the effective radius bar_epsilon(k, n, d).
inline Hypergraph build_knn(const PointCloud& pc, int k,
                            const WeightScheme& scheme,
                            const NeighborIndex* index = nullptr) {
  if (k < 2 || static_cast<std::size_t>(k) > pc.size())
    throw std::invalid_argument("build_knn: need 2 <= k <= n");
  detail::IndexRef local(pc, index);
  const auto st = detail::maybe_scales(pc, *local, scheme);
  const SelfTuningScales* stp =
      scheme.variant == WeightVariant::self_tuning ? &st : nullptr;

  Hypergraph hg;
  hg.n_vertices = pc.size();
  hg.kind = HypergraphKind::knn;
  hg.knn_k = k;
  hg.scale_radius = bar_epsilon(static_cast<std::size_t>(k), pc.size(),
                                pc.dim());
  hg.scheme = scheme;
  hg.edges.resize(pc.size());
  parallel_for(pc.size(), [&](std::size_t j) {
    Hyperedge& e = hg.edges[j];
    e.centroid = static_cast<int>(j);
    e.members = local->query_knn(static_cast<int>(j), k);
    std::sort(e.members.begin(), e.members.end());
    detail::finish_edge(e, pc, stp);
  });
  hg.connected = is_connected(hg);
  return hg;
}

// Pairwise graph baseline as a hypergraph of size-2 edges, one per unordered
// neighbor pair, so the same solver and energy code serve both structures.
inline Hypergraph build_pair_graph_eps(const PointCloud& pc, double eps,
                                       const WeightScheme& scheme,
                                       const NeighborIndex* index = nullptr) {
  if (!(eps > 0.0))
    throw std::invalid_argument("build_pair_graph_eps: eps must be > 0");
  detail::IndexRef local(pc, index);
  const auto st = detail::maybe_scales(pc, *local, scheme);
  const SelfTuningScales* stp =
      scheme.variant == WeightVariant::self_tuning ? &st : nullptr;

  std::vector<std::pair<int, int>> pairs;
  for (std::size_t k = 0; k < pc.size(); ++k)
    for (int j : local->query_ball(static_cast<int>(k), eps))
      if (j != static_cast<int>(k)) pairs.emplace_back(static_cast<int>(k), j);

  Hypergraph hg;
  hg.n_vertices = pc.size();
  hg.kind = HypergraphKind::pair_graph_eps;
  hg.scale_radius = eps;
  hg.scheme = scheme;
  hg.edges = detail::pairs_to_edges(std::move(pairs), pc, stp);
  hg.connected = is_connected(hg);
  return hg;
}

// k-NN pair graph, symmetrized: the unordered pair {k, j} appears once if
// either endpoint lists the other among its k nearest.
inline Hypergraph build_pair_graph_knn(const PointCloud& pc, int k,
                                       const WeightScheme& scheme,
                                       const NeighborIndex* index = nullptr) {
  if (k < 2 || static_cast<std::size_t>(k) > pc.size())
    throw std::invalid_argument("build_pair_graph_knn: need 2 <= k <= n");
  detail::IndexRef local(pc, index);
  const auto st = detail::maybe_scales(pc, *local, scheme);
  const SelfTuningScales* stp =
      scheme.variant == WeightVariant::self_tuning ? &st : nullptr;

  std::vector<std::vector<int>> lists(pc.size());
  parallel_for(pc.size(), [&](std::size_t j) {
    lists[j] = local->query_knn(static_cast<int>(j), k);
  });
  std::vector<std::pair<int, int>> pairs;
  for (std::size_t kv = 0; kv < pc.size(); ++kv)
    for (int j : lists[kv])
      if (j != static_cast<int>(kv))
        pairs.emplace_back(static_cast<int>(kv), j);

  Hypergraph hg;
  hg.n_vertices = pc.size();
  hg.kind = HypergraphKind::pair_graph_knn;
  hg.knn_k = k;
  hg.scale_radius = bar_epsilon(static_cast<std::size_t>(k), pc.size(),
                                pc.dim());
  hg.scheme = scheme;
  hg.edges = detail::pairs_to_edges(std::move(pairs), pc, stp);
  hg.connected = is_connected(hg);
  return hg;
}

// Debug/diff serialization. Pair weights are emitted explicitly (ones
// included) so two implementations can be compared field by field.
inline nlohmann::json hypergraph_to_json(const Hypergraph& hg) {
  nlohmann::json j;
  j["n"] = hg.n_vertices;
  j["kind"] = to_string(hg.kind);
  j["scale"] = hg.scale_radius;
  if (hg.knn_k > 0) j["k"] = hg.knn_k;
  j["weight_scheme"] = hg.scheme.variant == WeightVariant::homogeneous
                           ? "homogeneous"
                           : "selftuning:" + std::to_string(hg.scheme.k0);
  j["connected"] = hg.connected;
  nlohmann::json edges = nlohmann::json::array();
  for (const auto& e : hg.edges) {
    nlohmann::json je;
    je["centroid"] = e.centroid;
    je["members"] = e.members;
    if (e.homogeneous_weights())
      je["pair_weights"] = std::vector<double>(e.pair_count(), 1.0);
    else
      je["pair_weights"] = e.pair_weights;
    edges.push_back(std::move(je));
  }
  j["edges"] = std::move(edges);
  return j;
}

}  // namespace hpl
