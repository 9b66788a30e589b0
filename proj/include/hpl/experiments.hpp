#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "hpl/energy.hpp"
#include "hpl/hypergraph.hpp"
#include "hpl/neighbor_index.hpp"
#include "hpl/point_cloud.hpp"
#include "hpl/solver.hpp"

namespace hpl {

// Default training set for the 1D interpolation runs: the cloud points
// nearest to the six odd twelfths of (0,1), labeled with sin(2*pi*x) at the
// chosen point. Deterministic given the cloud.
inline LabelConstraints default_interp1d_labels(const PointCloud& cloud) {
  if (cloud.dim() != 1)
    throw std::invalid_argument("default_interp1d_labels: cloud must be 1D");
  LabelConstraints lc;
  std::vector<char> used(cloud.size(), 0);
  for (int t = 0; t < 6; ++t) {
    const double target = (2.0 * t + 1.0) / 12.0;
    int best = -1;
    double best_d = 0.0;
    for (std::size_t i = 0; i < cloud.size(); ++i) {
      if (used[i]) continue;
      const double d = std::abs(cloud.coord(i, 0) - target);
      if (best < 0 || d < best_d) {
        best = static_cast<int>(i);
        best_d = d;
      }
    }
    used[static_cast<std::size_t>(best)] = 1;
    lc.add(best, std::sin(2.0 * std::numbers::pi *
                          cloud.coord(static_cast<std::size_t>(best), 0)));
  }
  return lc;
}

// Spike diagnostic: max over labeled points of |u(x_i) - median of u over a
// doubled neighborhood of x_i (2*eps ball or 2k nearest) excluding x_i|.
// Large values mean the estimate jumps at the labels relative to its
// surroundings.
inline double spike_index(const NeighborIndex& index,
                          std::span<const double> u,
                          const LabelConstraints& labels, GraphFamily family,
                          double eps, int k) {
  double worst = 0.0;
  for (const auto& [i, y] : labels.entries) {
    std::vector<int> nb;
    if (family == GraphFamily::eps) {
      nb = index.query_ball(i, 2.0 * eps);
    } else {
      const int kk = std::min<std::size_t>(2 * static_cast<std::size_t>(k),
                                           index.size());
      nb = index.query_knn(i, kk);
    }
    std::vector<double> vals;
    vals.reserve(nb.size());
    for (int j : nb)
      if (j != i) vals.push_back(u[static_cast<std::size_t>(j)]);
    if (vals.empty()) continue;
    std::sort(vals.begin(), vals.end());
    const std::size_t m = vals.size();
    const double median = m % 2 == 1
                              ? vals[m / 2]
                              : 0.5 * (vals[m / 2 - 1] + vals[m / 2]);
    worst = std::max(worst,
                     std::abs(u[static_cast<std::size_t>(i)] - median));
  }
  return worst;
}

struct Interp1dConfig {
  std::size_t n = 1280;
  GraphFamily family = GraphFamily::eps;
  double eps = 0.048;
  int k = 36;
  double p = 2.0;
  WeightScheme scheme = WeightScheme::homogeneous();
  std::uint64_t seed = 0;
  SolverConfig solver;                 // seed is taken from this config
  LabelConstraints labels;             // empty => default six-point set
};

struct Interp1dResult {
  PointCloud cloud;
  LabelConstraints labels;
  std::vector<double> u_gpl;
  std::vector<double> u_hpl;
  double spike_gpl = 0.0;
  double spike_hpl = 0.0;
  SolveDiagnostics diag_gpl;
  SolveDiagnostics diag_hpl;
  std::vector<std::string> warnings;
};

// Samples a 1D cloud, solves the same constrained interpolation with the
// pairwise-graph and hypergraph regularizers, and scores both with the
// spike index.
inline Interp1dResult run_interp1d(const Interp1dConfig& cfg) {
  Interp1dResult out;
  out.cloud = sample_uniform_1d(cfg.n, cfg.seed);
  const NeighborIndex index(out.cloud);
  out.labels = cfg.labels.empty() ? default_interp1d_labels(out.cloud)
                                  : cfg.labels;

  Hypergraph pair_hg, hyper_hg;
  if (cfg.family == GraphFamily::eps) {
    pair_hg = build_pair_graph_eps(out.cloud, cfg.eps, cfg.scheme, &index);
    hyper_hg = build_eps_ball(out.cloud, cfg.eps, cfg.scheme, &index);
  } else {
    pair_hg = build_pair_graph_knn(out.cloud, cfg.k, cfg.scheme, &index);
    hyper_hg = build_knn(out.cloud, cfg.k, cfg.scheme, &index);
  }
  if (!pair_hg.connected || !hyper_hg.connected)
    out.warnings.push_back("graph is disconnected at the requested scale");

  SaddleProblem prob;
  prob.p = cfg.p;
  prob.constraints = out.labels;

  prob.hypergraph = &pair_hg;
  SolveResult gpl = run(prob, cfg.solver);
  prob.hypergraph = &hyper_hg;
  SolveResult hpl = run(prob, cfg.solver);

  out.spike_gpl = spike_index(index, gpl.u, out.labels, cfg.family, cfg.eps,
                              cfg.k);
  out.spike_hpl = spike_index(index, hpl.u, out.labels, cfg.family, cfg.eps,
                              cfg.k);
  out.u_gpl = std::move(gpl.u);
  out.u_hpl = std::move(hpl.u);
  out.diag_gpl = std::move(gpl.diagnostics);
  out.diag_hpl = std::move(hpl.diagnostics);
  for (const auto& w : out.diag_gpl.warnings) out.warnings.push_back(w);
  return out;
}

}  // namespace hpl
