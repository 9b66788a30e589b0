#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "hpl/hypergraph.hpp"
#include "hpl/parallel.hpp"
#include "hpl/point_cloud.hpp"
#include "hpl/solver.hpp"

namespace hpl {

// Training classes for multi-class labeling: distinct class ids plus the
// labeled subset.
struct ClassLabels {
  std::vector<int> class_ids;                    // distinct, ascending
  std::vector<std::pair<int, int>> assignments;  // (vertex, class id)

  static ClassLabels from_assignments(
      std::vector<std::pair<int, int>> assignments) {
    ClassLabels cl;
    cl.assignments = std::move(assignments);
    for (const auto& [v, c] : cl.assignments) cl.class_ids.push_back(c);
    std::sort(cl.class_ids.begin(), cl.class_ids.end());
    cl.class_ids.erase(std::unique(cl.class_ids.begin(), cl.class_ids.end()),
                       cl.class_ids.end());
    return cl;
  }

  void validate(std::size_t n_vertices) const {
    if (assignments.empty())
      throw std::invalid_argument("ClassLabels: empty label set");
    for (const auto& [v, c] : assignments) {
      if (v < 0 || static_cast<std::size_t>(v) >= n_vertices)
        throw std::invalid_argument("ClassLabels: vertex out of range");
      if (!std::binary_search(class_ids.begin(), class_ids.end(), c))
        throw std::invalid_argument("ClassLabels: class id not listed");
    }
  }
};

struct OneVsRestResult {
  std::vector<int> predictions;               // class id per vertex
  std::vector<std::vector<double>> scores;    // one indicator solve per class
  std::vector<std::string> warnings;
};

// One-vs-rest labeling: for each class, solve the constrained problem with
// the one-hot indicator on the training set, then assign every unlabeled
// vertex the argmax class (ties toward the smaller class id). Labeled
// vertices keep their training label. Class solves share the hypergraph and
// run independently.
inline OneVsRestResult one_vs_rest(const Hypergraph& hg,
                                   const ClassLabels& labels, double p,
                                   const SolverConfig& cfg) {
  labels.validate(hg.n_vertices);
  OneVsRestResult out;
  const std::size_t n_classes = labels.class_ids.size();
  for (int c : labels.class_ids) {
    bool seen = false;
    for (const auto& [v, cv] : labels.assignments)
      if (cv == c) seen = true;
    if (!seen)
      out.warnings.push_back("class " + std::to_string(c) +
                             " has no labeled vertex");
  }

  out.scores.resize(n_classes);
  parallel_for(n_classes, [&](std::size_t ci) {
    const int c = labels.class_ids[ci];
    SaddleProblem prob;
    prob.hypergraph = &hg;
    prob.p = p;
    for (const auto& [v, cv] : labels.assignments)
      prob.constraints.add(v, cv == c ? 1.0 : 0.0);
    out.scores[ci] = run(prob, cfg).u;
  });

  out.predictions.assign(hg.n_vertices, labels.class_ids.front());
  for (std::size_t v = 0; v < hg.n_vertices; ++v) {
    double best = -std::numeric_limits<double>::infinity();
    int arg = labels.class_ids.front();
    for (std::size_t ci = 0; ci < n_classes; ++ci) {
      const double s = out.scores[ci][v];
      if (s > best) {
        best = s;
        arg = labels.class_ids[ci];
      }
    }
    out.predictions[v] = arg;
  }
  for (const auto& [v, c] : labels.assignments)
    out.predictions[static_cast<std::size_t>(v)] = c;
  return out;
}

// Fraction of matching entries; with exclude_training the labeled vertices
// are left out of the evaluated set.
inline double accuracy(std::span<const int> predicted,
                       std::span<const int> truth,
                       std::span<const int> training_vertices,
                       bool exclude_training) {
  if (predicted.size() != truth.size())
    throw std::invalid_argument("accuracy: length mismatch");
  std::vector<char> skip(predicted.size(), 0);
  if (exclude_training)
    for (int v : training_vertices) skip[static_cast<std::size_t>(v)] = 1;
  std::size_t total = 0;
  std::size_t hit = 0;
  for (std::size_t v = 0; v < predicted.size(); ++v) {
    if (skip[v]) continue;
    ++total;
    if (predicted[v] == truth[v]) ++hit;
  }
  if (total == 0) return 0.0;
  return static_cast<double>(hit) / static_cast<double>(total);
}

}  // namespace hpl
