#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "hpl/hypergraph.hpp"
#include "hpl/image.hpp"
#include "hpl/neighbor_index.hpp"
#include "hpl/parallel.hpp"
#include "hpl/point_cloud.hpp"
#include "hpl/solver.hpp"

namespace hpl {

enum class InpaintMethod { gpl, hpl };

inline const char* to_string(InpaintMethod m) {
  return m == InpaintMethod::gpl ? "gpl" : "hpl";
}

// Patch-space configuration for inpainting. Patches are s1 x s2 windows
// (odd sides, centered on the pixel) read from a mirror-extended image;
// with lambda > 0 two extra coordinates lambda*(i/N1, j/N2) localize the
// nearest-neighbor search.
struct PatchConfig {
  int s1 = 11;
  int s2 = 11;
  double lambda = 10.0;
  int k_n = 21;
  int K = 0;  // outer iterations; 0 = default per method (15 gpl, 3 hpl)
  InpaintMethod method = InpaintMethod::hpl;
  double p = 2.0;

  void validate() const {
    if (s1 < 1 || s2 < 1 || s1 % 2 == 0 || s2 % 2 == 0)
      throw std::invalid_argument("PatchConfig: s1, s2 must be odd and >= 1");
    if (lambda < 0.0)
      throw std::invalid_argument("PatchConfig: lambda must be >= 0");
    if (k_n < 2) throw std::invalid_argument("PatchConfig: k_n must be >= 2");
    if (K < 0) throw std::invalid_argument("PatchConfig: K must be >= 0");
    if (!(p >= 1.0)) throw std::invalid_argument("PatchConfig: p must be >= 1");
  }
  int outer_iterations() const {
    if (K > 0) return K;
    return method == InpaintMethod::gpl ? 15 : 3;
  }
};

inline std::size_t vertex_of_pixel(const ImageGrid& img, std::size_t i,
                                   std::size_t j) {
  return i * img.cols + j;
}

// One point per pixel in row-major order; patch coordinates first (row-major
// within the window), then the lambda-scaled pixel coordinates when
// lambda > 0. The center coordinate of each patch equals the pixel value.
inline PointCloud extract_patches(const ImageGrid& img,
                                  const PatchConfig& cfg) {
  cfg.validate();
  const int hi = (cfg.s1 - 1) / 2;
  const int hj = (cfg.s2 - 1) / 2;
  if (static_cast<std::size_t>(hi) >= img.rows ||
      static_cast<std::size_t>(hj) >= img.cols)
    throw std::invalid_argument("extract_patches: patch larger than image");
  const ImageGrid ext = mirror_extend(img, hi, hj);
  const bool semilocal = cfg.lambda > 0.0;
  const int dim = cfg.s1 * cfg.s2 + (semilocal ? 2 : 0);
  std::vector<double> data(img.pixel_count() * static_cast<std::size_t>(dim));
  parallel_for(img.rows, [&](std::size_t i) {
    for (std::size_t j = 0; j < img.cols; ++j) {
      double* p = data.data() +
                  vertex_of_pixel(img, i, j) * static_cast<std::size_t>(dim);
      for (int di = 0; di < cfg.s1; ++di)
        for (int dj = 0; dj < cfg.s2; ++dj)
          *p++ = ext.at(i + static_cast<std::size_t>(di),
                        j + static_cast<std::size_t>(dj));
      if (semilocal) {
        *p++ = cfg.lambda * static_cast<double>(i) /
               static_cast<double>(img.rows);
        *p++ = cfg.lambda * static_cast<double>(j) /
               static_cast<double>(img.cols);
      }
    }
  });
  return PointCloud::from_flat(dim, std::move(data));
}

// Observed pixels kept, every unobserved pixel set to the observed mean.
inline ImageGrid mean_fill(const ImageGrid& obs, const PixelMask& mask) {
  if (obs.rows != mask.rows || obs.cols != mask.cols)
    throw std::invalid_argument("mean_fill: shape mismatch");
  if (mask.empty()) throw std::invalid_argument("mean_fill: empty mask");
  double mean = 0.0;
  std::size_t count = 0;
  for (std::size_t t = 0; t < obs.v.size(); ++t)
    if (mask.flags[t]) {
      mean += obs.v[t];
      ++count;
    }
  mean /= static_cast<double>(count);
  ImageGrid out(obs.rows, obs.cols, mean);
  for (std::size_t t = 0; t < obs.v.size(); ++t)
    if (mask.flags[t]) out.v[t] = obs.v[t];
  return out;
}

struct InpaintDiagnostics {
  std::vector<nlohmann::json> iterations;
  std::vector<std::string> warnings;

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["iterations"] = iterations;
    j["warnings"] = warnings;
    return j;
  }
};

// Alternating restoration from sparse pixels: rebuild the patch cloud from
// the current estimate, pin observed patches to their pixel values, solve,
// write the vertex values back, repeat. Each inner solve warm-starts from
// the current estimate. Neighbor search runs in the semilocal patch space
// and the self-tuning scale uses the k_n-th neighbor.
//
// Without an explicit initial guess, gpl starts from the observed-mean fill
// and hpl starts from a full gpl pass.
inline ImageGrid inpaint(const ImageGrid& obs, const PixelMask& mask,
                         const PatchConfig& cfg, const SolverConfig& solver_cfg,
                         const ImageGrid* initial = nullptr,
                         InpaintDiagnostics* diag = nullptr) {
  cfg.validate();
  if (obs.rows != mask.rows || obs.cols != mask.cols)
    throw std::invalid_argument("inpaint: image/mask shape mismatch");
  if (mask.empty()) throw std::invalid_argument("inpaint: empty mask");

  ImageGrid current;
  if (initial != nullptr) {
    if (initial->rows != obs.rows || initial->cols != obs.cols)
      throw std::invalid_argument("inpaint: initial guess shape mismatch");
    current = *initial;
  } else if (cfg.method == InpaintMethod::gpl) {
    current = mean_fill(obs, mask);
  } else {
    PatchConfig warm = cfg;
    warm.method = InpaintMethod::gpl;
    warm.K = 0;  // gpl default
    current = inpaint(obs, mask, warm, solver_cfg, nullptr, diag);
  }
  for (std::size_t t = 0; t < obs.v.size(); ++t)
    if (mask.flags[t]) current.v[t] = obs.v[t];

  const int K = cfg.outer_iterations();
  for (int outer = 0; outer < K; ++outer) {
    const PointCloud cloud = extract_patches(current, cfg);
    const NeighborIndex index(cloud);
    const WeightScheme scheme = WeightScheme::self_tuning(cfg.k_n);
    Hypergraph hg = cfg.method == InpaintMethod::gpl
                        ? build_pair_graph_knn(cloud, cfg.k_n, scheme, &index)
                        : build_knn(cloud, cfg.k_n, scheme, &index);

    SaddleProblem prob;
    prob.hypergraph = &hg;
    prob.p = cfg.p;
    for (std::size_t i = 0; i < obs.rows; ++i)
      for (std::size_t j = 0; j < obs.cols; ++j)
        if (mask.contains(i, j))
          prob.constraints.add(
              static_cast<int>(vertex_of_pixel(obs, i, j)), obs.at(i, j));

    SolverConfig inner = solver_cfg;
    inner.warm_start = current.v;
    const SolveResult res = run(prob, inner);
    current.v = res.u;
    if (diag != nullptr) {
      nlohmann::json it;
      it["method"] = to_string(cfg.method);
      it["outer"] = outer;
      it["epochs_run"] = res.diagnostics.epochs_run;
      it["stop_reason"] = res.diagnostics.stop_reason;
      it["final_objective"] = res.diagnostics.final_objective;
      diag->iterations.push_back(std::move(it));
      for (const auto& w : res.diagnostics.warnings)
        diag->warnings.push_back(w);
    }
  }
  for (std::size_t t = 0; t < obs.v.size(); ++t)
    if (mask.flags[t]) current.v[t] = obs.v[t];
  current.clamp01();
  return current;
}

}  // namespace hpl
