#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <vector>

#include <json.hpp>

#include "hpl/prox.hpp"
#include "hpl/random.hpp"

namespace hpl {

namespace selftest {

// Brute-force minimizer of 0.5*||a - beta||^2 + sigma*||a||_1^p' / p',
// independent of the active-set prox: the L1 norm t of the minimizer is
// located by grid search plus golden-section, and for fixed t the inner
// minimizer is the soft-thresholding of beta to L1 norm exactly t (threshold
// found by bisection). Only used to cross-check prox_g_star.
inline double prox_oracle_objective(const std::vector<double>& beta,
                                    double sigma, double p) {
  const double pc = p / (p - 1.0);
  double l1 = 0.0;
  double linf = 0.0;
  for (double b : beta) {
    l1 += std::abs(b);
    linf = std::max(linf, std::abs(b));
  }
  auto soft_to_radius = [&](double t, std::vector<double>& out) {
    // threshold lam with sum max(|beta| - lam, 0) = t, lam in [0, linf]
    double lo = 0.0, hi = linf;
    for (int it = 0; it < 100; ++it) {
      const double lam = 0.5 * (lo + hi);
      double s = 0.0;
      for (double b : beta) s += std::max(std::abs(b) - lam, 0.0);
      (s > t ? lo : hi) = lam;
    }
    const double lam = 0.5 * (lo + hi);
    out.resize(beta.size());
    for (std::size_t j = 0; j < beta.size(); ++j) {
      const double v = std::max(std::abs(beta[j]) - lam, 0.0);
      out[j] = beta[j] < 0.0 ? -v : v;
    }
  };
  std::vector<double> a;
  auto phi = [&](double t) {
    if (t >= l1) {
      return sigma * std::pow(l1, pc) / pc;  // a == beta
    }
    soft_to_radius(t, a);
    double q = 0.0;
    for (std::size_t j = 0; j < beta.size(); ++j) {
      const double d = a[j] - beta[j];
      q += d * d;
    }
    return 0.5 * q + sigma * std::pow(t, pc) / pc;
  };
  // coarse grid to bracket, then golden section
  double best_t = 0.0;
  double best = phi(0.0);
  const int grid = 64;
  for (int g = 1; g <= grid; ++g) {
    const double t = l1 * g / grid;
    const double v = phi(t);
    if (v < best) {
      best = v;
      best_t = t;
    }
  }
  double lo = std::max(0.0, best_t - l1 / grid);
  double hi = std::min(l1, best_t + l1 / grid);
  const double gr = 0.6180339887498949;
  double c = hi - gr * (hi - lo);
  double d = lo + gr * (hi - lo);
  for (int it = 0; it < 200; ++it) {
    if (phi(c) < phi(d))
      hi = d;
    else
      lo = c;
    c = hi - gr * (hi - lo);
    d = lo + gr * (hi - lo);
  }
  return std::min(best, phi(0.5 * (lo + hi)));
}

}  // namespace selftest

struct ProxSelfTestReport {
  std::size_t instances = 0;
  std::size_t failures = 0;
  double max_residual = 0.0;
  double max_objective_gap = 0.0;
  double elapsed_seconds = 0.0;

  nlohmann::json to_json() const {
    return {{"instances", instances},
            {"failures", failures},
            {"max_residual", max_residual},
            {"max_objective_gap", max_objective_gap},
            {"elapsed_seconds", elapsed_seconds}};
  }
};

// Random prox instances checked against the brute-force oracle (objective
// within 1e-6) and against the fixed-point identity (residual within
// 1e-9 * max(1, ||beta||_inf)).
inline ProxSelfTestReport run_prox_selftest(std::size_t instances,
                                            std::size_t max_m,
                                            std::uint64_t seed) {
  const auto t0 = std::chrono::steady_clock::now();
  ProxSelfTestReport rep;
  rep.instances = instances;
  Rng rng(seed);
  const double pool[4] = {1.5, 2.0, 3.0, 4.0};
  std::vector<double> beta;
  for (std::size_t t = 0; t < instances; ++t) {
    const std::size_t m = 1 + rng.index(max_m);
    const double p = pool[rng.index(4)];
    const double sigma = 0.01 * std::pow(1000.0, rng.uniform01());  // [0.01,10]
    beta.resize(m);
    double linf = 0.0;
    for (auto& b : beta) {
      b = 2.0 * rng.gaussian();
      linf = std::max(linf, std::abs(b));
    }
    const auto prm = ProxParams::make(sigma, p);
    const auto alpha = prox_g_star(beta, prm);
    const double pc = prm.p_conj;
    double q = 0.0;
    double l1 = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      const double d = alpha[j] - beta[j];
      q += d * d;
      l1 += std::abs(alpha[j]);
    }
    const double obj = 0.5 * q + sigma * std::pow(l1, pc) / pc;
    const double oracle = selftest::prox_oracle_objective(beta, sigma, p);
    const double gap = obj - oracle;
    const double res = verify_fixed_point(alpha, beta, prm);
    rep.max_objective_gap = std::max(rep.max_objective_gap, gap);
    rep.max_residual = std::max(rep.max_residual, res);
    if (gap > 1e-6 || res > 1e-9 * std::max(1.0, linf)) ++rep.failures;
  }
  rep.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return rep;
}

}  // namespace hpl
