#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

namespace hpl {

// Parameters of prox_{sigma g*} where g*(alpha) = h*(||alpha||_1) and
// h(t) = |t|^p / p. For p > 1, h*(s) = |s|^p' / p' with p' = p/(p-1);
// for p = 1, h* is the indicator of [-1, 1] and the prox is an L1-ball
// projection.
struct ProxParams {
  double sigma = 1.0;
  double p = 2.0;
  double p_conj = 2.0;  // p/(p-1); +inf tag when p == 1

  static ProxParams make(double sigma, double p) {
    if (!(sigma > 0.0)) throw std::invalid_argument("prox: sigma must be > 0");
    if (!(p >= 1.0)) throw std::invalid_argument("prox: p must be >= 1");
    ProxParams prm;
    prm.sigma = sigma;
    prm.p = p;
    prm.p_conj = p == 1.0 ? std::numeric_limits<double>::infinity()
                          : p / (p - 1.0);
    return prm;
  }
};

// Euclidean projection onto {alpha : ||alpha||_1 <= radius}. Sort-based
// exact threshold: O(m log m), plenty for per-edge pair counts.
inline void project_l1_ball(std::span<const double> beta, double radius,
                            std::span<double> out) {
  if (!(radius > 0.0))
    throw std::invalid_argument("project_l1_ball: radius must be > 0");
  if (out.size() != beta.size())
    throw std::invalid_argument("project_l1_ball: shape mismatch");
  const std::size_t m = beta.size();
  double l1 = 0.0;
  for (double b : beta) l1 += std::abs(b);
  if (l1 <= radius) {
    std::copy(beta.begin(), beta.end(), out.begin());
    return;
  }
  std::vector<double> a(m);
  for (std::size_t j = 0; j < m; ++j) a[j] = std::abs(beta[j]);
  std::sort(a.begin(), a.end(), std::greater<double>());
  double cumulative = 0.0;
  double lambda = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    cumulative += a[k];
    const double cand = (cumulative - radius) / static_cast<double>(k + 1);
    if (k + 1 == m || a[k + 1] <= cand) {
      lambda = cand;
      break;
    }
  }
  for (std::size_t j = 0; j < m; ++j) {
    const double v = std::max(std::abs(beta[j]) - lambda, 0.0);
    out[j] = beta[j] < 0.0 ? -v : v;
  }
}

inline std::vector<double> project_l1_ball(std::span<const double> beta,
                                           double radius) {
  std::vector<double> out(beta.size());
  project_l1_ball(beta, radius, out);
  return out;
}

// Unique root of s + b*sigma*s^(p'-1) = t on [0, t]. Closed form at p = 2;
// otherwise safeguarded bisection (the left side is increasing, and Newton
// is unguarded where p'-1 < 1 makes the derivative blow up at 0).
inline double solve_threshold_root(std::size_t b, double sigma, double p,
                                   double t) {
  if (b < 1) throw std::invalid_argument("solve_threshold_root: b must be >= 1");
  if (!(p > 1.0)) throw std::invalid_argument("solve_threshold_root: p must be > 1");
  if (!(t >= 0.0)) throw std::invalid_argument("solve_threshold_root: t must be >= 0");
  if (t == 0.0) return 0.0;
  const double bs = static_cast<double>(b) * sigma;
  if (p == 2.0) return t / (1.0 + bs);
  const double q = 1.0 / (p - 1.0);  // p' - 1
  // Tolerance is enforced on both s and the threshold sigma*s^q: for p > 2
  // the map s -> s^q is steep near 0 and a root accurate in s alone can
  // still give a poor threshold.
  const double tol = 1e-13 * std::max(1.0, t);
  double lo = 0.0;
  double hi = t;
  for (int it = 0; it < 200; ++it) {
    if (hi - lo <= tol &&
        sigma * (std::pow(hi, q) - std::pow(lo, q)) <= tol)
      break;
    const double mid = 0.5 * (lo + hi);
    const double f = mid + bs * std::pow(mid, q) - t;
    (f < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// Exact prox of sigma * g*: active-set thresholding. Each pass solves the
// scalar root equation on the current positive support, thresholds, and
// stops once every active entry clears the threshold; a failing pass
// strictly shrinks the support, so at most m passes run. The p = 1 case is
// the unit L1-ball projection.
inline void prox_g_star(std::span<const double> beta, const ProxParams& prm,
                        std::span<double> out) {
  if (out.size() != beta.size())
    throw std::invalid_argument("prox_g_star: shape mismatch");
  const std::size_t m = beta.size();
  if (m == 0) return;
  if (prm.p == 1.0) {
    project_l1_ball(beta, 1.0, out);
    return;
  }
  // out doubles as the alpha >= 0 work vector; start from |beta|.
  for (std::size_t j = 0; j < m; ++j) out[j] = std::abs(beta[j]);
  double lambda = 0.0;
  bool converged = false;
  for (std::size_t pass = 0; pass <= m && !converged; ++pass) {
    std::size_t active = 0;
    double total = 0.0;
    double min_active = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < m; ++j) {
      if (out[j] > 0.0) {
        const double a = std::abs(beta[j]);
        ++active;
        total += a;
        min_active = std::min(min_active, a);
      }
    }
    if (active == 0) {
      lambda = 0.0;
      converged = true;
      break;
    }
    const double s = solve_threshold_root(active, prm.sigma, prm.p, total);
    lambda = prm.sigma * std::pow(s, prm.p_conj - 1.0);
    for (std::size_t j = 0; j < m; ++j)
      out[j] = std::max(std::abs(beta[j]) - lambda, 0.0);
    converged = min_active - lambda >= 0.0;
  }
  if (!converged)
    throw std::logic_error("prox_g_star: active-set pass cap exceeded");
  for (std::size_t j = 0; j < m; ++j)
    if (beta[j] < 0.0) out[j] = -out[j];
}

inline std::vector<double> prox_g_star(std::span<const double> beta,
                                       const ProxParams& prm) {
  std::vector<double> out(beta.size());
  prox_g_star(beta, prm, out);
  return out;
}

// Residual of the prox fixed point
//   alpha = sign(beta) * max(|beta| - sigma * ||alpha||_1^(p'-1), 0)
// in the max norm; 0 means alpha is the exact prox. For p = 1 the residual
// is measured against the (unique) L1-ball projection instead.
inline double verify_fixed_point(std::span<const double> alpha,
                                 std::span<const double> beta,
                                 const ProxParams& prm) {
  if (alpha.size() != beta.size())
    throw std::invalid_argument("verify_fixed_point: shape mismatch");
  double res = 0.0;
  if (prm.p == 1.0) {
    const auto proj = project_l1_ball(beta, 1.0);
    for (std::size_t j = 0; j < alpha.size(); ++j)
      res = std::max(res, std::abs(alpha[j] - proj[j]));
    return res;
  }
  double l1 = 0.0;
  for (double a : alpha) l1 += std::abs(a);
  const double thr = prm.sigma * std::pow(l1, prm.p_conj - 1.0);
  for (std::size_t j = 0; j < alpha.size(); ++j) {
    const double v = std::max(std::abs(beta[j]) - thr, 0.0);
    const double target = beta[j] < 0.0 ? -v : v;
    res = std::max(res, std::abs(alpha[j] - target));
  }
  return res;
}

}  // namespace hpl
