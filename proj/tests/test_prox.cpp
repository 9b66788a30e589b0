#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "hpl/prox.hpp"
#include "hpl/prox_selftest.hpp"
#include "hpl/random.hpp"

using namespace hpl;

namespace {

// Independent projection oracle: bisection on the soft threshold instead of
// the sort-based closed form used by the implementation.
std::vector<double> bisect_l1_projection(const std::vector<double>& beta,
                                         double radius) {
  double l1 = 0.0, linf = 0.0;
  for (double b : beta) {
    l1 += std::abs(b);
    linf = std::max(linf, std::abs(b));
  }
  if (l1 <= radius) return beta;
  double lo = 0.0, hi = linf;
  for (int it = 0; it < 200; ++it) {
    const double lam = 0.5 * (lo + hi);
    double s = 0.0;
    for (double b : beta) s += std::max(std::abs(b) - lam, 0.0);
    (s > radius ? lo : hi) = lam;
  }
  const double lam = 0.5 * (lo + hi);
  std::vector<double> out(beta.size());
  for (std::size_t j = 0; j < beta.size(); ++j) {
    const double v = std::max(std::abs(beta[j]) - lam, 0.0);
    out[j] = beta[j] < 0.0 ? -v : v;
  }
  return out;
}

std::vector<double> random_beta(Rng& rng, std::size_t m, double scale = 2.0) {
  std::vector<double> beta(m);
  for (auto& b : beta) b = scale * rng.gaussian();
  return beta;
}

}  // namespace

TEST(ProjectL1Ball, FeasiblePointUnchanged) {
  const std::vector<double> beta = {0.3, -0.2};
  const auto out = project_l1_ball(beta, 1.0);
  EXPECT_DOUBLE_EQ(out[0], 0.3);
  EXPECT_DOUBLE_EQ(out[1], -0.2);
}

TEST(ProjectL1Ball, HandThresholdCases) {
  const auto a = project_l1_ball(std::vector<double>{2.0, 0.0}, 1.0);
  EXPECT_NEAR(a[0], 1.0, 1e-15);
  EXPECT_NEAR(a[1], 0.0, 1e-15);
  const auto b = project_l1_ball(std::vector<double>{1.0, 1.0}, 1.0);
  EXPECT_NEAR(b[0], 0.5, 1e-15);
  EXPECT_NEAR(b[1], 0.5, 1e-15);
}

TEST(ProjectL1Ball, MatchesIndependentOracle) {
  Rng rng(77);
  for (int t = 0; t < 1000; ++t) {
    const std::size_t m = 1 + rng.index(8);
    const auto beta = random_beta(rng, m);
    const double radius = 0.1 + 3.0 * rng.uniform01();
    const auto mine = project_l1_ball(beta, radius);
    const auto oracle = bisect_l1_projection(beta, radius);
    for (std::size_t j = 0; j < m; ++j)
      ASSERT_NEAR(mine[j], oracle[j], 1e-10);
    double l1 = 0.0;
    for (double v : mine) l1 += std::abs(v);
    ASSERT_LE(l1, radius + 1e-12);
  }
}

TEST(SolveThresholdRoot, ClosedFormAtPTwo) {
  EXPECT_DOUBLE_EQ(solve_threshold_root(2, 0.5, 2.0, 3.0), 1.5);
}

TEST(SolveThresholdRoot, AnalyticRootAtPThree) {
  // p' - 1 = 1/2: s + sqrt(s) = 2 -> s = 1
  EXPECT_NEAR(solve_threshold_root(1, 1.0, 3.0, 2.0), 1.0, 1e-10);
}

TEST(SolveThresholdRoot, ZeroTargetGivesZero) {
  for (double p : {1.5, 2.0, 4.0})
    EXPECT_DOUBLE_EQ(solve_threshold_root(3, 0.7, p, 0.0), 0.0);
}

TEST(SolveThresholdRoot, ResidualWithinTolerance) {
  Rng rng(5);
  for (int t = 0; t < 200; ++t) {
    const std::size_t b = 1 + rng.index(10);
    const double sigma = 0.01 * std::pow(1000.0, rng.uniform01());
    const double p = 1.0 + 0.2 + 3.0 * rng.uniform01();
    const double target = 5.0 * rng.uniform01();
    const double s = solve_threshold_root(b, sigma, p, target);
    const double lhs =
        s + double(b) * sigma * std::pow(s, 1.0 / (p - 1.0));
    EXPECT_NEAR(lhs, target, 1e-10 * std::max(1.0, target));
  }
}

TEST(ProxGStar, HandRunSinglePass) {
  const auto prm = ProxParams::make(0.5, 2.0);
  const auto a = prox_g_star(std::vector<double>{2.0, -1.0}, prm);
  EXPECT_NEAR(a[0], 1.25, 1e-12);
  EXPECT_NEAR(a[1], -0.25, 1e-12);
  EXPECT_NEAR(verify_fixed_point(a, std::vector<double>{2.0, -1.0}, prm), 0.0,
              1e-15);
}

TEST(ProxGStar, HandRunWithDeactivation) {
  const auto prm = ProxParams::make(1.0, 2.0);
  const auto a = prox_g_star(std::vector<double>{5.0, 0.1}, prm);
  EXPECT_NEAR(a[0], 2.5, 1e-12);
  EXPECT_NEAR(a[1], 0.0, 1e-15);
}

TEST(ProxGStar, ZeroInputMapsToZero) {
  for (double p : {1.0, 1.5, 2.0, 4.0}) {
    const auto prm = ProxParams::make(2.0, p);
    const auto a = prox_g_star(std::vector<double>{0.0, 0.0, 0.0}, prm);
    for (double v : a) EXPECT_DOUBLE_EQ(v, 0.0);
  }
}

TEST(ProxGStar, PEqualsOneIsUnitBallProjection) {
  Rng rng(9);
  const auto prm = ProxParams::make(0.8, 1.0);
  for (int t = 0; t < 100; ++t) {
    const auto beta = random_beta(rng, 1 + rng.index(6));
    const auto a = prox_g_star(beta, prm);
    const auto proj = project_l1_ball(beta, 1.0);
    for (std::size_t j = 0; j < beta.size(); ++j)
      ASSERT_NEAR(a[j], proj[j], 1e-12);
  }
}

TEST(ProxGStar, OracleSuitePasses) {
  const auto rep = run_prox_selftest(1000, 6, 2024);
  EXPECT_EQ(rep.failures, 0u);
  EXPECT_LE(rep.max_objective_gap, 1e-6);
  EXPECT_LE(rep.max_residual, 1e-9);
}

TEST(ProxGStar, FixedPointResidualOnRandomInstances) {
  Rng rng(13);
  for (int t = 0; t < 500; ++t) {
    const std::size_t m = 1 + rng.index(12);
    const double p = 1.0 + 0.5 + 3.5 * rng.uniform01();
    const double sigma = 0.01 * std::pow(1000.0, rng.uniform01());
    const auto prm = ProxParams::make(sigma, p);
    const auto beta = random_beta(rng, m);
    const auto a = prox_g_star(beta, prm);
    double linf = 0.0;
    for (double b : beta) linf = std::max(linf, std::abs(b));
    EXPECT_LE(verify_fixed_point(a, beta, prm), 1e-9 * std::max(1.0, linf));
  }
}

TEST(ProxGStar, SignAndOrderPreservation) {
  Rng rng(15);
  for (int t = 0; t < 300; ++t) {
    const std::size_t m = 2 + rng.index(6);
    const double p = 1.5 + 2.5 * rng.uniform01();
    const auto prm = ProxParams::make(0.05 + 2.0 * rng.uniform01(), p);
    const auto beta = random_beta(rng, m);
    const auto a = prox_g_star(beta, prm);
    for (std::size_t j = 0; j < m; ++j) {
      if (a[j] != 0.0)
        ASSERT_GT(a[j] * beta[j], 0.0);  // sign(alpha) in {0, sign(beta)}
      for (std::size_t i = 0; i < m; ++i)
        if (std::abs(beta[i]) <= std::abs(beta[j]))
          ASSERT_LE(std::abs(a[i]), std::abs(a[j]) + 1e-12);
    }
  }
}

TEST(ProxGStar, Nonexpansive) {
  Rng rng(19);
  for (int t = 0; t < 300; ++t) {
    const std::size_t m = 1 + rng.index(6);
    const double p = 1.0 + 3.0 * rng.uniform01();
    const auto prm = ProxParams::make(0.05 + 3.0 * rng.uniform01(), p);
    const auto b1 = random_beta(rng, m);
    const auto b2 = random_beta(rng, m);
    const auto a1 = prox_g_star(b1, prm);
    const auto a2 = prox_g_star(b2, prm);
    double da = 0.0, db = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      da += (a1[j] - a2[j]) * (a1[j] - a2[j]);
      db += (b1[j] - b2[j]) * (b1[j] - b2[j]);
    }
    ASSERT_LE(std::sqrt(da), std::sqrt(db) + 1e-12);
  }
}

TEST(ProxGStar, PTwoClosedFormThreshold) {
  Rng rng(23);
  for (int t = 0; t < 200; ++t) {
    const std::size_t m = 1 + rng.index(6);
    const double sigma = 0.05 + 3.0 * rng.uniform01();
    const auto prm = ProxParams::make(sigma, 2.0);
    const auto beta = random_beta(rng, m);
    const auto a = prox_g_star(beta, prm);
    double active_sum = 0.0;
    std::size_t active = 0;
    for (std::size_t j = 0; j < m; ++j)
      if (a[j] != 0.0) {
        active_sum += std::abs(beta[j]);
        ++active;
      }
    if (active == 0) continue;
    const double lambda =
        sigma * active_sum / (1.0 + sigma * double(active));
    for (std::size_t j = 0; j < m; ++j) {
      const double v = std::max(std::abs(beta[j]) - lambda, 0.0);
      ASSERT_NEAR(std::abs(a[j]), v, 1e-10);
    }
  }
}

// As p -> 1+ the prox tends to the unit L1-ball projection. The wall at
// ||beta||_1 = 1 softens at rate Theta(p-1): measured worst deviations for
// ||beta||_1 in [0.8, 1.2] are ~3e-2 at p = 1.01 and ~3e-3 at p = 1.001, so
// the per-coordinate comparison is asserted at those levels and the two
// levels must be ordered.
TEST(ProxGStar, ApproachesL1ProjectionAsPGoesToOne) {
  double worst[2] = {0.0, 0.0};
  const double ps[2] = {1.01, 1.001};
  for (int pi = 0; pi < 2; ++pi) {
    Rng rng(29);
    const auto prm = ProxParams::make(1.0, ps[pi]);
    for (int t = 0; t < 200; ++t) {
      auto beta = random_beta(rng, 1 + rng.index(6), 0.4);
      double l1 = 0.0;
      for (double b : beta) l1 += std::abs(b);
      if (l1 < 1e-9) continue;
      for (auto& b : beta) b *= (0.8 + 0.4 * rng.uniform01()) / l1;  // near 1
      const auto a = prox_g_star(beta, prm);
      const auto proj = project_l1_ball(beta, 1.0);
      for (std::size_t j = 0; j < beta.size(); ++j)
        worst[pi] = std::max(worst[pi], std::abs(a[j] - proj[j]));
    }
  }
  EXPECT_LE(worst[0], 5e-2);
  EXPECT_LE(worst[1], 1e-2);
  EXPECT_LT(worst[1], worst[0]);  // tighter as p -> 1
}

TEST(VerifyFixedPoint, DetectsNonSolutions) {
  const auto prm = ProxParams::make(10.0, 2.0);
  const std::vector<double> beta = {1.0};
  EXPECT_GT(verify_fixed_point(beta, beta, prm), 0.0);
  const std::vector<double> zero = {0.0};
  EXPECT_DOUBLE_EQ(verify_fixed_point(zero, zero, prm), 0.0);
  EXPECT_THROW(verify_fixed_point(std::vector<double>{1.0, 2.0}, beta, prm),
               std::invalid_argument);
}
