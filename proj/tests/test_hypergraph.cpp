#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <vector>

#include "hpl/hypergraph.hpp"
#include "hpl/random.hpp"

using namespace hpl;

namespace {

PointCloud three_points() {
  PointCloud pc(1);
  pc.append({0.0});
  pc.append({0.5});
  pc.append({1.0});
  return pc;
}

PointCloud random_cloud(std::size_t n, int d, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> data(n * static_cast<std::size_t>(d));
  for (auto& v : data) v = rng.uniform(0.0, 1.0);
  return PointCloud::from_flat(d, std::move(data));
}

// Top eigenvalue of A^T A via power iteration on the explicit operator,
// built directly from the definition (rows w^(1/p) (e_i - e_j)).
double top_eig_sq(const Hyperedge& e, double p) {
  const std::size_t m = e.member_count();
  std::vector<double> x(m, 0.0), y(m);
  for (std::size_t t = 0; t < m; ++t) x[t] = 1.0 / std::sqrt(double(m) + t);
  double lambda = 0.0;
  for (int it = 0; it < 2000; ++it) {
    std::fill(y.begin(), y.end(), 0.0);
    std::size_t r = 0;
    for (std::size_t a = 0; a < m; ++a)
      for (std::size_t b = a + 1; b < m; ++b, ++r) {
        const double w = std::pow(e.pair_weight(r), 2.0 / p);
        const double d = x[a] - x[b];
        y[a] += w * d;
        y[b] -= w * d;
      }
    double norm = 0.0;
    for (double v : y) norm += v * v;
    norm = std::sqrt(norm);
    if (norm == 0.0) return 0.0;
    lambda = norm;
    for (std::size_t t = 0; t < m; ++t) x[t] = y[t] / norm;
  }
  return lambda;
}

std::vector<int> members_of(const Hypergraph& hg, int centroid) {
  return hg.edges[static_cast<std::size_t>(centroid)].members;
}

}  // namespace

TEST(BarEpsilon, MatchesDirectEvaluation) {
  EXPECT_NEAR(bar_epsilon(10, 100, 1), 0.05, 1e-15);
  const double alpha2 = std::numbers::pi;
  EXPECT_NEAR(bar_epsilon(10, 1000, 2), std::sqrt(10.0 / (alpha2 * 1000.0)),
              1e-15);
  // k = n
  const double alpha3 =
      std::pow(std::numbers::pi, 1.5) / std::tgamma(2.5);
  EXPECT_NEAR(bar_epsilon(50, 50, 3), std::pow(1.0 / alpha3, 1.0 / 3.0),
              1e-15);
}

TEST(BarEpsilon, InverseIdentityToMachinePrecision) {
  Rng rng(4);
  for (int t = 0; t < 50; ++t) {
    const std::size_t n = 10 + rng.index(100000);
    const std::size_t k = 1 + rng.index(n);
    const int d = 1 + static_cast<int>(rng.index(5));
    const double alpha_d =
        std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d + 1.0);
    const double prod =
        bar_epsilon(k, n, d) *
        std::pow(alpha_d * double(n) / double(k), 1.0 / d);
    EXPECT_NEAR(prod, 1.0, 1e-12);
  }
}

TEST(DeltaN, MatchesDirectEvaluation) {
  EXPECT_NEAR(delta_n(1000, 3), std::pow(std::log(1000.0), 1.0 / 3.0) / 10.0,
              1e-12);
  EXPECT_NEAR(delta_n(1000, 1), std::sqrt(std::log(std::log(1000.0)) / 1000.0),
              1e-12);
}

TEST(DeltaN, StrictlyDecreasingInN) {
  for (int d : {1, 2, 3}) {
    double prev = delta_n(10, d);
    for (double x = 1.1; x <= 6.0; x += 0.1) {
      const auto n = static_cast<std::size_t>(std::pow(10.0, x));
      const double cur = delta_n(n, d);
      EXPECT_LT(cur, prev) << "d=" << d << " n=" << n;
      prev = cur;
    }
  }
}

TEST(BuildEpsBall, MembersAtModerateRadius) {
  const auto hg =
      build_eps_ball(three_points(), 0.6, WeightScheme::homogeneous());
  EXPECT_EQ(members_of(hg, 0), (std::vector<int>{0, 1}));
  EXPECT_EQ(members_of(hg, 1), (std::vector<int>{0, 1, 2}));
  EXPECT_EQ(members_of(hg, 2), (std::vector<int>{1, 2}));
  EXPECT_TRUE(hg.connected);
  EXPECT_EQ(hg.kind, HypergraphKind::eps_ball);
  EXPECT_DOUBLE_EQ(hg.scale_radius, 0.6);
}

TEST(BuildEpsBall, SingletonsBelowMinGapAreFlaggedDisconnected) {
  const auto hg =
      build_eps_ball(three_points(), 0.4, WeightScheme::homogeneous());
  for (int k = 0; k < 3; ++k)
    EXPECT_EQ(members_of(hg, k), std::vector<int>{k});
  EXPECT_FALSE(hg.connected);
}

TEST(BuildEpsBall, RadiusBeyondDiameterGivesFullEdges) {
  const auto hg =
      build_eps_ball(three_points(), 5.0, WeightScheme::homogeneous());
  for (int k = 0; k < 3; ++k)
    EXPECT_EQ(members_of(hg, k), (std::vector<int>{0, 1, 2}));
}

TEST(BuildEpsBall, NonPositiveRadiusRejected) {
  EXPECT_THROW(build_eps_ball(three_points(), 0.0, WeightScheme::homogeneous()),
               std::invalid_argument);
}

TEST(BuildKnn, MembersWithTieRule) {
  const auto hg = build_knn(three_points(), 2, WeightScheme::homogeneous());
  EXPECT_EQ(members_of(hg, 0), (std::vector<int>{0, 1}));
  EXPECT_EQ(members_of(hg, 1), (std::vector<int>{0, 1}));  // tie -> index 0
  EXPECT_EQ(members_of(hg, 2), (std::vector<int>{1, 2}));
  EXPECT_EQ(hg.knn_k, 2);
  EXPECT_NEAR(hg.scale_radius, bar_epsilon(2, 3, 1), 1e-15);
}

TEST(BuildKnn, FullNeighborhoodAtKEqualsN) {
  const auto hg = build_knn(three_points(), 3, WeightScheme::homogeneous());
  for (int k = 0; k < 3; ++k)
    EXPECT_EQ(members_of(hg, k), (std::vector<int>{0, 1, 2}));
}

TEST(BuildKnn, UniformEdgeCardinality) {
  const auto pc = random_cloud(100, 2, 8);
  const auto hg = build_knn(pc, 5, WeightScheme::homogeneous());
  for (const auto& e : hg.edges) EXPECT_EQ(e.member_count(), 5u);
}

TEST(BuildKnn, InvalidKRejected) {
  EXPECT_THROW(build_knn(three_points(), 1, WeightScheme::homogeneous()),
               std::invalid_argument);
  EXPECT_THROW(build_knn(three_points(), 4, WeightScheme::homogeneous()),
               std::invalid_argument);
}

TEST(BuildPairGraph, EpsEmitsEachUnorderedPairOnce) {
  const auto hg =
      build_pair_graph_eps(three_points(), 0.6, WeightScheme::homogeneous());
  ASSERT_EQ(hg.edges.size(), 2u);
  EXPECT_EQ(hg.edges[0].members, (std::vector<int>{0, 1}));
  EXPECT_EQ(hg.edges[1].members, (std::vector<int>{1, 2}));
  EXPECT_TRUE(hg.is_pair_graph());
}

TEST(BuildPairGraph, NoEdgesBelowMinGap) {
  const auto hg =
      build_pair_graph_eps(three_points(), 0.3, WeightScheme::homogeneous());
  EXPECT_TRUE(hg.edges.empty());
  EXPECT_FALSE(hg.connected);
}

TEST(BuildPairGraph, KnnSymmetrized) {
  const auto hg =
      build_pair_graph_knn(three_points(), 2, WeightScheme::homogeneous());
  ASSERT_EQ(hg.edges.size(), 2u);
  EXPECT_EQ(hg.edges[0].members, (std::vector<int>{0, 1}));
  EXPECT_EQ(hg.edges[1].members, (std::vector<int>{1, 2}));
}

TEST(IsConnected, SingleVertexIsConnected) {
  PointCloud pc(1);
  pc.append({0.3});
  const auto hg = build_eps_ball(pc, 0.1, WeightScheme::homogeneous());
  EXPECT_TRUE(hg.connected);
}

TEST(SelfTuningWeights, MatchesClosedForm) {
  PointCloud pc(1);
  pc.append({0.0});
  pc.append({1.0});
  pc.append({2.0});
  const NeighborIndex idx(pc);
  const auto st = self_tuning_weights(pc, idx, 1);
  EXPECT_DOUBLE_EQ(st.sigma[0], 1.0);
  EXPECT_NEAR(st.weight(pc, 0, 1), std::exp(-1.0), 1e-15);
  EXPECT_DOUBLE_EQ(st.weight(pc, 1, 1), 1.0);
}

TEST(SelfTuningWeights, DuplicatesFallBackToPositiveScale) {
  PointCloud pc(1);
  pc.append({0.0});
  pc.append({0.0});
  pc.append({3.0});
  const NeighborIndex idx(pc);
  const auto st = self_tuning_weights(pc, idx, 1);
  // vertex 0's nearest neighbor is its duplicate; scale falls back to 3
  EXPECT_DOUBLE_EQ(st.sigma[0], 3.0);
  EXPECT_DOUBLE_EQ(st.weight(pc, 0, 1), 1.0);  // zero distance
}

TEST(SelfTuningWeights, AllCoincidentGivesUnitWeights) {
  PointCloud pc(1);
  pc.append({1.0});
  pc.append({1.0});
  const NeighborIndex idx(pc);
  const auto st = self_tuning_weights(pc, idx, 1);
  EXPECT_DOUBLE_EQ(st.weight(pc, 0, 1), 1.0);
}

TEST(SelfTuningWeights, MonotoneDecreasingInDistance) {
  const auto pc = random_cloud(40, 2, 12);
  const NeighborIndex idx(pc);
  const auto st = self_tuning_weights(pc, idx, 5);
  for (int i = 0; i < 10; ++i) {
    std::vector<std::pair<double, double>> dw;
    for (std::size_t j = 0; j < pc.size(); ++j)
      if (j != static_cast<std::size_t>(i))
        dw.push_back({squared_distance(pc, i, j), st.weight(pc, i, (int)j)});
    std::sort(dw.begin(), dw.end());
    for (std::size_t t = 1; t < dw.size(); ++t)
      EXPECT_LE(dw[t].second, dw[t - 1].second + 1e-15);
  }
  EXPECT_THROW(self_tuning_weights(pc, idx, 40), std::invalid_argument);
}

TEST(EdgeOperatorNorm, HomogeneousClosedForms) {
  Hyperedge e;
  e.centroid = 0;
  e.members = {0, 1, 2};
  EXPECT_DOUBLE_EQ(edge_operator_norm_sq(e), 3.0);
  e.members = {4};
  EXPECT_DOUBLE_EQ(edge_operator_norm_sq(e), 0.0);
  e.members = {0, 1};
  EXPECT_DOUBLE_EQ(edge_operator_norm_sq(e), 2.0);
}

TEST(EdgeOperatorNorm, DominatesPowerIterationOnSmallEdges) {
  Rng rng(31);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t m = 2 + rng.index(7);  // up to 8 members
    Hyperedge e;
    e.centroid = 0;
    for (std::size_t t = 0; t < m; ++t) e.members.push_back(static_cast<int>(t));
    const bool weighted = rng.uniform01() < 0.7;
    double mx = 0.0;
    if (weighted) {
      e.pair_weights.resize(m * (m - 1) / 2);
      for (auto& w : e.pair_weights) {
        w = rng.uniform01();
        mx = std::max(mx, w);
      }
      e.max_pair_weight = mx;
    }
    e.op_norm_sq = edge_operator_norm_sq(e);
    for (double p : {1.5, 2.0, 3.0}) {
      const double eig = top_eig_sq(e, p);
      EXPECT_GE(e.op_norm_sq, eig - 1e-9)
          << "m=" << m << " weighted=" << weighted << " p=" << p;
    }
  }
}

TEST(Builders, MatchBruteForceConstruction) {
  for (int d : {1, 2, 3}) {
    const auto pc = random_cloud(200, d, 200 + static_cast<unsigned>(d));
    const NeighborIndex idx(pc);
    const double eps = d == 1 ? 0.05 : (d == 2 ? 0.15 : 0.3);
    const auto scheme = WeightScheme::self_tuning(6);
    const auto st = self_tuning_weights(pc, idx, 6);

    const auto hg = build_eps_ball(pc, eps, scheme, &idx);
    ASSERT_EQ(hg.edges.size(), pc.size());
    for (std::size_t k = 0; k < pc.size(); ++k) {
      std::vector<int> expect;
      for (std::size_t j = 0; j < pc.size(); ++j)
        if (squared_distance(pc, k, j) <= eps * eps)
          expect.push_back(static_cast<int>(j));
      ASSERT_EQ(hg.edges[k].members, expect) << "d=" << d << " k=" << k;
      std::size_t r = 0;
      for (std::size_t a = 0; a < expect.size(); ++a)
        for (std::size_t b = a + 1; b < expect.size(); ++b, ++r) {
          const double w = std::max(st.weight(pc, expect[a], expect[b]),
                                    st.weight(pc, expect[b], expect[a]));
          ASSERT_NEAR(hg.edges[k].pair_weights[r], w, 1e-15);
        }
    }

    const auto hk = build_knn(pc, 6, WeightScheme::homogeneous(), &idx);
    for (std::size_t k = 0; k < pc.size(); ++k) {
      auto expect = idx.query_knn(static_cast<int>(k), 6);
      std::sort(expect.begin(), expect.end());
      ASSERT_EQ(hk.edges[k].members, expect);
      ASSERT_EQ(hk.edges[k].member_count(), 6u);
    }
  }
}

TEST(Builders, EpsBallMonotoneInRadius) {
  const auto pc = random_cloud(80, 2, 77);
  const auto small = build_eps_ball(pc, 0.1, WeightScheme::homogeneous());
  const auto large = build_eps_ball(pc, 0.2, WeightScheme::homogeneous());
  for (std::size_t k = 0; k < pc.size(); ++k) {
    const auto& a = small.edges[k].members;
    const auto& b = large.edges[k].members;
    EXPECT_TRUE(std::includes(b.begin(), b.end(), a.begin(), a.end()));
  }
}

TEST(HypergraphJson, CarriesStructureFields) {
  const auto hg =
      build_eps_ball(three_points(), 0.6, WeightScheme::homogeneous());
  const auto j = hypergraph_to_json(hg);
  EXPECT_EQ(j["n"], 3);
  EXPECT_EQ(j["kind"], "eps_ball");
  EXPECT_DOUBLE_EQ(j["scale"].get<double>(), 0.6);
  ASSERT_EQ(j["edges"].size(), 3u);
  EXPECT_EQ(j["edges"][1]["members"], (std::vector<int>{0, 1, 2}));
  EXPECT_EQ(j["edges"][1]["pair_weights"].size(), 3u);
}
