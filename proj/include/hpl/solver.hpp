#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "hpl/energy.hpp"
#include "hpl/hypergraph.hpp"
#include "hpl/point_cloud.hpp"
#include "hpl/prox.hpp"
#include "hpl/random.hpp"

namespace hpl {

// Constrained minimization of (1/p) sum_k max_{(i,j) in e_k} w_ij|u_i-u_j|^p
// subject to u = y on the labeled set, via a stochastic primal-dual scheme:
// every iteration takes a full primal step (a gradient-like move followed by
// exact projection onto the constraints) and a prox update of one randomly
// sampled dual block, with extrapolation on that block.

struct SaddleProblem {
  const Hypergraph* hypergraph = nullptr;
  LabelConstraints constraints;
  double p = 2.0;
};

struct SolverConfig {
  double tau = 0.0;    // 0 => derive both steps from safety/step_ratio
  double sigma = 0.0;
  double step_ratio = 1.0;  // r: tau = r*s0, sigma = s0/r
  double safety = 0.99;
  std::vector<double> probabilities;  // per-edge sampling weights; empty => uniform
  std::size_t epochs = 500;
  std::size_t min_epochs = 5;  // burn-in before the tol stop may fire
  double tol = 1e-6;  // epoch-granular relative primal-change threshold
  std::uint64_t seed = 0;
  std::vector<double> warm_start;  // empty => y on labels, 0 elsewhere
};

// Row r of the edge operator maps u to w_r^(1/p) * (u_i - u_j), pairs in
// lexicographic order by (i, j), i < j over the sorted member list.
inline std::vector<double> apply_edge_op(std::span<const double> u,
                                         const Hyperedge& edge, double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("apply_edge_op: p must be >= 1");
  for (int v : edge.members)
    if (v < 0 || static_cast<std::size_t>(v) >= u.size())
      throw std::invalid_argument("apply_edge_op: member out of range");
  const std::size_t m = edge.member_count();
  std::vector<double> out(edge.pair_count());
  std::size_t r = 0;
  for (std::size_t a = 0; a < m; ++a) {
    const double ua = u[static_cast<std::size_t>(edge.members[a])];
    for (std::size_t b = a + 1; b < m; ++b, ++r) {
      const double d = ua - u[static_cast<std::size_t>(edge.members[b])];
      const double w = edge.pair_weight(r);
      out[r] = (w == 1.0 ? d : std::pow(w, 1.0 / p) * d);
    }
  }
  return out;
}

// accumulator += scale * A_k^T alpha.
inline void apply_edge_op_adjoint(std::span<const double> alpha,
                                  const Hyperedge& edge, double p,
                                  std::span<double> accumulator, double scale) {
  if (alpha.size() != edge.pair_count())
    throw std::invalid_argument("apply_edge_op_adjoint: shape mismatch");
  const std::size_t m = edge.member_count();
  std::size_t r = 0;
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = a + 1; b < m; ++b, ++r) {
      const double w = edge.pair_weight(r);
      const double v = scale * (w == 1.0 ? alpha[r]
                                         : std::pow(w, 1.0 / p) * alpha[r]);
      accumulator[static_cast<std::size_t>(edge.members[a])] += v;
      accumulator[static_cast<std::size_t>(edge.members[b])] -= v;
    }
  }
}

// Steps satisfying sigma*tau = safety / (E * max_k ||A_k||^2), the safe form
// of the convergence condition under uniform sampling. The balance r scales
// tau by r and sigma by 1/r, preserving the product.
inline std::pair<double, double> default_steps(const Hypergraph& hg,
                                               double safety, double ratio) {
  if (!(safety > 0.0 && safety < 1.0))
    throw std::invalid_argument("default_steps: safety must be in (0,1)");
  if (!(ratio > 0.0))
    throw std::invalid_argument("default_steps: ratio must be > 0");
  if (hg.edges.empty())
    throw std::invalid_argument("default_steps: hypergraph has no edges");
  double maxnorm = hg.max_op_norm_sq();
  if (maxnorm <= 0.0) maxnorm = 1.0;  // no pair anywhere; steps are inert
  const double s0 =
      std::sqrt(safety / (static_cast<double>(hg.edges.size()) * maxnorm));
  return {s0 * ratio, s0 / ratio};
}

// Full iteration state. The primal vector is evaluated lazily: between
// changes of z at a coordinate, u drifts linearly (u_j(t) = base - tau*(t -
// stamp)*z_j), so a primal step is O(1) and a dual update costs O(|e_i|^2)
// instead of O(n). z is maintained incrementally as sum_k A_k^T alpha_bar_k,
// where alpha_bar differs from alpha only on the most recently picked edge.
class SpdhgState {
 public:
  SpdhgState(const SaddleProblem& prob, const SolverConfig& cfg)
      : hg_(prob.hypergraph), p_(prob.p) {
    if (hg_ == nullptr || hg_->edges.empty())
      throw std::invalid_argument("SpdhgState: empty problem");
    if (!(p_ >= 1.0)) throw std::invalid_argument("SpdhgState: p must be >= 1");
    n_ = hg_->n_vertices;
    edge_count_ = hg_->edges.size();

    constraints_ = prob.constraints;
    constraints_.normalize_and_validate(n_);
    constrained_.assign(n_, 0);
    yval_.assign(n_, 0.0);
    for (const auto& [i, y] : constraints_.entries) {
      constrained_[static_cast<std::size_t>(i)] = 1;
      yval_[static_cast<std::size_t>(i)] = y;
    }

    setup_probabilities(cfg.probabilities);
    setup_steps(cfg);

    u_base_.assign(n_, 0.0);
    if (!cfg.warm_start.empty()) {
      if (cfg.warm_start.size() != n_)
        throw std::invalid_argument("SpdhgState: warm start length mismatch");
      u_base_ = cfg.warm_start;
    }
    for (std::size_t v = 0; v < n_; ++v)
      if (constrained_[v]) u_base_[v] = yval_[v];
    stamp_.assign(n_, 0);
    z_.assign(n_, 0.0);
    alphas_.resize(edge_count_);
    wroot_.resize(edge_count_);
    for (std::size_t k = 0; k < edge_count_; ++k) {
      const auto& e = hg_->edges[k];
      if (!e.homogeneous_weights()) {
        wroot_[k].resize(e.pair_count());
        for (std::size_t r = 0; r < e.pair_count(); ++r)
          wroot_[k][r] = std::pow(e.pair_weights[r], 1.0 / p_);
      }
    }
  }

  // u <- prox of the constraint indicator at (u - tau*z): constrained
  // coordinates land exactly on their labels, the rest take the gradient-like
  // move. Realized by advancing the lazy clock.
  void primal_step() { ++time_; }

  // Picks edge i with probability p_i, then alpha_i <- prox(alpha_i +
  // sigma*A_i*u). Only edge i's dual changes. Returns i.
  int dual_step(Rng& rng) {
    const std::size_t i = sample(rng);
    const auto& e = hg_->edges[i];
    const std::size_t m = e.member_count();
    const std::size_t np = e.pair_count();
    auto& alpha = alphas_[i];
    if (alpha.empty()) alpha.assign(np, 0.0);

    uv_.resize(m);
    for (std::size_t a = 0; a < m; ++a)
      uv_[a] = u_at(e.members[a]);
    beta_.resize(np);
    const double* wr = wroot_[i].empty() ? nullptr : wroot_[i].data();
    std::size_t r = 0;
    for (std::size_t a = 0; a < m; ++a) {
      const double ua = uv_[a];
      for (std::size_t b = a + 1; b < m; ++b, ++r) {
        const double row = wr ? wr[r] * (ua - uv_[b]) : (ua - uv_[b]);
        beta_[r] = alpha[r] + sigma_ * row;
      }
    }
    anew_.resize(np);
    if (np > 0) prox_g_star(beta_, prox_params_, anew_);
    pending_delta_.resize(np);
    for (std::size_t t = 0; t < np; ++t) {
      pending_delta_[t] = anew_[t] - alpha[t];
      alpha[t] = anew_[t];
    }
    pending_edge_ = static_cast<int>(i);
    return pending_edge_;
  }

  // alpha_bar_i <- alpha_i + (1/p_i) * (alpha_i - alpha_i_old) for the picked
  // edge; every other alpha_bar reverts to its alpha. z absorbs both changes
  // incrementally.
  void extrapolate(int picked) {
    if (picked != pending_edge_)
      throw std::logic_error("extrapolate: no pending dual update for edge");
    drop_previous_correction();
    const auto& e = hg_->edges[static_cast<std::size_t>(picked)];
    const std::size_t m = e.member_count();
    bool moved = false;
    for (double d : pending_delta_)
      if (d != 0.0) {
        moved = true;
        break;
      }
    if (moved) {
      // t = A_i^T delta, accumulated per member.
      tvals_.assign(m, 0.0);
      const double* wr = wroot_[static_cast<std::size_t>(picked)].empty()
                             ? nullptr
                             : wroot_[static_cast<std::size_t>(picked)].data();
      std::size_t r = 0;
      for (std::size_t a = 0; a < m; ++a) {
        for (std::size_t b = a + 1; b < m; ++b, ++r) {
          const double v = wr ? wr[r] * pending_delta_[r] : pending_delta_[r];
          tvals_[a] += v;
          tvals_[b] -= v;
        }
      }
      const double extra = invp_[static_cast<std::size_t>(picked)];
      prev_corr_vals_.resize(m);
      for (std::size_t a = 0; a < m; ++a) {
        const auto v = static_cast<std::size_t>(e.members[a]);
        materialize(v);
        z_[v] += (1.0 + extra) * tvals_[a];
        prev_corr_vals_[a] = extra * tvals_[a];
      }
      prev_edge_ = picked;
      prev_delta_.assign(pending_delta_.begin(), pending_delta_.end());
    }
    pending_edge_ = -1;
  }

  int step(Rng& rng) {
    primal_step();
    const int i = dual_step(rng);
    extrapolate(i);
    return i;
  }

  double u_at(int v) const {
    const auto j = static_cast<std::size_t>(v);
    if (constrained_[j]) return yval_[j];
    return u_base_[j] -
           tau_ * static_cast<double>(time_ - stamp_[j]) * z_[j];
  }

  std::vector<double> u() const {
    std::vector<double> out(n_);
    for (std::size_t v = 0; v < n_; ++v) out[v] = u_at(static_cast<int>(v));
    return out;
  }

  // Dual block k (zeros if never touched).
  std::vector<double> alpha(std::size_t k) const {
    if (!alphas_[k].empty()) return alphas_[k];
    return std::vector<double>(hg_->edges[k].pair_count(), 0.0);
  }

  // Extrapolated dual block k; differs from alpha(k) only on the most
  // recently updated edge.
  std::vector<double> alpha_bar(std::size_t k) const {
    auto out = alpha(k);
    if (static_cast<int>(k) == prev_edge_) {
      const double extra = invp_[k];
      for (std::size_t r = 0; r < out.size(); ++r)
        out[r] += extra * prev_delta_[r];
    }
    return out;
  }

  std::span<const double> z() const { return z_; }

  // Max deviation between the running accumulator and a cold recomputation
  // of sum_k A_k^T alpha_bar_k.
  double z_audit_error() const {
    std::vector<double> cold(n_, 0.0);
    for (std::size_t k = 0; k < edge_count_; ++k) {
      const auto ab = alpha_bar(k);
      bool any = false;
      for (double v : ab)
        if (v != 0.0) {
          any = true;
          break;
        }
      if (any) apply_edge_op_adjoint(ab, hg_->edges[k], p_, cold, 1.0);
    }
    double err = 0.0;
    for (std::size_t v = 0; v < n_; ++v)
      err = std::max(err, std::abs(cold[v] - z_[v]));
    return err;
  }

  // Warm-starts dual block k and rebuilds z cold (alpha_bar == alpha after).
  void set_dual(std::size_t k, std::vector<double> alpha) {
    if (alpha.size() != hg_->edges[k].pair_count())
      throw std::invalid_argument("set_dual: shape mismatch");
    for (std::size_t v = 0; v < n_; ++v) materialize(v);
    alphas_[k] = std::move(alpha);
    prev_edge_ = -1;
    pending_edge_ = -1;
    std::fill(z_.begin(), z_.end(), 0.0);
    for (std::size_t t = 0; t < edge_count_; ++t)
      if (!alphas_[t].empty())
        apply_edge_op_adjoint(alphas_[t], hg_->edges[t], p_, z_, 1.0);
  }

  double tau() const { return tau_; }
  double sigma() const { return sigma_; }
  std::int64_t iterations() const { return time_; }
  std::size_t n_vertices() const { return n_; }
  std::size_t edge_count() const { return edge_count_; }
  double step_bound_min() const { return bound_min_; }
  double step_bound_max() const { return bound_max_; }
  double p_exponent() const { return p_; }
  const Hypergraph& hypergraph() const { return *hg_; }
  const LabelConstraints& constraints() const { return constraints_; }

 private:
  void setup_probabilities(const std::vector<double>& probs) {
    if (probs.empty()) {
      uniform_ = true;
      invp_.assign(edge_count_, static_cast<double>(edge_count_));
      return;
    }
    if (probs.size() != edge_count_)
      throw std::invalid_argument("SpdhgState: probabilities length mismatch");
    double total = 0.0;
    for (double q : probs) {
      if (!(q > 0.0))
        throw std::invalid_argument(
            "SpdhgState: sampling probabilities must be strictly positive");
      total += q;
    }
    uniform_ = false;
    cum_.resize(edge_count_);
    invp_.resize(edge_count_);
    double acc = 0.0;
    for (std::size_t i = 0; i < edge_count_; ++i) {
      const double pi = probs[i] / total;
      invp_[i] = 1.0 / pi;
      acc += pi;
      cum_[i] = acc;
    }
    cum_.back() = 1.0;
  }

  void setup_steps(const SolverConfig& cfg) {
    if (cfg.tau > 0.0 && cfg.sigma > 0.0) {
      tau_ = cfg.tau;
      sigma_ = cfg.sigma;
    } else if (cfg.tau == 0.0 && cfg.sigma == 0.0) {
      std::tie(tau_, sigma_) = default_steps(*hg_, cfg.safety, cfg.step_ratio);
    } else {
      throw std::invalid_argument(
          "SpdhgState: give both tau and sigma, or neither");
    }
    prox_params_ = ProxParams::make(sigma_, p_);
    // sigma*tau <= safety * min_i p_i / ||A_i||^2 over edges that act.
    bound_min_ = std::numeric_limits<double>::infinity();
    bound_max_ = 0.0;
    for (std::size_t i = 0; i < edge_count_; ++i) {
      const double norm = hg_->edges[i].op_norm_sq;
      if (norm <= 0.0) continue;
      const double b = 1.0 / (invp_[i] * norm);  // p_i / ||A_i||^2
      bound_min_ = std::min(bound_min_, b);
      bound_max_ = std::max(bound_max_, b);
    }
    if (std::isinf(bound_min_)) {
      bound_min_ = bound_max_ = 0.0;  // nothing to bound
      return;
    }
    if (tau_ * sigma_ > cfg.safety * bound_min_ * (1.0 + 1e-12))
      throw std::invalid_argument(
          "SpdhgState: sigma*tau violates the step condition "
          "(need sigma*tau <= safety * min_i p_i/||A_i||^2)");
  }

  std::size_t sample(Rng& rng) {
    if (uniform_) return rng.index(edge_count_);
    const double x = rng.uniform01();
    return static_cast<std::size_t>(
        std::lower_bound(cum_.begin(), cum_.end(), x) - cum_.begin());
  }

  void materialize(std::size_t v) {
    if (!constrained_[v] && stamp_[v] != time_)
      u_base_[v] -= tau_ * static_cast<double>(time_ - stamp_[v]) * z_[v];
    stamp_[v] = time_;
  }

  void drop_previous_correction() {
    if (prev_edge_ < 0) return;
    const auto& e = hg_->edges[static_cast<std::size_t>(prev_edge_)];
    for (std::size_t a = 0; a < e.member_count(); ++a) {
      const auto v = static_cast<std::size_t>(e.members[a]);
      materialize(v);
      z_[v] -= prev_corr_vals_[a];
    }
    prev_edge_ = -1;
  }

  const Hypergraph* hg_;
  double p_;
  std::size_t n_ = 0;
  std::size_t edge_count_ = 0;
  LabelConstraints constraints_;
  std::vector<char> constrained_;
  std::vector<double> yval_;

  bool uniform_ = true;
  std::vector<double> cum_;
  std::vector<double> invp_;

  double tau_ = 0.0;
  double sigma_ = 0.0;
  double bound_min_ = 0.0;
  double bound_max_ = 0.0;
  ProxParams prox_params_ = ProxParams::make(1.0, 2.0);

  std::int64_t time_ = 0;
  std::vector<double> u_base_;
  std::vector<std::int64_t> stamp_;
  std::vector<double> z_;
  std::vector<std::vector<double>> alphas_;
  std::vector<std::vector<double>> wroot_;

  int prev_edge_ = -1;
  std::vector<double> prev_corr_vals_;
  std::vector<double> prev_delta_;
  int pending_edge_ = -1;
  std::vector<double> pending_delta_;

  // scratch
  std::vector<double> uv_, beta_, anew_, tvals_;
};

struct SolveDiagnostics {
  std::size_t epochs_run = 0;
  std::string stop_reason;
  std::vector<double> objective_history;  // one entry per epoch, plus start
  double final_objective = 0.0;
  double tau = 0.0;
  double sigma = 0.0;
  double step_bound_min = 0.0;  // min_i p_i/||A_i||^2 (enforced form)
  double step_bound_max = 0.0;  // max_i p_i/||A_i||^2 (logged for reference)
  std::vector<std::string> warnings;

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["epochs_run"] = epochs_run;
    j["stop_reason"] = stop_reason;
    j["objective_history"] = objective_history;
    j["final_objective"] = final_objective;
    j["step_sizes"] = {{"tau", tau},
                       {"sigma", sigma},
                       {"sigma_tau", tau * sigma},
                       {"bound_min", step_bound_min},
                       {"bound_max", step_bound_max}};
    j["warnings"] = warnings;
    return j;
  }
};

struct SolveResult {
  std::vector<double> u;
  SolveDiagnostics diagnostics;
};

// Runs SPDHG until the epoch budget is exhausted or the largest per-
// coordinate primal change over an epoch drops to tol*(1 + ||u||_inf).
// One epoch is edge_count dual updates.
inline SolveResult run(const SaddleProblem& prob, const SolverConfig& cfg) {
  if (prob.hypergraph == nullptr)
    throw std::invalid_argument("run: missing hypergraph");
  const Hypergraph& hg = *prob.hypergraph;
  SolveResult out;
  out.diagnostics.stop_reason = "epochs_exhausted";
  if (!hg.connected)
    out.diagnostics.warnings.push_back(
        "structure is disconnected; components interpolate independently");
  if (prob.constraints.empty()) {
    out.diagnostics.warnings.push_back(
        "no constraints: any constant minimizes the objective; returning 0");
    out.u.assign(hg.n_vertices, 0.0);
    out.diagnostics.stop_reason = "unconstrained";
    out.diagnostics.objective_history = {0.0};
    return out;
  }

  SpdhgState st(prob, cfg);
  Rng rng(cfg.seed);
  out.diagnostics.tau = st.tau();
  out.diagnostics.sigma = st.sigma();
  out.diagnostics.step_bound_min = st.step_bound_min();
  out.diagnostics.step_bound_max = st.step_bound_max();

  std::vector<double> current = st.u();
  out.diagnostics.objective_history.push_back(
      objective_value(current, hg, prob.p));
  const std::size_t per_epoch = st.edge_count();
  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    for (std::size_t t = 0; t < per_epoch; ++t) st.step(rng);
    const std::vector<double> next = st.u();
    out.diagnostics.objective_history.push_back(
        objective_value(next, hg, prob.p));
    double change = 0.0;
    double uinf = 0.0;
    for (std::size_t v = 0; v < next.size(); ++v) {
      change = std::max(change, std::abs(next[v] - current[v]));
      uinf = std::max(uinf, std::abs(next[v]));
    }
    current = next;
    out.diagnostics.epochs_run = epoch;
    if (epoch >= cfg.min_epochs && change <= cfg.tol * (1.0 + uinf)) {
      out.diagnostics.stop_reason = "tol_reached";
      break;
    }
  }
  out.u = std::move(current);
  out.diagnostics.final_objective =
      out.diagnostics.objective_history.back();
  return out;
}

// Dual objective at the current duals with u eliminated on unconstrained
// coordinates: sum_O y_i (sum_k A_k^T alpha_k)_i - sum_k g*(alpha_k).
// Meaningful near convergence, where the unconstrained components of the
// adjoint accumulator vanish.
inline double dual_value(const SpdhgState& st) {
  const auto& hg = st.hypergraph();
  std::vector<double> zc(st.n_vertices(), 0.0);
  for (std::size_t k = 0; k < st.edge_count(); ++k) {
    const auto a = st.alpha(k);
    bool any = false;
    for (double v : a)
      if (v != 0.0) {
        any = true;
        break;
      }
    if (any) apply_edge_op_adjoint(a, hg.edges[k], st.p_exponent(), zc, 1.0);
  }
  double value = 0.0;
  for (const auto& [i, y] : st.constraints().entries)
    value += y * zc[static_cast<std::size_t>(i)];
  const double p = st.p_exponent();
  if (p > 1.0) {
    const double pc = p / (p - 1.0);
    for (std::size_t k = 0; k < st.edge_count(); ++k) {
      const auto a = st.alpha(k);
      double l1 = 0.0;
      for (double v : a) l1 += std::abs(v);
      value -= std::pow(l1, pc) / pc;
    }
  }
  return value;
}

}  // namespace hpl
