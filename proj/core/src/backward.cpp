#include "batchtail/backward.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "batchtail/errors.hpp"
#include "batchtail/parallel.hpp"
#include "batchtail/rng.hpp"

namespace batchtail {

StatWeights stat_weights(int stages, int n, int n1) {
  if (n1 < 1 || n1 >= n) throw parameter_error("stat_weights: counts must be interior");
  const int n2 = n - n1;
  const double inv_sqrt_s = 1.0 / std::sqrt(static_cast<double>(stages));
  StatWeights w;
  w.l_dot = {inv_sqrt_s * std::sqrt(static_cast<double>(n2) / n),
             -inv_sqrt_s * std::sqrt(static_cast<double>(n1) / n)};
  w.l_ddot = {std::sqrt(static_cast<double>(n) / n1), -std::sqrt(static_cast<double>(n) / n2)};
  return w;
}

double integrand(std::span<const Vec3> y, std::span<const StatWeights> weights,
                 std::span<const int> n, double x) {
  double acc = 0.0;
  for (std::size_t s = 0; s < y.size(); ++s) {
    const double shrink = 1.0 - y[s][2] / (2.0 * std::sqrt(static_cast<double>(n[s])));
    acc += weights[s].l_dot[0] * y[s][0] * shrink + weights[s].l_dot[1] * y[s][1] * shrink;
  }
  return acc >= x ? 1.0 : 0.0;
}

MvNormal3 proposal(double x, const Vec2& l_dot, double sum_sq_ldot, const Mat3& vbar, double p) {
  if (!(p > 1.0)) throw parameter_error("proposal: scale p must exceed 1");
  const Vec3 mu{x * l_dot[0] / sum_sq_ldot, x * l_dot[1] / sum_sq_ldot, 0.0};
  Mat3 cov;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) cov.m[i][j] = p * vbar.m[i][j];
  return MvNormal3(mu, cov);
}

namespace {

Vec3 draw_at(const MvNormal3& q, std::uint64_t seed, int stage, std::int64_t i) {
  CounterRng rng({seed, make_stream(StreamKind::importance, stage + 1)},
                 static_cast<std::uint64_t>(i));
  const Vec3 z{rng.next_normal(), rng.next_normal(), rng.next_normal()};
  return q.transport(z);
}

// Prune a count law's support to cumulative mass >= 1 - 2e-11, dropping the
// lightest tail entries symmetrically.
void pruned_support(const CountLaw& law, std::vector<int>& counts, std::vector<double>& weights) {
  int lo = 0, hi = static_cast<int>(law.weights.size()) - 1;
  double dropped = 0.0;
  constexpr double kTailBudget = 1e-11;
  while (lo < hi && dropped + law.weights[lo] <= kTailBudget) dropped += law.weights[lo++];
  dropped = 0.0;
  while (hi > lo && dropped + law.weights[hi] <= kTailBudget) dropped += law.weights[hi--];
  counts.clear();
  weights.clear();
  for (int k = lo; k <= hi; ++k) {
    counts.push_back(law.lo + k);
    weights.push_back(law.weights[k]);
  }
}

// Covariance of the sigma-normalized stage vector at (possibly fractional)
// expected counts; used only to shape the proposal.
Mat3 transformed_cov_at(double n1, double n2, double n, const MomentSet& mom, double sigma2) {
  Mat3 v;
  v.m[0][0] = v.m[1][1] = sigma2;
  v.m[0][1] = v.m[1][0] = 0.0;
  v.m[2][2] = mom.mu4 - sigma2 * sigma2;
  v.m[0][2] = v.m[2][0] = std::sqrt(n1 / n) * mom.mu3;
  v.m[1][2] = v.m[2][1] = std::sqrt(n2 / n) * mom.mu3;
  const double s = std::sqrt(sigma2);
  const double d[3] = {1.0 / s, 1.0 / s, 1.0 / (s * s)};
  Mat3 out;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) out.m[i][j] = d[i] * v.m[i][j] * d[j];
  return out;
}

}  // namespace

std::pair<double, double> is_estimate(const std::function<double(const Vec3&, const Vec3&)>& f,
                                      const MvNormal3& q1, const MvNormal3& q2,
                                      std::int64_t draws, std::uint64_t seed, int threads) {
  if (draws < 1000) throw parameter_error("is_estimate: need at least 1e3 draws");
  std::vector<double> ratios(draws);
  parallel_for(draws, threads, [&](std::int64_t b, std::int64_t e) {
    for (std::int64_t i = b; i < e; ++i) {
      const Vec3 y1 = draw_at(q1, seed, 0, i);
      const Vec3 y2 = draw_at(q2, seed, 1, i);
      const double q = q1.pdf(y1) * q2.pdf(y2);
      const double r = f(y1, y2) / q;
      if (!std::isfinite(r)) {
        throw error("is_estimate: non-finite importance ratio at draw " + std::to_string(i));
      }
      ratios[i] = r;
    }
  });
  double sum = 0.0;
  for (double r : ratios) sum += r;
  const double mean = sum / draws;
  double ss = 0.0;
  for (double r : ratios) ss += (r - mean) * (r - mean);
  const double sd = std::sqrt(ss / (draws - 1));
  return {mean, sd / std::sqrt(static_cast<double>(draws))};
}

TailEvaluator::TailEvaluator(const DesignConfig& config, double x_ref)
    : stages_(config.stages),
      draws_(config.is.draws),
      threads_(config.threads),
      x_ref_(x_ref),
      lower_side_(x_ref < 0.0),
      policy_(config.stage2_policy) {
  config.validate();
  const double p_scale = config.is.scale_p;

  stage_.resize(stages_);
  std::vector<MvNormal3> props(stages_);
  std::vector<double> expected_n1(stages_);
  std::vector<MomentSet> moms(stages_);

  // Per-stage laws, weights and expected counts.
  for (int s = 0; s < stages_; ++s) {
    StageData& st = stage_[s];
    st.n = config.n[s];
    st.sqrt_n = std::sqrt(static_cast<double>(st.n));
    moms[s] = standardized_moments(config.noise[s]);
    st.sigma = std::sqrt(moms[s].sigma2);

    std::vector<std::array<double, 2>> branch_probs;
    if (s == 0) {
      branch_probs = {config.stage1_probs};
    } else {
      branch_probs = policy_.branches();
    }
    st.branches.resize(branch_probs.size());
    double mean_acc = 0.0;
    for (std::size_t b = 0; b < branch_probs.size(); ++b) {
      BranchData& br = st.branches[b];
      const CountLaw law = clamped_binomial(st.n, branch_probs[b][0], config.min_arm_count);
      pruned_support(law, br.counts, br.weights);
      br.weight_sum = 0.0;
      for (double w : br.weights) br.weight_sum += w;
      br.l_dot.resize(br.counts.size());
      br.l_ddot.resize(br.counts.size());
      for (std::size_t m = 0; m < br.counts.size(); ++m) {
        const StatWeights sw = stat_weights(stages_, st.n, br.counts[m]);
        br.l_dot[m] = sw.l_dot;
        br.l_ddot[m] = sw.l_ddot;
      }
      mean_acc += law.mean();
    }
    expected_n1[s] = mean_acc / static_cast<double>(branch_probs.size());
  }

  // Proposals at expected counts (branch-agnostic; shapes variance only).
  double sum_sq_ldot = 0.0;
  std::vector<Vec2> ldot_bar(stages_);
  for (int s = 0; s < stages_; ++s) {
    const double n = stage_[s].n;
    const double n1 = expected_n1[s], n2 = n - expected_n1[s];
    const double inv_sqrt_s = 1.0 / std::sqrt(static_cast<double>(stages_));
    ldot_bar[s] = {inv_sqrt_s * std::sqrt(n2 / n), -inv_sqrt_s * std::sqrt(n1 / n)};
    sum_sq_ldot += ldot_bar[s][0] * ldot_bar[s][0] + ldot_bar[s][1] * ldot_bar[s][1];
  }
  for (int s = 0; s < stages_; ++s) {
    const double n = stage_[s].n;
    const Mat3 vbar =
        transformed_cov_at(expected_n1[s], n - expected_n1[s], n, moms[s], moms[s].sigma2);
    props[s] = proposal(x_ref_, ldot_bar[s], sum_sq_ldot, vbar, p_scale);
  }

  // Expansion measures per (stage, branch, count).
  std::vector<std::vector<std::vector<ExpansionMeasure>>> measures(stages_);
  for (int s = 0; s < stages_; ++s) {
    measures[s].resize(stage_[s].branches.size());
    for (std::size_t b = 0; b < stage_[s].branches.size(); ++b) {
      const BranchData& br = stage_[s].branches[b];
      measures[s][b].reserve(br.counts.size());
      for (std::size_t m = 0; m < br.counts.size(); ++m) {
        measures[s][b].emplace_back(stage_[s].n,
                                    std::array<int, 2>{br.counts[m], stage_[s].n - br.counts[m]},
                                    moms[s], moms[s].sigma2, config.expansion.order,
                                    config.expansion.reduced);
        if (measures[s][b].back().fallback()) fallback_ = true;
      }
    }
  }

  // Shared draws and per-count density tables.
  const std::int64_t n_draws = draws_;
  for (int s = 0; s < stages_; ++s) {
    StageData& st = stage_[s];
    st.ydot0.resize(n_draws);
    st.ydot1.resize(n_draws);
    st.v0.resize(n_draws);
    st.v1.resize(n_draws);
    const bool last = (s == stages_ - 1);
    for (std::size_t b = 0; b < st.branches.size(); ++b) {
      BranchData& br = st.branches[b];
      const std::size_t m_count = br.counts.size();
      if (last) {
        br.u_sorted.resize(n_draws * m_count);
        br.suffix.resize(n_draws * (m_count + 1));
      } else {
        br.dens.assign(m_count, std::vector<double>(n_draws));
      }
    }
  }

  const std::uint64_t seed = config.seed;
  parallel_for(n_draws, threads_, [&](std::int64_t lo, std::int64_t hi) {
    std::vector<std::pair<double, double>> scratch;
    for (std::int64_t i = lo; i < hi; ++i) {
      // Full proposal density product, folded into stage 0.
      double q_all = 1.0;
      std::vector<Vec3> y(stages_);
      for (int s = 0; s < stages_; ++s) {
        y[s] = draw_at(props[s], seed, s, i);
        q_all *= props[s].pdf(y[s]);
      }
      for (int s = 0; s < stages_; ++s) {
        StageData& st = stage_[s];
        const double shrink = 1.0 - y[s][2] / (2.0 * st.sqrt_n);
        st.ydot0[i] = y[s][0];
        st.ydot1[i] = y[s][1];
        st.v0[i] = y[s][0] * shrink;
        st.v1[i] = y[s][1] * shrink;
        const double fold = (s == 0) ? 1.0 / q_all : 1.0;
        const bool last = (s == stages_ - 1);
        for (std::size_t b = 0; b < st.branches.size(); ++b) {
          BranchData& br = st.branches[b];
          const std::size_t m_count = br.counts.size();
          if (!last) {
            for (std::size_t m = 0; m < m_count; ++m) {
              br.dens[m][i] =
                  fold * br.weights[m] * measures[s][b][m].transformed_density(y[s]);
            }
          } else {
            scratch.clear();
            scratch.reserve(m_count);
            for (std::size_t m = 0; m < m_count; ++m) {
              const double a =
                  fold * br.weights[m] * measures[s][b][m].transformed_density(y[s]);
              const double u = br.l_dot[m][0] * st.v0[i] + br.l_dot[m][1] * st.v1[i];
              scratch.emplace_back(u, a);
            }
            std::sort(scratch.begin(), scratch.end());
            double* us = &br.u_sorted[i * m_count];
            double* sf = &br.suffix[i * (m_count + 1)];
            sf[m_count] = 0.0;
            for (std::size_t k = m_count; k-- > 0;) {
              us[k] = scratch[k].first;
              sf[k] = sf[k + 1] + scratch[k].second;
            }
          }
        }
      }
    }
  });

  // Analytic mass of the enumerated mixture and the reported branch masses.
  const StageData& s0 = stage_[0];
  double last_mean_wsum = 0.0;
  const StageData& sl = stage_[stages_ - 1];
  for (const auto& br : sl.branches) last_mean_wsum += br.weight_sum;
  last_mean_wsum /= static_cast<double>(sl.branches.size());
  if (stages_ == 1) {
    total_mass_ = s0.branches[0].weight_sum;
    branch_weights_ = s0.branches[0].weights;
  } else {
    double mid = 1.0;
    for (int s = 1; s + 1 < stages_; ++s) {
      double mw = 0.0;
      for (const auto& br : stage_[s].branches) mw += br.weight_sum;
      mid *= mw / static_cast<double>(stage_[s].branches.size());
    }
    total_mass_ = s0.branches[0].weight_sum * mid * last_mean_wsum;
    const std::size_t n_b = stage_[1].branches.size();
    for (double w0 : s0.branches[0].weights) {
      for (std::size_t b = 0; b < n_b; ++b) {
        branch_weights_.push_back(w0 * mid * stage_[1].branches[b].weight_sum /
                                  static_cast<double>(n_b));
      }
    }
  }
}

int TailEvaluator::next_branch(const StageData& st, const BranchData& br, std::size_t m,
                               std::int64_t i) const {
  // Decision statistic in original coordinates: l_ddot . z_dot = sigma * (l_ddot . y_dot).
  const double h =
      st.sigma * (br.l_ddot[m][0] * st.ydot0[i] + br.l_ddot[m][1] * st.ydot1[i]);
  return policy_branch(h, policy_);
}

double TailEvaluator::eval_draw(std::int64_t i, double x, bool lower_side) const {
  // Specialized S = 1 and S = 2 paths, generic nested enumeration above that.
  const StageData& s0 = stage_[0];
  const BranchData& b0 = s0.branches[0];
  const std::size_t m0 = b0.counts.size();
  if (stages_ == 1) {
    const double* us = &b0.u_sorted[i * m0];
    const double* sf = &b0.suffix[i * (m0 + 1)];
    double r = 0.0;
    // Single stage: the "density" table is the sorted suffix structure itself;
    // integrate the indicator directly.
    const std::size_t k =
        std::lower_bound(us, us + m0, x) - us;
    r = lower_side ? (sf[0] - sf[k]) : sf[k];
    return r;
  }

  double r = 0.0;
  if (stages_ == 2) {
    const StageData& s1 = stage_[1];
    for (std::size_t m = 0; m < m0; ++m) {
      const double a = b0.dens[m][i];
      const double u = b0.l_dot[m][0] * s0.v0[i] + b0.l_dot[m][1] * s0.v1[i];
      const int b = next_branch(s0, b0, m, i);
      const BranchData& br = s1.branches[b];
      const std::size_t mc = br.counts.size();
      const double* us = &br.u_sorted[i * mc];
      const double* sf = &br.suffix[i * (mc + 1)];
      const double t = x - u;
      const std::size_t k = std::lower_bound(us, us + mc, t) - us;
      r += a * (lower_side ? (sf[0] - sf[k]) : sf[k]);
    }
    return r;
  }

  // Generic recursion for S >= 3 (correct, not tuned).
  std::function<double(int, int, double, double)> rec =
      [&](int s, int b, double acc_a, double acc_u) -> double {
    const StageData& st = stage_[s];
    const BranchData& br = st.branches[b];
    const std::size_t mc = br.counts.size();
    if (s == stages_ - 1) {
      const double* us = &br.u_sorted[i * mc];
      const double* sf = &br.suffix[i * (mc + 1)];
      const double t = x - acc_u;
      const std::size_t k = std::lower_bound(us, us + mc, t) - us;
      return acc_a * (lower_side ? (sf[0] - sf[k]) : sf[k]);
    }
    double out = 0.0;
    for (std::size_t m = 0; m < mc; ++m) {
      const double a = br.dens[m][i];
      const double u = br.l_dot[m][0] * st.v0[i] + br.l_dot[m][1] * st.v1[i];
      const int nb = next_branch(st, br, m, i);
      out += rec(s + 1, nb, acc_a * a, acc_u + u);
    }
    return out;
  };
  // Stage 0 densities already carry 1/q; acc_a starts at 1 by looping here.
  for (std::size_t m = 0; m < m0; ++m) {
    const double a = b0.dens[m][i];
    const double u = b0.l_dot[m][0] * s0.v0[i] + b0.l_dot[m][1] * s0.v1[i];
    const int nb = next_branch(s0, b0, m, i);
    r += rec(1, nb, a, u);
  }
  return r;
}

double TailEvaluator::eval_draw_presplit(std::int64_t i, double x, bool lower_side) const {
  if (stages_ != 2) throw error("tail_presplit requires a two-stage design");
  const StageData& s0 = stage_[0];
  const StageData& s1 = stage_[1];
  const BranchData& b0 = s0.branches[0];
  const std::size_t m0 = b0.counts.size();
  double r = 0.0;
  // Outer loop over policy branches; each stage-1 term contributes only inside
  // its half-space. Identical terms as eval_draw, grouped differently.
  for (std::size_t b = 0; b < s1.branches.size(); ++b) {
    const BranchData& br = s1.branches[b];
    const std::size_t mc = br.counts.size();
    const double* us = &br.u_sorted[i * mc];
    const double* sf = &br.suffix[i * (mc + 1)];
    for (std::size_t m = 0; m < m0; ++m) {
      if (next_branch(s0, b0, m, i) != static_cast<int>(b)) continue;
      const double a = b0.dens[m][i];
      const double u = b0.l_dot[m][0] * s0.v0[i] + b0.l_dot[m][1] * s0.v1[i];
      const double t = x - u;
      const std::size_t k = std::lower_bound(us, us + mc, t) - us;
      r += a * (lower_side ? (sf[0] - sf[k]) : sf[k]);
    }
  }
  return r;
}

TailEstimate TailEvaluator::finalize(double x, const std::vector<double>& ratios) const {
  double sum = 0.0;
  for (double r : ratios) sum += r;
  const double mean = sum / draws_;
  double ss = 0.0;
  for (double r : ratios) ss += (r - mean) * (r - mean);

  TailEstimate est;
  est.x = x;
  est.draws = draws_;
  est.value = lower_side_ ? total_mass_ - mean : mean;
  est.stderr_est = std::sqrt(ss / (draws_ - 1)) / std::sqrt(static_cast<double>(draws_));
  est.branch_weights = branch_weights_;
  est.expansion_fallback = fallback_;
  return est;
}

TailEstimate TailEvaluator::tail(double x) const {
  std::vector<double> ratios(draws_);
  parallel_for(draws_, threads_, [&](std::int64_t lo, std::int64_t hi) {
    for (std::int64_t i = lo; i < hi; ++i) ratios[i] = eval_draw(i, x, lower_side_);
  });
  return finalize(x, ratios);
}

TailEstimate TailEvaluator::tail_presplit(double x) const {
  std::vector<double> ratios(draws_);
  parallel_for(draws_, threads_, [&](std::int64_t lo, std::int64_t hi) {
    for (std::int64_t i = lo; i < hi; ++i) ratios[i] = eval_draw_presplit(i, x, lower_side_);
  });
  return finalize(x, ratios);
}

std::pair<double, double> TailEvaluator::mass() const {
  // Indicator identically 1: sum the full mixture, i.e. the x -> -inf limit of
  // the upper-side accumulation.
  std::vector<double> ratios(draws_);
  constexpr double kAllMass = -std::numeric_limits<double>::infinity();
  parallel_for(draws_, threads_, [&](std::int64_t lo, std::int64_t hi) {
    for (std::int64_t i = lo; i < hi; ++i) ratios[i] = eval_draw(i, kAllMass, false);
  });
  double sum = 0.0;
  for (double r : ratios) sum += r;
  const double mean = sum / draws_;
  double ss = 0.0;
  for (double r : ratios) ss += (r - mean) * (r - mean);
  return {mean, std::sqrt(ss / (draws_ - 1)) / std::sqrt(static_cast<double>(draws_))};
}

TailEstimate tail_probability(double x, const DesignConfig& config) {
  TailEvaluator eval(config, x);
  return eval.tail(x);
}

}  // namespace batchtail
