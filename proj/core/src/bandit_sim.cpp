#include "batchtail/bandit_sim.hpp"

#include <algorithm>
#include <cmath>

#include "batchtail/errors.hpp"
#include "batchtail/parallel.hpp"

namespace batchtail {

void DesignConfig::validate() const {
  if (stages < 1) throw infeasible_design_error("stages must be >= 1");
  if (static_cast<int>(n.size()) != stages) {
    throw infeasible_design_error("n must list one batch size per stage");
  }
  for (int ns : n) {
    if (ns < 2 * min_arm_count || ns < 3) {
      throw infeasible_design_error("batch size " + std::to_string(ns) +
                                    " infeasible for min_arm_count " +
                                    std::to_string(min_arm_count));
    }
  }
  if (static_cast<int>(noise.size()) != stages) {
    throw parameter_error("noise must list one model per stage");
  }
  for (const auto& nm : noise) nm.validate();
  if (!(stage1_probs[0] > 0.0 && stage1_probs[0] < 1.0) ||
      std::abs(stage1_probs[0] + stage1_probs[1] - 1.0) > 1e-12) {
    throw parameter_error("stage1_probs must lie in (0,1) and sum to 1");
  }
  if (stages >= 2) stage2_policy.validate();
  if (expansion.order != 0 && expansion.order != 1) {
    throw parameter_error("expansion.order must be 0 or 1");
  }
  if (is.draws < 1000) throw parameter_error("is.draws must be >= 1000");
  if (!(is.scale_p > 1.0)) throw parameter_error("is.scale_p must be > 1");
  if (mc.reps < 1000) throw parameter_error("mc.reps must be >= 1000");
  for (double a : alphas) {
    if (!(a > 0.0 && a < 1.0)) throw parameter_error("alphas must lie in (0,1)");
  }
}

BolsResult bols(std::span<const double> rewards, std::span<const int> arms) {
  if (rewards.size() != arms.size() || rewards.size() < 3) {
    throw degenerate_design_error("bols: need >= 3 subjects with matching arm labels");
  }
  double sum[2] = {0.0, 0.0};
  std::int64_t count[2] = {0, 0};
  for (std::size_t j = 0; j < rewards.size(); ++j) {
    const int a = arms[j];
    if (a != 0 && a != 1) throw degenerate_design_error("bols: arm labels must be 0 or 1");
    sum[a] += rewards[j];
    ++count[a];
  }
  if (count[0] == 0 || count[1] == 0) {
    throw degenerate_design_error("bols: both arms need at least one subject");
  }
  const double mean0 = sum[0] / count[0];
  const double mean1 = sum[1] / count[1];
  double rss = 0.0;
  for (std::size_t j = 0; j < rewards.size(); ++j) {
    const double r = rewards[j] - (arms[j] == 0 ? mean0 : mean1);
    rss += r * r;
  }
  BolsResult out;
  out.delta_hat = mean0 - mean1;
  out.sigma_hat2 = rss / (static_cast<double>(rewards.size()) - 1.0);
  if (out.sigma_hat2 <= 0.0) {
    throw degenerate_variance_error("bols: zero residual variance, statistic undefined");
  }
  return out;
}

double test_statistic(std::span<const StageOutcome> stages) {
  const double s = static_cast<double>(stages.size());
  double acc = 0.0;
  for (const auto& st : stages) {
    if (st.sigma_hat2 <= 0.0) {
      throw degenerate_variance_error("test_statistic: degenerate stage variance");
    }
    const double n_s = st.counts[0] + st.counts[1];
    acc += std::sqrt(static_cast<double>(st.counts[0]) * st.counts[1]) /
           (std::sqrt(n_s) * std::sqrt(st.sigma_hat2)) * st.delta_hat;
  }
  return acc / std::sqrt(s);
}

namespace {

StageOutcome run_stage(const DesignConfig& cfg, int stage, double arm1_prob,
                       std::uint64_t rep, unsigned attempt) {
  const int n_s = cfg.n[stage];
  const CountLaw law = clamped_binomial(n_s, arm1_prob, cfg.min_arm_count);

  CounterRng count_rng({cfg.seed, make_stream(StreamKind::counts, stage + 1, attempt)}, rep);
  const int n1 = law.draw(count_rng.next_u01());
  const int n2 = n_s - n1;

  // Under H0 the reward is pure noise; with i.i.d. subjects the arm positions
  // are exchangeable, so the first n1 draws form arm 1.
  const RngStream noise_stream{cfg.seed, make_stream(StreamKind::noise, stage + 1, attempt)};
  const NoiseModel& nm = cfg.noise[stage];
  const std::uint64_t base = rep * static_cast<std::uint64_t>(n_s);

  double sum1 = 0.0, sum2 = 0.0, sumsq = 0.0;
  std::vector<double> eps(n_s);
  for (int j = 0; j < n_s; ++j) {
    eps[j] = sample_at(nm, noise_stream, base + j);
    sumsq += eps[j] * eps[j];
    (j < n1 ? sum1 : sum2) += eps[j];
  }
  const double mean1 = sum1 / n1;
  const double mean2 = sum2 / n2;
  double rss = 0.0;
  for (int j = 0; j < n_s; ++j) {
    const double r = eps[j] - (j < n1 ? mean1 : mean2);
    rss += r * r;
  }

  StageOutcome out;
  out.counts = {n1, n2};
  out.delta_hat = mean1 - mean2;
  out.sigma_hat2 = rss / (n_s - 1.0);
  out.z_dot = {sum1 / std::sqrt(static_cast<double>(n1)), sum2 / std::sqrt(static_cast<double>(n2))};
  const double sigma2 = standardized_moments(nm).sigma2;
  out.z_ddot = (sumsq - n_s * sigma2) / std::sqrt(static_cast<double>(n_s));
  return out;
}

}  // namespace

TrialResult simulate_trial(const DesignConfig& config, std::uint64_t rep_index) {
  config.validate();
  for (unsigned attempt = 0;; ++attempt) {
    if (attempt > 64) {
      throw degenerate_variance_error("simulate_trial: persistent degenerate variance");
    }
    try {
      TrialResult res;
      res.resample_attempts = static_cast<int>(attempt);
      res.stages.reserve(config.stages);

      StageOutcome s1 = run_stage(config, 0, config.stage1_probs[0], rep_index, attempt);
      if (s1.sigma_hat2 <= 0.0) throw degenerate_variance_error("stage 1 variance");
      res.stages.push_back(s1);

      for (int s = 1; s < config.stages; ++s) {
        // Decision statistic h = l_ddot_1 . z_dot of the previous stage
        // (= sqrt(n) * delta_hat under H0).
        const StageOutcome& prev = res.stages.back();
        const double n_prev = prev.counts[0] + prev.counts[1];
        const double h = std::sqrt(n_prev) * prev.delta_hat;
        const StrategyChoice choice = stage2_strategy(h, config.stage2_policy);
        StageOutcome st = run_stage(config, s, choice.probs[0], rep_index, attempt);
        if (st.sigma_hat2 <= 0.0) throw degenerate_variance_error("stage variance");
        res.stages.push_back(st);
      }
      res.statistic = test_statistic(res.stages);
      return res;
    } catch (const degenerate_variance_error&) {
      continue;  // fresh sub-stream via the attempt field
    }
  }
}

std::vector<double> mc_statistics(const DesignConfig& config, std::int64_t reps,
                                  std::int64_t* resampled) {
  config.validate();
  std::vector<double> stats(reps);
  std::vector<std::int64_t> retries(reps, 0);
  parallel_for(reps, config.threads, [&](std::int64_t b, std::int64_t e) {
    for (std::int64_t r = b; r < e; ++r) {
      TrialResult tr = simulate_trial(config, static_cast<std::uint64_t>(r));
      stats[r] = tr.statistic;
      retries[r] = tr.resample_attempts;
    }
  });
  if (resampled) {
    std::int64_t total = 0;
    for (auto v : retries) total += v;
    *resampled = total;
  }
  std::sort(stats.begin(), stats.end());
  return stats;
}

McResult mc_quantiles(const DesignConfig& config, std::span<const double> alphas) {
  if (config.mc.reps < 1000) throw parameter_error("mc_quantiles: need >= 1e3 replications");
  McResult res;
  res.replications = config.mc.reps;
  std::vector<double> stats = mc_statistics(config, config.mc.reps, &res.resampled);
  const auto reps = static_cast<std::int64_t>(stats.size());

  auto order_stat = [&](double q) {
    // Inverse empirical CDF (order statistic at rank ceil(q * reps)).
    std::int64_t rank = static_cast<std::int64_t>(std::ceil(q * reps));
    rank = std::clamp<std::int64_t>(rank, 1, reps);
    return stats[rank - 1];
  };

  for (double a : alphas) {
    McQuantile mq;
    mq.alpha = a;
    mq.quantile = order_stat(a);
    // Woodruff/binomial interval: quantiles at ranks a +- sqrt(a(1-a)/R).
    const double half = std::sqrt(a * (1.0 - a) / reps);
    const double qlo = order_stat(std::max(1e-12, a - half));
    const double qhi = order_stat(std::min(1.0 - 1e-12, a + half));
    mq.stderr_est = 0.5 * (qhi - qlo);
    res.quantiles.push_back(mq);
  }
  return res;
}

}  // namespace batchtail
