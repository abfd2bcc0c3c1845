#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "batchtail/config.hpp"
#include "batchtail/errors.hpp"
#include "batchtail/run.hpp"

namespace {

struct CommonOpts {
  std::string config_path;
  std::string out_dir = "out";
  std::string format = "csv";
  std::int64_t seed = -1;
  std::int64_t reps = -1;
  std::int64_t is_draws = -1;
  int threads = -1;
  std::vector<double> alphas;
  std::vector<double> tail_at;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool needs_config) {
  auto* cfg = cmd->add_option("--config", o.config_path, "Config JSON path");
  if (needs_config) cfg->required();
  cmd->add_option("--out", o.out_dir, "Output directory");
  cmd->add_option("--format", o.format, "Stdout rendering: csv or md")
      ->check(CLI::IsMember({"csv", "md"}));
  cmd->add_option("--seed", o.seed, "Override seed");
  cmd->add_option("--reps", o.reps, "Override Monte-Carlo replications");
  cmd->add_option("--is-draws", o.is_draws, "Override importance-sampling draws");
  cmd->add_option("--threads", o.threads, "Worker threads (0 = hardware)");
  cmd->add_option("--alphas", o.alphas, "Quantile levels")->delimiter(',');
}

int run(const std::string& command, const CommonOpts& o) {
  batchtail::DesignConfig cfg;
  if (!o.config_path.empty()) {
    cfg = batchtail::load_config_file(o.config_path);
  } else {
    // `normal` works without a design: a minimal placeholder carries the alphas.
    cfg.stages = 1;
    cfg.n = {16};
    cfg.noise = {batchtail::NoiseModel::normal()};
    cfg.min_arm_count = 1;
    cfg.mc.reps = 1000;
  }
  batchtail::Overrides ov;
  ov.seed = o.seed;
  ov.reps = o.reps;
  ov.is_draws = o.is_draws;
  ov.threads = o.threads;
  ov.alphas = o.alphas;
  batchtail::apply_overrides(cfg, ov);

  const batchtail::RunResult res = batchtail::run_and_write(command, cfg, o.out_dir, o.tail_at);
  if (!res.tails.empty()) {
    std::cout << batchtail::tails_csv(res);
  } else if (o.format == "md") {
    std::cout << batchtail::results_markdown(res, cfg.alphas);
  } else {
    std::cout << batchtail::results_csv(res);
  }
  for (const auto& w : res.warnings) std::cerr << "warning: " << w << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tail probabilities and quantiles of the batched-OLS statistic in "
               "multi-stage adaptive experiments"};
  app.require_subcommand(1);

  CommonOpts mc_o, ex_o, no_o, ta_o;
  auto* mc = app.add_subcommand("mc", "Monte-Carlo quantiles of the exact design");
  add_common(mc, mc_o, true);
  auto* ex = app.add_subcommand("expand", "Backward-expansion quantiles or tail estimates");
  add_common(ex, ex_o, true);
  ex->add_option("--tail-at", ex_o.tail_at, "Emit tail estimates at these thresholds")
      ->delimiter(',');
  auto* no = app.add_subcommand("normal", "Normal-approximation quantiles");
  add_common(no, no_o, false);
  auto* ta = app.add_subcommand("table", "All three methods, paper-style table");
  add_common(ta, ta_o, true);

  CLI11_PARSE(app, argc, argv);

  try {
    if (mc->parsed()) return run("mc", mc_o);
    if (ex->parsed()) return run("expand", ex_o);
    if (no->parsed()) return run("normal", no_o);
    if (ta->parsed()) return run("table", ta_o);
  } catch (const batchtail::validation_error& e) {
    std::cerr << "error: " << e.what();
    if (!e.keys.empty()) {
      std::cerr << " [keys:";
      for (const auto& k : e.keys) std::cerr << " " << k;
      std::cerr << "]";
    }
    std::cerr << "\n";
    return 2;
  } catch (const batchtail::error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
