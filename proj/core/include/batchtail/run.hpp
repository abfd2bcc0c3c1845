#pragma once

#include <string>
#include <vector>

#include "batchtail/backward.hpp"
#include "batchtail/design.hpp"
#include "batchtail/quantile.hpp"

namespace batchtail {

struct MethodRow {
  std::string method;  // "mc" | "ae" | "normal"
  std::vector<QuantileResult> quantiles;
};

struct RunResult {
  std::vector<MethodRow> rows;
  std::vector<TailEstimate> tails;  // `expand --tail-at` output
  std::vector<std::string> warnings;
  double seconds = 0.0;
};

/// Quantiles for one method. "ae" inverts the backward tail approximation with
/// per-alpha CRN bisection; "mc" uses order statistics; "normal" is exact.
std::vector<QuantileResult> ae_quantiles(const DesignConfig& config,
                                         std::vector<std::string>* warnings = nullptr);
std::vector<QuantileResult> mc_quantile_rows(const DesignConfig& config,
                                             std::vector<std::string>* warnings = nullptr);
std::vector<QuantileResult> normal_quantile_rows(const DesignConfig& config);

/// Tail estimates at explicit thresholds (proposal centered per x).
std::vector<TailEstimate> ae_tails(const DesignConfig& config, const std::vector<double>& xs,
                                   std::vector<std::string>* warnings = nullptr);

RunResult run_command(const std::string& command, const DesignConfig& config,
                      const std::vector<double>& tail_at = {});

/// Serialize results. CSV header: method,alpha,quantile,stderr.
std::string results_csv(const RunResult& res);
std::string tails_csv(const RunResult& res);
/// Markdown table in the paper's row/column layout.
std::string results_markdown(const RunResult& res, const std::vector<double>& alphas);
std::string manifest_json(const DesignConfig& config, const RunResult& res,
                          const std::string& command);

/// Run a command and write results.csv (+ tails.csv when applicable), table.md
/// and manifest.json into out_dir. Returns the result for inspection.
RunResult run_and_write(const std::string& command, const DesignConfig& config,
                        const std::string& out_dir, const std::vector<double>& tail_at = {});

}  // namespace batchtail
