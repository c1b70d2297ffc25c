#pragma once

// Monte Carlo harness: repeated synthesize -> corrupt -> fit cycles with
// average / bias / MSE aggregation and the closed-form variance column for
// comparison.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "chirp2d/asymptotics.hpp"
#include "chirp2d/estimate.hpp"
#include "chirp2d/model.hpp"

namespace chirp2d {

struct McConfig {
  ChirpModel model;            // truth
  NoiseSpec noise;             // template; per-replicate seed = base_seed + r
  int M = 0;
  int N = 0;
  int replicates = 200;
  std::vector<Method> methods = {Method::alse, Method::lse};
  bool sequential = true;      // false requires a single-component model
  std::uint64_t base_seed = 1;
  GridConfig gridcfg;
  OptConfig optcfg;
  bool init_at_truth = false;  // skip grid_init, refine from the true point
  int threads = 0;             // 0 = hardware concurrency; never affects output
};

// Per-parameter aggregate for one (method, component) pair.
struct McCell {
  double average = 0.0;
  double bias = 0.0;
  double mse = 0.0;
  double avar = 0.0;  // plug-in variance at the true parameters
};

struct McTable {
  Method method;
  // cells[k][i]: component k (model order), parameter i in
  // (A, B, alpha, beta, gamma, delta) order.
  std::vector<std::array<McCell, 6>> cells;
  int failure_count = 0;  // replicates with any non-converged fit (excluded)
};

struct McReport {
  int schema_version = 1;
  // config echo
  int M = 0, N = 0, replicates = 0;
  double sigma = 0.0;
  double noise_c_value = 0.0;
  std::uint64_t base_seed = 0;
  bool sequential = false;
  bool init_at_truth = false;
  std::vector<std::array<double, 6>> truth;  // per component
  std::vector<McTable> tables;               // one per method, config order
  double wall_seconds = 0.0;                 // timing only; excluded from
                                             // deterministic comparisons
};

// Per-parameter summary of a set of 6-vector estimates against a truth
// vector: average, bias = average - truth, mse = mean squared deviation.
struct Summary {
  double average = 0.0;
  double bias = 0.0;
  double mse = 0.0;
};
std::array<Summary, 6> summarize(
    const std::vector<std::array<double, 6>>& estimates,
    const std::array<double, 6>& truth);

// Runs the study. Replicate r draws noise with seed base_seed + r, fits every
// configured method, and records per-component estimates. Replicates where
// any fit of a method fails to converge are counted in that method's
// failure_count and excluded from its aggregates. Aggregation order is fixed
// by replicate index, and the same replicate always receives the same seed,
// so the report is identical for any thread count. Throws std::runtime_error
// if every replicate failed for some method.
McReport run_mc(const McConfig& cfg);

// CSV layout mirroring the study tables: one row per (method, component,
// statistic) with statistic in {Avg, Bias, MSE, AVar} and six parameter
// columns.
std::string mc_report_to_csv(const McReport& report);

// JSON document with full metadata (schema_version field included).
std::string mc_report_to_json(const McReport& report);

const char* method_name(Method m);  // "alse" / "lse"

}  // namespace chirp2d
