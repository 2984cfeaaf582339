#pragma once

// Benchmark harness: runs estimator/separation combinations over seeded
// scenarios, scores the SNR series and counts arithmetic.

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "noisebench/estimators.hpp"
#include "noisebench/op_counter.hpp"
#include "noisebench/scenario.hpp"
#include "noisebench/separation.hpp"

namespace noisebench {

enum class SeparationKind { none, ideal, fisher, rof };

std::string_view to_string(SeparationKind kind) noexcept;

/// Where CBE takes its occupancy fraction from.
enum class CbeOccupancy { truth, aic, fixed };

struct MethodSpec {
  EstimatorKind estimator = EstimatorKind::ml;
  SeparationKind separation = SeparationKind::none;
  RofParams rof;
  std::size_t cbe_grid = 100;
  CbeOccupancy cbe_occupancy = CbeOccupancy::truth;
  double cbe_fixed_fraction = 0.0;

  /// ML and MVU need a separation; AIC, CBE and MMSE take none.
  void validate() const;
  /// "ML(rof)", "AIC", ...
  std::string label() const;

  /// Parses one token: "ML:rof", "MVU:fisher", "AIC", "all". ML or MVU
  /// without a separation expands to ideal, fisher and rof.
  static std::vector<MethodSpec> parse(std::string_view token);
  static std::vector<MethodSpec> parse_list(const std::vector<std::string>& tokens);
};

struct EstimatePoint {
  std::size_t frame_index = 0;
  double noise_power_est_mw = 0.0;
  double noise_power_true_mw = 0.0;
  double snr_est_db = 0.0;
  double snr_true_db = 0.0;
};

struct EstimateSeries {
  std::string scenario_id;
  std::uint64_t seed = 0;
  MethodSpec method;
  std::vector<EstimatePoint> points;
  OpCounts ops;           ///< summed over every point of the run
  double wall_time_ms = 0.0;
};

struct RunOptions {
  std::size_t window = 100;  ///< frames per block for MVU, AIC, CBE, MMSE
  std::size_t threads = 0;   ///< 0: NOISEBENCH_THREADS, else all cores
  bool timing = false;
};

/// One series per (method, seed), ordered by method then seed. ML yields a
/// point per frame; windowed methods a point per window end.
std::vector<EstimateSeries> run_scenario(const ScenarioConfig& config, const std::vector<MethodSpec>& methods,
                                         const std::vector<std::uint64_t>& seeds, const RunOptions& options = {});

// Metrics over points whose true SNR is finite.
double rmse_db(const EstimateSeries& series);
double rmse_db(std::span<const double> estimated_db, std::span<const double> true_db);
double std_dev_db(const EstimateSeries& series);
double std_dev_db(std::span<const double> values_db);
double mean_bias_db(const EstimateSeries& series);
/// Mean of 10 log10(estimated / true noise power) over every point.
double noise_bias_db(const EstimateSeries& series);

struct ReportRow {
  std::string scenario_id;
  std::string method;
  std::string separation;
  std::size_t seed_count = 0;
  double rmse_db = 0.0;
  double std_dev_db = 0.0;
  double mean_bias_db = 0.0;
  OpCounts ops;  ///< mean per estimate
  double wall_time_ms = 0.0;
};

/// Pools every seed of one method into a row, in method order.
std::vector<ReportRow> summarize(std::span<const EstimateSeries> series, bool timing);

struct OpReport {
  OpCounts total;
  std::map<std::string, OpCounts> stages;
};

/// Counted arithmetic of one estimation pass on an n-bin, n-frame block.
OpReport count_ops(const MethodSpec& method, std::size_t n);

std::string format_report_csv(std::span<const ReportRow> rows);
std::string format_series_csv(std::span<const EstimateSeries> series);
std::vector<ReportRow> parse_report_csv(std::string_view text);
void emit_report(std::span<const ReportRow> rows, const std::filesystem::path& path);
void emit_series(std::span<const EstimateSeries> series, const std::filesystem::path& path);

/// Writes `text` to `path` with LF endings; io error on failure.
void write_text_file(const std::filesystem::path& path, std::string_view text);

/// Floats as written to every CSV: 9 significant digits, "inf"/"-inf"/"nan".
std::string format_float(double value);

}  // namespace noisebench
