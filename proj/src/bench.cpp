#include "noisebench/bench.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <optional>
#include <thread>

#include "noisebench/error.hpp"

namespace noisebench {

namespace {

std::string lower(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

bool needs_separation(EstimatorKind kind) { return kind == EstimatorKind::ml || kind == EstimatorKind::mvu; }

SeparationMask separate(SeparationKind kind, const PowerSpectrum& power, const GroundTruth& truth,
                        const RofParams& rof, OpCounter* ops) {
  switch (kind) {
    case SeparationKind::ideal: return ideal_separate(truth, power.frame_index);
    case SeparationKind::fisher: return fisher_separate(power, ops);
    case SeparationKind::rof: return rof_separate(power, rof, ops);
    case SeparationKind::none: break;
  }
  throw Error(ErrorKind::invalid_argument, "separation strategy required");
}

ResourceBlock window_block(const ResourceBlock& block, std::size_t last, std::size_t width) {
  std::vector<SpectralFrame> frames;
  frames.reserve(width);
  for (std::size_t m = last + 1 - width, i = 0; m <= last; ++m, ++i) {
    frames.push_back({block.frame(m).bins, i});
  }
  return ResourceBlock(std::move(frames));
}

double window_occupancy(const GroundTruth& truth, std::size_t last, std::size_t width) {
  double acc = 0.0;
  for (std::size_t m = last + 1 - width; m <= last; ++m) {
    const auto& mask = truth.signal_mask[m];
    acc += static_cast<double>(std::count(mask.begin(), mask.end(), true)) / static_cast<double>(mask.size());
  }
  return acc / static_cast<double>(width);
}

// Per-frame work that several methods share; its op counts are charged to
// every method that consumes it.
struct FrameCache {
  std::vector<PowerSpectrum> powers;
  std::vector<OpCounts> power_ops;
  std::map<SeparationKind, std::vector<SeparationMask>> masks;
  std::map<SeparationKind, std::vector<OpCounts>> mask_ops;
};

const std::vector<SeparationMask>& masks_for(FrameCache& cache, SeparationKind kind, const GroundTruth& truth,
                                            const RofParams& rof) {
  // Masks depend on the ROF thresholds, so a non-default setting is never
  // shared; the cache keys on the kind only for default parameters.
  auto it = cache.masks.find(kind);
  if (it != cache.masks.end()) return it->second;
  std::vector<SeparationMask> masks;
  std::vector<OpCounts> ops;
  for (const auto& p : cache.powers) {
    OpCounter counter;
    masks.push_back(separate(kind, p, truth, rof, &counter));
    ops.push_back(counter.total());
  }
  cache.mask_ops[kind] = std::move(ops);
  return cache.masks.emplace(kind, std::move(masks)).first->second;
}

bool default_rof(const RofParams& p) {
  const RofParams d;
  return p.lambda1 == d.lambda1 && p.lambda2 == d.lambda2 && p.alignment == d.alignment;
}

EstimatePoint make_point(std::size_t m, double estimate, const std::vector<double>& sigma_x, const GroundTruth& truth) {
  EstimatePoint p;
  p.frame_index = m;
  p.noise_power_est_mw = estimate;
  p.noise_power_true_mw = truth.noise_power_mw[m];
  p.snr_est_db = snr_from_powers(sigma_x[m], estimate).db;
  p.snr_true_db = truth.true_snr_db[m];
  return p;
}

EstimateSeries run_method(const MethodSpec& method, const Scenario& scenario, FrameCache& cache,
                          const std::vector<double>& sigma_x, std::size_t window) {
  const auto& truth = scenario.truth;
  const std::size_t frames = scenario.block.n_frames();
  const std::size_t n = scenario.block.n_bins();
  const std::size_t w = std::min(window, frames);

  EstimateSeries series;
  series.method = method;
  OpCounter counter;
  OpCounts shared;

  const std::vector<SeparationMask>* masks = nullptr;
  const std::vector<OpCounts>* mask_ops = nullptr;
  FrameCache private_masks;
  if (needs_separation(method.estimator)) {
    if (default_rof(method.rof) || method.separation != SeparationKind::rof) {
      masks = &masks_for(cache, method.separation, truth, method.rof);
      mask_ops = &cache.mask_ops[method.separation];
    } else {
      private_masks.powers = cache.powers;
      masks = &masks_for(private_masks, method.separation, truth, method.rof);
      mask_ops = &private_masks.mask_ops[method.separation];
    }
  }

  switch (method.estimator) {
    case EstimatorKind::ml: {
      for (std::size_t m = 0; m < frames; ++m) {
        const auto est = ml_estimate(cache.powers[m], (*masks)[m], &counter);
        shared += cache.power_ops[m];
        shared += (*mask_ops)[m];
        series.points.push_back(make_point(m, est.value_mw, sigma_x, truth));
      }
      break;
    }
    case EstimatorKind::mvu: {
      // Each frame contributes its noise-bin sum and count once; a window
      // position adds the stored per-frame totals.
      std::vector<double> frame_sum(frames, 0.0);
      std::vector<std::size_t> frame_count(frames, 0);
      for (std::size_t m = 0; m < frames; ++m) {
        const auto& p = cache.powers[m].power;
        const auto& mask = (*masks)[m].is_signal;
        for (std::size_t i = 0; i < n; ++i) {
          if (mask[i]) continue;
          frame_sum[m] += p[i];
          ++frame_count[m];
        }
        counter.cmp(n);
        counter.add(frame_count[m]);
        if (m + 1 < w) continue;
        double sum = 0.0;
        std::size_t count = 0;
        for (std::size_t j = m + 1 - w; j <= m; ++j) {
          sum += frame_sum[j];
          count += frame_count[j];
        }
        counter.add(w);
        counter.mul(1);
        if (count == 0) throw Error(ErrorKind::empty_noise_group, "window holds no noise bins");
        if (!(sum > 0.0)) throw Error(ErrorKind::zero_power, "MVU estimate is not positive");
        shared += cache.power_ops[m];
        shared += (*mask_ops)[m];
        series.points.push_back(make_point(m, sum / static_cast<double>(count), sigma_x, truth));
      }
      break;
    }
    case EstimatorKind::aic:
    case EstimatorKind::cbe: {
      const bool want_aic =
          method.estimator == EstimatorKind::aic || method.cbe_occupancy == CbeOccupancy::aic;
      std::vector<double> running(n, 0.0);
      for (std::size_t m = 0; m < frames; ++m) {
        if (want_aic) {
          const auto& p = cache.powers[m].power;
          for (std::size_t i = 0; i < n; ++i) running[i] += p[i];
          counter.add(n);
          if (m >= w) {
            const auto& old = cache.powers[m - w].power;
            for (std::size_t i = 0; i < n; ++i) running[i] -= old[i];
            counter.add(n);
          }
          shared += cache.power_ops[m];
        }
        if (m + 1 < w) continue;

        std::optional<NoisePowerEstimate> aic;
        if (want_aic) {
          PowerSpectrum averaged{std::vector<double>(n), m};
          const double inv = 1.0 / static_cast<double>(w);
          for (std::size_t i = 0; i < n; ++i) averaged.power[i] = std::max(0.0, running[i] * inv);
          counter.mul(n);
          aic = aic_estimate(averaged, w, &counter);
        }
        double estimate;
        if (method.estimator == EstimatorKind::aic) {
          estimate = aic->value_mw;
        } else {
          double fraction = method.cbe_fixed_fraction;
          if (method.cbe_occupancy == CbeOccupancy::truth) fraction = window_occupancy(truth, m, w);
          if (method.cbe_occupancy == CbeOccupancy::aic) {
            fraction = static_cast<double>(aic->diagnostics.aic_n_min) / static_cast<double>(n);
          }
          estimate = cbe_estimate(window_block(scenario.block, m, w), fraction, method.cbe_grid, &counter).value_mw;
        }
        series.points.push_back(make_point(m, estimate, sigma_x, truth));
      }
      break;
    }
    case EstimatorKind::mmse: {
      for (std::size_t m = w - 1; m < frames; ++m) {
        const auto est = mmse_estimate(window_block(scenario.block, m, w), &counter);
        series.points.push_back(make_point(m, est.value_mw, sigma_x, truth));
      }
      break;
    }
  }
  series.ops = counter.total();
  series.ops += shared;
  return series;
}

std::vector<EstimateSeries> run_seed(const ScenarioConfig& config, const std::vector<MethodSpec>& methods,
                                     std::uint64_t seed, const RunOptions& options) {
  ScenarioConfig cfg = config;
  cfg.noise.seed = seed;
  const Scenario scenario = build_scenario(cfg);
  const std::size_t frames = scenario.block.n_frames();
  if (options.window < 1) throw Error(ErrorKind::invalid_argument, "window must be >= 1");
  if (options.window > frames) {
    spdlog::debug("window {} exceeds run length {}; using {}", options.window, frames, frames);
  }

  FrameCache cache;
  std::vector<double> sigma_x(frames);
  for (std::size_t m = 0; m < frames; ++m) {
    OpCounter counter;
    cache.powers.push_back(power_spectrum(scenario.block.frame(m), &counter));
    cache.power_ops.push_back(counter.total());
    sigma_x[m] = cache.powers.back().mean();
  }

  std::vector<EstimateSeries> out;
  for (const auto& method : methods) {
    const auto start = std::chrono::steady_clock::now();
    auto series = run_method(method, scenario, cache, sigma_x, options.window);
    const auto stop = std::chrono::steady_clock::now();
    series.scenario_id = config.scenario_id;
    series.seed = seed;
    series.wall_time_ms = options.timing ? std::chrono::duration<double, std::milli>(stop - start).count()
                                         : std::numeric_limits<double>::quiet_NaN();
    out.push_back(std::move(series));
  }
  return out;
}

std::size_t thread_count(const RunOptions& options, std::size_t jobs) {
  std::size_t threads = options.threads;
  if (threads == 0) {
    if (const char* env = std::getenv("NOISEBENCH_THREADS"); env != nullptr && *env != '\0') {
      char* end = nullptr;
      const long v = std::strtol(env, &end, 10);
      if (end != env && *end == '\0' && v > 0) threads = static_cast<std::size_t>(v);
    }
  }
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  return std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(jobs, 1));
}

struct Subset {
  std::vector<double> estimated;
  std::vector<double> truth;
};

Subset finite_truth(const EstimateSeries& series) {
  Subset s;
  for (const auto& p : series.points) {
    if (!std::isfinite(p.snr_true_db)) continue;
    s.estimated.push_back(p.snr_est_db);
    s.truth.push_back(p.snr_true_db);
  }
  return s;
}

}  // namespace

std::string_view to_string(SeparationKind kind) noexcept {
  switch (kind) {
    case SeparationKind::none: return "none";
    case SeparationKind::ideal: return "ideal";
    case SeparationKind::fisher: return "fisher";
    case SeparationKind::rof: return "rof";
  }
  return "unknown";
}

void MethodSpec::validate() const {
  if (needs_separation(estimator) && separation == SeparationKind::none) {
    throw Error(ErrorKind::invalid_argument, std::string(to_string(estimator)) + " needs a separation strategy");
  }
  if (!needs_separation(estimator) && separation != SeparationKind::none) {
    throw Error(ErrorKind::invalid_argument, std::string(to_string(estimator)) + " takes no separation strategy");
  }
  if (estimator == EstimatorKind::cbe) {
    if (cbe_grid < 2) throw Error(ErrorKind::invalid_argument, "CBE grid needs L >= 2");
    if (cbe_occupancy == CbeOccupancy::fixed && !(cbe_fixed_fraction >= 0.0 && cbe_fixed_fraction < 1.0)) {
      throw Error(ErrorKind::invalid_argument, "CBE occupancy must lie in [0, 1)");
    }
  }
  if (separation == SeparationKind::rof) rof.validate();
}

std::string MethodSpec::label() const {
  std::string out(to_string(estimator));
  if (separation != SeparationKind::none) out += "(" + std::string(to_string(separation)) + ")";
  return out;
}

std::vector<MethodSpec> MethodSpec::parse(std::string_view token) {
  const std::string text = lower(token);
  if (text == "all") {
    std::vector<MethodSpec> out = parse("ML");
    for (const auto& m : parse("MVU")) out.push_back(m);
    for (const char* name : {"AIC", "CBE", "MMSE"}) out.push_back(parse(name).front());
    return out;
  }
  const auto colon = text.find(':');
  const std::string name = text.substr(0, colon);
  const std::string sep = colon == std::string::npos ? "" : text.substr(colon + 1);

  MethodSpec spec;
  if (name == "ml") {
    spec.estimator = EstimatorKind::ml;
  } else if (name == "mvu") {
    spec.estimator = EstimatorKind::mvu;
  } else if (name == "aic") {
    spec.estimator = EstimatorKind::aic;
  } else if (name == "cbe") {
    spec.estimator = EstimatorKind::cbe;
  } else if (name == "mmse") {
    spec.estimator = EstimatorKind::mmse;
  } else {
    throw Error(ErrorKind::invalid_argument, "unknown method '" + std::string(token) + "'");
  }

  if (sep.empty()) {
    if (!needs_separation(spec.estimator)) return {spec};
    std::vector<MethodSpec> out;
    for (auto kind : {SeparationKind::ideal, SeparationKind::fisher, SeparationKind::rof}) {
      spec.separation = kind;
      out.push_back(spec);
    }
    return out;
  }
  if (sep == "ideal" || sep == "is") {
    spec.separation = SeparationKind::ideal;
  } else if (sep == "fisher" || sep == "fd") {
    spec.separation = SeparationKind::fisher;
  } else if (sep == "rof") {
    spec.separation = SeparationKind::rof;
  } else {
    throw Error(ErrorKind::invalid_argument, "unknown separation '" + sep + "'");
  }
  spec.validate();
  return {spec};
}

std::vector<MethodSpec> MethodSpec::parse_list(const std::vector<std::string>& tokens) {
  std::vector<MethodSpec> out;
  for (const auto& t : tokens) {
    for (auto& m : parse(t)) out.push_back(std::move(m));
  }
  if (out.empty()) throw Error(ErrorKind::invalid_argument, "no methods given");
  return out;
}

std::vector<EstimateSeries> run_scenario(const ScenarioConfig& config, const std::vector<MethodSpec>& methods,
                                         const std::vector<std::uint64_t>& seeds, const RunOptions& options) {
  config.validate();
  if (methods.empty()) throw Error(ErrorKind::invalid_argument, "at least one method is required");
  if (seeds.empty()) throw Error(ErrorKind::invalid_argument, "at least one seed is required");
  for (const auto& m : methods) m.validate();

  std::vector<std::vector<EstimateSeries>> per_seed(seeds.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= seeds.size()) return;
      try {
        per_seed[i] = run_seed(config, methods, seeds[i], options);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(seeds.size());
      }
    }
  };
  const std::size_t threads = thread_count(options, seeds.size());
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<EstimateSeries> out;
  out.reserve(methods.size() * seeds.size());
  for (std::size_t k = 0; k < methods.size(); ++k) {
    for (auto& seed_result : per_seed) out.push_back(std::move(seed_result[k]));
  }
  return out;
}

double rmse_db(std::span<const double> estimated_db, std::span<const double> true_db) {
  if (estimated_db.size() != true_db.size()) throw Error(ErrorKind::invalid_argument, "series lengths differ");
  double acc = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < estimated_db.size(); ++i) {
    if (!std::isfinite(true_db[i])) continue;
    const double e = estimated_db[i] - true_db[i];
    acc += e * e;
    ++count;
  }
  if (count == 0) throw Error(ErrorKind::invalid_argument, "no frames with finite true SNR");
  return std::sqrt(acc / static_cast<double>(count));
}

double rmse_db(const EstimateSeries& series) {
  const auto s = finite_truth(series);
  return rmse_db(s.estimated, s.truth);
}

double std_dev_db(std::span<const double> values) {
  if (values.size() < 2) throw Error(ErrorKind::invalid_argument, "standard deviation needs >= 2 values");
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

double std_dev_db(const EstimateSeries& series) { return std_dev_db(finite_truth(series).estimated); }

double mean_bias_db(const EstimateSeries& series) {
  const auto s = finite_truth(series);
  if (s.estimated.empty()) throw Error(ErrorKind::invalid_argument, "no frames with finite true SNR");
  double acc = 0.0;
  for (std::size_t i = 0; i < s.estimated.size(); ++i) acc += s.estimated[i] - s.truth[i];
  return acc / static_cast<double>(s.estimated.size());
}

double noise_bias_db(const EstimateSeries& series) {
  if (series.points.empty()) throw Error(ErrorKind::invalid_argument, "empty series");
  double acc = 0.0;
  for (const auto& p : series.points) acc += 10.0 * std::log10(p.noise_power_est_mw / p.noise_power_true_mw);
  return acc / static_cast<double>(series.points.size());
}

std::vector<ReportRow> summarize(std::span<const EstimateSeries> series, bool timing) {
  std::vector<ReportRow> rows;
  std::vector<std::string> labels;
  std::vector<std::vector<const EstimateSeries*>> groups;
  for (const auto& s : series) {
    const std::string label = s.method.label();
    auto it = std::find(labels.begin(), labels.end(), label);
    if (it == labels.end()) {
      labels.push_back(label);
      groups.emplace_back();
      it = labels.end() - 1;
    }
    groups[static_cast<std::size_t>(it - labels.begin())].push_back(&s);
  }

  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (const auto& group : groups) {
    const EstimateSeries& first = *group.front();
    ReportRow row;
    row.scenario_id = first.scenario_id;
    row.method = std::string(to_string(first.method.estimator));
    row.separation = std::string(to_string(first.method.separation));
    row.seed_count = group.size();

    EstimateSeries pooled;
    OpCounts ops;
    std::uint64_t points = 0;
    double wall = 0.0;
    for (const auto* s : group) {
      pooled.points.insert(pooled.points.end(), s->points.begin(), s->points.end());
      ops += s->ops;
      points += s->points.size();
      wall += s->wall_time_ms;
    }
    const auto subset = finite_truth(pooled);
    row.rmse_db = subset.estimated.empty() ? nan : rmse_db(subset.estimated, subset.truth);
    row.mean_bias_db = subset.estimated.empty() ? nan : mean_bias_db(pooled);
    row.std_dev_db = subset.estimated.size() < 2 ? nan : std_dev_db(subset.estimated);
    if (points > 0) {
      row.ops.add = ops.add / points;
      row.ops.mul = ops.mul / points;
      row.ops.cmp = ops.cmp / points;
      row.ops.transcendental = ops.transcendental / points;
    }
    row.wall_time_ms = timing ? wall / static_cast<double>(group.size()) : nan;
    rows.push_back(std::move(row));
  }
  return rows;
}

OpReport count_ops(const MethodSpec& method, std::size_t n) {
  method.validate();
  if (n < 16) throw Error(ErrorKind::invalid_argument, "operation counting needs n >= 16");
  ScenarioConfig config = reference_scenario(n, n, 0.0, 1);
  if (n % 4 != 0) {
    config.subband_count = 1;
    config.signals.front().subband_index = 0;
    config.signals.front().occupancy_fraction = 0.25;
  }
  const Scenario scenario = build_scenario(config);
  const auto& block = scenario.block;

  OpCounter counter;
  switch (method.estimator) {
    case EstimatorKind::ml:
    case EstimatorKind::mvu: {
      // One new frame: its spectrum, its mask, then the estimate. MVU
      // additionally folds the per-frame noise totals of the window.
      PowerSpectrum p;
      {
        OpStage stage(&counter, "spectrum");
        p = power_spectrum(block.frame(n - 1), &counter);
      }
      SeparationMask mask;
      {
        OpStage stage(&counter, "separation");
        mask = separate(method.separation, p, scenario.truth, method.rof, &counter);
      }
      OpStage stage(&counter, "estimate");
      ml_estimate(p, mask, &counter);
      if (method.estimator == EstimatorKind::mvu) {
        counter.add(n);
        counter.mul(1);
      }
      break;
    }
    case EstimatorKind::aic: {
      PowerSpectrum averaged;
      {
        OpStage stage(&counter, "periodogram");
        averaged = averaged_periodogram(block, &counter);
      }
      OpStage stage(&counter, "estimate");
      aic_estimate(averaged, n, &counter);
      break;
    }
    case EstimatorKind::cbe: {
      double fraction = method.cbe_fixed_fraction;
      if (method.cbe_occupancy == CbeOccupancy::truth) fraction = window_occupancy(scenario.truth, n - 1, n);
      if (method.cbe_occupancy == CbeOccupancy::aic) {
        const auto aic = aic_estimate(averaged_periodogram(block, &counter), n, &counter);
        fraction = static_cast<double>(aic.diagnostics.aic_n_min) / static_cast<double>(n);
      }
      cbe_estimate(block, fraction, method.cbe_grid, &counter);
      break;
    }
    case EstimatorKind::mmse:
      mmse_estimate(block, &counter);
      break;
  }
  return {counter.total(), counter.stages()};
}

}  // namespace noisebench
