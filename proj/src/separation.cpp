#include "noisebench/separation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "noisebench/error.hpp"

namespace noisebench {

namespace {

std::size_t window_start(std::size_t n, std::size_t k, std::size_t size) {
  const std::size_t left = (k - 1) / 2;
  const std::size_t start = n > left ? n - left : 0;
  return std::min(start, size - k);
}

void require_valid_power(std::span<const double> power) {
  for (std::size_t i = 0; i < power.size(); ++i) {
    if (!std::isfinite(power[i]) || power[i] < 0.0) {
      throw Error(ErrorKind::invalid_argument,
                  "power bin " + std::to_string(i) + " is negative or non-finite");
    }
  }
}

// Maximal runs of strictly positive forward differences, as closed
// intervals [a, b] of difference indices.
std::vector<BinRun> positive_runs(std::span<const double> smoothed, OpCounter* ops) {
  std::vector<BinRun> runs;
  const std::size_t n = smoothed.size();
  std::size_t i = 0;
  while (i + 1 < n) {
    if (!(smoothed[i + 1] - smoothed[i] > 0.0)) {
      ++i;
      continue;
    }
    const std::size_t first = i;
    while (i + 1 < n && smoothed[i + 1] - smoothed[i] > 0.0) ++i;
    runs.push_back({first, i - 1});
  }
  count_add(ops, n - 1);
  count_cmp(ops, n - 1);
  return runs;
}

std::vector<double> trailing_average(std::span<const double> p, std::size_t k, OpCounter* ops) {
  const std::size_t n = p.size();
  std::vector<double> prefix(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + p[i];
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i + 1 >= k ? i + 1 - k : 0;
    out[i] = (prefix[i + 1] - prefix[lo]) / static_cast<double>(i + 1 - lo);
  }
  count_add(ops, 2 * n);
  count_mul(ops, n);
  return out;
}

std::vector<double> centered_average(std::span<const double> p, std::size_t k, OpCounter* ops) {
  const std::size_t n = p.size();
  std::vector<double> prefix(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + p[i];
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t s = window_start(i, k, n);
    out[i] = (prefix[s + k] - prefix[s]) / static_cast<double>(k);
  }
  count_add(ops, 2 * n);
  count_mul(ops, n);
  return out;
}

std::vector<bool> mark_runs(std::size_t n, const std::vector<BinRun>& runs) {
  std::vector<bool> mask(n, false);
  for (const auto& r : runs) {
    for (std::size_t b = r.first; b <= r.last; ++b) mask[b] = true;
  }
  return mask;
}

bool all_signal(const std::vector<bool>& mask) {
  return std::all_of(mask.begin(), mask.end(), [](bool b) { return b; });
}

}  // namespace

std::string_view to_string(SeparationMethod method) noexcept {
  switch (method) {
    case SeparationMethod::ideal: return "ideal";
    case SeparationMethod::fisher: return "fisher";
    case SeparationMethod::rof: return "rof";
  }
  return "unknown";
}

std::size_t SeparationMask::noise_count() const noexcept {
  return static_cast<std::size_t>(std::count(is_signal.begin(), is_signal.end(), false));
}

void RofParams::validate() const {
  if (!(lambda1 > 0.0 && lambda1 < 100.0)) {
    throw Error(ErrorKind::invalid_argument, "lambda1 must lie in (0, 100)");
  }
  if (!(lambda2 > 0.0 && lambda2 < 1.0)) {
    throw Error(ErrorKind::invalid_argument, "lambda2 must lie in (0, 1)");
  }
}

PowerSpectrum rof_erode(const PowerSpectrum& power, std::size_t k) {
  const std::size_t n = power.size();
  if (k < 2 || k > n) {
    throw Error(ErrorKind::out_of_range, "erosion window must satisfy 2 <= k <= N");
  }
  PowerSpectrum out{std::vector<double>(n), power.frame_index};
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t s = window_start(i, k, n);
    const auto first = power.power.begin() + static_cast<std::ptrdiff_t>(s);
    out.power[i] = *std::min_element(first, first + static_cast<std::ptrdiff_t>(k));
  }
  return out;
}

BandWidthSearch rof_band_width_search(std::span<const double> power, double lambda1, OpCounter* ops) {
  const std::size_t n = power.size();
  if (n < 4) throw Error(ErrorKind::invalid_argument, "band-width search needs N >= 4");
  require_valid_power(power);

  BandWidthSearch out;
  out.energies.resize(n);
  out.drops.resize(n - 1);

  // eroded[i] holds F_k(i); growing k by one adds exactly one bin to each
  // window, either just left of it or just right of it.
  std::vector<double> eroded(power.begin(), power.end());
  out.energies[0] = std::accumulate(power.begin(), power.end(), 0.0);
  count_add(ops, n);
  if (!(out.energies[0] > 0.0)) {
    throw Error(ErrorKind::degenerate_spectrum, "all-zero power spectrum");
  }
  for (std::size_t k = 1; k < n; ++k) {
    double energy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t s_old = window_start(i, k, n);
      const std::size_t s_new = window_start(i, k + 1, n);
      const std::size_t added = s_new < s_old ? s_new : s_old + k;
      eroded[i] = std::min(eroded[i], power[added]);
      energy += eroded[i];
    }
    count_cmp(ops, n);
    count_add(ops, n);
    out.energies[k] = energy;
    const double previous = out.energies[k - 1];
    out.drops[k - 1] = previous > 0.0 ? 100.0 * (previous - energy) / previous : 0.0;
    count_add(ops, 1);
    count_mul(ops, 2);
    count_cmp(ops, 1);
  }

  // drops[j] is D_{j+2}
  std::size_t best = 0;
  for (std::size_t j = 1; j < out.drops.size(); ++j) {
    if (out.drops[j] > out.drops[best]) best = j;
  }
  count_cmp(ops, out.drops.size());
  std::size_t k = best + 2;
  while (k < n && out.drops[k - 1] >= lambda1) {
    ++k;
    count_cmp(ops, 1);
  }
  out.band_width = k;
  return out;
}

std::size_t rof_find_band_width(const PowerSpectrum& power, double lambda1) {
  return rof_band_width_search(power.power, lambda1).band_width;
}

SeparationMask rof_separate(const PowerSpectrum& power, const RofParams& params, OpCounter* ops) {
  params.validate();
  const std::size_t n = power.size();
  auto search = rof_band_width_search(power.power, params.lambda1, ops);
  const std::size_t k = search.band_width;

  SeparationMask mask;
  mask.method = SeparationMethod::rof;
  auto& diag = mask.diagnostics;
  diag.band_width = k;
  diag.energies = std::move(search.energies);
  diag.drops = std::move(search.drops);
  diag.smoothed = params.alignment == RofAlignment::trailing ? trailing_average(power.power, k, ops)
                                                             : centered_average(power.power, k, ops);

  const double min_width = params.lambda2 * static_cast<double>(n);
  std::vector<BinRun> runs;
  for (const auto& r : positive_runs(diag.smoothed, ops)) {
    if (static_cast<double>(r.last - r.first + 1) > min_width) runs.push_back(r);
  }

  if (params.alignment == RofAlignment::trailing) {
    // Difference index d compares bins d and d+1; the rising bin is d+1.
    for (auto& r : runs) r = {r.first + 1, r.last + 1};
    mask.is_signal = mark_runs(n, runs);
  } else {
    std::vector<BinRun> bare;
    for (const auto& r : runs) bare.push_back({r.first, r.last + 1});
    const std::size_t pad = (k + 1) / 2;
    std::vector<BinRun> expanded;
    for (const auto& r : bare) {
      expanded.push_back({r.first > pad ? r.first - pad : 0, std::min(n - 1, r.last + pad)});
    }
    runs = expanded;
    mask.is_signal = mark_runs(n, runs);
    if (all_signal(mask.is_signal)) {
      diag.expansion_dropped = true;
      runs = bare;
      mask.is_signal = mark_runs(n, runs);
    }
  }
  if (all_signal(mask.is_signal)) {
    throw Error(ErrorKind::degenerate_spectrum, "rank-order separation classified every bin as signal");
  }
  diag.runs = std::move(runs);
  return mask;
}

SeparationMask fisher_separate(const PowerSpectrum& power, OpCounter* ops) {
  const std::size_t n = power.size();
  if (n < 4) throw Error(ErrorKind::invalid_argument, "Fisher separation needs N >= 4");
  require_valid_power(power.power);

  std::vector<double> amplitude(n);
  for (std::size_t i = 0; i < n; ++i) amplitude[i] = std::sqrt(power.power[i]);
  count_transcendental(ops, n);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::uint64_t comparisons = 0;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    ++comparisons;
    return amplitude[a] < amplitude[b];
  });
  count_cmp(ops, comparisons);
  std::vector<double> sorted(n);
  for (std::size_t i = 0; i < n; ++i) sorted[i] = amplitude[order[i]];

  auto mean_var = [&](std::size_t lo, std::size_t hi) {
    // sorted, so equal ends mean a constant group; skip the rounding noise
    if (sorted[lo] == sorted[hi - 1]) return std::pair{sorted[lo], 0.0};
    double sum = 0.0;
    for (std::size_t i = lo; i < hi; ++i) sum += sorted[i];
    const double mean = sum / static_cast<double>(hi - lo);
    double ss = 0.0;
    for (std::size_t i = lo; i < hi; ++i) {
      const double d = sorted[i] - mean;
      ss += d * d;
    }
    return std::pair{mean, ss / static_cast<double>(hi - lo - 1)};
  };

  SeparationMask mask;
  mask.method = SeparationMethod::fisher;
  mask.is_signal.assign(n, false);

  bool found = false;
  std::size_t best_t = 0;
  double best_j = 0.0;
  for (std::size_t t = 2; t + 2 <= n; ++t) {
    const auto [mu_low, var_low] = mean_var(0, t);
    const auto [mu_high, var_high] = mean_var(t, n);
    count_add(ops, 3 * n + 3);
    count_mul(ops, n + 4);
    const double num = (mu_low - mu_high) * (mu_low - mu_high);
    const double den = var_low + var_high;
    double j;
    if (den > 0.0) {
      j = num / den;
    } else if (num > 0.0) {
      j = std::numeric_limits<double>::infinity();
    } else {
      continue;
    }
    count_cmp(ops, 1);
    if (!found || j >= best_j) {
      found = true;
      best_j = j;
      best_t = t;
    }
  }
  if (!found) return mask;

  mask.diagnostics.split = best_t;
  mask.diagnostics.criterion = best_j;
  for (std::size_t i = best_t; i < n; ++i) mask.is_signal[order[i]] = true;
  return mask;
}

SeparationMask ideal_separate(const GroundTruth& truth, std::size_t frame_index) {
  if (frame_index >= truth.signal_mask.size()) {
    throw Error(ErrorKind::out_of_range, "frame " + std::to_string(frame_index) + " outside ground truth");
  }
  SeparationMask mask;
  mask.method = SeparationMethod::ideal;
  mask.is_signal = truth.signal_mask[frame_index];
  if (!mask.is_signal.empty() && all_signal(mask.is_signal)) {
    throw Error(ErrorKind::degenerate_spectrum, "ground truth marks every bin as signal");
  }
  return mask;
}

}  // namespace noisebench
