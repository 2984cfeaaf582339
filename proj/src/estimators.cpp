#include "noisebench/estimators.hpp"

#include <Eigen/Dense>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "noisebench/error.hpp"
#include "toeplitz.hpp"

namespace noisebench {

namespace {

constexpr double kPowerFloor = 1e-30;

NoisePowerEstimate checked(double value, std::size_t frame_index, EstimatorKind method) {
  if (!std::isfinite(value)) {
    throw Error(ErrorKind::numerical_failure, std::string(to_string(method)) + " estimate is not finite");
  }
  if (!(value > 0.0)) {
    throw Error(ErrorKind::zero_power, std::string(to_string(method)) + " estimate is not positive");
  }
  NoisePowerEstimate out;
  out.value_mw = value;
  out.frame_index = frame_index;
  out.method = method;
  return out;
}

void require_same_size(const PowerSpectrum& power, const SeparationMask& mask) {
  if (power.size() != mask.size()) {
    throw Error(ErrorKind::invalid_argument, "mask length differs from spectrum length");
  }
}

}  // namespace

std::string_view to_string(EstimatorKind kind) noexcept {
  switch (kind) {
    case EstimatorKind::ml: return "ML";
    case EstimatorKind::mvu: return "MVU";
    case EstimatorKind::aic: return "AIC";
    case EstimatorKind::cbe: return "CBE";
    case EstimatorKind::mmse: return "MMSE";
  }
  return "unknown";
}

std::vector<double> MpFitRange::grid() const {
  std::vector<double> out(L);
  if (L == 1) {
    out[0] = sigma_min_sq;
    return out;
  }
  const double step = (sigma_max_sq - sigma_min_sq) / static_cast<double>(L - 1);
  for (std::size_t l = 0; l < L; ++l) out[l] = sigma_min_sq + step * static_cast<double>(l);
  out[L - 1] = sigma_max_sq;
  return out;
}

NoisePowerEstimate ml_estimate(const PowerSpectrum& power, const SeparationMask& mask, OpCounter* ops) {
  require_same_size(power, mask);
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < power.size(); ++i) {
    if (mask.is_signal[i]) continue;
    sum += power.power[i];
    ++count;
  }
  count_cmp(ops, power.size());
  count_add(ops, count);
  count_mul(ops, 1);
  if (count == 0) throw Error(ErrorKind::empty_noise_group, "mask leaves no noise bins");
  auto out = checked(sum / static_cast<double>(count), power.frame_index, EstimatorKind::ml);
  out.diagnostics.noise_bins = count;
  return out;
}

NoisePowerEstimate mvu_estimate(std::span<const PowerSpectrum> powers, std::span<const SeparationMask> masks,
                                OpCounter* ops) {
  if (powers.empty() || powers.size() != masks.size()) {
    throw Error(ErrorKind::invalid_argument, "MVU needs one mask per frame and at least one frame");
  }
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t m = 0; m < powers.size(); ++m) {
    require_same_size(powers[m], masks[m]);
    for (std::size_t i = 0; i < powers[m].size(); ++i) {
      if (masks[m].is_signal[i]) continue;
      sum += powers[m].power[i];
      ++count;
    }
    count_cmp(ops, powers[m].size());
  }
  count_add(ops, count);
  count_mul(ops, 1);
  if (count == 0) throw Error(ErrorKind::empty_noise_group, "masks leave no noise bins");
  auto out = checked(sum / static_cast<double>(count), powers.back().frame_index, EstimatorKind::mvu);
  out.diagnostics.noise_bins = count;
  return out;
}

NoisePowerEstimate aic_estimate(const PowerSpectrum& averaged, std::size_t frames, OpCounter* ops) {
  const std::size_t n = averaged.size();
  if (n < 2) throw Error(ErrorKind::invalid_argument, "AIC needs N >= 2");
  if (frames < 1) throw Error(ErrorKind::invalid_argument, "AIC needs M >= 1");

  std::vector<double> lambda(averaged.power);
  std::size_t floored = 0;
  for (auto& v : lambda) {
    if (!std::isfinite(v) || v < 0.0) throw Error(ErrorKind::invalid_argument, "AIC input must be finite and >= 0");
    if (v < kPowerFloor) {
      v = kPowerFloor;
      ++floored;
    }
  }
  if (floored > 0) spdlog::warn("aic: floored {} zero bins at {}", floored, kPowerFloor);

  std::uint64_t comparisons = 0;
  std::sort(lambda.begin(), lambda.end(), [&](double a, double b) {
    ++comparisons;
    return a > b;
  });
  count_cmp(ops, comparisons + n);

  // Suffix sums of the values and of their logarithms give every tail's
  // arithmetic and geometric mean in one pass.
  std::vector<double> sum(n + 1, 0.0), log_sum(n + 1, 0.0);
  for (std::size_t i = n; i-- > 0;) {
    sum[i] = sum[i + 1] + lambda[i];
    log_sum[i] = log_sum[i + 1] + std::log(lambda[i]);
  }
  count_transcendental(ops, n);
  count_add(ops, 2 * n);

  const double nn = static_cast<double>(n);
  const double mm = static_cast<double>(frames);
  std::size_t n_min = 0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < n; ++k) {
    const double tail = static_cast<double>(n - k);
    const double log_alpha = std::max(0.0, std::log(sum[k] / tail) - log_sum[k] / tail);
    const double kk = static_cast<double>(k);
    const double aic = tail * mm * log_alpha + kk * (2.0 * nn - kk);
    if (aic < best) {
      best = aic;
      n_min = k;
    }
  }
  count_transcendental(ops, n);
  count_mul(ops, 6 * n);
  count_add(ops, 4 * n);
  count_cmp(ops, 2 * n);

  auto out = checked(sum[n_min] / static_cast<double>(n - n_min), averaged.frame_index, EstimatorKind::aic);
  count_mul(ops, 1);
  out.diagnostics.aic_n_min = n_min;
  return out;
}

EigenSpectrum covariance_eigenvalues(const ResourceBlock& block, OpCounter* ops) {
  const std::size_t m = block.n_frames();
  const std::size_t n = block.n_bins();
  if (m < 1 || n < 2) throw Error(ErrorKind::invalid_argument, "covariance needs M >= 1 and N >= 2");
  const std::size_t cols = 2 * n;

  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> a(static_cast<Eigen::Index>(m),
                                                                          static_cast<Eigen::Index>(cols));
  const double scale = std::sqrt(2.0 / static_cast<double>(n));
  for (std::size_t r = 0; r < m; ++r) {
    const auto& bins = block.frame(r).bins;
    for (std::size_t c = 0; c < n; ++c) {
      a(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = scale * bins[c].real();
      a(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(n + c)) = scale * bins[c].imag();
    }
  }

  count_mul(ops, 2 * n * m);

  Eigen::MatrixXd cov(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
  {
    OpStage stage(ops, "covariance");
    const double inv = 1.0 / static_cast<double>(cols);
    for (Eigen::Index i = 0; i < cov.rows(); ++i) {
      for (Eigen::Index j = i; j < cov.cols(); ++j) {
        double acc = 0.0;
        for (Eigen::Index k = 0; k < a.cols(); ++k) acc += a(i, k) * a(j, k);
        cov(i, j) = acc * inv;
        cov(j, i) = cov(i, j);
      }
    }
    const auto pairs = static_cast<std::uint64_t>(m * (m + 1) / 2);
    count_mul(ops, pairs * (cols + 1));
    count_add(ops, pairs * cols);
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorKind::numerical_failure, "symmetric eigensolver did not converge");
  }
  EigenSpectrum out;
  out.rows = m;
  out.columns = cols;
  out.eigenvalues.assign(solver.eigenvalues().data(), solver.eigenvalues().data() + m);
  std::sort(out.eigenvalues.begin(), out.eigenvalues.end(), std::greater<>());
  for (auto& v : out.eigenvalues) v = std::max(v, 0.0);
  return out;
}

NoisePowerEstimate cbe_from_eigenvalues(const EigenSpectrum& spectrum, double occupied_fraction, std::size_t L,
                                        OpCounter* ops) {
  const std::size_t m = spectrum.rows;
  const auto& eig = spectrum.eigenvalues;
  if (m < 2 || eig.size() != m) throw Error(ErrorKind::invalid_argument, "CBE needs M >= 2 eigenvalues");
  if (!(occupied_fraction >= 0.0 && occupied_fraction < 1.0)) {
    throw Error(ErrorKind::invalid_argument, "occupied fraction must lie in [0, 1)");
  }
  if (L < 2) throw Error(ErrorKind::invalid_argument, "CBE grid needs L >= 2");
  const double ratio = static_cast<double>(m) / static_cast<double>(spectrum.columns);
  if (!(ratio < 1.0)) throw Error(ErrorKind::invalid_argument, "CBE needs M smaller than the column count");

  const auto s = static_cast<std::size_t>(std::llround(static_cast<double>(m) * occupied_fraction));
  if (s >= m) throw Error(ErrorKind::empty_noise_group, "no noise eigenvalues left after removing S");

  OpStage stage(ops, "mp_fit");
  const double den = (1.0 - std::sqrt(ratio)) * (1.0 - std::sqrt(ratio));
  MpFitRange range;
  range.sigma_min_sq = eig[m - 1] / den;
  range.sigma_max_sq = eig[s] / den;
  range.L = L;
  count_transcendental(ops, 1);
  count_mul(ops, 3);
  if (!(range.sigma_max_sq > 0.0)) throw Error(ErrorKind::zero_power, "all noise eigenvalues are zero");

  const std::size_t noise = m - s;
  std::vector<double> ascending(eig.rbegin(), eig.rbegin() + static_cast<std::ptrdiff_t>(noise));
  const double fit_ratio = static_cast<double>(noise) / static_cast<double>(spectrum.columns);

  NoisePowerEstimate out;
  auto& diag = out.diagnostics;
  diag.cbe_signal_count = s;
  diag.cbe_range = range;
  const auto grid = range.grid();
  diag.cbe_distances.assign(L, std::numeric_limits<double>::infinity());

  bool found = false;
  const bool collapsed = !(range.sigma_max_sq > range.sigma_min_sq);
  for (std::size_t l = 0; l < (collapsed ? 1 : L); ++l) {
    const double sigma_sq = collapsed ? range.sigma_max_sq : grid[l];
    if (!(sigma_sq > 0.0)) continue;
    const auto cdf = mp_cdf_sorted(ascending, fit_ratio, sigma_sq, ops);
    double acc = 0.0;
    for (std::size_t i = 0; i < noise; ++i) {
      const double d = static_cast<double>(i + 1) / static_cast<double>(noise) - cdf[i];
      acc += d * d;
    }
    count_mul(ops, 2 * noise);
    count_add(ops, 2 * noise);
    count_transcendental(ops, 1);
    diag.cbe_distances[l] = std::sqrt(acc);
    count_cmp(ops, 1);
    if (!found || diag.cbe_distances[l] < diag.cbe_distances[diag.cbe_best]) {
      found = true;
      diag.cbe_best = l;
    }
  }
  if (!found) throw Error(ErrorKind::zero_power, "no positive variance candidate");
  const double value = collapsed ? range.sigma_max_sq : grid[diag.cbe_best];
  auto result = checked(value, 0, EstimatorKind::cbe);
  result.diagnostics = std::move(diag);
  return result;
}

NoisePowerEstimate cbe_estimate(const ResourceBlock& block, double occupied_fraction, std::size_t L,
                                OpCounter* ops) {
  if (block.n_frames() < 2) throw Error(ErrorKind::invalid_argument, "CBE needs M >= 2");
  auto out = cbe_from_eigenvalues(covariance_eigenvalues(block, ops), occupied_fraction, L, ops);
  out.frame_index = block.frames().back().frame_index;
  return out;
}

MmseSystem mmse_weights(const ResourceBlock& block, OpCounter* ops) {
  const std::size_t m = block.n_frames();
  const std::size_t n = block.n_bins();
  if (m < 3) throw Error(ErrorKind::invalid_argument, "MMSE needs M >= 3");

  OpStage stage(ops, "variance");
  std::vector<Complex> mean(n, Complex{});
  for (const auto& frame : block.frames()) {
    for (std::size_t i = 0; i < n; ++i) mean[i] += frame.bins[i];
  }
  for (auto& v : mean) v /= static_cast<double>(m);
  count_add(ops, 2 * m * n);
  count_mul(ops, 2 * n);

  const double inv_n = 1.0 / static_cast<double>(n);
  std::vector<double> var(n, 0.0);
  for (std::size_t f = 0; f + 1 < m; ++f) {
    const auto& bins = block.frame(f).bins;
    for (std::size_t i = 0; i < n; ++i) var[i] += std::norm(bins[i] - mean[i]);
  }
  const double inv_frames = inv_n / static_cast<double>(m - 1);
  for (auto& v : var) v *= inv_frames;
  count_add(ops, 4 * (m - 1) * n);
  count_mul(ops, 2 * (m - 1) * n + n);
  if (std::all_of(var.begin(), var.end(), [](double v) { return v == 0.0; })) {
    throw Error(ErrorKind::zero_power, "mean-removed block has zero variance in every bin");
  }

  MmseSystem out;
  {
    OpStage lag_stage(ops, "autocorrelation");
    out.lags.assign(n, 0.0);
    for (std::size_t d = 0; d < n; ++d) {
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) acc += var[i] * var[(i + d) % n];
      out.lags[d] = acc * inv_n;
    }
    count_mul(ops, n * n + n);
    count_add(ops, n * n);
  }

  OpStage solve_stage(ops, "solve");
  std::vector<double> column = out.lags;
  column[0] += out.lags[0];
  auto w = solve_symmetric_toeplitz(column, out.lags, ops);
  if (!w) {
    out.ridge = true;
    column[0] += 1e-6 * out.lags[0];
    w = solve_symmetric_toeplitz(column, out.lags, ops);
    if (!w) throw Error(ErrorKind::numerical_failure, "MMSE weight system is singular even with ridge");
    spdlog::debug("mmse: ridge regularisation applied");
  }
  out.weights = std::move(*w);
  return out;
}

NoisePowerEstimate mmse_estimate(const ResourceBlock& block, OpCounter* ops) {
  const auto system = mmse_weights(block, ops);
  const std::size_t m = block.n_frames();
  const std::size_t n = block.n_bins();

  OpStage stage(ops, "apply");
  const auto& last = block.frame(m - 1).bins;
  double estimate = 0.0;
  double weight_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    Complex mean{};
    for (std::size_t f = 0; f < m; ++f) mean += block.frame(f).bins[i];
    mean /= static_cast<double>(m);
    estimate += system.weights[i] * std::norm(last[i] - mean) / static_cast<double>(n);
    weight_sum += system.weights[i];
  }
  count_add(ops, 2 * m * n + 4 * n);
  count_mul(ops, 6 * n);

  auto out = checked(estimate, block.frames().back().frame_index, EstimatorKind::mmse);
  out.diagnostics.mmse_weight_sum = weight_sum;
  out.diagnostics.mmse_ridge = system.ridge;
  return out;
}

Snr snr_from_powers(double sigma_x_sq, double sigma_w_sq) {
  if (!(sigma_w_sq > 0.0) || !std::isfinite(sigma_w_sq)) {
    throw Error(ErrorKind::invalid_argument, "noise power must be positive");
  }
  if (!(sigma_x_sq >= 0.0) || !std::isfinite(sigma_x_sq)) {
    throw Error(ErrorKind::invalid_argument, "received power must be finite and >= 0");
  }
  Snr out;
  out.linear = (sigma_x_sq - sigma_w_sq) / sigma_w_sq;
  out.db = out.linear > 0.0 ? 10.0 * std::log10(out.linear) : -std::numeric_limits<double>::infinity();
  return out;
}

}  // namespace noisebench
