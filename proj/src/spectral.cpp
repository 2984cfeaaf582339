#include "noisebench/spectral.hpp"

#include <fftw3.h>
#include <spdlog/spdlog.h>

#include <cmath>
#include <map>
#include <mutex>
#include <numeric>
#include <utility>

#include "noisebench/error.hpp"

namespace noisebench {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::invalid_argument: return "invalid-argument";
    case ErrorKind::insufficient_samples: return "insufficient-samples";
    case ErrorKind::non_finite: return "non-finite";
    case ErrorKind::malformed_length: return "malformed-length";
    case ErrorKind::io: return "io-error";
    case ErrorKind::config: return "config-error";
    case ErrorKind::zero_power: return "zero-power";
    case ErrorKind::out_of_range: return "out-of-range";
    case ErrorKind::degenerate_spectrum: return "degenerate-spectrum";
    case ErrorKind::empty_noise_group: return "empty-noise-group";
    case ErrorKind::numerical_failure: return "numerical-failure";
  }
  return "unknown";
}

namespace {

// FFTW's planner is not reentrant; execution with the new-array interface is.
// Plans are created once per (size, direction) and live for the process.
class PlanCache {
 public:
  fftw_plan get(std::size_t n, int sign) {
    std::lock_guard lock(mutex_);
    auto key = std::make_pair(n, sign);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    std::vector<fftw_complex> in(n), out(n);
    fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(n), in.data(), out.data(), sign,
                                      FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (plan == nullptr) {
      throw Error(ErrorKind::numerical_failure, "FFTW could not plan a transform");
    }
    plans_.emplace(key, plan);
    return plan;
  }

  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

 private:
  std::mutex mutex_;
  std::map<std::pair<std::size_t, int>, fftw_plan> plans_;
};

PlanCache& plan_cache() {
  static PlanCache cache;
  return cache;
}

std::vector<Complex> transform(std::span<const Complex> input, int sign) {
  const std::size_t n = input.size();
  std::vector<Complex> in(input.begin(), input.end());
  std::vector<Complex> out(n);
  fftw_plan plan = plan_cache().get(n, sign);
  fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(in.data()),
                   reinterpret_cast<fftw_complex*>(out.data()));
  return out;
}

void require_finite(std::span<const Complex> values, const char* what) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i].real()) || !std::isfinite(values[i].imag())) {
      throw Error(ErrorKind::non_finite,
                  std::string(what) + ": non-finite value at index " + std::to_string(i));
    }
  }
}

}  // namespace

double PowerSpectrum::mean() const noexcept {
  if (power.empty()) return 0.0;
  return std::accumulate(power.begin(), power.end(), 0.0) / static_cast<double>(power.size());
}

ResourceBlock::ResourceBlock(std::vector<SpectralFrame> frames) : frames_(std::move(frames)) {
  if (frames_.empty()) return;
  const std::size_t n = frames_.front().size();
  for (std::size_t m = 0; m < frames_.size(); ++m) {
    if (frames_[m].size() != n) {
      throw Error(ErrorKind::invalid_argument, "resource block frames differ in size");
    }
    if (frames_[m].frame_index != m) {
      throw Error(ErrorKind::invalid_argument,
                  "resource block frame indices must be consecutive from 0");
    }
  }
}

std::vector<std::vector<Complex>> frame_signal(const ComplexSeries& series,
                                               std::size_t frame_len,
                                               std::size_t frame_count) {
  if (frame_len < 1 || frame_count < 1) {
    throw Error(ErrorKind::invalid_argument, "frame length and count must be >= 1");
  }
  const std::size_t needed = frame_len * frame_count;
  if (series.samples.size() < needed) {
    throw Error(ErrorKind::insufficient_samples,
                "need " + std::to_string(needed) + " samples, have " +
                    std::to_string(series.samples.size()));
  }
  if (series.samples.size() > needed) {
    spdlog::debug("frame_signal: discarding {} trailing samples",
                  series.samples.size() - needed);
  }
  std::vector<std::vector<Complex>> frames(frame_count);
  for (std::size_t m = 0; m < frame_count; ++m) {
    auto first = series.samples.begin() + static_cast<std::ptrdiff_t>(m * frame_len);
    frames[m].assign(first, first + static_cast<std::ptrdiff_t>(frame_len));
  }
  return frames;
}

SpectralFrame dft(std::span<const Complex> frame, std::size_t frame_index) {
  if (frame.size() < 2) throw Error(ErrorKind::invalid_argument, "dft needs N >= 2");
  require_finite(frame, "dft input");
  return SpectralFrame{transform(frame, FFTW_FORWARD), frame_index};
}

std::vector<Complex> idft(std::span<const Complex> bins) {
  if (bins.size() < 2) throw Error(ErrorKind::invalid_argument, "idft needs N >= 2");
  require_finite(bins, "idft input");
  auto out = transform(bins, FFTW_BACKWARD);
  const double scale = 1.0 / static_cast<double>(bins.size());
  for (auto& v : out) v *= scale;
  return out;
}

PowerSpectrum power_spectrum(const SpectralFrame& frame, OpCounter* ops) {
  const std::size_t n = frame.size();
  if (n < 2) throw Error(ErrorKind::invalid_argument, "power spectrum needs N >= 2");
  PowerSpectrum out{std::vector<double>(n), frame.frame_index};
  const double scale = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) out.power[i] = std::norm(frame.bins[i]) * scale;
  count_mul(ops, 3 * n);
  count_add(ops, n);
  return out;
}

PowerSpectrum averaged_periodogram(std::span<const SpectralFrame> frames, OpCounter* ops) {
  if (frames.empty()) throw Error(ErrorKind::invalid_argument, "periodogram needs M >= 1");
  const std::size_t n = frames.front().size();
  PowerSpectrum out{std::vector<double>(n, 0.0), frames.back().frame_index};
  for (const auto& frame : frames) {
    if (frame.size() != n) throw Error(ErrorKind::invalid_argument, "frames differ in size");
    const auto p = power_spectrum(frame, ops);
    for (std::size_t i = 0; i < n; ++i) out.power[i] += p.power[i];
    count_add(ops, n);
  }
  const double inv_m = 1.0 / static_cast<double>(frames.size());
  for (auto& v : out.power) v *= inv_m;
  count_mul(ops, n);
  return out;
}

PowerSpectrum averaged_periodogram(const ResourceBlock& block, OpCounter* ops) {
  return averaged_periodogram(block.frames(), ops);
}

ComplexSeries to_time_domain(const ResourceBlock& block, double sample_rate_hz) {
  ComplexSeries series;
  series.sample_rate_hz = sample_rate_hz;
  series.samples.reserve(block.n_bins() * block.n_frames());
  for (const auto& frame : block.frames()) {
    const auto samples = idft(frame.bins);
    series.samples.insert(series.samples.end(), samples.begin(), samples.end());
  }
  return series;
}

}  // namespace noisebench
