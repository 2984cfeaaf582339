#pragma once

// Framing, DFT and periodograms: the time-frequency front end every
// estimator consumes.

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "noisebench/op_counter.hpp"

namespace noisebench {

using Complex = std::complex<double>;

/// Time-domain I/Q samples.
struct ComplexSeries {
  std::vector<Complex> samples;
  double sample_rate_hz = 10e6;
};

/// One frame of N complex spectral coefficients X_m(n), unnormalized DFT.
struct SpectralFrame {
  std::vector<Complex> bins;
  std::size_t frame_index = 0;

  std::size_t size() const noexcept { return bins.size(); }
};

/// Per-bin power |X_m(n)|^2 / N. The bin mean equals the time-domain mean
/// power of the frame, so values are in the same units as the input (mW).
struct PowerSpectrum {
  std::vector<double> power;
  std::size_t frame_index = 0;

  std::size_t size() const noexcept { return power.size(); }
  double mean() const noexcept;
};

/// M consecutive frames sharing N bins; frame indices run 0..M-1.
class ResourceBlock {
 public:
  ResourceBlock() = default;
  /// Validates equal frame sizes and consecutive indices starting at 0.
  explicit ResourceBlock(std::vector<SpectralFrame> frames);

  std::size_t n_bins() const noexcept { return frames_.empty() ? 0 : frames_.front().size(); }
  std::size_t n_frames() const noexcept { return frames_.size(); }

  std::span<const SpectralFrame> frames() const noexcept { return frames_; }
  const SpectralFrame& frame(std::size_t m) const { return frames_.at(m); }

 private:
  std::vector<SpectralFrame> frames_;
};

/// Splits the first N*M samples into M non-overlapping frames of N samples.
/// Samples past N*M are discarded.
std::vector<std::vector<Complex>> frame_signal(const ComplexSeries& series,
                                               std::size_t frame_len,
                                               std::size_t frame_count);

/// Forward DFT, X(n) = sum_t x(t) exp(-2 pi i n t / N). Any N >= 2.
SpectralFrame dft(std::span<const Complex> frame, std::size_t frame_index = 0);

/// Inverse of dft(): x(t) = (1/N) sum_n X(n) exp(2 pi i n t / N).
std::vector<Complex> idft(std::span<const Complex> bins);

PowerSpectrum power_spectrum(const SpectralFrame& frame, OpCounter* ops = nullptr);

/// Bin-wise mean of the per-frame power spectra. The result carries the
/// index of the last frame in the span.
PowerSpectrum averaged_periodogram(std::span<const SpectralFrame> frames,
                                   OpCounter* ops = nullptr);
PowerSpectrum averaged_periodogram(const ResourceBlock& block, OpCounter* ops = nullptr);

/// Frames -> time domain, concatenated (inverse of frame + dft).
ComplexSeries to_time_domain(const ResourceBlock& block, double sample_rate_hz);

}  // namespace noisebench
