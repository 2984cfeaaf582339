#pragma once

// Simulated ISM-band observation: noise (synthetic or from an I/Q trace),
// rescaled to a reference power, with rectangular-spectrum signals added
// per subband. Ground truth is kept analytically.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "noisebench/spectral.hpp"

namespace noisebench {

enum class NoiseKind { white_gaussian, surrogate_industrial, trace_file };

/// Parameters of the synthetic industrial-noise surrogate. This is not a
/// model of any measured environment: white Gaussian base, sparse complex
/// impulses and a first-order spectral tilt.
struct SurrogateParams {
  double impulse_rate = 1e-3;    ///< Bernoulli probability per sample, [0, 1)
  double impulse_factor = 10.0;  ///< impulse magnitude in units of base RMS
  double tilt_db = 0.0;          ///< DC-to-Nyquist power tilt of the colouring filter

  void validate() const;
};

struct NoiseSource {
  NoiseKind kind = NoiseKind::white_gaussian;
  std::uint64_t seed = 1;
  std::filesystem::path path;  ///< trace_file only
  SurrogateParams params;      ///< surrogate_industrial only
};

/// Half-open bin range [begin, end).
struct BinRange {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t width() const noexcept { return end - begin; }
  bool contains(std::size_t bin) const noexcept { return bin >= begin && bin < end; }
  bool operator==(const BinRange&) const = default;
};

/// Rectangular signal occupying part of one subband during a frame range.
/// Either amplitude_mv or target_snr_db sets the level.
struct SubbandSignal {
  std::size_t subband_index = 0;
  double occupancy_fraction = 1.0;
  double amplitude_mv = 0.0;
  std::optional<double> target_snr_db;
  std::size_t frame_start = 0;
  std::optional<std::size_t> frame_end;  ///< exclusive; unset = until the last frame
};

/// Overrides signal amplitudes so the whole-band SNR equals snr_db on
/// frames [frame_start, frame_end).
struct SnrStep {
  std::size_t frame_start = 0;
  std::size_t frame_end = 0;
  double snr_db = 0.0;
};

/// Overrides the noise power on frames [frame_start, frame_end).
struct NoiseStep {
  std::size_t frame_start = 0;
  std::size_t frame_end = 0;
  double power_mw = 1.0;
};

struct ScenarioConfig {
  std::string scenario_id = "scenario";
  std::size_t n_bins = 512;
  std::size_t n_frames = 100;
  double sample_rate_hz = 10e6;
  NoiseSource noise;
  double reference_noise_power_mw = 1.0;
  std::size_t subband_count = 4;
  std::vector<SubbandSignal> signals;
  std::vector<SnrStep> snr_schedule;
  std::vector<NoiseStep> noise_steps;

  void validate() const;
};

struct GroundTruth {
  std::vector<double> noise_power_mw;   ///< per frame
  std::vector<double> signal_power_mw;  ///< per frame, whole-band mean
  std::vector<double> true_snr_db;      ///< per frame; -inf when no signal
  std::vector<std::vector<bool>> signal_mask;

  std::size_t n_frames() const noexcept { return noise_power_mw.size(); }
};

struct Scenario {
  ResourceBlock block;
  GroundTruth truth;
};

/// Raw interleaved little-endian float32 (I, Q) pairs, no header.
ComplexSeries load_iq_trace(const std::filesystem::path& path, double sample_rate_hz = 10e6);
void write_iq_trace(const std::filesystem::path& path, const ComplexSeries& series);

double mean_power(const ComplexSeries& series) noexcept;

/// Multiplies by one real factor so the mean of |s|^2 equals target_mw.
ComplexSeries rescale_to_power(const ComplexSeries& series, double target_mw);

/// Circularly-symmetric complex Gaussian noise with E|w|^2 = power_mw.
/// Generated in fixed-size chunks, each from its own seeded stream, so any
/// chunk can be produced independently of the others.
ComplexSeries synth_white_noise(std::size_t length, double power_mw, std::uint64_t seed);

ComplexSeries synth_industrial_noise(std::size_t length, const SurrogateParams& params,
                                     double power_mw, std::uint64_t seed);

/// Amplitude (mV) of a rectangle covering occupied_fraction of the band
/// that yields the given whole-band SNR: A^2 * 1e-3 * fraction = P_w * 10^(SNR/10).
double amplitude_for_snr(double target_snr_db, double noise_power_mw, double occupied_fraction);

/// sqrt(mW) amplitude of a per-bin power of A_mv^2 * 1e-3 mW.
double mv_to_sqrt_mw(double amplitude_mv) noexcept;

/// Adds a rectangle of per-bin power amplitude_sqrt_mw^2 to bins in `band`.
SpectralFrame inject_rect_signal(const SpectralFrame& frame, BinRange band,
                                 double amplitude_sqrt_mw);

BinRange subband_range(const ScenarioConfig& config, std::size_t subband_index);
BinRange signal_bins(const ScenarioConfig& config, const SubbandSignal& signal);

Scenario build_scenario(const ScenarioConfig& config);

/// The comparison scenario: four subbands, the third fully occupied by a
/// rectangle at `snr_db`, white Gaussian noise at 1 mW.
ScenarioConfig reference_scenario(std::size_t n_bins, std::size_t n_frames, double snr_db,
                                  std::uint64_t seed);

}  // namespace noisebench
