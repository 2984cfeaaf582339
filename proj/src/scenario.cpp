#include "noisebench/scenario.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <numbers>
#include <random>

#include "noisebench/error.hpp"
#include "rng.hpp"

namespace noisebench {

namespace {

constexpr std::size_t kChunk = 4096;

// Stream identifiers keep the generators of one seed statistically independent.
constexpr std::uint64_t kWhiteStream = 0x57;
constexpr std::uint64_t kImpulseStream = 0x1b;

void require(bool ok, ErrorKind kind, const std::string& message) {
  if (!ok) throw Error(kind, message);
}

void require_positive_finite(double v, const char* name) {
  require(std::isfinite(v) && v > 0.0, ErrorKind::config,
          std::string(name) + " must be positive and finite");
}

std::size_t frame_end_of(const SubbandSignal& s, std::size_t n_frames) {
  return s.frame_end.value_or(n_frames);
}

}  // namespace

void SurrogateParams::validate() const {
  require(impulse_rate >= 0.0 && impulse_rate < 1.0, ErrorKind::config,
          "noise.impulse_rate must lie in [0, 1)");
  require(std::isfinite(impulse_factor) && impulse_factor >= 0.0, ErrorKind::config,
          "noise.impulse_factor must be finite and non-negative");
  require(std::isfinite(tilt_db), ErrorKind::config, "noise.tilt_db must be finite");
}

void ScenarioConfig::validate() const {
  require(n_bins >= 4, ErrorKind::config, "n_bins must be >= 4");
  require(n_frames >= 1, ErrorKind::config, "n_frames must be >= 1");
  require_positive_finite(sample_rate_hz, "sample_rate_hz");
  require_positive_finite(reference_noise_power_mw, "reference_noise_power_mw");
  require(subband_count >= 1 && n_bins % subband_count == 0, ErrorKind::config,
          "subband_count must divide n_bins");
  if (noise.kind == NoiseKind::trace_file) {
    require(!noise.path.empty(), ErrorKind::config, "noise.path is required for trace-file noise");
  }
  if (noise.kind == NoiseKind::surrogate_industrial) noise.params.validate();

  for (std::size_t i = 0; i < signals.size(); ++i) {
    const auto& s = signals[i];
    const std::string where = "signals[" + std::to_string(i) + "]";
    require(s.subband_index < subband_count, ErrorKind::config, where + ".subband_index out of range");
    require(s.occupancy_fraction > 0.0 && s.occupancy_fraction <= 1.0, ErrorKind::config,
            where + ".occupancy_fraction must lie in (0, 1]");
    require(std::isfinite(s.amplitude_mv) && s.amplitude_mv >= 0.0, ErrorKind::config,
            where + ".amplitude_mv must be finite and non-negative");
    if (s.target_snr_db) {
      require(std::isfinite(*s.target_snr_db), ErrorKind::config, where + ".target_snr_db must be finite");
    }
    const std::size_t end = frame_end_of(s, n_frames);
    require(s.frame_start < end && end <= n_frames, ErrorKind::config,
            where + " frame range must be non-empty and within n_frames");
  }
  for (const auto& step : snr_schedule) {
    require(step.frame_start < step.frame_end && step.frame_end <= n_frames, ErrorKind::config,
            "snr_schedule frame range must be non-empty and within n_frames");
    require(std::isfinite(step.snr_db), ErrorKind::config, "snr_schedule.snr_db must be finite");
  }
  for (const auto& step : noise_steps) {
    require(step.frame_start < step.frame_end && step.frame_end <= n_frames, ErrorKind::config,
            "noise_steps frame range must be non-empty and within n_frames");
    require_positive_finite(step.power_mw, "noise_steps.power_mw");
  }
}

ComplexSeries load_iq_trace(const std::filesystem::path& path, double sample_rate_hz) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot open trace " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(ErrorKind::io, "failed reading trace " + path.string());
  if (bytes.size() % 8 != 0) {
    throw Error(ErrorKind::malformed_length,
                "trace length " + std::to_string(bytes.size()) + " is not a multiple of 8 bytes");
  }
  auto read_f32 = [&](std::size_t offset) {
    const std::uint32_t bits = std::uint32_t{bytes[offset]} | (std::uint32_t{bytes[offset + 1]} << 8) |
                               (std::uint32_t{bytes[offset + 2]} << 16) |
                               (std::uint32_t{bytes[offset + 3]} << 24);
    return std::bit_cast<float>(bits);
  };
  ComplexSeries series;
  series.sample_rate_hz = sample_rate_hz;
  series.samples.resize(bytes.size() / 8);
  for (std::size_t i = 0; i < series.samples.size(); ++i) {
    const float re = read_f32(8 * i);
    const float im = read_f32(8 * i + 4);
    if (!std::isfinite(re) || !std::isfinite(im)) {
      throw Error(ErrorKind::non_finite, "non-finite sample at index " + std::to_string(i));
    }
    series.samples[i] = Complex(re, im);
  }
  return series;
}

void write_iq_trace(const std::filesystem::path& path, const ComplexSeries& series) {
  std::vector<unsigned char> bytes(series.samples.size() * 8);
  auto put_f32 = [&](std::size_t offset, double value) {
    const auto bits = std::bit_cast<std::uint32_t>(static_cast<float>(value));
    for (int b = 0; b < 4; ++b) bytes[offset + b] = static_cast<unsigned char>(bits >> (8 * b));
  };
  for (std::size_t i = 0; i < series.samples.size(); ++i) {
    put_f32(8 * i, series.samples[i].real());
    put_f32(8 * i + 4, series.samples[i].imag());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::io, "cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorKind::io, "failed writing " + path.string());
}

double mean_power(const ComplexSeries& series) noexcept {
  if (series.samples.empty()) return 0.0;
  double acc = 0.0;
  for (const auto& s : series.samples) acc += std::norm(s);
  return acc / static_cast<double>(series.samples.size());
}

ComplexSeries rescale_to_power(const ComplexSeries& series, double target_mw) {
  if (!(target_mw > 0.0) || !std::isfinite(target_mw)) {
    throw Error(ErrorKind::invalid_argument, "target power must be positive");
  }
  const double current = mean_power(series);
  if (series.samples.empty() || !(current > 0.0)) {
    throw Error(ErrorKind::zero_power, "cannot rescale a series with zero mean power");
  }
  const double factor = std::sqrt(target_mw / current);
  ComplexSeries out = series;
  for (auto& s : out.samples) s *= factor;
  return out;
}

ComplexSeries synth_white_noise(std::size_t length, double power_mw, std::uint64_t seed) {
  if (length < 1) throw Error(ErrorKind::invalid_argument, "noise length must be >= 1");
  if (!(power_mw > 0.0)) throw Error(ErrorKind::invalid_argument, "noise power must be positive");
  ComplexSeries out;
  out.samples.resize(length);
  const double sigma = std::sqrt(power_mw / 2.0);
  for (std::size_t chunk = 0; chunk * kChunk < length; ++chunk) {
    std::mt19937_64 gen(derive_seed(seed, kWhiteStream, chunk));
    std::normal_distribution<double> normal(0.0, sigma);
    const std::size_t end = std::min(length, (chunk + 1) * kChunk);
    for (std::size_t i = chunk * kChunk; i < end; ++i) {
      const double re = normal(gen);
      const double im = normal(gen);
      out.samples[i] = Complex(re, im);
    }
  }
  return out;
}

ComplexSeries synth_industrial_noise(std::size_t length, const SurrogateParams& params,
                                     double power_mw, std::uint64_t seed) {
  params.validate();
  ComplexSeries out = synth_white_noise(length, power_mw, seed);
  const double impulse_magnitude = params.impulse_factor * std::sqrt(power_mw);

  if (params.impulse_rate > 0.0) {
    for (std::size_t chunk = 0; chunk * kChunk < length; ++chunk) {
      std::mt19937_64 gen(derive_seed(seed, kImpulseStream, chunk));
      std::uniform_real_distribution<double> uniform(0.0, 1.0);
      const std::size_t end = std::min(length, (chunk + 1) * kChunk);
      for (std::size_t i = chunk * kChunk; i < end; ++i) {
        const double hit = uniform(gen);
        const double phase = uniform(gen) * 2.0 * std::numbers::pi;
        if (hit < params.impulse_rate) out.samples[i] += std::polar(impulse_magnitude, phase);
      }
    }
  }

  if (params.tilt_db != 0.0) {
    // y[n] = x[n] + rho y[n-1]: |H(0)|^2 / |H(pi)|^2 = ((1+rho)/(1-rho))^2.
    const double g = std::pow(10.0, params.tilt_db / 20.0);
    const double rho = (g - 1.0) / (g + 1.0);
    Complex state{};
    for (auto& s : out.samples) {
      state = s + rho * state;
      s = state;
    }
  }
  return rescale_to_power(out, power_mw);
}

double amplitude_for_snr(double target_snr_db, double noise_power_mw, double occupied_fraction) {
  if (!(occupied_fraction > 0.0 && occupied_fraction <= 1.0)) {
    throw Error(ErrorKind::invalid_argument, "occupied fraction must lie in (0, 1]");
  }
  if (!(noise_power_mw > 0.0)) throw Error(ErrorKind::invalid_argument, "noise power must be positive");
  const double signal_mw = noise_power_mw * std::pow(10.0, target_snr_db / 10.0);
  return std::sqrt(signal_mw / occupied_fraction * 1e3);
}

double mv_to_sqrt_mw(double amplitude_mv) noexcept { return amplitude_mv / std::sqrt(1e3); }

SpectralFrame inject_rect_signal(const SpectralFrame& frame, BinRange band, double amplitude_sqrt_mw) {
  if (band.begin > band.end || band.end > frame.size()) {
    throw Error(ErrorKind::out_of_range, "signal band lies outside the frame");
  }
  if (!std::isfinite(amplitude_sqrt_mw)) {
    throw Error(ErrorKind::invalid_argument, "signal amplitude must be finite");
  }
  SpectralFrame out = frame;
  // power_spectrum divides |X|^2 by N, so a bin power of A^2 needs A*sqrt(N).
  const double coefficient = amplitude_sqrt_mw * std::sqrt(static_cast<double>(frame.size()));
  for (std::size_t n = band.begin; n < band.end; ++n) out.bins[n] += coefficient;
  return out;
}

BinRange subband_range(const ScenarioConfig& config, std::size_t subband_index) {
  if (subband_index >= config.subband_count) {
    throw Error(ErrorKind::out_of_range, "subband index out of range");
  }
  const std::size_t width = config.n_bins / config.subband_count;
  return {subband_index * width, (subband_index + 1) * width};
}

BinRange signal_bins(const ScenarioConfig& config, const SubbandSignal& signal) {
  const BinRange sub = subband_range(config, signal.subband_index);
  const auto occupied = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::llround(signal.occupancy_fraction * static_cast<double>(sub.width()))),
      1, sub.width());
  const std::size_t begin = sub.begin + (sub.width() - occupied) / 2;
  return {begin, begin + occupied};
}

Scenario build_scenario(const ScenarioConfig& config) {
  config.validate();
  const std::size_t n = config.n_bins;
  const std::size_t m_total = config.n_frames;
  const std::size_t length = n * m_total;
  const double reference = config.reference_noise_power_mw;

  ComplexSeries noise;
  switch (config.noise.kind) {
    case NoiseKind::white_gaussian:
      noise = synth_white_noise(length, reference, config.noise.seed);
      break;
    case NoiseKind::surrogate_industrial:
      noise = synth_industrial_noise(length, config.noise.params, reference, config.noise.seed);
      break;
    case NoiseKind::trace_file: {
      noise = load_iq_trace(config.noise.path, config.sample_rate_hz);
      if (noise.samples.size() < length) {
        throw Error(ErrorKind::insufficient_samples,
                    "trace holds " + std::to_string(noise.samples.size()) + " samples, scenario needs " +
                        std::to_string(length));
      }
      noise.samples.resize(length);
      break;
    }
  }
  noise.sample_rate_hz = config.sample_rate_hz;
  noise = rescale_to_power(noise, reference);

  std::vector<double> noise_power(m_total, reference);
  for (const auto& step : config.noise_steps) {
    for (std::size_t m = step.frame_start; m < step.frame_end; ++m) noise_power[m] = step.power_mw;
  }
  for (std::size_t m = 0; m < m_total; ++m) {
    if (noise_power[m] == reference) continue;
    const double factor = std::sqrt(noise_power[m] / reference);
    for (std::size_t t = m * n; t < (m + 1) * n; ++t) noise.samples[t] *= factor;
  }

  const auto time_frames = frame_signal(noise, n, m_total);

  std::vector<BinRange> bands;
  std::vector<double> base_amplitude_mv;
  for (const auto& s : config.signals) {
    const BinRange band = signal_bins(config, s);
    bands.push_back(band);
    const double fraction = static_cast<double>(band.width()) / static_cast<double>(n);
    base_amplitude_mv.push_back(s.target_snr_db ? amplitude_for_snr(*s.target_snr_db, reference, fraction)
                                                 : s.amplitude_mv);
  }

  GroundTruth truth;
  truth.noise_power_mw = noise_power;
  truth.signal_power_mw.assign(m_total, 0.0);
  truth.true_snr_db.assign(m_total, -std::numeric_limits<double>::infinity());
  truth.signal_mask.assign(m_total, std::vector<bool>(n, false));

  std::vector<SpectralFrame> frames;
  frames.reserve(m_total);
  std::vector<double> bin_amplitude(n);
  for (std::size_t m = 0; m < m_total; ++m) {
    SpectralFrame frame = dft(time_frames[m], m);

    std::vector<double> amplitude_mv(config.signals.size(), 0.0);
    double scheduled_power = 0.0;
    for (std::size_t i = 0; i < config.signals.size(); ++i) {
      const auto& s = config.signals[i];
      if (m < s.frame_start || m >= frame_end_of(s, m_total)) continue;
      amplitude_mv[i] = base_amplitude_mv[i];
      const double a = mv_to_sqrt_mw(amplitude_mv[i]);
      scheduled_power += a * a * static_cast<double>(bands[i].width()) / static_cast<double>(n);
    }
    for (const auto& step : config.snr_schedule) {
      if (m < step.frame_start || m >= step.frame_end) continue;
      if (!(scheduled_power > 0.0)) {
        throw Error(ErrorKind::config,
                    "snr_schedule covers frame " + std::to_string(m) + " where no signal is active");
      }
      const double wanted = noise_power[m] * std::pow(10.0, step.snr_db / 10.0);
      const double gain = std::sqrt(wanted / scheduled_power);
      for (auto& a : amplitude_mv) a *= gain;
      scheduled_power = wanted;
    }

    std::fill(bin_amplitude.begin(), bin_amplitude.end(), 0.0);
    for (std::size_t i = 0; i < config.signals.size(); ++i) {
      if (amplitude_mv[i] == 0.0) continue;
      const double a = mv_to_sqrt_mw(amplitude_mv[i]);
      frame = inject_rect_signal(frame, bands[i], a);
      for (std::size_t b = bands[i].begin; b < bands[i].end; ++b) {
        bin_amplitude[b] += a;
        truth.signal_mask[m][b] = true;
      }
    }
    double signal_power = 0.0;
    for (double a : bin_amplitude) signal_power += a * a;
    signal_power /= static_cast<double>(n);
    truth.signal_power_mw[m] = signal_power;
    if (signal_power > 0.0) truth.true_snr_db[m] = 10.0 * std::log10(signal_power / noise_power[m]);
    frames.push_back(std::move(frame));
  }

  return Scenario{ResourceBlock(std::move(frames)), std::move(truth)};
}

ScenarioConfig reference_scenario(std::size_t n_bins, std::size_t n_frames, double snr_db,
                                  std::uint64_t seed) {
  ScenarioConfig config;
  config.scenario_id = "ism-reference";
  config.n_bins = n_bins;
  config.n_frames = n_frames;
  config.noise.kind = NoiseKind::white_gaussian;
  config.noise.seed = seed;
  config.reference_noise_power_mw = 1.0;
  config.subband_count = 4;
  SubbandSignal signal;
  signal.subband_index = 2;
  signal.occupancy_fraction = 1.0;
  signal.target_snr_db = snr_db;
  config.signals.push_back(signal);
  return config;
}

}  // namespace noisebench
