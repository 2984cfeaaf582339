#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "noisebench/error.hpp"
#include "noisebench/estimators.hpp"
#include "noisebench/scenario.hpp"
#include "noisebench/separation.hpp"
#include "test_support.hpp"

using namespace noisebench;
using testing_support::oracle_aic_n_min;
using testing_support::random_exponential;

namespace {

PowerSpectrum spectrum(std::vector<double> v, std::size_t frame = 0) {
  PowerSpectrum p;
  p.power = std::move(v);
  p.frame_index = frame;
  return p;
}

SeparationMask mask_of(std::vector<bool> signal) {
  SeparationMask m;
  m.is_signal = std::move(signal);
  return m;
}

SeparationMask all_noise(std::size_t n) { return mask_of(std::vector<bool>(n, false)); }

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::numerical_failure;
}

ResourceBlock noise_block(std::size_t n, std::size_t m, std::uint64_t seed, double power = 1.0) {
  ScenarioConfig c;
  c.n_bins = n;
  c.n_frames = m;
  c.noise.seed = seed;
  c.reference_noise_power_mw = power;
  return build_scenario(c).block;
}

ResourceBlock scaled(const ResourceBlock& block, double gamma) {
  std::vector<SpectralFrame> frames(block.frames().begin(), block.frames().end());
  const double g = std::sqrt(gamma);
  for (auto& f : frames) {
    for (auto& b : f.bins) b *= g;
  }
  return ResourceBlock(std::move(frames));
}

std::vector<PowerSpectrum> powers_of(const ResourceBlock& block) {
  std::vector<PowerSpectrum> out;
  for (const auto& f : block.frames()) out.push_back(power_spectrum(f));
  return out;
}

// AIC(n) evaluated term by term for every n; returns the first argmin.
// Marchenko-Pastur distribution function by a plain trapezoid rule on a
// uniform grid over [a, x].
double oracle_mp_cdf(double x, double c, double sigma_sq, std::size_t steps = 2'000'000) {
  const double a = sigma_sq * (1 - std::sqrt(c)) * (1 - std::sqrt(c));
  const double b = sigma_sq * (1 + std::sqrt(c)) * (1 + std::sqrt(c));
  if (x <= a) return 0.0;
  x = std::min(x, b);
  auto density = [&](double t) {
    const double v = (b - t) * (t - a);
    return v > 0 ? std::sqrt(v) / (2 * std::numbers::pi * c * sigma_sq * t) : 0.0;
  };
  const double h = (x - a) / static_cast<double>(steps);
  double acc = 0.5 * (density(a) + density(x));
  for (std::size_t i = 1; i < steps; ++i) acc += density(a + h * static_cast<double>(i));
  return acc * h;
}

}  // namespace

TEST(MlEstimate, AllNoiseMean) {
  EXPECT_EQ(ml_estimate(spectrum({1, 1, 1, 1}), all_noise(4)).value_mw, 1.0);
}

TEST(MlEstimate, NoiseBinsOnly) {
  const auto e = ml_estimate(spectrum({2, 4, 100, 100}), mask_of({false, false, true, true}));
  EXPECT_DOUBLE_EQ(e.value_mw, 3.0);
  EXPECT_EQ(e.diagnostics.noise_bins, 2u);
}

TEST(MlEstimate, EmptyNoiseGroup) {
  EXPECT_EQ(kind_of([] { ml_estimate(spectrum({1, 2}), mask_of({true, true})); }), ErrorKind::empty_noise_group);
}

TEST(MlEstimate, ZeroPowerIsError) {
  EXPECT_EQ(kind_of([] { ml_estimate(spectrum({0, 0, 5}), mask_of({false, false, true})); }),
            ErrorKind::zero_power);
}

TEST(MlEstimate, AllNoiseEqualsFrameMeanPower) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto f = dft(testing_support::random_complex(64, seed));
    const auto p = power_spectrum(f);
    EXPECT_NEAR(ml_estimate(p, all_noise(64)).value_mw, p.mean(), 1e-14 * p.mean());
  }
}

TEST(MlEstimate, WhiteNoiseWithinThreeSigma) {
  const auto block = noise_block(512, 1000, 3);
  const double band = 3.0 / std::sqrt(512.0);
  int inside = 0;
  for (const auto& f : block.frames()) {
    inside += std::abs(ml_estimate(power_spectrum(f), all_noise(512)).value_mw - 1.0) <= band;
  }
  EXPECT_GE(inside, 990);
}

TEST(MvuEstimate, SingleFrameEqualsMl) {
  const auto p = spectrum(random_exponential(32, 1));
  auto mask = all_noise(32);
  mask.is_signal[3] = mask.is_signal[9] = true;
  const std::vector<PowerSpectrum> ps{p};
  const std::vector<SeparationMask> ms{mask};
  EXPECT_DOUBLE_EQ(mvu_estimate(ps, ms).value_mw, ml_estimate(p, mask).value_mw);
}

TEST(MvuEstimate, BalancedMean) {
  const std::vector<PowerSpectrum> ps{spectrum({1, 1, 9}), spectrum({3, 3, 9})};
  const std::vector<SeparationMask> ms{mask_of({false, false, true}), mask_of({false, false, true})};
  EXPECT_DOUBLE_EQ(mvu_estimate(ps, ms).value_mw, 2.0);
}

TEST(MvuEstimate, CountWeightedMeanOfMl) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    std::vector<PowerSpectrum> ps;
    std::vector<SeparationMask> ms;
    double weighted = 0.0;
    std::size_t total = 0;
    for (std::size_t m = 0; m < 5; ++m) {
      ps.push_back(spectrum(random_exponential(40, seed * 10 + m)));
      auto mask = all_noise(40);
      for (std::size_t i = 0; i < (seed + m) % 30; ++i) mask.is_signal[i] = true;
      const auto ml = ml_estimate(ps.back(), mask);
      weighted += ml.value_mw * static_cast<double>(ml.diagnostics.noise_bins);
      total += ml.diagnostics.noise_bins;
      ms.push_back(mask);
    }
    EXPECT_NEAR(mvu_estimate(ps, ms).value_mw, weighted / static_cast<double>(total), 1e-12);
  }
}

TEST(MvuEstimate, TenTimesSteadierThanMl) {
  std::vector<double> ml, mvu;
  for (std::uint64_t seed = 1; seed <= 300; ++seed) {
    // raw noise: a built scenario pins each block's mean power to exactly 1
    const auto frames = frame_signal(synth_white_noise(512 * 100, 1.0, 1000 + seed), 512, 100);
    std::vector<PowerSpectrum> ps;
    for (std::size_t m = 0; m < 100; ++m) ps.push_back(power_spectrum(dft(frames[m], m)));
    const std::vector<SeparationMask> ms(ps.size(), all_noise(512));
    mvu.push_back(mvu_estimate(ps, ms).value_mw);
    for (std::size_t m = 0; m < ps.size(); ++m) ml.push_back(ml_estimate(ps[m], ms[m]).value_mw);
  }
  const double sd_mvu = testing_support::sample_std(mvu);
  const double sd_ml = testing_support::sample_std(ml);
  EXPECT_NEAR(sd_mvu, 1.0 / std::sqrt(512.0 * 100.0), 0.25 / std::sqrt(512.0 * 100.0));
  EXPECT_GT(sd_ml / sd_mvu, 8.0);
  EXPECT_LT(sd_ml / sd_mvu, 12.5);
}

TEST(MvuEstimate, EmptyNoiseGroup) {
  const std::vector<PowerSpectrum> ps{spectrum({1, 2})};
  const std::vector<SeparationMask> ms{mask_of({true, true})};
  EXPECT_EQ(kind_of([&] { mvu_estimate(ps, ms); }), ErrorKind::empty_noise_group);
}

TEST(AicEstimate, EqualBinsSelectZero) {
  const auto e = aic_estimate(spectrum(std::vector<double>(32, 2.5)), 10);
  EXPECT_EQ(e.diagnostics.aic_n_min, 0u);
  EXPECT_NEAR(e.value_mw, 2.5, 1e-12);
}

TEST(AicEstimate, OneLoudBin) {
  std::vector<double> v(16, 1.0);
  v[0] = 100.0;
  const auto e = aic_estimate(spectrum(v), 10);
  EXPECT_EQ(e.diagnostics.aic_n_min, 1u);
  EXPECT_NEAR(e.value_mw, 1.0, 1e-12);
}

TEST(AicEstimate, MatchesDirectEvaluation) {
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    const std::size_t n = 8 + seed % 120;
    const std::size_t frames = 1 + seed % 150;
    auto v = random_exponential(n, seed);
    for (std::size_t i = 0; i < n / 5; ++i) v[i] += static_cast<double>(seed % 7) * 3.0;
    const auto e = aic_estimate(spectrum(v), frames);
    EXPECT_EQ(e.diagnostics.aic_n_min, oracle_aic_n_min(v, frames)) << "seed " << seed;
  }
}

TEST(AicEstimate, ScaleInvariantOrder) {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    auto v = random_exponential(64, seed);
    for (std::size_t i = 0; i < 10; ++i) v[i] *= 30.0;
    auto w = v;
    const double gamma = 1e-3 * static_cast<double>(seed * seed);
    for (auto& x : w) x *= gamma;
    const auto a = aic_estimate(spectrum(v), 50);
    const auto b = aic_estimate(spectrum(w), 50);
    EXPECT_EQ(a.diagnostics.aic_n_min, b.diagnostics.aic_n_min);
    EXPECT_NEAR(b.value_mw, gamma * a.value_mw, 1e-12 * b.value_mw);
  }
}

TEST(AicEstimate, ZeroBinsAreFloored) {
  std::vector<double> v(16, 1.0);
  v[5] = 0.0;
  const auto e = aic_estimate(spectrum(v), 4);
  EXPECT_TRUE(std::isfinite(e.value_mw));
  EXPECT_GT(e.value_mw, 0.0);
}

TEST(AicEstimate, ReferenceBlockOrderNearOccupiedCount) {
  // n_min should land within 10% of the 128 occupied bins.
  int close = 0;
  const int seeds = 10;
  std::size_t last = 0;
  for (int s = 1; s <= seeds; ++s) {
    const auto sc = build_scenario(reference_scenario(512, 100, 0.0, static_cast<std::uint64_t>(s)));
    const auto avg = averaged_periodogram(sc.block);
    last = aic_estimate(avg, 100).diagnostics.aic_n_min;
    close += last >= 115 && last <= 141;
  }
  RecordProperty("last_n_min", static_cast<int>(last));
  EXPECT_EQ(close, seeds) << "last n_min " << last;
}

TEST(Covariance, SingleFrameRankOne) {
  const auto f = dft(testing_support::random_complex(16, 2));
  const auto eig = covariance_eigenvalues(ResourceBlock({f}));
  ASSERT_EQ(eig.eigenvalues.size(), 1u);
  EXPECT_NEAR(eig.eigenvalues[0], power_spectrum(f).mean(), 1e-12);
  EXPECT_EQ(eig.columns, 32u);
}

TEST(Covariance, RepeatedFrameIsRankOne) {
  const auto f = dft(testing_support::random_complex(16, 2));
  std::vector<SpectralFrame> frames;
  for (std::size_t m = 0; m < 4; ++m) {
    auto g = f;
    g.frame_index = m;
    frames.push_back(g);
  }
  const auto eig = covariance_eigenvalues(ResourceBlock(frames));
  EXPECT_NEAR(eig.eigenvalues[0], 4.0 * power_spectrum(f).mean(), 1e-10);
  for (std::size_t i = 1; i < 4; ++i) EXPECT_NEAR(eig.eigenvalues[i], 0.0, 1e-10);
}

TEST(Covariance, OrthogonalEqualRowsGiveEqualEigenvalues) {
  const std::size_t n = 8, m = 5;
  std::vector<SpectralFrame> frames;
  for (std::size_t r = 0; r < m; ++r) {
    SpectralFrame f;
    f.frame_index = r;
    f.bins.assign(n, Complex{});
    f.bins[r] = r % 2 ? Complex(0, 3) : Complex(3, 0);
    frames.push_back(f);
  }
  const auto eig = covariance_eigenvalues(ResourceBlock(frames));
  for (double v : eig.eigenvalues) EXPECT_NEAR(v, eig.eigenvalues[0], 1e-12);
  EXPECT_GT(eig.eigenvalues[0], 0.0);
}

TEST(Covariance, DescendingAndTracePreserving) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto block = noise_block(32 + seed * 8, 3 + seed, seed);
    const auto eig = covariance_eigenvalues(block);
    EXPECT_TRUE(std::is_sorted(eig.eigenvalues.rbegin(), eig.eigenvalues.rend()));
    double trace = 0.0, frob = 0.0;
    for (double v : eig.eigenvalues) trace += v;
    for (const auto& f : block.frames()) frob += power_spectrum(f).mean();
    EXPECT_NEAR(trace, frob, 1e-9 * frob);
  }
}

TEST(Covariance, WhiteNoiseFillsMarchenkoPasturSupport) {
  const std::size_t n = 512, m = 64;
  const double c = static_cast<double>(m) / static_cast<double>(2 * n);
  const double lo = (1 - std::sqrt(c)) * (1 - std::sqrt(c));
  const double hi = (1 + std::sqrt(c)) * (1 + std::sqrt(c));
  double top = 0.0, bottom = 0.0;
  const int seeds = 20;
  for (int s = 1; s <= seeds; ++s) {
    const auto eig = covariance_eigenvalues(noise_block(n, m, static_cast<std::uint64_t>(s)));
    top += eig.eigenvalues.front();
    bottom += eig.eigenvalues.back();
  }
  EXPECT_NEAR(top / seeds / hi, 1.0, 0.05);
  EXPECT_NEAR(bottom / seeds / lo, 1.0, 0.05);
}

TEST(MpCdf, SupportEdges) {
  for (double c : {0.05, 0.25, 0.7}) {
    for (double s2 : {0.3, 1.0, 4.0}) {
      const double a = s2 * (1 - std::sqrt(c)) * (1 - std::sqrt(c));
      const double b = s2 * (1 + std::sqrt(c)) * (1 + std::sqrt(c));
      EXPECT_EQ(mp_cdf(a, c, s2), 0.0);
      EXPECT_EQ(mp_cdf(b, c, s2), 1.0);
      EXPECT_EQ(mp_cdf(0.5 * a, c, s2), 0.0);
      EXPECT_EQ(mp_cdf(2.0 * b, c, s2), 1.0);
      // Normalization: the integral up to just below b.
      EXPECT_NEAR(mp_cdf(b * (1 - 1e-15), c, s2), 1.0, 1e-6);
    }
  }
}

TEST(MpCdf, MatchesTrapezoidOracle) {
  EXPECT_NEAR(mp_cdf(1.0, 0.25, 1.0), oracle_mp_cdf(1.0, 0.25, 1.0), 1e-5);
  EXPECT_NEAR(mp_cdf(1.6, 0.1, 2.0), oracle_mp_cdf(1.6, 0.1, 2.0), 1e-5);
  EXPECT_NEAR(mp_cdf(1.9, 0.5, 1.3), oracle_mp_cdf(1.9, 0.5, 1.3), 1e-5);
}

TEST(MpCdf, MonotoneAndSortedVariantAgrees) {
  std::vector<double> xs;
  for (int i = 0; i <= 200; ++i) xs.push_back(0.1 + 0.012 * i);
  const auto sorted = mp_cdf_sorted(xs, 0.3, 1.2);
  double prev = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double v = mp_cdf(xs[i], 0.3, 1.2);
    EXPECT_GE(v, prev);
    EXPECT_NEAR(sorted[i], v, 1e-9);
    prev = v;
  }
}

TEST(MpCdf, SortedVariantAcrossRatios) {
  for (double c : {0.02, 0.0625, 0.5, 0.8}) {
    std::vector<double> xs;
    for (int i = 0; i <= 60; ++i) xs.push_back(0.05 * i);
    const auto sorted = mp_cdf_sorted(xs, c, 1.0);
    for (std::size_t i = 0; i < xs.size(); ++i) EXPECT_NEAR(sorted[i], mp_cdf(xs[i], c, 1.0), 1e-7) << c << " " << xs[i];
  }
}

TEST(MpCdf, SortedCostDependsOnLengthOnly) {
  OpCounter a, b;
  mp_cdf_sorted(std::vector<double>{0.9, 1.0, 1.1}, 0.3, 1.0, &a);
  mp_cdf_sorted(std::vector<double>{5.0, 6.0, 7.0}, 0.1, 2.0, &b);
  EXPECT_EQ(a.total().total(), b.total().total());
}

TEST(CbeEstimate, PureNoiseWithinFivePercent) {
  double sum = 0.0;
  const int seeds = 50;
  for (int s = 1; s <= seeds; ++s) {
    sum += cbe_estimate(noise_block(512, 64, static_cast<std::uint64_t>(s)), 0.0, 100).value_mw;
  }
  EXPECT_NEAR(sum / seeds, 1.0, 0.05);
}

TEST(CbeEstimate, Homogeneous) {
  const auto block = noise_block(128, 16, 7);
  const auto a = cbe_estimate(block, 0.0, 50);
  for (double gamma : {0.01, 3.0, 250.0}) {
    const auto b = cbe_estimate(scaled(block, gamma), 0.0, 50);
    EXPECT_NEAR(b.value_mw, gamma * a.value_mw, 1e-9 * gamma * a.value_mw);
    EXPECT_EQ(b.diagnostics.cbe_best, a.diagnostics.cbe_best);
  }
}

TEST(CbeEstimate, DiagnosticsCarryTheCurve) {
  const auto e = cbe_estimate(noise_block(128, 16, 7), 0.25, 40);
  EXPECT_EQ(e.diagnostics.cbe_signal_count, 4u);
  ASSERT_EQ(e.diagnostics.cbe_distances.size(), 40u);
  const auto best = std::min_element(e.diagnostics.cbe_distances.begin(), e.diagnostics.cbe_distances.end());
  EXPECT_EQ(static_cast<std::size_t>(best - e.diagnostics.cbe_distances.begin()), e.diagnostics.cbe_best);
  EXPECT_LE(e.diagnostics.cbe_range.sigma_min_sq, e.value_mw);
  EXPECT_GE(e.diagnostics.cbe_range.sigma_max_sq, e.value_mw);
}

TEST(CbeEstimate, NoNoiseEigenvaluesLeft) {
  const auto block = noise_block(64, 4, 7);
  EXPECT_EQ(kind_of([&] { cbe_estimate(block, 0.95, 10); }), ErrorKind::empty_noise_group);
  EXPECT_THROW(cbe_estimate(block, 1.0, 10), Error);
  EXPECT_THROW(cbe_estimate(block, 0.0, 1), Error);
}

TEST(CbeEstimate, ReferenceScenarioMildOverestimate) {
  // Expected: SNR slightly overestimated (noise slightly under), sub-dB RMSE.
  std::vector<double> errors;
  for (int s = 1; s <= 10; ++s) {
    const auto sc = build_scenario(reference_scenario(512, 100, 0.0, static_cast<std::uint64_t>(s)));
    const double est = cbe_estimate(sc.block, 0.25, 100).value_mw;
    const double sigma_x = power_spectrum(sc.block.frame(99)).mean();
    errors.push_back(snr_from_powers(sigma_x, est).db - sc.truth.true_snr_db[99]);
  }
  const double bias = testing_support::mean(errors);
  double sq = 0.0;
  for (double e : errors) sq += e * e;
  const double rmse = std::sqrt(sq / static_cast<double>(errors.size()));
  RecordProperty("bias_db", std::to_string(bias));
  EXPECT_GT(bias, 0.0);
  EXPECT_LT(rmse, 1.0);
}

TEST(MmseEstimate, WhiteNoiseWithinTenPercent) {
  double sum = 0.0;
  const int seeds = 50;
  for (int s = 1; s <= seeds; ++s) {
    sum += mmse_estimate(noise_block(512, 100, static_cast<std::uint64_t>(s))).value_mw;
  }
  EXPECT_NEAR(sum / seeds, 1.0, 0.1);
}

TEST(MmseEstimate, IdenticalFramesAreZeroPower) {
  const auto f = dft(testing_support::random_complex(32, 1));
  std::vector<SpectralFrame> frames;
  for (std::size_t m = 0; m < 5; ++m) {
    auto g = f;
    g.frame_index = m;
    frames.push_back(g);
  }
  EXPECT_EQ(kind_of([&] { mmse_estimate(ResourceBlock(frames)); }), ErrorKind::zero_power);
}

TEST(MmseEstimate, NeedsThreeFrames) {
  EXPECT_THROW(mmse_estimate(noise_block(16, 2, 1)), Error);
}

TEST(MmseEstimate, WeightSystemResidual) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto sc = build_scenario(reference_scenario(128, 20, 0.0, seed));
    const auto sys = mmse_weights(sc.block);
    const std::size_t n = sys.lags.size();
    double res = 0.0, norm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double row = sys.lags[0] * sys.weights[i];
      for (std::size_t j = 0; j < n; ++j) {
        row += sys.lags[i > j ? i - j : j - i] * sys.weights[j];
      }
      res += (row - sys.lags[i]) * (row - sys.lags[i]);
      norm += sys.lags[i] * sys.lags[i];
    }
    EXPECT_LT(std::sqrt(res / norm), 1e-8);
  }
}

TEST(MmseEstimate, ScaleEquivariant) {
  const auto block = noise_block(64, 10, 4);
  const double a = mmse_estimate(block).value_mw;
  const double b = mmse_estimate(scaled(block, 7.5)).value_mw;
  EXPECT_NEAR(b, 7.5 * a, 1e-10 * b);
}

TEST(MmseEstimate, UnderestimatesRelativeToMvuOnReferenceScenario) {
  double mmse = 0.0, mvu = 0.0;
  const int seeds = 30;
  for (int s = 1; s <= seeds; ++s) {
    const auto sc = build_scenario(reference_scenario(512, 100, 0.0, static_cast<std::uint64_t>(s)));
    mmse += mmse_estimate(sc.block).value_mw;
    const auto ps = powers_of(sc.block);
    std::vector<SeparationMask> ms;
    for (std::size_t m = 0; m < ps.size(); ++m) ms.push_back(ideal_separate(sc.truth, m));
    mvu += mvu_estimate(ps, ms).value_mw;
  }
  RecordProperty("mmse_mean", std::to_string(mmse / seeds));
  RecordProperty("mvu_mean", std::to_string(mvu / seeds));
  EXPECT_LT(mmse, mvu);
}

TEST(Estimators, ScaleEquivariantMlMvuAic) {
  const auto block = noise_block(64, 6, 9);
  const auto big = scaled(block, 12.0);
  const auto ps = powers_of(block), qs = powers_of(big);
  const std::vector<SeparationMask> ms(ps.size(), all_noise(64));
  EXPECT_NEAR(ml_estimate(qs[0], ms[0]).value_mw, 12.0 * ml_estimate(ps[0], ms[0]).value_mw, 1e-12);
  EXPECT_NEAR(mvu_estimate(qs, ms).value_mw, 12.0 * mvu_estimate(ps, ms).value_mw, 1e-12);
  EXPECT_NEAR(aic_estimate(averaged_periodogram(big), 6).value_mw,
              12.0 * aic_estimate(averaged_periodogram(block), 6).value_mw, 1e-11);
}

TEST(SnrFromPowers, Examples) {
  const auto a = snr_from_powers(2.0, 1.0);
  EXPECT_DOUBLE_EQ(a.linear, 1.0);
  EXPECT_DOUBLE_EQ(a.db, 0.0);
  const auto b = snr_from_powers(1.0, 1.0);
  EXPECT_EQ(b.linear, 0.0);
  EXPECT_TRUE(std::isinf(b.db) && b.db < 0);
  EXPECT_NEAR(snr_from_powers(1.501, 1.0).db, -3.0, 0.01);
  EXPECT_TRUE(std::isinf(snr_from_powers(0.5, 1.0).db));
}

TEST(SnrFromPowers, RejectsNonPositiveNoise) {
  EXPECT_THROW(snr_from_powers(1.0, 0.0), Error);
  EXPECT_THROW(snr_from_powers(1.0, -1.0), Error);
}

TEST(SnrFromPowers, ScaleInvariant) {
  for (int i = 1; i <= 20; ++i) {
    const double x = 1.0 + 0.37 * i, w = 0.5 + 0.01 * i;
    EXPECT_NEAR(snr_from_powers(x, w).db, snr_from_powers(x * 1e3, w * 1e3).db, 1e-9);
  }
}
