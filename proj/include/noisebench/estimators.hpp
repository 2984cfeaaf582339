#pragma once

// Noise-power estimators and the SNR mapping.

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "noisebench/op_counter.hpp"
#include "noisebench/separation.hpp"
#include "noisebench/spectral.hpp"

namespace noisebench {

enum class EstimatorKind { ml, mvu, aic, cbe, mmse };

std::string_view to_string(EstimatorKind kind) noexcept;

struct MpFitRange {
  double sigma_min_sq = 0.0;
  double sigma_max_sq = 0.0;
  std::size_t L = 2;

  /// L linearly spaced candidates from sigma_min_sq to sigma_max_sq.
  std::vector<double> grid() const;
};

struct EstimateDiagnostics {
  std::size_t noise_bins = 0;          ///< ML / MVU
  std::size_t aic_n_min = 0;           ///< AIC
  std::size_t cbe_signal_count = 0;    ///< S
  std::size_t cbe_best = 0;            ///< index into cbe_distances
  MpFitRange cbe_range;
  std::vector<double> cbe_distances;   ///< D_l
  double mmse_weight_sum = 0.0;
  bool mmse_ridge = false;
};

struct NoisePowerEstimate {
  double value_mw = 0.0;
  std::size_t frame_index = 0;
  EstimatorKind method = EstimatorKind::ml;
  EstimateDiagnostics diagnostics;
};

struct EigenSpectrum {
  std::vector<double> eigenvalues;  ///< descending, >= 0
  std::size_t rows = 0;             ///< M
  std::size_t columns = 0;          ///< real columns of the data matrix (2N)
};

/// Mean power over the noise-classified bins of one frame.
NoisePowerEstimate ml_estimate(const PowerSpectrum& power, const SeparationMask& mask,
                               OpCounter* ops = nullptr);

/// Mean power over every noise-classified bin of every frame.
NoisePowerEstimate mvu_estimate(std::span<const PowerSpectrum> powers,
                                std::span<const SeparationMask> masks, OpCounter* ops = nullptr);

/// Model-order selection over the descending averaged periodogram; the
/// estimate is the mean of the bins past the selected order. `frames` is the
/// number of frames averaged into the periodogram.
NoisePowerEstimate aic_estimate(const PowerSpectrum& averaged, std::size_t frames,
                                OpCounter* ops = nullptr);

/// Eigenvalues of C = A A^T / (2N), where row m of A holds
/// [sqrt2 Re z_m | sqrt2 Im z_m] and z_m = X_m / sqrt(N).
EigenSpectrum covariance_eigenvalues(const ResourceBlock& block, OpCounter* ops = nullptr);

/// Marchenko-Pastur distribution function for ratio c in (0, 1) and scale sigma_sq.
double mp_cdf(double x, double c, double sigma_sq);

/// mp_cdf at every point of an ascending sequence, integrating segment by segment.
std::vector<double> mp_cdf_sorted(std::span<const double> ascending, double c, double sigma_sq,
                                  OpCounter* ops = nullptr);

NoisePowerEstimate cbe_estimate(const ResourceBlock& block, double occupied_fraction,
                                std::size_t L = 100, OpCounter* ops = nullptr);

/// Same fit starting from precomputed eigenvalues.
NoisePowerEstimate cbe_from_eigenvalues(const EigenSpectrum& spectrum, double occupied_fraction,
                                        std::size_t L = 100, OpCounter* ops = nullptr);

struct MmseSystem {
  std::vector<double> lags;     ///< r(0..N-1)
  std::vector<double> weights;  ///< solution of (C + r(0) I) w = r
  bool ridge = false;
};

/// Blind weight computation: per-bin time mean removed, variances over the
/// first M-1 frames.
MmseSystem mmse_weights(const ResourceBlock& block, OpCounter* ops = nullptr);

NoisePowerEstimate mmse_estimate(const ResourceBlock& block, OpCounter* ops = nullptr);

struct Snr {
  double linear = 0.0;
  double db = 0.0;  ///< -inf when linear <= 0
};

/// (sigma_x^2 - sigma_w^2) / sigma_w^2.
Snr snr_from_powers(double sigma_x_sq, double sigma_w_sq);

}  // namespace noisebench
