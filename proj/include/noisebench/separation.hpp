#pragma once

// Noise/signal bin classification: ground truth, a one-dimensional Fisher
// split, and rank-order-filter (erosion) band detection.

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "noisebench/op_counter.hpp"
#include "noisebench/scenario.hpp"
#include "noisebench/spectral.hpp"

namespace noisebench {

enum class SeparationMethod { ideal, fisher, rof };

std::string_view to_string(SeparationMethod method) noexcept;

/// Closed bin interval [first, last] detected as one signal band.
struct BinRun {
  std::size_t first = 0;
  std::size_t last = 0;
  bool operator==(const BinRun&) const = default;
};

struct SeparationDiagnostics {
  // rof
  std::size_t band_width = 0;      ///< K
  std::vector<BinRun> runs;        ///< runs as marked in the mask
  std::vector<double> energies;    ///< E_k, index k-1 (k = 1..N)
  std::vector<double> drops;       ///< D_k in percent, index k-2 (k = 2..N)
  std::vector<double> smoothed;    ///< moving-average spectrum
  bool expansion_dropped = false;  ///< centered_expand fell back to bare runs
  // fisher
  std::size_t split = 0;           ///< size of the low (noise) group
  double criterion = 0.0;          ///< J at the chosen split
};

struct SeparationMask {
  std::vector<bool> is_signal;
  SeparationMethod method = SeparationMethod::ideal;
  SeparationDiagnostics diagnostics;

  std::size_t size() const noexcept { return is_signal.size(); }
  std::size_t noise_count() const noexcept;
  std::size_t signal_count() const noexcept { return size() - noise_count(); }
};

enum class RofAlignment {
  /// K-point average over [n-K+1, n], truncated at the left edge; positive
  /// difference runs are marked as they are.
  trailing,
  /// K-point centered average, runs widened by ceil(K/2) on both sides.
  centered_expand,
};

struct RofParams {
  double lambda1 = 5.0;   ///< percent energy-drop threshold
  double lambda2 = 0.05;  ///< minimum run width as a fraction of N
  RofAlignment alignment = RofAlignment::trailing;

  void validate() const;
};

/// Minimum over a k-bin centered window whose start is clamped to [0, N-k].
PowerSpectrum rof_erode(const PowerSpectrum& power, std::size_t k);

struct BandWidthSearch {
  std::size_t band_width = 2;
  std::vector<double> energies;  ///< E_1..E_N
  std::vector<double> drops;     ///< D_2..D_N
};

/// Full erosion sweep k = 2..N; O(N^2) with an incremental window update.
BandWidthSearch rof_band_width_search(std::span<const double> power, double lambda1,
                                      OpCounter* ops = nullptr);
std::size_t rof_find_band_width(const PowerSpectrum& power, double lambda1);

SeparationMask rof_separate(const PowerSpectrum& power, const RofParams& params = {},
                            OpCounter* ops = nullptr);

SeparationMask fisher_separate(const PowerSpectrum& power, OpCounter* ops = nullptr);

SeparationMask ideal_separate(const GroundTruth& truth, std::size_t frame_index);

}  // namespace noisebench
