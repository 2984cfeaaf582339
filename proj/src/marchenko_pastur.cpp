#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "noisebench/error.hpp"
#include "noisebench/estimators.hpp"

namespace noisebench {

namespace {

// With x = m + h sin(theta) the density times dx becomes a smooth function
// of theta on [-pi/2, pi/2], free of the square-root edge singularities.
class MpIntegrand {
 public:
  MpIntegrand(double c, double sigma_sq) {
    if (!(c > 0.0 && c < 1.0)) throw Error(ErrorKind::invalid_argument, "MP ratio must lie in (0, 1)");
    if (!(sigma_sq > 0.0) || !std::isfinite(sigma_sq)) {
      throw Error(ErrorKind::invalid_argument, "MP scale must be positive");
    }
    lower_ = sigma_sq * (1.0 - std::sqrt(c)) * (1.0 - std::sqrt(c));
    upper_ = sigma_sq * (1.0 + std::sqrt(c)) * (1.0 + std::sqrt(c));
    mid_ = 0.5 * (lower_ + upper_);
    half_ = 0.5 * (upper_ - lower_);
    scale_ = 2.0 * std::numbers::pi * c * sigma_sq;
  }

  double lower() const { return lower_; }
  double upper() const { return upper_; }

  double theta(double x) const { return std::asin(std::clamp((x - mid_) / half_, -1.0, 1.0)); }

  double operator()(double theta) const {
    ++evaluations;
    const double cs = std::cos(theta);
    return half_ * half_ * cs * cs / (scale_ * (mid_ + half_ * std::sin(theta)));
  }

  mutable std::uint64_t evaluations = 0;

 private:
  double lower_, upper_, mid_, half_, scale_;
};

double simpson_step(const MpIntegrand& f, double a, double b, double fa, double fm, double fb,
                    double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double integrate(const MpIntegrand& f, double a, double b, double tol = 1e-12) {
  if (!(b > a)) return 0.0;
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_step(f, a, b, fa, fm, fb, whole, tol, 40);
}

}  // namespace

double mp_cdf(double x, double c, double sigma_sq) {
  const MpIntegrand f(c, sigma_sq);
  if (x <= f.lower()) return 0.0;
  if (x >= f.upper()) return 1.0;
  const double value = integrate(f, -0.5 * std::numbers::pi, f.theta(x));
  return std::clamp(value, 0.0, 1.0);
}

std::vector<double> mp_cdf_sorted(std::span<const double> ascending, double c, double sigma_sq,
                                  OpCounter* ops) {
  // Fixed-cost rule so the op count depends on the input length only: every
  // point and every panel edge is a breakpoint, each gap gets 8 Gauss nodes.
  static constexpr std::array<double, 4> node{0.1834346424956498, 0.5255324099163290, 0.7966664774136267,
                                              0.9602898564975363};
  static constexpr std::array<double, 4> weight{0.3626837833783620, 0.3137066458778873, 0.2223810344533745,
                                                0.1012285362903763};
  constexpr std::size_t panels = 32;
  const MpIntegrand f(c, sigma_sq);
  const auto gauss = [&](double a, double b) {
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double sum = 0.0;
    for (std::size_t j = 0; j < node.size(); ++j) sum += weight[j] * (f(mid - half * node[j]) + f(mid + half * node[j]));
    return half * sum;
  };

  std::vector<double> out(ascending.size());
  const double start = -0.5 * std::numbers::pi;
  const double panel = std::numbers::pi / static_cast<double>(panels);
  std::size_t next_edge = 1;
  double theta_prev = start;
  double acc = 0.0;
  const auto advance = [&](double theta) {
    while (next_edge <= panels && start + panel * static_cast<double>(next_edge) <= theta) {
      const double edge = start + panel * static_cast<double>(next_edge++);
      acc += gauss(theta_prev, edge);
      theta_prev = edge;
    }
    acc += gauss(theta_prev, theta);
    theta_prev = theta;
  };
  for (std::size_t i = 0; i < ascending.size(); ++i) {
    const double x = ascending[i];
    if (i > 0 && x < ascending[i - 1]) {
      throw Error(ErrorKind::invalid_argument, "mp_cdf_sorted needs ascending input");
    }
    advance(f.theta(x));
    if (x <= f.lower()) {
      out[i] = 0.0;
    } else if (x >= f.upper()) {
      out[i] = 1.0;
    } else {
      out[i] = std::clamp(acc, 0.0, 1.0);
    }
  }
  advance(0.5 * std::numbers::pi);
  count_transcendental(ops, 2 * f.evaluations + ascending.size());
  count_mul(ops, 5 * f.evaluations);
  count_add(ops, 6 * f.evaluations);
  count_cmp(ops, 2 * ascending.size());
  return out;
}

}  // namespace noisebench
