#include "toeplitz.hpp"

#include <cmath>

namespace noisebench {

std::optional<std::vector<double>> solve_symmetric_toeplitz(std::span<const double> column,
                                                            std::span<const double> rhs, OpCounter* ops) {
  const std::size_t n = column.size();
  if (n == 0 || rhs.size() != n || !(column[0] > 0.0)) return std::nullopt;

  const double t0 = column[0];
  std::vector<double> r(n), b(n);
  for (std::size_t i = 0; i < n; ++i) {
    r[i] = column[i] / t0;
    b[i] = rhs[i] / t0;
  }
  count_mul(ops, 2 * n);

  std::vector<double> x(n, 0.0), y(n, 0.0), scratch(n);
  x[0] = b[0];
  if (n == 1) return x;
  y[0] = -r[1];
  double alpha = -r[1];
  double beta = 1.0;

  for (std::size_t k = 1; k < n; ++k) {
    beta *= (1.0 - alpha * alpha);
    if (!(beta > 0.0) || !std::isfinite(beta)) return std::nullopt;

    double acc = 0.0;
    for (std::size_t i = 0; i < k; ++i) acc += r[i + 1] * x[k - 1 - i];
    const double mu = (b[k] - acc) / beta;
    for (std::size_t i = 0; i < k; ++i) scratch[i] = x[i] + mu * y[k - 1 - i];
    for (std::size_t i = 0; i < k; ++i) x[i] = scratch[i];
    x[k] = mu;
    count_mul(ops, 2 * k + 3);
    count_add(ops, 2 * k + 2);

    if (k + 1 < n) {
      acc = 0.0;
      for (std::size_t i = 0; i < k; ++i) acc += r[i + 1] * y[k - 1 - i];
      alpha = (-r[k + 1] - acc) / beta;
      for (std::size_t i = 0; i < k; ++i) scratch[i] = y[i] + alpha * y[k - 1 - i];
      for (std::size_t i = 0; i < k; ++i) y[i] = scratch[i];
      y[k] = alpha;
      count_mul(ops, 2 * k + 1);
      count_add(ops, 2 * k + 1);
    }
  }
  for (double v : x) {
    if (!std::isfinite(v)) return std::nullopt;
  }
  return x;
}

}  // namespace noisebench
