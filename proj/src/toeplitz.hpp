#pragma once

#include <optional>
#include <span>
#include <vector>

#include "noisebench/op_counter.hpp"

namespace noisebench {

/// Solves T x = b for symmetric Toeplitz T with first column `column` by
/// Levinson recursion. Returns nullopt when a leading minor is not positive
/// definite or the result is not finite.
std::optional<std::vector<double>> solve_symmetric_toeplitz(std::span<const double> column,
                                                            std::span<const double> rhs,
                                                            OpCounter* ops = nullptr);

}  // namespace noisebench
