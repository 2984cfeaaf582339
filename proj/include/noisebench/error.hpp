#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace noisebench {

enum class ErrorKind {
  invalid_argument,
  insufficient_samples,
  non_finite,
  malformed_length,
  io,
  config,
  zero_power,
  out_of_range,
  degenerate_spectrum,
  empty_noise_group,
  numerical_failure,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Every failure raised by the library carries a machine-readable kind so
/// front ends can map it to an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace noisebench
