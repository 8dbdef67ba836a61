// SPDX-License-Identifier: Apache-2.0

#ifndef NLEVP_ERRORS_HPP
#define NLEVP_ERRORS_HPP

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace nlevp
{

enum class ErrorCode
{
  SingularMatrix,
  DimensionMismatch,
  NoConvergence,
  InvalidOrder,
  InvalidContour,
  EvaluationFailure,
  PoleHit,
  OrderTooSmall,
  SingularShift,
  InsufficientFinite,
  ShiftOnPole,
  SingularSchur,
  SingularG,
  ZeroVector,
  NotConverged,
  SingularLeading,
  OracleNoConvergence,
  ConfigError
};

std::string_view to_string(ErrorCode code);

// Single exception type for the library. The code identifies the failure; index carries
// the offending node/pivot/pole when one exists.
class Error : public std::runtime_error
{
public:
  Error(ErrorCode code, const std::string &message, std::optional<std::size_t> index = {});

  ErrorCode code() const noexcept { return code_; }
  std::optional<std::size_t> index() const noexcept { return index_; }

private:
  ErrorCode code_;
  std::optional<std::size_t> index_;
};

// True for failures that stem from the numerics (singular shifts, breakdowns) rather than
// from invalid input.
bool is_numerical_failure(ErrorCode code);

}  // namespace nlevp

#endif  // NLEVP_ERRORS_HPP
