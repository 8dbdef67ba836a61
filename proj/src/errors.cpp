// SPDX-License-Identifier: Apache-2.0

#include "nlevp/errors.hpp"

namespace nlevp
{

std::string_view to_string(ErrorCode code)
{
  switch (code)
  {
    case ErrorCode::SingularMatrix:
      return "SingularMatrix";
    case ErrorCode::DimensionMismatch:
      return "DimensionMismatch";
    case ErrorCode::NoConvergence:
      return "NoConvergence";
    case ErrorCode::InvalidOrder:
      return "InvalidOrder";
    case ErrorCode::InvalidContour:
      return "InvalidContour";
    case ErrorCode::EvaluationFailure:
      return "EvaluationFailure";
    case ErrorCode::PoleHit:
      return "PoleHit";
    case ErrorCode::OrderTooSmall:
      return "OrderTooSmall";
    case ErrorCode::SingularShift:
      return "SingularShift";
    case ErrorCode::InsufficientFinite:
      return "InsufficientFinite";
    case ErrorCode::ShiftOnPole:
      return "ShiftOnPole";
    case ErrorCode::SingularSchur:
      return "SingularSchur";
    case ErrorCode::SingularG:
      return "SingularG";
    case ErrorCode::ZeroVector:
      return "ZeroVector";
    case ErrorCode::NotConverged:
      return "NotConverged";
    case ErrorCode::SingularLeading:
      return "SingularLeading";
    case ErrorCode::OracleNoConvergence:
      return "OracleNoConvergence";
    case ErrorCode::ConfigError:
      return "ConfigError";
  }
  return "Unknown";
}

namespace
{

std::string format_message(ErrorCode code, const std::string &message,
                           std::optional<std::size_t> index)
{
  std::string out(to_string(code));
  if (index)
  {
    out += "(" + std::to_string(*index) + ")";
  }
  if (!message.empty())
  {
    out += ": " + message;
  }
  return out;
}

}  // namespace

Error::Error(ErrorCode code, const std::string &message, std::optional<std::size_t> index)
  : std::runtime_error(format_message(code, message, index)), code_(code), index_(index)
{
}

bool is_numerical_failure(ErrorCode code)
{
  switch (code)
  {
    case ErrorCode::SingularMatrix:
    case ErrorCode::NoConvergence:
    case ErrorCode::SingularShift:
    case ErrorCode::InsufficientFinite:
    case ErrorCode::ShiftOnPole:
    case ErrorCode::SingularSchur:
    case ErrorCode::SingularG:
    case ErrorCode::PoleHit:
    case ErrorCode::EvaluationFailure:
    case ErrorCode::SingularLeading:
      return true;
    default:
      return false;
  }
}

}  // namespace nlevp
