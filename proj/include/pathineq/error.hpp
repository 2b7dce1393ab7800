#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pathineq {

enum class ErrorKind {
  NotConnected,
  NotReversible,
  NonpositiveRate,
  BadGraph,
  BadParams,
  InvalidPath,
  NotATree,
  NegativePhi,
  NotLaplacian,
  NotUniform,
  TooLarge,
  BadObjective,
  BadInput,
  DegenerateSpectrum,
  NonConvergence,
  SingularSystem,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NotConnected: return "NotConnected";
    case ErrorKind::NotReversible: return "NotReversible";
    case ErrorKind::NonpositiveRate: return "NonpositiveRate";
    case ErrorKind::BadGraph: return "BadGraph";
    case ErrorKind::BadParams: return "BadParams";
    case ErrorKind::InvalidPath: return "InvalidPath";
    case ErrorKind::NotATree: return "NotATree";
    case ErrorKind::NegativePhi: return "NegativePhi";
    case ErrorKind::NotLaplacian: return "NotLaplacian";
    case ErrorKind::NotUniform: return "NotUniform";
    case ErrorKind::TooLarge: return "TooLarge";
    case ErrorKind::BadObjective: return "BadObjective";
    case ErrorKind::BadInput: return "BadInput";
    case ErrorKind::DegenerateSpectrum: return "DegenerateSpectrum";
    case ErrorKind::NonConvergence: return "NonConvergence";
    case ErrorKind::SingularSystem: return "SingularSystem";
  }
  return "Unknown";
}

// Errors that come from numerical work on valid input, as opposed to bad input.
constexpr bool is_computation_error(ErrorKind kind) {
  return kind == ErrorKind::DegenerateSpectrum || kind == ErrorKind::NonConvergence ||
         kind == ErrorKind::SingularSystem;
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind), message_(what) {}

  ErrorKind kind() const noexcept { return kind_; }
  // The text without the kind prefix.
  const std::string& message() const noexcept { return message_; }

 private:
  ErrorKind kind_;
  std::string message_;
};

}  // namespace pathineq
