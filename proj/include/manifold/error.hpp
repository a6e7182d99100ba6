#pragma once

#include <iostream>
#include <stdexcept>
#include <string>
#include <string_view>

namespace manifold {

enum class ErrorKind {
  // configuration / parameter problems
  Config,
  KTooLarge,
  NonPositiveSigma,
  InvalidSpec,
  // input problems
  Io,
  Format,
  EmptyInput,
  DuplicateKey,
  MissingColumn,
  UnknownLabel,
  EmptyIntersection,
  IdMismatch,
  // numerical failures
  ZeroNormRow,
  ZeroBandwidth,
  NonSymmetric,
  ConvergenceFailure,
  DisconnectedGraph,
  ZeroDegreeNode,
  SingularLocalGram,
  ShapeMismatch,
  CalibrationFailure,
  NumericalOverflow,
  ZeroRowSum,
  DegenerateSpectrum,
  SingleClass,
};

constexpr std::string_view kind_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::Config: return "ConfigError";
    case ErrorKind::KTooLarge: return "KTooLarge";
    case ErrorKind::NonPositiveSigma: return "NonPositiveSigma";
    case ErrorKind::InvalidSpec: return "InvalidSpec";
    case ErrorKind::Io: return "IoError";
    case ErrorKind::Format: return "FormatError";
    case ErrorKind::EmptyInput: return "EmptyInput";
    case ErrorKind::DuplicateKey: return "DuplicateKey";
    case ErrorKind::MissingColumn: return "MissingColumn";
    case ErrorKind::UnknownLabel: return "UnknownLabel";
    case ErrorKind::EmptyIntersection: return "EmptyIntersection";
    case ErrorKind::IdMismatch: return "IdMismatch";
    case ErrorKind::ZeroNormRow: return "ZeroNormRow";
    case ErrorKind::ZeroBandwidth: return "ZeroBandwidth";
    case ErrorKind::NonSymmetric: return "NonSymmetric";
    case ErrorKind::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorKind::DisconnectedGraph: return "DisconnectedGraph";
    case ErrorKind::ZeroDegreeNode: return "ZeroDegreeNode";
    case ErrorKind::SingularLocalGram: return "SingularLocalGram";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::CalibrationFailure: return "CalibrationFailure";
    case ErrorKind::NumericalOverflow: return "NumericalOverflow";
    case ErrorKind::ZeroRowSum: return "ZeroRowSum";
    case ErrorKind::DegenerateSpectrum: return "DegenerateSpectrum";
    case ErrorKind::SingleClass: return "SingleClass";
  }
  return "Error";
}

/// Exit-code class used by the command-line tool: 1 config, 2 input, 3 numerical.
/// A missing column is a config error: it names a column the user asked for.
constexpr int exit_code_for(ErrorKind k) {
  switch (k) {
    case ErrorKind::Config:
    case ErrorKind::KTooLarge:
    case ErrorKind::NonPositiveSigma:
    case ErrorKind::InvalidSpec:
    case ErrorKind::MissingColumn:
      return 1;
    case ErrorKind::Io:
    case ErrorKind::Format:
    case ErrorKind::EmptyInput:
    case ErrorKind::DuplicateKey:
    case ErrorKind::UnknownLabel:
    case ErrorKind::EmptyIntersection:
    case ErrorKind::IdMismatch:
      return 2;
    default:
      return 3;
  }
}

/// All library failures are reported as this exception. `detail()` is a
/// single line of space separated `key=value` fields (or free text).
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string detail)
      : std::runtime_error(std::string(kind_name(kind)) + " " + detail),
        kind_(kind),
        detail_(std::move(detail)) {}

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorKind kind_;
  std::string detail_;
};

inline void warn(std::string_view msg) { std::cerr << "warning: " << msg << '\n'; }

}  // namespace manifold
