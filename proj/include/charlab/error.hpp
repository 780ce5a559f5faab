#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace charlab {

enum class ErrorKind {
  NonPrime,
  SizeCap,
  NonDivisor,
  InvalidPoint,
  InvalidModel,
  LevelMismatch,
  ModelMismatch,
  NotClosed,
  NotProduct,
  NotStable,
  UnknownWeight,
  EmptyFamily,
  CoverageGap,
  NotNested,
  ConfigError,
};

std::string_view to_string(ErrorKind kind);

// All library failures surface as this exception; `kind()` is the stable
// machine-readable tag, `what()` carries the context.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NonPrime: return "NonPrime";
    case ErrorKind::SizeCap: return "SizeCap";
    case ErrorKind::NonDivisor: return "NonDivisor";
    case ErrorKind::InvalidPoint: return "InvalidPoint";
    case ErrorKind::InvalidModel: return "InvalidModel";
    case ErrorKind::LevelMismatch: return "LevelMismatch";
    case ErrorKind::ModelMismatch: return "ModelMismatch";
    case ErrorKind::NotClosed: return "NotClosed";
    case ErrorKind::NotProduct: return "NotProduct";
    case ErrorKind::NotStable: return "NotStable";
    case ErrorKind::UnknownWeight: return "UnknownWeight";
    case ErrorKind::EmptyFamily: return "EmptyFamily";
    case ErrorKind::CoverageGap: return "CoverageGap";
    case ErrorKind::NotNested: return "NotNested";
    case ErrorKind::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

}  // namespace charlab
