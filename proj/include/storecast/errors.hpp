#pragma once

#include <stdexcept>
#include <string>

namespace storecast {

enum class Errc {
  MalformedRow,
  DuplicateKey,
  MissingColumn,
  UnknownStore,
  EmptySeries,
  SpanTooShort,
  LagExceedsLength,
  EmptySelection,
  SeriesTooShort,
  OptimizerDiverged,
  DidNotConverge,
  ColumnMismatch,
  LengthMismatch,
  EmptyInput,
  TooFewRows,
  DegenerateData,
  NonPositiveData,
  BoundaryInput,
  SingularPrecision,
  ChainTooShort,
  EmptyChain,
  KindMismatch,
  UnknownCommand,
  BadFlag,
  IoError,
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::MalformedRow: return "MalformedRow";
    case Errc::DuplicateKey: return "DuplicateKey";
    case Errc::MissingColumn: return "MissingColumn";
    case Errc::UnknownStore: return "UnknownStore";
    case Errc::EmptySeries: return "EmptySeries";
    case Errc::SpanTooShort: return "SpanTooShort";
    case Errc::LagExceedsLength: return "LagExceedsLength";
    case Errc::EmptySelection: return "EmptySelection";
    case Errc::SeriesTooShort: return "SeriesTooShort";
    case Errc::OptimizerDiverged: return "OptimizerDiverged";
    case Errc::DidNotConverge: return "DidNotConverge";
    case Errc::ColumnMismatch: return "ColumnMismatch";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::EmptyInput: return "EmptyInput";
    case Errc::TooFewRows: return "TooFewRows";
    case Errc::DegenerateData: return "DegenerateData";
    case Errc::NonPositiveData: return "NonPositiveData";
    case Errc::BoundaryInput: return "BoundaryInput";
    case Errc::SingularPrecision: return "SingularPrecision";
    case Errc::ChainTooShort: return "ChainTooShort";
    case Errc::EmptyChain: return "EmptyChain";
    case Errc::KindMismatch: return "KindMismatch";
    case Errc::UnknownCommand: return "UnknownCommand";
    case Errc::BadFlag: return "BadFlag";
    case Errc::IoError: return "IoError";
  }
  return "Unknown";
}

/// Library-wide exception carrying a machine-checkable error code.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void raise(Errc code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace storecast
