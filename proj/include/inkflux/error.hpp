#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace inkflux {

enum class ErrorKind {
  // log ingestion / replay
  MalformedRecord,
  UnknownKind,
  NegativeCount,
  DanglingReference,
  SpanOverflow,
  UnknownDocument,
  // statistics / segmentation
  EmptySamples,
  TooFewSamples,
  TooFewPoints,
  NoSessions,
  NoSuggestions,
  // orchestration
  EmptySnippet,
  InvalidParams,
  NoProvider,
  InvalidConfig,
  ProviderFailure,
  // reporting
  NoCurves,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::MalformedRecord: return "MalformedRecord";
    case ErrorKind::UnknownKind: return "UnknownKind";
    case ErrorKind::NegativeCount: return "NegativeCount";
    case ErrorKind::DanglingReference: return "DanglingReference";
    case ErrorKind::SpanOverflow: return "SpanOverflow";
    case ErrorKind::UnknownDocument: return "UnknownDocument";
    case ErrorKind::EmptySamples: return "EmptySamples";
    case ErrorKind::TooFewSamples: return "TooFewSamples";
    case ErrorKind::TooFewPoints: return "TooFewPoints";
    case ErrorKind::NoSessions: return "NoSessions";
    case ErrorKind::NoSuggestions: return "NoSuggestions";
    case ErrorKind::EmptySnippet: return "EmptySnippet";
    case ErrorKind::InvalidParams: return "InvalidParams";
    case ErrorKind::NoProvider: return "NoProvider";
    case ErrorKind::InvalidConfig: return "InvalidConfig";
    case ErrorKind::ProviderFailure: return "ProviderFailure";
    case ErrorKind::NoCurves: return "NoCurves";
  }
  return "Unknown";
}

/// Every failure raised by the library. `kind()` is stable and is what callers
/// (and the CLI exit-code mapping) switch on; the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what,
        std::optional<std::size_t> line = std::nullopt)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what),
        kind_(kind),
        line_(line) {}

  ErrorKind kind() const noexcept { return kind_; }

  /// 1-based input line for MalformedRecord and friends raised during parsing.
  std::optional<std::size_t> line() const noexcept { return line_; }

 private:
  ErrorKind kind_;
  std::optional<std::size_t> line_;
};

inline bool is_provider_error(const Error& e) {
  return e.kind() == ErrorKind::ProviderFailure ||
         e.kind() == ErrorKind::NoProvider;
}

}  // namespace inkflux
