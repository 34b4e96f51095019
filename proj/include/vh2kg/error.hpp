#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace vh2kg {

enum class ErrorCode {
  MalformedStep,
  MissingHeader,
  UnknownVerb,
  DuplicateId,
  DanglingEdge,
  NoAgent,
  Orphan,
  MalformedDocument,
  ScoreOutOfRange,
  UnknownProperty,
  Unexecutable,
  InvalidTrace,
  MissingGeometry,
  EmptyPath,
  NoRoots,
  EmptyCorpus,
  IndexOutOfRange,
  TooFewPoints,
  UnknownToken,
  MissingDurations,
  EventNotInCorpus,
  Io,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MalformedStep: return "MalformedStep";
    case ErrorCode::MissingHeader: return "MissingHeader";
    case ErrorCode::UnknownVerb: return "UnknownVerb";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::DanglingEdge: return "DanglingEdge";
    case ErrorCode::NoAgent: return "NoAgent";
    case ErrorCode::Orphan: return "Orphan";
    case ErrorCode::MalformedDocument: return "MalformedDocument";
    case ErrorCode::ScoreOutOfRange: return "ScoreOutOfRange";
    case ErrorCode::UnknownProperty: return "UnknownProperty";
    case ErrorCode::Unexecutable: return "Unexecutable";
    case ErrorCode::InvalidTrace: return "InvalidTrace";
    case ErrorCode::MissingGeometry: return "MissingGeometry";
    case ErrorCode::EmptyPath: return "EmptyPath";
    case ErrorCode::NoRoots: return "NoRoots";
    case ErrorCode::EmptyCorpus: return "EmptyCorpus";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::TooFewPoints: return "TooFewPoints";
    case ErrorCode::UnknownToken: return "UnknownToken";
    case ErrorCode::MissingDurations: return "MissingDurations";
    case ErrorCode::EventNotInCorpus: return "EventNotInCorpus";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

/// Every domain failure in the library is reported as an Error carrying a code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Script parse failure positioned at a 1-based source line.
class ParseError : public Error {
 public:
  ParseError(ErrorCode code, std::size_t line, const std::string& text)
      : Error(code, "line " + std::to_string(line) + ": " + text), line_(line), text_(text) {}

  std::size_t line() const noexcept { return line_; }
  const std::string& text() const noexcept { return text_; }

 private:
  std::size_t line_;
  std::string text_;
};

}  // namespace vh2kg
