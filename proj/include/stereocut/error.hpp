#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace stereocut {

enum class ErrorCode {
  // I/O and media
  MissingFile,
  DimensionMismatch,
  CountMismatch,
  UnsupportedFormat,
  IoFailure,
  // disparity prior
  NoValidDisparity,
  NoForegroundPeak,
  EmptyMask,
  // grid / graph
  EmptyRoi,
  EmptyGrid,
  // metrics
  EmptyInput,
  // synth
  TooLarge,
  ShapeOutOfBounds,
  // configuration
  UnknownKey,
  BadValue,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MissingFile: return "MissingFile";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::CountMismatch: return "CountMismatch";
    case ErrorCode::UnsupportedFormat: return "UnsupportedFormat";
    case ErrorCode::IoFailure: return "IoFailure";
    case ErrorCode::NoValidDisparity: return "NoValidDisparity";
    case ErrorCode::NoForegroundPeak: return "NoForegroundPeak";
    case ErrorCode::EmptyMask: return "EmptyMask";
    case ErrorCode::EmptyRoi: return "EmptyRoi";
    case ErrorCode::EmptyGrid: return "EmptyGrid";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::ShapeOutOfBounds: return "ShapeOutOfBounds";
    case ErrorCode::UnknownKey: return "UnknownKey";
    case ErrorCode::BadValue: return "BadValue";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace stereocut
