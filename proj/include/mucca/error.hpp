#pragma once

#include <stdexcept>
#include <string>

namespace mucca {

enum class ErrorCode {
  NonPositiveWeight,
  SelfLoop,
  DuplicateEdge,
  MalformedLine,
  EmptyGraph,
  NoRevealedNodes,
  UnlabeledHingeNode,
  InconsistentWithTraining,
  TooLarge,
  ZeroUtility,
  NotConverged,
  DegenerateFeatures,
  MalformedRow,
  EmptyInput,
  NoLabels,
  EmptyTestSet,
  InvalidArgument,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonPositiveWeight: return "NonPositiveWeight";
    case ErrorCode::SelfLoop: return "SelfLoop";
    case ErrorCode::DuplicateEdge: return "DuplicateEdge";
    case ErrorCode::MalformedLine: return "MalformedLine";
    case ErrorCode::EmptyGraph: return "EmptyGraph";
    case ErrorCode::NoRevealedNodes: return "NoRevealedNodes";
    case ErrorCode::UnlabeledHingeNode: return "UnlabeledHingeNode";
    case ErrorCode::InconsistentWithTraining: return "InconsistentWithTraining";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::ZeroUtility: return "ZeroUtility";
    case ErrorCode::NotConverged: return "NotConverged";
    case ErrorCode::DegenerateFeatures: return "DegenerateFeatures";
    case ErrorCode::MalformedRow: return "MalformedRow";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::NoLabels: return "NoLabels";
    case ErrorCode::EmptyTestSet: return "EmptyTestSet";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

/// Every failure raised by the library. The code identifies the failure
/// class; the message carries the offending input where there is one.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class NotConverged : public Error {
 public:
  NotConverged(double residual, const std::string& what)
      : Error(ErrorCode::NotConverged, what), residual_(residual) {}

  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

}  // namespace mucca
