#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace haur {

enum class ErrorCode {
  EmptyDocument,
  OversizedSentence,
  WordTooWide,
  EmptySpan,
  SingleParagraphChunk,
  GeometryMismatch,
  BlankImage,
  InsufficientChunks,
  BadRatios,
  UnknownSampleId,
  DuplicatePrediction,
  RegenerationMismatch,
  NoAnnotationFound,
  InputTooLong,
  IdOutOfRange,
  ShapeMismatch,
  DivergenceDetected,
  InvalidArgument,
  InvalidConfig,
  Io,
  Parse,
};

std::string_view to_string(ErrorCode code);

// Every failure surfaced by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace haur
