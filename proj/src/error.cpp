#include "haur/error.hpp"

namespace haur {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::EmptyDocument: return "EmptyDocument";
    case ErrorCode::OversizedSentence: return "OversizedSentence";
    case ErrorCode::WordTooWide: return "WordTooWide";
    case ErrorCode::EmptySpan: return "EmptySpan";
    case ErrorCode::SingleParagraphChunk: return "SingleParagraphChunk";
    case ErrorCode::GeometryMismatch: return "GeometryMismatch";
    case ErrorCode::BlankImage: return "BlankImage";
    case ErrorCode::InsufficientChunks: return "InsufficientChunks";
    case ErrorCode::BadRatios: return "BadRatios";
    case ErrorCode::UnknownSampleId: return "UnknownSampleId";
    case ErrorCode::DuplicatePrediction: return "DuplicatePrediction";
    case ErrorCode::RegenerationMismatch: return "RegenerationMismatch";
    case ErrorCode::NoAnnotationFound: return "NoAnnotationFound";
    case ErrorCode::InputTooLong: return "InputTooLong";
    case ErrorCode::IdOutOfRange: return "IdOutOfRange";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::DivergenceDetected: return "DivergenceDetected";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::Io: return "Io";
    case ErrorCode::Parse: return "Parse";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

}  // namespace haur
