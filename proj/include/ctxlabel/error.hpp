#ifndef CTXLABEL_ERROR_HPP
#define CTXLABEL_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace ctxlabel {

enum class ErrorKind {
  Malformed,         // document does not follow its format
  Overlap,           // two region masks share a pixel
  OutOfBounds,       // mask pixel outside the frame
  EmptyRegion,       // region mask has no pixels
  DuplicateId,       // region id or vocabulary name repeated
  UnknownConcept,    // concept name/index not in the vocabulary
  UnknownRegion,     // region id not in the scene
  InvalidArgument,   // precondition on an argument violated
  DimensionMismatch, // feature/decision vector length disagrees
  MissingInput,      // required data absent (features, truth, raster)
  SearchSpace,       // exhaustive search space above the guard
  Numerical,         // linear solve failed
  Io,                // file could not be read or written
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Malformed: return "malformed";
    case ErrorKind::Overlap: return "overlap";
    case ErrorKind::OutOfBounds: return "out-of-bounds";
    case ErrorKind::EmptyRegion: return "empty-region";
    case ErrorKind::DuplicateId: return "duplicate";
    case ErrorKind::UnknownConcept: return "unknown-concept";
    case ErrorKind::UnknownRegion: return "unknown-region";
    case ErrorKind::InvalidArgument: return "invalid-argument";
    case ErrorKind::DimensionMismatch: return "dimension-mismatch";
    case ErrorKind::MissingInput: return "missing-input";
    case ErrorKind::SearchSpace: return "search-space";
    case ErrorKind::Numerical: return "numerical";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

/// All library failures are reported with this exception; `kind()` lets
/// callers (and tests) tell the diagnostics apart without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace ctxlabel

#endif
