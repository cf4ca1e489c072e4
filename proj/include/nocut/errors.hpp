#pragma once

#include <stdexcept>
#include <string>

namespace nocut {

/// No background cell survived level-set classification.
struct EmptyDomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// The level set vanishes (within tolerance) on a whole cell.
struct DegenerateLevelSetError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A cut cell did not yield exactly two edge crossings after snapping.
struct DegenerateCutError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Cell clipping produced a polygon with (near-)zero area.
struct DegenerateClipError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Direct factorization hit a singular pivot.
struct SingularSystemError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace nocut
