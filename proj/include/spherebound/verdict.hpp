#pragma once

#include <string>

namespace spherebound {

/// Outcome of a single check. `detail` carries the witness or the value that
/// decided the outcome in human-readable form.
struct Verdict {
  std::string name;
  bool pass = false;
  std::string detail;

  explicit operator bool() const { return pass; }
};

}  // namespace spherebound
