#pragma once

#include <stdexcept>
#include <string>

namespace mist {

/// Structural problem in an image or configuration file (bad header,
/// truncated payload, unknown key, ...). Messages carry byte offsets or
/// line numbers where they are known.
class format_error : public std::runtime_error {
public:
  explicit format_error(const std::string& what) : std::runtime_error(what) {}
};

/// The per-pixel inversion is rank-deficient at every pixel, so no
/// reconstruction exists (e.g. duplicated mask positions).
class degenerate_system_error : public std::runtime_error {
public:
  explicit degenerate_system_error(const std::string& what)
      : std::runtime_error(what) {}
};

/// A region of interest cannot support the requested statistic
/// (zero-variance background in a CNR computation).
class degenerate_roi_error : public std::runtime_error {
public:
  explicit degenerate_roi_error(const std::string& what)
      : std::runtime_error(what) {}
};

}  // namespace mist
