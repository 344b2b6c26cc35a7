#pragma once

#include <vector>

namespace scribe {

/// One observation of the physical pen tip, in millimetres of the homed
/// machine frame.
struct PenSample {
  double t = 0.0;     // seconds
  double x_mm = 0.0;
  double y_mm = 0.0;
  double z_mm = 0.0;  // tip height above the paper surface, negative when pressed in
  bool pen_down = false;

  bool operator==(const PenSample&) const = default;
};

/// Time-ordered; t strictly increasing.
using PenTrace = std::vector<PenSample>;

}  // namespace scribe
