#pragma once

#include "mist/field.hpp"

namespace mist {

/// Axis-aligned pixel rectangle, inclusive of x0/y0, width x height pixels.
struct Roi {
  int x0 = 0;
  int y0 = 0;
  int width = 0;
  int height = 0;
};

struct RoiStats {
  double mean = 0.0;
  double std_dev = 0.0;  // population (1/N) estimator
};

RoiStats roi_stats(const ScalarField& field, const Roi& roi);

/// Contrast-to-noise ratio (mu_bg - mu_feat) / sigma_bg with population
/// statistics over the background ROI. ROIs must lie inside the field,
/// have area >= 4, and be disjoint. Throws degenerate_roi_error when the
/// background has zero variance.
double cnr(const ScalarField& field, const Roi& roi_background,
           const Roi& roi_feature);

/// RMS(estimate - truth) / RMS(truth) over the interior after excluding a
/// border of `border_exclude` pixels on every side. Throws when the truth
/// is identically zero over that interior.
double rms_relative_error(const ScalarField& estimate, const ScalarField& truth,
                          int border_exclude);

}  // namespace mist
