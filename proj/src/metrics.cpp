#include "mist/metrics.hpp"

#include <cmath>
#include <stdexcept>

#include "mist/errors.hpp"

namespace mist {

namespace {

void require_roi(const ScalarField& field, const Roi& roi, const char* name) {
  if (roi.width < 1 || roi.height < 1 ||
      static_cast<long>(roi.width) * roi.height < 4) {
    throw std::invalid_argument(std::string("cnr: ") + name +
                                " must cover at least 4 pixels");
  }
  if (roi.x0 < 0 || roi.y0 < 0 || roi.x0 + roi.width > field.width() ||
      roi.y0 + roi.height > field.height()) {
    throw std::invalid_argument(std::string("cnr: ") + name +
                                " lies outside the field");
  }
}

bool overlaps(const Roi& a, const Roi& b) {
  return a.x0 < b.x0 + b.width && b.x0 < a.x0 + a.width &&
         a.y0 < b.y0 + b.height && b.y0 < a.y0 + a.height;
}

}  // namespace

RoiStats roi_stats(const ScalarField& field, const Roi& roi) {
  require_roi(field, roi, "roi");
  double sum = 0.0;
  for (int y = roi.y0; y < roi.y0 + roi.height; ++y) {
    for (int x = roi.x0; x < roi.x0 + roi.width; ++x) sum += field(x, y);
  }
  const double n = static_cast<double>(roi.width) * roi.height;
  const double mean = sum / n;
  double var = 0.0;
  for (int y = roi.y0; y < roi.y0 + roi.height; ++y) {
    for (int x = roi.x0; x < roi.x0 + roi.width; ++x) {
      const double d = field(x, y) - mean;
      var += d * d;
    }
  }
  return RoiStats{mean, std::sqrt(var / n)};
}

double cnr(const ScalarField& field, const Roi& roi_background,
           const Roi& roi_feature) {
  require_roi(field, roi_background, "background roi");
  require_roi(field, roi_feature, "feature roi");
  if (overlaps(roi_background, roi_feature)) {
    throw std::invalid_argument("cnr: background and feature ROIs must be disjoint");
  }
  const RoiStats bg = roi_stats(field, roi_background);
  const RoiStats feat = roi_stats(field, roi_feature);
  if (bg.std_dev == 0.0) {
    throw degenerate_roi_error("cnr: background ROI has zero variance");
  }
  return (bg.mean - feat.mean) / bg.std_dev;
}

double rms_relative_error(const ScalarField& estimate, const ScalarField& truth,
                          int border_exclude) {
  if (!estimate.same_shape(truth)) {
    throw std::invalid_argument(
        "rms_relative_error: fields must share dimensions and pitch");
  }
  if (border_exclude < 0) {
    throw std::invalid_argument("rms_relative_error: border must be >= 0");
  }
  const int x0 = border_exclude;
  const int y0 = border_exclude;
  const int x1 = estimate.width() - border_exclude;
  const int y1 = estimate.height() - border_exclude;
  if (x1 <= x0 || y1 <= y0) {
    throw std::invalid_argument(
        "rms_relative_error: border excludes the whole field");
  }
  double se = 0.0;
  double st = 0.0;
  for (int y = y0; y < y1; ++y) {
    for (int x = x0; x < x1; ++x) {
      const double d = estimate(x, y) - truth(x, y);
      se += d * d;
      st += truth(x, y) * truth(x, y);
    }
  }
  if (st == 0.0) {
    throw std::invalid_argument(
        "rms_relative_error: truth is identically zero over the interior");
  }
  return std::sqrt(se / st);
}

}  // namespace mist
