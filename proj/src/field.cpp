#include "mist/field.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace mist {

double wave_number_from_energy(double energy_ev) {
  if (!std::isfinite(energy_ev) || energy_ev <= 0.0) {
    throw std::invalid_argument("wave_number_from_energy: energy must be a "
                                "positive finite value in eV");
  }
  return 2.0 * kPi * energy_ev / kHC_eV_m;
}

ScalarField::ScalarField(int width, int height, double pitch,
                         std::vector<double> values)
    : width_(width), height_(height), pitch_(pitch), values_(std::move(values)) {
  if (width_ < 1 || height_ < 1) {
    throw std::invalid_argument("ScalarField: width and height must be >= 1");
  }
  if (!std::isfinite(pitch_) || pitch_ <= 0.0) {
    throw std::invalid_argument("ScalarField: pitch must be positive and finite");
  }
  const std::size_t expected =
      static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_);
  if (values_.size() != expected) {
    throw std::invalid_argument(
        "ScalarField: values length " + std::to_string(values_.size()) +
        " does not match width*height = " + std::to_string(expected));
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw std::invalid_argument("ScalarField: non-finite value at index " +
                                  std::to_string(i));
    }
  }
}

ScalarField ScalarField::constant(int width, int height, double pitch,
                                  double value) {
  return ScalarField(width, height, pitch,
                     std::vector<double>(
                         static_cast<std::size_t>(width) * height, value));
}

ScalarField ScalarField::zero(int width, int height, double pitch) {
  return constant(width, height, pitch, 0.0);
}

bool ScalarField::same_shape(const ScalarField& other) const noexcept {
  return width_ == other.width_ && height_ == other.height_ &&
         pitch_ == other.pitch_;
}

double ScalarField::min() const {
  return *std::min_element(values_.begin(), values_.end());
}

double ScalarField::max() const {
  return *std::max_element(values_.begin(), values_.end());
}

double ScalarField::mean() const {
  return std::accumulate(values_.begin(), values_.end(), 0.0) /
         static_cast<double>(values_.size());
}

ScalarField clamp_nonnegative(const ScalarField& f) {
  std::vector<double> v = f.values();
  for (double& x : v) x = std::max(x, 0.0);
  return ScalarField(f.width(), f.height(), f.pitch(), std::move(v));
}

Geometry::Geometry(double delta_m, double energy_ev, double pitch_m)
    : delta_(delta_m), energy_(energy_ev),
      wave_number_(wave_number_from_energy(energy_ev)), pitch_(pitch_m) {
  if (!std::isfinite(delta_) || delta_ <= 0.0) {
    throw std::invalid_argument("Geometry: delta must be positive and finite");
  }
  if (!std::isfinite(pitch_) || pitch_ <= 0.0) {
    throw std::invalid_argument("Geometry: pitch must be positive and finite");
  }
}

SpecklePair::SpecklePair(ScalarField reference, ScalarField sample,
                         std::string mask_position_id)
    : reference_(std::move(reference)), sample_(std::move(sample)),
      mask_position_id_(std::move(mask_position_id)) {
  if (!reference_.same_shape(sample_)) {
    throw std::invalid_argument(
        "SpecklePair: reference and sample must share dimensions and pitch");
  }
  if (reference_.min() <= 0.0) {
    throw std::invalid_argument(
        "SpecklePair: reference intensities must be strictly positive");
  }
}

}  // namespace mist
