#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace mist {

inline constexpr double kPi = 3.14159265358979323846;

// 2019 SI exact defining constants.
inline constexpr double kPlanck_J_s = 6.62607015e-34;
inline constexpr double kLightSpeed_m_s = 299792458.0;
inline constexpr double kElementaryCharge_C = 1.602176634e-19;

/// h*c expressed in eV*m, so that lambda = kHC_eV_m / E[eV].
inline constexpr double kHC_eV_m =
    kPlanck_J_s * kLightSpeed_m_s / kElementaryCharge_C;

/// Wave number k = 2*pi*E/(h*c) in rad/m for a photon energy in eV.
/// Throws std::invalid_argument for non-positive or non-finite energy.
double wave_number_from_energy(double energy_ev);

/// A 2D grid of real samples with uniform pixel pitch. Units of the values
/// depend on the role: intensity (relative units), phase (rad), phase
/// Laplacian (rad/m^2), diffusion (m). Immutable after construction;
/// safe to share read-only across threads.
class ScalarField {
public:
  /// Row-major values, values[y*width + x]; the pixel (x, y) sits at the
  /// physical point (x*pitch, y*pitch). Throws std::invalid_argument on
  /// non-positive dimensions or pitch, size mismatch, or non-finite values.
  ScalarField(int width, int height, double pitch, std::vector<double> values);

  static ScalarField constant(int width, int height, double pitch, double value);
  static ScalarField zero(int width, int height, double pitch);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  double pitch() const noexcept { return pitch_; }
  std::size_t size() const noexcept { return values_.size(); }

  double operator()(int x, int y) const {
    return values_[static_cast<std::size_t>(y) * width_ + x];
  }
  const std::vector<double>& values() const noexcept { return values_; }

  /// Same width, height and pitch.
  bool same_shape(const ScalarField& other) const noexcept;

  double min() const;
  double max() const;
  double mean() const;

private:
  int width_;
  int height_;
  double pitch_;
  std::vector<double> values_;
};

/// Copy of `f` with every value clamped to >= 0. Display-export helper;
/// solvers never clamp their stored results.
ScalarField clamp_nonnegative(const ScalarField& f);

/// Physical constants of a propagation-based measurement: sample-to-detector
/// distance, photon energy, and the detector pixel pitch. The wave number is
/// derived from the energy on construction.
class Geometry {
public:
  Geometry(double delta_m, double energy_ev, double pitch_m);

  double delta() const noexcept { return delta_; }        // m
  double energy() const noexcept { return energy_; }      // eV
  double wave_number() const noexcept { return wave_number_; }  // rad/m
  double pitch() const noexcept { return pitch_; }        // m/pixel

private:
  double delta_;
  double energy_;
  double wave_number_;
  double pitch_;
};

/// One mask position: the reference speckle image I_R (no sample) and the
/// sample image I_S at the same mask position. The reference must be
/// strictly positive since the inversion divides and multiplies by it.
class SpecklePair {
public:
  SpecklePair(ScalarField reference, ScalarField sample,
              std::string mask_position_id);

  const ScalarField& reference() const noexcept { return reference_; }
  const ScalarField& sample() const noexcept { return sample_; }
  const std::string& mask_position_id() const noexcept { return mask_position_id_; }

private:
  ScalarField reference_;
  ScalarField sample_;
  std::string mask_position_id_;
};

/// Output of the scalar solvers. `degenerate` holds 1.0 where the pixel
/// failed the rank test and was filled from its nearest valid neighbour,
/// 0.0 elsewhere. `phi` is filled by the phase-integration step, not by
/// the solvers themselves, and is zero-mean when present.
struct ReconstructionResult {
  ScalarField lap_phi;       // rad/m^2
  ScalarField d_eff;         // m
  std::optional<ScalarField> phi;  // rad, mean 0
  ScalarField residual_rms;  // intensity units, RMS over the N equations
  ScalarField degenerate;    // 0/1 mask of filled pixels
};

/// Output of the directional (tensor) solver. Symmetric-tensor storage:
/// one off-diagonal field d_xy.
struct TensorResult {
  ScalarField lap_phi;       // rad/m^2
  ScalarField d_xx;          // m
  ScalarField d_yy;          // m
  ScalarField d_xy;          // m
  ScalarField residual_rms;  // intensity units
  ScalarField degenerate;    // 0/1 mask of filled pixels
};

}  // namespace mist
