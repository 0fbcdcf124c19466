#pragma once

#include <cstdint>

#include "mist/field.hpp"

namespace mist {

/// Parameters for a synthetic speckle reference. The field is Gaussian white
/// noise low-pass filtered in Fourier space (periodic wrap) by a Gaussian
/// kernel of standard deviation correlation_length/2, then affinely rescaled
/// to the requested mean and contrast. With that kernel width the field's
/// autocorrelation falls to 1/e at a lag of one correlation_length.
struct SpeckleSpec {
  std::uint64_t seed = 0;
  int width = 0;
  int height = 0;
  double pitch = 0.0;               // m per pixel
  double correlation_length = 0.0;  // m; must be >= 2*pitch
  double mean_intensity = 1.0;      // relative units
  double contrast = 0.0;            // std/mean, in [0, 1)
};

/// Deterministic for a fixed spec (seed included); all values > 0.
/// Throws std::invalid_argument if the spec is invalid or the contrast is
/// too high to keep every pixel positive.
ScalarField generate_speckle(const SpeckleSpec& spec);

/// phi(x,y) = amplitude * exp(-((x-cx)^2+(y-cy)^2) / (2 sigma^2)), radians.
/// Coordinates are physical: pixel (i,j) sits at (i*pitch, j*pitch).
/// Requires sigma >= 4*pitch.
ScalarField gaussian_phase_phantom(int width, int height, double pitch,
                                   double amplitude_rad, double sigma_m,
                                   double center_x_m, double center_y_m);

/// Analytic Laplacian of gaussian_phase_phantom with the same parameters:
/// amplitude * ((r^2/sigma^4) - 2/sigma^2) * exp(-r^2/(2 sigma^2)).
ScalarField gaussian_phantom_laplacian(int width, int height, double pitch,
                                       double amplitude_rad, double sigma_m,
                                       double center_x_m, double center_y_m);

/// Non-negative Gaussian blob of height `peak_m` (diffusion units, meters).
/// Requires sigma >= 8*pitch so the map is slowly varying on the speckle
/// scale.
ScalarField smooth_diffusion_phantom(int width, int height, double pitch,
                                     double peak_m, double sigma_m,
                                     double center_x_m, double center_y_m);

}  // namespace mist
