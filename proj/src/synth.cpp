#include "mist/synth.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "mist/fft.hpp"
#include "mist/rng.hpp"

namespace mist {

namespace {

ScalarField gaussian_blob(int width, int height, double pitch, double amplitude,
                          double sigma, double cx, double cy, bool laplacian) {
  if (width < 1 || height < 1) {
    throw std::invalid_argument("phantom: dimensions must be >= 1");
  }
  if (!std::isfinite(sigma) || sigma <= 0.0) {
    throw std::invalid_argument("phantom: sigma must be positive");
  }
  const double s2 = sigma * sigma;
  std::vector<double> out(static_cast<std::size_t>(width) * height);
  std::size_t idx = 0;
  for (int j = 0; j < height; ++j) {
    const double dy = j * pitch - cy;
    for (int i = 0; i < width; ++i, ++idx) {
      const double dx = i * pitch - cx;
      const double r2 = dx * dx + dy * dy;
      const double g = amplitude * std::exp(-r2 / (2.0 * s2));
      out[idx] = laplacian ? (r2 / (s2 * s2) - 2.0 / s2) * g : g;
    }
  }
  return ScalarField(width, height, pitch, std::move(out));
}

}  // namespace

ScalarField generate_speckle(const SpeckleSpec& spec) {
  if (spec.width < 1 || spec.height < 1) {
    throw std::invalid_argument("generate_speckle: dimensions must be >= 1");
  }
  if (!std::isfinite(spec.pitch) || spec.pitch <= 0.0) {
    throw std::invalid_argument("generate_speckle: pitch must be positive");
  }
  if (!std::isfinite(spec.correlation_length) ||
      spec.correlation_length < 2.0 * spec.pitch) {
    throw std::invalid_argument(
        "generate_speckle: correlation_length must be >= 2*pitch so speckles "
        "are spatially resolved");
  }
  if (!std::isfinite(spec.mean_intensity) || spec.mean_intensity <= 0.0) {
    throw std::invalid_argument("generate_speckle: mean_intensity must be > 0");
  }
  if (!std::isfinite(spec.contrast) || spec.contrast < 0.0 ||
      spec.contrast >= 1.0) {
    throw std::invalid_argument("generate_speckle: contrast must be in [0, 1)");
  }

  const int w = spec.width;
  const int h = spec.height;
  const std::size_t n = static_cast<std::size_t>(w) * h;

  if (spec.contrast == 0.0) {
    return ScalarField::constant(w, h, spec.pitch, spec.mean_intensity);
  }

  GaussianSampler gauss(spec.seed);
  std::vector<std::complex<double>> buf(n);
  for (std::size_t i = 0; i < n; ++i) buf[i] = gauss.next();

  // Gaussian low-pass with kernel std correlation_length/2, applied as a
  // periodic convolution via the transfer function exp(-k^2 s^2 / 2).
  fft::forward_2d(buf, w, h);
  const std::vector<double> kx = fft::angular_frequencies(w, spec.pitch);
  const std::vector<double> ky = fft::angular_frequencies(h, spec.pitch);
  const double s = spec.correlation_length / 2.0;
  std::size_t idx = 0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x, ++idx) {
      const double k2 = kx[static_cast<std::size_t>(x)] * kx[static_cast<std::size_t>(x)] +
                        ky[static_cast<std::size_t>(y)] * ky[static_cast<std::size_t>(y)];
      buf[idx] *= std::exp(-0.5 * k2 * s * s);
    }
  }
  fft::inverse_2d(buf, w, h);

  std::vector<double> v(n);
  double mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    v[i] = buf[i].real();
    mean += v[i];
  }
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (double x : v) var += (x - mean) * (x - mean);
  var /= static_cast<double>(n);
  const double std_dev = std::sqrt(var);
  if (std_dev == 0.0) {
    throw std::invalid_argument(
        "generate_speckle: degenerate noise realization (zero variance)");
  }

  const double target_std = spec.contrast * spec.mean_intensity;
  const double scale = target_std / std_dev;
  double min_value = spec.mean_intensity;
  for (double& x : v) {
    x = spec.mean_intensity + (x - mean) * scale;
    if (x < min_value) min_value = x;
  }
  if (min_value <= 0.0) {
    throw std::invalid_argument(
        "generate_speckle: contrast too high to keep all intensities positive "
        "for this realization");
  }
  return ScalarField(w, h, spec.pitch, std::move(v));
}

ScalarField gaussian_phase_phantom(int width, int height, double pitch,
                                   double amplitude_rad, double sigma_m,
                                   double center_x_m, double center_y_m) {
  if (sigma_m < 4.0 * pitch) {
    throw std::invalid_argument(
        "gaussian_phase_phantom: sigma must be >= 4*pitch");
  }
  return gaussian_blob(width, height, pitch, amplitude_rad, sigma_m,
                       center_x_m, center_y_m, /*laplacian=*/false);
}

ScalarField gaussian_phantom_laplacian(int width, int height, double pitch,
                                       double amplitude_rad, double sigma_m,
                                       double center_x_m, double center_y_m) {
  if (sigma_m < 4.0 * pitch) {
    throw std::invalid_argument(
        "gaussian_phantom_laplacian: sigma must be >= 4*pitch");
  }
  return gaussian_blob(width, height, pitch, amplitude_rad, sigma_m,
                       center_x_m, center_y_m, /*laplacian=*/true);
}

ScalarField smooth_diffusion_phantom(int width, int height, double pitch,
                                     double peak_m, double sigma_m,
                                     double center_x_m, double center_y_m) {
  if (sigma_m < 8.0 * pitch) {
    throw std::invalid_argument(
        "smooth_diffusion_phantom: sigma must be >= 8*pitch to stay slowly "
        "varying");
  }
  if (peak_m < 0.0) {
    throw std::invalid_argument("smooth_diffusion_phantom: peak must be >= 0");
  }
  return gaussian_blob(width, height, pitch, peak_m, sigma_m, center_x_m,
                       center_y_m, /*laplacian=*/false);
}

}  // namespace mist
