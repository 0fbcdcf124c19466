#include "mist/fft.hpp"

#include <fftw3.h>

#include <stdexcept>

#include "mist/field.hpp"

namespace mist::fft {

namespace {

void transform_2d(std::vector<std::complex<double>>& data, int width,
                  int height, int sign) {
  if (width < 1 || height < 1 ||
      data.size() != static_cast<std::size_t>(width) * height) {
    throw std::invalid_argument("fft: buffer size does not match dimensions");
  }
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_plan plan =
      fftw_plan_dft_2d(height, width, buf, buf, sign, FFTW_ESTIMATE);
  if (plan == nullptr) {
    throw std::runtime_error("fft: plan creation failed");
  }
  fftw_execute(plan);
  fftw_destroy_plan(plan);
}

}  // namespace

void forward_2d(std::vector<std::complex<double>>& data, int width, int height) {
  transform_2d(data, width, height, FFTW_FORWARD);
}

void inverse_2d(std::vector<std::complex<double>>& data, int width, int height) {
  transform_2d(data, width, height, FFTW_BACKWARD);
  const double scale = 1.0 / (static_cast<double>(width) * height);
  for (auto& z : data) z *= scale;
}

std::vector<double> angular_frequencies(int n, double pitch) {
  std::vector<double> k(static_cast<std::size_t>(n));
  const double step = 2.0 * kPi / (n * pitch);
  for (int j = 0; j < n; ++j) {
    const int m = (j <= (n - 1) / 2) ? j : j - n;
    k[static_cast<std::size_t>(j)] = step * m;
  }
  return k;
}

}  // namespace mist::fft
