#include "mist/phase.hpp"

#include <complex>
#include <vector>

#include "mist/fft.hpp"

namespace mist {

namespace {

/// Wavenumbers matching the spectral derivative convention (Nyquist bin of
/// an even-sized axis carries no sign and is treated as zero), so that
/// integrate_phase is the exact inverse of the spectral Laplacian on its
/// representable modes.
std::vector<double> poisson_wavenumbers(int n, double pitch) {
  std::vector<double> k = fft::angular_frequencies(n, pitch);
  if (n % 2 == 0) k[static_cast<std::size_t>(n) / 2] = 0.0;
  return k;
}

std::vector<double> solve_periodic(const std::vector<double>& lap, int w, int h,
                                   double pitch) {
  std::vector<std::complex<double>> buf(lap.begin(), lap.end());
  fft::forward_2d(buf, w, h);
  const std::vector<double> kx = poisson_wavenumbers(w, pitch);
  const std::vector<double> ky = poisson_wavenumbers(h, pitch);
  std::size_t idx = 0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x, ++idx) {
      const double k2 = kx[static_cast<std::size_t>(x)] * kx[static_cast<std::size_t>(x)] +
                        ky[static_cast<std::size_t>(y)] * ky[static_cast<std::size_t>(y)];
      if (k2 > 0.0) {
        buf[idx] /= -k2;
      } else {
        buf[idx] = 0.0;
      }
    }
  }
  fft::inverse_2d(buf, w, h);
  std::vector<double> out(buf.size());
  for (std::size_t i = 0; i < buf.size(); ++i) out[i] = buf[i].real();
  return out;
}

}  // namespace

ScalarField integrate_phase(const ScalarField& lap_phi,
                            const PoissonOptions& opts) {
  const int w = lap_phi.width();
  const int h = lap_phi.height();

  std::vector<double> phi;
  if (!opts.mirror_extend) {
    phi = solve_periodic(lap_phi.values(), w, h, lap_phi.pitch());
  } else {
    // Half-sample even extension (edge duplicated) to a 2w x 2h periodic
    // domain, the standard Neumann-compatible embedding.
    const int w2 = 2 * w;
    const int h2 = 2 * h;
    std::vector<double> ext(static_cast<std::size_t>(w2) * h2);
    for (int y = 0; y < h2; ++y) {
      const int sy = y < h ? y : h2 - 1 - y;
      for (int x = 0; x < w2; ++x) {
        const int sx = x < w ? x : w2 - 1 - x;
        ext[static_cast<std::size_t>(y) * w2 + x] = lap_phi(sx, sy);
      }
    }
    const std::vector<double> sol = solve_periodic(ext, w2, h2, lap_phi.pitch());
    phi.resize(static_cast<std::size_t>(w) * h);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        phi[static_cast<std::size_t>(y) * w + x] =
            sol[static_cast<std::size_t>(y) * w2 + x];
      }
    }
  }

  double mean = 0.0;
  for (double v : phi) mean += v;
  mean /= static_cast<double>(phi.size());
  for (double& v : phi) v -= mean;
  return ScalarField(w, h, lap_phi.pitch(), std::move(phi));
}

}  // namespace mist
