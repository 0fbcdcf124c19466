#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "mist/forward.hpp"
#include "mist/synth.hpp"

using namespace mist;

TEST_SUITE_BEGIN("forward");

namespace {

constexpr double kPitch = 5.8e-6;

Geometry paper_geometry() { return Geometry(1.0, 17000.0, kPitch); }

ScalarField speckle(int n, std::uint64_t seed, double contrast = 0.15) {
  SpeckleSpec s;
  s.seed = seed;
  s.width = n;
  s.height = n;
  s.pitch = kPitch;
  s.correlation_length = 4 * kPitch;
  s.mean_intensity = 1.0;
  s.contrast = contrast;
  return generate_speckle(s);
}

ScalarField phase_blob(int n, double amplitude) {
  return gaussian_phase_phantom(n, n, kPitch, amplitude, 0.15 * n * kPitch,
                                (n / 2) * kPitch, (n / 2) * kPitch);
}

ScalarField diffusion_blob(int n, double peak) {
  return smooth_diffusion_phantom(n, n, kPitch, peak, 0.2 * n * kPitch,
                                  (n / 2) * kPitch, (n / 2) * kPitch);
}

double max_abs_diff(const ScalarField& a, const ScalarField& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    m = std::max(m, std::abs(a.values()[i] - b.values()[i]));
  }
  return m;
}

double mean_abs_diff(const ScalarField& a, const ScalarField& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    m += std::abs(a.values()[i] - b.values()[i]);
  }
  return m / static_cast<double>(a.size());
}

/// Independent term-by-term reimplementation of the full forward model with
/// its own mirror-boundary stencils; shares no code with the library path.
ScalarField forward_full_reference(const ScalarField& i_r,
                                   const ScalarField& phi,
                                   const ScalarField& d_eff,
                                   const Geometry& g) {
  const int w = i_r.width();
  const int h = i_r.height();
  const double p = i_r.pitch();
  auto mirror = [](int i, int n) {
    if (i < 0) return -i;
    if (i >= n) return 2 * n - 2 - i;
    return i;
  };
  auto dx = [&](const ScalarField& f, int x, int y) {
    return (f(mirror(x + 1, w), y) - f(mirror(x - 1, w), y)) / (2.0 * p);
  };
  auto dy = [&](const ScalarField& f, int x, int y) {
    return (f(x, mirror(y + 1, h)) - f(x, mirror(y - 1, h))) / (2.0 * p);
  };
  auto lap = [&](const ScalarField& f, int x, int y) {
    return (f(mirror(x + 1, w), y) + f(mirror(x - 1, w), y) +
            f(x, mirror(y + 1, h)) + f(x, mirror(y - 1, h)) - 4.0 * f(x, y)) /
           (p * p);
  };
  std::vector<double> out(i_r.size());
  const double coh = g.delta() / g.wave_number();
  std::size_t idx = 0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x, ++idx) {
      const double flow = i_r(x, y) * lap(phi, x, y) +
                          dx(i_r, x, y) * dx(phi, x, y) +
                          dy(i_r, x, y) * dy(phi, x, y);
      const double diff = d_eff(x, y) * lap(i_r, x, y) +
                          i_r(x, y) * lap(d_eff, x, y) +
                          2.0 * (dx(d_eff, x, y) * dx(i_r, x, y) +
                                 dy(d_eff, x, y) * dy(i_r, x, y));
      out[idx] = i_r(x, y) - coh * flow + g.delta() * diff;
    }
  }
  return ScalarField(w, h, p, std::move(out));
}

}  // namespace

TEST_CASE("constant phase and zero diffusion leave the reference untouched") {
  const int n = 64;
  const ScalarField i_r = speckle(n, 5);
  const ScalarField phi = ScalarField::constant(n, n, kPitch, 0.75);
  const ScalarField d0 = ScalarField::zero(n, n, kPitch);
  const Geometry g = paper_geometry();

  const ScalarField fd =
      forward_full(i_r, phi, d0, g, StencilScheme::fd_mirror());
  CHECK(max_abs_diff(fd, i_r) == 0.0);

  const ScalarField sp = forward_full(i_r, phi, d0, g, StencilScheme::spectral());
  CHECK(max_abs_diff(sp, i_r) <= 1e-12);
}

TEST_CASE("zero phase and uniform diffusion collapse to the laplacian term") {
  const int n = 64;
  const double d = 3e-11;
  const ScalarField i_r = speckle(n, 6);
  const ScalarField phi0 = ScalarField::zero(n, n, kPitch);
  const ScalarField du = ScalarField::constant(n, n, kPitch, d);
  const Geometry g = paper_geometry();
  const StencilScheme scheme = StencilScheme::fd_mirror();

  const ScalarField i_s = forward_full(i_r, phi0, du, g, scheme);
  const ScalarField lap_i = laplacian(i_r, scheme);
  double worst = 0.0;
  for (std::size_t i = 0; i < i_s.size(); ++i) {
    const double expected = i_r.values()[i] + g.delta() * d * lap_i.values()[i];
    worst = std::max(worst, std::abs(i_s.values()[i] - expected));
  }
  CHECK(worst <= 1e-12 * i_r.mean());
}

TEST_CASE("full model matches an independent term-by-term implementation") {
  const int n = 128;
  const ScalarField i_r = speckle(n, 7);
  const ScalarField phi = phase_blob(n, 2.0);
  const ScalarField d = diffusion_blob(n, 2e-11);
  const Geometry g = paper_geometry();

  const ScalarField i_s = forward_full(i_r, phi, d, g, StencilScheme::fd_mirror());
  const ScalarField ref = forward_full_reference(i_r, phi, d, g);
  CHECK(max_abs_diff(i_s, ref) / i_r.mean() < 1e-12);

  // the sample differs from the reference but stays finite and positive
  CHECK(mean_abs_diff(i_s, i_r) / i_r.mean() > 0.0);
  CHECK(i_s.min() > 0.0);
}

TEST_CASE("simplified model identities") {
  const int n = 64;
  const Geometry g = paper_geometry();
  const StencilScheme scheme = StencilScheme::fd_mirror();

  const ScalarField i_r = speckle(n, 8);
  const ScalarField zero = ScalarField::zero(n, n, kPitch);
  CHECK(max_abs_diff(forward_simplified(i_r, zero, zero, g, scheme), i_r) == 0.0);

  // uniform reference: lap(I_R) = 0, so I_S = c (1 - (delta/k) lap phi)
  const double c = 2.0;
  const ScalarField uniform = ScalarField::constant(n, n, kPitch, c);
  const ScalarField phi = phase_blob(n, 1.5);
  const ScalarField d = diffusion_blob(n, 2e-11);
  const ScalarField i_s = forward_simplified(uniform, phi, d, g, scheme);
  const ScalarField lap_phi = laplacian(phi, scheme);
  double worst = 0.0;
  for (std::size_t i = 0; i < i_s.size(); ++i) {
    const double expected =
        c * (1.0 - g.delta() / g.wave_number() * lap_phi.values()[i]);
    worst = std::max(worst, std::abs(i_s.values()[i] - expected));
  }
  CHECK(worst <= 1e-14 * c);
}

TEST_CASE("full and simplified models differ on textured references") {
  const int n = 128;
  const Geometry g = paper_geometry();
  const StencilScheme scheme = StencilScheme::fd_mirror();
  const ScalarField i_r = speckle(n, 9);
  const ScalarField phi = phase_blob(n, 2.0);

  // mean gap over the phantom support, so blob area does not confound it
  auto gap_for_sigma = [&](double sigma_px) {
    const ScalarField d = smooth_diffusion_phantom(
        n, n, kPitch, 2e-11, sigma_px * kPitch, (n / 2) * kPitch,
        (n / 2) * kPitch);
    const ScalarField full = forward_full(i_r, phi, d, g, scheme);
    const ScalarField simp = forward_simplified(i_r, phi, d, g, scheme);
    double sum = 0.0;
    int count = 0;
    for (int y = 0; y < n; ++y) {
      for (int x = 0; x < n; ++x) {
        if (d(x, y) < 0.25 * d.max()) continue;
        sum += std::abs(full(x, y) - simp(x, y));
        ++count;
      }
    }
    return sum / count;
  };

  // reported, not bounded; the gap grows as the diffusion map roughens
  const double smooth_gap = gap_for_sigma(48.0);
  const double rough_gap = gap_for_sigma(12.0);
  CHECK(smooth_gap > 0.0);
  CHECK(rough_gap > smooth_gap);
}

TEST_CASE("isotropic tensor forward reduces to the full model") {
  const int n = 96;
  const Geometry g = paper_geometry();
  const ScalarField i_r = speckle(n, 10);
  const ScalarField phi = phase_blob(n, 2.0);
  const ScalarField d = diffusion_blob(n, 2e-11);
  const ScalarField zero = ScalarField::zero(n, n, kPitch);

  for (const StencilScheme& scheme :
       {StencilScheme::fd_mirror(), StencilScheme::spectral()}) {
    const ScalarField tens = forward_tensor(i_r, phi, d, d, zero, g, scheme);
    const ScalarField full = forward_full(i_r, phi, d, g, scheme);
    CHECK(max_abs_diff(tens, full) / i_r.mean() < 1e-12);
  }
}

TEST_CASE("zero tensor fields give the phase-only deformation") {
  const int n = 64;
  const Geometry g = paper_geometry();
  const ScalarField i_r = speckle(n, 11);
  const ScalarField phi = phase_blob(n, 2.0);
  const ScalarField zero = ScalarField::zero(n, n, kPitch);
  const ScalarField tens =
      forward_tensor(i_r, phi, zero, zero, zero, g, StencilScheme::fd_mirror());
  const ScalarField phase_only =
      forward_full(i_r, phi, zero, g, StencilScheme::fd_mirror());
  CHECK(max_abs_diff(tens, phase_only) / i_r.mean() < 1e-14);
}

TEST_CASE("anisotropic diffusion acts only on the matching grating") {
  // 1D gratings: an x-grating has no y curvature, so D_yy does nothing to it
  const int n = 64;
  const Geometry g = paper_geometry();
  const StencilScheme scheme = StencilScheme::fd_mirror();
  std::vector<double> gx(static_cast<std::size_t>(n) * n);
  std::size_t idx = 0;
  for (int y = 0; y < n; ++y) {
    for (int x = 0; x < n; ++x, ++idx) {
      gx[idx] = 1.0 + 0.3 * std::sin(2.0 * kPi * x / 8.0);
    }
  }
  const ScalarField grating_x(n, n, kPitch, std::move(gx));
  const ScalarField phi0 = ScalarField::zero(n, n, kPitch);
  const ScalarField zero = ScalarField::zero(n, n, kPitch);
  const ScalarField d = ScalarField::constant(n, n, kPitch, 3e-11);

  const ScalarField with_dyy =
      forward_tensor(grating_x, phi0, zero, d, zero, g, scheme);
  CHECK(max_abs_diff(with_dyy, grating_x) == 0.0);

  const ScalarField with_dxx =
      forward_tensor(grating_x, phi0, d, zero, zero, g, scheme);
  CHECK(mean_abs_diff(with_dxx, grating_x) / grating_x.mean() > 1e-6);
}

TEST_CASE("forward response is linear in the diffusion map") {
  const int n = 64;
  const Geometry g = paper_geometry();
  const StencilScheme scheme = StencilScheme::fd_mirror();
  const ScalarField i_r = speckle(n, 12);
  const ScalarField phi0 = ScalarField::zero(n, n, kPitch);
  const ScalarField d1 = diffusion_blob(n, 2e-11);
  const ScalarField d2 = smooth_diffusion_phantom(
      n, n, kPitch, 3e-11, 0.3 * n * kPitch, 20 * kPitch, 40 * kPitch);
  const double a = 0.8;
  const double b = -1.3;
  std::vector<double> combo(d1.size());
  for (std::size_t i = 0; i < combo.size(); ++i) {
    combo[i] = a * d1.values()[i] + b * d2.values()[i];
  }
  const ScalarField d_combo(n, n, kPitch, std::move(combo));

  const ScalarField r_combo = forward_full(i_r, phi0, d_combo, g, scheme);
  const ScalarField r1 = forward_full(i_r, phi0, d1, g, scheme);
  const ScalarField r2 = forward_full(i_r, phi0, d2, g, scheme);
  double worst = 0.0;
  for (std::size_t i = 0; i < r_combo.size(); ++i) {
    const double lhs = r_combo.values()[i] - i_r.values()[i];
    const double rhs = a * (r1.values()[i] - i_r.values()[i]) +
                       b * (r2.values()[i] - i_r.values()[i]);
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  CHECK(worst <= 1e-14 * i_r.mean());
}

TEST_CASE("full and tensor models conserve total intensity on periodic grids") {
  // both correction terms are divergences, so their sums telescope to zero;
  // the simplified model drops part of the coherent flow and does not
  const int n = 64;
  const Geometry g = paper_geometry();
  const StencilScheme scheme = StencilScheme::spectral();
  const ScalarField i_r = speckle(n, 21);
  const ScalarField phi = phase_blob(n, 4.0);
  const ScalarField d = diffusion_blob(n, 3e-11);
  const ScalarField zero = ScalarField::zero(n, n, kPitch);

  auto total = [](const ScalarField& f) {
    long double s = 0.0L;
    for (double v : f.values()) s += v;
    return s;
  };
  const long double sum_r = total(i_r);

  const long double full_dev =
      std::abs(total(forward_full(i_r, phi, d, g, scheme)) - sum_r) / sum_r;
  CHECK(static_cast<double>(full_dev) < 1e-10);

  const long double tensor_dev =
      std::abs(total(forward_tensor(i_r, phi, d, d, zero, g, scheme)) - sum_r) /
      sum_r;
  CHECK(static_cast<double>(tensor_dev) < 1e-10);

  const long double simp_dev =
      std::abs(total(forward_simplified(i_r, phi, d, g, scheme)) - sum_r) /
      sum_r;
  CHECK(static_cast<double>(simp_dev) > 1e-8);
}

TEST_CASE("dimension mismatches are rejected") {
  const Geometry g = paper_geometry();
  const ScalarField i_r = speckle(32, 13);
  const ScalarField small_phi = ScalarField::zero(16, 16, kPitch);
  const ScalarField d = ScalarField::zero(32, 32, kPitch);
  CHECK_THROWS_AS(
      forward_full(i_r, small_phi, d, g, StencilScheme::fd_mirror()),
      std::invalid_argument);
}

TEST_CASE("add_noise statistics and determinism") {
  const int n = 256;
  const ScalarField base = speckle(n, 14);

  CHECK(add_noise(base, 99, 0.0).values() == base.values());

  const double rel = 0.01;
  const ScalarField noisy = add_noise(base, 99, rel);
  CHECK(add_noise(base, 99, rel).values() == noisy.values());

  double var = 0.0;
  double mean_diff = 0.0;
  for (std::size_t i = 0; i < base.size(); ++i) {
    const double d = noisy.values()[i] - base.values()[i];
    mean_diff += d;
  }
  mean_diff /= static_cast<double>(base.size());
  for (std::size_t i = 0; i < base.size(); ++i) {
    const double d = noisy.values()[i] - base.values()[i] - mean_diff;
    var += d * d;
  }
  var /= static_cast<double>(base.size());
  const double target = rel * base.mean();
  CHECK(std::abs(std::sqrt(var) - target) <= 0.05 * target);

  // different seeds decorrelate
  const ScalarField noisy2 = add_noise(base, 100, rel);
  double cov = 0.0, v1 = 0.0, v2 = 0.0;
  for (std::size_t i = 0; i < base.size(); ++i) {
    const double a = noisy.values()[i] - base.values()[i];
    const double b = noisy2.values()[i] - base.values()[i];
    cov += a * b;
    v1 += a * a;
    v2 += b * b;
  }
  CHECK(std::abs(cov / std::sqrt(v1 * v2)) < 0.05);

  CHECK_THROWS_AS(add_noise(base, 1, -0.1), std::invalid_argument);
}

TEST_SUITE_END();
