#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "mist/diffops.hpp"
#include "mist/field.hpp"
#include "mist/rng.hpp"
#include "mist/synth.hpp"

using namespace mist;

TEST_SUITE_BEGIN("diffops");

namespace {

constexpr double kTau = 2.0 * 3.14159265358979323846;

ScalarField make_field(int w, int h, double pitch,
                       double (*fn)(double, double)) {
  std::vector<double> v(static_cast<std::size_t>(w) * h);
  std::size_t idx = 0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x, ++idx) v[idx] = fn(x * pitch, y * pitch);
  }
  return ScalarField(w, h, pitch, std::move(v));
}

double max_abs(const ScalarField& f) {
  double m = 0.0;
  for (double v : f.values()) m = std::max(m, std::abs(v));
  return m;
}

double max_abs_diff(const ScalarField& a, const ScalarField& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    m = std::max(m, std::abs(a.values()[i] - b.values()[i]));
  }
  return m;
}

ScalarField noisy_field(int w, int h, double pitch, std::uint64_t seed) {
  GaussianSampler g(seed);
  std::vector<double> v(static_cast<std::size_t>(w) * h);
  for (double& x : v) x = g.next();
  return ScalarField(w, h, pitch, std::move(v));
}

}  // namespace

TEST_CASE("spectral scheme requires a periodic boundary") {
  CHECK_THROWS_AS(
      StencilScheme(StencilKind::spectral_fourier, BoundaryRule::mirror),
      std::invalid_argument);
  CHECK_NOTHROW(StencilScheme(StencilKind::spectral_fourier,
                              BoundaryRule::periodic));
}

TEST_CASE("operators reject fields smaller than the stencil support") {
  const ScalarField tiny = ScalarField::constant(2, 2, 1.0, 1.0);
  CHECK_THROWS_AS(gradient(tiny, StencilScheme::fd_mirror()),
                  std::invalid_argument);
  CHECK_THROWS_AS(laplacian(tiny, StencilScheme::fd_mirror()),
                  std::invalid_argument);
  CHECK_THROWS_AS(mixed_derivative(tiny, StencilScheme::spectral()),
                  std::invalid_argument);
}

TEST_CASE("gradient of a constant vanishes, exactly at mirror edges") {
  const ScalarField c = ScalarField::constant(16, 16, 2e-6, 3.25);
  const GradientPair fd = gradient(c, StencilScheme::fd_mirror());
  CHECK(max_abs(fd.dx) == 0.0);
  CHECK(max_abs(fd.dy) == 0.0);
  const GradientPair sp = gradient(c, StencilScheme::spectral());
  CHECK(max_abs(sp.dx) <= 1e-10);
  CHECK(max_abs(sp.dy) <= 1e-10);
}

TEST_CASE("laplacian and mixed derivative annihilate constants") {
  const ScalarField c = ScalarField::constant(12, 9, 1e-6, -7.5);
  CHECK(max_abs(laplacian(c, StencilScheme::fd_mirror())) == 0.0);
  CHECK(max_abs(mixed_derivative(c, StencilScheme::fd_mirror())) == 0.0);
  CHECK(max_abs(second_derivative_x(c, StencilScheme::fd_mirror())) == 0.0);
  CHECK(max_abs(second_derivative_y(c, StencilScheme::fd_mirror())) == 0.0);
}

TEST_CASE("gradient of a linear ramp is exact in the interior") {
  const double a = 3.0;
  const ScalarField f =
      make_field(16, 16, 1e-6, [](double x, double) { return 3.0 * x; });
  const GradientPair g = gradient(f, StencilScheme::fd_mirror());
  for (int y = 1; y < 15; ++y) {
    for (int x = 1; x < 15; ++x) {
      CHECK(g.dx(x, y) == doctest::Approx(a).epsilon(1e-12));
      CHECK(g.dy(x, y) == doctest::Approx(0.0).scale(a).epsilon(1e-12));
    }
  }
}

TEST_CASE("spectral gradient of a sine is the analytic cosine") {
  const int n = 64;
  const double pitch = 2e-6;
  const double length = n * pitch;
  const ScalarField f = make_field(n, n, pitch, [](double x, double) {
    return std::sin(kTau * x / (64 * 2e-6));
  });
  const GradientPair g = gradient(f, StencilScheme::spectral());
  const double k0 = kTau / length;
  double worst = 0.0;
  for (int y = 0; y < n; ++y) {
    for (int x = 0; x < n; ++x) {
      const double expected = k0 * std::cos(kTau * (x * pitch) / length);
      worst = std::max(worst, std::abs(g.dx(x, y) - expected));
    }
  }
  CHECK(worst / k0 < 1e-10);
  CHECK(max_abs(g.dy) / k0 < 1e-12);
}

TEST_CASE("five-point laplacian is exact on quadratics in the interior") {
  const ScalarField f = make_field(16, 16, 1e-6, [](double x, double y) {
    return x * x + y * y;
  });
  const ScalarField lap = laplacian(f, StencilScheme::fd_mirror());
  for (int y = 1; y < 15; ++y) {
    for (int x = 1; x < 15; ++x) {
      CHECK(lap(x, y) == doctest::Approx(4.0).epsilon(1e-9));
    }
  }
}

TEST_CASE("five-point laplacian tracks the analytic Gaussian Laplacian") {
  // Hand oracle: lap phi = A ((r^2/s^4) - 2/s^2) exp(-r^2 / 2 s^2).
  // The peak relative error of the five-point stencil is (pitch/sigma)^2/4:
  // 0.39% at sigma = 8 px, 0.69% at sigma = 6 px.
  const int n = 96;
  const double pitch = 1e-6;
  const double cx = 48 * pitch;
  const double cy = 48 * pitch;

  auto run = [&](double sigma_px) {
    const double s = sigma_px * pitch;
    std::vector<double> phantom(static_cast<std::size_t>(n) * n);
    std::vector<double> analytic(phantom.size());
    std::size_t idx = 0;
    for (int y = 0; y < n; ++y) {
      for (int x = 0; x < n; ++x, ++idx) {
        const double dx = x * pitch - cx;
        const double dy = y * pitch - cy;
        const double r2 = dx * dx + dy * dy;
        const double g = std::exp(-r2 / (2.0 * s * s));
        phantom[idx] = g;
        analytic[idx] = (r2 / (s * s * s * s) - 2.0 / (s * s)) * g;
      }
    }
    const ScalarField f(n, n, pitch, phantom);
    const ScalarField truth(n, n, pitch, analytic);
    const ScalarField lap = laplacian(f, StencilScheme::fd_mirror());
    return max_abs_diff(lap, truth) / max_abs(truth);
  };

  CHECK(run(8.0) < 0.005);
  CHECK(run(6.0) < 0.0075);
}

TEST_CASE("mixed derivative is exact on bilinear fields") {
  const ScalarField xy =
      make_field(16, 16, 1e-6, [](double x, double y) { return x * y; });
  const ScalarField m = mixed_derivative(xy, StencilScheme::fd_mirror());
  for (int y = 1; y < 15; ++y) {
    for (int x = 1; x < 15; ++x) {
      CHECK(m(x, y) == doctest::Approx(1.0).epsilon(1e-9));
    }
  }

  // separable g(x) h(y) with both linear: constant g' h'
  const ScalarField sep = make_field(16, 16, 1e-6, [](double x, double y) {
    return (2.0 * x + 1e-6) * (-3.0 * y + 5e-7);
  });
  const ScalarField ms = mixed_derivative(sep, StencilScheme::fd_mirror());
  for (int y = 1; y < 15; ++y) {
    for (int x = 1; x < 15; ++x) {
      CHECK(ms(x, y) == doctest::Approx(-6.0).epsilon(1e-9));
    }
  }
}

TEST_CASE("spectral mixed derivative of sin*sin is analytic") {
  const int n = 64;
  const double pitch = 2e-6;
  const double length = n * pitch;
  const ScalarField f = make_field(n, n, pitch, [](double x, double y) {
    const double length = 64 * 2e-6;
    return std::sin(kTau * x / length) * std::sin(kTau * y / length);
  });
  const ScalarField m = mixed_derivative(f, StencilScheme::spectral());
  const double k0 = kTau / length;
  double worst = 0.0;
  for (int y = 0; y < n; ++y) {
    for (int x = 0; x < n; ++x) {
      const double expected = k0 * k0 * std::cos(kTau * x * pitch / length) *
                              std::cos(kTau * y * pitch / length);
      worst = std::max(worst, std::abs(m(x, y) - expected));
    }
  }
  CHECK(worst / (k0 * k0) < 1e-10);
}

TEST_CASE("laplacian equals divergence of gradient") {
  // exact identity for the spectral scheme (band-limited input)
  const double pitch = 1e-6;
  const ScalarField smooth = gaussian_phase_phantom(64, 64, pitch, 1.0,
                                                    8 * pitch, 32 * pitch,
                                                    32 * pitch);
  const GradientPair gs = gradient(smooth, StencilScheme::spectral());
  const ScalarField div_s = divergence(gs.dx, gs.dy, StencilScheme::spectral());
  const ScalarField lap_s = laplacian(smooth, StencilScheme::spectral());
  CHECK(max_abs_diff(div_s, lap_s) / max_abs(lap_s) < 1e-10);

  // finite differences agree within discretization error
  const GradientPair gf = gradient(smooth, StencilScheme::fd_mirror());
  const ScalarField div_f = divergence(gf.dx, gf.dy, StencilScheme::fd_mirror());
  const ScalarField lap_f = laplacian(smooth, StencilScheme::fd_mirror());
  CHECK(max_abs_diff(div_f, lap_f) / max_abs(lap_f) < 0.05);
}

TEST_CASE("all operators are linear") {
  const double pitch = 1e-6;
  const ScalarField f = noisy_field(32, 32, pitch, 11);
  const ScalarField g = noisy_field(32, 32, pitch, 12);
  const double a = 1.7;
  const double b = -0.6;
  std::vector<double> combo(f.size());
  for (std::size_t i = 0; i < combo.size(); ++i) {
    combo[i] = a * f.values()[i] + b * g.values()[i];
  }
  const ScalarField fg(32, 32, pitch, std::move(combo));

  auto check_linear = [&](auto op, const StencilScheme& scheme) {
    const ScalarField lhs = op(fg, scheme);
    const ScalarField of = op(f, scheme);
    const ScalarField og = op(g, scheme);
    double worst = 0.0;
    double scale = 0.0;
    for (std::size_t i = 0; i < lhs.size(); ++i) {
      const double rhs = a * of.values()[i] + b * og.values()[i];
      worst = std::max(worst, std::abs(lhs.values()[i] - rhs));
      scale = std::max(scale, std::abs(rhs));
    }
    CHECK(worst <= 1e-12 * scale);
  };

  for (const StencilScheme& scheme :
       {StencilScheme::fd_mirror(), StencilScheme::fd_periodic(),
        StencilScheme::spectral()}) {
    check_linear([](const ScalarField& x, const StencilScheme& s) {
      return laplacian(x, s);
    }, scheme);
    check_linear([](const ScalarField& x, const StencilScheme& s) {
      return mixed_derivative(x, s);
    }, scheme);
    check_linear([](const ScalarField& x, const StencilScheme& s) {
      return gradient(x, s).dx;
    }, scheme);
    check_linear([](const ScalarField& x, const StencilScheme& s) {
      return second_derivative_y(x, s);
    }, scheme);
  }
}

TEST_SUITE_END();
