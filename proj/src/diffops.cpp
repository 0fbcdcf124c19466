#include "mist/diffops.hpp"

#include <complex>
#include <stdexcept>
#include <vector>

#include "mist/fft.hpp"

namespace mist {

namespace {

constexpr int kMinStencilDim = 3;

void require_stencil_support(const ScalarField& f, const char* op) {
  if (f.width() < kMinStencilDim || f.height() < kMinStencilDim) {
    throw std::invalid_argument(std::string(op) +
                                ": field smaller than the 3x3 stencil support");
  }
}

int reflect(int i, int n) {
  if (i < 0) return -i;
  if (i >= n) return 2 * n - 2 - i;
  return i;
}

int wrap(int i, int n) {
  if (i < 0) return i + n;
  if (i >= n) return i - n;
  return i;
}

int ghost(int i, int n, BoundaryRule b) {
  return b == BoundaryRule::mirror ? reflect(i, n) : wrap(i, n);
}

/// Wavenumbers for spectral differentiation: the even-n Nyquist bin has no
/// representable sign, so its first-derivative factor is set to zero. All
/// spectral symbols are built from these, which keeps the operator algebra
/// (laplacian = div o grad, mixed = d_x o d_y) exact in Fourier space.
std::vector<double> derivative_wavenumbers(int n, double pitch) {
  std::vector<double> k = fft::angular_frequencies(n, pitch);
  if (n % 2 == 0) k[static_cast<std::size_t>(n) / 2] = 0.0;
  return k;
}

template <typename Symbol>
ScalarField spectral_apply(const ScalarField& f, Symbol symbol) {
  const int w = f.width();
  const int h = f.height();
  const std::vector<double> kx = derivative_wavenumbers(w, f.pitch());
  const std::vector<double> ky = derivative_wavenumbers(h, f.pitch());

  std::vector<std::complex<double>> buf(f.values().begin(), f.values().end());
  fft::forward_2d(buf, w, h);
  std::size_t idx = 0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x, ++idx) {
      buf[idx] *= symbol(kx[static_cast<std::size_t>(x)],
                         ky[static_cast<std::size_t>(y)]);
    }
  }
  fft::inverse_2d(buf, w, h);

  std::vector<double> out(buf.size());
  for (std::size_t i = 0; i < buf.size(); ++i) out[i] = buf[i].real();
  return ScalarField(w, h, f.pitch(), std::move(out));
}

enum class Axis { x, y };

ScalarField fd_first_derivative(const ScalarField& f, Axis axis,
                                BoundaryRule b) {
  const int w = f.width();
  const int h = f.height();
  const double inv2p = 1.0 / (2.0 * f.pitch());
  std::vector<double> out(f.size());
  std::size_t idx = 0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x, ++idx) {
      double hi, lo;
      if (axis == Axis::x) {
        hi = f(ghost(x + 1, w, b), y);
        lo = f(ghost(x - 1, w, b), y);
      } else {
        hi = f(x, ghost(y + 1, h, b));
        lo = f(x, ghost(y - 1, h, b));
      }
      out[idx] = (hi - lo) * inv2p;
    }
  }
  return ScalarField(w, h, f.pitch(), std::move(out));
}

ScalarField fd_second_derivative(const ScalarField& f, Axis axis,
                                 BoundaryRule b) {
  const int w = f.width();
  const int h = f.height();
  const double invp2 = 1.0 / (f.pitch() * f.pitch());
  std::vector<double> out(f.size());
  std::size_t idx = 0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x, ++idx) {
      double hi, lo;
      if (axis == Axis::x) {
        hi = f(ghost(x + 1, w, b), y);
        lo = f(ghost(x - 1, w, b), y);
      } else {
        hi = f(x, ghost(y + 1, h, b));
        lo = f(x, ghost(y - 1, h, b));
      }
      out[idx] = (hi - 2.0 * f(x, y) + lo) * invp2;
    }
  }
  return ScalarField(w, h, f.pitch(), std::move(out));
}

}  // namespace

StencilScheme::StencilScheme(StencilKind kind, BoundaryRule boundary)
    : kind_(kind), boundary_(boundary) {
  if (kind_ == StencilKind::spectral_fourier &&
      boundary_ != BoundaryRule::periodic) {
    throw std::invalid_argument(
        "StencilScheme: the spectral flavour requires a periodic boundary");
  }
}

GradientPair gradient(const ScalarField& f, const StencilScheme& scheme) {
  require_stencil_support(f, "gradient");
  if (scheme.kind() == StencilKind::five_point_fd) {
    return {fd_first_derivative(f, Axis::x, scheme.boundary()),
            fd_first_derivative(f, Axis::y, scheme.boundary())};
  }
  using namespace std::complex_literals;
  return {spectral_apply(f, [](double kx, double) { return 1i * kx; }),
          spectral_apply(f, [](double, double ky) { return 1i * ky; })};
}

ScalarField second_derivative_x(const ScalarField& f,
                                const StencilScheme& scheme) {
  require_stencil_support(f, "second_derivative_x");
  if (scheme.kind() == StencilKind::five_point_fd) {
    return fd_second_derivative(f, Axis::x, scheme.boundary());
  }
  return spectral_apply(f, [](double kx, double) {
    return std::complex<double>(-kx * kx, 0.0);
  });
}

ScalarField second_derivative_y(const ScalarField& f,
                                const StencilScheme& scheme) {
  require_stencil_support(f, "second_derivative_y");
  if (scheme.kind() == StencilKind::five_point_fd) {
    return fd_second_derivative(f, Axis::y, scheme.boundary());
  }
  return spectral_apply(f, [](double, double ky) {
    return std::complex<double>(-ky * ky, 0.0);
  });
}

ScalarField laplacian(const ScalarField& f, const StencilScheme& scheme) {
  require_stencil_support(f, "laplacian");
  if (scheme.kind() == StencilKind::five_point_fd) {
    const int w = f.width();
    const int h = f.height();
    const BoundaryRule b = scheme.boundary();
    const double invp2 = 1.0 / (f.pitch() * f.pitch());
    std::vector<double> out(f.size());
    std::size_t idx = 0;
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x, ++idx) {
        const double sum = f(ghost(x - 1, w, b), y) + f(ghost(x + 1, w, b), y) +
                           f(x, ghost(y - 1, h, b)) + f(x, ghost(y + 1, h, b));
        out[idx] = (sum - 4.0 * f(x, y)) * invp2;
      }
    }
    return ScalarField(w, h, f.pitch(), std::move(out));
  }
  return spectral_apply(f, [](double kx, double ky) {
    return std::complex<double>(-(kx * kx) - (ky * ky), 0.0);
  });
}

ScalarField mixed_derivative(const ScalarField& f, const StencilScheme& scheme) {
  require_stencil_support(f, "mixed_derivative");
  if (scheme.kind() == StencilKind::five_point_fd) {
    const int w = f.width();
    const int h = f.height();
    const BoundaryRule b = scheme.boundary();
    const double inv4p2 = 1.0 / (4.0 * f.pitch() * f.pitch());
    std::vector<double> out(f.size());
    std::size_t idx = 0;
    for (int y = 0; y < h; ++y) {
      const int yl = ghost(y - 1, h, b);
      const int yh = ghost(y + 1, h, b);
      for (int x = 0; x < w; ++x, ++idx) {
        const int xl = ghost(x - 1, w, b);
        const int xh = ghost(x + 1, w, b);
        out[idx] = (f(xh, yh) - f(xl, yh) - f(xh, yl) + f(xl, yl)) * inv4p2;
      }
    }
    return ScalarField(w, h, f.pitch(), std::move(out));
  }
  return spectral_apply(f, [](double kx, double ky) {
    return std::complex<double>(-kx * ky, 0.0);
  });
}

ScalarField divergence(const ScalarField& fx, const ScalarField& fy,
                       const StencilScheme& scheme) {
  if (!fx.same_shape(fy)) {
    throw std::invalid_argument("divergence: components must share shape");
  }
  require_stencil_support(fx, "divergence");
  ScalarField dxx = scheme.kind() == StencilKind::five_point_fd
                        ? fd_first_derivative(fx, Axis::x, scheme.boundary())
                        : spectral_apply(fx, [](double kx, double) {
                            return std::complex<double>(0.0, kx);
                          });
  ScalarField dyy = scheme.kind() == StencilKind::five_point_fd
                        ? fd_first_derivative(fy, Axis::y, scheme.boundary())
                        : spectral_apply(fy, [](double, double ky) {
                            return std::complex<double>(0.0, ky);
                          });
  std::vector<double> out(dxx.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = dxx.values()[i] + dyy.values()[i];
  }
  return ScalarField(fx.width(), fx.height(), fx.pitch(), std::move(out));
}

}  // namespace mist
