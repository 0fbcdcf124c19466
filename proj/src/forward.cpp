#include "mist/forward.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "mist/rng.hpp"

namespace mist {

namespace {

void require_consistent(const ScalarField& i_r, const ScalarField& other,
                        const char* name) {
  if (!i_r.same_shape(other)) {
    throw std::invalid_argument(std::string("forward model: ") + name +
                                " does not match the reference dimensions");
  }
}

void require_geometry(const ScalarField& i_r, const Geometry& g) {
  if (std::abs(g.pitch() - i_r.pitch()) >
      1e-9 * std::max(g.pitch(), i_r.pitch())) {
    throw std::invalid_argument(
        "forward model: geometry pitch disagrees with the field pitch");
  }
}

void require_positive_reference(const ScalarField& i_r) {
  if (i_r.min() <= 0.0) {
    throw std::invalid_argument(
        "forward model: reference intensity must be strictly positive");
  }
}

}  // namespace

ScalarField forward_full(const ScalarField& i_r, const ScalarField& phi,
                         const ScalarField& d_eff, const Geometry& g,
                         const StencilScheme& scheme) {
  require_consistent(i_r, phi, "phi");
  require_consistent(i_r, d_eff, "d_eff");
  require_geometry(i_r, g);
  require_positive_reference(i_r);

  const GradientPair gi = gradient(i_r, scheme);
  const GradientPair gp = gradient(phi, scheme);
  const GradientPair gd = gradient(d_eff, scheme);
  const ScalarField lap_i = laplacian(i_r, scheme);
  const ScalarField lap_phi = laplacian(phi, scheme);
  const ScalarField lap_d = laplacian(d_eff, scheme);

  const double coh = g.delta() / g.wave_number();
  const double delta = g.delta();
  std::vector<double> out(i_r.size());
  for (std::size_t p = 0; p < out.size(); ++p) {
    const double ir = i_r.values()[p];
    const double flow = ir * lap_phi.values()[p] +
                        gi.dx.values()[p] * gp.dx.values()[p] +
                        gi.dy.values()[p] * gp.dy.values()[p];
    const double diffusion = d_eff.values()[p] * lap_i.values()[p] +
                             ir * lap_d.values()[p] +
                             2.0 * (gd.dx.values()[p] * gi.dx.values()[p] +
                                    gd.dy.values()[p] * gi.dy.values()[p]);
    out[p] = ir - coh * flow + delta * diffusion;
  }
  return ScalarField(i_r.width(), i_r.height(), i_r.pitch(), std::move(out));
}

ScalarField forward_simplified(const ScalarField& i_r, const ScalarField& phi,
                               const ScalarField& d_eff, const Geometry& g,
                               const StencilScheme& scheme) {
  require_consistent(i_r, phi, "phi");
  require_consistent(i_r, d_eff, "d_eff");
  require_geometry(i_r, g);
  require_positive_reference(i_r);

  const ScalarField lap_i = laplacian(i_r, scheme);
  const ScalarField lap_phi = laplacian(phi, scheme);
  const double coh = g.delta() / g.wave_number();
  const double delta = g.delta();
  std::vector<double> out(i_r.size());
  for (std::size_t p = 0; p < out.size(); ++p) {
    const double ir = i_r.values()[p];
    out[p] = ir - coh * ir * lap_phi.values()[p] +
             delta * d_eff.values()[p] * lap_i.values()[p];
  }
  return ScalarField(i_r.width(), i_r.height(), i_r.pitch(), std::move(out));
}

ScalarField forward_tensor(const ScalarField& i_r, const ScalarField& phi,
                           const ScalarField& d_xx, const ScalarField& d_yy,
                           const ScalarField& d_xy, const Geometry& g,
                           const StencilScheme& scheme) {
  require_consistent(i_r, phi, "phi");
  require_consistent(i_r, d_xx, "d_xx");
  require_consistent(i_r, d_yy, "d_yy");
  require_consistent(i_r, d_xy, "d_xy");
  require_geometry(i_r, g);
  require_positive_reference(i_r);

  const GradientPair gi = gradient(i_r, scheme);
  const GradientPair gp = gradient(phi, scheme);
  const ScalarField lap_phi = laplacian(phi, scheme);

  const ScalarField ixx = second_derivative_x(i_r, scheme);
  const ScalarField iyy = second_derivative_y(i_r, scheme);
  const ScalarField ixy = mixed_derivative(i_r, scheme);

  const GradientPair gxx = gradient(d_xx, scheme);
  const GradientPair gyy = gradient(d_yy, scheme);
  const GradientPair gxy = gradient(d_xy, scheme);
  const ScalarField dxx_xx = second_derivative_x(d_xx, scheme);
  const ScalarField dyy_yy = second_derivative_y(d_yy, scheme);
  const ScalarField dxy_xy = mixed_derivative(d_xy, scheme);

  const double coh = g.delta() / g.wave_number();
  const double delta = g.delta();
  std::vector<double> out(i_r.size());
  for (std::size_t p = 0; p < out.size(); ++p) {
    const double ir = i_r.values()[p];
    const double flow = ir * lap_phi.values()[p] +
                        gi.dx.values()[p] * gp.dx.values()[p] +
                        gi.dy.values()[p] * gp.dy.values()[p];
    // dxx(D_xx I) = D_xx Ixx + I Dxx_xx + 2 dx(D_xx) dx(I)
    const double txx = d_xx.values()[p] * ixx.values()[p] +
                       ir * dxx_xx.values()[p] +
                       2.0 * gxx.dx.values()[p] * gi.dx.values()[p];
    const double tyy = d_yy.values()[p] * iyy.values()[p] +
                       ir * dyy_yy.values()[p] +
                       2.0 * gyy.dy.values()[p] * gi.dy.values()[p];
    // dxy(D_xy I) = D_xy Ixy + I Dxy_xy + dx(D_xy) dy(I) + dy(D_xy) dx(I)
    const double txy = d_xy.values()[p] * ixy.values()[p] +
                       ir * dxy_xy.values()[p] +
                       gxy.dx.values()[p] * gi.dy.values()[p] +
                       gxy.dy.values()[p] * gi.dx.values()[p];
    out[p] = ir - coh * flow + delta * (txx + tyy + txy);
  }
  return ScalarField(i_r.width(), i_r.height(), i_r.pitch(), std::move(out));
}

ScalarField add_noise(const ScalarField& field, std::uint64_t seed,
                      double relative_sigma) {
  if (!std::isfinite(relative_sigma) || relative_sigma < 0.0) {
    throw std::invalid_argument("add_noise: relative_sigma must be >= 0");
  }
  if (relative_sigma == 0.0) return field;
  const double sigma = relative_sigma * std::abs(field.mean());
  GaussianSampler gauss(seed);
  std::vector<double> v = field.values();
  for (double& x : v) x += sigma * gauss.next();
  return ScalarField(field.width(), field.height(), field.pitch(), std::move(v));
}

}  // namespace mist
