#pragma once

#include "mist/field.hpp"

namespace mist {

enum class StencilKind { five_point_fd, spectral_fourier };
enum class BoundaryRule { mirror, periodic };

/// Discretization policy for the differential operators. The spectral
/// flavour implies a periodic boundary; constructing it with a mirror
/// boundary throws.
class StencilScheme {
public:
  StencilScheme(StencilKind kind, BoundaryRule boundary);

  static StencilScheme fd_mirror() {
    return {StencilKind::five_point_fd, BoundaryRule::mirror};
  }
  static StencilScheme fd_periodic() {
    return {StencilKind::five_point_fd, BoundaryRule::periodic};
  }
  static StencilScheme spectral() {
    return {StencilKind::spectral_fourier, BoundaryRule::periodic};
  }

  StencilKind kind() const noexcept { return kind_; }
  BoundaryRule boundary() const noexcept { return boundary_; }

private:
  StencilKind kind_;
  BoundaryRule boundary_;
};

struct GradientPair {
  ScalarField dx;
  ScalarField dy;
};

// All operators preserve the input dimensions: edge rows/columns use
// mirror-reflected or wrapped ghost cells instead of being excluded.
// Output units are input units times 1/m (gradient) or 1/m^2 (second
// derivatives). Finite-difference flavours are central differences;
// the spectral flavour multiplies by the exact Fourier symbols, with
// first-derivative factors zeroed on the (sign-ambiguous) Nyquist bin so
// that laplacian == divergence(gradient) holds identically in Fourier
// space and the forward-model correction terms telescope to zero under
// summation.

GradientPair gradient(const ScalarField& f, const StencilScheme& scheme);
ScalarField laplacian(const ScalarField& f, const StencilScheme& scheme);
ScalarField second_derivative_x(const ScalarField& f, const StencilScheme& scheme);
ScalarField second_derivative_y(const ScalarField& f, const StencilScheme& scheme);
ScalarField mixed_derivative(const ScalarField& f, const StencilScheme& scheme);

/// d(fx)/dx + d(fy)/dy with the same first-derivative stencils as gradient().
ScalarField divergence(const ScalarField& fx, const ScalarField& fy,
                       const StencilScheme& scheme);

}  // namespace mist
