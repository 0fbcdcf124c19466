#pragma once

#include "mist/field.hpp"

namespace mist {

/// Options for the spectral Poisson inversion. The additive constant is
/// always fixed by forcing the output mean to zero. mirror_extend evenly
/// extends the input to a 2x-size periodic domain before inversion and
/// crops afterwards; use it for measured (non-periodic) Laplacian maps to
/// suppress wrap-around artifacts.
struct PoissonOptions {
  bool mirror_extend = false;
};

/// Integrates a phase Laplacian to the phase map:
///   phi = -F^-1[ F[lap_phi] / (k_x^2 + k_y^2) ]
/// with the zero-frequency (and zero-symbol) bins set to zero. The input
/// mean is removed implicitly (periodic solvability); the output is exactly
/// zero-mean radians.
ScalarField integrate_phase(const ScalarField& lap_phi,
                            const PoissonOptions& opts = {});

}  // namespace mist
