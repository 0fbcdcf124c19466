#pragma once

#include <cstdint>

#include "mist/diffops.hpp"
#include "mist/field.hpp"

namespace mist {

enum class ForwardMode { full, simplified, tensor };

// Forward speckle-deformation models mapping a reference intensity I_R to
// the sample intensity I_S. Sign convention throughout:
//
//   I_R - I_S = (delta/k) * div(I_R grad phi) - delta * <diffusion term>
//
// so a positive phase curvature darkens I_S and positive diffusion
// re-brightens it where the reference curvature is positive. The simulators
// never clip: callers should check min(I_S) > 0 before treating the result
// as a measurable intensity.

/// Full model: the coherent-flow divergence expanded as
/// I_R*lap(phi) + grad(I_R).grad(phi), and the diffusion term expanded by
/// the product rule with no dropped terms:
/// D*lap(I_R) + I_R*lap(D) + 2*grad(D).grad(I_R).
ScalarField forward_full(const ScalarField& i_r, const ScalarField& phi,
                         const ScalarField& d_eff, const Geometry& g,
                         const StencilScheme& scheme);

/// Simplified model (the one the solvers invert):
/// I_S = I_R - (delta/k)*I_R*lap(phi) + delta*D*lap(I_R).
ScalarField forward_simplified(const ScalarField& i_r, const ScalarField& phi,
                               const ScalarField& d_eff, const Geometry& g,
                               const StencilScheme& scheme);

/// Directional model with a symmetric rank-two diffusion tensor:
/// I_S = I_R - (delta/k)*div(I_R grad phi)
///           + delta*[dxx(D_xx I_R) + dyy(D_yy I_R) + dxy(D_xy I_R)].
/// The cross term enters once (no factor 2); the tensor solver uses the
/// same convention so synthetic round trips are self-consistent.
ScalarField forward_tensor(const ScalarField& i_r, const ScalarField& phi,
                           const ScalarField& d_xx, const ScalarField& d_yy,
                           const ScalarField& d_xy, const Geometry& g,
                           const StencilScheme& scheme);

/// Adds zero-mean Gaussian noise with std = relative_sigma * |mean(field)|,
/// deterministic per seed. relative_sigma = 0 returns the field unchanged.
ScalarField add_noise(const ScalarField& field, std::uint64_t seed,
                      double relative_sigma);

}  // namespace mist
