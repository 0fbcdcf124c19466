#pragma once

#include <vector>

#include "mist/diffops.hpp"
#include "mist/field.hpp"

namespace mist {

/// Options shared by the per-pixel inversions.
///
/// denominator_epsilon is relative: a pixel is flagged degenerate when its
/// inversion denominator (two-shot) falls below epsilon times the median
/// absolute denominator, or, for the least-squares paths, when the
/// determinant of the column-equilibrated normal matrix falls below
/// epsilon^2 times its median. Flagged pixels are filled from their nearest
/// valid neighbour (4-connected BFS) and recorded in the result's
/// `degenerate` mask.
///
/// clamp_negative_d never alters stored results; it only marks that display
/// exports should clamp (clamping inside the solver would bias the fit).
struct SolverOptions {
  double denominator_epsilon = 1e-6;
  bool clamp_negative_d = false;
  StencilScheme scheme = StencilScheme::fd_mirror();
};

/// Closed-form two-position inversion. Per pixel:
///   D_eff = (1/delta) * (I_S1 I_R2 - I_S2 I_R1)
///                     / (I_R2 lap(I_R1) - I_R1 lap(I_R2))
/// and lap(phi) by back-substitution into both rows, averaged.
/// Throws degenerate_system_error when every pixel is flagged
/// (e.g. duplicated mask positions).
ReconstructionResult solve_two_shot(const SpecklePair& p1,
                                    const SpecklePair& p2, const Geometry& g,
                                    const SolverOptions& opts = {});

/// N-pair per-pixel least squares (N >= 2): rows
///   [(delta/k) I_Ri, -delta lap(I_Ri)] . [lap_phi, D_eff]^T = I_Ri - I_Si
/// solved through the 2x2 normal equations with column equilibration.
/// residual_rms holds the per-pixel RMS of the N row residuals.
ReconstructionResult solve_least_squares(const std::vector<SpecklePair>& pairs,
                                         const Geometry& g,
                                         const SolverOptions& opts = {});

/// Directional variant (N >= 4): per pixel solves
///   [(delta/k) I_Ri, -delta dxx(I_Ri), -delta dyy(I_Ri), -delta dxy(I_Ri)]
///     . [lap_phi, D_xx, D_yy, D_xy]^T = I_Ri - I_Si
/// in the least-squares sense (4x4 normal equations).
TensorResult solve_tensor(const std::vector<SpecklePair>& pairs,
                          const Geometry& g, const SolverOptions& opts = {});

/// Size of the neglected grad(I_R).grad(phi) coupling, normalized:
///   mean(grad I_R . grad phi) / mean(|grad I_R| |grad phi|), in [-1, 1].
/// Near zero when the reference texture is uncorrelated with the phase;
/// near +-1 when the two gradients align. Returns 0 when either gradient
/// vanishes identically.
double validate_decorrelation(const ScalarField& i_r, const ScalarField& phi,
                              const StencilScheme& scheme);

}  // namespace mist
