#include "mist/solver.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <deque>
#include <stdexcept>
#include <string>

#include "mist/errors.hpp"

namespace mist {

namespace {

constexpr int kMinSolverDim = 8;

void require_solver_inputs(const std::vector<SpecklePair>& pairs,
                           const Geometry& g) {
  if (pairs.empty()) {
    throw std::invalid_argument("solver: no speckle pairs given");
  }
  const ScalarField& first = pairs.front().reference();
  if (first.width() < kMinSolverDim || first.height() < kMinSolverDim) {
    throw std::invalid_argument("solver: fields must be at least 8x8");
  }
  for (const SpecklePair& p : pairs) {
    if (!p.reference().same_shape(first)) {
      throw std::invalid_argument(
          "solver: all pairs must share dimensions and pitch");
    }
  }
  if (std::abs(g.pitch() - first.pitch()) >
      1e-9 * std::max(g.pitch(), first.pitch())) {
    throw std::invalid_argument(
        "solver: geometry pitch disagrees with the field pitch");
  }
}

double median_abs(const std::vector<double>& v) {
  std::vector<double> mag(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) mag[i] = std::abs(v[i]);
  auto mid = mag.begin() + static_cast<std::ptrdiff_t>(mag.size() / 2);
  std::nth_element(mag.begin(), mid, mag.end());
  return *mid;
}

/// Fills flagged pixels of every array in `channels` from the nearest valid
/// pixel (multi-source BFS over the 4-neighbourhood). Returns the number of
/// filled pixels; throws if no pixel is valid.
std::size_t fill_degenerate(std::vector<char>& flagged, int width, int height,
                            std::vector<std::vector<double>*> channels) {
  const std::size_t n = flagged.size();
  std::deque<std::size_t> queue;
  std::size_t n_flagged = 0;
  for (std::size_t p = 0; p < n; ++p) {
    if (!flagged[p]) {
      queue.push_back(p);
    } else {
      ++n_flagged;
    }
  }
  if (queue.empty()) {
    throw degenerate_system_error(
        "solver: the inversion is rank-deficient at every pixel");
  }
  if (n_flagged == 0) return 0;

  std::vector<char> visited(n, 0);
  for (std::size_t p : queue) visited[p] = 1;
  while (!queue.empty()) {
    const std::size_t p = queue.front();
    queue.pop_front();
    const int x = static_cast<int>(p % static_cast<std::size_t>(width));
    const int y = static_cast<int>(p / static_cast<std::size_t>(width));
    const std::array<std::array<int, 2>, 4> steps = {
        {{x - 1, y}, {x + 1, y}, {x, y - 1}, {x, y + 1}}};
    for (const auto& s : steps) {
      if (s[0] < 0 || s[0] >= width || s[1] < 0 || s[1] >= height) continue;
      const std::size_t q = static_cast<std::size_t>(s[1]) * width + s[0];
      if (visited[q]) continue;
      visited[q] = 1;
      for (std::vector<double>* ch : channels) (*ch)[q] = (*ch)[p];
      queue.push_back(q);
    }
  }
  return n_flagged;
}

ScalarField mask_field(const std::vector<char>& flagged, int w, int h,
                       double pitch) {
  std::vector<double> m(flagged.size());
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = flagged[i] ? 1.0 : 0.0;
  return ScalarField(w, h, pitch, std::move(m));
}

}  // namespace

ReconstructionResult solve_two_shot(const SpecklePair& p1,
                                    const SpecklePair& p2, const Geometry& g,
                                    const SolverOptions& opts) {
  if (opts.denominator_epsilon < 0.0) {
    throw std::invalid_argument("solver: denominator_epsilon must be >= 0");
  }
  std::vector<SpecklePair> pairs = {p1, p2};
  require_solver_inputs(pairs, g);

  const ScalarField& ir1 = p1.reference();
  const ScalarField& is1 = p1.sample();
  const ScalarField& ir2 = p2.reference();
  const ScalarField& is2 = p2.sample();
  const ScalarField lap1 = laplacian(ir1, opts.scheme);
  const ScalarField lap2 = laplacian(ir2, opts.scheme);

  const int w = ir1.width();
  const int h = ir1.height();
  const std::size_t n = ir1.size();
  const double delta = g.delta();
  const double k = g.wave_number();

  std::vector<double> den(n);
  for (std::size_t p = 0; p < n; ++p) {
    den[p] = ir2.values()[p] * lap1.values()[p] -
             ir1.values()[p] * lap2.values()[p];
  }
  const double den_scale = median_abs(den);
  const double threshold = opts.denominator_epsilon * den_scale;

  std::vector<double> d_eff(n, 0.0);
  std::vector<double> lap_phi(n, 0.0);
  std::vector<char> flagged(n, 0);
  for (std::size_t p = 0; p < n; ++p) {
    if (std::abs(den[p]) <= threshold) {
      flagged[p] = 1;
      continue;
    }
    const double num =
        is1.values()[p] * ir2.values()[p] - is2.values()[p] * ir1.values()[p];
    const double d = num / (delta * den[p]);
    const double lp1 = k * ((ir1.values()[p] - is1.values()[p]) +
                            delta * d * lap1.values()[p]) /
                       (delta * ir1.values()[p]);
    const double lp2 = k * ((ir2.values()[p] - is2.values()[p]) +
                            delta * d * lap2.values()[p]) /
                       (delta * ir2.values()[p]);
    d_eff[p] = d;
    lap_phi[p] = 0.5 * (lp1 + lp2);
  }

  fill_degenerate(flagged, w, h, {&d_eff, &lap_phi});

  // Residuals of both model rows, evaluated with the final (possibly
  // filled) values.
  std::vector<double> residual(n);
  for (std::size_t p = 0; p < n; ++p) {
    const double r1 =
        (ir1.values()[p] - is1.values()[p]) -
        (delta / k * ir1.values()[p] * lap_phi[p] -
         delta * d_eff[p] * lap1.values()[p]);
    const double r2 =
        (ir2.values()[p] - is2.values()[p]) -
        (delta / k * ir2.values()[p] * lap_phi[p] -
         delta * d_eff[p] * lap2.values()[p]);
    residual[p] = std::sqrt(0.5 * (r1 * r1 + r2 * r2));
  }

  const double pitch = ir1.pitch();
  return ReconstructionResult{
      ScalarField(w, h, pitch, std::move(lap_phi)),
      ScalarField(w, h, pitch, std::move(d_eff)),
      std::nullopt,
      ScalarField(w, h, pitch, std::move(residual)),
      mask_field(flagged, w, h, pitch)};
}

ReconstructionResult solve_least_squares(const std::vector<SpecklePair>& pairs,
                                         const Geometry& g,
                                         const SolverOptions& opts) {
  if (opts.denominator_epsilon < 0.0) {
    throw std::invalid_argument("solver: denominator_epsilon must be >= 0");
  }
  if (pairs.size() < 2) {
    throw std::invalid_argument(
        "solve_least_squares: at least two speckle pairs are required");
  }
  require_solver_inputs(pairs, g);

  const std::size_t n_pairs = pairs.size();
  std::vector<ScalarField> laps;
  laps.reserve(n_pairs);
  for (const SpecklePair& p : pairs) {
    laps.push_back(laplacian(p.reference(), opts.scheme));
  }

  const ScalarField& first = pairs.front().reference();
  const int w = first.width();
  const int h = first.height();
  const std::size_t n = first.size();
  const double delta = g.delta();
  const double k = g.wave_number();

  std::vector<double> lap_phi(n, 0.0);
  std::vector<double> d_eff(n, 0.0);
  std::vector<double> score(n, 0.0);
  for (std::size_t p = 0; p < n; ++p) {
    double sa2 = 0.0, sb2 = 0.0, sab = 0.0, say = 0.0, sby = 0.0;
    for (std::size_t i = 0; i < n_pairs; ++i) {
      const double a = delta / k * pairs[i].reference().values()[p];
      const double b = -delta * laps[i].values()[p];
      const double y =
          pairs[i].reference().values()[p] - pairs[i].sample().values()[p];
      sa2 += a * a;
      sb2 += b * b;
      sab += a * b;
      say += a * y;
      sby += b * y;
    }
    const double sa = std::sqrt(sa2);
    const double sb = std::sqrt(sb2);
    if (sa == 0.0 || sb == 0.0) {
      score[p] = 0.0;
      continue;
    }
    const double c = sab / (sa * sb);
    const double det = std::max(1.0 - c * c, 0.0);
    score[p] = det;
    if (det > 0.0) {
      const double r1 = say / sa;
      const double r2 = sby / sb;
      lap_phi[p] = (r1 - c * r2) / det / sa;
      d_eff[p] = (r2 - c * r1) / det / sb;
    }
  }

  const double score_scale = median_abs(score);
  const double eps2 = opts.denominator_epsilon * opts.denominator_epsilon;
  const double threshold = eps2 * score_scale;
  std::vector<char> flagged(n, 0);
  for (std::size_t p = 0; p < n; ++p) {
    if (score[p] <= threshold) flagged[p] = 1;
  }

  fill_degenerate(flagged, w, h, {&d_eff, &lap_phi});

  std::vector<double> residual(n, 0.0);
  for (std::size_t p = 0; p < n; ++p) {
    double ss = 0.0;
    for (std::size_t i = 0; i < n_pairs; ++i) {
      const double a = delta / k * pairs[i].reference().values()[p];
      const double b = -delta * laps[i].values()[p];
      const double y =
          pairs[i].reference().values()[p] - pairs[i].sample().values()[p];
      const double r = y - a * lap_phi[p] - b * d_eff[p];
      ss += r * r;
    }
    residual[p] = std::sqrt(ss / static_cast<double>(n_pairs));
  }

  const double pitch = first.pitch();
  return ReconstructionResult{
      ScalarField(w, h, pitch, std::move(lap_phi)),
      ScalarField(w, h, pitch, std::move(d_eff)),
      std::nullopt,
      ScalarField(w, h, pitch, std::move(residual)),
      mask_field(flagged, w, h, pitch)};
}

namespace {

/// Solves the 4x4 system M z = v by Gaussian elimination with partial
/// pivoting (row swaps). Returns |det(M)|; on exact singularity returns 0
/// and leaves z unspecified.
double solve_4x4(std::array<std::array<double, 4>, 4> m, std::array<double, 4> v,
                 std::array<double, 4>& z) {
  double det = 1.0;
  for (int col = 0; col < 4; ++col) {
    int pivot = col;
    for (int r = col + 1; r < 4; ++r) {
      if (std::abs(m[r][col]) > std::abs(m[pivot][col])) pivot = r;
    }
    if (pivot != col) {
      std::swap(m[pivot], m[col]);
      std::swap(v[pivot], v[col]);
    }
    const double p = m[col][col];
    if (p == 0.0) return 0.0;
    det *= p;
    for (int r = col + 1; r < 4; ++r) {
      const double f = m[r][col] / p;
      if (f == 0.0) continue;
      for (int c = col; c < 4; ++c) m[r][c] -= f * m[col][c];
      v[r] -= f * v[col];
    }
  }
  for (int row = 3; row >= 0; --row) {
    double s = v[row];
    for (int c = row + 1; c < 4; ++c) s -= m[row][c] * z[c];
    z[row] = s / m[row][row];
  }
  return std::abs(det);
}

}  // namespace

TensorResult solve_tensor(const std::vector<SpecklePair>& pairs,
                          const Geometry& g, const SolverOptions& opts) {
  if (opts.denominator_epsilon < 0.0) {
    throw std::invalid_argument("solver: denominator_epsilon must be >= 0");
  }
  if (pairs.size() < 4) {
    throw std::invalid_argument(
        "solve_tensor: at least four speckle pairs are required");
  }
  require_solver_inputs(pairs, g);

  const std::size_t n_pairs = pairs.size();
  std::vector<ScalarField> sxx, syy, sxy;
  sxx.reserve(n_pairs);
  syy.reserve(n_pairs);
  sxy.reserve(n_pairs);
  for (const SpecklePair& p : pairs) {
    sxx.push_back(second_derivative_x(p.reference(), opts.scheme));
    syy.push_back(second_derivative_y(p.reference(), opts.scheme));
    sxy.push_back(mixed_derivative(p.reference(), opts.scheme));
  }

  const ScalarField& first = pairs.front().reference();
  const int w = first.width();
  const int h = first.height();
  const std::size_t n = first.size();
  const double delta = g.delta();
  const double k = g.wave_number();

  std::vector<double> lap_phi(n, 0.0), dxx(n, 0.0), dyy(n, 0.0), dxy(n, 0.0);
  std::vector<double> score(n, 0.0);

  for (std::size_t p = 0; p < n; ++p) {
    std::array<std::array<double, 4>, 4> m{};
    std::array<double, 4> v{};
    for (std::size_t i = 0; i < n_pairs; ++i) {
      const std::array<double, 4> row = {
          delta / k * pairs[i].reference().values()[p],
          -delta * sxx[i].values()[p], -delta * syy[i].values()[p],
          -delta * sxy[i].values()[p]};
      const double y =
          pairs[i].reference().values()[p] - pairs[i].sample().values()[p];
      for (std::size_t r = 0; r < 4; ++r) {
        for (std::size_t c = r; c < 4; ++c) m[r][c] += row[r] * row[c];
        v[r] += row[r] * y;
      }
    }
    for (std::size_t r = 0; r < 4; ++r) {
      for (std::size_t c = 0; c < r; ++c) m[r][c] = m[c][r];
    }

    std::array<double, 4> scale{};
    bool zero_column = false;
    for (std::size_t j = 0; j < 4; ++j) {
      scale[j] = std::sqrt(m[j][j]);
      if (scale[j] == 0.0) zero_column = true;
    }
    if (zero_column) {
      score[p] = 0.0;
      continue;
    }
    for (std::size_t r = 0; r < 4; ++r) {
      for (std::size_t c = 0; c < 4; ++c) m[r][c] /= scale[r] * scale[c];
      v[r] /= scale[r];
    }
    std::array<double, 4> z{};
    const double det = solve_4x4(m, v, z);
    score[p] = det;
    if (det > 0.0) {
      lap_phi[p] = z[0] / scale[0];
      dxx[p] = z[1] / scale[1];
      dyy[p] = z[2] / scale[2];
      dxy[p] = z[3] / scale[3];
    }
  }

  const double score_scale = median_abs(score);
  const double eps2 = opts.denominator_epsilon * opts.denominator_epsilon;
  const double threshold = eps2 * score_scale;
  std::vector<char> flagged(n, 0);
  for (std::size_t p = 0; p < n; ++p) {
    if (score[p] <= threshold) flagged[p] = 1;
  }

  fill_degenerate(flagged, w, h, {&lap_phi, &dxx, &dyy, &dxy});

  std::vector<double> residual(n, 0.0);
  for (std::size_t p = 0; p < n; ++p) {
    double ss = 0.0;
    for (std::size_t i = 0; i < n_pairs; ++i) {
      const double y =
          pairs[i].reference().values()[p] - pairs[i].sample().values()[p];
      const double model = delta / k * pairs[i].reference().values()[p] * lap_phi[p] -
                           delta * (sxx[i].values()[p] * dxx[p] +
                                    syy[i].values()[p] * dyy[p] +
                                    sxy[i].values()[p] * dxy[p]);
      const double r = y - model;
      ss += r * r;
    }
    residual[p] = std::sqrt(ss / static_cast<double>(n_pairs));
  }

  const double pitch = first.pitch();
  return TensorResult{ScalarField(w, h, pitch, std::move(lap_phi)),
                      ScalarField(w, h, pitch, std::move(dxx)),
                      ScalarField(w, h, pitch, std::move(dyy)),
                      ScalarField(w, h, pitch, std::move(dxy)),
                      ScalarField(w, h, pitch, std::move(residual)),
                      mask_field(flagged, w, h, pitch)};
}

double validate_decorrelation(const ScalarField& i_r, const ScalarField& phi,
                              const StencilScheme& scheme) {
  if (!i_r.same_shape(phi)) {
    throw std::invalid_argument(
        "validate_decorrelation: fields must share dimensions and pitch");
  }
  const GradientPair gi = gradient(i_r, scheme);
  const GradientPair gp = gradient(phi, scheme);
  double num = 0.0;
  double den = 0.0;
  for (std::size_t p = 0; p < i_r.size(); ++p) {
    const double ax = gi.dx.values()[p];
    const double ay = gi.dy.values()[p];
    const double bx = gp.dx.values()[p];
    const double by = gp.dy.values()[p];
    num += ax * bx + ay * by;
    den += std::sqrt(ax * ax + ay * ay) * std::sqrt(bx * bx + by * by);
  }
  if (den == 0.0) return 0.0;
  return num / den;
}

}  // namespace mist
