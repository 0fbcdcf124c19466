// mist - multi-modal intrinsic speckle tracking pipeline.
//
// Subcommands:
//   simulate     generate synthetic speckle pairs plus ground truth
//   reconstruct  recover phase Laplacian / dark-field maps from pairs
//   cnr          contrast-to-noise ratio between two ROIs of a field
//
// Exit codes: 0 success, 2 usage error, 3 data/format error,
// 4 degenerate-system error.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mist/errors.hpp"
#include "mist/forward.hpp"
#include "mist/io.hpp"
#include "mist/metrics.hpp"
#include "mist/phase.hpp"
#include "mist/rng.hpp"
#include "mist/solver.hpp"
#include "mist/synth.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitDegenerate = 4;

std::string fmt_g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt_g4(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%#.4g", v);  // keep trailing zeros: 2.500
  return buf;
}

struct SimulateArgs {
  std::uint64_t seed = 1;
  int size = 256;
  double pitch = 5.8e-6;
  double delta = 1.0;
  double energy = 17000.0;
  int n_positions = 2;
  double noise = 0.0;
  std::string mode = "simplified";
  std::string scheme = "five_point_fd";
  std::string boundary = "mirror";
  std::string out_dir;
  double mean_intensity = 1.0;
  double speckle_contrast = 0.15;
  double speckle_correlation_px = 4.0;
  double phase_amplitude = 16.0;
  double phase_sigma_px = 32.0;
  double d_peak = 2e-11;
  double d_sigma_px = 48.0;
  double dxx_peak = 2e-11;
  double dyy_peak = 1e-11;
  double dxy_peak = 0.0;
};

void write_raw(const mist::ScalarField& f, const fs::path& p) {
  mist::write_field(f, {mist::FieldFormat::raw, p});
}

int run_simulate(const SimulateArgs& a) {
  if (a.n_positions < 1) {
    std::cerr << "simulate: --n-positions must be >= 1\n";
    return kExitUsage;
  }
  mist::ForwardMode mode;
  if (a.mode == "full") {
    mode = mist::ForwardMode::full;
  } else if (a.mode == "simplified") {
    mode = mist::ForwardMode::simplified;
  } else if (a.mode == "tensor") {
    mode = mist::ForwardMode::tensor;
  } else {
    std::cerr << "simulate: --mode must be full, simplified or tensor\n";
    return kExitUsage;
  }

  const mist::StencilScheme scheme(mist::parse_stencil_kind(a.scheme),
                                   mist::parse_boundary(a.boundary));
  const mist::Geometry geometry(a.delta, a.energy, a.pitch);

  const int n = a.size;
  const double cx = (n / 2) * a.pitch;
  const double cy = (n / 2) * a.pitch;

  const mist::ScalarField phi = mist::gaussian_phase_phantom(
      n, n, a.pitch, a.phase_amplitude, a.phase_sigma_px * a.pitch, cx, cy);
  const mist::ScalarField lap_phi = mist::laplacian(phi, scheme);

  fs::create_directories(a.out_dir);
  const fs::path out(a.out_dir);

  std::ofstream manifest(out / "manifest.txt");
  if (!manifest) {
    std::cerr << "simulate: cannot write to " << a.out_dir << "\n";
    return kExitData;
  }
  manifest << "command = simulate\n"
           << "seed = " << a.seed << "\n"
           << "size = " << n << "\n"
           << "pitch_m = " << fmt_g17(a.pitch) << "\n"
           << "delta_m = " << fmt_g17(a.delta) << "\n"
           << "energy_ev = " << fmt_g17(a.energy) << "\n"
           << "n_positions = " << a.n_positions << "\n"
           << "noise = " << fmt_g17(a.noise) << "\n"
           << "mode = " << a.mode << "\n"
           << "scheme = " << mist::to_string(scheme.kind()) << "\n"
           << "boundary = " << mist::to_string(scheme.boundary()) << "\n"
           << "mean_intensity = " << fmt_g17(a.mean_intensity) << "\n"
           << "speckle_contrast = " << fmt_g17(a.speckle_contrast) << "\n"
           << "speckle_correlation_px = " << fmt_g17(a.speckle_correlation_px)
           << "\n"
           << "phase_amplitude_rad = " << fmt_g17(a.phase_amplitude) << "\n"
           << "phase_sigma_px = " << fmt_g17(a.phase_sigma_px) << "\n";

  std::vector<mist::ScalarField> d_fields;
  std::vector<std::string> d_names;
  if (mode == mist::ForwardMode::tensor) {
    manifest << "dxx_peak_m = " << fmt_g17(a.dxx_peak) << "\n"
             << "dyy_peak_m = " << fmt_g17(a.dyy_peak) << "\n"
             << "dxy_peak_m = " << fmt_g17(a.dxy_peak) << "\n"
             << "d_sigma_px = " << fmt_g17(a.d_sigma_px) << "\n";
    const double sigma = a.d_sigma_px * a.pitch;
    d_fields.push_back(
        mist::smooth_diffusion_phantom(n, n, a.pitch, a.dxx_peak, sigma, cx, cy));
    d_fields.push_back(
        mist::smooth_diffusion_phantom(n, n, a.pitch, a.dyy_peak, sigma, cx, cy));
    d_fields.push_back(
        mist::smooth_diffusion_phantom(n, n, a.pitch, a.dxy_peak, sigma, cx, cy));
    d_names = {"d_xx", "d_yy", "d_xy"};
  } else {
    manifest << "d_peak_m = " << fmt_g17(a.d_peak) << "\n"
             << "d_sigma_px = " << fmt_g17(a.d_sigma_px) << "\n";
    d_fields.push_back(mist::smooth_diffusion_phantom(
        n, n, a.pitch, a.d_peak, a.d_sigma_px * a.pitch, cx, cy));
    d_names = {"d_eff"};
  }

  mist::SplitMix64 seeder(a.seed);
  double sample_min = 0.0;
  bool first_sample = true;
  for (int i = 0; i < a.n_positions; ++i) {
    const std::uint64_t speckle_seed = seeder.next();
    const std::uint64_t ref_noise_seed = seeder.next();
    const std::uint64_t sam_noise_seed = seeder.next();

    mist::SpeckleSpec spec;
    spec.seed = speckle_seed;
    spec.width = n;
    spec.height = n;
    spec.pitch = a.pitch;
    spec.correlation_length = a.speckle_correlation_px * a.pitch;
    spec.mean_intensity = a.mean_intensity;
    spec.contrast = a.speckle_contrast;
    mist::ScalarField reference = mist::generate_speckle(spec);

    mist::ScalarField sample =
        mode == mist::ForwardMode::full
            ? mist::forward_full(reference, phi, d_fields[0], geometry, scheme)
        : mode == mist::ForwardMode::simplified
            ? mist::forward_simplified(reference, phi, d_fields[0], geometry,
                                       scheme)
            : mist::forward_tensor(reference, phi, d_fields[0], d_fields[1],
                                   d_fields[2], geometry, scheme);

    if (first_sample || sample.min() < sample_min) sample_min = sample.min();
    first_sample = false;

    if (a.noise > 0.0) {
      reference = mist::add_noise(reference, ref_noise_seed, a.noise);
      sample = mist::add_noise(sample, sam_noise_seed, a.noise);
    }

    char ref_name[32], sam_name[32];
    std::snprintf(ref_name, sizeof(ref_name), "ref_%03d.raw", i);
    std::snprintf(sam_name, sizeof(sam_name), "sam_%03d.raw", i);
    write_raw(reference, out / ref_name);
    write_raw(sample, out / sam_name);
    manifest << "reference_" << i << " = " << ref_name << "\n"
             << "sample_" << i << " = " << sam_name << "\n";
  }

  write_raw(phi, out / "phi.raw");
  write_raw(lap_phi, out / "lap_phi.raw");
  manifest << "truth_phi = phi.raw\n"
           << "truth_lap_phi = lap_phi.raw\n";
  for (std::size_t j = 0; j < d_fields.size(); ++j) {
    const std::string name = d_names[j] + ".raw";
    write_raw(d_fields[j], out / name);
    manifest << "truth_" << d_names[j] << " = " << name << "\n";
  }
  manifest << "sample_min = " << fmt_g17(sample_min) << "\n";
  if (sample_min <= 0.0) {
    std::cerr << "simulate: warning: sample intensity reaches "
              << fmt_g17(sample_min)
              << " <= 0; reduce phantom strength or contrast\n";
  }
  return 0;
}

struct ReconstructArgs {
  std::string config;
  std::vector<std::string> refs;
  std::vector<std::string> sams;
  double delta = 1.0;
  double energy = 17000.0;
  double pitch = 5.8e-6;
  double epsilon = 1e-6;
  std::string scheme = "five_point_fd";
  std::string boundary = "mirror";
  std::string out_dir;
  bool tensor = false;
  std::string truth_d;
  std::string truth_lap;
  bool clamp_display = false;
  bool mirror_extend = false;
};

int run_reconstruct(const ReconstructArgs& a) {
  double delta = a.delta;
  double energy = a.energy;
  double pitch = a.pitch;
  double epsilon = a.epsilon;
  mist::StencilScheme scheme = mist::StencilScheme::fd_mirror();
  std::vector<std::pair<fs::path, fs::path>> pair_paths;
  fs::path out_dir;

  if (!a.config.empty()) {
    const mist::RunConfig cfg = mist::read_run_config(a.config);
    delta = cfg.delta_m;
    energy = cfg.energy_ev;
    pitch = cfg.pitch_m;
    epsilon = cfg.epsilon;
    scheme = cfg.scheme;
    pair_paths = cfg.pairs;
    out_dir = a.out_dir.empty() ? cfg.output_dir : fs::path(a.out_dir);
  } else {
    if (a.refs.size() != a.sams.size()) {
      std::cerr << "reconstruct: --ref and --sam counts differ\n";
      return kExitUsage;
    }
    for (std::size_t i = 0; i < a.refs.size(); ++i) {
      pair_paths.emplace_back(a.refs[i], a.sams[i]);
    }
    scheme = mist::StencilScheme(mist::parse_stencil_kind(a.scheme),
                                 mist::parse_boundary(a.boundary));
    if (a.out_dir.empty()) {
      std::cerr << "reconstruct: --out-dir is required\n";
      return kExitUsage;
    }
    out_dir = a.out_dir;
  }

  const std::size_t n_pairs = pair_paths.size();
  const std::size_t min_pairs = a.tensor ? 4 : 2;
  if (n_pairs < min_pairs) {
    std::cerr << "reconstruct: need at least " << min_pairs
              << " reference/sample pairs, got " << n_pairs << "\n";
    return kExitUsage;
  }

  const auto t0 = std::chrono::steady_clock::now();

  std::vector<mist::SpecklePair> pairs;
  pairs.reserve(n_pairs);
  for (std::size_t i = 0; i < n_pairs; ++i) {
    const auto& [ref_path, sam_path] = pair_paths[i];
    mist::ScalarField ref = mist::read_field(
        {mist::format_from_extension(ref_path), ref_path}, pitch);
    mist::ScalarField sam = mist::read_field(
        {mist::format_from_extension(sam_path), sam_path}, pitch);
    pairs.emplace_back(std::move(ref), std::move(sam), std::to_string(i));
  }

  const mist::Geometry geometry(delta, energy, pitch);
  mist::SolverOptions opts;
  opts.denominator_epsilon = epsilon;
  opts.clamp_negative_d = a.clamp_display;
  opts.scheme = scheme;

  fs::create_directories(out_dir);
  std::ofstream report(out_dir / "report.txt");
  if (!report) {
    std::cerr << "reconstruct: cannot write to " << out_dir.string() << "\n";
    return kExitData;
  }

  const mist::PoissonOptions poisson{a.mirror_extend};
  std::string solver_name;
  double degenerate_count = 0.0;
  double residual_mean = 0.0;

  if (a.tensor) {
    solver_name = "tensor";
    mist::TensorResult result = mist::solve_tensor(pairs, geometry, opts);
    const mist::ScalarField phi = mist::integrate_phase(result.lap_phi, poisson);
    write_raw(result.lap_phi, out_dir / "lap_phi.raw");
    write_raw(result.d_xx, out_dir / "d_xx.raw");
    write_raw(result.d_yy, out_dir / "d_yy.raw");
    write_raw(result.d_xy, out_dir / "d_xy.raw");
    write_raw(phi, out_dir / "phi.raw");
    write_raw(result.residual_rms, out_dir / "residual_rms.raw");
    write_raw(result.degenerate, out_dir / "degenerate_mask.raw");
    if (a.clamp_display) {
      write_raw(mist::clamp_nonnegative(result.d_xx),
                out_dir / "d_xx_display.raw");
      write_raw(mist::clamp_nonnegative(result.d_yy),
                out_dir / "d_yy_display.raw");
    }
    degenerate_count = result.degenerate.mean() * result.degenerate.size();
    residual_mean = result.residual_rms.mean();
    report << "d_xx_min = " << fmt_g17(result.d_xx.min()) << "\n"
           << "d_xx_max = " << fmt_g17(result.d_xx.max()) << "\n"
           << "d_yy_min = " << fmt_g17(result.d_yy.min()) << "\n"
           << "d_yy_max = " << fmt_g17(result.d_yy.max()) << "\n";
  } else {
    solver_name = n_pairs == 2 ? "two_shot" : "least_squares";
    mist::ReconstructionResult result =
        n_pairs == 2 ? mist::solve_two_shot(pairs[0], pairs[1], geometry, opts)
                     : mist::solve_least_squares(pairs, geometry, opts);
    result.phi = mist::integrate_phase(result.lap_phi, poisson);
    write_raw(result.lap_phi, out_dir / "lap_phi.raw");
    write_raw(result.d_eff, out_dir / "d_eff.raw");
    write_raw(*result.phi, out_dir / "phi.raw");
    write_raw(result.residual_rms, out_dir / "residual_rms.raw");
    write_raw(result.degenerate, out_dir / "degenerate_mask.raw");
    if (a.clamp_display) {
      write_raw(mist::clamp_nonnegative(result.d_eff),
                out_dir / "d_eff_display.raw");
    }
    degenerate_count = result.degenerate.mean() * result.degenerate.size();
    residual_mean = result.residual_rms.mean();
    report << "d_eff_min = " << fmt_g17(result.d_eff.min()) << "\n"
           << "d_eff_max = " << fmt_g17(result.d_eff.max()) << "\n"
           << "d_eff_mean = " << fmt_g17(result.d_eff.mean()) << "\n"
           << "lap_phi_min = " << fmt_g17(result.lap_phi.min()) << "\n"
           << "lap_phi_max = " << fmt_g17(result.lap_phi.max()) << "\n";

    if (!a.truth_d.empty()) {
      const mist::ScalarField truth = mist::read_field(
          {mist::format_from_extension(a.truth_d), a.truth_d}, pitch);
      report << "d_eff_rms_rel_err = "
             << fmt_g17(mist::rms_relative_error(result.d_eff, truth, 8))
             << "\n";
    }
    if (!a.truth_lap.empty()) {
      const mist::ScalarField truth = mist::read_field(
          {mist::format_from_extension(a.truth_lap), a.truth_lap}, pitch);
      report << "lap_phi_rms_rel_err = "
             << fmt_g17(mist::rms_relative_error(result.lap_phi, truth, 8))
             << "\n";
    }
  }

  const auto t1 = std::chrono::steady_clock::now();
  const double seconds =
      std::chrono::duration_cast<std::chrono::duration<double>>(t1 - t0)
          .count();

  report << "solver = " << solver_name << "\n"
         << "n_pairs = " << n_pairs << "\n"
         << "width = " << pairs.front().reference().width() << "\n"
         << "height = " << pairs.front().reference().height() << "\n"
         << "delta_m = " << fmt_g17(delta) << "\n"
         << "energy_ev = " << fmt_g17(energy) << "\n"
         << "pitch_m = " << fmt_g17(pitch) << "\n"
         << "scheme = " << mist::to_string(scheme.kind()) << "\n"
         << "boundary = " << mist::to_string(scheme.boundary()) << "\n"
         << "epsilon = " << fmt_g17(epsilon) << "\n"
         << "mirror_extend = " << (a.mirror_extend ? 1 : 0) << "\n"
         << "clamp_display = " << (a.clamp_display ? 1 : 0) << "\n"
         << "degenerate_count = " << fmt_g17(degenerate_count) << "\n"
         << "residual_rms_mean = " << fmt_g17(residual_mean) << "\n"
         << "wall_time_s = " << fmt_g17(seconds) << "\n";
  for (std::size_t i = 0; i < n_pairs; ++i) {
    report << "input_pair_" << i << " = " << pair_paths[i].first.string() << " "
           << pair_paths[i].second.string() << "\n";
  }
  if (!a.truth_d.empty()) report << "truth_d = " << a.truth_d << "\n";
  if (!a.truth_lap.empty()) report << "truth_lap = " << a.truth_lap << "\n";
  return 0;
}

struct CnrArgs {
  std::string field;
  std::vector<int> background;
  std::vector<int> feature;
};

int run_cnr(const CnrArgs& a) {
  const fs::path path(a.field);
  const mist::ScalarField field =
      mist::read_field({mist::format_from_extension(path), path});
  const mist::Roi bg{a.background[0], a.background[1], a.background[2],
                     a.background[3]};
  const mist::Roi feat{a.feature[0], a.feature[1], a.feature[2], a.feature[3]};
  const double value = mist::cnr(field, bg, feat);
  const mist::RoiStats bg_stats = mist::roi_stats(field, bg);
  const mist::RoiStats feat_stats = mist::roi_stats(field, feat);
  std::cout << "cnr = " << fmt_g4(value) << "\n"
            << "mu_background = " << fmt_g17(bg_stats.mean) << "\n"
            << "mu_feature = " << fmt_g17(feat_stats.mean) << "\n"
            << "sigma_background = " << fmt_g17(bg_stats.std_dev) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multi-modal intrinsic speckle tracking"};
  app.require_subcommand(1);

  SimulateArgs sim;
  CLI::App* simulate = app.add_subcommand(
      "simulate", "generate synthetic speckle pairs and ground truth");
  simulate->add_option("--seed", sim.seed, "master seed");
  simulate->add_option("--size", sim.size, "square field size in pixels")
      ->check(CLI::PositiveNumber);
  simulate->add_option("--pitch", sim.pitch, "pixel pitch in meters");
  simulate->add_option("--delta", sim.delta, "propagation distance in meters");
  simulate->add_option("--energy", sim.energy, "photon energy in eV");
  simulate->add_option("--n-positions", sim.n_positions,
                       "number of mask positions");
  simulate->add_option("--noise", sim.noise,
                       "relative Gaussian noise sigma (fraction of mean)");
  simulate->add_option("--mode", sim.mode, "full | simplified | tensor");
  simulate->add_option("--scheme", sim.scheme,
                       "five_point_fd | spectral_fourier");
  simulate->add_option("--boundary", sim.boundary, "mirror | periodic");
  simulate->add_option("--out-dir", sim.out_dir, "output directory")
      ->required();
  simulate->add_option("--mean-intensity", sim.mean_intensity,
                       "speckle mean intensity");
  simulate->add_option("--speckle-contrast", sim.speckle_contrast,
                       "speckle std/mean");
  simulate->add_option("--speckle-correlation-px", sim.speckle_correlation_px,
                       "speckle correlation length in pixels");
  simulate->add_option("--phase-amplitude", sim.phase_amplitude,
                       "phase phantom amplitude in radians");
  simulate->add_option("--phase-sigma-px", sim.phase_sigma_px,
                       "phase phantom sigma in pixels");
  simulate->add_option("--d-peak", sim.d_peak,
                       "diffusion phantom peak in meters");
  simulate->add_option("--d-sigma-px", sim.d_sigma_px,
                       "diffusion phantom sigma in pixels");
  simulate->add_option("--dxx-peak", sim.dxx_peak, "tensor D_xx peak (m)");
  simulate->add_option("--dyy-peak", sim.dyy_peak, "tensor D_yy peak (m)");
  simulate->add_option("--dxy-peak", sim.dxy_peak, "tensor D_xy peak (m)");

  ReconstructArgs rec;
  CLI::App* reconstruct = app.add_subcommand(
      "reconstruct", "invert speckle pairs to phase and dark-field maps");
  auto* cfg_opt =
      reconstruct->add_option("--config", rec.config, "run config file");
  reconstruct->add_option("--ref", rec.refs, "reference image (repeatable)")
      ->excludes(cfg_opt);
  reconstruct->add_option("--sam", rec.sams, "sample image (repeatable)")
      ->excludes(cfg_opt);
  reconstruct->add_option("--delta", rec.delta, "propagation distance (m)")
      ->excludes(cfg_opt);
  reconstruct->add_option("--energy", rec.energy, "photon energy (eV)")
      ->excludes(cfg_opt);
  reconstruct->add_option("--pitch", rec.pitch, "pixel pitch (m)")
      ->excludes(cfg_opt);
  reconstruct->add_option("--epsilon", rec.epsilon,
                          "relative degenerate-pixel threshold")
      ->excludes(cfg_opt);
  reconstruct->add_option("--scheme", rec.scheme,
                          "five_point_fd | spectral_fourier")
      ->excludes(cfg_opt);
  reconstruct->add_option("--boundary", rec.boundary, "mirror | periodic")
      ->excludes(cfg_opt);
  reconstruct->add_option("--out-dir", rec.out_dir,
                          "output directory (overrides config output_dir)");
  reconstruct->add_flag("--tensor", rec.tensor,
                        "solve for the directional diffusion tensor (N >= 4)");
  reconstruct->add_option("--truth-d", rec.truth_d,
                          "ground-truth D_eff for error reporting");
  reconstruct->add_option("--truth-lap", rec.truth_lap,
                          "ground-truth phase Laplacian for error reporting");
  reconstruct->add_flag("--clamp-display", rec.clamp_display,
                        "also export display copies clamped to >= 0");
  reconstruct->add_flag("--mirror-extend", rec.mirror_extend,
                        "mirror-extend before phase integration");

  CnrArgs cnr_args;
  CLI::App* cnr_cmd =
      app.add_subcommand("cnr", "contrast-to-noise ratio between two ROIs");
  cnr_cmd->add_option("--field", cnr_args.field, "field file")->required();
  cnr_cmd->add_option("--background", cnr_args.background,
                      "background ROI: x0 y0 w h")
      ->expected(4)
      ->required();
  cnr_cmd->add_option("--feature", cnr_args.feature, "feature ROI: x0 y0 w h")
      ->expected(4)
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (simulate->parsed()) return run_simulate(sim);
    if (reconstruct->parsed()) return run_reconstruct(rec);
    if (cnr_cmd->parsed()) return run_cnr(cnr_args);
  } catch (const mist::degenerate_system_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDegenerate;
  } catch (const mist::format_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return 0;
}
