// Command-line front end: solve | boundary | verify | sweep | simulate | render.
//
// Flags override values from an optional JSON config file (--config), which
// in turn overrides built-in defaults. All numeric CSV/JSON output round-trips
// doubles exactly. Exit codes: 0 success, 1 usage error, 2 invalid problem,
// 3 boundary self-intersection, 4 verification failure, 5 gas non-convergence,
// 6 I/O failure.

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "equilib/equilib.hpp"

namespace {

using equilib::cplx;
using nlohmann::json;

struct CommonOpts {
  int n = 2;
  int d = 1;
  double T = 1.0;
  double t_re = 0.0;
  double t_im = 0.0;
  std::string config_path;

  equilib::ProblemSpec spec() const { return {n, d, T, cplx{t_re, t_im}}; }
};

// Registers the shared problem flags on a subcommand and wires up the
// config-file fallback: values present in the JSON config are applied before
// parsing, so explicit flags win.
void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--config", o.config_path, "JSON config file (flags override its values)");
  cmd->add_option("--n", o.n, "confinement degree n (>= 1)");
  cmd->add_option("--d", o.d, "perturbation degree d (1 <= d <= 2n)");
  cmd->add_option("--T", o.T, "temperature/scale T (> 0)");
  cmd->add_option("--t-re", o.t_re, "Re(t)");
  cmd->add_option("--t-im", o.t_im, "Im(t)");
}

// Pre-scan for --config and load defaults before CLI11 parses the real flags.
void load_config_defaults(int argc, char** argv, const std::function<void(const json&)>& apply) {
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::string(argv[i]) == "--config") {
      std::ifstream in(argv[i + 1]);
      if (!in) {
        throw equilib::error(equilib::errc::io_failure,
                             std::string("cannot open config ") + argv[i + 1]);
      }
      json j;
      in >> j;
      apply(j);
      return;
    }
  }
}

template <class T>
void from_config(const json& j, const char* key, T& value) {
  if (j.contains(key)) value = j.at(key).get<T>();
}

int exit_code_for(const equilib::error& e) {
  switch (e.code()) {
    case equilib::errc::invalid_degrees:
    case equilib::errc::inadmissible_t:
    case equilib::errc::nonpositive_temperature:
      return 2;
    case equilib::errc::self_intersection:
      return 3;
    case equilib::errc::non_convergence:
      return 5;
    case equilib::errc::io_failure:
      return 6;
    default:
      return 2;
  }
}

void emit(const std::string& out_path, const std::string& content) {
  if (out_path.empty() || out_path == "-") {
    std::cout << content;
  } else {
    equilib::write_text_file(out_path, content);
  }
}

int cmd_solve(const CommonOpts& common, const std::string& out_path) {
  const equilib::MapParams mp = equilib::solve(common.spec());
  emit(out_path, equilib::params_to_json(mp).dump(2) + "\n");
  return 0;
}

int cmd_boundary(const CommonOpts& common, const std::string& which, int samples,
                 const std::string& format, const std::string& out_reduced,
                 const std::string& out_rotated) {
  const equilib::MapParams mp = equilib::solve(common.spec());
  auto write_curve = [&](const equilib::BoundaryCurve& curve, const std::string& path) {
    std::ostringstream os;
    if (format == "json") {
      json j;
      j["samples_per_component"] = curve.samples_per_component;
      j["regime"] = equilib::regime_name(curve.regime);
      json comps = json::array();
      for (const auto& comp : curve.components) {
        json pts = json::array();
        for (const cplx& z : comp) pts.push_back({{"re", z.real()}, {"im", z.imag()}});
        comps.push_back(pts);
      }
      j["components"] = comps;
      os << j.dump(2) << "\n";
    } else {
      equilib::write_boundary_csv(os, curve);
    }
    emit(path, os.str());
  };
  if (which == "reduced" || which == "both") {
    write_curve(equilib::sample_boundary(equilib::make_reduced_map(mp), samples), out_reduced);
  }
  if (which == "rotated" || which == "both") {
    write_curve(equilib::sample_boundary(equilib::make_rotated_map(mp), samples), out_rotated);
  }
  return 0;
}

int cmd_verify(const CommonOpts& common, const std::string& out_path, double corrupt_alpha,
               int mass_samples, int rays) {
  equilib::MapParams mp = equilib::solve(common.spec());
  if (corrupt_alpha != 1.0) {
    mp.alpha *= corrupt_alpha;  // negative control: breaks the solved conditions
  }
  const auto ctx = equilib::make_field_context(mp);
  equilib::VerifyOptions opt = equilib::default_verify_options(mp);
  if (mass_samples > 0) opt.mass_samples = mass_samples;
  if (rays > 0) opt.rays = rays;
  const auto rep = equilib::verify(ctx, opt);
  emit(out_path, equilib::report_to_json(rep).dump(2) + "\n");
  return rep.pass ? 0 : 4;
}

int cmd_sweep(const CommonOpts& common, const std::string& out_path, int points, double t_phase,
              int mass_samples) {
  equilib::ProblemSpec base = common.spec();
  base.t = cplx{0.0, 0.0};
  equilib::validate(base);
  const double tcr = equilib::critical_threshold(base);

  std::set<double> grid;
  for (int k = 0; k < points; ++k) {
    grid.insert(2.0 * tcr * static_cast<double>(k) / (points - 1));
  }
  for (const double ratio : {0.8, 0.9, 1.0, 1.1, 1.2}) grid.insert(ratio * tcr);

  std::vector<equilib::SweepRow> rows;
  for (const double abs_t : grid) {
    equilib::SweepRow row;
    row.abs_t = abs_t;
    equilib::ProblemSpec ps = base;
    ps.t = std::polar(abs_t, t_phase);
    try {
      const auto mp = equilib::solve(ps);
      const auto ctx = equilib::make_field_context(mp);
      row.regime = equilib::regime_name(mp.regime);
      row.r = mp.r;
      row.abs_alpha = std::abs(mp.alpha);
      const int m = equilib::origin_on_boundary(mp) ? (1 << 14) : mass_samples;
      row.mass_error = std::abs(equilib::mass_contour_integral(ctx, m) - 1.0);
      equilib::GridSpec grid_spec;
      double margin = std::numeric_limits<double>::infinity();
      for (const double rho : grid_spec.radii_list()) {
        for (int j = 0; j < grid_spec.phases; ++j) {
          const double phase = 2.0 * std::numbers::pi * (j + 0.5) / grid_spec.phases;
          margin = std::min(margin, equilib::gap_margin(ctx, std::polar(rho, phase)));
        }
      }
      row.min_margin = margin;
    } catch (const equilib::error& e) {
      row.regime = std::string("error:") + equilib::errc_name(e.code());
    }
    rows.push_back(row);
  }
  std::ostringstream os;
  equilib::write_sweep_csv(os, rows);
  emit(out_path, os.str());
  return 0;
}

int cmd_simulate(const CommonOpts& common, const std::string& out_path,
                 const std::string& report_path, int n_particles, std::uint64_t seed, int max_iter,
                 double eps, int boundary_samples) {
  equilib::GasOptions opt;
  if (max_iter > 0) opt.max_iter = max_iter;
  const auto ens = equilib::minimize_gas(common.spec(), n_particles, seed, opt);

  std::ostringstream os;
  equilib::write_positions_csv(os, ens);
  emit(out_path, os.str());

  const auto mp = equilib::solve(common.spec());
  const auto boundary = equilib::sample_boundary(equilib::make_rotated_map(mp), boundary_samples);
  json j = equilib::ensemble_summary_json(ens);
  j["coverage"] = equilib::support_coverage(ens, boundary, eps);
  j["coverage_eps"] = eps;
  j["boundary_components"] = boundary.components.size();
  emit(report_path, j.dump(2) + "\n");
  return ens.converged ? 0 : 5;
}

int cmd_render(const CommonOpts& common, const std::string& out_path, bool figure_ladder,
               int samples, const std::string& particles_path, double t_phase) {
  if (figure_ladder) {
    const auto ladder = equilib::render_support_ladder(common.n, common.d, common.T,
                                                       {0.8, 0.9, 1.0, 1.1, 1.2}, samples, t_phase);
    emit(out_path, ladder.svg);
    std::ostringstream counts;
    for (std::size_t i = 0; i < ladder.rotated_component_counts.size(); ++i) {
      counts << (i ? "," : "") << ladder.rotated_component_counts[i];
    }
    std::cerr << "rotated component counts: " << counts.str() << "\n";
    return 0;
  }
  const auto mp = equilib::solve(common.spec());
  equilib::SvgPanel left;
  left.curve = equilib::sample_boundary(equilib::make_reduced_map(mp), samples);
  left.label = "reduced support";
  equilib::SvgPanel right;
  right.curve = equilib::sample_boundary(equilib::make_rotated_map(mp), samples);
  right.label = "rotated support";
  if (!particles_path.empty()) {
    std::ifstream in(particles_path);
    if (!in) throw equilib::error(equilib::errc::io_failure, "cannot open " + particles_path);
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      char* end = nullptr;
      (void)std::strtoull(line.c_str(), &end, 10);
      const double re = std::strtod(end + 1, &end);
      const double im = std::strtod(end + 1, &end);
      right.particles.push_back(cplx{re, im});
    }
  }
  emit(out_path, equilib::render_svg({left, right}, 2));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Equilibrium measures for |z|^(2n) - t z^d - conj(t) conj(z)^d potentials"};
  app.require_subcommand(1);

  CommonOpts common;

  // solve
  auto* solve_cmd = app.add_subcommand("solve", "classify the regime and solve (r, alpha)");
  std::string solve_out;
  add_common(solve_cmd, common);
  solve_cmd->add_option("--out", solve_out, "output path (default stdout)");

  // boundary
  auto* boundary_cmd = app.add_subcommand("boundary", "sample support boundaries");
  std::string boundary_which = "both";
  int boundary_samples = 512;
  std::string boundary_format = "csv";
  std::string boundary_out_reduced = "boundary_reduced.csv";
  std::string boundary_out_rotated = "boundary_rotated.csv";
  add_common(boundary_cmd, common);
  boundary_cmd->add_option("--map", boundary_which, "reduced | rotated | both")
      ->check(CLI::IsMember({"reduced", "rotated", "both"}));
  boundary_cmd->add_option("--samples", boundary_samples, "points per component (>= 16)");
  boundary_cmd->add_option("--format", boundary_format, "csv | json")
      ->check(CLI::IsMember({"csv", "json"}));
  boundary_cmd->add_option("--out-reduced", boundary_out_reduced, "reduced boundary output path");
  boundary_cmd->add_option("--out-rotated", boundary_out_rotated, "rotated boundary output path");

  // verify
  auto* verify_cmd = app.add_subcommand("verify", "mass + variational-inequality certificate");
  std::string verify_out;
  double corrupt_alpha = 1.0;
  int verify_mass_samples = 0;
  int verify_rays = 0;
  add_common(verify_cmd, common);
  verify_cmd->add_option("--out", verify_out, "report path (default stdout)");
  verify_cmd->add_option("--corrupt-alpha", corrupt_alpha,
                         "multiply alpha by this factor (negative control)");
  verify_cmd->add_option("--mass-samples", verify_mass_samples, "override mass quadrature points");
  verify_cmd->add_option("--rays", verify_rays, "override number of verification rays");

  // sweep
  auto* sweep_cmd = app.add_subcommand("sweep", "parameter curves over |t| in [0, 2 t_cr]");
  std::string sweep_out;
  int sweep_points = 41;
  double sweep_phase = 0.0;
  int sweep_mass_samples = 4096;
  add_common(sweep_cmd, common);
  sweep_cmd->add_option("--out", sweep_out, "CSV path (default stdout)");
  sweep_cmd->add_option("--points", sweep_points, "grid points (>= 2)")->check(CLI::Range(2, 100000));
  sweep_cmd->add_option("--t-phase", sweep_phase, "fixed phase of t during the sweep");
  sweep_cmd->add_option("--mass-samples", sweep_mass_samples, "mass quadrature points per row");

  // simulate
  auto* sim_cmd = app.add_subcommand("simulate", "discrete Coulomb gas oracle");
  std::string sim_out = "ensemble.csv";
  std::string sim_report;
  int sim_particles = 256;
  std::uint64_t sim_seed = 1;
  int sim_max_iter = 0;
  double sim_eps = 0.02;
  int sim_boundary_samples = 1024;
  add_common(sim_cmd, common);
  sim_cmd->add_option("--out", sim_out, "positions CSV path");
  sim_cmd->add_option("--report", sim_report, "summary JSON path (default stdout)");
  sim_cmd->add_option("--particles", sim_particles, "particle count (16..4096)");
  sim_cmd->add_option("--seed", sim_seed, "PRNG seed");
  sim_cmd->add_option("--max-iter", sim_max_iter, "iteration budget override");
  sim_cmd->add_option("--eps", sim_eps, "coverage tolerance as a fraction of the diameter");
  sim_cmd->add_option("--boundary-samples", sim_boundary_samples, "boundary resolution for coverage");

  // render
  auto* render_cmd = app.add_subcommand("render", "static SVG figures");
  std::string render_out = "figure.svg";
  bool render_ladder = false;
  int render_samples = 1024;
  std::string render_particles;
  double render_phase = 0.0;
  add_common(render_cmd, common);
  render_cmd->add_option("--out", render_out, "SVG output path");
  render_cmd->add_flag("--figure3", render_ladder,
                       "render the five-row |t|/t_cr ladder {0.8,0.9,1.0,1.1,1.2}");
  render_cmd->add_option("--samples", render_samples, "boundary samples per component");
  render_cmd->add_option("--particles-csv", render_particles, "overlay a positions CSV");
  render_cmd->add_option("--t-phase", render_phase, "phase of t");

  try {
    load_config_defaults(argc, argv, [&](const json& j) {
      from_config(j, "n", common.n);
      from_config(j, "d", common.d);
      from_config(j, "T", common.T);
      from_config(j, "t_re", common.t_re);
      from_config(j, "t_im", common.t_im);
      from_config(j, "samples", boundary_samples);
      from_config(j, "samples", render_samples);
      from_config(j, "points", sweep_points);
      from_config(j, "particles", sim_particles);
      from_config(j, "seed", sim_seed);
      from_config(j, "eps", sim_eps);
      from_config(j, "max_iter", sim_max_iter);
    });
  } catch (const equilib::error& e) {
    std::cerr << e.what() << "\n";
    return 6;
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 6;
  }

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve_cmd->parsed()) return cmd_solve(common, solve_out);
    if (boundary_cmd->parsed()) {
      return cmd_boundary(common, boundary_which, boundary_samples, boundary_format,
                          boundary_out_reduced, boundary_out_rotated);
    }
    if (verify_cmd->parsed()) {
      return cmd_verify(common, verify_out, corrupt_alpha, verify_mass_samples, verify_rays);
    }
    if (sweep_cmd->parsed()) {
      return cmd_sweep(common, sweep_out, sweep_points, sweep_phase, sweep_mass_samples);
    }
    if (sim_cmd->parsed()) {
      return cmd_simulate(common, sim_out, sim_report, sim_particles, sim_seed, sim_max_iter,
                          sim_eps, sim_boundary_samples);
    }
    if (render_cmd->parsed()) {
      return cmd_render(common, render_out, render_ladder, render_samples, render_particles,
                        render_phase);
    }
  } catch (const equilib::error& e) {
    std::cerr << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
