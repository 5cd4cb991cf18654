// Serialization: JSON for solved parameters and verification reports, CSV
// for curves, sweeps and particle ensembles. Column orders and header names
// are a stability contract; numbers are written with 17 significant digits
// so parsing reproduces the doubles exactly.
#pragma once

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "equilib/conformal.hpp"
#include "equilib/field.hpp"
#include "equilib/oracle.hpp"
#include "equilib/params.hpp"

namespace equilib {

inline std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

inline nlohmann::json params_to_json(const MapParams& mp) {
  nlohmann::json j;
  j["n"] = mp.spec.n;
  j["d"] = mp.spec.d;
  j["T"] = mp.spec.T;
  j["t"] = {{"re", mp.spec.t.real()}, {"im", mp.spec.t.imag()}};
  j["regime"] = regime_name(mp.regime);
  j["branch"] = branch_name(mp.branch);
  if (std::isfinite(mp.t_cr)) {
    j["t_cr"] = mp.t_cr;
  } else {
    j["t_cr"] = nullptr;  // d = 2n: the support never detaches
  }
  j["r"] = mp.r;
  j["alpha"] = {{"re", mp.alpha.real()}, {"im", mp.alpha.imag()}};
  j["abs_alpha"] = std::abs(mp.alpha);
  j["residual"] = mp.residual;
  return j;
}

inline nlohmann::json report_to_json(const VerificationReport& rep) {
  nlohmann::json j;
  j["mass"] = rep.mass;
  j["mass_error"] = rep.mass_error;
  j["min_inequality_margin"] = rep.min_inequality_margin;
  j["min_gradient_margin"] = rep.min_gradient_margin;
  j["grid_spec"] = rep.grid_spec;
  j["pass"] = rep.pass;
  j["mass_tolerance"] = rep.mass_tolerance;
  j["var_tolerance"] = rep.var_tolerance;
  return j;
}

inline nlohmann::json ensemble_summary_json(const ParticleEnsemble& ens) {
  nlohmann::json j;
  j["n_particles"] = ens.positions.size();
  j["energy"] = ens.energy;
  j["grad_norm"] = ens.grad_norm;
  j["iterations"] = ens.iterations;
  j["converged"] = ens.converged;
  j["seed"] = ens.seed;
  return j;
}

// --- boundary curves ------------------------------------------------------

inline void write_boundary_csv(std::ostream& os, const BoundaryCurve& curve) {
  os << "component_id,k,re,im\n";
  for (std::size_t c = 0; c < curve.components.size(); ++c) {
    const auto& comp = curve.components[c];
    for (std::size_t k = 0; k < comp.size(); ++k) {
      os << c << ',' << k << ',' << fmt17(comp[k].real()) << ',' << fmt17(comp[k].imag()) << '\n';
    }
  }
}

inline BoundaryCurve parse_boundary_csv(std::istream& is) {
  BoundaryCurve curve;
  std::string line;
  if (!std::getline(is, line) || line.rfind("component_id", 0) != 0) {
    throw error(errc::io_failure, "missing boundary CSV header");
  }
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::size_t id = 0, k = 0;
    double re = 0.0, im = 0.0;
    char* end = nullptr;
    id = std::strtoull(line.c_str(), &end, 10);
    if (*end != ',') throw error(errc::io_failure, "malformed boundary CSV row: " + line);
    k = std::strtoull(end + 1, &end, 10);
    if (*end != ',') throw error(errc::io_failure, "malformed boundary CSV row: " + line);
    re = std::strtod(end + 1, &end);
    if (*end != ',') throw error(errc::io_failure, "malformed boundary CSV row: " + line);
    im = std::strtod(end + 1, &end);
    while (curve.components.size() <= id) curve.components.emplace_back();
    if (curve.components[id].size() != k) {
      throw error(errc::io_failure, "non-contiguous sample index in boundary CSV");
    }
    curve.components[id].push_back(cplx{re, im});
  }
  if (!curve.components.empty()) {
    curve.samples_per_component = static_cast<int>(curve.components.front().size()) - 1;
  }
  return curve;
}

// --- particle ensembles ----------------------------------------------------

inline void write_positions_csv(std::ostream& os, const ParticleEnsemble& ens) {
  os << "k,re,im\n";
  for (std::size_t k = 0; k < ens.positions.size(); ++k) {
    os << k << ',' << fmt17(ens.positions[k].real()) << ',' << fmt17(ens.positions[k].imag())
       << '\n';
  }
}

// --- parameter sweeps -------------------------------------------------------

struct SweepRow {
  double abs_t = 0.0;
  std::string regime;  // "error:<category>" when the per-point solve failed
  double r = 0.0;
  double abs_alpha = 0.0;
  double mass_error = 0.0;
  double min_margin = 0.0;
};

inline void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  os << "abs_t,regime,r,abs_alpha,mass_error,min_margin\n";
  for (const auto& row : rows) {
    os << fmt17(row.abs_t) << ',' << row.regime << ',' << fmt17(row.r) << ','
       << fmt17(row.abs_alpha) << ',' << fmt17(row.mass_error) << ',' << fmt17(row.min_margin)
       << '\n';
  }
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw error(errc::io_failure, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw error(errc::io_failure, "cannot open " + path + " for writing");
  out << content;
  if (!out) throw error(errc::io_failure, "short write to " + path);
}

}  // namespace equilib
