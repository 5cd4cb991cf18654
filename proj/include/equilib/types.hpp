// Core problem description and error model shared by all modules.
#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace equilib {

using cplx = std::complex<double>;

// Error categories. The CLI maps these onto exit codes; library code throws.
enum class errc {
  invalid_degrees,
  inadmissible_t,
  nonpositive_temperature,
  degenerate_case,
  no_root_in_bracket,
  not_post_critical,
  branch_point_hit,
  unsupported_evaluation,
  self_intersection,
  quadrature_non_convergent,
  division_by_zero_at_zero,
  atom_hit,
  non_convergence,
  io_failure,
};

inline const char* errc_name(errc c) {
  switch (c) {
    case errc::invalid_degrees: return "InvalidDegrees";
    case errc::inadmissible_t: return "InadmissibleT";
    case errc::nonpositive_temperature: return "NonpositiveT";
    case errc::degenerate_case: return "DegenerateCase";
    case errc::no_root_in_bracket: return "NoRootInBracket";
    case errc::not_post_critical: return "NotPostCritical";
    case errc::branch_point_hit: return "BranchPointHit";
    case errc::unsupported_evaluation: return "UnsupportedEvaluation";
    case errc::self_intersection: return "SelfIntersection";
    case errc::quadrature_non_convergent: return "QuadratureNonConvergent";
    case errc::division_by_zero_at_zero: return "DivisionByZeroAtZero";
    case errc::atom_hit: return "AtomHit";
    case errc::non_convergence: return "NonConvergence";
    case errc::io_failure: return "IoFailure";
  }
  return "Unknown";
}

class error : public std::runtime_error {
 public:
  error(errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  errc code() const { return code_; }

 private:
  errc code_;
};

// Parameters of the potential family
//   V(z) = (1/T) * (|z|^(2n) - t z^d - conj(t) conj(z)^d),
// with positive integers n, d satisfying d <= 2n, temperature T > 0, and a
// complex coupling t (|t| < 1/2 required in the borderline case d = 2n).
struct ProblemSpec {
  int n = 1;
  int d = 1;
  double T = 1.0;
  cplx t{0.0, 0.0};
};

inline void validate(const ProblemSpec& ps) {
  if (ps.n < 1 || ps.d < 1 || ps.d > 2 * ps.n) {
    throw error(errc::invalid_degrees,
                "require n >= 1, d >= 1 and d <= 2n (got n=" + std::to_string(ps.n) +
                    ", d=" + std::to_string(ps.d) + ")");
  }
  if (!(ps.T > 0.0)) {
    throw error(errc::nonpositive_temperature, "require T > 0 (got T=" + std::to_string(ps.T) + ")");
  }
  if (ps.d == 2 * ps.n && !(std::abs(ps.t) < 0.5)) {
    throw error(errc::inadmissible_t,
                "require |t| < 1/2 when d = 2n (got |t|=" + std::to_string(std::abs(ps.t)) + ")");
  }
}

// Integer powers, exact for the |z|^(2k) = norm(z)^k factors used throughout.
inline double pow_int(double x, int k) {
  double acc = 1.0;
  double base = x;
  for (int e = k; e > 0; e >>= 1) {
    if (e & 1) acc *= base;
    base *= base;
  }
  return acc;
}

inline cplx pow_int(cplx x, int k) {
  cplx acc{1.0, 0.0};
  cplx base = x;
  for (int e = k; e > 0; e >>= 1) {
    if (e & 1) acc *= base;
    base *= base;
  }
  return acc;
}

// V(z) and its Wirtinger derivative dV/d(conj z); also used by the gas oracle.
inline double potential_value(const ProblemSpec& ps, cplx z) {
  const double confin = pow_int(std::norm(z), ps.n);
  const double pert = 2.0 * std::real(ps.t * pow_int(z, ps.d));
  return (confin - pert) / ps.T;
}

inline cplx potential_grad_conj(const ProblemSpec& ps, cplx z) {
  const cplx confin = double(ps.n) * pow_int(std::norm(z), ps.n - 1) * z;
  const cplx pert = double(ps.d) * std::conj(ps.t) * pow_int(std::conj(z), ps.d - 1);
  return (confin - pert) / ps.T;
}

// Exterior sampling grid: log-spaced radii in (1, radius_max] plus a finer
// layer hugging the unit circle where the inequality margins degenerate.
struct GridSpec {
  int radii = 32;
  int phases = 128;
  double radius_max = 8.0;
  int near_boundary_radii = 16;
  double near_boundary_band = 0.01;

  std::vector<double> radii_list() const {
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(radii + near_boundary_radii));
    for (int k = 1; k <= near_boundary_radii; ++k) {
      out.push_back(1.0 + near_boundary_band * static_cast<double>(k) /
                              static_cast<double>(near_boundary_radii));
    }
    for (int k = 1; k <= radii; ++k) {
      out.push_back(std::pow(radius_max, static_cast<double>(k) / static_cast<double>(radii)));
    }
    return out;
  }

  std::string describe() const {
    return "log " + std::to_string(radii) + "x" + std::to_string(phases) + " radii in (1," +
           std::to_string(radius_max) + "] + near layer " + std::to_string(near_boundary_radii) +
           " radii in (1," + std::to_string(1.0 + near_boundary_band) + "]";
  }
};

}  // namespace equilib
