// Regime classification and the conformal-map parameters (r, alpha) for the
// potential family (1/T)(|z|^(2n) - t z^d - conj(t) conj(z)^d).
//
// The reduced one-fold problem has an exterior map f(u) = r u (1 - a/u)^(d/n)
// while the coupling |t| stays below the threshold t_cr; above it the support
// detaches from the origin and f picks up a Blaschke factor. The radius r
// solves
//     y(r) = r^(4n/d-2) - (T/n) r^(2n/d-2) + ((n-d)/n)(d/n)^2 |t|^2 = 0
// on a branch keeping |alpha| < 1, with alpha = -(d/n) conj(t) r^(-(2n-d)/d).
// The cases d = n (disk) and d = 2n (ellipse) have affine/quadratic maps and
// never touch the y(r) machinery.
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "equilib/types.hpp"

namespace equilib {

inline constexpr double tau_reg = 1e-10;   // relative band for |t| ~ t_cr classification
inline constexpr double tau_root = 1e-12;  // scale-free residual bound for solved radii

enum class Regime { pre_critical, critical, post_critical, disk_special, ellipse_special };
enum class Branch { plus, unique_root, explicit_form, na };

struct MapParams {
  ProblemSpec spec;
  Regime regime = Regime::pre_critical;
  double r = 0.0;
  cplx alpha{0.0, 0.0};
  double t_cr = 0.0;  // +infinity when d = 2n (the ellipse never detaches)
  double residual = 0.0;
  Branch branch = Branch::na;
};

// t_cr = (n/d) (T/(2n-d))^((2n-d)/(2n)); defined for d < 2n (including d = n,
// where it marks the origin leaving the disk support).
inline double critical_threshold(const ProblemSpec& ps) {
  if (ps.d == 2 * ps.n) {
    throw error(errc::degenerate_case, "t_cr is undefined for d = 2n");
  }
  const double n = ps.n;
  const double d = ps.d;
  const double twond = 2.0 * n - d;
  return (n / d) * std::pow(ps.T / twond, twond / (2.0 * n));
}

inline double critical_radius(const ProblemSpec& ps) {
  const double n = ps.n;
  const double d = ps.d;
  return std::pow(ps.T / (2.0 * n - d), d / (2.0 * n));
}

// The three terms of y(r); y = leading - middle + constant.
struct RadiusEquationTerms {
  double leading;
  double middle;
  double constant;
  double value() const { return leading - middle + constant; }
  double scale() const {
    return std::max({std::abs(leading), std::abs(middle), std::abs(constant),
                     std::numeric_limits<double>::min()});
  }
};

inline RadiusEquationTerms radius_equation_terms(const ProblemSpec& ps, double r) {
  const double n = ps.n;
  const double d = ps.d;
  RadiusEquationTerms t{};
  t.leading = std::pow(r, 4.0 * n / d - 2.0);
  t.middle = (ps.T / n) * std::pow(r, 2.0 * n / d - 2.0);
  t.constant = ((n - d) / n) * (d / n) * (d / n) * std::norm(ps.t);
  return t;
}

inline double radius_equation(const ProblemSpec& ps, double r) {
  return radius_equation_terms(ps, r).value();
}

inline double radius_equation_scaled(const ProblemSpec& ps, double r) {
  const auto t = radius_equation_terms(ps, r);
  return t.value() / t.scale();
}

inline double radius_equation_deriv(const ProblemSpec& ps, double r) {
  const double n = ps.n;
  const double d = ps.d;
  const double e1 = 4.0 * n / d - 2.0;
  const double e2 = 2.0 * n / d - 2.0;
  return e1 * std::pow(r, e1 - 1.0) - (ps.T / n) * e2 * std::pow(r, e2 - 1.0);
}

inline cplx alpha_from_r_pre(const ProblemSpec& ps, double r) {
  const double n = ps.n;
  const double d = ps.d;
  return -(d / n) * std::conj(ps.t) * std::pow(r, -(2.0 * n - d) / d);
}

// Solves y(r) = 0 on the branch compatible with |alpha| <= 1.
//
// For 0 < d < n the two positive roots straddle the minimum of y at
// r_min = ((T/n)(n-d)/(2n-d))^(d/2n); the larger root lives in
// (r_min, (T/n)^(d/2n)) and is the admissible one. For n < d < 2n the root is
// unique and lives in ((T/n)^(d/2n), r_cr].
inline double solve_conformal_radius_pre(const ProblemSpec& ps) {
  const double n = ps.n;
  const double d = ps.d;
  if (ps.d == ps.n || ps.d == 2 * ps.n) {
    throw error(errc::degenerate_case, "radius equation requires 0 < d < n or n < d < 2n");
  }
  const double abs_t = std::abs(ps.t);
  if (abs_t == 0.0) {
    return std::pow(ps.T / n, d / (2.0 * n));  // alpha = 0, unperturbed disk radius
  }

  const double r_zero = std::pow(ps.T / n, d / (2.0 * n));
  double lo, hi;
  if (ps.d < ps.n) {
    lo = std::pow((ps.T / n) * (n - d) / (2.0 * n - d), d / (2.0 * n));
    hi = r_zero;
  } else {
    lo = r_zero;
    hi = critical_radius(ps) * (1.0 + 1e-9);
  }

  double ylo = radius_equation(ps, lo);
  double yhi = radius_equation(ps, hi);
  if (!(ylo < 0.0) || !(yhi > 0.0)) {
    throw error(errc::no_root_in_bracket,
                "no admissible sign change in [" + std::to_string(lo) + ", " + std::to_string(hi) +
                    "]: y(lo)=" + std::to_string(ylo) + ", y(hi)=" + std::to_string(yhi) +
                    ", |t|=" + std::to_string(abs_t) +
                    " (expected |t| <= t_cr=" + std::to_string(critical_threshold(ps)) + ")");
  }

  // Bisection bracket maintained around safeguarded Newton steps.
  double x = 0.5 * (lo + hi);
  for (int iter = 0; iter < 200; ++iter) {
    const double fx = radius_equation(ps, x);
    if (fx > 0.0) {
      hi = x;
    } else if (fx < 0.0) {
      lo = x;
    } else {
      break;
    }
    if (std::abs(radius_equation_scaled(ps, x)) < 1e-16) break;
    const double dfx = radius_equation_deriv(ps, x);
    double next = (dfx != 0.0) ? x - fx / dfx : x;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (next == x) break;
    x = next;
    if ((hi - lo) < 1e-16 * hi) break;
  }

  const double residual = std::abs(radius_equation_scaled(ps, x));
  if (residual > tau_root) {
    throw error(errc::no_root_in_bracket,
                "root polish stalled at scaled residual " + std::to_string(residual));
  }
  const double abs_alpha = std::abs(alpha_from_r_pre(ps, x));
  if (abs_alpha > 1.0 + 1e-9) {
    throw error(errc::no_root_in_bracket,
                "bracketed root has |alpha|=" + std::to_string(abs_alpha) +
                    " > 1; |t|=" + std::to_string(abs_t) + " exceeds t_cr=" +
                    std::to_string(critical_threshold(ps)));
  }
  return x;
}

struct PostParams {
  double r;
  cplx alpha;
};

// Explicit post-critical parameters: both the normalization and the
// deformation condition hold in closed form once beta = 1/conj(alpha).
inline PostParams post_params(const ProblemSpec& ps) {
  if (ps.d == ps.n || ps.d == 2 * ps.n) {
    throw error(errc::not_post_critical, "post-critical formulas require 0 < d < n or n < d < 2n");
  }
  const double abs_t = std::abs(ps.t);
  const double tcr = critical_threshold(ps);
  if (!(abs_t > tcr * (1.0 - tau_reg))) {
    throw error(errc::not_post_critical,
                "|t|=" + std::to_string(abs_t) + " is not above t_cr=" + std::to_string(tcr));
  }
  const double n = ps.n;
  const double d = ps.d;
  const double twond = 2.0 * n - d;
  const double scale = std::sqrt(ps.T / twond);
  const double q = (d / n) * abs_t;
  PostParams out{};
  out.r = scale * std::pow(q, (d - n) / twond);
  out.alpha = -(std::conj(ps.t) / abs_t) * scale * std::pow(q, -n / twond);
  return out;
}

// Residuals of the post-critical normalization/deformation conditions,
// relative where a natural scale exists. Used as the stored diagnostic.
inline double post_condition_residual(const ProblemSpec& ps, double r, cplx alpha) {
  const double n = ps.n;
  const double d = ps.d;
  const double aa = std::abs(alpha);
  const double mass = (n / ps.T) * std::pow(r, 2.0 * n / d) * ((2.0 * n - d) / n) *
                      std::pow(aa, 2.0 - 2.0 * n / d);
  const cplx t_back =
      -(n / d) * std::pow(r, 2.0 * n / d - 1.0) * std::pow(aa, -2.0 * n / d) * std::conj(alpha);
  const double def_res = std::abs(t_back - ps.t) / std::max(std::abs(ps.t), 1e-300);
  return std::max(std::abs(mass - 1.0), def_res);
}

// Regime dispatcher. The special degrees d = n and d = 2n are resolved before
// the general-coupling machinery, whose formulas divide by (d - n) or
// (2n - d).
inline MapParams solve(const ProblemSpec& ps) {
  validate(ps);
  MapParams mp;
  mp.spec = ps;
  const double n = ps.n;
  const double abs_t = std::abs(ps.t);

  if (ps.d == ps.n) {
    mp.regime = Regime::disk_special;
    mp.r = std::sqrt(ps.T / n);
    mp.alpha = -std::conj(ps.t) / mp.r;
    mp.t_cr = critical_threshold(ps);  // where the origin crosses the disk rim
    mp.residual = 0.0;
    mp.branch = Branch::na;
    return mp;
  }
  if (ps.d == 2 * ps.n) {
    mp.regime = Regime::ellipse_special;
    mp.r = ps.T / (n * (1.0 - 4.0 * std::norm(ps.t)));
    mp.alpha = -2.0 * std::conj(ps.t);
    mp.t_cr = std::numeric_limits<double>::infinity();
    mp.residual = 0.0;
    mp.branch = Branch::na;
    return mp;
  }

  mp.t_cr = critical_threshold(ps);
  if (abs_t == 0.0) {
    mp.regime = Regime::pre_critical;
    mp.r = std::pow(ps.T / n, ps.d / (2.0 * n));
    mp.alpha = cplx{0.0, 0.0};
    mp.residual = std::abs(radius_equation_scaled(ps, mp.r));
    mp.branch = Branch::explicit_form;
  } else if (std::abs(abs_t - mp.t_cr) <= tau_reg * mp.t_cr) {
    mp.regime = Regime::critical;
    mp.r = critical_radius(ps);
    mp.alpha = -std::conj(ps.t) / abs_t;
    mp.residual = std::abs(radius_equation_scaled(ps, mp.r));
    mp.branch = Branch::explicit_form;
  } else if (abs_t < mp.t_cr) {
    mp.regime = Regime::pre_critical;
    mp.r = solve_conformal_radius_pre(ps);
    mp.alpha = alpha_from_r_pre(ps, mp.r);
    mp.residual = std::abs(radius_equation_scaled(ps, mp.r));
    mp.branch = (ps.d < ps.n) ? Branch::plus : Branch::unique_root;
  } else {
    mp.regime = Regime::post_critical;
    const auto pp = post_params(ps);
    mp.r = pp.r;
    mp.alpha = pp.alpha;
    mp.residual = post_condition_residual(ps, mp.r, mp.alpha);
    mp.branch = Branch::explicit_form;
  }
  return mp;
}

inline const char* regime_name(Regime r) {
  switch (r) {
    case Regime::pre_critical: return "pre-critical";
    case Regime::critical: return "critical";
    case Regime::post_critical: return "post-critical";
    case Regime::disk_special: return "disk-special";
    case Regime::ellipse_special: return "ellipse-special";
  }
  return "unknown";
}

inline const char* branch_name(Branch b) {
  switch (b) {
    case Branch::plus: return "plus";
    case Branch::unique_root: return "unique";
    case Branch::explicit_form: return "explicit";
    case Branch::na: return "na";
  }
  return "unknown";
}

}  // namespace equilib
