// Exterior uniformizing maps and boundary geometry.
//
// Reduced maps (one support component in the symmetry-reduced picture):
//   pre/critical:  f(u) = r u (1 - a/u)^(d/n)
//   post-critical: f(u) = r (u - 1/conj(a)) (1 - a/u)^(d/n - 1)
//   disk (d = n):  f(u) = r u + conj(t)
//   ellipse (d=2n) f(u) = r u (1 + 2 conj(t)/u)^2
// Rotated maps for the full d-fold symmetric potential arise as d-th roots of
// f(u^d); their boundaries are sampled with cumulative phase tracking so the
// fractional powers stay on one sheet along the curve.
#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "equilib/geometry.hpp"
#include "equilib/numerics.hpp"
#include "equilib/params.hpp"
#include "equilib/types.hpp"

namespace equilib {

enum class MapKind { reduced_pre, reduced_post, rotated_pre, rotated_post, disk, ellipse };

struct ConformalMap {
  MapParams params;
  MapKind kind = MapKind::reduced_pre;
};

// True when the support avoids the origin, i.e. the rotated support breaks
// into d components.
inline bool support_splits(const MapParams& mp) {
  switch (mp.regime) {
    case Regime::post_critical: return true;
    case Regime::disk_special: return std::abs(mp.spec.t) > mp.t_cr * (1.0 + tau_reg);
    default: return false;
  }
}

// True when the origin sits exactly on the reduced boundary, which puts a
// fractional zero of f on |u| = 1.
inline bool origin_on_boundary(const MapParams& mp) {
  if (mp.regime == Regime::critical) return true;
  if (mp.regime == Regime::disk_special) {
    return std::abs(std::abs(mp.spec.t) - mp.t_cr) <= tau_reg * mp.t_cr;
  }
  return false;
}

inline ConformalMap make_reduced_map(const MapParams& mp) {
  MapKind k;
  switch (mp.regime) {
    case Regime::disk_special: k = MapKind::disk; break;
    case Regime::ellipse_special: k = MapKind::ellipse; break;
    case Regime::post_critical: k = MapKind::reduced_post; break;
    default: k = MapKind::reduced_pre; break;
  }
  return ConformalMap{mp, k};
}

inline ConformalMap make_rotated_map(const MapParams& mp) {
  return ConformalMap{mp, support_splits(mp) ? MapKind::rotated_post : MapKind::rotated_pre};
}

// All pre-type reduced maps share the shape f = r u (1 - a/u)^p; this view
// lets the disk and ellipse reuse the generic formulas.
struct PreFormView {
  double exponent;
  cplx alpha;
};

inline PreFormView pre_form_view(const MapParams& mp) {
  switch (mp.regime) {
    case Regime::disk_special: return {1.0, -std::conj(mp.spec.t) / mp.r};
    case Regime::ellipse_special: return {2.0, -2.0 * std::conj(mp.spec.t)};
    default: return {double(mp.spec.d) / double(mp.spec.n), mp.alpha};
  }
}

// Reduced map value. The principal branch is safe for |u| >= 1: the base
// 1 - a/u stays in the closed right half plane while |a| <= 1, and the
// post-critical |a| < 1 keeps it away from the cut entirely.
inline cplx eval_f(const ConformalMap& m, cplx u, bool* branch_point = nullptr) {
  if (branch_point != nullptr) *branch_point = false;
  const MapParams& p = m.params;
  const double r = p.r;
  switch (p.regime) {
    case Regime::disk_special:
      return r * u + std::conj(p.spec.t);
    case Regime::ellipse_special: {
      const cplx base = 1.0 + 2.0 * std::conj(p.spec.t) / u;
      return r * u * base * base;
    }
    case Regime::post_critical: {
      const double pw = double(p.spec.d) / double(p.spec.n) - 1.0;
      return r * (u - 1.0 / std::conj(p.alpha)) * std::pow(1.0 - p.alpha / u, pw);
    }
    default: {
      const cplx base = 1.0 - p.alpha / u;
      if (base == cplx{0.0, 0.0}) {
        if (branch_point != nullptr) *branch_point = true;
        return cplx{0.0, 0.0};  // limit value at the boundary zero
      }
      return r * u * std::pow(base, double(p.spec.d) / double(p.spec.n));
    }
  }
}

inline cplx eval_f_prime(const ConformalMap& m, cplx u) {
  const MapParams& p = m.params;
  const double r = p.r;
  switch (p.regime) {
    case Regime::disk_special:
      return cplx{r, 0.0};
    case Regime::ellipse_special: {
      const cplx s = 2.0 * std::conj(p.spec.t) / u;
      return r * (1.0 - s * s);
    }
    case Regime::post_critical: {
      const double pw = double(p.spec.d) / double(p.spec.n) - 1.0;
      const cplx base = 1.0 - p.alpha / u;
      const cplx beta = 1.0 / std::conj(p.alpha);
      return r * std::pow(base, pw - 1.0) * (base + (u - beta) * pw * p.alpha / (u * u));
    }
    default: {
      const double pw = double(p.spec.d) / double(p.spec.n);
      const cplx base = 1.0 - p.alpha / u;
      return r * std::pow(base, pw - 1.0) * (1.0 - (1.0 - pw) * p.alpha / u);
    }
  }
}

// f'(u)/f(u) without evaluating f, stable wherever f != 0.
inline cplx log_deriv_f(const ConformalMap& m, cplx u) {
  const MapParams& p = m.params;
  switch (p.regime) {
    case Regime::disk_special:
      return 1.0 / (u + std::conj(p.spec.t) / p.r);
    case Regime::ellipse_special: {
      const cplx a = -2.0 * std::conj(p.spec.t);
      return 1.0 / u + 2.0 * a / (u * (u - a));
    }
    case Regime::post_critical: {
      const double pw = double(p.spec.d) / double(p.spec.n) - 1.0;
      return 1.0 / (u - 1.0 / std::conj(p.alpha)) + pw * p.alpha / (u * (u - p.alpha));
    }
    default: {
      const double pw = double(p.spec.d) / double(p.spec.n);
      return 1.0 / u + pw * p.alpha / (u * (u - p.alpha));
    }
  }
}

// Rotated map g with g(u)^d = f(u^d) and g(u)/u -> r^(1/d) at infinity.
// Post-critical evaluation is restricted to the unit circle, where the
// boundary parameterization lives; no exterior sheet structure is defined.
inline cplx eval_g_rotated(const ConformalMap& m, cplx u) {
  if (m.kind != MapKind::rotated_pre && m.kind != MapKind::rotated_post) {
    throw error(errc::unsupported_evaluation, "eval_g_rotated requires a rotated map");
  }
  const MapParams& p = m.params;
  const int d = p.spec.d;
  const double n = p.spec.n;
  const cplx w = pow_int(u, d);
  const double r_root = std::pow(p.r, 1.0 / d);
  if (support_splits(p)) {
    if (std::abs(std::abs(u) - 1.0) > 1e-9) {
      throw error(errc::unsupported_evaluation,
                  "post-critical rotated map is only defined on |u| = 1");
    }
    if (p.regime == Regime::disk_special) {
      return std::pow(p.r * w + std::conj(p.spec.t), 1.0 / d);
    }
    const cplx blaschke = 1.0 - 1.0 / (std::conj(p.alpha) * w);
    const cplx base = 1.0 - p.alpha / w;
    return r_root * u * std::pow(blaschke, 1.0 / d) * std::pow(base, 1.0 / n - 1.0 / d);
  }
  if (std::abs(u) < 1.0 - 1e-12) {
    throw error(errc::unsupported_evaluation, "rotated map requires |u| >= 1");
  }
  switch (p.regime) {
    case Regime::disk_special:
      return r_root * u * std::pow(1.0 + std::conj(p.spec.t) / (p.r * w), 1.0 / d);
    case Regime::ellipse_special:
      return r_root * u * std::pow(1.0 + 2.0 * std::conj(p.spec.t) / w, 2.0 / d);
    default:
      return r_root * u * std::pow(1.0 - p.alpha / w, 1.0 / n);
  }
}

// One closed loop per support component, each with front() == back().
struct BoundaryCurve {
  std::vector<std::vector<cplx>> components;
  int samples_per_component = 0;
  Regime regime = Regime::pre_critical;
};

namespace detail {

inline void orient_ccw(std::vector<cplx>& loop) {
  if (signed_area(loop) < 0.0) std::reverse(loop.begin(), loop.end());
}

// Tracked d-th root of f along a full sweep of the reduced boundary. The
// returned points start at the principal root of f(w_0) and stay on a
// continuous sheet; when the reduced boundary passes through the origin
// (critical-like cases) the straddling step carries a known phase jump of
// (d/n)*pi which is used to pick the right 2*pi window.
inline std::vector<cplx> tracked_root_loop(const ConformalMap& reduced, int d, int m,
                                           double w_phase0, double w_step, bool critical_like) {
  const MapParams& p = reduced.params;
  const double inv_d = 1.0 / static_cast<double>(d);
  const double expected_jump = std::numbers::pi * double(p.spec.d) / double(p.spec.n);
  const double alpha_phase = std::arg(pre_form_view(p).alpha);
  std::vector<cplx> out;
  out.reserve(static_cast<std::size_t>(m));
  cplx prev_f{0.0, 0.0};
  double theta = 0.0;
  for (int j = 0; j < m; ++j) {
    const double wp = w_phase0 + w_step * j;
    const cplx w = std::polar(1.0, wp);
    cplx fj = eval_f(reduced, w);
    if (fj == cplx{0.0, 0.0}) {
      fj = eval_f(reduced, std::polar(1.0, wp + 1e-12));  // nudge off the exact zero
    }
    if (j == 0) {
      theta = std::arg(fj);
    } else {
      double delta = arg_increment(prev_f, fj);
      if (critical_like) {
        // Does this w-step straddle the boundary zero at arg(alpha)?
        const double lo = wp - w_step;
        double rel = std::remainder(alpha_phase - lo, 2.0 * std::numbers::pi);
        if (rel < 0.0) rel += 2.0 * std::numbers::pi;
        if (rel <= w_step) {
          const double k = std::round((expected_jump - delta) / (2.0 * std::numbers::pi));
          delta += 2.0 * std::numbers::pi * k;
        }
      }
      theta += delta;
    }
    out.push_back(std::polar(std::pow(std::abs(fj), inv_d), theta * inv_d));
    prev_f = fj;
  }
  return out;
}

}  // namespace detail

// Samples the boundary image of the unit circle. Reduced maps produce one
// loop of m points; rotated maps produce one loop (origin inside the reduced
// support) or d congruent loops (origin outside). Critical grids are offset
// by half a step so the boundary zero is never evaluated exactly.
inline BoundaryCurve sample_boundary(const ConformalMap& m, int samples) {
  if (samples < 16) {
    throw error(errc::unsupported_evaluation, "boundary sampling needs at least 16 points");
  }
  const MapParams& p = m.params;
  const bool rotated = (m.kind == MapKind::rotated_pre || m.kind == MapKind::rotated_post);
  const int d = p.spec.d;
  const bool critical_like = origin_on_boundary(p);

  BoundaryCurve curve;
  curve.regime = p.regime;

  if (!rotated) {
    const int mm = samples;
    const double offset = critical_like ? 0.5 : 0.0;
    std::vector<cplx> loop;
    loop.reserve(static_cast<std::size_t>(mm) + 1);
    for (int k = 0; k < mm; ++k) {
      const double phase = 2.0 * std::numbers::pi * (k + offset) / mm;
      loop.push_back(eval_f(m, std::polar(1.0, phase)));
    }
    loop.push_back(loop.front());
    detail::orient_ccw(loop);
    if (polyline_self_intersects(loop)) {
      throw error(errc::self_intersection, "reduced boundary self-intersects at m=" + std::to_string(mm));
    }
    curve.components.push_back(std::move(loop));
    curve.samples_per_component = mm;
    return curve;
  }

  const int mm = std::max(samples, 64 * d);  // keeps phase increments well below pi
  const ConformalMap reduced = make_reduced_map(p);
  const double offset = critical_like ? 0.5 : 0.0;

  if (!support_splits(p)) {
    // u sweeps the full circle; w = u^d wraps d times and the tracked root
    // closes up after gaining 2*pi.
    const double ustep = 2.0 * std::numbers::pi / mm;
    auto loop = detail::tracked_root_loop(reduced, d, mm, d * ustep * offset, d * ustep, critical_like);
    loop.push_back(loop.front());
    detail::orient_ccw(loop);
    if (polyline_self_intersects(loop)) {
      throw error(errc::self_intersection, "rotated boundary self-intersects at m=" + std::to_string(mm));
    }
    curve.components.push_back(std::move(loop));
    curve.samples_per_component = mm;
    return curve;
  }

  // d disjoint components; the arcs share one w-sweep, so components k > 0
  // are exact rotations of component 0 by the d-th roots of unity.
  const double wstep = 2.0 * std::numbers::pi / mm;
  auto base = detail::tracked_root_loop(reduced, d, mm, wstep * offset, wstep, critical_like);
  base.push_back(base.front());
  for (int k = 0; k < d; ++k) {
    const cplx rot = std::polar(1.0, 2.0 * std::numbers::pi * k / d);
    std::vector<cplx> comp;
    comp.reserve(base.size());
    for (const cplx& z : base) comp.push_back(rot * z);
    detail::orient_ccw(comp);
    if (polyline_self_intersects(comp)) {
      throw error(errc::self_intersection,
                  "rotated component " + std::to_string(k) + " self-intersects at m=" + std::to_string(mm));
    }
    curve.components.push_back(std::move(comp));
  }
  curve.samples_per_component = mm;
  return curve;
}

// Starlike criterion Re(u f'(u)/f(u)) > 0 on an exterior grid, together with
// the stronger sufficient condition Re(a/(u-a)) > -1/2.
struct StarlikeReport {
  double min_re_log_deriv = 0.0;
  double min_re_mobius = 0.0;
  bool sufficient_condition = false;
  bool pass = false;
  int grid_points = 0;
};

inline StarlikeReport check_starlike(const ConformalMap& m, const GridSpec& grid = {}) {
  const MapParams& p = m.params;
  if (p.regime == Regime::post_critical) {
    throw error(errc::unsupported_evaluation, "starlike test applies to pre-critical maps");
  }
  const auto view = pre_form_view(p);
  if (!(std::abs(view.alpha) < 1.0)) {
    throw error(errc::unsupported_evaluation, "starlike test requires |alpha| < 1");
  }
  StarlikeReport rep;
  rep.min_re_log_deriv = std::numeric_limits<double>::infinity();
  rep.min_re_mobius = std::numeric_limits<double>::infinity();
  const auto radii = grid.radii_list();
  for (const double rho : radii) {
    for (int j = 0; j < grid.phases; ++j) {
      const double phase = 2.0 * std::numbers::pi * (j + 0.5) / grid.phases;
      const cplx u = std::polar(rho, phase);
      const double mob = std::real(view.alpha / (u - view.alpha));
      rep.min_re_mobius = std::min(rep.min_re_mobius, mob);
      rep.min_re_log_deriv = std::min(rep.min_re_log_deriv, 1.0 + view.exponent * mob);
      ++rep.grid_points;
    }
  }
  rep.sufficient_condition = rep.min_re_mobius > -0.5;
  rep.pass = rep.min_re_log_deriv > 0.0;
  return rep;
}

// Post-critical boundary injectivity. After rescaling u by alpha's phase the
// modulus |f(e^{i mu})| depends on mu only through cos(mu) and must be
// strictly monotone; the off-axis values are non-real, so symmetric points
// cannot collide. An all-pairs segment test backs both arguments up.
struct InjectivityReport {
  bool modulus_monotone = false;
  bool imag_sign_consistent = false;
  bool no_segment_crossing = false;
  double min_imag_magnitude = 0.0;
  bool pass = false;
  int samples = 0;
};

inline InjectivityReport check_boundary_injective(const ConformalMap& m, int samples) {
  const MapParams& p = m.params;
  if (m.kind != MapKind::reduced_post || p.regime != Regime::post_critical) {
    throw error(errc::unsupported_evaluation, "boundary injectivity test applies to the post-critical reduced map");
  }
  InjectivityReport rep;
  rep.samples = samples;
  const double a = std::abs(p.alpha);
  const cplx phase_fix = a / std::conj(p.alpha);  // maps alpha to the positive axis

  rep.modulus_monotone = true;
  double prev = -std::numeric_limits<double>::infinity();
  for (int j = 0; j <= samples; ++j) {
    const double mu = std::numbers::pi * j / samples;
    const double mod = std::abs(eval_f(m, phase_fix * std::polar(1.0, mu)));
    if (!(mod > prev)) {
      rep.modulus_monotone = false;
      break;
    }
    prev = mod;
  }

  rep.imag_sign_consistent = true;
  rep.min_imag_magnitude = std::numeric_limits<double>::infinity();
  const double pw = double(p.spec.d) / double(p.spec.n) - 1.0;
  for (int j = 1; j < samples; ++j) {
    const double mu = std::numbers::pi * j / samples;
    const cplx q = (1.0 - a * std::polar(1.0, mu)) * std::pow(1.0 - a * std::polar(1.0, -mu), pw);
    rep.min_imag_magnitude = std::min(rep.min_imag_magnitude, std::abs(q.imag()));
    if (!(q.imag() < 0.0)) {
      rep.imag_sign_consistent = false;
      break;
    }
  }

  rep.no_segment_crossing = true;
  try {
    (void)sample_boundary(m, samples);
  } catch (const error& e) {
    if (e.code() != errc::self_intersection) throw;
    rep.no_segment_crossing = false;
  }

  rep.pass = rep.modulus_monotone && rep.imag_sign_consistent && rep.no_segment_crossing;
  return rep;
}

}  // namespace equilib
