// Densities, Cauchy-transform data and the effective-potential checks.
//
// With W(x) = (d/T) x^(n/d) and P(z) = (t d/T) z, the effective potential
// E = V + 2 U^mu has
//     dE/dz = W'(z conj z) conj(z) - P'(z) + phi_minus(z),
// which collapses on the uniformized exterior to a product with an explicit
// bracket that vanishes identically on |u| = 1. The bracket forms below are
// the algebraically reduced ones; naive differencing of E would cancel
// catastrophically near the boundary.
#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "equilib/conformal.hpp"
#include "equilib/numerics.hpp"
#include "equilib/params.hpp"
#include "equilib/types.hpp"

namespace equilib {

inline constexpr double tau_mass = 1e-10;
inline constexpr double tau_var = 1e-9;
inline constexpr double tau_ray_integral = 1e-10;
inline constexpr double default_ray_s_max = 8.0;

struct FieldContext {
  MapParams params;
  ConformalMap map;          // reduced map
  double mass_prefactor;     // n r^(2n/d) / T, with the extra |alpha|^(-2n/d) post-critically
  double exponent_ratio;     // 2n/d
};

inline FieldContext make_field_context(const MapParams& mp) {
  FieldContext ctx{mp, make_reduced_map(mp), 0.0, 0.0};
  const double n = mp.spec.n;
  const double d = mp.spec.d;
  ctx.exponent_ratio = 2.0 * n / d;
  ctx.mass_prefactor = n * std::pow(mp.r, ctx.exponent_ratio) / mp.spec.T;
  if (mp.regime == Regime::post_critical) {
    ctx.mass_prefactor *= std::pow(std::abs(mp.alpha), -ctx.exponent_ratio);
  }
  return ctx;
}

// Density of the reduced measure, (n^2 / (pi T d)) |z|^(2n/d - 2) on its
// support; the caller handles the support indicator.
inline double density_q(const FieldContext& ctx, cplx z) {
  const double n = ctx.params.spec.n;
  const double d = ctx.params.spec.d;
  return n * n / (std::numbers::pi * ctx.params.spec.T * d) *
         std::pow(std::abs(z), 2.0 * n / d - 2.0);
}

// Density of the full d-fold symmetric measure, (n^2 / (pi T)) |z|^(2n - 2).
inline double density_v(const FieldContext& ctx, cplx z) {
  const double n = ctx.params.spec.n;
  return n * n / (std::numbers::pi * ctx.params.spec.T) *
         pow_int(std::norm(z), ctx.params.spec.n - 1);
}

// |f(u)|^(2n/d) * f'(u)/f(u), factored so the modulus power never sees a
// fractional power of a near-zero value.
inline cplx mass_integrand(const FieldContext& ctx, cplx u) {
  const MapParams& p = ctx.params;
  const double ratio = ctx.exponent_ratio;
  double mod_pow;
  if (p.regime == Regime::post_critical) {
    const cplx beta = 1.0 / std::conj(p.alpha);
    mod_pow = std::pow(p.r, ratio) * std::pow(std::abs(u - beta), ratio) *
              std::pow(std::abs(1.0 - p.alpha / u), 2.0 - ratio);
  } else {
    const auto view = pre_form_view(p);
    mod_pow = std::pow(p.r, ratio) * std::pow(std::abs(u), ratio) * std::norm(1.0 - view.alpha / u);
  }
  return mod_pow * log_deriv_f(ctx.map, u);
}

// Total mass by the trapezoidal rule on |u| = 1; spectrally accurate away
// from the critical point, where the integrand keeps only algebraic
// smoothness and the grid is offset off the boundary zero.
inline double mass_contour_integral(const FieldContext& ctx, int m) {
  const double offset = origin_on_boundary(ctx.params) ? 0.5 : 0.0;
  const double n = ctx.params.spec.n;
  double acc = 0.0;
  for (int k = 0; k < m; ++k) {
    const cplx u = std::polar(1.0, 2.0 * std::numbers::pi * (k + offset) / m);
    acc += std::real(mass_integrand(ctx, u) * u);
  }
  return (n / ctx.params.spec.T) * acc / m;
}

// Doubling check wrapper.
inline double mass_contour_integral_checked(const FieldContext& ctx, int m, double tol = tau_mass) {
  const double coarse = mass_contour_integral(ctx, m);
  const double fine = mass_contour_integral(ctx, 2 * m);
  if (std::abs(fine - coarse) > tol) {
    throw error(errc::quadrature_non_convergent,
                "mass changed by " + std::to_string(std::abs(fine - coarse)) + " when doubling m=" +
                    std::to_string(m));
  }
  return fine;
}

// Closed-form mass implied by (r, alpha); equals 1 at solved parameters.
inline double mass_closed_form(const FieldContext& ctx) {
  const MapParams& p = ctx.params;
  const double n = p.spec.n;
  const double d = p.spec.d;
  const double ratio = ctx.exponent_ratio;
  if (p.regime == Regime::post_critical) {
    return (n / p.spec.T) * std::pow(p.r, ratio) * ((2.0 * n - d) / n) *
           std::pow(std::abs(p.alpha), 2.0 - ratio);
  }
  const auto view = pre_form_view(p);
  return std::pow(p.r, ratio) / p.spec.T * (n + (n - d) * std::norm(view.alpha));
}

// dE/dz at z = f(u), |u| >= 1. Vanishes identically on |u| = 1.
inline cplx grad_effective_potential(const FieldContext& ctx, cplx u) {
  const MapParams& p = ctx.params;
  const double ratio = ctx.exponent_ratio;
  const cplx fu = eval_f(ctx.map, u);
  if (fu == cplx{0.0, 0.0}) {
    throw error(errc::division_by_zero_at_zero,
                "f(u) = 0 at u = " + std::to_string(u.real()) + "+" + std::to_string(u.imag()) + "i");
  }
  const double u_pow = std::pow(std::norm(u), ratio / 2.0);
  if (p.regime == Regime::post_critical) {
    const cplx a = p.alpha;
    const double mobius_pow = std::pow(std::abs((1.0 - std::conj(a) * u) / (u - a)), ratio);
    const cplx bracket =
        u_pow * mobius_pow * (1.0 - std::conj(a) / std::conj(u)) - (1.0 - std::conj(a) * u);
    return ctx.mass_prefactor * (1.0 - a / u) * bracket / fu;
  }
  const auto view = pre_form_view(p);
  const cplx a = view.alpha;
  const cplx bracket = u_pow * (1.0 - std::conj(a) / std::conj(u)) - (1.0 - std::conj(a) * u);
  return ctx.mass_prefactor * (1.0 - a / u) * bracket / fu;
}

// Exterior Cauchy-transform data: phi_plus is the constant P'(z) on the
// support side, phi_minus the decaying exterior branch.
inline cplx phi_plus(const FieldContext& ctx) {
  const auto view = pre_form_view(ctx.params);
  return -(ctx.mass_prefactor / ctx.params.r) * std::conj(view.alpha);
}

inline cplx phi_minus(const FieldContext& ctx, cplx u) {
  const auto view = pre_form_view(ctx.params);
  const cplx fu = eval_f(ctx.map, u);
  return phi_plus(ctx) -
         ctx.mass_prefactor * (1.0 - view.alpha / u) * (1.0 - std::conj(view.alpha) * u) / fu;
}

// Second route to dE/dz through the raw decomposition; used as a cross-check
// of the reduced bracket forms.
inline cplx grad_via_decomposition(const FieldContext& ctx, cplx u) {
  const MapParams& p = ctx.params;
  const double n = p.spec.n;
  const double d = p.spec.d;
  const cplx z = eval_f(ctx.map, u);
  const cplx w_prime_term = (n / p.spec.T) * std::pow(std::norm(z), n / d - 1.0) * std::conj(z);
  const cplx p_prime = (d / p.spec.T) * p.spec.t;
  return w_prime_term - p_prime + phi_minus(ctx, u);
}

// Strict-inequality gap whose positivity rules out exterior critical points
// of E. Pre-critically |u|^(2n/d-1) must dominate the Mobius factor; the
// post-critical statement is that |u (1-conj(a)u)/(u-a)| never returns to 1
// off the circle. The direct bracket modulus covers the detached-disk case
// where |alpha| >= 1 and the Mobius bound does not apply.
inline double gap_margin(const FieldContext& ctx, cplx u) {
  const MapParams& p = ctx.params;
  const double ratio = ctx.exponent_ratio;
  if (p.regime == Regime::post_critical) {
    const cplx a = p.alpha;
    return std::abs(std::abs(u * (1.0 - std::conj(a) * u) / (u - a)) - 1.0);
  }
  const auto view = pre_form_view(p);
  const cplx a = view.alpha;
  if (std::abs(a) < 1.0) {
    return std::pow(std::abs(u), ratio - 1.0) - std::abs((1.0 - std::conj(a) * u) / (u - a));
  }
  const double u_pow = std::pow(std::norm(u), ratio / 2.0);
  return std::abs(u_pow * (1.0 - std::conj(a) / std::conj(u)) - (1.0 - std::conj(a) * u));
}

// E(f(s u0)) - F as the line integral of 2 Re(dE/dz dz) along the image of
// the radial ray, valid because E = F on the boundary.
inline double effective_potential_increment(const FieldContext& ctx, cplx u0, double s,
                                            double s_max = default_ray_s_max) {
  if (s < 1.0 || s > s_max) {
    throw std::invalid_argument("ray parameter s must lie in [1, s_max]");
  }
  const cplx dir = u0 / std::abs(u0);
  auto integrand = [&](double sigma) {
    const cplx u = sigma * dir;
    return 2.0 * std::real(grad_effective_potential(ctx, u) * eval_f_prime(ctx.map, u) * dir);
  };
  return adaptive_simpson(integrand, 1.0, s, tau_ray_integral);
}

// Line integral of 2 Re(dE/dz dz) along a piecewise-linear path in the
// u-plane (every waypoint must stay in |u| >= 1).
inline double integrate_grad_along(const FieldContext& ctx, const std::vector<cplx>& waypoints) {
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < waypoints.size(); ++i) {
    const cplx a = waypoints[i];
    const cplx b = waypoints[i + 1];
    auto integrand = [&](double tpar) {
      const cplx u = a + tpar * (b - a);
      return 2.0 * std::real(grad_effective_potential(ctx, u) * eval_f_prime(ctx.map, u) * (b - a));
    };
    total += adaptive_simpson(integrand, 0.0, 1.0, tau_ray_integral);
  }
  return total;
}

struct VerificationReport {
  double mass = 0.0;
  double mass_error = 0.0;
  double min_inequality_margin = 0.0;  // min over rays of E(z(s)) - F
  double min_gradient_margin = 0.0;    // min over the exterior grid of the gap
  std::string grid_spec;
  bool pass = false;
  double mass_tolerance = tau_mass;
  double var_tolerance = tau_var;
};

struct VerifyOptions {
  int mass_samples = 4096;
  double mass_tolerance = tau_mass;
  int rays = 64;
  std::vector<double> ray_s_values{1.01, 1.1, 2.0, 4.0, 8.0};
  GridSpec grid{};
};

// At the critical coupling the integrand has a fractional boundary zero and
// only algebraic quadrature rates; the defaults relax accordingly.
inline VerifyOptions default_verify_options(const MapParams& mp) {
  VerifyOptions opt;
  if (origin_on_boundary(mp)) {
    opt.mass_samples = 1 << 16;
    opt.mass_tolerance = 1e-6;
  }
  return opt;
}

inline VerificationReport verify(const FieldContext& ctx, const VerifyOptions& opt) {
  VerificationReport rep;
  rep.mass_tolerance = opt.mass_tolerance;

  rep.mass = mass_contour_integral(ctx, opt.mass_samples);
  rep.mass_error = std::abs(rep.mass - 1.0);

  rep.min_gradient_margin = std::numeric_limits<double>::infinity();
  const auto radii = opt.grid.radii_list();
  for (const double rho : radii) {
    for (int j = 0; j < opt.grid.phases; ++j) {
      const double phase = 2.0 * std::numbers::pi * (j + 0.5) / opt.grid.phases;
      rep.min_gradient_margin =
          std::min(rep.min_gradient_margin, gap_margin(ctx, std::polar(rho, phase)));
    }
  }

  // Ray phases are anchored half a step off arg(alpha): post-critically the
  // ray through arg(alpha) passes through the exterior zero of f (the image
  // of the origin), where the gradient has an integrable singularity.
  rep.min_inequality_margin = std::numeric_limits<double>::infinity();
  const auto view = pre_form_view(ctx.params);
  const double anchor = (view.alpha == cplx{0.0, 0.0}) ? 0.0 : std::arg(view.alpha);
  for (int j = 0; j < opt.rays; ++j) {
    const double phase = anchor + 2.0 * std::numbers::pi * (j + 0.5) / opt.rays;
    const cplx u0 = std::polar(1.0, phase);
    double s_prev = 1.0;
    double acc = 0.0;
    for (const double s : opt.ray_s_values) {
      if (s <= s_prev) continue;
      const cplx dir = u0;
      auto integrand = [&](double sigma) {
        const cplx u = sigma * dir;
        return 2.0 * std::real(grad_effective_potential(ctx, u) * eval_f_prime(ctx.map, u) * dir);
      };
      acc += adaptive_simpson(integrand, s_prev, s, tau_ray_integral);
      s_prev = s;
      rep.min_inequality_margin = std::min(rep.min_inequality_margin, acc);
    }
  }

  rep.grid_spec = opt.grid.describe() + "; mass m=" + std::to_string(opt.mass_samples) +
                  "; rays " + std::to_string(opt.rays) + " x " +
                  std::to_string(opt.ray_s_values.size()) + " s-values";
  rep.pass = rep.mass_error <= opt.mass_tolerance && rep.min_inequality_margin >= -tau_var &&
             rep.min_gradient_margin > 0.0;
  return rep;
}

inline VerificationReport verify(const FieldContext& ctx) {
  return verify(ctx, default_verify_options(ctx.params));
}

}  // namespace equilib
