// Independent ground truth: a discrete Coulomb gas minimizing
//   E_N = (1/N^2) sum_{i != j} log 1/|z_i - z_j| + (1/N) sum_i V(z_i),
// exact finite-sum tests of the d-fold rotation identities, and a dense scan
// of the radius equation that certifies branch selection without the
// bracketed solver.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

#include "equilib/conformal.hpp"
#include "equilib/geometry.hpp"
#include "equilib/numerics.hpp"
#include "equilib/params.hpp"
#include "equilib/types.hpp"

namespace equilib {

struct GasOptions {
  int max_iter = 50000;
  double grad_tol_coeff = 1e-8;  // converged when grad_norm <= coeff / sqrt(N)
  double min_separation = 1e-12;
  double initial_step = 1.0;
  double step_growth = 1.5;
  double armijo_c = 1e-4;
};

struct ParticleEnsemble {
  ProblemSpec spec;
  std::vector<cplx> positions;
  double energy = 0.0;
  double grad_norm = 0.0;
  int iterations = 0;
  bool converged = false;
  std::uint64_t seed = 0;
};

namespace detail {

// Interaction + confinement energy and the closest pair distance (squared),
// accumulated per row and combined in index order so the result is
// bit-identical for any worker count.
inline std::pair<double, double> gas_energy_minsep(const ProblemSpec& ps,
                                                   const std::vector<cplx>& z) {
  const int n_particles = static_cast<int>(z.size());
  std::vector<double> row_log(n_particles, 0.0);
  std::vector<double> row_min(n_particles, std::numeric_limits<double>::infinity());
  std::vector<double> row_pot(n_particles, 0.0);
  parallel_for(n_particles, [&](int i) {
    double acc = 0.0;
    double mn = std::numeric_limits<double>::infinity();
    const cplx zi = z[i];
    for (int j = i + 1; j < n_particles; ++j) {
      const double d2 = std::norm(zi - z[j]);
      acc += std::log(d2);
      mn = std::min(mn, d2);
    }
    row_log[i] = acc;
    row_min[i] = mn;
    row_pot[i] = potential_value(ps, zi);
  }, 64);
  double log_sum = 0.0;
  double pot_sum = 0.0;
  double min2 = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n_particles; ++i) {
    log_sum += row_log[i];
    pot_sum += row_pot[i];
    min2 = std::min(min2, row_min[i]);
  }
  const double inv_n = 1.0 / n_particles;
  const double energy = -inv_n * inv_n * log_sum + inv_n * pot_sum;
  return {energy, std::sqrt(min2)};
}

// Wirtinger gradient g_i = dE/d(conj z_i); the pair term uses
// 1/conj(dz) = dz/|dz|^2.
inline double gas_gradient(const ProblemSpec& ps, const std::vector<cplx>& z,
                           std::vector<cplx>& g) {
  const int n_particles = static_cast<int>(z.size());
  g.resize(z.size());
  const double inv_n = 1.0 / n_particles;
  parallel_for(n_particles, [&](int i) {
    cplx pair_sum{0.0, 0.0};
    const cplx zi = z[i];
    for (int j = 0; j < n_particles; ++j) {
      if (j == i) continue;
      const cplx dz = zi - z[j];
      pair_sum += dz / std::norm(dz);
    }
    g[i] = -inv_n * inv_n * pair_sum + inv_n * potential_grad_conj(ps, zi);
  }, 64);
  double sum2 = 0.0;
  for (const cplx& gi : g) sum2 += std::norm(gi);
  return 2.0 * std::sqrt(sum2);  // Euclidean norm of the real 2N-gradient
}

}  // namespace detail

// Deterministic gradient descent with backtracking line search. Returns the
// best-so-far state with converged = false when the gradient tolerance is
// not reached within the iteration budget.
inline ParticleEnsemble minimize_gas(const ProblemSpec& ps, int n_particles, std::uint64_t seed,
                                     const GasOptions& opt = {}) {
  validate(ps);
  if (n_particles < 16 || n_particles > 4096) {
    throw error(errc::unsupported_evaluation, "particle count must lie in [16, 4096]");
  }
  ParticleEnsemble ens;
  ens.spec = ps;
  ens.seed = seed;
  ens.positions.resize(static_cast<std::size_t>(n_particles));

  // i.i.d. uniform on a disk generously covering every predicted support.
  const double init_radius = 2.0 * std::pow(ps.T / ps.n, 1.0 / (2.0 * ps.n));
  lcg64 rng(seed);
  for (auto& z : ens.positions) z = rng.uniform_disk(init_radius);

  auto [energy, minsep] = detail::gas_energy_minsep(ps, ens.positions);
  std::vector<cplx> grad;
  std::vector<cplx> trial(ens.positions.size());
  const double tol = opt.grad_tol_coeff / std::sqrt(static_cast<double>(n_particles));
  double step = opt.initial_step;

  for (int iter = 1; iter <= opt.max_iter; ++iter) {
    ens.iterations = iter;
    ens.grad_norm = detail::gas_gradient(ps, ens.positions, grad);
    if (ens.grad_norm <= tol) {
      ens.converged = true;
      break;
    }
    double sum_g2 = 0.0;
    for (const cplx& gi : grad) sum_g2 += std::norm(gi);

    step = std::min(step * opt.step_growth, 1e6);
    bool accepted = false;
    while (step > 1e-18) {
      for (std::size_t i = 0; i < trial.size(); ++i) {
        trial[i] = ens.positions[i] - 2.0 * step * grad[i];
      }
      const auto [e_trial, sep_trial] = detail::gas_energy_minsep(ps, trial);
      if (sep_trial >= opt.min_separation &&
          e_trial <= energy - opt.armijo_c * 4.0 * step * sum_g2) {
        ens.positions.swap(trial);
        energy = e_trial;
        minsep = sep_trial;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;  // line search stalled; report best-so-far
  }

  ens.energy = energy;
  if (!ens.converged) {
    // Leave the flag down; callers decide whether NonConvergence is fatal.
    ens.grad_norm = detail::gas_gradient(ps, ens.positions, grad);
  }
  return ens;
}

// Fraction of particles within eps * diam(boundary) of the predicted support
// (interior counts as distance zero, via winding numbers).
inline double support_coverage(const ParticleEnsemble& ens, const BoundaryCurve& boundary,
                               double eps) {
  std::vector<cplx> all_pts;
  for (const auto& comp : boundary.components) {
    all_pts.insert(all_pts.end(), comp.begin(), comp.end());
  }
  const double tol = eps * diameter(all_pts);
  int covered = 0;
  for (const cplx& z : ens.positions) {
    double dist = std::numeric_limits<double>::infinity();
    for (const auto& comp : boundary.components) {
      if (point_in_polygon(comp, z)) {
        dist = 0.0;
        break;
      }
      dist = std::min(dist, dist_point_polyline(z, comp));
    }
    if (dist <= tol) ++covered;
  }
  return static_cast<double>(covered) / static_cast<double>(ens.positions.size());
}

// Finitely supported probability measure.
struct AtomicMeasure {
  std::vector<std::pair<cplx, double>> atoms;  // (position, weight)
};

// Pushforward under the d-th root map: every atom splits into its d roots,
// each carrying weight/d. Roots are enumerated with arg in [0, 2pi).
inline AtomicMeasure rotated_measure(const AtomicMeasure& mu, int d) {
  AtomicMeasure out;
  out.atoms.reserve(mu.atoms.size() * static_cast<std::size_t>(d));
  for (const auto& [w, weight] : mu.atoms) {
    double phase = std::arg(w);
    if (phase < 0.0) phase += 2.0 * std::numbers::pi;
    const double mod_root = std::pow(std::abs(w), 1.0 / d);
    for (int k = 0; k < d; ++k) {
      out.atoms.emplace_back(std::polar(mod_root, (phase + 2.0 * std::numbers::pi * k) / d),
                             weight / d);
    }
  }
  return out;
}

inline double log_potential_atomic(const AtomicMeasure& mu, cplx z) {
  double acc = 0.0;
  for (const auto& [w, weight] : mu.atoms) {
    const double dist = std::abs(z - w);
    if (dist == 0.0) throw error(errc::atom_hit, "logarithmic potential evaluated at an atom");
    acc -= weight * std::log(dist);
  }
  return acc;
}

inline cplx cauchy_transform_atomic(const AtomicMeasure& mu, cplx z) {
  cplx acc{0.0, 0.0};
  for (const auto& [w, weight] : mu.atoms) {
    if (w == z) throw error(errc::atom_hit, "Cauchy transform evaluated at an atom");
    acc += weight / (w - z);
  }
  return acc;
}

struct RadiusRoot {
  double r = 0.0;
  double abs_alpha = 0.0;
};

// Dense sign-change scan of the radius equation, bisection-polished. The
// window covers both the zero-coupling roots and (for n < d < 2n) the
// critical radius, which can exceed twice the unperturbed radius when d is
// close to 2n. Grid points are log-spaced: the rejected d < n root scales
// like a high power of |t| and collapses toward zero, where a uniform grid
// cannot resolve it.
inline std::vector<RadiusRoot> scan_radius_roots(const ProblemSpec& ps, int grid_size) {
  if (ps.d == ps.n || ps.d == 2 * ps.n) {
    throw error(errc::degenerate_case, "radius scan requires 0 < d < n or n < d < 2n");
  }
  if (std::abs(ps.t) == 0.0) {
    throw error(errc::unsupported_evaluation, "radius scan requires t != 0");
  }
  grid_size = std::max(grid_size, 100000);
  double hi = 2.0 * std::pow(ps.T / ps.n, ps.d / (2.0 * ps.n));
  if (ps.d > ps.n) hi = std::max(hi, 1.01 * critical_radius(ps));
  const double span = 1e12;  // lowest grid point at hi/span

  std::vector<RadiusRoot> roots;
  double prev_r = hi / span;
  double prev_y = radius_equation(ps, prev_r);
  for (int k = 1; k <= grid_size; ++k) {
    const double r = hi * std::pow(span, static_cast<double>(k) / grid_size - 1.0);
    const double y = radius_equation(ps, r);
    if ((prev_y < 0.0 && y >= 0.0) || (prev_y > 0.0 && y <= 0.0)) {
      double lo_b = prev_r;
      double hi_b = r;
      double y_lo = prev_y;
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo_b + hi_b);
        const double y_mid = radius_equation(ps, mid);
        if ((y_lo < 0.0) == (y_mid < 0.0)) {
          lo_b = mid;
          y_lo = y_mid;
        } else {
          hi_b = mid;
        }
        if (hi_b - lo_b < 1e-16 * hi_b) break;
      }
      const double root = 0.5 * (lo_b + hi_b);
      roots.push_back({root, std::abs(alpha_from_r_pre(ps, root))});
    }
    prev_r = r;
    prev_y = y;
  }
  return roots;
}

}  // namespace equilib
