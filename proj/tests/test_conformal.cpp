#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "equilib/conformal.hpp"
#include "equilib/geometry.hpp"
#include "equilib/numerics.hpp"

using namespace equilib;

namespace {

MapParams solved(int n, int d, double T, cplx t) { return solve(ProblemSpec{n, d, T, t}); }

std::vector<cplx> random_exterior_points(int count, double rmin, double rmax, std::uint64_t seed) {
  lcg64 rng(seed);
  std::vector<cplx> pts;
  pts.reserve(count);
  for (int i = 0; i < count; ++i) {
    const double rho = rmin + (rmax - rmin) * rng.uniform01();
    pts.push_back(std::polar(rho, 2.0 * std::numbers::pi * rng.uniform01()));
  }
  return pts;
}

std::vector<cplx> flatten(const BoundaryCurve& c) {
  std::vector<cplx> out;
  for (const auto& comp : c.components) out.insert(out.end(), comp.begin(), comp.end());
  return out;
}

}  // namespace

TEST_CASE("eval_f: unperturbed map is r*u; disk map is affine") {
  {
    const auto mp = solved(9, 7, 1.0, {});
    const auto map = make_reduced_map(mp);
    for (const cplx u : random_exterior_points(16, 1.0, 10.0, 7)) {
      CHECK(std::abs(eval_f(map, u) - mp.r * u) < 1e-14);
    }
  }
  {
    const auto mp = solved(3, 3, 1.0, cplx{0.4, 0.3});
    const auto map = make_reduced_map(mp);
    for (const cplx u : random_exterior_points(16, 1.0, 10.0, 8)) {
      CHECK(std::abs(eval_f(map, u) - (mp.r * u + cplx{0.4, -0.3})) < 1e-14);
    }
  }
}

TEST_CASE("eval_f: the two post-critical product forms agree pointwise") {
  // r (u - 1/conj(a)) (1-a/u)^(d/n-1)  ==  r u ((u-b)/(u-1/conj(b))) (1-a/u)^(d/n)
  // at b = 1/conj(a): an exact Blaschke identity.
  for (const auto& [n, d] : std::vector<std::pair<int, int>>{{2, 1}, {9, 7}, {2, 3}}) {
    ProblemSpec ps{n, d, 1.0, {}};
    ps.t = std::polar(1.4 * critical_threshold(ps), 0.63);
    const auto mp = solve(ps);
    const auto map = make_reduced_map(mp);
    REQUIRE(map.kind == MapKind::reduced_post);
    const cplx beta = 1.0 / std::conj(mp.alpha);
    for (const cplx u : random_exterior_points(64, 1.0 + 1e-9, 10.0, 11)) {
      const cplx lhs = eval_f(map, u);
      const cplx rhs = mp.r * u * (u - beta) / (u - 1.0 / std::conj(beta)) *
                       std::pow(1.0 - mp.alpha / u, double(d) / double(n));
      CHECK(std::abs(lhs - rhs) <= 1e-14 * std::max(1.0, std::abs(lhs)));
    }
  }
}

TEST_CASE("eval_f: critical boundary zero returns the limit with a flag") {
  ProblemSpec ps{2, 1, 1.0, {}};
  ps.t = critical_threshold(ps);
  const auto mp = solve(ps);
  REQUIRE(mp.regime == Regime::critical);
  const auto map = make_reduced_map(mp);
  bool hit = false;
  const cplx val = eval_f(map, mp.alpha, &hit);
  CHECK(hit);
  CHECK(val == cplx{0.0, 0.0});
}

TEST_CASE("eval_f_prime: closed values and finite differences") {
  // alpha = 0 -> f' = r everywhere
  {
    const auto mp = solved(9, 7, 1.0, {});
    const auto map = make_reduced_map(mp);
    CHECK(std::abs(eval_f_prime(map, cplx{2.0, 1.0}) - mp.r) < 1e-14);
  }
  // hand-expanded log-derivative: u f'/f = 1 + (d/n) a/(u-a)
  {
    MapParams mp;
    mp.spec = {2, 1, 1.0, cplx{0.0, 0.0}};
    mp.regime = Regime::pre_critical;
    mp.r = 1.0;
    mp.alpha = cplx{0.5, 0.0};
    const ConformalMap map{mp, MapKind::reduced_pre};
    const cplx u{2.0, 0.0};
    const cplx val = u * eval_f_prime(map, u) / eval_f(map, u);
    CHECK(std::abs(val - cplx{1.0 + 0.5 * (0.5 / 1.5), 0.0}) < 1e-14);
    CHECK(std::abs(u * log_deriv_f(map, u) - val) < 1e-14);
  }
  // central finite differences across every regime
  for (const cplx t : {cplx{0.2, 0.1}, cplx{0.0, 0.0}}) {
    for (const auto& [n, d] :
         std::vector<std::pair<int, int>>{{2, 1}, {9, 7}, {2, 3}, {3, 3}, {1, 2}}) {
      ProblemSpec ps{n, d, 1.0, t};
      const auto mp = solve(ps);
      const auto map = make_reduced_map(mp);
      for (const cplx u : random_exterior_points(8, 1.05, 6.0, 100 + n + d)) {
        const double h = 1e-6 * std::abs(u);
        const cplx fd = (eval_f(map, u + h) - eval_f(map, u - h)) / (2.0 * h);
        const cplx an = eval_f_prime(map, u);
        CHECK(std::abs(fd - an) <= 1e-7 * std::max(1.0, std::abs(an)));
      }
    }
  }
  // post-critical derivative, including at the exterior zero of f
  {
    ProblemSpec ps{2, 1, 1.0, cplx{2.0, 0.0}};
    const auto mp = solve(ps);
    const auto map = make_reduced_map(mp);
    const cplx u0 = 1.0 / std::conj(mp.alpha);
    REQUIRE(std::abs(u0) > 1.0);
    const double h = 1e-6;
    const cplx fd = (eval_f(map, u0 + h) - eval_f(map, u0 - h)) / (2.0 * h);
    CHECK(std::abs(eval_f_prime(map, u0) - fd) <= 1e-6 * std::abs(fd));
  }
  // normalization: f' -> r far away
  {
    const auto mp = solved(9, 7, 1.0, cplx{0.2, 0.0});
    const auto map = make_reduced_map(mp);
    CHECK(std::abs(eval_f_prime(map, cplx{1e8, 0.0}) - mp.r) < 1e-7);
  }
}

TEST_CASE("eval_g_rotated: identity cases and the modulus relation") {
  // alpha = 0 -> g = r^(1/d) u
  {
    const auto mp = solved(9, 7, 1.0, {});
    const auto g = make_rotated_map(mp);
    const cplx u{1.3, 0.4};
    CHECK(std::abs(eval_g_rotated(g, u) - std::pow(mp.r, 1.0 / 7.0) * u) < 1e-14);
  }
  // d = 1: the rotation is the identity, g == f
  {
    ProblemSpec ps{3, 1, 1.0, cplx{0.1, 0.05}};
    const auto mp = solve(ps);
    const auto f = make_reduced_map(mp);
    const auto g = make_rotated_map(mp);
    for (const cplx u : random_exterior_points(32, 1.0, 8.0, 21)) {
      CHECK(std::abs(eval_g_rotated(g, u) - eval_f(f, u)) <= 1e-14 * std::abs(eval_f(f, u)));
    }
  }
  // |g(u)|^d = |f(u^d)| on the unit circle, every regime
  for (const auto& [n, d, ratio] : std::vector<std::tuple<int, int, double>>{
           {9, 7, 0.5}, {9, 7, 1.3}, {2, 3, 0.6}, {2, 3, 1.7}, {3, 3, 0.4}, {1, 2, 0.22}}) {
    ProblemSpec ps{n, d, 1.0, {}};
    const double scale = (d == 2 * n) ? 1.0 : critical_threshold(ps);
    ps.t = std::polar(ratio * scale, 0.4);
    const auto mp = solve(ps);
    const auto f = make_reduced_map(mp);
    const auto g = make_rotated_map(mp);
    for (int k = 0; k < 256; ++k) {
      const cplx u = std::polar(1.0, 2.0 * std::numbers::pi * (k + 0.37) / 256.0);
      const double lhs = std::pow(std::abs(eval_g_rotated(g, u)), d);
      const double rhs = std::abs(eval_f(f, pow_int(u, d)));
      CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, rhs));
    }
  }
  // post-critical rotated evaluation away from the circle is refused
  {
    ProblemSpec ps{9, 7, 1.0, {}};
    ps.t = 1.3 * critical_threshold(ps);
    const auto g = make_rotated_map(solve(ps));
    CHECK_THROWS_AS(eval_g_rotated(g, cplx{1.5, 0.0}), error);
  }
  // pre-critical rotated evaluation inside the disk is refused
  {
    ProblemSpec ps{9, 7, 1.0, {}};
    ps.t = 0.5 * critical_threshold(ps);
    const auto g = make_rotated_map(solve(ps));
    CHECK_THROWS_AS(eval_g_rotated(g, cplx{0.5, 0.0}), error);
  }
}

TEST_CASE("sample_boundary: disk case lies on the exact circle") {
  const auto mp = solved(3, 3, 1.0, cplx{0.4, 0.3});
  const auto curve = sample_boundary(make_reduced_map(mp), 257);
  REQUIRE(curve.components.size() == 1);
  const cplx center{0.4, -0.3};
  const double radius = std::sqrt(1.0 / 3.0);
  for (const cplx z : curve.components[0]) {
    CHECK(std::abs(std::abs(z - center) - radius) <= 1e-12);
  }
}

TEST_CASE("sample_boundary: loops close, orient counterclockwise, and never self-cross") {
  for (const auto& [n, d, ratio] : std::vector<std::tuple<int, int, double>>{
           {2, 1, 0.5}, {2, 1, 1.0}, {2, 1, 1.8}, {9, 7, 0.8}, {9, 7, 1.2}, {2, 3, 0.9},
           {5, 8, 1.5}, {3, 3, 0.4}, {1, 2, 0.3}}) {
    ProblemSpec ps{n, d, 1.0, {}};
    const double scale = (d == 2 * n) ? 1.0 : critical_threshold(ps);
    ps.t = std::polar(ratio * scale, 1.1);
    const auto mp = solve(ps);
    for (const bool rotated : {false, true}) {
      const auto map = rotated ? make_rotated_map(mp) : make_reduced_map(mp);
      for (const int m : {64, 256, 1024}) {
        const auto curve = sample_boundary(map, m);
        for (const auto& comp : curve.components) {
          CHECK(comp.front() == comp.back());
          CHECK(signed_area(comp) > 0.0);
        }
      }
    }
  }
}

TEST_CASE("sample_boundary: component counts follow the regime") {
  // pre-critical rotated: one loop
  {
    ProblemSpec ps{9, 7, 1.0, {}};
    ps.t = 0.8 * critical_threshold(ps);
    CHECK(sample_boundary(make_rotated_map(solve(ps)), 512).components.size() == 1);
  }
  // post-critical rotated: d disjoint loops
  {
    ProblemSpec ps{9, 7, 1.0, {}};
    ps.t = 1.2 * critical_threshold(ps);
    const auto curve = sample_boundary(make_rotated_map(solve(ps)), 512);
    REQUIRE(curve.components.size() == 7);
    for (std::size_t a = 0; a < curve.components.size(); ++a) {
      for (std::size_t b = a + 1; b < curve.components.size(); ++b) {
        double gap = std::numeric_limits<double>::infinity();
        for (const cplx z : curve.components[a]) {
          gap = std::min(gap, dist_point_polyline(z, curve.components[b]));
        }
        CHECK(gap > 0.0);
      }
    }
  }
  // detached disk: the d = n rotated support also splits into d loops
  {
    ProblemSpec ps{3, 3, 1.0, cplx{0.9, 0.0}};
    const auto mp = solve(ps);
    REQUIRE(support_splits(mp));
    CHECK(sample_boundary(make_rotated_map(mp), 512).components.size() == 3);
  }
}

TEST_CASE("sample_boundary: pre-critical tracked samples equal the closed-form rotated map") {
  for (const auto& [n, d, ratio] :
       std::vector<std::tuple<int, int, double>>{{9, 7, 0.7}, {2, 3, 0.6}, {1, 2, 0.3}}) {
    ProblemSpec ps{n, d, 1.0, {}};
    const double scale = (d == 2 * n) ? 1.0 : critical_threshold(ps);
    ps.t = std::polar(ratio * scale, 1.3);
    const auto mp = solve(ps);
    const auto g = make_rotated_map(mp);
    const auto curve = sample_boundary(g, 128);
    const int mm = curve.samples_per_component;
    // the orientation fix may have reversed the node order
    const auto& loop = curve.components[0];
    const cplx first_expected = eval_g_rotated(g, std::polar(1.0, 0.0));
    const bool reversed = std::abs(loop[0] - first_expected) > 1e-9;
    for (int j = 0; j < mm; ++j) {
      const cplx u = std::polar(1.0, 2.0 * std::numbers::pi * j / mm);
      const cplx sampled = reversed ? loop[(mm - j) % mm] : loop[j];
      const cplx closed = eval_g_rotated(g, u);
      CHECK(std::abs(sampled - closed) <= 1e-12 * std::max(1.0, std::abs(closed)));
    }
  }
}

TEST_CASE("sample_boundary: rotated set is invariant under the d-fold rotation") {
  for (const double ratio : {0.7, 1.25}) {
    ProblemSpec ps{9, 7, 1.0, {}};
    ps.t = std::polar(ratio * critical_threshold(ps), 0.33);
    const auto curve = sample_boundary(make_rotated_map(solve(ps)), 256);
    const auto pts = flatten(curve);
    std::vector<cplx> turned;
    turned.reserve(pts.size());
    const cplx rot = std::polar(1.0, 2.0 * std::numbers::pi / 7.0);
    for (const cplx z : pts) turned.push_back(rot * z);
    CHECK(directed_hausdorff_points(turned, pts) <= 1e-10);
    CHECK(directed_hausdorff_points(pts, turned) <= 1e-10);
  }
}

TEST_CASE("sample_boundary: refinement self-convergence at second order") {
  for (const double ratio : {0.6, 1.4}) {
    ProblemSpec ps{9, 7, 1.0, {}};
    ps.t = ratio * critical_threshold(ps);
    const auto map = make_rotated_map(solve(ps));
    auto h = [&](int m_coarse) {
      const auto coarse = sample_boundary(map, m_coarse);
      const auto fine = sample_boundary(map, 2 * m_coarse);
      const auto a = flatten(coarse);
      const auto b = flatten(fine);
      return std::max(directed_hausdorff_to_polylines(a, fine.components),
                      directed_hausdorff_to_polylines(b, coarse.components));
    };
    const double h1 = h(512);
    const double h2 = h(1024);
    CHECK(h2 <= h1 / 2.5);  // ~4x per doubling away from criticality
  }
}

TEST_CASE("sample_boundary: critical rotated petals close up through the pinch") {
  ProblemSpec ps{9, 7, 1.0, {}};
  ps.t = critical_threshold(ps);
  const auto mp = solve(ps);
  REQUIRE(mp.regime == Regime::critical);
  const int m = 2048;
  const auto curve = sample_boundary(make_rotated_map(mp), m);
  REQUIRE(curve.components.size() == 1);
  const auto& loop = curve.components[0];
  CHECK(loop.front() == loop.back());
  // The petal tips taper like the d-th root of f: with the boundary zero at
  // w = alpha an angular distance delta from the nearest sample, the closest
  // approach to the origin is (r (2 sin(delta/2))^(d/n))^(1/d).
  double closest = std::numeric_limits<double>::infinity();
  for (const cplx z : loop) closest = std::min(closest, std::abs(z));
  const double wstep = 2.0 * std::numbers::pi * 7.0 / m;
  double delta = std::numeric_limits<double>::infinity();
  for (int j = 0; j < m; ++j) {
    const double wphase = wstep * (j + 0.5);
    delta = std::min(delta, std::abs(std::remainder(wphase - std::arg(mp.alpha),
                                                    2.0 * std::numbers::pi)));
  }
  const double predicted =
      std::pow(mp.r * std::pow(2.0 * std::sin(0.5 * delta), 7.0 / 9.0), 1.0 / 7.0);
  CHECK(closest > 0.0);
  CHECK(closest == doctest::Approx(predicted).epsilon(0.2));
}

TEST_CASE("sample_boundary: no sheet slips through the critical pinch") {
  // At criticality the tracked argument jumps by (d/n)pi across the boundary
  // zero; for n < d that exceeds pi and needs the corrected unwrap. A slipped
  // sheet would rotate the remaining arc by e^(2 pi i/d), showing up as a
  // diameter-scale gap between adjacent samples away from the petal tips.
  for (const auto& [n, d] : std::vector<std::pair<int, int>>{{3, 5}, {9, 7}, {5, 8}}) {
    ProblemSpec ps{n, d, 1.0, {}};
    ps.t = std::polar(critical_threshold(ps), 0.9);
    const auto mp = solve(ps);
    REQUIRE(mp.regime == Regime::critical);
    const auto curve = sample_boundary(make_rotated_map(mp), 2048);
    REQUIRE(curve.components.size() == 1);
    const auto& loop = curve.components[0];
    double max_abs = 0.0;
    for (const cplx z : loop) max_abs = std::max(max_abs, std::abs(z));
    for (std::size_t j = 0; j + 1 < loop.size(); ++j) {
      if (std::abs(loop[j]) > 0.7 * max_abs) {
        CHECK(std::abs(loop[j + 1] - loop[j]) < 0.1 * max_abs);
      }
    }
  }
}

TEST_CASE("normalization: f(Ru)/(r R u) -> 1 at rate 1/R") {
  for (const auto& [n, d, ratio] :
       std::vector<std::tuple<int, int, double>>{{2, 1, 0.6}, {2, 1, 1.6}, {9, 7, 0.9}}) {
    ProblemSpec ps{n, d, 1.0, {}};
    ps.t = std::polar(ratio * critical_threshold(ps), 0.51);
    const auto mp = solve(ps);
    const auto map = make_reduced_map(mp);
    const double aa = std::abs(mp.alpha);
    const double C = 4.0 * (1.0 + aa + (mp.regime == Regime::post_critical ? 1.0 / aa : 0.0));
    const cplx u0 = std::polar(1.0, 0.7);
    for (const double R : {10.0, 100.0, 1000.0}) {
      CHECK(std::abs(eval_f(map, R * u0) / (mp.r * R * u0) - 1.0) <= C / R);
    }
  }
}

TEST_CASE("critical matching: pre and post forms coincide at the threshold") {
  for (const auto& [n, d] : std::vector<std::pair<int, int>>{{9, 7}, {2, 1}, {3, 5}}) {
    ProblemSpec ps{n, d, 1.0, {}};
    ps.t = std::polar(critical_threshold(ps), 0.4);
    const auto mp = solve(ps);
    REQUIRE(mp.regime == Regime::critical);
    MapParams pre_mp = mp;
    pre_mp.regime = Regime::pre_critical;
    MapParams post_mp = mp;
    post_mp.regime = Regime::post_critical;
    const ConformalMap pre_map{pre_mp, MapKind::reduced_pre};
    const ConformalMap post_map{post_mp, MapKind::reduced_post};
    for (const cplx u : random_exterior_points(256, 1.0 + 1e-6, 10.0, 31)) {
      const cplx a = eval_f(pre_map, u);
      const cplx b = eval_f(post_map, u);
      CHECK(std::abs(a - b) <= 1e-13 * std::max(1.0, std::abs(a)));
    }
  }
}

TEST_CASE("check_starlike: margins stay positive pre-critically") {
  // alpha = 0: Re(u f'/f) = 1 exactly
  {
    const auto rep = check_starlike(make_reduced_map(solved(9, 7, 1.0, {})));
    CHECK(rep.min_re_log_deriv == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(rep.pass);
  }
  for (const auto& [n, d, ratio] : std::vector<std::tuple<int, int, double>>{
           {2, 1, 0.5}, {2, 1, 0.95}, {9, 7, 0.9}, {2, 3, 0.8}, {5, 8, 0.7}}) {
    ProblemSpec ps{n, d, 1.0, {}};
    ps.t = std::polar(ratio * critical_threshold(ps), 0.9);
    const auto rep = check_starlike(make_reduced_map(solve(ps)));
    CHECK(rep.pass);
    CHECK(rep.sufficient_condition);
    CHECK(rep.min_re_log_deriv > 0.0);
  }
  // near-degenerate: |alpha| -> 1 with a dense ring hugging u = -alpha/|alpha|
  {
    ProblemSpec ps{2, 1, 1.0, {}};
    ps.t = 0.999 * critical_threshold(ps);
    const auto mp = solve(ps);
    const auto view_alpha = mp.alpha;
    const auto map = make_reduced_map(mp);
    GridSpec dense;
    dense.radii = 4;
    dense.radius_max = 1.001;
    dense.near_boundary_radii = 64;
    dense.near_boundary_band = 1e-6;
    dense.phases = 4096;
    const auto rep = check_starlike(map, dense);
    CHECK(rep.pass);
    // the infimum direction is u = -alpha/|alpha|; margin ~ 1 - (d/n)|a|/(1+|a|)
    const double predicted = 1.0 - 0.5 * std::abs(view_alpha) / (1.0 + std::abs(view_alpha));
    CHECK(rep.min_re_log_deriv == doctest::Approx(predicted).epsilon(1e-3));
  }
  // misuse guards
  {
    ProblemSpec ps{2, 1, 1.0, {}};
    ps.t = 1.5 * critical_threshold(ps);
    CHECK_THROWS_AS(check_starlike(make_reduced_map(solve(ps))), error);
  }
}

TEST_CASE("check_boundary_injective: post-critical boundary is simple") {
  {
    const auto mp = solved(2, 1, 1.0, cplx{2.0, 0.0});
    const auto rep = check_boundary_injective(make_reduced_map(mp), 4096);
    CHECK(rep.pass);
    CHECK(rep.modulus_monotone);
    CHECK(rep.imag_sign_consistent);
    CHECK(rep.no_segment_crossing);
  }
  // d/n close to 1: nearly affine in the rescaled variable
  {
    ProblemSpec ps{9, 8, 1.0, {}};
    ps.t = std::polar(1.5 * critical_threshold(ps), 2.2);
    const auto rep = check_boundary_injective(make_reduced_map(solve(ps)), 2048);
    CHECK(rep.pass);
  }
  // mu = 0 and pi are the modulus extremes: the monotonicity check covers it,
  // and the extreme points are the two real-axis images in the rescaled frame
  {
    const auto mp = solved(2, 1, 1.0, cplx{2.0, 0.0});
    const auto map = make_reduced_map(mp);
    const double a = std::abs(mp.alpha);
    const cplx fix = a / std::conj(mp.alpha);
    const double at0 = std::abs(eval_f(map, fix * std::polar(1.0, 0.0)));
    const double atpi = std::abs(eval_f(map, fix * std::polar(1.0, std::numbers::pi)));
    for (int j = 1; j < 64; ++j) {
      const double mu = std::numbers::pi * j / 64.0;
      const double mid = std::abs(eval_f(map, fix * std::polar(1.0, mu)));
      CHECK(mid > at0);
      CHECK(mid < atpi);
    }
  }
}

TEST_CASE("geometry: the self-intersection predicate catches a figure eight") {
  // sampled off-node so the crossing falls mid-segment
  std::vector<cplx> eight;
  for (int k = 0; k < 64; ++k) {
    const double s = 2.0 * std::numbers::pi * (k + 0.5) / 64.0;
    eight.push_back(cplx{std::sin(2.0 * s), std::sin(s)});
  }
  eight.push_back(eight.front());
  CHECK(polyline_self_intersects(eight));
  std::vector<cplx> circle;
  for (int k = 0; k <= 64; ++k) {
    circle.push_back(std::polar(1.0, 2.0 * std::numbers::pi * k / 64.0));
  }
  CHECK(!polyline_self_intersects(circle));
}
