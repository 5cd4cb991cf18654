// Planar polyline predicates: orientation, winding numbers, segment
// intersection, distances, diameters and single-linkage clustering.
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

#include "equilib/types.hpp"

namespace equilib {

inline double cross(cplx o, cplx a, cplx b) {
  return (a.real() - o.real()) * (b.imag() - o.imag()) -
         (a.imag() - o.imag()) * (b.real() - o.real());
}

// Shoelace area; positive for counterclockwise loops. Accepts open or closed
// (first == last) point lists.
inline double signed_area(std::span<const cplx> pts) {
  const std::size_t n = pts.size();
  if (n < 3) return 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    acc += pts[i].real() * pts[i + 1].imag() - pts[i + 1].real() * pts[i].imag();
  }
  if (pts.front() != pts.back()) {
    acc += pts[n - 1].real() * pts[0].imag() - pts[0].real() * pts[n - 1].imag();
  }
  return 0.5 * acc;
}

// Winding number of a closed polyline around p (nonzero rule).
inline int winding_number(std::span<const cplx> pts, cplx p) {
  const std::size_t n = pts.size();
  if (n < 3) return 0;
  int wn = 0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const cplx a = pts[i];
    const cplx b = pts[i + 1];
    if (a.imag() <= p.imag()) {
      if (b.imag() > p.imag() && cross(a, b, p) > 0.0) ++wn;
    } else {
      if (b.imag() <= p.imag() && cross(a, b, p) < 0.0) --wn;
    }
  }
  return wn;
}

inline bool point_in_polygon(std::span<const cplx> closed_loop, cplx p) {
  return winding_number(closed_loop, p) != 0;
}

inline double dist_point_segment(cplx p, cplx a, cplx b) {
  const cplx ab = b - a;
  const double len2 = std::norm(ab);
  if (len2 == 0.0) return std::abs(p - a);
  double tproj = ((p.real() - a.real()) * ab.real() + (p.imag() - a.imag()) * ab.imag()) / len2;
  tproj = std::clamp(tproj, 0.0, 1.0);
  return std::abs(p - (a + tproj * ab));
}

inline double dist_point_polyline(cplx p, std::span<const cplx> pts) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    best = std::min(best, dist_point_segment(p, pts[i], pts[i + 1]));
  }
  return best;
}

namespace detail {
inline bool on_segment(cplx a, cplx b, cplx p) {
  return std::min(a.real(), b.real()) <= p.real() && p.real() <= std::max(a.real(), b.real()) &&
         std::min(a.imag(), b.imag()) <= p.imag() && p.imag() <= std::max(a.imag(), b.imag());
}
}  // namespace detail

// Proper crossing test; collinear touching points count as an intersection.
inline bool segments_intersect(cplx a, cplx b, cplx c, cplx d) {
  const double d1 = cross(c, d, a);
  const double d2 = cross(c, d, b);
  const double d3 = cross(a, b, c);
  const double d4 = cross(a, b, d);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) {
    return true;
  }
  if (d1 == 0 && detail::on_segment(c, d, a)) return true;
  if (d2 == 0 && detail::on_segment(c, d, b)) return true;
  if (d3 == 0 && detail::on_segment(a, b, c)) return true;
  if (d4 == 0 && detail::on_segment(a, b, d)) return true;
  return false;
}

// Self-intersection test for a closed loop given as points with
// front() == back(). Adjacent segments (sharing an endpoint, including the
// wrap-around pair) are skipped. Sorted sweep over x keeps this near-linear
// for smooth curves.
inline bool polyline_self_intersects(std::span<const cplx> pts) {
  const std::size_t n = pts.size();
  if (n < 4) return false;
  const std::size_t segs = n - 1;  // closing point duplicated
  std::vector<std::size_t> order(segs);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<double> xmin(segs), xmax(segs);
  for (std::size_t i = 0; i < segs; ++i) {
    xmin[i] = std::min(pts[i].real(), pts[i + 1].real());
    xmax[i] = std::max(pts[i].real(), pts[i + 1].real());
  }
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return xmin[a] < xmin[b]; });
  for (std::size_t oi = 0; oi < segs; ++oi) {
    const std::size_t i = order[oi];
    for (std::size_t oj = oi + 1; oj < segs; ++oj) {
      const std::size_t j = order[oj];
      if (xmin[j] > xmax[i]) break;
      const std::size_t lo = std::min(i, j);
      const std::size_t hi = std::max(i, j);
      if (hi - lo <= 1) continue;
      if (lo == 0 && hi == segs - 1) continue;  // wrap-around neighbours
      if (segments_intersect(pts[i], pts[i + 1], pts[j], pts[j + 1])) return true;
    }
  }
  return false;
}

// Directed Hausdorff distance from points of a to the polyline(s) b.
inline double directed_hausdorff_to_polylines(std::span<const cplx> a,
                                              const std::vector<std::vector<cplx>>& b) {
  double worst = 0.0;
  for (const cplx& p : a) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& poly : b) best = std::min(best, dist_point_polyline(p, poly));
    worst = std::max(worst, best);
  }
  return worst;
}

// Directed Hausdorff between raw point sets.
inline double directed_hausdorff_points(std::span<const cplx> a, std::span<const cplx> b) {
  double worst = 0.0;
  for (const cplx& p : a) {
    double best = std::numeric_limits<double>::infinity();
    for (const cplx& q : b) best = std::min(best, std::abs(p - q));
    worst = std::max(worst, best);
  }
  return worst;
}

inline std::vector<cplx> convex_hull(std::vector<cplx> pts) {
  std::sort(pts.begin(), pts.end(), [](cplx a, cplx b) {
    return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag());
  });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  const std::size_t n = pts.size();
  if (n < 3) return pts;
  std::vector<cplx> hull(2 * n);
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  for (std::size_t i = n - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

inline double diameter(std::span<const cplx> pts) {
  const auto hull = convex_hull(std::vector<cplx>(pts.begin(), pts.end()));
  double best = 0.0;
  for (std::size_t i = 0; i < hull.size(); ++i) {
    for (std::size_t j = i + 1; j < hull.size(); ++j) {
      best = std::max(best, std::abs(hull[i] - hull[j]));
    }
  }
  return best;
}

// Number of single-linkage clusters with the given merge cutoff.
inline int cluster_count(std::span<const cplx> pts, double cutoff) {
  const std::size_t n = pts.size();
  if (n == 0) return 0;
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (std::abs(pts[i] - pts[j]) <= cutoff) {
        parent[find(i)] = find(j);
      }
    }
  }
  int roots = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (find(i) == i) ++roots;
  }
  return roots;
}

}  // namespace equilib
