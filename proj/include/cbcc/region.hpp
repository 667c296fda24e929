#pragma once

// Rate and d.o.f. regions as small polytopes in the nonnegative orthant.
//
// A region keeps both representations: its vertex list and a list of
// halfspaces n . x <= c. Nonnegativity of every coordinate is implicit and is
// not stored as a halfspace. Analytic regions use exact rationals; regions
// built from simulated points use doubles with a 1e-12 membership tolerance.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <boost/rational.hpp>
#include <nlohmann/json.hpp>

#include "cbcc/errors.hpp"

namespace cbcc {

// Compare against Rational(n), not bare integers: boost 1.74 mixed
// operator== recurses under C++20 rewritten comparisons.
using Rational = boost::rational<std::int64_t>;

template <typename T>
struct ScalarTraits;

template <>
struct ScalarTraits<double> {
  static constexpr double tolerance() { return 1e-12; }
  static double to_double(double x) { return x; }
};

template <>
struct ScalarTraits<Rational> {
  static Rational tolerance() { return Rational(0); }
  static double to_double(const Rational& x) { return boost::rational_cast<double>(x); }
};

template <typename T>
using Point = std::vector<T>;

template <typename T>
struct Halfspace {
  std::vector<T> normal;
  T offset{};

  friend bool operator==(const Halfspace&, const Halfspace&) = default;
};

template <typename T>
struct RateRegion {
  std::size_t dimension = 2;
  std::vector<Point<T>> vertices;            // sorted lexicographically
  std::vector<Halfspace<T>> inequalities;    // canonical form, deduplicated
  bool downward_closed = true;
};

namespace detail {

template <typename T>
T dot(const std::vector<T>& a, const std::vector<T>& b) {
  T s(0);
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

template <typename T>
T cross(const Point<T>& o, const Point<T>& a, const Point<T>& b) {
  return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
}

template <typename T>
bool approx_equal(const Point<T>& a, const Point<T>& b) {
  const T tol = ScalarTraits<T>::tolerance();
  for (std::size_t i = 0; i < a.size(); ++i) {
    const T d = a[i] - b[i];
    if (d > tol || -d > tol) return false;
  }
  return true;
}

template <typename T>
void sort_unique(std::vector<Point<T>>& pts) {
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](const Point<T>& a, const Point<T>& b) { return approx_equal(a, b); }),
            pts.end());
}

// Solves the square system rows . x = rhs by Gauss-Jordan elimination.
// Returns false when the system is singular.
template <typename T>
bool solve_square(std::vector<std::vector<T>> a, std::vector<T> rhs, std::vector<T>& x) {
  const std::size_t n = rhs.size();
  const T tol = ScalarTraits<T>::tolerance() * T(1000);
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = n;
    T best(0);
    for (std::size_t r = col; r < n; ++r) {
      const T mag = a[r][col] < T(0) ? -a[r][col] : a[r][col];
      if (mag > tol && (piv == n || mag > best)) {
        piv = r;
        best = mag;
      }
    }
    if (piv == n) return false;
    std::swap(a[piv], a[col]);
    std::swap(rhs[piv], rhs[col]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || a[r][col] == T(0)) continue;
      const T f = a[r][col] / a[col][col];
      for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
      rhs[r] -= f * rhs[col];
    }
  }
  x.assign(n, T(0));
  for (std::size_t i = 0; i < n; ++i) x[i] = rhs[i] / a[i][i];
  return true;
}

}  // namespace detail

/// Scales a halfspace so that its smallest positive normal component is 1.
template <typename T>
Halfspace<T> canonical(Halfspace<T> h) {
  T smallest(0);
  bool found = false;
  for (const T& v : h.normal) {
    if (v > ScalarTraits<T>::tolerance() && (!found || v < smallest)) {
      smallest = v;
      found = true;
    }
  }
  if (!found) return h;
  for (T& v : h.normal) v /= smallest;
  h.offset /= smallest;
  return h;
}

/// Membership: all coordinates >= 0 and every halfspace satisfied.
template <typename T>
bool contains(const RateRegion<T>& region, const Point<T>& point) {
  if (point.size() != region.dimension) {
    throw DimensionMismatch("point of dimension " + std::to_string(point.size()) +
                            " tested against a " + std::to_string(region.dimension) + "-D region");
  }
  const T tol = ScalarTraits<T>::tolerance();
  for (const T& x : point) {
    if (x < -tol) return false;
  }
  for (const auto& h : region.inequalities) {
    if (detail::dot(h.normal, point) > h.offset + tol) return false;
  }
  return true;
}

/// The downward-closed polytope {x >= 0 : n . x <= c for each halfspace},
/// with vertices enumerated by intersecting every choice of `dimension`
/// bounding planes (coordinate planes included).
template <typename T>
RateRegion<T> region_from_inequalities(std::size_t dimension, std::vector<Halfspace<T>> ineqs) {
  if (dimension != 2 && dimension != 3) throw InvalidInput("regions must be 2-D or 3-D");
  for (auto& h : ineqs) {
    if (h.normal.size() != dimension) throw DimensionMismatch("halfspace dimension mismatch");
    h = canonical(std::move(h));
  }
  std::sort(ineqs.begin(), ineqs.end(), [](const Halfspace<T>& a, const Halfspace<T>& b) {
    return a.normal != b.normal ? a.normal < b.normal : a.offset < b.offset;
  });
  ineqs.erase(std::unique(ineqs.begin(), ineqs.end()), ineqs.end());

  RateRegion<T> region;
  region.dimension = dimension;
  region.inequalities = ineqs;

  // Planes: the stored halfspaces followed by x_i = 0.
  std::vector<Halfspace<T>> planes = ineqs;
  for (std::size_t i = 0; i < dimension; ++i) {
    Halfspace<T> axis{std::vector<T>(dimension, T(0)), T(0)};
    axis.normal[i] = T(1);
    planes.push_back(axis);
  }
  std::vector<std::size_t> pick(dimension);
  const std::size_t n = planes.size();
  auto visit = [&]() {
    std::vector<std::vector<T>> a;
    std::vector<T> rhs;
    for (std::size_t i : pick) {
      a.push_back(planes[i].normal);
      rhs.push_back(planes[i].offset);
    }
    std::vector<T> x;
    if (detail::solve_square(a, rhs, x) && contains(region, x)) region.vertices.push_back(x);
  };
  for (std::size_t i = 0; i < dimension; ++i) pick[i] = i;
  while (n >= dimension) {
    visit();
    std::size_t i = dimension;
    while (i > 0 && pick[i - 1] == n - dimension + (i - 1)) --i;
    if (i == 0) break;
    ++pick[i - 1];
    for (std::size_t r = i; r < dimension; ++r) pick[r] = pick[r - 1] + 1;
  }
  detail::sort_unique(region.vertices);
  return region;
}

/// Downward closure of the convex hull of `points` and the origin (2-D).
///
/// Every point is augmented with its projections onto both axes, the hull is
/// built by a monotone chain, and the halfspaces are the hull edges whose
/// outward normal is nonnegative. A hull with no interior (origin only, or a
/// segment on an axis) is described by per-coordinate upper bounds instead.
template <typename T>
RateRegion<T> time_share(const std::vector<Point<T>>& points) {
  const T tol = ScalarTraits<T>::tolerance();
  std::vector<Point<T>> pts{{T(0), T(0)}};
  for (const auto& p : points) {
    if (p.size() != 2) throw DimensionMismatch("time_share expects 2-D points");
    if (p[0] < -tol || p[1] < -tol) throw InvalidInput("time_share points must be nonnegative");
    pts.push_back(p);
    pts.push_back({p[0], T(0)});
    pts.push_back({T(0), p[1]});
  }
  detail::sort_unique(pts);

  std::vector<Point<T>> hull;
  if (pts.size() <= 2) {
    hull = pts;
  } else {
    std::vector<Point<T>> chain(2 * pts.size());
    std::size_t k = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      while (k >= 2 && detail::cross(chain[k - 2], chain[k - 1], pts[i]) <= tol) --k;
      chain[k++] = pts[i];
    }
    for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
      while (k >= lower && detail::cross(chain[k - 2], chain[k - 1], pts[i]) <= tol) --k;
      chain[k++] = pts[i];
    }
    chain.resize(k - 1);
    hull = std::move(chain);
  }

  RateRegion<T> region;
  region.dimension = 2;
  if (hull.size() >= 3) {
    for (std::size_t i = 0; i < hull.size(); ++i) {
      const auto& a = hull[i];
      const auto& b = hull[(i + 1) % hull.size()];
      Halfspace<T> h{{b[1] - a[1], a[0] - b[0]}, T(0)};
      const bool nonneg = h.normal[0] >= -tol && h.normal[1] >= -tol;
      const bool nonzero = h.normal[0] > tol || h.normal[1] > tol;
      if (!nonneg || !nonzero) continue;
      h.offset = detail::dot(h.normal, a);
      region.inequalities.push_back(canonical(h));
    }
  } else {
    for (std::size_t i = 0; i < 2; ++i) {
      T top(0);
      for (const auto& v : hull) top = std::max(top, v[i]);
      Halfspace<T> h{{T(0), T(0)}, top};
      h.normal[i] = T(1);
      region.inequalities.push_back(h);
    }
  }
  region.vertices = std::move(hull);
  detail::sort_unique(region.vertices);
  return region;
}

/// True when `a` contains every vertex of `b` (a superset of b, both convex).
template <typename T>
bool dominates(const RateRegion<T>& a, const RateRegion<T>& b) {
  if (a.dimension != b.dimension) {
    throw DimensionMismatch("cannot compare a " + std::to_string(a.dimension) + "-D region with a " +
                            std::to_string(b.dimension) + "-D region");
  }
  return std::all_of(b.vertices.begin(), b.vertices.end(),
                     [&](const Point<T>& v) { return contains(a, v); });
}

template <typename T>
bool equivalent(const RateRegion<T>& a, const RateRegion<T>& b) {
  return dominates(a, b) && dominates(b, a);
}

/// Vertices of `a` lying outside `b`.
template <typename T>
std::vector<Point<T>> witnesses(const RateRegion<T>& a, const RateRegion<T>& b) {
  std::vector<Point<T>> out;
  for (const auto& v : a.vertices) {
    if (!contains(b, v)) out.push_back(v);
  }
  return out;
}

template <typename T>
bool has_vertex(const RateRegion<T>& region, const Point<T>& p) {
  return std::any_of(region.vertices.begin(), region.vertices.end(),
                     [&](const Point<T>& v) { return detail::approx_equal(v, p); });
}

/// The slice {x : x_axis = 0} of a downward-closed region, with that
/// coordinate dropped. For downward-closed regions this is also the
/// projection onto the remaining coordinates.
template <typename T>
RateRegion<T> slice_at_zero(const RateRegion<T>& region, std::size_t axis) {
  if (region.dimension != 3 || axis >= 3) throw InvalidInput("slice_at_zero expects a 3-D region");
  std::vector<Point<T>> pts;
  for (const auto& v : region.vertices) {
    if (v[axis] == T(0)) {
      Point<T> p;
      for (std::size_t i = 0; i < 3; ++i) {
        if (i != axis) p.push_back(v[i]);
      }
      pts.push_back(p);
    }
  }
  return time_share(pts);
}

RateRegion<double> to_double(const RateRegion<Rational>& region);

nlohmann::json to_json(const RateRegion<Rational>& region);
nlohmann::json to_json(const RateRegion<double>& region);
RateRegion<Rational> rational_region_from_json(const nlohmann::json& doc);

nlohmann::json rational_to_json(const Rational& r);
Rational rational_from_json(const nlohmann::json& j);
std::string to_string(const Rational& r);

}  // namespace cbcc
