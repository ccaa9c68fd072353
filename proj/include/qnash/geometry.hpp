#pragma once

// Geometry behind the embedding argument, realized on CP¹: the Bloch map
// into R³, 3-d convex hulls and their extreme points, the radial
// homeomorphism of a hull onto the closed unit ball, the upper-hemisphere
// retract, and a statistical test for the case S = ∂Conv(S).

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <random>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "qnash/config.hpp"
#include "qnash/errors.hpp"
#include "qnash/tensor.hpp"

namespace qnash {

using Point3 = Eigen::Vector3d;

// (2 Re(ᾱβ), 2 Im(ᾱβ), |α|² - |β|²) for the qubit α|0⟩ + β|1⟩.
inline Point3 bloch_embedding(const PureState& p) {
  if (p.dimension() != 2) throw DimensionError("bloch_embedding: qubit state required");
  const Complex a = p[0], b = p[1];
  const Complex ab = std::conj(a) * b;
  return {2.0 * ab.real(), 2.0 * ab.imag(), std::norm(a) - std::norm(b)};
}

inline double great_circle_distance(const Point3& a, const Point3& b) {
  return std::atan2(a.cross(b).norm(), a.dot(b));
}

struct IsometryReport {
  std::size_t pairs = 0;
  double max_deviation = 0.0;  // max |great-circle - 2·FS|
  bool passed(double tol = 1e-9) const { return max_deviation <= tol; }
};

inline IsometryReport isometry_check(std::span<const std::pair<PureState, PureState>> pairs) {
  IsometryReport r;
  for (const auto& [p, q] : pairs) {
    const double sphere = great_circle_distance(bloch_embedding(p), bloch_embedding(q));
    const double fs = fubini_study_distance(p, q);
    r.max_deviation = std::max(r.max_deviation, std::abs(sphere - 2.0 * fs));
    ++r.pairs;
  }
  return r;
}

struct Facet {
  std::array<std::size_t, 3> vertices{};  // indices into ConvexHull::vertices, counter-clockwise from outside
  Point3 normal = Point3::Zero();         // outward unit normal
  double offset = 0.0;                    // normal · x = offset on the facet plane
  double area = 0.0;
};

struct ConvexHull {
  std::vector<Point3> vertices;
  std::vector<Facet> facets;
  Point3 centroid = Point3::Zero();

  // Largest signed distance of p above any facet plane.
  double max_excess(const Point3& p) const {
    double m = -std::numeric_limits<double>::infinity();
    for (const auto& f : facets) m = std::max(m, f.normal.dot(p) - f.offset);
    return m;
  }
  bool contains(const Point3& p, double tol = kDefaultTolerances.hull_containment) const {
    return max_excess(p) <= tol;
  }
  double surface_area() const {
    double a = 0.0;
    for (const auto& f : facets) a += f.area;
    return a;
  }
};

namespace detail {

struct HullFace {
  std::array<std::size_t, 3> v;
  Point3 normal;
  double offset;
};

inline HullFace make_face(const std::vector<Point3>& pts, std::size_t a, std::size_t b,
                          std::size_t c, const Point3& interior) {
  Point3 n = (pts[b] - pts[a]).cross(pts[c] - pts[a]);
  const double len = n.norm();
  if (len > 0) n /= len;
  HullFace f{{a, b, c}, n, n.dot(pts[a])};
  if (f.normal.dot(interior) - f.offset > 0) {
    std::swap(f.v[1], f.v[2]);
    f.normal = -f.normal;
    f.offset = -f.offset;
  }
  return f;
}

// Incremental construction over the given points (already deduplicated).
// Returns faces indexing into pts.
inline std::vector<HullFace> incremental_hull(const std::vector<Point3>& pts, double plane_tol) {
  const std::size_t n = pts.size();
  if (n < 4) throw DegenerateInputError("convex_hull: at least 4 distinct points required");

  double scale = 0.0;
  for (const auto& p : pts) scale = std::max(scale, p.cwiseAbs().maxCoeff());
  scale = std::max(scale, 1.0);
  const double eps = plane_tol * scale;
  const double degenerate = 1e-10 * scale;

  std::size_t i0 = 0;
  for (std::size_t k = 1; k < n; ++k)
    if (pts[k].x() < pts[i0].x()) i0 = k;
  std::size_t i1 = i0;
  double best = -1;
  for (std::size_t k = 0; k < n; ++k)
    if (double d = (pts[k] - pts[i0]).norm(); d > best) best = d, i1 = k;
  if (best <= degenerate) throw DegenerateInputError("convex_hull: all points coincide");
  const Point3 axis = (pts[i1] - pts[i0]).normalized();
  std::size_t i2 = i0;
  best = -1;
  for (std::size_t k = 0; k < n; ++k)
    if (double d = (pts[k] - pts[i0]).cross(axis).norm(); d > best) best = d, i2 = k;
  if (best <= degenerate) throw DegenerateInputError("convex_hull: points are collinear");
  const Point3 plane_n = (pts[i1] - pts[i0]).cross(pts[i2] - pts[i0]).normalized();
  std::size_t i3 = i0;
  best = -1;
  for (std::size_t k = 0; k < n; ++k)
    if (double d = std::abs(plane_n.dot(pts[k] - pts[i0])); d > best) best = d, i3 = k;
  if (best <= degenerate) throw DegenerateInputError("convex_hull: points are coplanar");

  const Point3 interior = (pts[i0] + pts[i1] + pts[i2] + pts[i3]) / 4.0;
  std::vector<HullFace> faces{make_face(pts, i0, i1, i2, interior), make_face(pts, i0, i1, i3, interior),
                              make_face(pts, i0, i2, i3, interior), make_face(pts, i1, i2, i3, interior)};

  std::vector<char> visible;
  std::map<std::pair<std::size_t, std::size_t>, int> edges;
  for (std::size_t k = 0; k < n; ++k) {
    if (k == i0 || k == i1 || k == i2 || k == i3) continue;
    const Point3& p = pts[k];
    visible.assign(faces.size(), 0);
    bool any = false;
    for (std::size_t f = 0; f < faces.size(); ++f)
      if (faces[f].normal.dot(p) - faces[f].offset > eps) visible[f] = 1, any = true;
    if (!any) continue;

    edges.clear();
    for (std::size_t f = 0; f < faces.size(); ++f) {
      if (!visible[f]) continue;
      const auto& v = faces[f].v;
      for (int e = 0; e < 3; ++e) edges[{v[e], v[(e + 1) % 3]}] += 1;
    }
    std::vector<HullFace> next;
    next.reserve(faces.size() + 8);
    for (std::size_t f = 0; f < faces.size(); ++f)
      if (!visible[f]) next.push_back(faces[f]);
    for (const auto& [edge, count] : edges) {
      if (edges.count({edge.second, edge.first})) continue;  // interior edge of the visible patch
      next.push_back(make_face(pts, edge.first, edge.second, k, interior));
    }
    faces = std::move(next);
  }
  return faces;
}

inline ConvexHull assemble(const std::vector<Point3>& pts, const std::vector<HullFace>& faces) {
  ConvexHull hull;
  std::unordered_map<std::size_t, std::size_t> remap;
  for (const auto& f : faces)
    for (auto v : f.v)
      if (!remap.count(v)) {
        remap[v] = hull.vertices.size();
        hull.vertices.push_back(pts[v]);
      }
  for (const auto& v : hull.vertices) hull.centroid += v;
  hull.centroid /= static_cast<double>(hull.vertices.size());
  for (const auto& f : faces) {
    Facet out;
    out.vertices = {remap[f.v[0]], remap[f.v[1]], remap[f.v[2]]};
    out.normal = f.normal;
    out.offset = f.offset;
    const Point3& a = pts[f.v[0]];
    out.area = 0.5 * (pts[f.v[1]] - a).cross(pts[f.v[2]] - a).norm();
    hull.facets.push_back(out);
  }
  return hull;
}

// A hull vertex is extreme iff the normals of its incident facets span R³;
// otherwise it sits inside a flat face or on a straight edge.
inline std::vector<bool> extreme_vertices(const ConvexHull& hull) {
  std::vector<std::vector<Point3>> normals(hull.vertices.size());
  for (const auto& f : hull.facets)
    for (auto v : f.vertices) normals[v].push_back(f.normal);
  std::vector<bool> extreme(hull.vertices.size(), false);
  for (std::size_t v = 0; v < normals.size(); ++v) {
    const auto& ns = normals[v];
    for (std::size_t a = 0; a < ns.size() && !extreme[v]; ++a)
      for (std::size_t b = a + 1; b < ns.size() && !extreme[v]; ++b)
        for (std::size_t c = b + 1; c < ns.size(); ++c)
          if (std::abs(ns[a].dot(ns[b].cross(ns[c]))) > 1e-10) {
            extreme[v] = true;
            break;
          }
  }
  return extreme;
}

}  // namespace detail

// Convex hull of a 3-d point cloud. Coincident points collapse to one
// vertex and every returned vertex is an extreme point.
inline ConvexHull convex_hull(std::span<const Point3> points,
                              const Tolerances& tol = kDefaultTolerances) {
  std::vector<Point3> pts;
  pts.reserve(points.size());
  {
    std::vector<std::array<double, 3>> sorted;
    sorted.reserve(points.size());
    for (const auto& p : points) {
      if (!p.allFinite()) throw InvariantError("convex_hull: non-finite coordinate");
      sorted.push_back({p.x(), p.y(), p.z()});
    }
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    for (const auto& s : sorted) pts.emplace_back(s[0], s[1], s[2]);
  }
  auto faces = detail::incremental_hull(pts, tol.hull_plane);
  ConvexHull hull = detail::assemble(pts, faces);

  const auto extreme = detail::extreme_vertices(hull);
  if (std::find(extreme.begin(), extreme.end(), false) != extreme.end()) {
    std::vector<Point3> kept;
    for (std::size_t v = 0; v < hull.vertices.size(); ++v)
      if (extreme[v]) kept.push_back(hull.vertices[v]);
    hull = detail::assemble(kept, detail::incremental_hull(kept, tol.hull_plane));
  }
  return hull;
}

struct ExtremeReport {
  std::vector<bool> is_extreme;  // per original point
  std::size_t extreme_count = 0;
  std::size_t distinct_vertices = 0;
  double fraction() const {
    return is_extreme.empty() ? 0.0 : static_cast<double>(extreme_count) / static_cast<double>(is_extreme.size());
  }
};

inline ExtremeReport extreme_points(const ConvexHull& hull, std::span<const Point3> originals) {
  std::map<std::array<double, 3>, std::size_t> index;
  for (std::size_t v = 0; v < hull.vertices.size(); ++v)
    index[{hull.vertices[v].x(), hull.vertices[v].y(), hull.vertices[v].z()}] = v;
  ExtremeReport r;
  r.distinct_vertices = hull.vertices.size();
  for (const auto& p : originals) {
    const bool hit = index.count({p.x(), p.y(), p.z()}) > 0;
    r.is_extreme.push_back(hit);
    if (hit) ++r.extreme_count;
  }
  return r;
}

namespace detail {

// Distance from the centroid to the hull boundary along unit direction u.
inline double boundary_radius(const ConvexHull& hull, const Point3& u) {
  double rho = std::numeric_limits<double>::infinity();
  for (const auto& f : hull.facets) {
    const double along = f.normal.dot(u);
    if (along <= 0) continue;
    rho = std::min(rho, (f.offset - f.normal.dot(hull.centroid)) / along);
  }
  return rho;
}

}  // namespace detail

// Radial homeomorphism Conv(S) → B³: the centroid goes to the origin and
// the hull boundary onto the unit sphere.
inline Point3 ball_homeomorphism(const ConvexHull& hull, const Point3& p,
                                 const Tolerances& tol = kDefaultTolerances) {
  if (!hull.contains(p, tol.hull_containment))
    throw InvariantError("ball_homeomorphism: point lies outside the hull");
  const Point3 u = p - hull.centroid;
  const double r = u.norm();
  if (r == 0.0) return Point3::Zero();
  const Point3 dir = u / r;
  return (r / detail::boundary_radius(hull, dir)) * dir;
}

inline Point3 ball_homeomorphism_inverse(const ConvexHull& hull, const Point3& y) {
  const double r = y.norm();
  if (r > 1.0 + 1e-12) throw InvariantError("ball_homeomorphism_inverse: point outside the unit ball");
  if (r == 0.0) return hull.centroid;
  const Point3 dir = y / r;
  return hull.centroid + r * detail::boundary_radius(hull, dir) * dir;
}

// (x_1, …, x_{m-1}, √(1 - Σ_{j<m} x_j²)): maps the closed ball onto the
// upper hemisphere and fixes it pointwise.
inline Eigen::VectorXd hemisphere_retract(const Eigen::VectorXd& p) {
  const Eigen::Index m = p.size();
  if (m < 1) throw DimensionError("hemisphere_retract: empty point");
  if (!p.allFinite() || p.squaredNorm() > 1.0 + 1e-12)
    throw InvariantError("hemisphere_retract: point outside the closed unit ball");
  Eigen::VectorXd out = p;
  const double head = p.head(m - 1).squaredNorm();
  out[m - 1] = std::sqrt(std::max(0.0, 1.0 - head));
  return out;
}

struct CoincidenceReport {
  double fraction = 0.0;             // boundary samples within delta of the input set
  std::size_t boundary_samples = 0;
  std::size_t hull_vertices = 0;
  std::size_t hull_facets = 0;
  double delta = 0.0;
  bool coincident = false;           // fraction at or above the threshold
  std::string verdict;
};

inline constexpr const char* kRetractUnavailable = "retract construction unavailable";
inline constexpr const char* kRetractAvailable = "proper subset of the hull boundary; retract available";

// Samples ∂Conv(S) uniformly by facet area and measures how much of it lies
// within delta of the sample set. A fraction near 1 means S fills the hull
// boundary, where the no-retract theorem blocks the construction.
inline CoincidenceReport boundary_coincidence_check(std::span<const Point3> samples,
                                                    std::uint64_t seed = 0,
                                                    std::size_t boundary_samples = 20000,
                                                    const Tolerances& tol = kDefaultTolerances) {
  const ConvexHull hull = convex_hull(samples, tol);
  const double delta = tol.coincidence_delta;

  // Uniform grid with cell size delta: a neighbour within delta lies in the
  // 27 surrounding cells.
  using Cell = std::array<long long, 3>;
  auto cell_of = [delta](const Point3& p) {
    return Cell{static_cast<long long>(std::floor(p.x() / delta)),
                static_cast<long long>(std::floor(p.y() / delta)),
                static_cast<long long>(std::floor(p.z() / delta))};
  };
  std::map<Cell, std::vector<std::size_t>> grid;
  for (std::size_t k = 0; k < samples.size(); ++k) grid[cell_of(samples[k])].push_back(k);

  std::vector<double> areas;
  for (const auto& f : hull.facets) areas.push_back(f.area);
  std::discrete_distribution<std::size_t> pick(areas.begin(), areas.end());
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Rng rng(seed);

  std::size_t near = 0;
  for (std::size_t s = 0; s < boundary_samples; ++s) {
    const auto& f = hull.facets[pick(rng)];
    const double r1 = std::sqrt(unit(rng)), r2 = unit(rng);
    const Point3 p = (1 - r1) * hull.vertices[f.vertices[0]] + r1 * (1 - r2) * hull.vertices[f.vertices[1]] +
                     r1 * r2 * hull.vertices[f.vertices[2]];
    const Cell c = cell_of(p);
    bool found = false;
    for (long long dx = -1; dx <= 1 && !found; ++dx)
      for (long long dy = -1; dy <= 1 && !found; ++dy)
        for (long long dz = -1; dz <= 1 && !found; ++dz) {
          auto it = grid.find({c[0] + dx, c[1] + dy, c[2] + dz});
          if (it == grid.end()) continue;
          for (auto k : it->second)
            if ((samples[k] - p).norm() <= delta) {
              found = true;
              break;
            }
        }
    if (found) ++near;
  }

  CoincidenceReport r;
  r.boundary_samples = boundary_samples;
  r.fraction = boundary_samples ? static_cast<double>(near) / static_cast<double>(boundary_samples) : 0.0;
  r.hull_vertices = hull.vertices.size();
  r.hull_facets = hull.facets.size();
  r.delta = delta;
  r.coincident = r.fraction >= tol.coincidence_threshold;
  r.verdict = r.coincident ? kRetractUnavailable : kRetractAvailable;
  return r;
}

// Haar-random qubits pushed through the Bloch map; with upper_only the
// points are reflected into z ≥ 0.
inline std::vector<Point3> sample_bloch_sphere(std::size_t count, std::uint64_t seed,
                                               bool upper_only = false) {
  Rng rng(seed);
  std::vector<Point3> pts;
  pts.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    Point3 p = bloch_embedding(haar_random_state(2, rng));
    if (upper_only) p.z() = std::abs(p.z());
    pts.push_back(p);
  }
  return pts;
}

inline std::vector<Point3> regular_tetrahedron() {
  const double s = 1.0 / std::sqrt(3.0);
  return {Point3(s, s, s), Point3(s, -s, -s), Point3(-s, s, -s), Point3(-s, -s, s)};
}

}  // namespace qnash
