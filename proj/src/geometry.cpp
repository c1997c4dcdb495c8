#include "sur/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sur::geo {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kDegToRad = kPi / 180.0;
constexpr double kMetersPerDegree = kEarthRadiusM * kDegToRad;

double cross(const PlanarPoint& a, const PlanarPoint& b) {
  return a.x * b.y - a.y * b.x;
}

// Twice the signed area of triangle (a, b, c).
double orient(const PlanarPoint& a, const PlanarPoint& b,
              const PlanarPoint& c) {
  return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
}

int sign_with_tol(double v, double tol) {
  if (v > tol) return 1;
  if (v < -tol) return -1;
  return 0;
}

bool finite(const PlanarPoint& p) {
  return std::isfinite(p.x) && std::isfinite(p.y);
}

double point_segment_distance(const PlanarPoint& q, const PlanarPoint& a,
                              const PlanarPoint& b) {
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  const double len2 = dx * dx + dy * dy;
  double t = 0.0;
  if (len2 > 0.0) {
    t = ((q.x - a.x) * dx + (q.y - a.y) * dy) / len2;
    t = std::clamp(t, 0.0, 1.0);
  }
  const double px = a.x + t * dx - q.x;
  const double py = a.y + t * dy - q.y;
  return std::hypot(px, py);
}

// True if segments (p1,p2) and (q1,q2) share any point, including endpoint
// touches and collinear overlap. Tolerances scale with the segment lengths.
bool segments_intersect(const PlanarPoint& p1, const PlanarPoint& p2,
                        const PlanarPoint& q1, const PlanarPoint& q2) {
  const double lp = std::hypot(p2.x - p1.x, p2.y - p1.y);
  const double lq = std::hypot(q2.x - q1.x, q2.y - q1.y);
  const double tol = 1e-12 * std::max(1.0, lp * lq);

  const int d1 = sign_with_tol(orient(q1, q2, p1), tol);
  const int d2 = sign_with_tol(orient(q1, q2, p2), tol);
  const int d3 = sign_with_tol(orient(p1, p2, q1), tol);
  const int d4 = sign_with_tol(orient(p1, p2, q2), tol);

  if (d1 * d2 < 0 && d3 * d4 < 0) return true; // proper crossing

  const double touch_tol = kBoundaryTolM;
  if (d1 == 0 && point_segment_distance(p1, q1, q2) <= touch_tol) return true;
  if (d2 == 0 && point_segment_distance(p2, q1, q2) <= touch_tol) return true;
  if (d3 == 0 && point_segment_distance(q1, p1, p2) <= touch_tol) return true;
  if (d4 == 0 && point_segment_distance(q2, p1, p2) <= touch_tol) return true;
  return false;
}

double shoelace(const std::vector<PlanarPoint>& v) {
  double twice = 0.0;
  const std::size_t n = v.size();
  for (std::size_t i = 0; i < n; ++i) {
    const PlanarPoint& a = v[i];
    const PlanarPoint& b = v[(i + 1) % n];
    twice += cross(a, b);
  }
  return 0.5 * twice;
}

// Even-odd crossing test, boundary not handled here.
bool in_ring_even_odd(const std::vector<PlanarPoint>& v,
                      const PlanarPoint& q) {
  bool inside = false;
  const std::size_t n = v.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const PlanarPoint& a = v[i];
    const PlanarPoint& b = v[j];
    if ((a.y > q.y) != (b.y > q.y)) {
      const double x_cross = (b.x - a.x) * (q.y - a.y) / (b.y - a.y) + a.x;
      if (q.x < x_cross) inside = !inside;
    }
  }
  return inside;
}

bool on_ring_boundary(const std::vector<PlanarPoint>& v, const PlanarPoint& q,
                      double tol) {
  const std::size_t n = v.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (point_segment_distance(q, v[i], v[(i + 1) % n]) <= tol) return true;
  }
  return false;
}

enum class Region { kInside, kBoundary, kOutside };

Region classify(const AreaPolygon& p, const PlanarPoint& q, double tol) {
  if (on_ring_boundary(p.outer().vertices(), q, tol)) return Region::kBoundary;
  for (const Ring& h : p.holes()) {
    if (on_ring_boundary(h.vertices(), q, tol)) return Region::kBoundary;
  }
  if (!in_ring_even_odd(p.outer().vertices(), q)) return Region::kOutside;
  for (const Ring& h : p.holes()) {
    if (in_ring_even_odd(h.vertices(), q)) return Region::kOutside;
  }
  return Region::kInside;
}

// Directed boundary edges with the interior on the left: outer ring
// counter-clockwise, holes clockwise (normalized at construction).
void collect_directed_edges(const AreaPolygon& p,
                            std::vector<std::pair<PlanarPoint, PlanarPoint>>& out) {
  auto add_ring = [&out](const Ring& r) {
    const auto& v = r.vertices();
    const std::size_t n = v.size();
    for (std::size_t i = 0; i < n; ++i) out.emplace_back(v[i], v[(i + 1) % n]);
  };
  add_ring(p.outer());
  for (const Ring& h : p.holes()) add_ring(h);
}

// Parameters t in [0,1] where segment a0+t*(a1-a0) meets segment (b0,b1).
// Collinear overlap contributes the projected endpoints of the overlap run.
void intersection_params(const PlanarPoint& a0, const PlanarPoint& a1,
                         const PlanarPoint& b0, const PlanarPoint& b1,
                         std::vector<double>& params) {
  const double dx = a1.x - a0.x;
  const double dy = a1.y - a0.y;
  const double ex = b1.x - b0.x;
  const double ey = b1.y - b0.y;
  const double denom = dx * ey - dy * ex;
  const double la = std::hypot(dx, dy);
  const double lb = std::hypot(ex, ey);
  if (la == 0.0 || lb == 0.0) return;

  const double wx = b0.x - a0.x;
  const double wy = b0.y - a0.y;

  if (std::abs(denom) > 1e-12 * la * lb) {
    const double t = (wx * ey - wy * ex) / denom;
    const double u = (wx * dy - wy * dx) / denom;
    const double slack_t = kBoundaryTolM / la;
    const double slack_u = kBoundaryTolM / lb;
    if (t >= -slack_t && t <= 1.0 + slack_t && u >= -slack_u &&
        u <= 1.0 + slack_u) {
      params.push_back(std::clamp(t, 0.0, 1.0));
    }
    return;
  }

  // Parallel. Collinear iff b0 lies on the carrier line of a.
  if (std::abs(wx * dy - wy * dx) > kBoundaryTolM * la) return;
  const double inv = 1.0 / (la * la);
  double t0 = (wx * dx + wy * dy) * inv;
  double t1 = ((b1.x - a0.x) * dx + (b1.y - a0.y) * dy) * inv;
  if (t0 > t1) std::swap(t0, t1);
  if (t1 < 0.0 || t0 > 1.0) return;
  params.push_back(std::clamp(t0, 0.0, 1.0));
  params.push_back(std::clamp(t1, 0.0, 1.0));
}

// Line-integral contribution of the parts of `subject`'s boundary that run
// through `clip`'s interior. `include_boundary` resolves shared collinear
// edges: the subject side keeps a boundary-on-boundary subsegment iff the
// clip interior lies on the subject's interior side of it; the other call
// drops boundary subsegments entirely so shared edges are counted once.
double boundary_contribution(const AreaPolygon& subject,
                             const AreaPolygon& clip, bool include_boundary) {
  std::vector<std::pair<PlanarPoint, PlanarPoint>> subject_edges;
  std::vector<std::pair<PlanarPoint, PlanarPoint>> clip_edges;
  collect_directed_edges(subject, subject_edges);
  collect_directed_edges(clip, clip_edges);

  double twice_area = 0.0;
  std::vector<double> params;
  for (const auto& [a0, a1] : subject_edges) {
    const double len = std::hypot(a1.x - a0.x, a1.y - a0.y);
    if (len <= 0.0) continue;

    params.clear();
    params.push_back(0.0);
    params.push_back(1.0);
    for (const auto& [b0, b1] : clip_edges) {
      intersection_params(a0, a1, b0, b1, params);
    }
    std::sort(params.begin(), params.end());

    for (std::size_t i = 0; i + 1 < params.size(); ++i) {
      const double t0 = params[i];
      const double t1 = params[i + 1];
      if ((t1 - t0) * len <= kBoundaryTolM) continue;

      const double tm = 0.5 * (t0 + t1);
      const PlanarPoint mid{a0.x + tm * (a1.x - a0.x),
                            a0.y + tm * (a1.y - a0.y)};
      const Region where = classify(clip, mid, kBoundaryTolM);

      bool take = (where == Region::kInside);
      if (!take && include_boundary && where == Region::kBoundary) {
        // Probe just inside the subject (interior is to the left).
        const double nx = -(a1.y - a0.y) / len;
        const double ny = (a1.x - a0.x) / len;
        const double delta = 1e-6;
        const PlanarPoint probe{mid.x + delta * nx, mid.y + delta * ny};
        take = (classify(clip, probe, kBoundaryTolM) == Region::kInside);
      }
      if (take) {
        const PlanarPoint s0{a0.x + t0 * (a1.x - a0.x),
                             a0.y + t0 * (a1.y - a0.y)};
        const PlanarPoint s1{a0.x + t1 * (a1.x - a0.x),
                             a0.y + t1 * (a1.y - a0.y)};
        twice_area += cross(s0, s1);
      }
    }
  }
  return twice_area;
}

} // namespace

bool GeoPoint::is_valid() const {
  return std::isfinite(lat) && std::isfinite(lon) && lat >= -90.0 &&
         lat <= 90.0 && lon >= -180.0 && lon <= 180.0;
}

PlanarPoint project(const GeoPoint& origin, const GeoPoint& p) {
  if (!origin.is_valid() || !p.is_valid()) {
    throw InvalidInputError("project: coordinates out of range");
  }
  const double cos_lat = std::cos(origin.lat * kDegToRad);
  return PlanarPoint{(p.lon - origin.lon) * cos_lat * kMetersPerDegree,
                     (p.lat - origin.lat) * kMetersPerDegree};
}

GeoPoint unproject(const GeoPoint& origin, const PlanarPoint& p) {
  if (!origin.is_valid() || !finite(p)) {
    throw InvalidInputError("unproject: invalid input");
  }
  const double cos_lat = std::cos(origin.lat * kDegToRad);
  return GeoPoint{origin.lat + p.y / kMetersPerDegree,
                  origin.lon + p.x / (kMetersPerDegree * cos_lat)};
}

double distance(const PlanarPoint& a, const PlanarPoint& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

Ring::Ring(std::vector<PlanarPoint> vertices) : vertices_(std::move(vertices)) {
  for (const PlanarPoint& v : vertices_) {
    if (!finite(v)) throw InvariantError("ring: non-finite vertex");
  }

  // Merge consecutive near-duplicates, including the closing pair.
  std::vector<PlanarPoint> merged;
  merged.reserve(vertices_.size());
  for (const PlanarPoint& v : vertices_) {
    if (!merged.empty() && distance(merged.back(), v) < kVertexMergeTolM) {
      continue;
    }
    merged.push_back(v);
  }
  while (merged.size() >= 2 &&
         distance(merged.front(), merged.back()) < kVertexMergeTolM) {
    merged.pop_back();
  }
  vertices_ = std::move(merged);

  if (vertices_.size() < 3) {
    throw InvariantError("ring: fewer than 3 distinct vertices");
  }

  const std::size_t n = vertices_.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
      if (adjacent) continue;
      if (segments_intersect(vertices_[i], vertices_[(i + 1) % n],
                             vertices_[j], vertices_[(j + 1) % n])) {
        throw InvariantError("ring: self-intersecting");
      }
    }
  }
}

Ring Ring::reversed() const {
  std::vector<PlanarPoint> v(vertices_.rbegin(), vertices_.rend());
  return Ring(std::move(v));
}

double ring_area(const Ring& r) { return shoelace(r.vertices()); }

PlanarPoint ring_centroid(const Ring& r) {
  const auto& v = r.vertices();
  const std::size_t n = v.size();
  const double area = shoelace(v);
  if (std::abs(area) <= kSliverAreaM2 * 1e-3) {
    throw DegenerateGeometryError("ring_centroid: zero-area ring");
  }
  double cx = 0.0;
  double cy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const PlanarPoint& a = v[i];
    const PlanarPoint& b = v[(i + 1) % n];
    const double w = cross(a, b);
    cx += (a.x + b.x) * w;
    cy += (a.y + b.y) * w;
  }
  const double inv = 1.0 / (6.0 * area);
  return PlanarPoint{cx * inv, cy * inv};
}

bool point_in_ring(const Ring& r, const PlanarPoint& q) {
  if (on_ring_boundary(r.vertices(), q, kBoundaryTolM)) return true;
  return in_ring_even_odd(r.vertices(), q);
}

AreaPolygon::AreaPolygon(Ring outer, std::vector<Ring> holes)
    : outer_(std::move(outer)), holes_(std::move(holes)) {
  const double outer_area = ring_area(outer_);
  if (std::abs(outer_area) <= 0.0) {
    throw DegenerateGeometryError("polygon: zero-area outer ring");
  }
  if (outer_area < 0.0) outer_ = outer_.reversed();

  double hole_area = 0.0;
  for (Ring& h : holes_) {
    const double a = ring_area(h);
    hole_area += std::abs(a);
    if (a > 0.0) h = h.reversed();
  }
  if (std::abs(ring_area(outer_)) - hole_area <= 0.0) {
    throw InvariantError("polygon: holes exceed outer area");
  }

  for (const Ring& h : holes_) {
    bool inside = true;
    for (const PlanarPoint& v : h.vertices()) {
      if (!point_in_ring(outer_, v)) {
        inside = false;
        break;
      }
    }
    if (!inside || !point_in_ring(outer_, ring_centroid(h))) {
      throw InvariantError("polygon: hole not inside outer ring");
    }
  }

  for (std::size_t i = 0; i < holes_.size(); ++i) {
    for (std::size_t j = i + 1; j < holes_.size(); ++j) {
      const auto& a = holes_[i].vertices();
      const auto& b = holes_[j].vertices();
      bool overlap =
          in_ring_even_odd(b, ring_centroid(holes_[i])) ||
          in_ring_even_odd(a, ring_centroid(holes_[j]));
      for (std::size_t k = 0; !overlap && k < a.size(); ++k) {
        for (std::size_t l = 0; !overlap && l < b.size(); ++l) {
          overlap = segments_intersect(a[k], a[(k + 1) % a.size()], b[l],
                                       b[(l + 1) % b.size()]);
        }
      }
      if (overlap) throw InvariantError("polygon: holes overlap");
    }
  }
}

double polygon_area(const AreaPolygon& p) {
  double area = std::abs(ring_area(p.outer()));
  for (const Ring& h : p.holes()) area -= std::abs(ring_area(h));
  if (area <= 0.0) {
    throw InvariantError("polygon_area: nonpositive net area");
  }
  return area;
}

PlanarPoint centroid(const AreaPolygon& p) {
  // Orientations are normalized, so signed ring areas already carry the
  // outer-minus-holes weighting.
  double total = ring_area(p.outer());
  PlanarPoint c = ring_centroid(p.outer());
  double cx = c.x * total;
  double cy = c.y * total;
  for (const Ring& h : p.holes()) {
    const double a = ring_area(h);
    const PlanarPoint hc = ring_centroid(h);
    cx += hc.x * a;
    cy += hc.y * a;
    total += a;
  }
  if (total <= 0.0) {
    throw DegenerateGeometryError("centroid: degenerate polygon");
  }
  return PlanarPoint{cx / total, cy / total};
}

bool contains(const AreaPolygon& p, const PlanarPoint& q) {
  return classify(p, q, kBoundaryTolM) != Region::kOutside;
}

double min_dist_to_vertices(const AreaPolygon& p, const PlanarPoint& q) {
  double best = std::numeric_limits<double>::infinity();
  for (const PlanarPoint& v : p.outer().vertices()) {
    best = std::min(best, distance(v, q));
  }
  for (const Ring& h : p.holes()) {
    for (const PlanarPoint& v : h.vertices()) {
      best = std::min(best, distance(v, q));
    }
  }
  return best;
}

double min_dist_to_edges(const AreaPolygon& p, const PlanarPoint& q) {
  if (contains(p, q)) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  auto scan_ring = [&best, &q](const Ring& r) {
    const auto& v = r.vertices();
    const std::size_t n = v.size();
    for (std::size_t i = 0; i < n; ++i) {
      best = std::min(best, point_segment_distance(q, v[i], v[(i + 1) % n]));
    }
  };
  scan_ring(p.outer());
  for (const Ring& h : p.holes()) scan_ring(h);
  return best;
}

double intersection_area(const AreaPolygon& a, const AreaPolygon& b) {
  double twice = boundary_contribution(a, b, /*include_boundary=*/true);
  twice += boundary_contribution(b, a, /*include_boundary=*/false);
  double area = 0.5 * twice;
  if (std::abs(area) < kSliverAreaM2) return 0.0;
  return std::clamp(area, 0.0, std::min(polygon_area(a), polygon_area(b)));
}

AreaPolygon buffer_point(const PlanarPoint& center, double radius_m,
                         int segments) {
  if (!finite(center) || !std::isfinite(radius_m) || radius_m <= 0.0) {
    throw InvalidInputError("buffer_point: radius must be positive");
  }
  if (segments < 3) {
    throw InvalidInputError("buffer_point: need at least 3 segments");
  }
  std::vector<PlanarPoint> v;
  v.reserve(static_cast<std::size_t>(segments));
  for (int k = 0; k < segments; ++k) {
    const double angle = 2.0 * kPi * static_cast<double>(k) / segments;
    v.push_back(PlanarPoint{center.x + radius_m * std::cos(angle),
                            center.y + radius_m * std::sin(angle)});
  }
  return AreaPolygon(Ring(std::move(v)));
}

} // namespace sur::geo
