#ifndef SUR_GEOMETRY_HPP
#define SUR_GEOMETRY_HPP

#include <cstddef>
#include <vector>

#include "sur/errors.hpp"

// Planar geometry kernel. All lengths are meters, all areas square meters,
// all angles degrees at API boundaries. Every value is immutable after
// construction and every function is pure, so everything here is safe to
// use from any number of threads.

namespace sur::geo {

inline constexpr double kEarthRadiusM = 6371000.0;

// Consecutive ring vertices closer than this are merged on construction.
inline constexpr double kVertexMergeTolM = 1e-6;

// Intersection results with |area| below this are reported as 0.
inline constexpr double kSliverAreaM2 = 1e-6;

// Distance under which a point counts as lying on a boundary edge.
inline constexpr double kBoundaryTolM = 1e-9;

// WGS84 coordinate, degrees. lat in [-90, 90], lon in [-180, 180].
struct GeoPoint {
  double lat = 0.0;
  double lon = 0.0;

  bool is_valid() const;
};

// Local planar coordinate: meters east (x) and north (y) of a projection
// origin.
struct PlanarPoint {
  double x = 0.0;
  double y = 0.0;
};

// Local equirectangular projection centered at `origin`. Intended for the
// sub-kilometer working scale; distortion is below 0.1% there.
PlanarPoint project(const GeoPoint& origin, const GeoPoint& p);
GeoPoint unproject(const GeoPoint& origin, const PlanarPoint& p);

double distance(const PlanarPoint& a, const PlanarPoint& b);

// Closed ring of >= 3 distinct vertices, stored without the repeated last
// vertex. Construction merges consecutive near-duplicates and rejects
// self-intersecting rings.
class Ring {
public:
  explicit Ring(std::vector<PlanarPoint> vertices);

  const std::vector<PlanarPoint>& vertices() const { return vertices_; }
  std::size_t size() const { return vertices_.size(); }

  Ring reversed() const;

private:
  std::vector<PlanarPoint> vertices_;
};

// Signed area, counter-clockwise positive (shoelace).
double ring_area(const Ring& r);

// Centroid of the region enclosed by the ring.
PlanarPoint ring_centroid(const Ring& r);

// Point-in-ring, even-odd rule. Points on the ring boundary count as inside.
bool point_in_ring(const Ring& r, const PlanarPoint& q);

// Simple polygon with optional holes. Construction normalizes orientation
// (outer counter-clockwise, holes clockwise) and validates that every hole
// lies inside the outer ring, holes are pairwise disjoint, and the net area
// is positive.
class AreaPolygon {
public:
  explicit AreaPolygon(Ring outer, std::vector<Ring> holes = {});

  const Ring& outer() const { return outer_; }
  const std::vector<Ring>& holes() const { return holes_; }

private:
  Ring outer_;
  std::vector<Ring> holes_;
};

// Net area: |outer| minus the holes. Always positive for a valid polygon.
double polygon_area(const AreaPolygon& p);

// Area-weighted centroid of outer minus holes.
PlanarPoint centroid(const AreaPolygon& p);

// Even-odd containment against outer minus holes. Points on any boundary
// edge (outer or hole) count as contained.
bool contains(const AreaPolygon& p, const PlanarPoint& q);

// Minimum Euclidean distance from q to any vertex of the polygon.
double min_dist_to_vertices(const AreaPolygon& p, const PlanarPoint& q);

// Minimum distance from q to the polygon region: 0 if contained, otherwise
// the distance to the closest boundary edge.
double min_dist_to_edges(const AreaPolygon& p, const PlanarPoint& q);

// Area of the boolean intersection of the two regions, holes respected.
// Commutative; result in [0, min(polygon_area(a), polygon_area(b))].
// Degenerate overlays (shared collinear edges) resolve via the sliver
// tolerance instead of erroring.
double intersection_area(const AreaPolygon& a, const AreaPolygon& b);

// Regular `segments`-gon with vertices at `radius` from `center`.
// Area approaches pi*r^2 as segments grows; 32 keeps the error under 0.7%.
AreaPolygon buffer_point(const PlanarPoint& center, double radius_m,
                         int segments = 32);

} // namespace sur::geo

#endif // SUR_GEOMETRY_HPP
