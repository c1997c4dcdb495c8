#include <algorithm>
#include <cmath>
#include <fstream>
#include <list>
#include <set>
#include <sstream>

#include "sur/osm.hpp"

namespace sur::osm {

namespace {

constexpr double kMetersPerDegreeLat = geo::kEarthRadiusM * 3.14159265358979323846 / 180.0;

struct GeoBounds {
  double min_lat = 90.0, max_lat = -90.0;
  double min_lon = 180.0, max_lon = -180.0;
  bool empty = true;

  void add(const geo::GeoPoint& p) {
    min_lat = std::min(min_lat, p.lat);
    max_lat = std::max(max_lat, p.lat);
    min_lon = std::min(min_lon, p.lon);
    max_lon = std::max(max_lon, p.lon);
    empty = false;
  }

  // Conservative test against a disk of radius_m around center.
  bool near(const geo::GeoPoint& center, double radius_m) const {
    if (empty) return false;
    const double pad_lat = radius_m / kMetersPerDegreeLat * 1.5 + 1e-6;
    const double cos_lat =
        std::max(0.01, std::cos(center.lat * 3.14159265358979323846 / 180.0));
    const double pad_lon = radius_m / (kMetersPerDegreeLat * cos_lat) * 1.5 + 1e-6;
    return center.lat >= min_lat - pad_lat && center.lat <= max_lat + pad_lat &&
           center.lon >= min_lon - pad_lon && center.lon <= max_lon + pad_lon;
  }
};

GeoBounds way_bounds(const Way& way, const std::map<std::int64_t, Node>& nodes) {
  GeoBounds b;
  for (std::int64_t ref : way.node_refs) {
    auto it = nodes.find(ref);
    if (it != nodes.end()) b.add(it->second.location);
  }
  return b;
}

bool tag_matches(const TagMap& tags, const std::string& key,
                 const std::string& value) {
  auto it = tags.find(key);
  if (it == tags.end()) return false;
  return value == "*" || it->second == value;
}

// Stitches open node-id chains into closed rings by matching endpoints.
// Returns closed rings (without the repeated last id); leftovers that cannot
// be closed are reported.
std::vector<std::vector<std::int64_t>> stitch_rings(
    std::list<std::vector<std::int64_t>> chains,
    std::vector<std::string>* diagnostics, std::int64_t rel_id) {
  std::vector<std::vector<std::int64_t>> closed;
  while (!chains.empty()) {
    std::vector<std::int64_t> cur = std::move(chains.front());
    chains.pop_front();
    if (cur.size() < 2) continue;

    bool progress = true;
    while (progress && cur.front() != cur.back()) {
      progress = false;
      for (auto it = chains.begin(); it != chains.end(); ++it) {
        std::vector<std::int64_t>& other = *it;
        if (other.empty()) continue;
        if (other.front() == cur.back()) {
          cur.insert(cur.end(), other.begin() + 1, other.end());
        } else if (other.back() == cur.back()) {
          cur.insert(cur.end(), other.rbegin() + 1, other.rend());
        } else if (other.back() == cur.front()) {
          cur.insert(cur.begin(), other.begin(), other.end() - 1);
        } else if (other.front() == cur.front()) {
          cur.insert(cur.begin(), other.rbegin(), other.rend() - 1);
        } else {
          continue;
        }
        chains.erase(it);
        progress = true;
        break;
      }
    }

    if (cur.size() >= 4 && cur.front() == cur.back()) {
      cur.pop_back();
      closed.push_back(std::move(cur));
    } else if (diagnostics != nullptr) {
      diagnostics->push_back("relation " + std::to_string(rel_id) +
                             ": unstitchable member ring dropped");
    }
  }
  return closed;
}

std::optional<geo::Ring> project_ring(
    const std::vector<std::int64_t>& node_ids,
    const std::map<std::int64_t, Node>& nodes, const geo::GeoPoint& origin) {
  std::vector<geo::PlanarPoint> pts;
  pts.reserve(node_ids.size());
  for (std::int64_t ref : node_ids) {
    auto it = nodes.find(ref);
    if (it == nodes.end()) return std::nullopt;
    pts.push_back(geo::project(origin, it->second.location));
  }
  try {
    return geo::Ring(std::move(pts));
  } catch (const Error&) {
    return std::nullopt;
  }
}

bool intersects_disk(const geo::AreaPolygon& poly, double radius_m) {
  // Query center is the projection origin, i.e. (0, 0).
  return geo::min_dist_to_edges(poly, geo::PlanarPoint{0.0, 0.0}) <= radius_m;
}

// A candidate must carry at least one descriptive tag; "type" on a
// multipolygon relation and "area" are structural, not descriptive.
bool has_descriptive_tags(const TagMap& tags) {
  for (const auto& [k, v] : tags) {
    if (k != "type" && k != "area") return true;
  }
  return false;
}

} // namespace

RadiusTable::RadiusTable(std::vector<RadiusRule> rules, double default_radius_m)
    : rules_(std::move(rules)), default_radius_m_(default_radius_m) {
  if (!(default_radius_m_ > 0.0)) {
    throw InvalidInputError("radius table: default radius must be positive");
  }
  for (const RadiusRule& r : rules_) {
    if (!(r.radius_m > 0.0)) {
      throw InvalidInputError("radius table: radius for " + r.key + "=" +
                              r.value + " must be positive");
    }
  }
}

RadiusTable RadiusTable::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open radius table: " + path.string());

  std::vector<RadiusRule> rules;
  std::optional<double> default_radius;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::string pattern;
    double radius = 0.0;
    if (!(ls >> pattern)) continue; // blank line
    if (!(ls >> radius)) {
      throw ParseError("radius table " + path.string() + " line " +
                       std::to_string(line_no) + ": missing radius");
    }
    if (pattern == "default") {
      default_radius = radius;
      continue;
    }
    const auto eq = pattern.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == pattern.size()) {
      throw ParseError("radius table " + path.string() + " line " +
                       std::to_string(line_no) +
                       ": expected key=value pattern");
    }
    rules.push_back(
        RadiusRule{pattern.substr(0, eq), pattern.substr(eq + 1), radius});
  }
  if (!default_radius.has_value()) {
    throw ParseError("radius table " + path.string() + ": no default entry");
  }
  return RadiusTable(std::move(rules), *default_radius);
}

const RadiusTable& RadiusTable::defaults() {
  // Mirrors rules/radii.conf.
  static const RadiusTable table(
      {
          {"aeroway", "aerodrome", 500.0},
          {"railway", "station", 150.0},
          {"amenity", "school", 100.0},
          {"amenity", "hospital", 100.0},
          {"leisure", "park", 100.0},
          {"amenity", "restaurant", 25.0},
          {"shop", "*", 20.0},
      },
      30.0);
  return table;
}

double node_radius(const TagMap& tags, const RadiusTable& table) {
  for (const RadiusRule& r : table.rules()) {
    if (tag_matches(tags, r.key, r.value)) return r.radius_m;
  }
  return table.default_radius();
}

std::string Provenance::to_string() const {
  return kind_name(kind) + "/" + std::to_string(id);
}

std::optional<geo::AreaPolygon> assemble_way_polygon(
    const Way& way, const std::map<std::int64_t, Node>& nodes,
    const geo::GeoPoint& origin) {
  if (way.node_refs.size() < 4) return std::nullopt;
  if (way.node_refs.front() != way.node_refs.back()) return std::nullopt;

  std::vector<std::int64_t> ids(way.node_refs.begin(),
                                way.node_refs.end() - 1);
  std::optional<geo::Ring> ring = project_ring(ids, nodes, origin);
  if (!ring.has_value()) return std::nullopt;
  try {
    return geo::AreaPolygon(std::move(*ring));
  } catch (const Error&) {
    return std::nullopt;
  }
}

std::vector<geo::AreaPolygon> assemble_multipolygon(
    const Relation& rel, const OsmData& world, const geo::GeoPoint& origin,
    std::vector<std::string>* diagnostics) {
  auto diag = [&](const std::string& msg) {
    if (diagnostics != nullptr) diagnostics->push_back(msg);
  };

  std::list<std::vector<std::int64_t>> outer_chains;
  std::list<std::vector<std::int64_t>> inner_chains;
  for (const RelationMember& m : rel.members) {
    if (m.type != EntityKind::kWay) {
      diag("relation " + std::to_string(rel.id) + ": non-way member " +
           kind_name(m.type) + "/" + std::to_string(m.ref) + " ignored");
      continue;
    }
    if (m.role != "outer" && m.role != "inner") {
      diag("relation " + std::to_string(rel.id) + ": member way " +
           std::to_string(m.ref) + " with role '" + m.role + "' ignored");
      continue;
    }
    auto it = world.ways.find(m.ref);
    if (it == world.ways.end()) {
      diag("relation " + std::to_string(rel.id) + ": member way " +
           std::to_string(m.ref) + " missing from extract");
      continue;
    }
    if (it->second.node_refs.size() < 2) continue;
    (m.role == "outer" ? outer_chains : inner_chains)
        .push_back(it->second.node_refs);
  }

  std::vector<geo::Ring> outer_rings;
  for (const auto& ids : stitch_rings(std::move(outer_chains), diagnostics,
                                      rel.id)) {
    if (auto ring = project_ring(ids, world.nodes, origin)) {
      outer_rings.push_back(std::move(*ring));
    } else {
      diag("relation " + std::to_string(rel.id) +
           ": outer ring with unresolved or degenerate geometry dropped");
    }
  }
  if (outer_rings.empty()) return {};

  std::vector<geo::Ring> inner_rings;
  for (const auto& ids : stitch_rings(std::move(inner_chains), diagnostics,
                                      rel.id)) {
    if (auto ring = project_ring(ids, world.nodes, origin)) {
      inner_rings.push_back(std::move(*ring));
    } else {
      diag("relation " + std::to_string(rel.id) +
           ": inner ring with unresolved or degenerate geometry dropped");
    }
  }

  // Attach each inner ring to the outer ring containing its centroid.
  std::vector<std::vector<geo::Ring>> holes_per_outer(outer_rings.size());
  for (geo::Ring& inner : inner_rings) {
    bool placed = false;
    for (std::size_t i = 0; i < outer_rings.size(); ++i) {
      if (geo::point_in_ring(outer_rings[i], geo::ring_centroid(inner))) {
        holes_per_outer[i].push_back(std::move(inner));
        placed = true;
        break;
      }
    }
    if (!placed) {
      diag("relation " + std::to_string(rel.id) +
           ": inner ring outside every outer ring dropped");
    }
  }

  std::vector<geo::AreaPolygon> result;
  for (std::size_t i = 0; i < outer_rings.size(); ++i) {
    try {
      result.emplace_back(std::move(outer_rings[i]),
                          std::move(holes_per_outer[i]));
    } catch (const Error& e) {
      diag("relation " + std::to_string(rel.id) +
           ": polygon dropped: " + e.what());
    }
  }
  return result;
}

std::vector<CandidatePolygon> candidates_within(const OsmData& world,
                                                const geo::GeoPoint& center,
                                                double radius_m,
                                                const RadiusTable& radii) {
  if (!(radius_m > 0.0)) {
    throw InvalidInputError("candidates_within: radius must be positive");
  }
  if (!center.is_valid()) {
    throw InvalidInputError("candidates_within: invalid center");
  }

  std::vector<CandidatePolygon> result;
  std::set<std::int64_t> consumed_ways;

  // Multipolygon relations first, so member ways can be suppressed.
  for (const auto& [id, rel] : world.relations) {
    auto type_it = rel.tags.find("type");
    if (type_it == rel.tags.end() || type_it->second != "multipolygon") {
      continue;
    }
    if (!has_descriptive_tags(rel.tags)) continue;

    GeoBounds bounds;
    for (const RelationMember& m : rel.members) {
      if (m.type != EntityKind::kWay) continue;
      auto it = world.ways.find(m.ref);
      if (it == world.ways.end()) continue;
      const GeoBounds wb = way_bounds(it->second, world.nodes);
      if (!wb.empty) {
        bounds.add(geo::GeoPoint{wb.min_lat, wb.min_lon});
        bounds.add(geo::GeoPoint{wb.max_lat, wb.max_lon});
      }
    }
    if (!bounds.near(center, radius_m)) continue;

    std::vector<geo::AreaPolygon> polys =
        assemble_multipolygon(rel, world, center, nullptr);
    bool emitted = false;
    for (geo::AreaPolygon& poly : polys) {
      if (!intersects_disk(poly, radius_m)) continue;
      result.push_back(CandidatePolygon{
          std::move(poly), rel.tags,
          Provenance{EntityKind::kRelation, id, 0.0}});
      emitted = true;
    }
    if (emitted) {
      for (const RelationMember& m : rel.members) {
        if (m.type == EntityKind::kWay &&
            (m.role == "outer" || m.role == "inner")) {
          consumed_ways.insert(m.ref);
        }
      }
    }
  }

  for (const auto& [id, way] : world.ways) {
    if (consumed_ways.count(id) > 0) continue;
    if (!has_descriptive_tags(way.tags)) continue;
    if (tag_matches(way.tags, "area", "no")) continue; // closed linear feature
    if (!way_bounds(way, world.nodes).near(center, radius_m)) continue;

    std::optional<geo::AreaPolygon> poly =
        assemble_way_polygon(way, world.nodes, center);
    if (!poly.has_value() || !intersects_disk(*poly, radius_m)) continue;
    result.push_back(CandidatePolygon{std::move(*poly), way.tags,
                                      Provenance{EntityKind::kWay, id, 0.0}});
  }

  for (const auto& [id, node] : world.nodes) {
    if (!has_descriptive_tags(node.tags)) continue;
    const double buffer_radius = node_radius(node.tags, radii);
    GeoBounds b;
    b.add(node.location);
    if (!b.near(center, radius_m + buffer_radius)) continue;

    const geo::PlanarPoint at = geo::project(center, node.location);
    geo::AreaPolygon poly = geo::buffer_point(at, buffer_radius,
                                              kNodeBufferSegments);
    if (!intersects_disk(poly, radius_m)) continue;
    result.push_back(
        CandidatePolygon{std::move(poly), node.tags,
                         Provenance{EntityKind::kNode, id, buffer_radius}});
  }

  std::stable_sort(result.begin(), result.end(),
                   [](const CandidatePolygon& a, const CandidatePolygon& b) {
                     if (a.provenance.id != b.provenance.id) {
                       return a.provenance.id < b.provenance.id;
                     }
                     return static_cast<int>(a.provenance.kind) <
                            static_cast<int>(b.provenance.kind);
                   });
  return result;
}

} // namespace sur::osm
