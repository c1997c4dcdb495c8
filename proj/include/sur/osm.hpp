#ifndef SUR_OSM_HPP
#define SUR_OSM_HPP

#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sur/geometry.hpp"

// OpenStreetMap XML ingestion: parse extracts, assemble candidate polygons
// from closed ways, multipolygon relations and buffered nodes, and answer
// "all candidates within r meters of a point" queries.
//
// Parsing is single-threaded per document; the resulting OsmData is
// immutable afterwards and safe for concurrent queries.

namespace sur::osm {

using TagMap = std::map<std::string, std::string>;

enum class EntityKind { kNode, kWay, kRelation };

std::string kind_name(EntityKind kind);

struct Node {
  std::int64_t id = 0;
  geo::GeoPoint location;
  TagMap tags;
};

struct Way {
  std::int64_t id = 0;
  std::vector<std::int64_t> node_refs;
  TagMap tags;
};

struct RelationMember {
  EntityKind type = EntityKind::kNode;
  std::int64_t ref = 0;
  std::string role;
};

struct Relation {
  std::int64_t id = 0;
  std::vector<RelationMember> members;
  TagMap tags;
};

// A parsed extract. Maps are keyed by id, so iteration order (and therefore
// everything derived from it) is deterministic.
struct OsmData {
  std::map<std::int64_t, Node> nodes;
  std::map<std::int64_t, Way> ways;
  std::map<std::int64_t, Relation> relations;

  // Non-fatal oddities: dangling refs, duplicate ids, skipped roles, ...
  std::vector<std::string> diagnostics;
  std::size_t unknown_elements = 0; // XML elements we do not understand
  std::size_t dangling_refs = 0;    // way node refs missing from the extract
};

// Single-pass parse of an OSM XML document. Malformed XML raises ParseError
// with line/column; semantic oddities become diagnostics instead.
OsmData parse_osm_xml(std::istream& in);
OsmData load_osm_file(const std::filesystem::path& path);

// Buffer radius per node type: first matching key=value pattern wins
// (a value of "*" matches any value), else the default radius.
struct RadiusRule {
  std::string key;
  std::string value; // "*" matches any
  double radius_m = 0.0;
};

class RadiusTable {
public:
  RadiusTable(std::vector<RadiusRule> rules, double default_radius_m);

  // Flat text config: one "key=value radius_m" per line, "default radius_m"
  // last. '#' starts a comment.
  static RadiusTable load(const std::filesystem::path& path);

  // The table shipped in rules/radii.conf, compiled in for library users.
  static const RadiusTable& defaults();

  const std::vector<RadiusRule>& rules() const { return rules_; }
  double default_radius() const { return default_radius_m_; }

private:
  std::vector<RadiusRule> rules_;
  double default_radius_m_;
};

double node_radius(const TagMap& tags, const RadiusTable& table);

// Where a candidate polygon came from.
struct Provenance {
  EntityKind kind = EntityKind::kWay;
  std::int64_t id = 0;
  double buffer_radius_m = 0.0; // buffered nodes only

  std::string to_string() const; // "way/42", "node/7", "relation/3"
};

// An element of the candidate set: projected geometry plus the source tags.
struct CandidatePolygon {
  geo::AreaPolygon geometry; // in the query's local planar frame
  TagMap tags;
  Provenance provenance;
};

// Closed, simple, fully resolved ways become polygons; everything else is
// not a polygon and yields nullopt.
std::optional<geo::AreaPolygon> assemble_way_polygon(
    const Way& way, const std::map<std::int64_t, Node>& nodes,
    const geo::GeoPoint& origin);

// Stitches a type=multipolygon relation's outer/inner member ways into
// polygons with holes, one polygon per closed outer ring. Unstitchable
// members are reported through `diagnostics`; nothing here is fatal.
std::vector<geo::AreaPolygon> assemble_multipolygon(
    const Relation& rel, const OsmData& world, const geo::GeoPoint& origin,
    std::vector<std::string>* diagnostics = nullptr);

inline constexpr double kDefaultCandidateRadiusM = 500.0;
inline constexpr int kNodeBufferSegments = 32;

// All tagged geometry intersecting the disk of `radius_m` around `center`,
// projected into center's local frame. Ways consumed by an emitted
// multipolygon relation are not emitted separately. Order is deterministic:
// ascending provenance id, ties by kind.
std::vector<CandidatePolygon> candidates_within(
    const OsmData& world, const geo::GeoPoint& center,
    double radius_m = kDefaultCandidateRadiusM,
    const RadiusTable& radii = RadiusTable::defaults());

} // namespace sur::osm

#endif // SUR_OSM_HPP
