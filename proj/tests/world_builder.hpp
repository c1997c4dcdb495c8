#ifndef SUR_TESTS_WORLD_BUILDER_HPP
#define SUR_TESTS_WORLD_BUILDER_HPP

// Builds OSM XML test worlds around (0, 0), where meter offsets map to
// degrees at the equator scale.

#include <sstream>
#include <string>
#include <vector>

#include "sur/osm.hpp"

namespace testworld {

inline constexpr double kMetersPerDegree = 111194.92664455873;

inline std::string deg(double meters) {
  std::ostringstream out;
  out.precision(13);
  out << meters / kMetersPerDegree;
  return out.str();
}

class WorldBuilder {
public:
  WorldBuilder& node(std::int64_t id, double x_m, double y_m,
                     const sur::osm::TagMap& tags = {}) {
    body_ << "  <node id=\"" << id << "\" lat=\"" << deg(y_m) << "\" lon=\""
          << deg(x_m) << "\">\n";
    emit_tags(tags);
    body_ << "  </node>\n";
    return *this;
  }

  WorldBuilder& way(std::int64_t id, const std::vector<std::int64_t>& refs,
                    const sur::osm::TagMap& tags = {}) {
    body_ << "  <way id=\"" << id << "\">\n";
    for (std::int64_t ref : refs) {
      body_ << "    <nd ref=\"" << ref << "\"/>\n";
    }
    emit_tags(tags);
    body_ << "  </way>\n";
    return *this;
  }

  WorldBuilder& relation(
      std::int64_t id,
      const std::vector<std::pair<std::int64_t, std::string>>& way_members,
      const sur::osm::TagMap& tags = {}) {
    body_ << "  <relation id=\"" << id << "\">\n";
    for (const auto& [ref, role] : way_members) {
      body_ << "    <member type=\"way\" ref=\"" << ref << "\" role=\"" << role
            << "\"/>\n";
    }
    emit_tags(tags);
    body_ << "  </relation>\n";
    return *this;
  }

  // Axis-aligned square (closed way) plus its corner nodes.
  WorldBuilder& square(std::int64_t first_node_id, std::int64_t way_id,
                       double x0, double y0, double x1, double y1,
                       const sur::osm::TagMap& tags = {}) {
    node(first_node_id, x0, y0);
    node(first_node_id + 1, x1, y0);
    node(first_node_id + 2, x1, y1);
    node(first_node_id + 3, x0, y1);
    way(way_id,
        {first_node_id, first_node_id + 1, first_node_id + 2,
         first_node_id + 3, first_node_id},
        tags);
    return *this;
  }

  std::string str() const {
    return "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<osm version=\"0.6\">\n" +
           body_.str() + "</osm>\n";
  }

  sur::osm::OsmData parse() const {
    std::istringstream in(str());
    return sur::osm::parse_osm_xml(in);
  }

private:
  void emit_tags(const sur::osm::TagMap& tags) {
    for (const auto& [k, v] : tags) {
      body_ << "    <tag k=\"" << k << "\" v=\"" << v << "\"/>\n";
    }
  }

  std::ostringstream body_;
};

// Ground-truth ring (WGS84, open) for an axis-aligned square in the same
// meter frame the builder uses. Coordinates pass through the identical
// string formatting as the XML, so they parse to bit-identical doubles.
inline std::vector<sur::geo::GeoPoint> square_ring_geo(double x0, double y0,
                                                       double x1, double y1) {
  auto pt = [](double x, double y) {
    return sur::geo::GeoPoint{std::stod(deg(y)), std::stod(deg(x))};
  };
  return {pt(x0, y0), pt(x1, y0), pt(x1, y1), pt(x0, y1)};
}

} // namespace testworld

#endif // SUR_TESTS_WORLD_BUILDER_HPP
