#include <expat.h>

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>

#include "sur/osm.hpp"

namespace sur::osm {

std::string kind_name(EntityKind kind) {
  switch (kind) {
    case EntityKind::kNode: return "node";
    case EntityKind::kWay: return "way";
    case EntityKind::kRelation: return "relation";
  }
  return "?";
}

namespace {

const char* find_attr(const char** atts, const char* name) {
  for (std::size_t i = 0; atts[i] != nullptr; i += 2) {
    if (std::strcmp(atts[i], name) == 0) return atts[i + 1];
  }
  return nullptr;
}

bool parse_i64(const char* s, std::int64_t& out) {
  if (s == nullptr || *s == '\0') return false;
  char* end = nullptr;
  errno = 0;
  const long long v = std::strtoll(s, &end, 10);
  if (errno != 0 || end == s || *end != '\0') return false;
  out = static_cast<std::int64_t>(v);
  return true;
}

bool parse_f64(const char* s, double& out) {
  if (s == nullptr || *s == '\0') return false;
  char* end = nullptr;
  const double v = std::strtod(s, &end);
  if (end == s || *end != '\0') return false;
  out = v;
  return true;
}

struct ParserState {
  XML_Parser parser = nullptr;
  OsmData data;

  bool saw_root = false;
  std::string semantic_error; // stops the parse when non-empty
  int unknown_depth = 0;      // >0 while inside an element we skip

  enum class Current { kNone, kNode, kWay, kRelation };
  Current current = Current::kNone;
  bool current_broken = false; // required attributes missing
  Node node;
  Way way;
  Relation relation;

  void diagnostic(const std::string& msg) { data.diagnostics.push_back(msg); }

  TagMap* current_tags() {
    switch (current) {
      case Current::kNode: return &node.tags;
      case Current::kWay: return &way.tags;
      case Current::kRelation: return &relation.tags;
      case Current::kNone: return nullptr;
    }
    return nullptr;
  }
};

void handle_start(void* user, const char* name, const char** atts) {
  auto& st = *static_cast<ParserState*>(user);
  if (!st.semantic_error.empty()) return;

  if (st.unknown_depth > 0) {
    ++st.unknown_depth;
    return;
  }

  if (!st.saw_root) {
    if (std::strcmp(name, "osm") != 0) {
      st.semantic_error = "expected <osm> root element, got <" +
                          std::string(name) + ">";
      XML_StopParser(st.parser, XML_FALSE);
      return;
    }
    st.saw_root = true;
    return;
  }

  if (st.current == ParserState::Current::kNone) {
    if (std::strcmp(name, "node") == 0) {
      st.current = ParserState::Current::kNode;
      st.current_broken = false;
      st.node = Node{};
      double lat = 0.0;
      double lon = 0.0;
      if (!parse_i64(find_attr(atts, "id"), st.node.id) ||
          !parse_f64(find_attr(atts, "lat"), lat) ||
          !parse_f64(find_attr(atts, "lon"), lon)) {
        st.diagnostic("node with missing/invalid id or coordinates skipped");
        st.current_broken = true;
        return;
      }
      st.node.location = geo::GeoPoint{lat, lon};
    } else if (std::strcmp(name, "way") == 0) {
      st.current = ParserState::Current::kWay;
      st.current_broken = false;
      st.way = Way{};
      if (!parse_i64(find_attr(atts, "id"), st.way.id)) {
        st.diagnostic("way with missing/invalid id skipped");
        st.current_broken = true;
      }
    } else if (std::strcmp(name, "relation") == 0) {
      st.current = ParserState::Current::kRelation;
      st.current_broken = false;
      st.relation = Relation{};
      if (!parse_i64(find_attr(atts, "id"), st.relation.id)) {
        st.diagnostic("relation with missing/invalid id skipped");
        st.current_broken = true;
      }
    } else {
      // bounds, note, meta, ... — skip the whole subtree.
      ++st.data.unknown_elements;
      st.unknown_depth = 1;
    }
    return;
  }

  // Inside a node/way/relation.
  if (std::strcmp(name, "tag") == 0) {
    const char* k = find_attr(atts, "k");
    const char* v = find_attr(atts, "v");
    if (k == nullptr || v == nullptr) {
      st.diagnostic("tag without k/v ignored");
    } else if (TagMap* tags = st.current_tags()) {
      (*tags)[k] = v;
    }
  } else if (std::strcmp(name, "nd") == 0 &&
             st.current == ParserState::Current::kWay) {
    std::int64_t ref = 0;
    if (parse_i64(find_attr(atts, "ref"), ref)) {
      st.way.node_refs.push_back(ref);
    } else {
      st.diagnostic("nd without valid ref ignored");
    }
  } else if (std::strcmp(name, "member") == 0 &&
             st.current == ParserState::Current::kRelation) {
    RelationMember m;
    const char* type = find_attr(atts, "type");
    if (!parse_i64(find_attr(atts, "ref"), m.ref) || type == nullptr) {
      st.diagnostic("member without valid type/ref ignored");
      return;
    }
    if (std::strcmp(type, "node") == 0) {
      m.type = EntityKind::kNode;
    } else if (std::strcmp(type, "way") == 0) {
      m.type = EntityKind::kWay;
    } else if (std::strcmp(type, "relation") == 0) {
      m.type = EntityKind::kRelation;
    } else {
      st.diagnostic("member with unknown type '" + std::string(type) +
                    "' ignored");
      return;
    }
    const char* role = find_attr(atts, "role");
    m.role = role != nullptr ? role : "";
    st.relation.members.push_back(m);
  } else {
    ++st.data.unknown_elements;
    st.unknown_depth = 1;
  }
}

void handle_end(void* user, const char* name) {
  auto& st = *static_cast<ParserState*>(user);
  if (!st.semantic_error.empty()) return;

  if (st.unknown_depth > 0) {
    --st.unknown_depth;
    return;
  }

  if (st.current == ParserState::Current::kNode &&
      std::strcmp(name, "node") == 0) {
    if (!st.current_broken) {
      if (!st.node.location.is_valid()) {
        st.diagnostic("node " + std::to_string(st.node.id) +
                      " has out-of-range coordinates, skipped");
      } else if (!st.data.nodes.emplace(st.node.id, st.node).second) {
        st.diagnostic("duplicate node id " + std::to_string(st.node.id) +
                      ", keeping the first");
      }
    }
    st.current = ParserState::Current::kNone;
  } else if (st.current == ParserState::Current::kWay &&
             std::strcmp(name, "way") == 0) {
    if (!st.current_broken &&
        !st.data.ways.emplace(st.way.id, st.way).second) {
      st.diagnostic("duplicate way id " + std::to_string(st.way.id) +
                    ", keeping the first");
    }
    st.current = ParserState::Current::kNone;
  } else if (st.current == ParserState::Current::kRelation &&
             std::strcmp(name, "relation") == 0) {
    if (!st.current_broken &&
        !st.data.relations.emplace(st.relation.id, st.relation).second) {
      st.diagnostic("duplicate relation id " +
                    std::to_string(st.relation.id) + ", keeping the first");
    }
    st.current = ParserState::Current::kNone;
  }
}

} // namespace

OsmData parse_osm_xml(std::istream& in) {
  XML_Parser parser = XML_ParserCreate(nullptr);
  if (parser == nullptr) throw ParseError("could not create XML parser");

  ParserState st;
  st.parser = parser;
  XML_SetUserData(parser, &st);
  XML_SetElementHandler(parser, handle_start, handle_end);

  char buf[65536];
  bool done = false;
  while (!done) {
    in.read(buf, sizeof(buf));
    const std::streamsize n = in.gcount();
    done = n < static_cast<std::streamsize>(sizeof(buf));
    if (XML_Parse(parser, buf, static_cast<int>(n), done ? 1 : 0) ==
        XML_STATUS_ERROR) {
      std::ostringstream msg;
      if (!st.semantic_error.empty()) {
        msg << st.semantic_error;
      } else {
        msg << "malformed OSM XML: "
            << XML_ErrorString(XML_GetErrorCode(parser));
      }
      msg << " at line " << XML_GetCurrentLineNumber(parser) << ", column "
          << XML_GetCurrentColumnNumber(parser);
      XML_ParserFree(parser);
      throw ParseError(msg.str());
    }
  }
  XML_ParserFree(parser);

  if (!st.saw_root) throw ParseError("empty document, expected <osm> root");

  // Record dangling way->node references.
  for (const auto& [id, way] : st.data.ways) {
    for (std::int64_t ref : way.node_refs) {
      if (st.data.nodes.find(ref) == st.data.nodes.end()) {
        ++st.data.dangling_refs;
        st.data.diagnostics.push_back("way " + std::to_string(id) +
                                      " references missing node " +
                                      std::to_string(ref));
      }
    }
  }
  return st.data;
}

OsmData load_osm_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw DataError("cannot open OSM file: " + path.string());
  }
  return parse_osm_xml(in);
}

} // namespace sur::osm
