#pragma once

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <iterator>
#include <sstream>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "s4forge/error.hpp"
#include "s4forge/hash.hpp"
#include "s4forge/snapshot.hpp"

namespace s4forge {

namespace detail {

using nlohmann::json;

inline void require_keys(const json& obj, const std::string& path,
                         std::initializer_list<std::string_view> keys) {
  if (!obj.is_object()) throw SchemaError(path, "expected object");
  for (auto k : keys)
    if (!obj.contains(std::string(k))) throw SchemaError(path + "/" + std::string(k), "missing field");
  for (const auto& [k, _] : obj.items()) {
    bool known = false;
    for (auto allowed : keys) known = known || allowed == k;
    if (!known) throw SchemaError(path + "/" + k, "unknown field");
  }
}

inline std::string get_string(const json& v, const std::string& path) {
  if (!v.is_string()) throw SchemaError(path, "expected string");
  return v.get<std::string>();
}

inline std::int64_t get_int(const json& v, const std::string& path) {
  if (!v.is_number_integer()) throw SchemaError(path, "expected integer");
  return v.get<std::int64_t>();
}

inline bool get_bool(const json& v, const std::string& path) {
  if (!v.is_boolean()) throw SchemaError(path, "expected boolean");
  return v.get<bool>();
}

inline BBox get_bbox(const json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 4) throw SchemaError(path, "expected [x_min, y_min, x_max, y_max]");
  double c[4];
  for (std::size_t i = 0; i < 4; ++i) {
    if (!v[i].is_number()) throw SchemaError(path + "/" + std::to_string(i), "expected number");
    c[i] = v[i].get<double>();
  }
  BBox b{c[0], c[1], c[2], c[3]};
  if (!b.finite()) throw GeometryError("non-finite box at " + path);
  if (!b.ordered()) throw GeometryError("inverted box at " + path);
  return b;
}

inline std::optional<NodeId> get_optional_id(const json& v, const std::string& path) {
  if (v.is_null()) return std::nullopt;
  return NodeId{get_int(v, path)};
}

inline std::string lowercase(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

inline bool has_whitespace(std::string_view s) {
  for (unsigned char c : s)
    if (std::isspace(c)) return true;
  return false;
}

inline json bbox_json(const BBox& b) { return json::array({b.x_min, b.y_min, b.x_max, b.y_max}); }

inline DomNode parse_node(const json& j, const std::string& path, const Viewport& vp) {
  require_keys(j, path,
               {"id", "parent_id", "child_ids", "tag", "kind", "attributes", "bbox",
                "css_visible", "hit_target_id", "words", "xpath"});
  DomNode n;
  n.id = NodeId{get_int(j["id"], path + "/id")};
  n.parent_id = get_optional_id(j["parent_id"], path + "/parent_id");

  const auto& kids = j["child_ids"];
  if (!kids.is_array()) throw SchemaError(path + "/child_ids", "expected array");
  for (std::size_t i = 0; i < kids.size(); ++i)
    n.child_ids.push_back(NodeId{get_int(kids[i], path + "/child_ids/" + std::to_string(i))});

  n.tag = lowercase(get_string(j["tag"], path + "/tag"));
  if (n.tag.empty()) throw SchemaError(path + "/tag", "empty tag");
  const auto kind = parse_node_kind(get_string(j["kind"], path + "/kind"));
  if (!kind) throw SchemaError(path + "/kind", "expected one of text|image|table|input|other");
  n.kind = *kind;

  const auto& attrs = j["attributes"];
  if (!attrs.is_object()) throw SchemaError(path + "/attributes", "expected object");
  for (const auto& [name, value] : attrs.items()) {
    const std::string key = lowercase(name);
    if (!is_whitelisted_attribute(key)) continue;
    n.attributes[key] = get_string(value, path + "/attributes/" + name);
  }

  if (!j["bbox"].is_null()) n.bbox = get_bbox(j["bbox"], path + "/bbox").clipped(vp);
  n.css_visible = get_bool(j["css_visible"], path + "/css_visible");
  n.hit_target_id = get_optional_id(j["hit_target_id"], path + "/hit_target_id");

  const auto& words = j["words"];
  if (!words.is_array()) throw SchemaError(path + "/words", "expected array");
  for (std::size_t i = 0; i < words.size(); ++i) {
    const std::string wp = path + "/words/" + std::to_string(i);
    require_keys(words[i], wp, {"text", "bbox"});
    Word w{get_string(words[i]["text"], wp + "/text"), get_bbox(words[i]["bbox"], wp + "/bbox")};
    if (w.text.empty() || has_whitespace(w.text))
      throw SchemaError(wp + "/text", "word must be non-empty without whitespace");
    w.bbox = w.bbox.clipped(vp);
    n.words.push_back(std::move(w));
  }
  n.xpath = get_string(j["xpath"], path + "/xpath");

  if (n.kind == NodeKind::Text) {
    if (n.words.empty()) throw SchemaError(path + "/words", "text node without words");
    if (!n.child_ids.empty()) throw SchemaError(path + "/child_ids", "text node with children");
  } else if (!n.words.empty()) {
    throw SchemaError(path + "/words", "words on a non-text node");
  }
  if (n.kind == NodeKind::Image && n.tag != "img")
    throw SchemaError(path + "/tag", "image node must have tag img");
  return n;
}

}  // namespace detail

/// Parses and checks one harvester snapshot document.
///
/// Every field of the wire format is required (nullable ones may be null)
/// and unknown fields are rejected. Non-whitelisted attributes are dropped
/// and boxes are clipped to the viewport.
/// Throws SchemaError, TreeError or GeometryError.
inline PageSnapshot validate_snapshot(std::string_view raw) {
  using detail::json;
  json doc;
  try {
    doc = json::parse(raw);
  } catch (const json::parse_error& e) {
    throw SchemaError("", std::string("malformed JSON: ") + e.what());
  }
  detail::require_keys(doc, "",
                       {"url", "url_hash", "viewport", "root_id", "document_title", "screenshot",
                        "nodes"});
  PageInfo info;
  info.url = detail::get_string(doc["url"], "/url");
  const auto hash = parse_hex16(detail::get_string(doc["url_hash"], "/url_hash"));
  if (!hash) throw SchemaError("/url_hash", "expected 16 lowercase hex digits");
  if (*hash != url_hash(info.url))
    throw SchemaError("/url_hash", "does not match normalized url (expected " +
                                       to_hex16(url_hash(info.url)) + ")");
  info.url_hash = *hash;

  detail::require_keys(doc["viewport"], "/viewport", {"width", "height"});
  info.viewport.width_px = static_cast<int>(detail::get_int(doc["viewport"]["width"], "/viewport/width"));
  info.viewport.height_px =
      static_cast<int>(detail::get_int(doc["viewport"]["height"], "/viewport/height"));
  if (!info.viewport.valid()) throw SchemaError("/viewport", "dimensions must be positive");

  info.document_title = detail::get_string(doc["document_title"], "/document_title");
  info.screenshot_ref = detail::get_string(doc["screenshot"], "/screenshot");
  const NodeId root{detail::get_int(doc["root_id"], "/root_id")};

  const auto& jnodes = doc["nodes"];
  if (!jnodes.is_array()) throw SchemaError("/nodes", "expected array");
  std::vector<DomNode> nodes;
  nodes.reserve(jnodes.size());
  for (std::size_t i = 0; i < jnodes.size(); ++i)
    nodes.push_back(detail::parse_node(jnodes[i], "/nodes/" + std::to_string(i), info.viewport));

  PageSnapshot snap(std::move(info), root, std::move(nodes));
  if (snap.node(root).tag != "html") throw TreeError("root node tag is not html");
  return snap;
}

inline nlohmann::json to_json(const PageSnapshot& s) {
  using detail::json;
  json nodes = json::array();
  for (const auto& n : s.nodes()) {
    json kids = json::array();
    for (NodeId c : n.child_ids) kids.push_back(to_int(c));
    json words = json::array();
    for (const auto& w : n.words) words.push_back({{"text", w.text}, {"bbox", detail::bbox_json(w.bbox)}});
    json attrs = json::object();
    for (const auto& [k, v] : n.attributes) attrs[k] = v;
    nodes.push_back({
        {"id", to_int(n.id)},
        {"parent_id", n.parent_id ? json(to_int(*n.parent_id)) : json(nullptr)},
        {"child_ids", std::move(kids)},
        {"tag", n.tag},
        {"kind", std::string(to_string(n.kind))},
        {"attributes", std::move(attrs)},
        {"bbox", n.bbox ? detail::bbox_json(*n.bbox) : json(nullptr)},
        {"css_visible", n.css_visible},
        {"hit_target_id", n.hit_target_id ? json(to_int(*n.hit_target_id)) : json(nullptr)},
        {"words", std::move(words)},
        {"xpath", n.xpath},
    });
  }
  const auto& info = s.info();
  return {
      {"url", info.url},
      {"url_hash", to_hex16(info.url_hash)},
      {"viewport", {{"width", info.viewport.width_px}, {"height", info.viewport.height_px}}},
      {"root_id", to_int(s.root_id())},
      {"document_title", info.document_title},
      {"screenshot", info.screenshot_ref},
      {"nodes", std::move(nodes)},
  };
}

inline std::string serialize_snapshot(const PageSnapshot& s) { return to_json(s).dump(); }

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

/// Loads a snapshot file. The screenshot reference is resolved against the
/// snapshot's directory so callers get a usable path.
inline PageSnapshot load_snapshot(const std::filesystem::path& path) {
  PageSnapshot s = validate_snapshot(read_file(path));
  PageInfo info = s.info();
  const std::filesystem::path shot(info.screenshot_ref);
  if (shot.is_relative()) info.screenshot_ref = (path.parent_path() / shot).string();
  std::vector<DomNode> nodes(s.nodes().begin(), s.nodes().end());
  return PageSnapshot(std::move(info), s.root_id(), std::move(nodes));
}

}  // namespace s4forge
