#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "s4forge/error.hpp"
#include "s4forge/geometry.hpp"

namespace s4forge {

enum class NodeId : std::int64_t {};

constexpr std::int64_t to_int(NodeId id) { return static_cast<std::int64_t>(id); }
inline std::string to_string(NodeId id) { return std::to_string(to_int(id)); }

enum class NodeKind { Text, Image, Table, Input, Other };

inline std::string_view to_string(NodeKind k) {
  switch (k) {
    case NodeKind::Text: return "text";
    case NodeKind::Image: return "image";
    case NodeKind::Table: return "table";
    case NodeKind::Input: return "input";
    case NodeKind::Other: return "other";
  }
  return "other";
}

inline std::optional<NodeKind> parse_node_kind(std::string_view s) {
  if (s == "text") return NodeKind::Text;
  if (s == "image") return NodeKind::Image;
  if (s == "table") return NodeKind::Table;
  if (s == "input") return NodeKind::Input;
  if (s == "other") return NodeKind::Other;
  return std::nullopt;
}

// The only attributes kept at ingest, in the order descriptions use them.
inline constexpr std::array<std::string_view, 7> kAttributeOrder = {
    "class", "id", "label", "for", "alt", "title", "type"};

inline bool is_whitelisted_attribute(std::string_view name) {
  for (auto a : kAttributeOrder)
    if (a == name) return true;
  return false;
}

struct Word {
  std::string text;
  BBox bbox;
  friend bool operator==(const Word&, const Word&) = default;
};

struct DomNode {
  NodeId id{};
  std::optional<NodeId> parent_id;
  std::vector<NodeId> child_ids;
  std::string tag;
  NodeKind kind = NodeKind::Other;
  std::map<std::string, std::string> attributes;
  std::optional<BBox> bbox;
  bool css_visible = true;
  std::optional<NodeId> hit_target_id;
  std::vector<Word> words;
  std::string xpath;

  bool is_text() const { return kind == NodeKind::Text; }
  const std::string* attribute(std::string_view name) const {
    auto it = attributes.find(std::string(name));
    return it == attributes.end() ? nullptr : &it->second;
  }
  friend bool operator==(const DomNode&, const DomNode&) = default;
};

struct PageInfo {
  std::string url;
  std::uint64_t url_hash = 0;
  Viewport viewport;
  std::string document_title;
  std::string screenshot_ref;
  friend bool operator==(const PageInfo&, const PageInfo&) = default;
};

/// A rendered page: metadata plus a rooted DOM tree.
///
/// Nodes are stored in document pre-order, so `order(id)` is the reading
/// position and every subtree occupies a contiguous range of that order. The
/// constructor rejects anything that is not a single rooted tree; once built
/// the snapshot is immutable and all cleaning steps return a new one.
class PageSnapshot {
 public:
  PageSnapshot(PageInfo info, NodeId root, std::vector<DomNode> nodes)
      : info_(std::move(info)), root_(root) {
    build(std::move(nodes));
  }

  const PageInfo& info() const { return info_; }
  const Viewport& viewport() const { return info_.viewport; }
  NodeId root_id() const { return root_; }

  std::span<const DomNode> nodes() const { return nodes_; }
  std::size_t size() const { return nodes_.size(); }

  bool contains(NodeId id) const { return index_.count(id) != 0; }
  const DomNode* find(NodeId id) const {
    auto it = index_.find(id);
    return it == index_.end() ? nullptr : &nodes_[it->second];
  }
  const DomNode& node(NodeId id) const { return nodes_[order(id)]; }

  /// Pre-order position. Throws UnknownNode.
  std::size_t order(NodeId id) const {
    auto it = index_.find(id);
    if (it == index_.end()) throw UnknownNode("unknown node id " + to_string(id));
    return it->second;
  }

  std::size_t depth(NodeId id) const { return depth_[order(id)]; }

  // One past the pre-order position of the last node in id's subtree.
  std::size_t subtree_end(NodeId id) const { return subtree_end_[order(id)]; }

  bool is_descendant_or_self(NodeId node, NodeId ancestor) const {
    const std::size_t a = order(ancestor);
    const std::size_t n = order(node);
    return a <= n && n < subtree_end_[a];
  }

  /// Copy with the given subtrees removed. Hit targets that pointed into the
  /// removed part are cleared. Throws EmptyPage if the root is removed.
  PageSnapshot without_subtrees(const std::unordered_set<NodeId>& roots) const {
    if (roots.count(root_)) throw EmptyPage("root node pruned");
    std::vector<DomNode> kept;
    kept.reserve(nodes_.size());
    std::size_t skip_until = 0;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      if (i < skip_until) continue;
      if (roots.count(nodes_[i].id)) {
        skip_until = subtree_end_[i];
        continue;
      }
      kept.push_back(nodes_[i]);
    }
    return rebuilt(std::move(kept));
  }

  /// New snapshot from a subset of this snapshot's nodes (any order). Child
  /// lists are filtered to surviving ids and dangling hit targets cleared.
  PageSnapshot rebuilt(std::vector<DomNode> kept) const {
    std::unordered_set<NodeId> alive;
    alive.reserve(kept.size());
    for (const auto& n : kept) alive.insert(n.id);
    for (auto& n : kept) {
      std::erase_if(n.child_ids, [&](NodeId c) { return !alive.count(c); });
      if (n.hit_target_id && !alive.count(*n.hit_target_id)) n.hit_target_id.reset();
    }
    return PageSnapshot(info_, root_, std::move(kept));
  }

  friend bool operator==(const PageSnapshot& a, const PageSnapshot& b) {
    return a.info_ == b.info_ && a.root_ == b.root_ && a.nodes_ == b.nodes_;
  }

 private:
  void build(std::vector<DomNode> nodes) {
    std::unordered_map<NodeId, std::size_t> by_id;
    by_id.reserve(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      if (!by_id.emplace(nodes[i].id, i).second)
        throw TreeError("duplicate node id " + to_string(nodes[i].id));
    }
    auto root_it = by_id.find(root_);
    if (root_it == by_id.end()) throw TreeError("root id " + to_string(root_) + " not present");
    if (nodes[root_it->second].parent_id)
      throw TreeError("root node " + to_string(root_) + " has a parent");

    for (const auto& n : nodes) {
      if (n.parent_id) {
        if (*n.parent_id == n.id) throw TreeError("node " + to_string(n.id) + " is its own parent");
        auto p = by_id.find(*n.parent_id);
        if (p == by_id.end())
          throw TreeError("node " + to_string(n.id) + " has dangling parent " +
                          to_string(*n.parent_id));
        const auto& siblings = nodes[p->second].child_ids;
        if (std::count(siblings.begin(), siblings.end(), n.id) != 1)
          throw TreeError("node " + to_string(n.id) + " listed " +
                          std::to_string(std::count(siblings.begin(), siblings.end(), n.id)) +
                          " times in its parent's children");
      } else if (n.id != root_) {
        throw TreeError("orphan node " + to_string(n.id));
      }
      for (NodeId c : n.child_ids) {
        auto ci = by_id.find(c);
        if (ci == by_id.end())
          throw TreeError("node " + to_string(n.id) + " has dangling child " + to_string(c));
        if (nodes[ci->second].parent_id != n.id)
          throw TreeError("child " + to_string(c) + " does not point back to " + to_string(n.id));
      }
      if (n.hit_target_id && !by_id.count(*n.hit_target_id))
        throw TreeError("node " + to_string(n.id) + " has dangling hit target " +
                        to_string(*n.hit_target_id));
    }

    // Iterative pre-order walk; any node not reached sits on a cycle.
    nodes_.clear();
    nodes_.reserve(nodes.size());
    depth_.assign(nodes.size(), 0);
    subtree_end_.assign(nodes.size(), 0);
    std::vector<std::size_t> visited(nodes.size(), 0);
    struct Frame {
      std::size_t src;
      std::size_t pos;
      std::size_t next_child;
    };
    std::vector<Frame> stack;
    auto enter = [&](std::size_t src, std::size_t depth) {
      if (visited[src]++) throw TreeError("cycle through node " + to_string(nodes[src].id));
      depth_[nodes_.size()] = depth;
      stack.push_back({src, nodes_.size(), 0});
      nodes_.push_back(std::move(nodes[src]));
    };
    enter(root_it->second, 0);
    while (!stack.empty()) {
      Frame& f = stack.back();
      const auto& kids = nodes_[f.pos].child_ids;
      if (f.next_child < kids.size()) {
        const std::size_t src = by_id.at(kids[f.next_child++]);
        const std::size_t d = depth_[f.pos] + 1;
        enter(src, d);
      } else {
        subtree_end_[f.pos] = nodes_.size();
        stack.pop_back();
      }
    }
    if (nodes_.size() != nodes.size()) throw TreeError("tree has a cycle or unreachable nodes");

    index_.clear();
    index_.reserve(nodes_.size());
    for (std::size_t i = 0; i < nodes_.size(); ++i) index_.emplace(nodes_[i].id, i);
  }

  PageInfo info_;
  NodeId root_{};
  std::vector<DomNode> nodes_;
  std::vector<std::size_t> depth_;
  std::vector<std::size_t> subtree_end_;
  std::unordered_map<NodeId, std::size_t> index_;
};

/// Edges from the root to `id`. Throws UnknownNode.
inline std::size_t node_depth(const PageSnapshot& s, NodeId id) { return s.depth(id); }

inline std::string text_of(const DomNode& n) {
  std::string out;
  for (const auto& w : n.words) {
    if (!out.empty()) out += ' ';
    out += w.text;
  }
  return out;
}

}  // namespace s4forge
