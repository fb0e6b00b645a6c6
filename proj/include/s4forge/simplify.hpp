#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "s4forge/snapshot.hpp"

namespace s4forge {

/// Makes free text safe inside bracketed targets: '<', '>' and '&' become
/// entities, so every literal bracket in a target is structural or a
/// coordinate token.
inline std::string escape_text(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

inline std::string escaped_words(const DomNode& n) {
  std::string out;
  for (const auto& w : n.words) {
    if (!out.empty()) out += ' ';
    out += escape_text(w.text);
  }
  return out;
}

struct SimplifiedHtml {
  std::string text;
  bool named_tags = false;
};

namespace detail {

inline void serialize_simplified(const PageSnapshot& s, const DomNode& n, bool named,
                                 std::string& out) {
  if (n.is_text()) {
    out += escaped_words(n);
    return;
  }
  if (!named) {
    // Collapse single-element-child chains down to the innermost element.
    const DomNode* cur = &n;
    while (cur->child_ids.size() == 1) {
      const DomNode& only = s.node(cur->child_ids.front());
      if (only.is_text()) break;
      cur = &only;
    }
    if (cur != &n) {
      serialize_simplified(s, *cur, named, out);
      return;
    }
  }
  out += '<';
  bool first = true;
  if (named) {
    out += n.tag;
    first = false;
  }
  for (NodeId c : n.child_ids) {
    if (!first) out += ' ';
    serialize_simplified(s, s.node(c), named, out);
    first = false;
  }
  out += '>';
}

}  // namespace detail

/// Bracketed serialization of the subtree at `region_root`.
///
/// Each element becomes "<" children ">", siblings separated by one space,
/// text nodes contribute their words. With `named_tags` the tag name follows
/// the open bracket and every element is kept. Without it, chains of
/// elements whose only child is another element collapse to the innermost
/// one, so `<html><body>Hello world` gives "<Hello world>". A text node as
/// region root is wrapped in one bracket level. Throws UnknownNode.
inline SimplifiedHtml simplify(const PageSnapshot& s, NodeId region_root, bool named_tags) {
  const DomNode& root = s.node(region_root);
  SimplifiedHtml out{{}, named_tags};
  if (root.is_text()) {
    out.text = "<" + escaped_words(root) + ">";
    return out;
  }
  detail::serialize_simplified(s, root, named_tags, out.text);
  return out;
}

inline constexpr std::array<std::string_view, 10> kLayoutTags = {
    "p", "table", "form", "dl", "button", "ol", "ul", "nav", "img", "object"};

inline bool is_layout_tag(std::string_view tag) {
  for (auto t : kLayoutTags)
    if (t == tag) return true;
  return false;
}

struct CleanedXpath {
  std::vector<std::pair<std::string, std::size_t>> segments;

  bool empty() const { return segments.empty(); }
  std::string str() const {
    std::string out;
    for (const auto& [tag, idx] : segments) {
      if (!out.empty()) out += '/';
      out += tag + "[" + std::to_string(idx) + "]";
    }
    return out;
  }
  std::string_view last_tag() const {
    return segments.empty() ? std::string_view{} : std::string_view(segments.back().first);
  }
  friend bool operator==(const CleanedXpath&, const CleanedXpath&) = default;
};

/// Root-to-node path keeping only layout tags. Each kept segment is indexed
/// by its 0-based position among same-tag siblings. Throws UnknownNode.
inline CleanedXpath cleaned_xpath(const PageSnapshot& s, NodeId id) {
  std::vector<NodeId> chain;
  for (std::optional<NodeId> cur = id; cur; cur = s.node(*cur).parent_id) chain.push_back(*cur);
  CleanedXpath out;
  for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
    const DomNode& n = s.node(*it);
    if (!is_layout_tag(n.tag)) continue;
    std::size_t idx = 0;
    if (n.parent_id) {
      for (NodeId sib : s.node(*n.parent_id).child_ids) {
        if (sib == n.id) break;
        if (s.node(sib).tag == n.tag) ++idx;
      }
    }
    out.segments.emplace_back(n.tag, idx);
  }
  return out;
}

}  // namespace s4forge
