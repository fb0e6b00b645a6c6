#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <compare>
#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "s4forge/error.hpp"
#include "s4forge/quantize.hpp"
#include "s4forge/rng.hpp"
#include "s4forge/simplify.hpp"
#include "s4forge/snapshot.hpp"
#include "s4forge/task.hpp"
#include "s4forge/vocab.hpp"

namespace s4forge {

struct TaskConfig {
  std::size_t region_max_words = 50;
  double screen_parsing_mask_ratio = 0.5;
  double image_grounding_mask_ratio = 0.9;
  double title_overlap_threshold = 0.6;
};

struct TaskContext {
  const Vocabulary& vocab;
  TaskConfig config{};
};

// ---------------------------------------------------------------------------
// Shared helpers

/// Visible word count of each subtree, indexed by pre-order position.
inline std::vector<std::size_t> subtree_word_counts(const PageSnapshot& s) {
  const auto nodes = s.nodes();
  std::vector<std::size_t> counts(nodes.size(), 0);
  for (std::size_t i = nodes.size(); i-- > 0;) {
    counts[i] += nodes[i].words.size();
    if (nodes[i].parent_id) counts[s.order(*nodes[i].parent_id)] += counts[i];
  }
  return counts;
}

/// Union of every box in the subtree (node boxes and word boxes).
inline std::optional<BBox> subtree_box(const PageSnapshot& s, NodeId id) {
  std::optional<BBox> out;
  auto add = [&](const BBox& b) { out = out ? out->united(b) : b; };
  const auto nodes = s.nodes();
  for (std::size_t i = s.order(id), end = s.subtree_end(id); i < end; ++i) {
    if (nodes[i].bbox) add(*nodes[i].bbox);
    for (const auto& w : nodes[i].words) add(w.bbox);
  }
  return out;
}

// The node's own box, falling back to what its subtree covers.
inline BBox node_box(const PageSnapshot& s, NodeId id) {
  if (const auto& b = s.node(id).bbox) return *b;
  if (auto u = subtree_box(s, id)) return *u;
  return {};
}

/// Roots of the maximal subtrees holding between 1 and `max_words` words,
/// in document order.
inline std::vector<NodeId> region_candidates(const PageSnapshot& s, std::size_t max_words) {
  const auto counts = subtree_word_counts(s);
  const auto nodes = s.nodes();
  std::vector<NodeId> out;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (counts[i] == 0 || counts[i] > max_words) continue;
    if (nodes[i].parent_id && counts[s.order(*nodes[i].parent_id)] <= max_words) continue;
    out.push_back(nodes[i].id);
  }
  return out;
}

/// Uniform draw among `region_candidates`. Throws TaskError(NoRegion).
inline NodeId select_region(const PageSnapshot& s, std::size_t max_words, Rng& rng) {
  const auto cands = region_candidates(s, max_words);
  if (cands.empty()) throw TaskError(TaskErrorCode::NoRegion);
  return cands[rng.below(cands.size())];
}

struct WordRef {
  NodeId node;
  std::size_t index;
  friend auto operator<=>(const WordRef&, const WordRef&) = default;
};

/// Words of the subtree at `scope` in reading order.
inline std::vector<WordRef> words_in(const PageSnapshot& s, NodeId scope) {
  std::vector<WordRef> out;
  const auto nodes = s.nodes();
  for (std::size_t i = s.order(scope), end = s.subtree_end(scope); i < end; ++i)
    for (std::size_t w = 0; w < nodes[i].words.size(); ++w) out.push_back({nodes[i].id, w});
  return out;
}

inline const Word& word_at(const PageSnapshot& s, const WordRef& r) {
  return s.node(r.node).words[r.index];
}

// floor(ratio * total), plus one with probability equal to the remainder.
// Fixed rounding skews small scopes: half-up masks 2 of 3 words at 0.5.
inline std::size_t mask_count(double ratio, std::size_t total, Rng& rng) {
  const double exact = ratio * static_cast<double>(total);
  auto k = static_cast<std::size_t>(std::floor(exact));
  const double rest = exact - std::floor(exact);
  if (rest > 1e-9 && rng.unit() < rest) ++k;
  return std::min(k, total);
}

struct MaskResult {
  std::vector<RenderDirective> directives;
  std::vector<WordRef> masked;  // reading order
  std::size_t total = 0;
};

/// Masks mask_count(ratio, W) of the W words under `scope`, chosen
/// uniformly without replacement. One MaskRect per word, in reading order.
inline MaskResult mask_words(const PageSnapshot& s, NodeId scope, double ratio, Rng& rng) {
  if (!(ratio >= 0.0 && ratio <= 1.0)) throw ConfigError("mask ratio must lie in [0, 1]");
  auto words = words_in(s, scope);
  MaskResult out;
  out.total = words.size();
  const std::size_t k = mask_count(ratio, words.size(), rng);
  std::vector<std::size_t> idx(words.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  for (std::size_t i = 0; i < k; ++i) std::swap(idx[i], idx[i + rng.below(idx.size() - i)]);
  idx.resize(k);
  std::sort(idx.begin(), idx.end());
  for (std::size_t i : idx) {
    out.masked.push_back(words[i]);
    out.directives.push_back(RenderDirective::mask(word_at(s, words[i]).bbox));
  }
  return out;
}

namespace detail {

inline bool is_ascii_digit(char c) { return c >= '0' && c <= '9'; }
inline bool is_ascii_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }

inline std::size_t codepoints(std::string_view s) {
  std::size_t n = 0;
  for (unsigned char c : s) n += (c & 0xc0) != 0x80;
  return n;
}

inline bool is_numeric_token(std::string_view s) {
  bool digit = false;
  for (char c : s) {
    if (is_ascii_digit(c)) digit = true;
    else if (std::string_view(".,-+:/%").find(c) == std::string_view::npos) return false;
  }
  return digit;
}

inline bool mixes_letters_and_digits(std::string_view s) {
  bool alpha = false, digit = false;
  for (char c : s) {
    alpha = alpha || is_ascii_alpha(c);
    digit = digit || is_ascii_digit(c);
  }
  return alpha && digit;
}

inline std::vector<std::string> split_ws(std::string_view s) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    std::size_t j = i;
    while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
    if (j > i) out.emplace_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

inline std::string join(const std::vector<std::string>& parts, std::string_view sep = " ") {
  std::string out;
  for (const auto& p : parts) {
    if (!out.empty()) out += sep;
    out += p;
  }
  return out;
}

inline std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

}  // namespace detail

/// Drops attribute tokens that are purely numeric, a single character, mix
/// letters with digits, or cannot be encoded without the unknown piece.
/// Survivors keep their order. Throws VocabMissing on an empty vocabulary.
inline std::vector<std::string> filter_attr_tokens(std::span<const std::string> values,
                                                   const Vocabulary& vocab) {
  if (vocab.empty()) throw VocabMissing("attribute filter needs a loaded vocabulary");
  std::vector<std::string> out;
  for (const auto& v : values) {
    if (v.empty() || detail::codepoints(v) == 1) continue;
    if (detail::is_numeric_token(v) || detail::mixes_letters_and_digits(v)) continue;
    if (!vocab.representable(v)) continue;
    out.push_back(v);
  }
  return out;
}

/// Whitespace-split values of the listed attributes, attribute order kept.
inline std::vector<std::string> attribute_tokens(const DomNode& n,
                                                 std::span<const std::string_view> names) {
  std::vector<std::string> out;
  for (auto name : names) {
    if (const auto* v = n.attribute(name)) {
      auto parts = detail::split_ws(*v);
      out.insert(out.end(), parts.begin(), parts.end());
    }
  }
  return out;
}

/// Text node at the smallest tree distance from `img_id`; earlier in reading
/// order wins ties. Throws TaskError(NoTextNode).
inline NodeId nearest_text_node(const PageSnapshot& s, NodeId img_id) {
  const auto nodes = s.nodes();
  std::vector<char> seen(nodes.size(), 0);
  std::vector<std::size_t> frontier{s.order(img_id)};
  seen[frontier[0]] = 1;
  while (!frontier.empty()) {
    std::optional<std::size_t> best;
    for (std::size_t p : frontier)
      if (nodes[p].is_text() && (!best || p < *best)) best = p;
    if (best) return nodes[*best].id;
    std::vector<std::size_t> next;
    for (std::size_t p : frontier) {
      auto visit = [&](NodeId id) {
        const std::size_t q = s.order(id);
        if (!seen[q]) {
          seen[q] = 1;
          next.push_back(q);
        }
      };
      if (nodes[p].parent_id) visit(*nodes[p].parent_id);
      for (NodeId c : nodes[p].child_ids) visit(c);
    }
    frontier = std::move(next);
  }
  throw TaskError(TaskErrorCode::NoTextNode);
}

/// Relation of `a` to `b`: Parent means a is b's parent. Throws UnknownNode.
inline NodeRelation node_relation(const PageSnapshot& s, NodeId a, NodeId b) {
  const DomNode& na = s.node(a);
  const DomNode& nb = s.node(b);
  if (a == b) return NodeRelation::Self;
  if (nb.parent_id == a) return NodeRelation::Parent;
  if (na.parent_id == b) return NodeRelation::Child;
  if (na.parent_id && na.parent_id == nb.parent_id) return NodeRelation::Sibling;
  if (s.is_descendant_or_self(b, a)) return NodeRelation::Ancestor;
  if (s.is_descendant_or_self(a, b)) return NodeRelation::Descendant;
  return NodeRelation::Others;
}

/// Lowercased ASCII alphanumeric runs; bytes >= 0x80 count as word
/// characters so non-Latin titles still tokenize.
inline std::vector<std::string> title_tokens(std::string_view s) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isalnum(c) || c >= 0x80) {
      cur += static_cast<char>(std::tolower(c));
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

/// Share of the candidate's distinct tokens that also occur in the title.
inline double title_overlap(std::string_view candidate, std::string_view title) {
  const auto ct = title_tokens(candidate);
  const auto tt = title_tokens(title);
  const std::set<std::string> cand(ct.begin(), ct.end());
  const std::set<std::string> ttl(tt.begin(), tt.end());
  if (cand.empty()) return 0.0;
  std::size_t hit = 0;
  for (const auto& t : cand) hit += ttl.count(t);
  return static_cast<double>(hit) / static_cast<double>(cand.size());
}

/// Smallest box holding every box in the table's subtree.
inline BBox table_merged_box(const PageSnapshot& s, NodeId table) {
  std::optional<BBox> out;
  const auto nodes = s.nodes();
  for (std::size_t i = s.order(table), end = s.subtree_end(table); i < end; ++i)
    if (nodes[i].bbox) out = out ? out->united(*nodes[i].bbox) : *nodes[i].bbox;
  return out ? *out : node_box(s, table);
}

inline std::vector<NodeId> table_roots(const PageSnapshot& s) {
  std::vector<NodeId> out;
  for (const auto& n : s.nodes())
    if (n.tag == "table") out.push_back(n.id);
  return out;
}

struct LayoutGroup {
  std::string key;  // cleaned xpath
  std::string tag;
  std::vector<NodeId> members;
  BBox region;
};

/// Leaves with a non-empty cleaned xpath, grouped by it. Groups come in the
/// reading order of their first member.
inline std::vector<LayoutGroup> layout_groups(const PageSnapshot& s) {
  std::vector<LayoutGroup> groups;
  std::map<std::string, std::size_t> by_key;
  for (const auto& n : s.nodes()) {
    if (!n.child_ids.empty() || !n.bbox) continue;
    const CleanedXpath path = cleaned_xpath(s, n.id);
    if (path.empty()) continue;
    std::string key = path.str();
    auto [it, fresh] = by_key.emplace(key, groups.size());
    if (fresh) groups.push_back({std::move(key), std::string(path.last_tag()), {}, *n.bbox});
    LayoutGroup& g = groups[it->second];
    g.members.push_back(n.id);
    g.region = g.region.united(*n.bbox);
  }
  return groups;
}

// ---------------------------------------------------------------------------
// Task constructors. Each reads a cleaned snapshot and throws TaskError when
// the page cannot supply the task.

namespace detail {

inline TaskSample start_sample(TaskKind kind, const PageSnapshot& s) {
  TaskSample t;
  t.kind = kind;
  t.screenshot_ref = s.info().screenshot_ref;
  t.url_hash = s.info().url_hash;
  return t;
}

inline std::vector<NodeId> boxed_elements(const PageSnapshot& s) {
  std::vector<NodeId> out;
  for (const auto& n : s.nodes())
    if (!n.is_text() && n.bbox) out.push_back(n.id);
  return out;
}

}  // namespace detail

inline TaskSample make_screen_parsing(const PageSnapshot& s, const TaskContext& ctx, Rng& rng) {
  auto t = detail::start_sample(TaskKind::ScreenParsing, s);
  const NodeId region = select_region(s, ctx.config.region_max_words, rng);
  t.directives.push_back(RenderDirective::outline(node_box(s, region)));
  auto mask = mask_words(s, region, ctx.config.screen_parsing_mask_ratio, rng);
  t.directives.insert(t.directives.end(), mask.directives.begin(), mask.directives.end());
  t.mask_counts = std::pair{mask.masked.size(), mask.total};
  t.target = simplify(s, region, /*named_tags=*/false).text;
  return t;
}

inline TaskSample make_ocr(const PageSnapshot& s, const TaskContext& ctx, Rng& rng) {
  auto t = detail::start_sample(TaskKind::Ocr, s);
  const NodeId region = select_region(s, ctx.config.region_max_words, rng);
  t.directives.push_back(RenderDirective::outline(node_box(s, region)));
  for (const auto& ref : words_in(s, region)) {
    const Word& w = word_at(s, ref);
    t.target += escape_text(w.text);
    t.target += bbox_tokens(w.bbox, s.viewport());
  }
  return t;
}

inline TaskSample make_image_grounding(const PageSnapshot& s, const TaskContext& ctx, Rng& rng) {
  auto t = detail::start_sample(TaskKind::ImageGrounding, s);
  std::vector<NodeId> images;
  bool any_text = false;
  for (const auto& n : s.nodes()) {
    if ((n.kind == NodeKind::Image || n.tag == "img") && n.bbox) images.push_back(n.id);
    any_text = any_text || n.is_text();
  }
  if (images.empty()) throw TaskError(TaskErrorCode::NoImage);
  // Every image has a neighbour caption as soon as the page has any text.
  std::vector<NodeId> captioned;
  for (NodeId id : images) {
    const auto* alt = s.node(id).attribute("alt");
    if (any_text || (alt && !detail::trim(*alt).empty())) captioned.push_back(id);
  }
  if (captioned.empty()) throw TaskError(TaskErrorCode::NoCaption);

  const NodeId img = captioned[rng.below(captioned.size())];
  const auto* alt = s.node(img).attribute("alt");
  const std::string alt_caption = alt ? detail::trim(*alt) : std::string();
  bool use_alt = !alt_caption.empty();
  if (use_alt && any_text) use_alt = rng.coin();
  const std::string caption = use_alt ? alt_caption : text_of(s.node(nearest_text_node(s, img)));

  auto mask = mask_words(s, s.root_id(), ctx.config.image_grounding_mask_ratio, rng);
  t.directives = std::move(mask.directives);
  t.mask_counts = std::pair{mask.masked.size(), mask.total};
  t.input_text = caption;
  t.target = escape_text(caption) + bbox_tokens(*s.node(img).bbox, s.viewport());
  return t;
}

/// "tag tok tok ...", or nothing when every attribute token is filtered.
inline std::optional<std::string> element_description(const DomNode& n, const Vocabulary& vocab) {
  const auto tokens = attribute_tokens(n, kAttributeOrder);
  const auto kept = filter_attr_tokens(tokens, vocab);
  if (kept.empty()) return std::nullopt;
  return n.tag + " " + detail::join(kept);
}

inline TaskSample make_element_grounding(const PageSnapshot& s, const TaskContext& ctx, Rng& rng) {
  auto t = detail::start_sample(TaskKind::ElementGrounding, s);
  std::vector<std::pair<NodeId, std::string>> pool;
  for (NodeId id : detail::boxed_elements(s))
    if (auto d = element_description(s.node(id), ctx.vocab)) pool.emplace_back(id, std::move(*d));
  if (pool.empty()) throw TaskError(TaskErrorCode::NoGroundableElement);
  const auto& [id, description] = pool[rng.below(pool.size())];
  t.input_text = description;
  t.target = bbox_tokens(*s.node(id).bbox, s.viewport());
  return t;
}

// Attributes spelled out in attribute prediction targets.
inline constexpr std::array<std::string_view, 5> kPredictedAttributes = {"class", "id", "label",
                                                                         "for", "alt"};

/// Elements sharing (tag, whitelisted attributes), groups in reading order
/// of their first member.
inline std::vector<std::vector<NodeId>> attribute_groups(const PageSnapshot& s) {
  std::vector<std::vector<NodeId>> groups;
  std::map<std::pair<std::string, std::map<std::string, std::string>>, std::size_t> by_key;
  for (NodeId id : detail::boxed_elements(s)) {
    const DomNode& n = s.node(id);
    auto [it, fresh] = by_key.emplace(std::pair{n.tag, n.attributes}, groups.size());
    if (fresh) groups.emplace_back();
    groups[it->second].push_back(id);
  }
  return groups;
}

inline std::string attribute_prediction_target(const DomNode& n, const Vocabulary& vocab) {
  std::string out = escape_text(n.tag);
  for (auto name : kPredictedAttributes) {
    const std::array<std::string_view, 1> one{name};
    for (const auto& tok : filter_attr_tokens(attribute_tokens(n, one), vocab))
      out += " " + escape_text(tok);
  }
  return out;
}

inline TaskSample make_attribute_prediction(const PageSnapshot& s, const TaskContext& ctx, Rng& rng) {
  auto t = detail::start_sample(TaskKind::AttributePrediction, s);
  const auto groups = attribute_groups(s);
  if (groups.empty()) throw TaskError(TaskErrorCode::NoGroup);
  const auto& group = groups[rng.below(groups.size())];
  for (NodeId id : group) t.directives.push_back(RenderDirective::outline(*s.node(id).bbox));
  t.target = attribute_prediction_target(s.node(group.front()), ctx.vocab);
  return t;
}

/// Ordered element pair for node relation prediction: a label is drawn
/// uniformly among the labels some pair realizes, then a pair uniformly
/// among those with that label.
inline std::pair<NodeId, NodeId> sample_relation_pair(const PageSnapshot& s, Rng& rng) {
  const auto elems = detail::boxed_elements(s);
  const std::size_t n = elems.size();
  if (n < 2) throw TaskError(TaskErrorCode::TooFewElements);
  std::set<NodeId> in_pool(elems.begin(), elems.end());

  std::vector<std::pair<NodeId, NodeId>> parent_pairs;     // (parent, child)
  std::vector<std::pair<NodeId, NodeId>> ancestor_pairs;   // (ancestor, node), distance >= 2
  std::map<NodeId, std::vector<NodeId>> by_parent;  // siblings, whether or not the parent is boxed
  for (NodeId id : elems) {
    const DomNode& node = s.node(id);
    if (!node.parent_id) continue;
    by_parent[*node.parent_id].push_back(id);
    if (in_pool.count(*node.parent_id)) parent_pairs.emplace_back(*node.parent_id, id);
    for (auto up = s.node(*node.parent_id).parent_id; up; up = s.node(*up).parent_id)
      if (in_pool.count(*up)) ancestor_pairs.emplace_back(*up, id);
  }
  std::vector<std::vector<NodeId>> sibling_groups;
  std::size_t sibling_count = 0;
  for (auto& [parent, kids] : by_parent) {
    if (kids.size() < 2) continue;
    sibling_count += kids.size() * (kids.size() - 1);
    sibling_groups.push_back(std::move(kids));
  }
  const std::size_t related = n + 2 * parent_pairs.size() + 2 * ancestor_pairs.size() + sibling_count;
  const std::size_t others = n * n - related;

  std::array<std::size_t, kNodeRelationCount> counts = {
      n, parent_pairs.size(), parent_pairs.size(), sibling_count,
      ancestor_pairs.size(), ancestor_pairs.size(), others};
  std::vector<NodeRelation> labels;
  for (std::size_t i = 0; i < kNodeRelationCount; ++i)
    if (counts[i] > 0) labels.push_back(static_cast<NodeRelation>(i));
  const NodeRelation label = labels[rng.below(labels.size())];
  std::size_t k = rng.below(counts[static_cast<std::size_t>(label)]);

  switch (label) {
    case NodeRelation::Self: return {elems[k], elems[k]};
    case NodeRelation::Parent: return parent_pairs[k];
    case NodeRelation::Child: return {parent_pairs[k].second, parent_pairs[k].first};
    case NodeRelation::Ancestor: return ancestor_pairs[k];
    case NodeRelation::Descendant: return {ancestor_pairs[k].second, ancestor_pairs[k].first};
    case NodeRelation::Sibling:
      for (const auto& g : sibling_groups) {
        const std::size_t m = g.size();
        if (k < m * (m - 1)) {
          const std::size_t i = k / (m - 1);
          std::size_t j = k % (m - 1);
          if (j >= i) ++j;
          return {g[i], g[j]};
        }
        k -= m * (m - 1);
      }
      break;
    case NodeRelation::Others: {
      // Rejection over all ordered pairs is uniform on the accepted ones.
      for (int attempt = 0; attempt < 64; ++attempt) {
        const NodeId a = elems[rng.below(n)];
        const NodeId b = elems[rng.below(n)];
        if (node_relation(s, a, b) == NodeRelation::Others) return {a, b};
      }
      std::size_t idx = rng.below(others);
      for (NodeId a : elems)
        for (NodeId b : elems)
          if (node_relation(s, a, b) == NodeRelation::Others && idx-- == 0) return {a, b};
      break;
    }
  }
  throw TaskError(TaskErrorCode::TooFewElements, "relation pair enumeration out of sync");
}

inline TaskSample make_node_relation(const PageSnapshot& s, const TaskContext&, Rng& rng) {
  auto t = detail::start_sample(TaskKind::NodeRelation, s);
  const auto [a, b] = sample_relation_pair(s, rng);
  t.directives.push_back(RenderDirective::outline(*s.node(a).bbox, OutlineStyle::Primary));
  t.directives.push_back(RenderDirective::outline(*s.node(b).bbox, OutlineStyle::Secondary));
  t.target = std::string(to_string(node_relation(s, a, b)));
  return t;
}

inline TaskSample make_table_detection(const PageSnapshot& s, const TaskContext&, Rng&) {
  auto t = detail::start_sample(TaskKind::TableDetection, s);
  const auto tables = table_roots(s);
  if (tables.empty()) throw TaskError(TaskErrorCode::NoTable);
  for (NodeId id : tables) t.target += bbox_tokens(table_merged_box(s, id), s.viewport());
  return t;
}

inline TaskSample make_table_parsing(const PageSnapshot& s, const TaskContext&, Rng& rng) {
  auto t = detail::start_sample(TaskKind::TableParsing, s);
  const auto tables = table_roots(s);
  if (tables.empty()) throw TaskError(TaskErrorCode::NoTable);
  const NodeId table = tables[rng.below(tables.size())];
  t.directives.push_back(RenderDirective::outline(table_merged_box(s, table)));
  t.target = simplify(s, table, /*named_tags=*/true).text;
  return t;
}

/// Text nodes whose tokens overlap the document title by at least the
/// threshold, ranked by overlap, then box height, then reading order.
inline std::vector<NodeId> title_candidates(const PageSnapshot& s, double threshold) {
  struct Scored {
    double overlap;
    double height;
    std::size_t order;
    NodeId id;
  };
  std::vector<Scored> scored;
  const std::string& title = s.info().document_title;
  for (const auto& n : s.nodes()) {
    if (!n.is_text()) continue;
    const double ov = title_overlap(text_of(n), title);
    if (ov + 1e-12 < threshold || ov == 0.0) continue;
    scored.push_back({ov, n.bbox ? n.bbox->height() : 0.0, s.order(n.id), n.id});
  }
  std::sort(scored.begin(), scored.end(), [](const Scored& a, const Scored& b) {
    if (a.overlap != b.overlap) return a.overlap > b.overlap;
    if (a.height != b.height) return a.height > b.height;
    return a.order < b.order;
  });
  std::vector<NodeId> out;
  for (const auto& c : scored) out.push_back(c.id);
  return out;
}

inline TaskSample make_screen_titling(const PageSnapshot& s, const TaskContext& ctx, Rng&) {
  auto t = detail::start_sample(TaskKind::ScreenTitling, s);
  const std::string title = detail::trim(s.info().document_title);
  if (title.empty()) throw TaskError(TaskErrorCode::NoTitle, "document has no title");
  const auto cands = title_candidates(s, ctx.config.title_overlap_threshold);
  if (cands.empty()) throw TaskError(TaskErrorCode::NoTitle, "title not shown on screen");
  std::size_t masked = 0;
  for (NodeId id : cands) {
    for (const auto& w : s.node(id).words) t.directives.push_back(RenderDirective::mask(w.bbox));
    masked += s.node(id).words.size();
  }
  t.mask_counts = std::pair{masked, words_in(s, s.root_id()).size()};
  t.target = escape_text(title);
  return t;
}

inline TaskSample make_layout_analysis(const PageSnapshot& s, const TaskContext&, Rng&) {
  auto t = detail::start_sample(TaskKind::LayoutAnalysis, s);
  const auto groups = layout_groups(s);
  if (groups.empty()) throw TaskError(TaskErrorCode::NoLayout);
  for (const auto& g : groups) t.target += g.tag + bbox_tokens(g.region, s.viewport());
  return t;
}

inline TaskSample make_task(TaskKind kind, const PageSnapshot& s, const TaskContext& ctx, Rng& rng) {
  switch (kind) {
    case TaskKind::ScreenParsing: return make_screen_parsing(s, ctx, rng);
    case TaskKind::Ocr: return make_ocr(s, ctx, rng);
    case TaskKind::ImageGrounding: return make_image_grounding(s, ctx, rng);
    case TaskKind::ElementGrounding: return make_element_grounding(s, ctx, rng);
    case TaskKind::AttributePrediction: return make_attribute_prediction(s, ctx, rng);
    case TaskKind::NodeRelation: return make_node_relation(s, ctx, rng);
    case TaskKind::TableDetection: return make_table_detection(s, ctx, rng);
    case TaskKind::TableParsing: return make_table_parsing(s, ctx, rng);
    case TaskKind::ScreenTitling: return make_screen_titling(s, ctx, rng);
    case TaskKind::LayoutAnalysis: return make_layout_analysis(s, ctx, rng);
  }
  throw ConfigError("unknown task kind");
}

/// Draws a kind in proportion to `weights`, builds it, and on a TaskError
/// drops that kind and redraws among the rest.
/// Throws TaskError(NoTaskPossible) once every weighted kind has declined.
inline TaskSample sample_task(const PageSnapshot& s, const MixtureWeights& weights,
                              const TaskContext& ctx, Rng& rng) {
  std::vector<TaskKind> live;
  for (TaskKind k : kAllTaskKinds)
    if (weights[k] > 0.0) live.push_back(k);
  while (!live.empty()) {
    double total = 0.0;
    for (TaskKind k : live) total += weights[k];
    double r = rng.unit() * total;
    std::size_t pick = live.size() - 1;
    for (std::size_t i = 0; i < live.size(); ++i) {
      r -= weights[live[i]];
      if (r < 0.0) {
        pick = i;
        break;
      }
    }
    try {
      return make_task(live[pick], s, ctx, rng);
    } catch (const TaskError&) {
      live.erase(live.begin() + static_cast<std::ptrdiff_t>(pick));
    }
  }
  throw TaskError(TaskErrorCode::NoTaskPossible);
}

}  // namespace s4forge
