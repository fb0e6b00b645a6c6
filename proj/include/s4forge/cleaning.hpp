#pragma once

#include <cstddef>
#include <cstdint>
#include <unordered_set>
#include <utility>
#include <vector>

#include "s4forge/error.hpp"
#include "s4forge/snapshot.hpp"

namespace s4forge {

// Counts are in removed nodes, except dropped_words_overflow (words).
struct CleanReport {
  std::size_t pruned_invisible = 0;
  std::size_t pruned_hit_test = 0;
  std::size_t dropped_words_overflow = 0;
  std::size_t dropped_iframes = 0;

  bool all_zero() const {
    return pruned_invisible == 0 && pruned_hit_test == 0 && dropped_words_overflow == 0 &&
           dropped_iframes == 0;
  }
  CleanReport& operator+=(const CleanReport& o) {
    pruned_invisible += o.pruned_invisible;
    pruned_hit_test += o.pruned_hit_test;
    dropped_words_overflow += o.dropped_words_overflow;
    dropped_iframes += o.dropped_iframes;
    return *this;
  }
  friend bool operator==(const CleanReport&, const CleanReport&) = default;
};

struct CleanOptions {
  double epsilon_px = 2.0;
};

/// A node renders nothing when its computed style hides it or its box is
/// missing or has zero area.
inline bool renders(const DomNode& n) { return n.css_visible && n.bbox && !n.bbox->zero_area(); }

/// Removes every subtree whose root does not render.
inline PageSnapshot prune_invisible(const PageSnapshot& s, CleanReport* report = nullptr) {
  std::unordered_set<NodeId> roots;
  std::size_t removed = 0;
  const auto nodes = s.nodes();
  for (std::size_t i = 0; i < nodes.size();) {
    if (!renders(nodes[i])) {
      roots.insert(nodes[i].id);
      const std::size_t end = s.subtree_end(nodes[i].id);
      removed += end - i;
      i = end;
    } else {
      ++i;
    }
  }
  if (roots.empty()) return s;
  PageSnapshot out = s.without_subtrees(roots);
  if (report) report->pruned_invisible += removed;
  return out;
}

/// Removes the subtree of every node whose recorded point-test result is not
/// inside that subtree. All decisions are taken against the input tree.
inline PageSnapshot prune_hit_test(const PageSnapshot& s, CleanReport* report = nullptr) {
  std::unordered_set<NodeId> roots;
  for (const auto& n : s.nodes()) {
    if (n.hit_target_id && !s.is_descendant_or_self(*n.hit_target_id, n.id)) roots.insert(n.id);
  }
  if (roots.empty()) return s;
  std::size_t before = s.size();
  PageSnapshot out = s.without_subtrees(roots);
  if (report) report->pruned_hit_test += before - out.size();
  return out;
}

inline PageSnapshot drop_iframes(const PageSnapshot& s, CleanReport* report = nullptr) {
  std::unordered_set<NodeId> roots;
  std::size_t iframes = 0;
  for (const auto& n : s.nodes()) {
    if (n.tag == "iframe") {
      roots.insert(n.id);
      ++iframes;
    }
  }
  if (roots.empty()) return s;
  PageSnapshot out = s.without_subtrees(roots);
  if (report) report->dropped_iframes += iframes;
  return out;
}

/// Drops words that escape the box of their text node's nearest boxed
/// ancestor by more than `epsilon_px`, plus zero-area words (what remains of
/// a word after viewport clipping when it was entirely off screen). Text
/// nodes left without words are removed.
inline PageSnapshot filter_overflow_words(const PageSnapshot& s, CleanOptions opts = {},
                                          CleanReport* report = nullptr) {
  std::vector<DomNode> kept;
  kept.reserve(s.size());
  std::size_t dropped = 0;
  bool changed = false;
  for (const auto& n : s.nodes()) {
    if (!n.is_text()) {
      kept.push_back(n);
      continue;
    }
    const BBox* governing = nullptr;
    for (auto p = n.parent_id; p; p = s.node(*p).parent_id) {
      const auto& anc = s.node(*p);
      if (anc.bbox) {
        governing = &*anc.bbox;
        break;
      }
    }
    DomNode copy = n;
    std::erase_if(copy.words, [&](const Word& w) {
      return w.bbox.zero_area() || (governing && !governing->contains(w.bbox, opts.epsilon_px));
    });
    if (copy.words.size() != n.words.size()) {
      changed = true;
      dropped += n.words.size() - copy.words.size();
    }
    if (!copy.words.empty()) kept.push_back(std::move(copy));
  }
  if (!changed) return s;
  PageSnapshot out = s.rebuilt(std::move(kept));
  if (report) report->dropped_words_overflow += dropped;
  return out;
}

/// Keeps the first entry per url hash, in input order. `key` projects an
/// entry to its 64-bit url hash.
template <typename Ref, typename KeyFn>
std::vector<Ref> dedup_urls(const std::vector<Ref>& refs, KeyFn key) {
  std::unordered_set<std::uint64_t> seen;
  std::vector<Ref> out;
  out.reserve(refs.size());
  for (const auto& r : refs)
    if (seen.insert(static_cast<std::uint64_t>(key(r))).second) out.push_back(r);
  return out;
}

// Node kinds the harvester annotates. A page keeping none of them is empty.
inline bool is_annotated_kind(NodeKind k) {
  return k == NodeKind::Text || k == NodeKind::Image || k == NodeKind::Table ||
         k == NodeKind::Input;
}

/// invisible -> hit test -> iframes -> overflow words. Throws EmptyPage when
/// the root goes or no annotated node survives.
inline std::pair<PageSnapshot, CleanReport> clean(const PageSnapshot& s, CleanOptions opts = {}) {
  CleanReport report;
  PageSnapshot out = prune_invisible(s, &report);
  out = prune_hit_test(out, &report);
  out = drop_iframes(out, &report);
  out = filter_overflow_words(out, opts, &report);
  bool any = false;
  for (const auto& n : out.nodes()) any = any || is_annotated_kind(n.kind);
  if (!any) throw EmptyPage("nothing visible survives cleaning");
  return {std::move(out), report};
}

}  // namespace s4forge
