#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "s4forge/cleaning.hpp"
#include "s4forge/hash.hpp"
#include "s4forge/raster.hpp"
#include "s4forge/rng.hpp"
#include "s4forge/snapshot.hpp"
#include "s4forge/snapshot_io.hpp"

// Deterministic synthetic pages in the harvester's wire format, used as the
// bundled test corpus. Layout is a toy monospace flow: every character is
// 8px wide, words are 16px tall, lines are 20px apart.
namespace s4forge::fixtures {

inline constexpr double kCharWidth = 8.0;
inline constexpr double kWordHeight = 16.0;
inline constexpr double kLineHeight = 20.0;
inline constexpr double kMargin = 24.0;

inline constexpr std::array<std::string_view, 96> kLexicon = {
    "the",     "quick",   "brown",    "fox",     "jumps",   "over",    "lazy",     "dog",
    "river",   "mountain", "forest",  "garden",  "city",    "market",  "station",  "harbor",
    "north",   "south",   "east",     "west",    "summer",  "winter",  "spring",   "autumn",
    "report",  "update",  "news",     "weather", "sports",  "travel",  "music",    "movies",
    "learn",   "build",   "read",     "write",   "share",   "follow",  "search",   "login",
    "account", "profile", "settings", "privacy", "terms",   "contact", "about",    "home",
    "price",   "order",   "cart",     "checkout", "sale",   "new",     "best",     "guide",
    "recipe",  "coffee",  "bread",    "apple",   "orange",  "lemon",   "green",    "blue",
    "open",    "close",   "today",    "week",    "month",   "year",    "page",     "table",
    "data",    "chart",   "photo",    "video",   "story",   "event",   "team",     "club",
    "2024",    "42%",     "r&d",      "q&a",     "a<b",     "3.14",    "faq",      "help",
    "email",   "address", "submit",   "accept",  "menu",    "item",    "store",    "daily"};

/// Vocabulary used by the fixture corpus, in sentencepiece `.vocab` text
/// form. Lexicon words and the printable ASCII range are covered, except for
/// a handful of symbols kept out on purpose so that some attribute tokens are
/// not representable.
inline std::string vocabulary_text() {
  std::string out = "<unk>\t0\n<s>\t0\n</s>\t0\n<pad>\t0\n\xe2\x96\x81\t-2\n";
  for (auto w : kLexicon) out += "\xe2\x96\x81" + std::string(w) + "\t-1\n";
  for (std::string_view w : {"menu-item", "btn-primary", "site-header", "main-nav", "cookie-banner"})
    out += "\xe2\x96\x81" + std::string(w) + "\t-1\n";
  const std::string_view excluded = "{}~`^\\";
  for (char c = '!'; c <= '~'; ++c)
    if (excluded.find(c) == std::string_view::npos) out += std::string(1, c) + "\t-5\n";
  return out;
}

enum class Visibility { Shown, Hidden, Removed };  // visible, visibility:hidden, display:none

struct PageFeatures {
  Visibility nav = Visibility::Shown;
  std::size_t menu_items = 4;
  std::size_t paragraphs = 2;
  bool table = true;
  std::size_t table_rows = 3;
  std::size_t table_cols = 3;
  bool figure = true;
  bool figure_alt = true;
  bool form = true;
  bool overlay = false;  // banner over the form's button
  bool iframe = false;
  bool ticker = false;   // overflow:hidden strip with nowrap text
  bool spacer = false;   // zero-height div
  bool offscreen = false;
  bool modal = false;    // display:none block

  std::vector<std::string> names() const;
};

inline std::vector<std::string> PageFeatures::names() const {
  std::vector<std::string> out;
  out.push_back(nav == Visibility::Shown ? "nav" : nav == Visibility::Hidden ? "nav-hidden" : "nav-removed");
  if (table) out.push_back("table");
  if (figure) out.push_back(figure_alt ? "figure-alt" : "figure");
  if (form) out.push_back("form");
  if (overlay) out.push_back("overlay");
  if (iframe) out.push_back("iframe");
  if (ticker) out.push_back("ticker");
  if (spacer) out.push_back("spacer");
  if (offscreen) out.push_back("offscreen");
  if (modal) out.push_back("modal");
  return out;
}

/// Everything switched on, with the nav hidden and the button occluded.
inline PageFeatures full_features() {
  PageFeatures f;
  f.nav = Visibility::Hidden;
  f.overlay = f.iframe = f.ticker = f.spacer = f.offscreen = f.modal = true;
  return f;
}

inline PageFeatures random_features(Rng& rng) {
  PageFeatures f;
  const auto nav = rng.below(5);
  f.nav = nav == 0 ? Visibility::Hidden : nav == 1 ? Visibility::Removed : Visibility::Shown;
  f.menu_items = 2 + rng.below(5);
  f.paragraphs = 1 + rng.below(3);
  f.table = rng.below(4) != 0;
  f.table_rows = 2 + rng.below(4);
  f.table_cols = 2 + rng.below(4);
  f.figure = rng.below(3) != 0;
  f.figure_alt = rng.coin();
  f.form = rng.below(3) != 0;
  f.overlay = f.form && rng.coin();
  f.iframe = rng.below(3) == 0;
  f.ticker = rng.coin();
  f.spacer = rng.below(3) == 0;
  f.offscreen = rng.below(3) == 0;
  f.modal = rng.below(3) == 0;
  return f;
}

struct Annotation {
  std::string name;
  std::vector<std::string> features;
  CleanReport expected;  // what clean() should report, from how the page was built
};

struct FixturePage {
  PageSnapshot snapshot;  // raw harvester coordinates, not yet clipped
  RasterImage screenshot;
  Annotation annotation;
};

namespace detail {

class Builder {
 public:
  NodeId element(std::optional<NodeId> parent, std::string tag, NodeKind kind,
                 std::map<std::string, std::string> attrs, std::optional<BBox> box, bool visible = true) {
    DomNode n;
    n.tag = std::move(tag);
    n.kind = kind;
    n.attributes = std::move(attrs);
    n.bbox = box;
    n.css_visible = visible;
    std::string step = n.tag;
    return add(parent, std::move(n), step);
  }

  NodeId text(NodeId parent, std::vector<Word> words, bool visible = true) {
    DomNode n;
    n.tag = "#text";
    n.kind = NodeKind::Text;
    BBox box = words.front().bbox;
    for (const auto& w : words) box = box.united(w.bbox);
    n.bbox = box;
    n.words = std::move(words);
    n.css_visible = visible;
    return add(parent, std::move(n), "text()");
  }

  DomNode& at(NodeId id) { return nodes_[static_cast<std::size_t>(to_int(id))]; }
  std::vector<DomNode>& nodes() { return nodes_; }

 private:
  NodeId add(std::optional<NodeId> parent, DomNode n, const std::string& step) {
    n.id = NodeId{static_cast<std::int64_t>(nodes_.size())};
    n.parent_id = parent;
    const std::string base = parent ? at(*parent).xpath : std::string();
    const int k = ++step_counts_[{parent ? to_int(*parent) : -1, step}];
    n.xpath = base + "/" + step + "[" + std::to_string(k) + "]";
    if (parent) at(*parent).child_ids.push_back(n.id);
    nodes_.push_back(std::move(n));
    return nodes_.back().id;
  }

  std::vector<DomNode> nodes_;
  std::map<std::pair<std::int64_t, std::string>, int> step_counts_;
};

// Lays words out left to right from (x, y); wraps at `width` unless nowrap.
inline std::vector<Word> flow(const std::vector<std::string>& words, double x, double y, double width,
                              bool wrap = true) {
  std::vector<Word> out;
  double cx = x, cy = y;
  for (const auto& w : words) {
    const double len = kCharWidth * static_cast<double>(w.size());
    if (wrap && cx > x && cx + len > x + width) {
      cx = x;
      cy += kLineHeight;
    }
    out.push_back({w, {cx, cy + 2.0, cx + len, cy + 2.0 + kWordHeight}});
    cx += len + kCharWidth;
  }
  return out;
}

inline double lines_height(const std::vector<Word>& words, double y) {
  double bottom = y;
  for (const auto& w : words) bottom = std::max(bottom, w.bbox.y_max + 2.0);
  return bottom - y;
}

inline std::vector<std::string> pick_words(Rng& rng, std::size_t n, std::size_t max_len = 64) {
  std::vector<std::string> out;
  while (out.size() < n) {
    const auto w = kLexicon[rng.below(kLexicon.size())];
    if (w.size() <= max_len) out.emplace_back(w);
  }
  return out;
}

inline std::size_t subtree_size(const std::vector<DomNode>& nodes, NodeId id) {
  std::size_t n = 1;
  for (NodeId c : nodes[static_cast<std::size_t>(to_int(id))].child_ids) n += subtree_size(nodes, c);
  return n;
}

inline bool paints(const std::vector<DomNode>& nodes, const DomNode& n, const Viewport& vp) {
  for (const DomNode* p = &n;; p = &nodes[static_cast<std::size_t>(to_int(*p->parent_id))]) {
    if (!p->css_visible || !p->bbox || p->bbox->clipped(vp).zero_area()) return false;
    if (!p->parent_id) return true;
  }
}

// elementFromPoint at each element's center: the last painted element in
// document order containing the point. Text nodes get no probe.
inline void assign_hit_targets(std::vector<DomNode>& nodes, const Viewport& vp) {
  std::vector<std::size_t> painted;
  for (std::size_t i = 0; i < nodes.size(); ++i)
    if (!nodes[i].is_text() && paints(nodes, nodes[i], vp)) painted.push_back(i);
  for (auto& n : nodes) {
    if (n.is_text() || !n.bbox) continue;
    const double cx = n.bbox->center_x(), cy = n.bbox->center_y();
    if (!BBox{0, 0, double(vp.width_px), double(vp.height_px)}.contains_point(cx, cy)) continue;
    for (auto it = painted.rbegin(); it != painted.rend(); ++it) {
      if (nodes[*it].bbox->clipped(vp).contains_point(cx, cy)) {
        n.hit_target_id = nodes[*it].id;
        break;
      }
    }
  }
}

inline Rgb shade(std::string_view key) {
  const auto h = fnv1a64(key);
  return {static_cast<std::uint8_t>(80 + (h & 0x7f)), static_cast<std::uint8_t>(80 + ((h >> 8) & 0x7f)),
          static_cast<std::uint8_t>(80 + ((h >> 16) & 0x7f))};
}

inline void fill(RasterImage& img, const BBox& b, Rgb c) {
  img.fill_rect(static_cast<int>(b.x_min), static_cast<int>(b.y_min), static_cast<int>(b.x_max),
                static_cast<int>(b.y_max), c);
}

inline void frame(RasterImage& img, const BBox& b, Rgb c) {
  fill(img, {b.x_min, b.y_min, b.x_max, b.y_min + 1}, c);
  fill(img, {b.x_min, b.y_max - 1, b.x_max, b.y_max}, c);
  fill(img, {b.x_min, b.y_min, b.x_min + 1, b.y_max}, c);
  fill(img, {b.x_max - 1, b.y_min, b.x_max, b.y_max}, c);
}

inline RasterImage render(const std::vector<DomNode>& nodes, const Viewport& vp,
                          const std::unordered_map<std::int64_t, BBox>& clips) {
  RasterImage img(vp.width_px, vp.height_px);
  for (const auto& n : nodes) {
    if (!paints(nodes, n, vp)) continue;
    const BBox& b = *n.bbox;
    const auto cls = n.attribute("class");
    if (n.tag == "nav") fill(img, b, {236, 236, 240});
    else if (n.tag == "button") fill(img, b, {60, 110, 220});
    else if (n.tag == "img") fill(img, b, shade(n.xpath));
    else if (n.tag == "td" || n.tag == "input" || n.tag == "iframe") frame(img, b, {170, 170, 170});
    else if (cls && *cls == "cookie-banner") fill(img, b, {40, 40, 40});
    else if (cls && *cls == "ticker") fill(img, b, {250, 244, 220});
    if (!n.is_text()) continue;
    const DomNode& parent = nodes[static_cast<std::size_t>(to_int(*n.parent_id))];
    const bool on_dark = parent.tag == "button" || (parent.attribute("class") && *parent.attribute("class") == "cookie-banner");
    const auto clip = clips.find(to_int(*n.parent_id));
    for (const auto& w : n.words) {
      BBox g{w.bbox.x_min + 1, w.bbox.y_min + 3, w.bbox.x_max - 1, w.bbox.y_max - 3};
      if (clip != clips.end())
        g = {std::max(g.x_min, clip->second.x_min), g.y_min, std::min(g.x_max, clip->second.x_max), g.y_max};
      if (g.x_max > g.x_min) fill(img, g, on_dark ? Rgb{250, 250, 250} : Rgb{30, 30, 30});
    }
  }
  return img;
}

}  // namespace detail

/// Builds one page. Everything on it follows from `seed`; `name` only
/// labels the annotation.
inline FixturePage generate_page(std::uint64_t seed, const PageFeatures& f, std::string name,
                                 Viewport vp = {}) {
  using detail::flow;
  using detail::lines_height;
  using detail::pick_words;
  Rng rng(seed);
  detail::Builder b;
  CleanReport expect;
  std::unordered_map<std::int64_t, BBox> clips;
  const double W = vp.width_px - 2 * kMargin;
  const double x0 = kMargin;
  const double H = vp.height_px;

  const NodeId html = b.element(std::nullopt, "html", NodeKind::Other, {}, BBox{0, 0, double(vp.width_px), H});
  const NodeId body = b.element(html, "body", NodeKind::Other, {}, BBox{8, 8, vp.width_px - 8.0, H - 8});
  double y = 16;

  // Heading; the document title repeats it with a site suffix.
  const auto title_words = pick_words(rng, 3 + rng.below(3));
  {
    const NodeId header = b.element(body, "div", NodeKind::Other, {{"class", "site-header"}}, BBox{x0, y, x0 + W, y + 28});
    const NodeId h1 = b.element(header, "h1", NodeKind::Other, {}, BBox{x0, y + 2, x0 + W, y + 26});
    b.text(h1, flow(title_words, x0 + 4, y + 4, W - 8));
    y += 36;
  }
  std::string title;
  for (const auto& w : title_words) title += (title.empty() ? "" : " ") + w;
  title += " | " + std::string(kLexicon[rng.below(kLexicon.size())]) + " daily";

  // Navigation.
  {
    const bool shown = f.nav != Visibility::Removed;
    const bool visible = f.nav == Visibility::Shown;
    auto box = [&](BBox r) { return shown ? std::optional<BBox>(r) : std::nullopt; };
    const NodeId nav = b.element(body, "nav", NodeKind::Other, {{"class", "main-nav"}}, box({x0, y, x0 + W, y + 28}), visible);
    const NodeId ul = b.element(nav, "ul", NodeKind::Other, {}, box({x0, y, x0 + W, y + 28}), visible);
    double lx = x0 + 4;
    for (std::size_t i = 0; i < f.menu_items; ++i) {
      const auto words = pick_words(rng, 1 + rng.below(2), 8);
      const auto laid = flow(words, lx + 4, y + 4, 1e9, false);
      const BBox ib{lx, y + 4, laid.back().bbox.x_max + 4, y + 24};
      const NodeId li = b.element(ul, "li", NodeKind::Other, {{"class", "menu-item"}}, box(ib), visible);
      const NodeId a = b.element(li, "a", NodeKind::Other, {{"title", words.front()}}, box(ib), visible);
      if (shown) b.text(a, laid, visible);
      lx = ib.x_max + 12;
    }
    if (f.nav != Visibility::Shown) expect.pruned_invisible += detail::subtree_size(b.nodes(), nav);
    y += 36;
  }

  // Body copy.
  {
    const NodeId main = b.element(body, "div", NodeKind::Other, {{"class", "content"}, {"id", "main"}}, std::nullopt);
    const double top = y;
    for (std::size_t i = 0; i < f.paragraphs; ++i) {
      const auto laid = flow(pick_words(rng, 8 + rng.below(30)), x0, y, W);
      const double h = lines_height(laid, y);
      const NodeId p = b.element(main, "p", NodeKind::Other, {}, BBox{x0, y, x0 + W, y + h});
      b.text(p, laid);
      y += h + 8;
    }
    b.at(main).bbox = BBox{x0, top, x0 + W, y - 8};
  }

  if (f.spacer) {
    const NodeId s = b.element(body, "div", NodeKind::Other, {{"class", "spacer"}}, BBox{x0, y, x0 + W, y});
    expect.pruned_invisible += detail::subtree_size(b.nodes(), s);
  }

  if (f.table) {
    const double cw = 160, rh = 24;
    const BBox tb{x0, y, x0 + cw * double(f.table_cols), y + rh * double(f.table_rows)};
    const NodeId table = b.element(body, "table", NodeKind::Table, {{"class", "data"}}, tb);
    const NodeId tbody = b.element(table, "tbody", NodeKind::Other, {}, tb);
    for (std::size_t r = 0; r < f.table_rows; ++r) {
      const double ry = y + rh * double(r);
      const NodeId tr = b.element(tbody, "tr", NodeKind::Other, {}, BBox{tb.x_min, ry, tb.x_max, ry + rh});
      for (std::size_t c = 0; c < f.table_cols; ++c) {
        const double cx = x0 + cw * double(c);
        const NodeId td = b.element(tr, "td", NodeKind::Other, {}, BBox{cx, ry, cx + cw, ry + rh});
        b.text(td, flow(pick_words(rng, 1 + rng.below(2), 8), cx + 4, ry + 2, cw - 8, false));
      }
    }
    y = tb.y_max + 12;
  }

  if (f.figure) {
    const double iw = 200 + 40 * double(rng.below(5)), ih = 120 + 20 * double(rng.below(4));
    const auto caption = pick_words(rng, 2 + rng.below(4));
    const NodeId fig = b.element(body, "figure", NodeKind::Other, {}, BBox{x0, y, x0 + W, y + ih + 28});
    std::map<std::string, std::string> attrs;
    if (f.figure_alt) {
      const auto alt = pick_words(rng, 2 + rng.below(3));
      std::string s;
      for (const auto& w : alt) s += (s.empty() ? "" : " ") + w;
      attrs["alt"] = s;
    }
    b.element(fig, "img", NodeKind::Image, std::move(attrs), BBox{x0, y, x0 + iw, y + ih});
    const auto laid = flow(caption, x0, y + ih + 4, W);
    const NodeId cap = b.element(fig, "figcaption", NodeKind::Other, {}, BBox{x0, y + ih + 4, x0 + W, y + ih + 4 + lines_height(laid, y + ih + 4)});
    b.text(cap, laid);
    y += ih + 36;
  }

  std::optional<BBox> button_box;
  if (f.form) {
    const NodeId form = b.element(body, "form", NodeKind::Other, {{"id", "signup"}}, BBox{x0, y, x0 + W, y + 96});
    const auto label_words = flow({"email", "address"}, x0, y, W);
    const NodeId label = b.element(form, "label", NodeKind::Other, {{"for", "email"}}, BBox{x0, y, label_words.back().bbox.x_max, y + 20});
    b.text(label, label_words);
    b.element(form, "input", NodeKind::Input, {{"type", "text"}, {"id", "email"}, {"class", "field"}}, BBox{x0, y + 28, x0 + 300, y + 52});
    const NodeId cta = b.element(form, "div", NodeKind::Other, {{"class", "cta"}}, BBox{x0, y + 60, x0 + 800, y + 96});
    button_box = BBox{x0 + 4, y + 64, x0 + 84, y + 92};
    const NodeId button = b.element(cta, "button", NodeKind::Input, {{"class", "btn-primary"}, {"id", "x93k2"}, {"type", "submit"}}, button_box);
    b.text(button, flow({"submit"}, x0 + 12, y + 68, 64));
    if (f.overlay) expect.pruned_hit_test += detail::subtree_size(b.nodes(), button);
    y += 108;
  }

  if (f.ticker) {
    const BBox tb{x0, y, x0 + 240, y + 20};
    const NodeId ticker = b.element(body, "div", NodeKind::Other, {{"class", "ticker"}}, tb);
    const auto laid = flow(pick_words(rng, 8 + rng.below(6)), x0 + 4, y, 1e9, false);
    std::size_t inside = 0;
    for (const auto& w : laid) inside += tb.contains(w.bbox, 2.0);
    expect.dropped_words_overflow += laid.size() - inside;
    b.text(ticker, laid);
    clips[to_int(ticker)] = tb;
    y += 28;
  }

  if (f.iframe) {
    b.element(body, "iframe", NodeKind::Other, {{"title", "ad frame"}}, BBox{x0, y, x0 + 300, y + 150});
    expect.dropped_iframes += 1;
    y += 158;
  }

  if (f.offscreen) {
    const NodeId off = b.element(body, "div", NodeKind::Other, {{"class", "sr-only"}}, BBox{-600, y, -100, y + 20});
    b.text(off, flow(pick_words(rng, 3), -596, y, 480));
    expect.pruned_invisible += detail::subtree_size(b.nodes(), off);
  }

  if (f.modal) {
    const NodeId modal = b.element(body, "div", NodeKind::Other, {{"class", "modal"}}, std::nullopt, false);
    b.element(modal, "p", NodeKind::Other, {}, std::nullopt, false);
    b.element(modal, "button", NodeKind::Input, {{"class", "close"}}, std::nullopt, false);
    expect.pruned_invisible += detail::subtree_size(b.nodes(), modal);
  }

  {
    const auto laid = flow(pick_words(rng, 4 + rng.below(4)), x0, y, W);
    const NodeId footer = b.element(body, "footer", NodeKind::Other, {}, BBox{x0, y, x0 + W, y + lines_height(laid, y)});
    const NodeId p = b.element(footer, "p", NodeKind::Other, {}, BBox{x0, y, x0 + W, y + lines_height(laid, y)});
    b.text(p, laid);
    y += lines_height(laid, y) + 8;
  }

  // Fixed banner painted over the submit button, last in document order.
  if (f.overlay && button_box) {
    const BBox bb{button_box->x_min - 4, button_box->y_min - 4, button_box->x_min + 100, button_box->y_max + 4};
    const NodeId banner = b.element(body, "div", NodeKind::Other, {{"class", "cookie-banner"}}, bb);
    b.text(banner, flow({"got", "it"}, bb.x_min + 8, bb.y_min + 6, 88));
  }

  if (y > H - 8) throw Error("fixture layout overflows the viewport");

  detail::assign_hit_targets(b.nodes(), vp);
  RasterImage shot = detail::render(b.nodes(), vp, clips);

  PageInfo info;
  info.url = "https://fixtures.s4forge.test/" + name + "/" + to_hex16(seed);
  info.url_hash = url_hash(info.url);
  info.viewport = vp;
  info.document_title = title;
  info.screenshot_ref = to_hex16(info.url_hash) + ".png";
  PageSnapshot snap(std::move(info), html, std::move(b.nodes()));
  return {std::move(snap), std::move(shot), {std::move(name), f.names(), expect}};
}

/// Page `index` of a corpus. Page 0 has every feature; page 1 is the same
/// with a visible nav and no overlay; the rest are random.
inline FixturePage corpus_page(std::uint64_t corpus_seed, std::size_t index, Viewport vp = {}) {
  const std::uint64_t seed = hash64(corpus_seed, index);
  PageFeatures f;
  if (index == 0) {
    f = full_features();
  } else if (index == 1) {
    f = full_features();
    f.nav = Visibility::Shown;
    f.overlay = false;
  } else {
    Rng rng(hash64(seed, 0xfea7));
    f = random_features(rng);
  }
  char name[32];
  std::snprintf(name, sizeof name, "page-%04zu", index);
  return generate_page(seed, f, name, vp);
}

/// What the harvester's consumer sees: the snapshot after a JSON round trip,
/// which clips geometry to the viewport.
inline PageSnapshot ingested(const FixturePage& p) { return validate_snapshot(serialize_snapshot(p.snapshot)); }

inline nlohmann::json annotation_json(const Annotation& a) {
  return {{"name", a.name},
          {"features", a.features},
          {"expected_clean_report",
           {{"pruned_invisible", a.expected.pruned_invisible},
            {"pruned_hit_test", a.expected.pruned_hit_test},
            {"dropped_words_overflow", a.expected.dropped_words_overflow},
            {"dropped_iframes", a.expected.dropped_iframes}}}};
}

inline CleanReport parse_expected_report(const nlohmann::json& j) {
  const auto& r = j.at("expected_clean_report");
  return {r.at("pruned_invisible").get<std::size_t>(), r.at("pruned_hit_test").get<std::size_t>(),
          r.at("dropped_words_overflow").get<std::size_t>(), r.at("dropped_iframes").get<std::size_t>()};
}

/// Writes `<url_hash>.json` and `<url_hash>.png` into `dir`.
inline std::filesystem::path write_page(const FixturePage& p, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const std::string stem = to_hex16(p.snapshot.info().url_hash);
  const auto json_path = dir / (stem + ".json");
  std::ofstream out(json_path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot create " + json_path.string());
  out << to_json(p.snapshot).dump(1) << '\n';
  if (!out) throw IoError("write failed for " + json_path.string());
  write_png(dir / (stem + ".png"), p.screenshot, 9);
  return json_path;
}

/// Writes a corpus: `pages/` with the snapshots, `annotations.json` keyed by
/// url hash, and the matching `vocab.vocab`.
inline void write_corpus(const std::filesystem::path& dir, std::size_t count, std::uint64_t corpus_seed,
                         Viewport vp = {}) {
  nlohmann::json notes = nlohmann::json::object();
  for (std::size_t i = 0; i < count; ++i) {
    const FixturePage p = corpus_page(corpus_seed, i, vp);
    write_page(p, dir / "pages");
    notes[to_hex16(p.snapshot.info().url_hash)] = annotation_json(p.annotation);
  }
  std::ofstream(dir / "annotations.json", std::ios::binary | std::ios::trunc) << notes.dump(2) << '\n';
  std::ofstream(dir / "vocab.vocab", std::ios::binary | std::ios::trunc) << vocabulary_text();
}

}  // namespace s4forge::fixtures
