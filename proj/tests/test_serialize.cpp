#include <gtest/gtest.h>

#include "oracles.hpp"
#include "support.hpp"

using namespace s4forge;

TEST(Simplify, ChainCollapsesToText) {
  const auto s = load_snapshot(support::hand("minimal.json"));
  EXPECT_EQ(simplify(s, s.root_id(), false).text, "<hello world>");
  EXPECT_EQ(simplify(s, NodeId{4}, false).text, "<hello world>");
  EXPECT_EQ(simplify(s, s.root_id(), true).text, "<html <body <p hello world>>>");
}

TEST(Simplify, NamedTableKeepsTags) {
  const auto s = load_snapshot(support::hand("table.json"));
  const auto out = simplify(s, NodeId{3}, true).text;
  EXPECT_EQ(out,
            "<table <tbody <tr <td plan> <td price>> <tr <td basic> <td 10>> <tr <td pro> <td 25>>>>");
  EXPECT_EQ(simplify(s, NodeId{3}, false).text, "<<<plan> <price>> <<basic> <10>> <<pro> <25>>>");
}

TEST(Simplify, EscapesBrackets) {
  auto doc = nlohmann::json::parse(read_file(support::hand("minimal.json")));
  doc["nodes"][3]["words"][0]["text"] = "a<b&c>";
  const auto s = validate_snapshot(doc.dump());
  EXPECT_EQ(simplify(s, s.root_id(), false).text, "<a&lt;b&amp;c&gt; world>");
}

TEST(Simplify, MatchesTwoPassReferenceOnEveryCorpusNode) {
  for (const auto& page : support::corpus()) {
    const auto [s, r] = clean(page.snapshot);
    for (const auto& n : s.nodes()) {
      for (bool named : {false, true}) {
        ASSERT_EQ(simplify(s, n.id, named).text, oracle::serialize(s, to_int(n.id), named))
            << page.file << " node " << to_int(n.id) << " named " << named;
      }
    }
  }
}

TEST(Simplify, KeepsEveryWordOnce) {
  for (const auto& page : support::corpus()) {
    const auto [s, r] = clean(page.snapshot);
    std::size_t words = 0;
    for (const auto& n : s.nodes()) words += n.words.size();
    const auto text = simplify(s, s.root_id(), false).text;
    std::size_t opens = std::count(text.begin(), text.end(), '<');
    std::size_t closes = std::count(text.begin(), text.end(), '>');
    EXPECT_EQ(opens, closes);
    // Word count: split on brackets and spaces.
    std::size_t seen = 0;
    bool in_word = false;
    for (char c : text) {
      const bool sep = c == '<' || c == '>' || c == ' ';
      if (!sep && !in_word) ++seen;
      in_word = !sep;
    }
    EXPECT_EQ(seen, words) << page.file;
  }
}

TEST(CleanedXpath, MatchesStringFilterOnRawTrees) {
  for (const auto& page : support::corpus()) {
    for (const auto& n : page.snapshot.nodes())
      ASSERT_EQ(cleaned_xpath(page.snapshot, n.id).str(), oracle::xpath_filter(n.xpath)) << n.xpath;
  }
}

TEST(CleanedXpath, Examples) {
  EXPECT_EQ(oracle::xpath_filter("/html[1]/body[1]/nav[1]/ul[1]/li[3]/a[1]"), "nav[0]/ul[0]");
  const auto s = load_snapshot(support::hand("table.json"));
  EXPECT_EQ(cleaned_xpath(s, NodeId{3}).str(), "table[0]");
  EXPECT_EQ(cleaned_xpath(s, NodeId{3}).last_tag(), "table");
  EXPECT_TRUE(cleaned_xpath(s, s.root_id()).empty());
}

TEST(Quantize, ExhaustiveIntegerSweep) {
  int prev = -1;
  for (long v = -10; v <= 1290; ++v) {
    const int q = quantize_coord(static_cast<double>(v), 1280.0).value();
    ASSERT_GE(q, 0);
    ASSERT_LE(q, 999);
    ASSERT_GE(q, prev);
    ASSERT_EQ(q, oracle::quantize_closed_form(v, 1280)) << v;
    prev = q;
  }
}

TEST(Quantize, EdgesAndErrors) {
  EXPECT_EQ(quantize_coord(0, 1280).value(), 0);
  EXPECT_EQ(quantize_coord(1280, 1280).value(), 999);
  EXPECT_EQ(quantize_coord(1279.999, 1280).value(), 999);
  EXPECT_EQ(quantize_coord(1.28, 1280).value(), 1);
  EXPECT_EQ(quantize_coord(1.2799, 1280).value(), 0);
  EXPECT_THROW(quantize_coord(5, 0), BadExtent);
  EXPECT_THROW(quantize_coord(5, -3), BadExtent);
  EXPECT_THROW(quantize_coord(std::nan(""), 1280), BadExtent);
  EXPECT_THROW(CoordToken(1000), BadExtent);
  EXPECT_EQ(CoordToken(7).str(), "<7>");
}

TEST(Quantize, DequantizeRoundTripsWithinOneCell) {
  for (int k = 0; k < 1000; ++k) EXPECT_EQ(quantize_coord(dequantize_coord(CoordToken(k), 1280), 1280).value(), k);
  Rng rng(5);
  for (int i = 0; i < 5000; ++i) {
    const double v = rng.unit() * 1280;
    EXPECT_LE(std::abs(dequantize_coord(quantize_coord(v, 1280), 1280) - v), 1.28);
  }
}

TEST(Quantize, TokenParsing) {
  EXPECT_EQ(extract_coord_tokens("img<0><12><999><5>x<1000><12345><>"), (std::vector<int>{0, 12, 999, 5, 1000}));
  const BBox b{64, 128, 640, 1280};
  EXPECT_EQ(bbox_tokens(b, Viewport{}), "<50><100><500><999>");
}

TEST(Vocab, LoadsAndEncodes) {
  const auto& v = support::vocab();
  EXPECT_FALSE(v.empty());
  EXPECT_TRUE(v.representable("menu-item"));
  EXPECT_TRUE(v.representable("btn-primary"));
  EXPECT_TRUE(v.representable("coffee"));
  EXPECT_FALSE(v.representable("a{b"));
  EXPECT_FALSE(v.representable("caf\xc3\xa9"));
  const auto ids = v.encode("coffee");
  ASSERT_EQ(ids.size(), 1u);
  EXPECT_EQ(v.piece(ids[0]), "\xe2\x96\x81" "coffee");
  EXPECT_THROW(Vocabulary::load(support::fixture_dir() / "nope.vocab"), VocabMissing);
}

TEST(Vocab, ReachabilityAgreesWithViterbi) {
  const auto& v = support::vocab();
  Rng rng(11);
  const std::string alphabet = "abcdefghijklmnopqrstuvwxyz-_{}~^0123456789%&<\\";
  for (int i = 0; i < 2000; ++i) {
    std::string s;
    const auto len = 1 + rng.below(8);
    for (std::size_t k = 0; k < len; ++k) s += alphabet[rng.below(alphabet.size())];
    bool has_unk = false;
    for (int id : v.encode(s)) has_unk = has_unk || id == v.unk_id();
    EXPECT_EQ(v.representable(s), !has_unk) << s;
  }
}
