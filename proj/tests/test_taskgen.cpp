#include <gtest/gtest.h>

#include <cmath>

#include "adversarial.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace s4forge;

namespace {

TaskContext context() { return TaskContext{support::vocab()}; }

const PageSnapshot& cleaned_table() {
  static const PageSnapshot s = clean(load_snapshot(support::hand("table.json"))).first;
  return s;
}

std::vector<std::pair<PageSnapshot, std::string>> cleaned_corpus() {
  std::vector<std::pair<PageSnapshot, std::string>> out;
  for (const auto& p : support::corpus()) out.emplace_back(clean(p.snapshot).first, p.name);
  return out;
}

NodeRelation dual(NodeRelation r) {
  switch (r) {
    case NodeRelation::Parent: return NodeRelation::Child;
    case NodeRelation::Child: return NodeRelation::Parent;
    case NodeRelation::Ancestor: return NodeRelation::Descendant;
    case NodeRelation::Descendant: return NodeRelation::Ancestor;
    default: return r;
  }
}

double chi_square(const std::vector<double>& observed, const std::vector<double>& expected) {
  double x = 0;
  for (std::size_t i = 0; i < observed.size(); ++i)
    x += (observed[i] - expected[i]) * (observed[i] - expected[i]) / expected[i];
  return x;
}

}  // namespace

TEST(Regions, MatchBruteForceEnumeration) {
  for (const auto& page : support::corpus()) {
    const auto [s, r] = clean(page.snapshot);
    for (std::size_t cap : {1u, 5u, 20u, 50u, 1000u}) {
      const auto got = region_candidates(s, cap);
      std::set<std::int64_t> ids;
      for (NodeId id : got) ids.insert(to_int(id));
      EXPECT_EQ(ids, oracle::region_roots(s, cap)) << page.name << " cap " << cap;
      EXPECT_EQ(ids.size(), got.size());
    }
  }
}

TEST(Regions, NoWordsMeansNoRegion) {
  auto doc = nlohmann::json::parse(read_file(support::hand("minimal.json")));
  const auto s = validate_snapshot(doc.dump());
  Rng rng(1);
  EXPECT_THROW(select_region(s, 1, rng), TaskError);
  EXPECT_EQ(select_region(s, 2, rng), s.root_id());
}

TEST(Masking, CountIsExactWhenRatioDividesEvenly) {
  Rng rng(4);
  for (int i = 0; i < 100; ++i) {
    EXPECT_EQ(mask_count(0.5, 10, rng), 5u);
    EXPECT_EQ(mask_count(0.9, 20, rng), 18u);
    EXPECT_EQ(mask_count(1.0, 9, rng), 9u);
    EXPECT_EQ(mask_count(0.0, 9, rng), 0u);
    EXPECT_EQ(mask_count(0.5, 0, rng), 0u);
  }
}

TEST(Masking, CountRoundsToNeighborsWithoutBias) {
  Rng rng(8);
  for (std::size_t w : {1, 3, 7}) {
    for (double r : {0.5, 0.9}) {
      const double exact = r * static_cast<double>(w);
      double sum = 0;
      constexpr int kTrials = 20000;
      for (int i = 0; i < kTrials; ++i) {
        const auto k = mask_count(r, w, rng);
        ASSERT_TRUE(k == static_cast<std::size_t>(std::floor(exact)) || k == static_cast<std::size_t>(std::ceil(exact)));
        sum += static_cast<double>(k);
      }
      // Bernoulli remainder: standard error at most 0.5 / sqrt(kTrials).
      EXPECT_NEAR(sum / kTrials, exact, 4 * 0.5 / std::sqrt(kTrials)) << w << " " << r;
    }
  }
}

TEST(Masking, UniformOverWordsAtTenWords) {
  // The minimal page with its paragraph widened to ten words.
  auto doc = nlohmann::json::parse(read_file(support::hand("minimal.json")));
  doc["nodes"][3]["bbox"] = {24, 26, 372, 42};
  auto& ws = doc["nodes"][3]["words"];
  ws = nlohmann::json::array();
  for (int i = 0; i < 10; ++i)
    ws.push_back({{"text", "w" + std::to_string(i)}, {"bbox", {24 + 36 * i, 26, 48 + 36 * i, 42}}});
  const auto s = validate_snapshot(doc.dump());
  const std::optional<NodeId> scope = NodeId{3};
  const auto words = words_in(s, *scope);
  ASSERT_EQ(words.size(), 10u);
  std::map<WordRef, double> hits;
  Rng rng(99);
  constexpr int kTrials = 10000;
  for (int t = 0; t < kTrials; ++t) {
    const auto m = mask_words(s, *scope, 0.5, rng);
    ASSERT_EQ(m.masked.size(), 5u);
    ASSERT_EQ(m.directives.size(), 5u);
    ASSERT_TRUE(std::is_sorted(m.masked.begin(), m.masked.end()));
    for (const auto& w : m.masked) hits[w] += 1;
  }
  std::vector<double> obs, exp;
  for (const auto& w : words) {
    obs.push_back(hits[w]);
    exp.push_back(kTrials * 0.5);
  }
  // 9 degrees of freedom; 27.88 is the 0.001 critical value.
  EXPECT_LT(chi_square(obs, exp), 27.88);
}

TEST(Masking, DirectivesCoverChosenWords) {
  const auto& s = support::full_page();
  Rng rng(5);
  const auto m = mask_words(s, s.root_id(), 0.9, rng);
  EXPECT_LE(m.masked.size(), static_cast<std::size_t>(std::ceil(0.9 * static_cast<double>(m.total))));
  EXPECT_GE(m.masked.size(), static_cast<std::size_t>(std::floor(0.9 * static_cast<double>(m.total))));
  for (std::size_t i = 0; i < m.masked.size(); ++i) {
    EXPECT_EQ(m.directives[i].op, DirectiveOp::MaskRect);
    EXPECT_EQ(m.directives[i].rect, word_at(s, m.masked[i]).bbox);
  }
  EXPECT_THROW(mask_words(s, s.root_id(), 1.5, rng), ConfigError);
}

TEST(AttributeFilter, MatchesRuleOracleOnAdversarialList) {
  const auto tokens = adversarial::attribute_tokens();
  ASSERT_EQ(tokens.size(), 200u);
  const auto kept = filter_attr_tokens(tokens, support::vocab());
  std::vector<std::string> expected;
  for (const auto& t : tokens)
    if (oracle::keeps_attr_token(t, support::vocab())) expected.push_back(t);
  EXPECT_EQ(kept, expected);
}

TEST(AttributeFilter, Examples) {
  const std::vector<std::string> in = {"btn-primary", "x93k2", "42", "a", "menu-item", "caf\xc3\xa9", "12:30"};
  EXPECT_EQ(filter_attr_tokens(in, support::vocab()), (std::vector<std::string>{"btn-primary", "menu-item"}));
  EXPECT_THROW(filter_attr_tokens(in, Vocabulary{}), VocabMissing);
}

TEST(NearestText, MatchesBfsOracle) {
  for (const auto& [s, name] : cleaned_corpus()) {
    const auto dist = oracle::bfs_distances(s);
    for (const auto& n : s.nodes()) {
      const auto expected = oracle::nearest_text(s, to_int(n.id), dist);
      ASSERT_TRUE(expected);
      EXPECT_EQ(to_int(nearest_text_node(s, n.id)), *expected) << name;
    }
  }
}

TEST(NodeRelations, AllPairsMatchAncestorChains) {
  std::size_t pairs = 0;
  for (const auto& page : support::corpus()) {
    const auto& s = page.snapshot;
    const auto ids = oracle::by_id(s);
    for (const auto& a : s.nodes()) {
      for (const auto& b : s.nodes()) {
        const auto r = node_relation(s, a.id, b.id);
        ASSERT_EQ(r, oracle::relation(ids, to_int(a.id), to_int(b.id)));
        ASSERT_EQ(node_relation(s, b.id, a.id), dual(r));
        ++pairs;
      }
    }
  }
  EXPECT_GE(pairs, 10000u);
}

TEST(NodeRelations, LabelsDrawnUniformly) {
  const auto& s = support::full_page();
  Rng rng(17);
  std::array<double, kNodeRelationCount> counts{};
  constexpr int kTrials = 7000;
  for (int t = 0; t < kTrials; ++t) {
    const auto [a, b] = sample_relation_pair(s, rng);
    EXPECT_TRUE(s.node(a).bbox && s.node(b).bbox);
    counts[static_cast<std::size_t>(node_relation(s, a, b))] += 1;
  }
  std::vector<double> obs(counts.begin(), counts.end());
  std::vector<double> exp(kNodeRelationCount, kTrials / 7.0);
  EXPECT_LT(chi_square(obs, exp), 22.46);  // 6 dof, p = 0.001
}

TEST(Constructors, AllTenSucceedOnFullPage) {
  const auto& s = support::full_page();
  const auto ctx = context();
  for (TaskKind k : kAllTaskKinds) {
    Rng rng(3);
    TaskSample t;
    ASSERT_NO_THROW(t = make_task(k, s, ctx, rng)) << to_string(k);
    EXPECT_EQ(t.kind, k);
    EXPECT_FALSE(t.target.empty()) << to_string(k);
    for (int v : extract_coord_tokens(t.target)) {
      EXPECT_GE(v, 0);
      EXPECT_LE(v, 999);
    }
    for (const auto& d : t.directives) EXPECT_TRUE(d.rect.within(s.viewport()));
  }
}

TEST(Constructors, ScreenParsingTargetIgnoresMasking) {
  const auto& s = support::full_page();
  const auto ctx = context();
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Rng rng(seed);
    const auto t = make_screen_parsing(s, ctx, rng);
    // Replay the region choice and compare against the reference serializer.
    Rng replay(seed);
    const NodeId region = select_region(s, 50, replay);
    EXPECT_EQ(t.target, oracle::serialize(s, to_int(region), false));
    EXPECT_EQ(t.directives.front().op, DirectiveOp::DrawBoxOutline);
    ASSERT_TRUE(t.mask_counts);
    const double exact = 0.5 * static_cast<double>(t.mask_counts->second);
    EXPECT_GE(static_cast<double>(t.mask_counts->first), std::floor(exact));
    EXPECT_LE(static_cast<double>(t.mask_counts->first), std::ceil(exact));
  }
}

TEST(Constructors, OcrTargetsRoundTrip) {
  const auto ctx = context();
  for (const auto& [s, name] : cleaned_corpus()) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      Rng rng(seed);
      const auto t = make_ocr(s, ctx, rng);
      Rng replay(seed);
      const auto words = words_in(s, select_region(s, 50, replay));
      const auto parsed = oracle::parse_ocr(t.target);
      ASSERT_TRUE(parsed) << t.target;
      ASSERT_EQ(parsed->size(), words.size());
      for (std::size_t i = 0; i < words.size(); ++i) {
        const Word& w = word_at(s, words[i]);
        EXPECT_EQ((*parsed)[i].text, w.text);
        const std::array<int, 4> q = {oracle::quantize_closed_form(std::lround(std::floor(w.bbox.x_min)), 1280),
                                      oracle::quantize_closed_form(std::lround(std::floor(w.bbox.y_min)), 1280),
                                      oracle::quantize_closed_form(std::lround(std::floor(w.bbox.x_max)), 1280),
                                      oracle::quantize_closed_form(std::lround(std::floor(w.bbox.y_max)), 1280)};
        EXPECT_EQ((*parsed)[i].box, q) << name;
      }
    }
  }
}

TEST(Constructors, ImageGroundingTargetsImageRect) {
  const auto& s = support::full_page();
  const auto ctx = context();
  std::set<std::string> captions;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    Rng rng(seed);
    const auto t = make_image_grounding(s, ctx, rng);
    const auto& img = *std::find_if(s.nodes().begin(), s.nodes().end(), [](const DomNode& n) { return n.tag == "img"; });
    EXPECT_EQ(t.target, escape_text(t.input_text) + bbox_tokens(*img.bbox, s.viewport()));
    ASSERT_TRUE(t.mask_counts);
    const double exact = 0.9 * static_cast<double>(t.mask_counts->second);
    EXPECT_GE(static_cast<double>(t.mask_counts->first), std::floor(exact));
    EXPECT_LE(static_cast<double>(t.mask_counts->first), std::ceil(exact));
    captions.insert(t.input_text);
  }
  // Both the alt text and the neighbouring caption get drawn.
  EXPECT_EQ(captions.size(), 2u);
}

TEST(Constructors, ImageWithoutCaptionSourcesFails) {
  auto doc = nlohmann::json::parse(read_file(support::hand("minimal.json")));
  auto& nodes = doc["nodes"];
  nodes[2]["tag"] = "img";
  nodes[2]["kind"] = "image";
  nodes[2]["child_ids"] = nlohmann::json::array();
  nodes.erase(3);
  const auto s = validate_snapshot(doc.dump());
  Rng rng(1);
  try {
    make_image_grounding(s, context(), rng);
    FAIL();
  } catch (const TaskError& e) {
    EXPECT_EQ(e.code(), TaskErrorCode::NoCaption);
  }
}

TEST(Constructors, ElementGroundingTargetsElementRect) {
  const auto& s = support::full_page();
  const auto ctx = context();
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    Rng rng(seed);
    const auto t = make_element_grounding(s, ctx, rng);
    bool matched = false;
    for (const auto& n : s.nodes()) {
      if (n.is_text() || !n.bbox) continue;
      const auto d = element_description(n, ctx.vocab);
      if (d && *d == t.input_text && t.target == bbox_tokens(*n.bbox, s.viewport())) matched = true;
    }
    EXPECT_TRUE(matched) << t.input_text;
  }
}

TEST(Constructors, ButtonDescriptionDropsMixedToken) {
  const auto& p = support::page("page-0001");
  const auto s = clean(p.snapshot).first;
  const auto it = std::find_if(s.nodes().begin(), s.nodes().end(), [](const DomNode& n) { return n.tag == "button"; });
  ASSERT_NE(it, s.nodes().end());
  EXPECT_EQ(element_description(*it, support::vocab()), "button btn-primary submit");
  EXPECT_EQ(attribute_prediction_target(*it, support::vocab()), "button btn-primary");
}

TEST(Constructors, AttributePredictionOutlinesWholeGroup) {
  const auto& s = clean(support::page("page-0001").snapshot).first;
  const auto ctx = context();
  const auto groups = attribute_groups(s);
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    Rng rng(seed);
    const auto t = make_attribute_prediction(s, ctx, rng);
    bool found = false;
    for (const auto& g : groups) {
      if (g.size() != t.directives.size()) continue;
      bool same = true;
      for (std::size_t i = 0; i < g.size(); ++i) same = same && t.directives[i].rect == *s.node(g[i]).bbox;
      // Nested elements can share a box, so the target disambiguates.
      if (same && t.target == attribute_prediction_target(s.node(g.front()), ctx.vocab)) {
        found = true;
        for (NodeId id : g) {
          EXPECT_EQ(s.node(id).tag, s.node(g.front()).tag);
          EXPECT_EQ(s.node(id).attributes, s.node(g.front()).attributes);
        }
      }
    }
    EXPECT_TRUE(found);
  }
}

TEST(Constructors, NodeRelationTargetNamesTheRelation) {
  const auto& s = support::full_page();
  const auto ctx = context();
  std::set<std::string> seen;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    Rng rng(seed);
    const auto t = make_node_relation(s, ctx, rng);
    ASSERT_EQ(t.directives.size(), 2u);
    EXPECT_EQ(t.directives[0].style, OutlineStyle::Primary);
    EXPECT_EQ(t.directives[1].style, OutlineStyle::Secondary);
    seen.insert(t.target);
  }
  EXPECT_EQ(seen, (std::set<std::string>{"self", "parent", "child", "sibling", "ancestor", "descendant", "others"}));
}

TEST(Constructors, TableBoxesEqualFoldUnion) {
  for (const auto& [s, name] : cleaned_corpus()) {
    std::string expected;
    for (const auto& n : s.nodes()) {
      if (n.tag != "table") continue;
      const auto box = oracle::fold_union_table(s, n);
      ASSERT_TRUE(box);
      EXPECT_EQ(table_merged_box(s, n.id), *box) << name;
      expected += bbox_tokens(*box, s.viewport());
    }
    Rng rng(1);
    if (expected.empty()) {
      EXPECT_THROW(make_table_detection(s, context(), rng), TaskError);
    } else {
      EXPECT_EQ(make_table_detection(s, context(), rng).target, expected) << name;
    }
  }
}

TEST(Constructors, TableParsingUsesNamedTags) {
  Rng rng(2);
  const auto t = make_table_parsing(cleaned_table(), context(), rng);
  EXPECT_EQ(t.target,
            "<table <tbody <tr <td plan> <td price>> <tr <td basic> <td 10>> <tr <td pro> <td 25>>>>");
  ASSERT_EQ(t.directives.size(), 1u);
  EXPECT_EQ(t.directives[0].rect, (BBox{24, 24, 344, 96}));
}

TEST(Constructors, LayoutGroupsEqualGroupingOracle) {
  for (const auto& page : support::corpus()) {
    // xpath strings only reflect sibling positions before cleaning.
    const auto& s = page.snapshot;
    const auto got = layout_groups(s);
    const auto want = oracle::layout_groups(s);
    ASSERT_EQ(got.size(), want.size()) << page.name;
    for (std::size_t i = 0; i < got.size(); ++i) {
      EXPECT_EQ(got[i].key, want[i].key);
      EXPECT_EQ(got[i].region, want[i].region);
      std::vector<std::int64_t> members;
      for (NodeId id : got[i].members) members.push_back(to_int(id));
      EXPECT_EQ(members, want[i].members);
    }
  }
}

TEST(Constructors, TitleMasksMatchOverlapOracle) {
  for (const auto& [s, name] : cleaned_corpus()) {
    std::vector<std::int64_t> expected;
    for (const auto& n : s.nodes()) {
      if (!n.is_text()) continue;
      const auto cand = title_tokens(text_of(n));
      const auto ttl = title_tokens(s.info().document_title);
      const std::set<std::string> c(cand.begin(), cand.end()), t(ttl.begin(), ttl.end());
      std::size_t hit = 0;
      for (const auto& x : c) hit += t.count(x);
      if (!c.empty() && hit > 0 && 10 * hit >= 6 * c.size()) expected.push_back(to_int(n.id));
    }
    std::vector<std::int64_t> got;
    for (NodeId id : title_candidates(s, 0.6)) got.push_back(to_int(id));
    std::sort(got.begin(), got.end());
    std::sort(expected.begin(), expected.end());
    EXPECT_EQ(got, expected) << name;
    Rng rng(0);
    const auto t = make_screen_titling(s, context(), rng);
    EXPECT_EQ(t.target, escape_text(s.info().document_title));
  }
}

TEST(Constructors, TitleContainmentExample) {
  EXPECT_DOUBLE_EQ(title_overlap("Buy Shoes", "ACME - Buy Shoes"), 1.0);
  EXPECT_DOUBLE_EQ(title_overlap("buy red shoes", "ACME - Buy Shoes"), 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(title_overlap("", "x"), 0.0);
}

TEST(Mixture, Presets) {
  const auto nl = MixtureWeights::parse("s4-nl");
  EXPECT_GT(nl[TaskKind::TableParsing], 0);
  EXPECT_EQ(nl[TaskKind::Ocr], 0);
  const auto loc = MixtureWeights::parse("s4-loc");
  EXPECT_GT(loc[TaskKind::LayoutAnalysis], 0);
  EXPECT_EQ(loc[TaskKind::ScreenTitling], 0);
  const auto custom = MixtureWeights::parse("ocr=1,table_detection=0.5");
  EXPECT_EQ(custom[TaskKind::Ocr], 1.0);
  EXPECT_EQ(custom[TaskKind::TableDetection], 0.5);
  EXPECT_EQ(custom[TaskKind::ScreenParsing], 0.0);
  EXPECT_THROW(MixtureWeights::parse("nonsense"), ConfigError);
  EXPECT_THROW(MixtureWeights::parse("ocr=-1"), ConfigError);
  EXPECT_THROW(MixtureWeights::parse("ocr=0"), ConfigError);
}

TEST(Mixture, JointPresetMatchesPublishedLossWeights) {
  const auto j = MixtureWeights::parse("s4-joint");
  const std::map<std::string, double> published = {
      {"screen2html", 1.0},       {"attribute_prediction", 0.5}, {"title_generation", 0.5},
      {"node_relation_prediction", 0.1}, {"table_parsing", 0.1}, {"ocr", 0.1},
      {"table_detection", 0.1},   {"layout_analysis", 0.1},    {"image_grounding", 0.1},
      {"element_grounding", 0.1}};
  for (TaskKind k : kAllTaskKinds) EXPECT_EQ(j[k], published.at(std::string(to_string(k)))) << to_string(k);
  EXPECT_EQ(Viewport{}.width_px, 1280);
  EXPECT_EQ(Viewport{}.height_px, 1280);
}

TEST(Mixture, UniformFrequenciesWithinThreeSigma) {
  const auto& s = support::full_page();
  const auto ctx = context();
  const auto w = MixtureWeights::uniform();
  std::array<double, kTaskKindCount> counts{};
  constexpr int kDraws = 10000;
  for (int i = 0; i < kDraws; ++i) {
    Rng rng(hash64(12345, static_cast<std::uint64_t>(i)));
    counts[index_of(sample_task(s, w, ctx, rng).kind)] += 1;
  }
  const double p = 0.1, sigma = std::sqrt(kDraws * p * (1 - p));
  for (TaskKind k : kAllTaskKinds) EXPECT_LT(std::abs(counts[index_of(k)] - kDraws * p), 3 * sigma) << to_string(k);
}

TEST(Mixture, FailedKindsAreRedrawn) {
  const auto s = clean(load_snapshot(support::hand("minimal.json"))).first;
  const auto ctx = context();
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    Rng rng(seed);
    const auto t = sample_task(s, MixtureWeights::uniform(), ctx, rng);
    EXPECT_NE(t.kind, TaskKind::TableDetection);
    EXPECT_NE(t.kind, TaskKind::ImageGrounding);
  }
  Rng rng(0);
  EXPECT_THROW(sample_task(s, MixtureWeights::parse("table_detection=1"), ctx, rng), TaskError);
}
