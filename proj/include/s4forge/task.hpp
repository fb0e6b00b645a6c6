#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "s4forge/error.hpp"
#include "s4forge/geometry.hpp"

namespace s4forge {

enum class TaskKind {
  ScreenParsing,
  Ocr,
  ImageGrounding,
  ElementGrounding,
  AttributePrediction,
  NodeRelation,
  TableDetection,
  TableParsing,
  ScreenTitling,
  LayoutAnalysis,
};

inline constexpr std::size_t kTaskKindCount = 10;

inline constexpr std::array<TaskKind, kTaskKindCount> kAllTaskKinds = {
    TaskKind::ScreenParsing,   TaskKind::Ocr,          TaskKind::ImageGrounding,
    TaskKind::ElementGrounding, TaskKind::AttributePrediction, TaskKind::NodeRelation,
    TaskKind::TableDetection,  TaskKind::TableParsing, TaskKind::ScreenTitling,
    TaskKind::LayoutAnalysis,
};

inline constexpr std::size_t index_of(TaskKind k) { return static_cast<std::size_t>(k); }

// Manifest names; the loss-weight keys used for the joint mixture.
inline std::string_view to_string(TaskKind k) {
  static constexpr std::array<std::string_view, kTaskKindCount> kNames = {
      "screen2html",        "ocr",                      "image_grounding", "element_grounding",
      "attribute_prediction", "node_relation_prediction", "table_detection", "table_parsing",
      "title_generation",   "layout_analysis"};
  return kNames[index_of(k)];
}

inline std::optional<TaskKind> parse_task_kind(std::string_view s) {
  for (TaskKind k : kAllTaskKinds)
    if (to_string(k) == s) return k;
  return std::nullopt;
}

enum class DirectiveOp { DrawBoxOutline, MaskRect };

// Outline colour slot. Node relation marks its second element with Secondary.
enum class OutlineStyle { Primary, Secondary };

struct RenderDirective {
  DirectiveOp op = DirectiveOp::DrawBoxOutline;
  BBox rect;
  OutlineStyle style = OutlineStyle::Primary;

  static RenderDirective outline(const BBox& r, OutlineStyle s = OutlineStyle::Primary) {
    return {DirectiveOp::DrawBoxOutline, r, s};
  }
  static RenderDirective mask(const BBox& r) { return {DirectiveOp::MaskRect, r, OutlineStyle::Primary}; }
  friend bool operator==(const RenderDirective&, const RenderDirective&) = default;
};

struct TaskSample {
  TaskKind kind = TaskKind::ScreenParsing;
  std::string sample_id;
  std::string screenshot_ref;
  std::vector<RenderDirective> directives;
  std::string input_text;
  std::string target;
  std::uint64_t seed = 0;
  std::uint64_t url_hash = 0;
  // Words masked / words eligible, for tasks that mask.
  std::optional<std::pair<std::size_t, std::size_t>> mask_counts;

  friend bool operator==(const TaskSample&, const TaskSample&) = default;
};

enum class NodeRelation { Self, Parent, Child, Sibling, Ancestor, Descendant, Others };

inline constexpr std::size_t kNodeRelationCount = 7;

inline std::string_view to_string(NodeRelation r) {
  switch (r) {
    case NodeRelation::Self: return "self";
    case NodeRelation::Parent: return "parent";
    case NodeRelation::Child: return "child";
    case NodeRelation::Sibling: return "sibling";
    case NodeRelation::Ancestor: return "ancestor";
    case NodeRelation::Descendant: return "descendant";
    case NodeRelation::Others: return "others";
  }
  return "others";
}

/// Per-kind draw weights. Presets mirror the published schemes.
class MixtureWeights {
 public:
  MixtureWeights() = default;
  explicit MixtureWeights(const std::array<double, kTaskKindCount>& w) : w_(w) { check(); }

  static MixtureWeights uniform() {
    std::array<double, kTaskKindCount> w;
    w.fill(1.0);
    return MixtureWeights(w);
  }

  // Screen parsing plus the natural-language tasks.
  static MixtureWeights s4_nl() {
    return only({TaskKind::ScreenParsing, TaskKind::AttributePrediction, TaskKind::TableParsing,
                 TaskKind::ScreenTitling, TaskKind::NodeRelation});
  }

  // Screen parsing plus the box-generating tasks.
  static MixtureWeights s4_loc() {
    return only({TaskKind::ScreenParsing, TaskKind::Ocr, TaskKind::ImageGrounding,
                 TaskKind::ElementGrounding, TaskKind::TableDetection, TaskKind::LayoutAnalysis});
  }

  static MixtureWeights s4_joint() {
    std::array<double, kTaskKindCount> w{};
    w[index_of(TaskKind::ScreenParsing)] = 1.0;
    w[index_of(TaskKind::AttributePrediction)] = 0.5;
    w[index_of(TaskKind::ScreenTitling)] = 0.5;
    w[index_of(TaskKind::NodeRelation)] = 0.1;
    w[index_of(TaskKind::TableParsing)] = 0.1;
    w[index_of(TaskKind::Ocr)] = 0.1;
    w[index_of(TaskKind::TableDetection)] = 0.1;
    w[index_of(TaskKind::LayoutAnalysis)] = 0.1;
    w[index_of(TaskKind::ImageGrounding)] = 0.1;
    w[index_of(TaskKind::ElementGrounding)] = 0.1;
    return MixtureWeights(w);
  }

  /// "s4-nl", "s4-loc", "s4-joint", "uniform", or a custom list such as
  /// "ocr=1,table_detection=0.5" keyed by manifest task names.
  static MixtureWeights parse(std::string_view spec) {
    if (spec == "s4-nl" || spec == "s4_nl") return s4_nl();
    if (spec == "s4-loc" || spec == "s4_loc") return s4_loc();
    if (spec == "s4-joint" || spec == "s4_joint") return s4_joint();
    if (spec == "uniform") return uniform();
    std::array<double, kTaskKindCount> w{};
    std::size_t start = 0;
    while (start <= spec.size()) {
      auto end = spec.find(',', start);
      if (end == std::string_view::npos) end = spec.size();
      const auto item = spec.substr(start, end - start);
      const auto eq = item.find('=');
      if (eq == std::string_view::npos) throw ConfigError("bad scheme entry '" + std::string(item) + "'");
      const auto kind = parse_task_kind(item.substr(0, eq));
      if (!kind) throw ConfigError("unknown task '" + std::string(item.substr(0, eq)) + "'");
      try {
        w[index_of(*kind)] = std::stod(std::string(item.substr(eq + 1)));
      } catch (const std::exception&) {
        throw ConfigError("bad weight in '" + std::string(item) + "'");
      }
      start = end + 1;
    }
    return MixtureWeights(w);
  }

  double operator[](TaskKind k) const { return w_[index_of(k)]; }
  const std::array<double, kTaskKindCount>& values() const { return w_; }

 private:
  static MixtureWeights only(std::initializer_list<TaskKind> kinds) {
    std::array<double, kTaskKindCount> w{};
    for (TaskKind k : kinds) w[index_of(k)] = 1.0;
    return MixtureWeights(w);
  }

  void check() const {
    bool positive = false;
    for (double v : w_) {
      if (!(v >= 0.0) || !std::isfinite(v)) throw ConfigError("mixture weights must be finite and non-negative");
      positive = positive || v > 0.0;
    }
    if (!positive) throw ConfigError("mixture needs at least one positive weight");
  }

  std::array<double, kTaskKindCount> w_ = {1, 1, 1, 1, 1, 1, 1, 1, 1, 1};
};

}  // namespace s4forge
