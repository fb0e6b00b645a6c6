#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "s4forge/fixture_gen.hpp"
#include "s4forge/s4forge.hpp"

namespace support {

inline std::filesystem::path fixture_dir() { return S4FORGE_FIXTURE_DIR; }
inline std::filesystem::path corpus_pages() { return fixture_dir() / "corpus" / "pages"; }
inline std::filesystem::path hand(const std::string& name) { return fixture_dir() / "hand" / name; }

inline const s4forge::Vocabulary& vocab() {
  static const s4forge::Vocabulary v = s4forge::Vocabulary::load(fixture_dir() / "corpus" / "vocab.vocab");
  return v;
}

struct CorpusPage {
  std::filesystem::path file;
  std::string name;
  s4forge::PageSnapshot snapshot;
  s4forge::CleanReport expected;
  std::vector<std::string> features;
};

/// The committed corpus with its construction annotations, in file order.
inline const std::vector<CorpusPage>& corpus() {
  static const std::vector<CorpusPage> pages = [] {
    const auto notes = nlohmann::json::parse(s4forge::read_file(fixture_dir() / "corpus" / "annotations.json"));
    std::vector<CorpusPage> out;
    for (const auto& f : s4forge::list_snapshots(corpus_pages())) {
      auto snap = s4forge::load_snapshot(f);
      const auto& note = notes.at(s4forge::to_hex16(snap.info().url_hash));
      out.push_back({f, note.at("name").get<std::string>(), std::move(snap), s4forge::fixtures::parse_expected_report(note),
                     note.at("features").get<std::vector<std::string>>()});
    }
    return out;
  }();
  return pages;
}

/// Corpus page by annotation name. "page-0000" has every feature.
inline const CorpusPage& page(const std::string& name) {
  for (const auto& p : corpus())
    if (p.name == name) return p;
  throw std::runtime_error("no corpus page " + name);
}

/// Cleaned snapshot of the fully featured page.
inline const s4forge::PageSnapshot& full_page() {
  static const s4forge::PageSnapshot s = s4forge::clean(page("page-0000").snapshot).first;
  return s;
}

/// Fresh scratch directory under the system temp dir, removed afterwards.
class TempDir {
 public:
  explicit TempDir(const std::string& name)
      : path_(std::filesystem::temp_directory_path() / ("s4forge-test-" + name)) {
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace support
