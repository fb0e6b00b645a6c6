// s4forge: build screenshot pre-training datasets from harvested snapshots.

#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "s4forge/fixture_gen.hpp"
#include "s4forge/s4forge.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitEmpty = 2;

s4forge::Viewport parse_viewport(const std::string& s) {
  const auto x = s.find('x');
  if (x == std::string::npos) throw s4forge::ConfigError("viewport must look like 1280x1280");
  try {
    s4forge::Viewport vp{std::stoi(s.substr(0, x)), std::stoi(s.substr(x + 1))};
    if (!vp.valid()) throw s4forge::ConfigError("viewport must be positive");
    return vp;
  } catch (const std::logic_error&) {
    throw s4forge::ConfigError("viewport must look like 1280x1280");
  }
}

int run_pipeline(s4forge::PipelineConfig cfg, const std::string& viewport, bool quiet) {
  cfg.viewport = parse_viewport(viewport);
  cfg.weights = s4forge::MixtureWeights::parse(cfg.scheme);
  cfg.log_failures = !quiet;
  const auto report = s4forge::run(cfg);
  std::cout << s4forge::to_json(report).dump(2) << '\n';
  return kExitOk;
}

int validate(const std::string& path) {
  const auto snap = s4forge::load_snapshot(path);
  std::size_t words = 0;
  for (const auto& n : snap.nodes()) words += n.words.size();
  std::cout << "ok " << path << ": " << snap.size() << " nodes, " << words << " words, url_hash "
            << s4forge::to_hex16(snap.info().url_hash) << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Screenshot pre-training data pipeline"};
  app.require_subcommand(1);

  s4forge::PipelineConfig cfg;
  std::string viewport = "1280x1280";
  std::string input, output, vocab;
  bool quiet = false;
  auto* run = app.add_subcommand("run", "Clean snapshots, generate samples and write shards");
  run->add_option("--input", input, "Directory of <url_hash>.json snapshots and screenshots")->required();
  run->add_option("--out", output, "Output dataset directory")->required();
  run->add_option("--scheme", cfg.scheme, "s4-nl, s4-loc, s4-joint, uniform or kind=weight,...")
      ->capture_default_str();
  run->add_option("--seed", cfg.corpus_seed, "Corpus seed")->capture_default_str();
  run->add_option("--vocab", vocab, "Sentencepiece vocabulary (.vocab text form)")->required();
  run->add_option("--shard-size", cfg.shard_size, "Samples per shard")->capture_default_str();
  run->add_option("--workers", cfg.workers, "Worker threads")->capture_default_str();
  run->add_option("--samples-per-page", cfg.samples_per_page, "Samples drawn per page")->capture_default_str();
  run->add_option("--epsilon", cfg.epsilon_px, "Overflow tolerance in pixels")->capture_default_str();
  run->add_option("--viewport", viewport, "Expected viewport WxH")->capture_default_str();
  run->add_option("--png-compression", cfg.png_compression, "zlib level for output PNGs")
      ->check(CLI::Range(0, 9))
      ->capture_default_str();
  run->add_flag("--quiet", quiet, "Do not log skipped pages");

  std::string manifest;
  auto* stats = app.add_subcommand("stats", "Summarize a written dataset");
  stats->add_option("manifest", manifest, "manifest.json or dataset directory")->required();

  std::string snapshot;
  auto* check = app.add_subcommand("validate", "Check one snapshot against the wire format");
  check->add_option("snapshot", snapshot, "Snapshot JSON file")->required();

  std::string fixture_dir;
  std::size_t count = 60;
  std::uint64_t fixture_seed = 2024;
  auto* fixtures = app.add_subcommand("make-fixtures", "Write a synthetic snapshot corpus");
  fixtures->add_option("--out", fixture_dir, "Output directory")->required();
  fixtures->add_option("--count", count, "Number of pages")->capture_default_str();
  fixtures->add_option("--seed", fixture_seed, "Corpus seed")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      cfg.input_dir = input;
      cfg.output_dir = output;
      cfg.vocab_file = vocab;
      return run_pipeline(cfg, viewport, quiet);
    }
    if (*stats) {
      s4forge::print_stats(s4forge::stats(manifest), std::cout);
      return kExitOk;
    }
    if (*check) return validate(snapshot);
    if (*fixtures) {
      s4forge::fixtures::write_corpus(fixture_dir, count, fixture_seed);
      std::cout << "wrote " << count << " pages to " << fixture_dir << '\n';
      return kExitOk;
    }
  } catch (const s4forge::EmptyCorpus& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitEmpty;
  } catch (const s4forge::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  return kExitOk;
}
