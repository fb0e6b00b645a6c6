#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <iostream>
#include <mutex>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "s4forge/cleaning.hpp"
#include "s4forge/dataset.hpp"
#include "s4forge/hash.hpp"
#include "s4forge/raster.hpp"
#include "s4forge/rng.hpp"
#include "s4forge/snapshot_io.hpp"
#include "s4forge/taskgen.hpp"
#include "s4forge/vocab.hpp"

namespace s4forge {

struct PipelineConfig {
  std::filesystem::path input_dir;
  std::filesystem::path output_dir;
  std::string scheme = "uniform";
  MixtureWeights weights = MixtureWeights::uniform();
  std::uint64_t corpus_seed = 0;
  Viewport viewport{};
  std::filesystem::path vocab_file;
  double epsilon_px = 2.0;
  std::size_t shard_size = 1000;
  std::size_t workers = 1;
  std::size_t samples_per_page = 1;
  int png_compression = 6;
  TaskConfig tasks{};
  bool log_failures = true;
};

struct RunReport {
  std::size_t files_seen = 0;
  std::size_t pages_invalid = 0;
  std::size_t pages_in = 0;
  std::size_t duplicates_dropped = 0;
  std::size_t pages_deduped = 0;
  std::size_t pages_cleaned_empty = 0;
  std::size_t pages_without_task = 0;
  std::size_t samples_out = 0;
  std::array<std::size_t, kTaskKindCount> per_task_counts{};
  CleanReport clean_totals;
  double elapsed_s = 0.0;
  std::filesystem::path manifest_path;
};

inline nlohmann::json to_json(const RunReport& r) {
  nlohmann::json counts = nlohmann::json::object();
  for (TaskKind k : kAllTaskKinds) counts[std::string(to_string(k))] = r.per_task_counts[index_of(k)];
  return {
      {"files_seen", r.files_seen},
      {"pages_invalid", r.pages_invalid},
      {"pages_in", r.pages_in},
      {"duplicates_dropped", r.duplicates_dropped},
      {"pages_deduped", r.pages_deduped},
      {"pages_cleaned_empty", r.pages_cleaned_empty},
      {"pages_without_task", r.pages_without_task},
      {"samples_out", r.samples_out},
      {"per_task_counts", counts},
      {"clean_report_totals",
       {{"pruned_invisible", r.clean_totals.pruned_invisible},
        {"pruned_hit_test", r.clean_totals.pruned_hit_test},
        {"dropped_words_overflow", r.clean_totals.dropped_words_overflow},
        {"dropped_iframes", r.clean_totals.dropped_iframes}}},
      {"elapsed_s", r.elapsed_s},
      {"manifest", r.manifest_path.string()},
  };
}

/// Runs fn(i) for i in [0, n) on up to `workers` threads. fn must not throw.
inline void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& fn) {
  workers = std::max<std::size_t>(1, std::min(workers, n));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) fn(i);
    });
  for (auto& t : pool) t.join();
}

/// Sorted `*.json` files directly under `dir`.
inline std::vector<std::filesystem::path> list_snapshots(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> out;
  for (const auto& e : std::filesystem::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".json") out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

inline std::uint64_t page_seed(std::uint64_t corpus_seed, std::uint64_t url_hash, std::size_t draw) {
  const std::uint64_t base = hash64(corpus_seed, url_hash);
  return draw == 0 ? base : hash64(base, draw);
}

/// Harvested snapshots in, sharded dataset out.
///
/// Page-level problems (bad snapshot, wrong screenshot size, nothing left
/// after cleaning, no constructible task) skip the page and are counted.
/// Output is a function of the inputs and the config. The worker count
/// only changes speed.
/// Throws ConfigError for unusable configuration and EmptyCorpus when no
/// snapshot survives dedup.
inline RunReport run(const PipelineConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  if (cfg.workers < 1) throw ConfigError("workers must be at least 1");
  if (cfg.shard_size < 1) throw ConfigError("shard size must be positive");
  if (cfg.samples_per_page < 1) throw ConfigError("samples per page must be positive");
  if (!cfg.viewport.valid()) throw ConfigError("viewport must be positive");
  if (!std::filesystem::is_directory(cfg.input_dir))
    throw ConfigError("input directory " + cfg.input_dir.string() + " does not exist");
  if (cfg.output_dir.empty()) throw ConfigError("output directory not set");
  Vocabulary vocab;
  try {
    vocab = Vocabulary::load(cfg.vocab_file);
  } catch (const VocabMissing& e) {
    throw ConfigError(e.what());
  }

  std::mutex log_mu;
  auto log = [&](const std::string& what) {
    if (!cfg.log_failures) return;
    std::lock_guard lock(log_mu);
    std::cerr << "skip: " << what << '\n';
  };

  RunReport report;
  const auto files = list_snapshots(cfg.input_dir);
  report.files_seen = files.size();

  // Ingest.
  std::vector<std::optional<PageSnapshot>> loaded(files.size());
  parallel_for(files.size(), cfg.workers, [&](std::size_t i) {
    try {
      PageSnapshot s = load_snapshot(files[i]);
      if (!(s.viewport() == cfg.viewport))
        throw GeometryError("viewport " + std::to_string(s.viewport().width_px) + "x" +
                            std::to_string(s.viewport().height_px) + " differs from configured");
      const auto [w, h] = png_dimensions(s.info().screenshot_ref);
      if (w != cfg.viewport.width_px || h != cfg.viewport.height_px)
        throw GeometryError("screenshot is " + std::to_string(w) + "x" + std::to_string(h));
      loaded[i] = std::move(s);
    } catch (const Error& e) {
      log(files[i].string() + ": " + e.what());
    }
  });

  // Dedup (serial, first file wins).
  std::vector<std::size_t> valid;
  for (std::size_t i = 0; i < loaded.size(); ++i) {
    if (loaded[i]) valid.push_back(i);
    else ++report.pages_invalid;
  }
  report.pages_in = valid.size();
  const auto kept = dedup_urls(valid, [&](std::size_t i) { return loaded[i]->info().url_hash; });
  report.pages_deduped = kept.size();
  report.duplicates_dropped = report.pages_in - report.pages_deduped;
  if (kept.empty()) throw EmptyCorpus("no usable snapshots in " + cfg.input_dir.string());

  // Clean and sample.
  struct PageResult {
    CleanReport clean;
    bool empty = false;
    bool no_task = false;
    std::vector<TaskSample> samples;
  };
  std::vector<PageResult> results(kept.size());
  const TaskContext ctx{vocab, cfg.tasks};
  parallel_for(kept.size(), cfg.workers, [&](std::size_t j) {
    const PageSnapshot& page = *loaded[kept[j]];
    PageResult& res = results[j];
    std::optional<PageSnapshot> cleaned;
    try {
      auto [c, rep] = clean(page, CleanOptions{cfg.epsilon_px});
      cleaned = std::move(c);
      res.clean = rep;
    } catch (const EmptyPage& e) {
      res.empty = true;
      log(files[kept[j]].string() + ": " + e.what());
      return;
    }
    for (std::size_t k = 0; k < cfg.samples_per_page; ++k) {
      const std::uint64_t seed = page_seed(cfg.corpus_seed, page.info().url_hash, k);
      Rng rng(seed);
      try {
        TaskSample t = sample_task(*cleaned, cfg.weights, ctx, rng);
        t.seed = seed;
        t.sample_id = to_hex16(page.info().url_hash) + "-" + std::to_string(k);
        res.samples.push_back(std::move(t));
      } catch (const TaskError& e) {
        res.no_task = true;
        log(files[kept[j]].string() + ": " + e.what());
        break;
      }
    }
  });

  std::vector<TaskSample> samples;
  for (auto& r : results) {
    report.clean_totals += r.clean;
    report.pages_cleaned_empty += r.empty;
    report.pages_without_task += r.no_task;
    for (auto& s : r.samples) samples.push_back(std::move(s));
  }

  // Write shards in parallel, merge serially.
  const std::size_t shard_count = (samples.size() + cfg.shard_size - 1) / cfg.shard_size;
  std::vector<DatasetManifest> fragments(shard_count);
  std::vector<std::string> shard_errors(shard_count);
  const ShardOptions shard_opts{CompositorStyle{}, cfg.png_compression};
  const std::span<const TaskSample> all(samples);
  detail::ensure_dir(cfg.output_dir);
  parallel_for(shard_count, cfg.workers, [&](std::size_t i) {
    const std::size_t begin = i * cfg.shard_size;
    const std::size_t len = std::min(cfg.shard_size, samples.size() - begin);
    try {
      fragments[i] = write_one_shard(i, all.subspan(begin, len), cfg.output_dir, shard_opts);
    } catch (const Error& e) {
      shard_errors[i] = e.what();
    }
  });
  for (const auto& err : shard_errors)
    if (!err.empty()) throw IoError(err);

  DatasetManifest manifest = merge_manifests(fragments);
  manifest.corpus_seed = cfg.corpus_seed;
  manifest.viewport = cfg.viewport;
  report.manifest_path = save_manifest(manifest, cfg.output_dir);
  report.samples_out = manifest.records.size();
  report.per_task_counts = manifest.per_task_counts;
  report.elapsed_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

struct StatsSummary {
  std::size_t samples = 0;
  std::array<std::size_t, kTaskKindCount> per_task_counts{};
  std::array<double, kTaskKindCount> mean_target_chars{};
  double mean_target_chars_all = 0.0;
  // Ten equal-width bins over [0, 1]; 1.0 falls in the last bin.
  std::array<std::size_t, 10> mask_ratio_histogram{};
  std::size_t masked_samples = 0;
};

inline std::size_t utf8_chars(std::string_view s) {
  std::size_t n = 0;
  for (unsigned char c : s) n += (c & 0xc0) != 0x80;
  return n;
}

inline StatsSummary summarize(const DatasetManifest& m) {
  StatsSummary st;
  std::array<double, kTaskKindCount> sums{};
  double total = 0.0;
  for (const auto& r : m.records) {
    const auto k = index_of(r.kind);
    ++st.per_task_counts[k];
    const auto len = static_cast<double>(utf8_chars(r.target));
    sums[k] += len;
    total += len;
    if (r.mask_ratio) {
      const auto bin = std::min<std::size_t>(9, static_cast<std::size_t>(std::floor(*r.mask_ratio * 10.0)));
      ++st.mask_ratio_histogram[bin];
      ++st.masked_samples;
    }
  }
  st.samples = m.records.size();
  for (std::size_t k = 0; k < kTaskKindCount; ++k)
    st.mean_target_chars[k] = st.per_task_counts[k] ? sums[k] / static_cast<double>(st.per_task_counts[k]) : 0.0;
  st.mean_target_chars_all = st.samples ? total / static_cast<double>(st.samples) : 0.0;
  return st;
}

/// Read-only summary of a written dataset. Throws IoError.
inline StatsSummary stats(const std::filesystem::path& manifest_path) {
  return summarize(read_manifest(manifest_path));
}

inline void print_stats(const StatsSummary& st, std::ostream& os) {
  os << std::left << std::setw(26) << "task" << std::right << std::setw(10) << "samples"
     << std::setw(18) << "mean target len" << '\n';
  for (TaskKind k : kAllTaskKinds) {
    const auto i = index_of(k);
    os << std::left << std::setw(26) << to_string(k) << std::right << std::setw(10) << st.per_task_counts[i]
       << std::setw(18) << std::fixed << std::setprecision(1) << st.mean_target_chars[i] << '\n';
  }
  os << std::left << std::setw(26) << "total" << std::right << std::setw(10) << st.samples << std::setw(18)
     << std::fixed << std::setprecision(1) << st.mean_target_chars_all << '\n';
  os << "\nmask ratio histogram (" << st.masked_samples << " masked samples)\n";
  for (std::size_t b = 0; b < st.mask_ratio_histogram.size(); ++b) {
    os << "  [" << std::setprecision(1) << static_cast<double>(b) / 10.0 << ", "
       << static_cast<double>(b + 1) / 10.0 << (b == 9 ? "]" : ")") << std::setw(10)
       << st.mask_ratio_histogram[b] << '\n';
  }
}

}  // namespace s4forge
