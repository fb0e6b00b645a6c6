#pragma once

#include <array>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include <nlohmann/json.hpp>

#include "s4forge/compositor.hpp"
#include "s4forge/error.hpp"
#include "s4forge/hash.hpp"
#include "s4forge/raster.hpp"
#include "s4forge/snapshot_io.hpp"
#include "s4forge/task.hpp"

namespace s4forge {

struct ManifestRecord {
  std::string sample_id;
  TaskKind kind = TaskKind::ScreenParsing;
  std::string image_path;  // relative to the dataset root
  std::string target;
  std::string input_text;
  std::uint64_t seed = 0;
  std::uint64_t url_hash = 0;
  std::optional<double> mask_ratio;
  friend bool operator==(const ManifestRecord&, const ManifestRecord&) = default;
};

struct ShardInfo {
  std::string name;
  std::size_t records = 0;
  friend bool operator==(const ShardInfo&, const ShardInfo&) = default;
};

struct DatasetManifest {
  std::uint64_t corpus_seed = 0;
  Viewport viewport;
  std::array<std::size_t, kTaskKindCount> per_task_counts{};
  std::vector<ShardInfo> shards;
  std::vector<ManifestRecord> records;

  void add(ManifestRecord r) {
    ++per_task_counts[index_of(r.kind)];
    records.push_back(std::move(r));
  }
  friend bool operator==(const DatasetManifest&, const DatasetManifest&) = default;
};

struct ShardOptions {
  CompositorStyle style{};
  int png_compression = 6;
};

inline std::string shard_name(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "shard-%05zu", index);
  return buf;
}

inline nlohmann::json record_json(const ManifestRecord& r) {
  return {
      {"sample_id", r.sample_id},
      {"kind", std::string(to_string(r.kind))},
      {"image_path", r.image_path},
      {"target", r.target},
      {"input_text", r.input_text},
      {"seed", r.seed},
      {"url_hash", to_hex16(r.url_hash)},
      {"mask_ratio", r.mask_ratio ? nlohmann::json(*r.mask_ratio) : nlohmann::json(nullptr)},
  };
}

inline ManifestRecord parse_record(const nlohmann::json& j, const std::string& where) {
  try {
    ManifestRecord r;
    r.sample_id = j.at("sample_id").get<std::string>();
    const auto kind = parse_task_kind(j.at("kind").get<std::string>());
    if (!kind) throw IoError(where + ": unknown task kind");
    r.kind = *kind;
    r.image_path = j.at("image_path").get<std::string>();
    r.target = j.at("target").get<std::string>();
    r.input_text = j.at("input_text").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    const auto h = parse_hex16(j.at("url_hash").get<std::string>());
    if (!h) throw IoError(where + ": bad url_hash");
    r.url_hash = *h;
    if (!j.at("mask_ratio").is_null()) r.mask_ratio = j.at("mask_ratio").get<double>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(where + ": " + e.what());
  }
}

namespace detail {

inline void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
}

}  // namespace detail

/// Writes one shard directory: composited `<sample_id>.png` images plus
/// `records.jsonl` in submission order. Returns the shard's manifest
/// fragment.
inline DatasetManifest write_one_shard(std::size_t shard_index, std::span<const TaskSample> samples,
                                       const std::filesystem::path& out_dir,
                                       const ShardOptions& opts = {}) {
  DatasetManifest frag;
  const std::string name = shard_name(shard_index);
  const auto dir = out_dir / name;
  detail::ensure_dir(dir);
  std::ofstream records(dir / "records.jsonl", std::ios::binary | std::ios::trunc);
  if (!records) throw IoError("cannot create " + (dir / "records.jsonl").string());

  std::string cached_ref;
  RasterImage cached;
  for (const auto& s : samples) {
    if (s.sample_id.empty()) throw IoError("sample without id");
    if (s.screenshot_ref != cached_ref || cached.width() == 0) {
      cached = read_png(s.screenshot_ref);
      cached_ref = s.screenshot_ref;
    }
    const std::string image_rel = name + "/" + s.sample_id + ".png";
    write_png(out_dir / image_rel, apply_directives(cached, s.directives, opts.style), opts.png_compression);

    ManifestRecord r{s.sample_id, s.kind, image_rel, s.target, s.input_text, s.seed, s.url_hash, {}};
    if (s.mask_counts && s.mask_counts->second > 0)
      r.mask_ratio = static_cast<double>(s.mask_counts->first) / static_cast<double>(s.mask_counts->second);
    records << record_json(r).dump() << '\n';
    frag.add(std::move(r));
  }
  records.flush();
  if (!records) throw IoError("write failed for " + (dir / "records.jsonl").string());
  frag.shards.push_back({name, samples.size()});
  return frag;
}

/// Splits `samples` into consecutive shards of `shard_size`, numbered from
/// `first_shard`. No samples means no shards.
inline DatasetManifest write_shard(std::span<const TaskSample> samples, const std::filesystem::path& out_dir,
                                   std::size_t shard_size, const ShardOptions& opts = {},
                                   std::size_t first_shard = 0) {
  if (shard_size == 0) throw ConfigError("shard size must be positive");
  std::vector<DatasetManifest> parts;
  for (std::size_t begin = 0, idx = first_shard; begin < samples.size(); begin += shard_size, ++idx) {
    const std::size_t len = std::min(shard_size, samples.size() - begin);
    parts.push_back(write_one_shard(idx, samples.subspan(begin, len), out_dir, opts));
  }
  DatasetManifest out;
  for (auto& p : parts) {
    for (auto& r : p.records) out.add(std::move(r));
    out.shards.insert(out.shards.end(), p.shards.begin(), p.shards.end());
  }
  return out;
}

/// Concatenates fragments in order. Header fields come from the first one.
/// Throws DuplicateId if a sample id repeats.
inline DatasetManifest merge_manifests(std::span<const DatasetManifest> fragments) {
  DatasetManifest out;
  if (!fragments.empty()) {
    out.corpus_seed = fragments.front().corpus_seed;
    out.viewport = fragments.front().viewport;
  }
  std::unordered_set<std::string> ids;
  for (const auto& f : fragments) {
    for (const auto& r : f.records) {
      if (!ids.insert(r.sample_id).second) throw DuplicateId("duplicate sample id " + r.sample_id);
      out.add(r);
    }
    out.shards.insert(out.shards.end(), f.shards.begin(), f.shards.end());
  }
  return out;
}

inline constexpr int kManifestFormatVersion = 1;

inline nlohmann::json manifest_header_json(const DatasetManifest& m) {
  nlohmann::json counts = nlohmann::json::object();
  for (TaskKind k : kAllTaskKinds) counts[std::string(to_string(k))] = m.per_task_counts[index_of(k)];
  nlohmann::json shards = nlohmann::json::array();
  for (const auto& s : m.shards) shards.push_back({{"name", s.name}, {"records", s.records}});
  return {
      {"format_version", kManifestFormatVersion},
      {"corpus_seed", m.corpus_seed},
      {"viewport", {{"width", m.viewport.width_px}, {"height", m.viewport.height_px}}},
      {"sample_count", m.records.size()},
      {"per_task_counts", std::move(counts)},
      {"shards", std::move(shards)},
  };
}

/// Writes `manifest.json` into `out_dir`. Records stay in the shard files.
inline std::filesystem::path save_manifest(const DatasetManifest& m, const std::filesystem::path& out_dir) {
  detail::ensure_dir(out_dir);
  const auto path = out_dir / "manifest.json";
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot create " + path.string());
  out << manifest_header_json(m).dump(2) << '\n';
  if (!out) throw IoError("write failed for " + path.string());
  return path;
}

/// Reads `manifest.json` (or a dataset directory) and every shard it lists.
/// Throws IoError if the stored counts disagree with the records.
inline DatasetManifest read_manifest(const std::filesystem::path& path) {
  const auto file = std::filesystem::is_directory(path) ? path / "manifest.json" : path;
  const auto root = file.parent_path();
  nlohmann::json head;
  try {
    head = nlohmann::json::parse(read_file(file));
  } catch (const nlohmann::json::exception& e) {
    throw IoError(file.string() + ": " + e.what());
  }
  DatasetManifest m;
  try {
    m.corpus_seed = head.at("corpus_seed").get<std::uint64_t>();
    m.viewport = {head.at("viewport").at("width").get<int>(), head.at("viewport").at("height").get<int>()};
    for (const auto& s : head.at("shards")) m.shards.push_back({s.at("name").get<std::string>(), s.at("records").get<std::size_t>()});
  } catch (const nlohmann::json::exception& e) {
    throw IoError(file.string() + ": " + e.what());
  }
  for (const auto& shard : m.shards) {
    const auto rec_path = root / shard.name / "records.jsonl";
    std::ifstream in(rec_path, std::ios::binary);
    if (!in) throw IoError("cannot open " + rec_path.string());
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(line);
      } catch (const nlohmann::json::exception& e) {
        throw IoError(rec_path.string() + ": " + e.what());
      }
      m.add(parse_record(j, rec_path.string()));
      ++n;
    }
    if (n != shard.records) throw IoError(rec_path.string() + ": record count differs from manifest");
  }
  for (TaskKind k : kAllTaskKinds) {
    const auto name = std::string(to_string(k));
    const auto& counts = head.at("per_task_counts");
    const std::size_t stored = counts.contains(name) ? counts.at(name).get<std::size_t>() : 0;
    if (stored != m.per_task_counts[index_of(k)])
      throw IoError(file.string() + ": per-task count for " + name + " differs from records");
  }
  return m;
}

}  // namespace s4forge
