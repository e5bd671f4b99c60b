#pragma once

// Per-local-split empirical distributions over extensions, keyed by masked
// signature. Counts are kept exact; probabilities are count/total.

#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "letn/core.hpp"
#include "letn/random.hpp"
#include "letn/signature.hpp"

namespace letn {

enum class FallbackPolicy { empty_extension };

struct TableMeta {
  std::size_t k = 2;
  Seconds gap = 300;
  SplitConfig split;
  FallbackPolicy fallback = FallbackPolicy::empty_extension;
  std::vector<std::string> label_names;
  std::vector<std::size_t> label_counts;  // one per local split

  std::size_t width(std::size_t split_index) const { return build_encoding(label_counts.at(split_index)).width; }

  /// Metadata for a label assignment: static labels repeat their count in every split.
  static TableMeta for_labels(const LabelAssignment& labels, std::size_t k, Seconds gap, const SplitConfig& split) {
    TableMeta m;
    m.k = k;
    m.gap = gap;
    m.split = split;
    m.label_names = labels.names();
    const std::size_t n = split.split_count();
    for (std::size_t s = 0; s < n; ++s) m.label_counts.push_back(labels.label_count(labels.is_static() ? 0 : s));
    return m;
  }

  friend bool operator==(const TableMeta&, const TableMeta&) = default;
};

struct KeyDistribution {
  std::vector<Extension> extensions;  // ascending
  std::vector<std::uint64_t> counts;
  std::vector<std::uint64_t> cumulative;
  std::uint64_t total = 0;

  double probability(std::size_t i) const { return static_cast<double>(counts[i]) / static_cast<double>(total); }

  friend bool operator==(const KeyDistribution& a, const KeyDistribution& b) {
    return a.extensions == b.extensions && a.counts == b.counts;
  }
};

class ExtensionTable {
 public:
  using SplitMap = std::map<std::string, KeyDistribution>;

  ExtensionTable() = default;
  explicit ExtensionTable(TableMeta meta) : meta_(std::move(meta)), splits_(meta_.split.split_count()) {}

  const TableMeta& meta() const { return meta_; }
  std::size_t split_count() const { return splits_.size(); }
  const SplitMap& split(std::size_t s) const { return splits_.at(s); }

  const KeyDistribution* find(std::size_t split, const std::string& key) const {
    const auto& m = splits_.at(split);
    auto it = m.find(key);
    return it == m.end() ? nullptr : &it->second;
  }

  /// Adds `count` observations. Call finalize() before sampling.
  void add(std::size_t split, const std::string& key, const Extension& ext, std::uint64_t count) {
    auto& dist = splits_.at(split)[key];
    auto it = std::lower_bound(dist.extensions.begin(), dist.extensions.end(), ext);
    auto pos = static_cast<std::size_t>(it - dist.extensions.begin());
    if (it != dist.extensions.end() && *it == ext) {
      dist.counts[pos] += count;
    } else {
      dist.extensions.insert(it, ext);
      dist.counts.insert(dist.counts.begin() + static_cast<std::ptrdiff_t>(pos), count);
    }
    dist.total += count;
  }

  /// Associative merge of a table trained on another shard.
  void merge(const ExtensionTable& other) {
    if (!(other.meta_ == meta_)) throw UsageError("cannot merge tables with different metadata");
    for (std::size_t s = 0; s < splits_.size(); ++s)
      for (const auto& [key, dist] : other.splits_[s])
        for (std::size_t i = 0; i < dist.extensions.size(); ++i) add(s, key, dist.extensions[i], dist.counts[i]);
    finalize();
  }

  void finalize() {
    for (auto& m : splits_)
      for (auto& [key, dist] : m) {
        dist.cumulative.resize(dist.counts.size());
        std::uint64_t acc = 0;
        for (std::size_t i = 0; i < dist.counts.size(); ++i) dist.cumulative[i] = acc += dist.counts[i];
      }
  }

  friend bool operator==(const ExtensionTable& a, const ExtensionTable& b) {
    return a.meta_ == b.meta_ && a.splits_ == b.splits_;
  }

 private:
  TableMeta meta_;
  std::vector<SplitMap> splits_;
};

inline void check_record(const TableMeta& meta, const CensusRecord& r) {
  if (r.split >= meta.label_counts.size()) throw UsageError("census record split out of range");
  const std::size_t w = meta.width(r.split);
  auto fail = [&](const char* what) {
    throw UsageError(std::string("inconsistent census record dimensions: ") + what + " (key " + r.key.render() + ")");
  };
  if (r.key.ego_code.size() != w) fail("ego code width");
  if (r.key.neighbors.size() != r.extension.slots.size()) fail("slot count");
  for (const auto& n : r.key.neighbors)
    if (n.size() != (meta.k - 1) * w + 1 || n.back() != kWildcard) fail("masked neighbor length");
  for (const auto& s : r.extension.slots)
    if (s.size() != w) fail("slot width");
  for (const auto& [label, count] : r.extension.new_neighbors)
    if (label >= meta.label_counts[r.split] || count == 0) fail("new-neighbor label");
}

inline ExtensionTable build_table(const std::vector<CensusRecord>& records, const TableMeta& meta) {
  ExtensionTable table(meta);
  for (const auto& r : records) {
    check_record(meta, r);
    table.add(r.split, r.key.render(), r.extension, 1);
  }
  table.finalize();
  return table;
}

struct SampleResult {
  const Extension& extension;
  bool fallback = false;
};

/// Draws an extension proportionally to its count; unseen keys yield the
/// empty extension.
inline SampleResult sample_extension(const ExtensionTable& table, std::size_t split, const std::string& key, Rng& rng) {
  static const Extension kEmpty{};
  const KeyDistribution* dist = table.find(split, key);
  if (dist == nullptr || dist->total == 0) return {kEmpty, true};
  if (dist->extensions.size() == 1) return {dist->extensions.front(), false};
  const std::uint64_t draw = uniform_below(rng, dist->total);
  auto it = std::upper_bound(dist->cumulative.begin(), dist->cumulative.end(), draw);
  return {dist->extensions[static_cast<std::size_t>(it - dist->cumulative.begin())], false};
}

inline SampleResult sample_extension(const ExtensionTable& table, std::size_t split, const MaskedKey& key, Rng& rng) {
  return sample_extension(table, split, key.render(), rng);
}

struct TableStats {
  struct SplitRow {
    std::size_t keys = 0;
    std::size_t extensions = 0;
    std::uint64_t observations = 0;
    friend bool operator==(const SplitRow&, const SplitRow&) = default;
  };
  std::vector<SplitRow> splits;
  std::map<std::size_t, std::size_t> extensions_per_key;  // #extensions -> #keys
  std::size_t total_keys = 0;
  std::size_t total_extensions = 0;
  std::uint64_t total_observations = 0;
  double coverage = 0.0;  // fraction of splits holding at least one key
};

inline TableStats table_stats(const ExtensionTable& table) {
  TableStats st;
  std::size_t covered = 0;
  for (std::size_t s = 0; s < table.split_count(); ++s) {
    TableStats::SplitRow row;
    for (const auto& [key, dist] : table.split(s)) {
      ++row.keys;
      row.extensions += dist.extensions.size();
      row.observations += dist.total;
      ++st.extensions_per_key[dist.extensions.size()];
    }
    if (row.keys > 0) ++covered;
    st.total_keys += row.keys;
    st.total_extensions += row.extensions;
    st.total_observations += row.observations;
    st.splits.push_back(row);
  }
  st.coverage = table.split_count() ? static_cast<double>(covered) / static_cast<double>(table.split_count()) : 0.0;
  return st;
}

// ---- artifact serialization ------------------------------------------------

inline constexpr int kTableFormatVersion = 1;

inline nlohmann::json table_to_json(const ExtensionTable& table) {
  using nlohmann::json;
  const auto& m = table.meta();
  json j;
  j["format"] = "letn-extension-table";
  j["version"] = kTableFormatVersion;
  j["k"] = m.k;
  j["gap"] = m.gap;
  j["split"] = {{"local", m.split.local_split}, {"global", m.split.global_split}, {"origin", m.split.origin}};
  j["fallback"] = "empty";
  j["label_names"] = m.label_names;
  j["label_counts"] = m.label_counts;
  std::size_t max_l = 0;
  for (auto c : m.label_counts) max_l = std::max(max_l, c);
  j["L"] = max_l;
  j["w"] = max_l ? build_encoding(max_l).width : 0;
  json splits = json::array();
  for (std::size_t s = 0; s < table.split_count(); ++s) {
    json keys = json::array();
    for (const auto& [key, dist] : table.split(s)) {
      json exts = json::array();
      for (std::size_t i = 0; i < dist.extensions.size(); ++i) {
        const auto& e = dist.extensions[i];
        json nn = json::array();
        for (const auto& [label, count] : e.new_neighbors) nn.push_back({label, count});
        exts.push_back({{"slots", e.slots}, {"new", nn}, {"count", dist.counts[i]}});
      }
      keys.push_back({{"key", key}, {"total", dist.total}, {"extensions", exts}});
    }
    splits.push_back({{"index", s}, {"width", m.width(s)}, {"keys", keys}});
  }
  j["splits"] = splits;
  return j;
}

inline ExtensionTable table_from_json(const nlohmann::json& j) {
  if (j.value("format", "") != "letn-extension-table") throw DataError("not an extension table artifact");
  if (j.at("version").get<int>() != kTableFormatVersion)
    throw DataError("unsupported table version " + j.at("version").dump());
  TableMeta m;
  m.k = j.at("k").get<std::size_t>();
  m.gap = j.at("gap").get<Seconds>();
  m.split.local_split = j.at("split").at("local").get<Seconds>();
  m.split.global_split = j.at("split").at("global").get<Seconds>();
  m.split.origin = j.at("split").at("origin").get<Seconds>();
  m.label_names = j.at("label_names").get<std::vector<std::string>>();
  m.label_counts = j.at("label_counts").get<std::vector<std::size_t>>();
  if (m.label_counts.size() != m.split.split_count()) throw DataError("table label counts do not match split count");
  ExtensionTable table(m);
  for (const auto& sj : j.at("splits")) {
    const auto s = sj.at("index").get<std::size_t>();
    for (const auto& kj : sj.at("keys")) {
      const auto key = kj.at("key").get<std::string>();
      for (const auto& ej : kj.at("extensions")) {
        Extension e;
        e.slots = ej.at("slots").get<std::vector<std::string>>();
        for (const auto& nn : ej.at("new")) e.new_neighbors[nn.at(0).get<LabelIndex>()] = nn.at(1).get<std::uint32_t>();
        CensusRecord probe{s, MaskedKey::parse(key), e};
        check_record(m, probe);
        table.add(s, key, e, ej.at("count").get<std::uint64_t>());
      }
    }
  }
  table.finalize();
  return table;
}

inline std::string table_to_string(const ExtensionTable& table) { return table_to_json(table).dump(1) + "\n"; }

inline ExtensionTable table_from_string(const std::string& text) {
  try {
    return table_from_json(nlohmann::json::parse(text));
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed table artifact: ") + e.what());
  }
}

}  // namespace letn
