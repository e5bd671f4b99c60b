#pragma once

// Text formats: contact events ("t i j" or "t i j Li Lj"), node metadata
// ("id label"), written networks, and the JSON/CSV outputs of evaluation.
//
// Lines starting with '#' are comments. Lines starting with "#@" carry
// directives written by write_network so that a written network parses
// back to the identical snapshot sequence:
//
//     #@ gap <seconds>
//     #@ start <time of snapshot 0>
//     #@ snapshots <count>
//     #@ nodes <count>
//     #@ ids <raw id of node 0> <raw id of node 1> ...

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <zlib.h>

#include "json.hpp"
#include "letn/core.hpp"
#include "letn/dictionary.hpp"
#include "letn/metrics.hpp"
#include "letn/random.hpp"

namespace letn {

enum class EventFormat { triples, triples_with_labels };

struct ContactEvent {
  Seconds t = 0;
  NodeId i = 0;
  NodeId j = 0;

  friend auto operator<=>(const ContactEvent&, const ContactEvent&) = default;
};

struct HeaderHints {
  std::optional<Seconds> gap;
  std::optional<Seconds> start;
  std::optional<std::size_t> snapshots;
  std::optional<std::size_t> nodes;
  std::vector<std::string> ids;
};

struct EventData {
  std::vector<ContactEvent> events;  // sorted by time, then endpoints
  std::vector<std::string> raw_ids;  // NodeId -> raw identifier
  std::optional<std::vector<std::string>> inline_labels;  // NodeId -> label name
  HeaderHints hints;
  std::size_t raw_records = 0;  // event lines read, before any deduplication

  std::size_t node_count() const { return raw_ids.size(); }
};

namespace detail {

inline std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

template <class T>
std::optional<T> parse_int(std::string_view s) {
  T v{};
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) return std::nullopt;
  return v;
}

/// Orders raw ids numerically when every id is an integer, else lexicographically.
inline void sort_ids(std::vector<std::string>& ids) {
  const bool numeric = std::all_of(ids.begin(), ids.end(), [](const std::string& s) {
    return parse_int<std::int64_t>(s).has_value();
  });
  if (numeric)
    std::sort(ids.begin(), ids.end(), [](const std::string& a, const std::string& b) {
      return *parse_int<std::int64_t>(a) < *parse_int<std::int64_t>(b);
    });
  else
    std::sort(ids.begin(), ids.end());
}

inline std::string where(const std::string& source, std::size_t line) {
  return source + ":" + std::to_string(line) + ": ";
}

inline void apply_directive(HeaderHints& h, const std::vector<std::string_view>& f, const std::string& at) {
  if (f.empty()) return;
  auto num = [&](std::size_t idx) {
    if (f.size() <= idx) throw DataError(at + "directive '" + std::string(f[0]) + "' needs a value");
    auto v = parse_int<std::int64_t>(f[idx]);
    if (!v) throw DataError(at + "directive '" + std::string(f[0]) + "' has a non-integer value");
    return *v;
  };
  if (f[0] == "gap") {
    h.gap = num(1);
  } else if (f[0] == "start") {
    h.start = num(1);
  } else if (f[0] == "snapshots") {
    h.snapshots = static_cast<std::size_t>(num(1));
  } else if (f[0] == "nodes") {
    h.nodes = static_cast<std::size_t>(num(1));
  } else if (f[0] == "ids") {
    for (std::size_t i = 1; i < f.size(); ++i) h.ids.emplace_back(f[i]);
  }
}

}  // namespace detail

inline EventData parse_events(std::istream& in, EventFormat format, const std::string& source = "<input>") {
  struct RawEvent {
    Seconds t;
    std::string i, j;
  };
  std::vector<RawEvent> raw;
  std::map<std::string, std::pair<std::string, std::size_t>> label_of;  // id -> (label, first line)
  EventData data;
  std::string line;
  std::size_t lineno = 0;
  const std::size_t want = format == EventFormat::triples ? 3 : 5;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view sv(line);
    const auto fields = detail::split_ws(sv);
    if (fields.empty()) continue;
    if (fields[0].starts_with("#@")) {
      auto rest = detail::split_ws(sv.substr(sv.find("#@") + 2));
      detail::apply_directive(data.hints, rest, detail::where(source, lineno));
      continue;
    }
    if (fields[0].starts_with('#')) continue;
    if (fields.size() < want)
      throw DataError(detail::where(source, lineno) + "expected " + std::to_string(want) + " fields, found " +
                      std::to_string(fields.size()));
    auto t = detail::parse_int<Seconds>(fields[0]);
    if (!t) throw DataError(detail::where(source, lineno) + "timestamp '" + std::string(fields[0]) + "' is not an integer");
    if (fields[1] == fields[2])
      throw DataError(detail::where(source, lineno) + "self-contact of node " + std::string(fields[1]));
    raw.push_back({*t, std::string(fields[1]), std::string(fields[2])});
    if (format == EventFormat::triples_with_labels) {
      for (int side = 0; side < 2; ++side) {
        const std::string id(fields[1 + side]);
        const std::string lab(fields[3 + side]);
        auto [it, inserted] = label_of.emplace(id, std::make_pair(lab, lineno));
        if (!inserted && it->second.first != lab)
          throw DataError(detail::where(source, lineno) + "node " + id + " has label '" + lab + "' but line " +
                          std::to_string(it->second.second) + " gave '" + it->second.first + "'");
      }
    }
  }
  if (raw.empty() && !data.hints.snapshots && data.hints.ids.empty())
    throw DataError(source + ": no contact events");
  data.raw_records = raw.size();

  std::map<std::string, NodeId> id_of;
  if (!data.hints.ids.empty()) {
    data.raw_ids = data.hints.ids;
  } else {
    for (const auto& e : raw) {
      id_of.emplace(e.i, 0);
      id_of.emplace(e.j, 0);
    }
    for (const auto& [id, _] : id_of) data.raw_ids.push_back(id);
    detail::sort_ids(data.raw_ids);
    id_of.clear();
  }
  for (std::size_t v = 0; v < data.raw_ids.size(); ++v)
    if (!id_of.emplace(data.raw_ids[v], static_cast<NodeId>(v)).second)
      throw DataError(source + ": duplicate node id '" + data.raw_ids[v] + "' in ids directive");
  if (data.hints.nodes && *data.hints.nodes != data.raw_ids.size())
    throw DataError(source + ": nodes directive says " + std::to_string(*data.hints.nodes) + " but " +
                    std::to_string(data.raw_ids.size()) + " ids are known");

  data.events.reserve(raw.size());
  for (const auto& e : raw) {
    auto a = id_of.find(e.i), b = id_of.find(e.j);
    if (a == id_of.end() || b == id_of.end())
      throw DataError(source + ": node '" + (a == id_of.end() ? e.i : e.j) + "' is missing from the ids directive");
    data.events.push_back({e.t, a->second, b->second});
  }
  std::sort(data.events.begin(), data.events.end());

  if (format == EventFormat::triples_with_labels) {
    std::vector<std::string> labels(data.raw_ids.size());
    for (std::size_t v = 0; v < labels.size(); ++v) {
      auto it = label_of.find(data.raw_ids[v]);
      if (it == label_of.end()) throw DataError(source + ": node '" + data.raw_ids[v] + "' has no inline label");
      labels[v] = it->second.first;
    }
    data.inline_labels = std::move(labels);
  }
  return data;
}

/// Whole file contents; gzip-compressed files are decompressed on the fly.
inline std::string read_input(const std::filesystem::path& path) {
  gzFile f = gzopen(path.c_str(), "rb");
  if (!f) throw DataError("cannot open '" + path.string() + "'");
  std::string out;
  char buf[1 << 16];
  int got = 0;
  while ((got = gzread(f, buf, sizeof buf)) > 0) out.append(buf, static_cast<std::size_t>(got));
  const bool failed = got < 0;
  gzclose(f);
  if (failed) throw DataError("cannot decompress '" + path.string() + "'");
  return out;
}

inline EventData parse_events_file(const std::filesystem::path& path, EventFormat format) {
  std::istringstream in(read_input(path));
  return parse_events(in, format, path.string());
}

inline EventData parse_events_string(const std::string& text, EventFormat format) {
  std::istringstream in(text);
  return parse_events(in, format);
}

/// Raw id -> label name, in file order.
struct Metadata {
  std::vector<std::pair<std::string, std::string>> entries;
  std::map<std::string, std::string> label_of;
};

inline Metadata parse_metadata(std::istream& in, const std::string& source = "<metadata>") {
  Metadata md;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto f = detail::split_ws(line);
    if (f.empty() || f[0].starts_with('#')) continue;
    if (f.size() < 2) throw DataError(detail::where(source, lineno) + "expected '<id> <label>'");
    const std::string id(f[0]), lab(f[1]);
    auto [it, inserted] = md.label_of.emplace(id, lab);
    if (!inserted) {
      if (it->second != lab)
        throw DataError(detail::where(source, lineno) + "node " + id + " listed with labels '" + it->second +
                        "' and '" + lab + "'");
      continue;
    }
    md.entries.emplace_back(id, lab);
  }
  if (md.entries.empty()) throw DataError(source + ": no metadata entries");
  return md;
}

inline Metadata parse_metadata_file(const std::filesystem::path& path) {
  std::istringstream in(read_input(path));
  return parse_metadata(in, path.string());
}

namespace detail {

inline LabelAssignment assign_in_order(const std::vector<std::string>& node_labels,
                                       const std::vector<std::string>& order) {
  std::map<std::string, LabelIndex> index;
  std::vector<std::string> names;
  for (const auto& l : order)
    if (index.emplace(l, static_cast<LabelIndex>(names.size())).second) names.push_back(l);
  std::vector<LabelIndex> labels;
  labels.reserve(node_labels.size());
  for (const auto& l : node_labels) labels.push_back(index.at(l));
  return LabelAssignment::make_static(std::move(labels), std::move(names));
}

}  // namespace detail

/// Labels from metadata. Label indices follow first appearance in the
/// metadata file, counting only nodes present in the events.
inline LabelAssignment labels_from_metadata(const EventData& data, const Metadata& md) {
  std::vector<std::string> node_labels(data.node_count());
  std::vector<std::string> missing;
  for (std::size_t v = 0; v < data.node_count(); ++v) {
    auto it = md.label_of.find(data.raw_ids[v]);
    if (it == md.label_of.end())
      missing.push_back(data.raw_ids[v]);
    else
      node_labels[v] = it->second;
  }
  if (!missing.empty()) {
    std::string list;
    for (std::size_t i = 0; i < missing.size(); ++i) list += (i ? ", " : "") + missing[i];
    throw DataError("nodes missing from metadata: " + list);
  }
  std::map<std::string, bool> present;
  for (const auto& id : data.raw_ids) present[id] = true;
  std::vector<std::string> order;
  for (const auto& [id, lab] : md.entries)
    if (present.count(id)) order.push_back(lab);
  return detail::assign_in_order(node_labels, order);
}

/// Labels carried inline by the events; indices in first-appearance order
/// over node ids.
inline LabelAssignment labels_from_inline(const EventData& data) {
  if (!data.inline_labels) throw UsageError("events carry no inline labels");
  return detail::assign_in_order(*data.inline_labels, *data.inline_labels);
}

/// Groups events into snapshots of width `gap`. Snapshot 0 starts at the
/// first event's time floored onto the grid {origin + m*gap}, or at the
/// file's start directive when present. Duplicate pairs within a snapshot
/// collapse to one edge.
inline TemporalNetwork snapshotize(const EventData& data, Seconds gap, std::optional<Seconds> origin = std::nullopt) {
  if (gap <= 0) throw UsageError("gap must be positive");
  Seconds base = 0;
  if (data.hints.start) {
    base = *data.hints.start;
  } else if (!data.events.empty()) {
    const Seconds first = data.events.front().t;
    const Seconds o = origin.value_or(SplitConfig::default_origin(first, 86400));
    base = o + floor_div(first - o, gap) * gap;
  }
  std::size_t length = 0;
  if (!data.events.empty()) {
    const Seconds first = data.events.front().t;
    if (first < base) throw DataError("event at t=" + std::to_string(first) + " precedes the start directive");
    length = static_cast<std::size_t>(floor_div(data.events.back().t - base, gap)) + 1;
  }
  if (data.hints.snapshots) {
    if (*data.hints.snapshots < length)
      throw DataError("events extend beyond the declared " + std::to_string(*data.hints.snapshots) + " snapshots");
    length = *data.hints.snapshots;
  }
  TemporalNetwork net = TemporalNetwork::empty(data.node_count(), length, gap, base);
  for (const auto& e : data.events)
    net.snapshots[static_cast<std::size_t>(floor_div(e.t - base, gap))].edges.emplace_back(e.i, e.j);
  for (auto& s : net.snapshots) s.canonicalize();
  return net;
}

inline std::vector<std::string> default_ids(std::size_t n) {
  std::vector<std::string> ids;
  for (std::size_t v = 0; v < n; ++v) ids.push_back(std::to_string(v));
  return ids;
}

inline void write_network(std::ostream& out, const TemporalNetwork& network, const std::vector<std::string>& ids) {
  if (ids.size() != network.node_count) throw UsageError("id map does not match node count");
  out << "# letn temporal network: t i j\n";
  out << "#@ gap " << network.gap << "\n";
  out << "#@ start " << network.start_time() << "\n";
  out << "#@ snapshots " << network.length() << "\n";
  out << "#@ nodes " << network.node_count << "\n";
  if (!ids.empty()) {
    out << "#@ ids";
    for (const auto& id : ids) out << ' ' << id;
    out << "\n";
  }
  for (const auto& s : network.snapshots)
    for (const auto& e : s.edges) out << s.time_start << ' ' << ids[e.u] << ' ' << ids[e.v] << '\n';
}

inline std::string network_to_string(const TemporalNetwork& network, const std::vector<std::string>& ids) {
  std::ostringstream out;
  write_network(out, network, ids);
  return out.str();
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw DataError("write failed for '" + path.string() + "'");
}

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_network(const std::filesystem::path& path, const TemporalNetwork& network,
                          const std::vector<std::string>& ids) {
  write_text(path, network_to_string(network, ids));
}

/// Reads a network written by write_network (or any triples file).
inline TemporalNetwork read_network(const std::filesystem::path& path, Seconds gap,
                                    std::vector<std::string>* ids = nullptr) {
  const auto data = parse_events_file(path, EventFormat::triples);
  if (data.hints.gap && *data.hints.gap != gap)
    throw DataError("'" + path.string() + "' was written with gap " + std::to_string(*data.hints.gap) +
                    ", expected " + std::to_string(gap));
  if (ids) *ids = data.raw_ids;
  return snapshotize(data, gap);
}

inline void write_table(const std::filesystem::path& path, const ExtensionTable& table) {
  write_text(path, table_to_string(table));
}

inline ExtensionTable read_table(const std::filesystem::path& path) { return table_from_string(read_text(path)); }

inline std::string checksum_hex(std::string_view bytes) {
  std::ostringstream s;
  s << std::hex << std::setw(16) << std::setfill('0') << fnv1a64(bytes);
  return s.str();
}

inline std::string file_checksum(const std::filesystem::path& path) { return checksum_hex(read_text(path)); }

// ---- reports -----------------------------------------------------------------

inline nlohmann::json matrix_to_json(const LabelPairMatrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t a = 0; a < m.size; ++a) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t b = 0; b < m.size; ++b) row.push_back(m.at(a, b));
    rows.push_back(row);
  }
  return rows;
}

inline nlohmann::json stats_to_json(const SeriesStats& s) {
  return {{"mean", s.mean},
          {"std", s.std},
          {"active_mean", s.active_mean},
          {"active_std", s.active_std},
          {"snapshots", s.snapshots},
          {"active_snapshots", s.active_snapshots}};
}

inline nlohmann::json metric_report_to_json(const MetricReport& r, bool with_series) {
  nlohmann::json j;
  j["name"] = r.name;
  j["interactions"] = r.interactions;
  for (std::size_t m = 0; m < r.series.size(); ++m) {
    auto& mj = j["metrics"][r.series[m].name];
    mj = stats_to_json(r.stats[m]);
    if (with_series) mj["series"] = r.series[m].values;
  }
  if (r.aggregated_q) j["aggregated"] = {{"Q", *r.aggregated_q}, {"r", *r.aggregated_r}};
  if (r.contacts) j["contact_matrix"] = matrix_to_json(*r.contacts);
  if (r.durations) j["duration_matrix"] = matrix_to_json(*r.durations);
  return j;
}

struct ReportContext {
  std::string dataset;
  std::string mode;
  std::uint64_t seed = 0;
  std::vector<std::string> label_names;
};

inline nlohmann::json report_to_json(const ComparisonReport& rep, const ReportContext& ctx) {
  nlohmann::json j;
  j["format"] = "letn-report";
  j["version"] = 1;
  j["provenance"] = {{"dataset", ctx.dataset}, {"mode", ctx.mode}, {"seed", ctx.seed}};
  j["label_names"] = ctx.label_names;
  j["conventions"] = {
      {"snapshot_metrics", "unweighted simple snapshot; Q and r are 0 on snapshots without edges"},
      {"assortativity", "categorical mixing-matrix estimator; 0 when all endpoint mass is on one label"},
      {"clustering", "mean local clustering over all nodes, degree < 2 contributes 0"},
      {"aggregated_Q", "weighted by the number of snapshots containing each edge"},
      {"aggregated_r", "aggregated edges counted once"},
      {"table2_error", "population standard deviation over active snapshots (original) and over active "
                       "snapshots pooled across surrogates (generated); all-snapshot values also reported"},
      {"table3_error", "standard error of the mean over surrogates"}};
  j["original"] = metric_report_to_json(rep.original, true);
  nlohmann::json surrogates = nlohmann::json::array();
  for (const auto& s : rep.surrogates) surrogates.push_back(metric_report_to_json(s, false));
  j["surrogates"] = surrogates;
  nlohmann::json cmp = nlohmann::json::object();
  for (const auto& c : rep.comparisons)
    cmp[c.metric] = {{"distances", c.distances},
                     {"mean_distance", c.mean_distance},
                     {"stderr_distance", c.stderr_distance},
                     {"pooled_active_mean", c.pooled_active_mean},
                     {"pooled_active_std", c.pooled_active_std},
                     {"correlations", c.correlations}};
  j["comparison"] = cmp;
  if (rep.aggregated_q_mean)
    j["surrogate_aggregated"] = {{"Q_mean", *rep.aggregated_q_mean},
                                 {"Q_std", *rep.aggregated_q_std},
                                 {"r_mean", *rep.aggregated_r_mean},
                                 {"r_std", *rep.aggregated_r_std}};
  if (rep.mean_contacts) j["surrogate_mean_contact_matrix"] = matrix_to_json(*rep.mean_contacts);
  if (rep.mean_durations) j["surrogate_mean_duration_matrix"] = matrix_to_json(*rep.mean_durations);
  return j;
}

inline void write_report(const std::filesystem::path& path, const ComparisonReport& rep, const ReportContext& ctx) {
  write_text(path, report_to_json(rep, ctx).dump(2) + "\n");
}

inline std::string format_real(double v) {
  std::ostringstream s;
  s << std::setprecision(17) << v;
  return s.str();
}

/// snapshot,time,original,surrogate_0,...
inline std::string series_csv(const TemporalNetwork& original, const ComparisonReport& rep, std::size_t metric) {
  std::ostringstream out;
  out << "snapshot,time,original";
  for (std::size_t i = 0; i < rep.surrogates.size(); ++i) out << ",surrogate_" << i;
  out << "\n";
  const auto& orig = rep.original.series.at(metric).values;
  for (std::size_t t = 0; t < orig.size(); ++t) {
    out << t << ',' << original.snapshots[t].time_start << ',' << format_real(orig[t]);
    for (const auto& s : rep.surrogates) {
      out << ',';
      if (t < s.series[metric].values.size()) out << format_real(s.series[metric].values[t]);
    }
    out << "\n";
  }
  return out.str();
}

inline std::string matrix_csv(const LabelPairMatrix& m, const std::vector<std::string>& names) {
  std::ostringstream out;
  out << "label";
  for (std::size_t b = 0; b < m.size; ++b) out << ',' << names.at(b);
  out << "\n";
  for (std::size_t a = 0; a < m.size; ++a) {
    out << names.at(a);
    for (std::size_t b = 0; b < m.size; ++b) out << ',' << format_real(m.at(a, b));
    out << "\n";
  }
  return out.str();
}

/// node,<signature columns...>
inline std::string features_csv(const FeatureMatrix& fm, const std::vector<std::string>& ids) {
  std::ostringstream out;
  out << "node";
  for (const auto& c : fm.columns) out << ",\"" << c << '"';
  out << "\n";
  for (std::size_t r = 0; r < fm.rows; ++r) {
    out << ids.at(r);
    for (std::size_t c = 0; c < fm.columns.size(); ++c) out << ',' << static_cast<std::uint64_t>(fm.at(r, c));
    out << "\n";
  }
  return out.str();
}

inline std::string pca_csv(const PcaResult& pca, const std::vector<std::string>& ids,
                           const std::vector<std::string>& node_labels) {
  std::ostringstream out;
  out << "node,label,pc1,pc2\n";
  for (std::size_t r = 0; r < pca.coordinates.size(); ++r)
    out << ids.at(r) << ',' << node_labels.at(r) << ',' << format_real(pca.coordinates[r][0]) << ','
        << format_real(pca.coordinates[r][1]) << "\n";
  return out.str();
}

/// node,label for static labels; node,split,label per split otherwise.
inline std::string partition_csv(const LabelAssignment& labels, const std::vector<std::string>& ids) {
  std::ostringstream out;
  const auto& names = labels.names();
  if (labels.is_static()) {
    out << "node,label\n";
    const auto l = labels.static_labels();
    for (std::size_t v = 0; v < l.size(); ++v) out << ids.at(v) << ',' << names.at(l[v]) << "\n";
  } else {
    out << "node,split,label\n";
    for (std::size_t s = 0; s < labels.split_count(); ++s) {
      const auto l = labels.for_split(s);
      for (std::size_t v = 0; v < l.size(); ++v) out << ids.at(v) << ',' << s << ',' << names.at(l[v]) << "\n";
    }
  }
  return out.str();
}

}  // namespace letn
