#pragma once

// Shared domain types for labeled temporal networks: snapshots, label
// assignments, split bookkeeping and static aggregation.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace letn {

using NodeId = std::uint32_t;
using LabelIndex = std::uint32_t;
using Seconds = std::int64_t;

// Error hierarchy. The CLI maps these onto exit codes 1/2/3.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct UsageError : Error {
  using Error::Error;
};
struct DataError : Error {
  using Error::Error;
};
struct InvariantError : Error {
  using Error::Error;
};

/// Floor division that rounds toward negative infinity.
inline constexpr std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

inline constexpr std::int64_t floor_mod(std::int64_t a, std::int64_t b) {
  return a - floor_div(a, b) * b;
}

/// Undirected edge stored canonically (u < v).
struct Edge {
  NodeId u = 0;
  NodeId v = 0;

  Edge() = default;
  Edge(NodeId a, NodeId b) : u(std::min(a, b)), v(std::max(a, b)) {}

  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// One layer of the temporal network.
struct Snapshot {
  std::size_t index = 0;
  Seconds time_start = 0;
  std::vector<Edge> edges;  // sorted, unique, no self-loops

  bool empty() const { return edges.empty(); }

  /// Sorts and deduplicates; throws on self-loops.
  void canonicalize() {
    for (const auto& e : edges)
      if (e.u == e.v) throw InvariantError("snapshot contains a self-loop on node " + std::to_string(e.u));
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  }

  bool contains(const Edge& e) const { return std::binary_search(edges.begin(), edges.end(), e); }

  friend bool operator==(const Snapshot&, const Snapshot&) = default;
};

struct TemporalNetwork {
  std::vector<Snapshot> snapshots;
  std::size_t node_count = 0;
  Seconds gap = 300;

  std::size_t length() const { return snapshots.size(); }
  Seconds start_time() const { return snapshots.empty() ? 0 : snapshots.front().time_start; }

  /// Builds an empty network of `length` snapshots starting at `start`.
  static TemporalNetwork empty(std::size_t nodes, std::size_t length, Seconds gap, Seconds start) {
    TemporalNetwork n;
    n.node_count = nodes;
    n.gap = gap;
    n.snapshots.resize(length);
    for (std::size_t t = 0; t < length; ++t) {
      n.snapshots[t].index = t;
      n.snapshots[t].time_start = start + static_cast<Seconds>(t) * gap;
    }
    return n;
  }

  /// Throws InvariantError when indices are not consecutive or endpoints are out of range.
  void validate() const {
    for (std::size_t t = 0; t < snapshots.size(); ++t) {
      const auto& s = snapshots[t];
      if (s.index != t) throw InvariantError("snapshot indices are not consecutive at " + std::to_string(t));
      for (std::size_t i = 0; i < s.edges.size(); ++i) {
        const auto& e = s.edges[i];
        if (e.u >= e.v) throw InvariantError("non-canonical edge or self-loop in snapshot " + std::to_string(t));
        if (e.v >= node_count) throw InvariantError("edge endpoint out of range in snapshot " + std::to_string(t));
        if (i > 0 && !(s.edges[i - 1] < e)) throw InvariantError("unsorted or duplicate edges in snapshot " + std::to_string(t));
      }
    }
  }

  std::size_t interaction_count() const {
    std::size_t n = 0;
    for (const auto& s : snapshots) n += s.edges.size();
    return n;
  }

  friend bool operator==(const TemporalNetwork&, const TemporalNetwork&) = default;
};

/// Periodic partition of time: local splits (e.g. hours) repeating over
/// global splits (e.g. days).
struct SplitConfig {
  Seconds local_split = 3600;
  Seconds global_split = 86400;
  Seconds origin = 0;

  std::size_t split_count() const { return static_cast<std::size_t>(global_split / local_split); }

  void validate(Seconds gap) const {
    if (local_split <= 0 || global_split <= 0) throw UsageError("split lengths must be positive");
    if (global_split % local_split != 0) throw UsageError("global split must be a multiple of the local split");
    if (gap <= 0) throw UsageError("gap must be positive");
    if (local_split % gap != 0) throw UsageError("local split must be a multiple of the gap");
  }

  /// Default origin: `first_event` floored to a global split boundary.
  static Seconds default_origin(Seconds first_event, Seconds global_split) {
    return floor_div(first_event, global_split) * global_split;
  }

  friend bool operator==(const SplitConfig&, const SplitConfig&) = default;
};

inline std::size_t local_split_of(Seconds time, const SplitConfig& cfg) {
  return static_cast<std::size_t>(floor_mod(time - cfg.origin, cfg.global_split) / cfg.local_split);
}

/// Node labels, either one static vector or one vector per local split.
class LabelAssignment {
 public:
  enum class Mode { static_labels, per_split };

  LabelAssignment() = default;

  static LabelAssignment make_static(std::vector<LabelIndex> labels, std::vector<std::string> names) {
    LabelAssignment a;
    a.mode_ = Mode::static_labels;
    a.static_ = std::move(labels);
    a.names_ = std::move(names);
    a.check();
    return a;
  }

  static LabelAssignment make_per_split(std::vector<std::vector<LabelIndex>> per_split, std::vector<std::string> names) {
    LabelAssignment a;
    a.mode_ = Mode::per_split;
    a.split_ = std::move(per_split);
    a.names_ = std::move(names);
    a.check();
    return a;
  }

  /// Every node gets label 0; the unlabeled (ETN) case.
  static LabelAssignment single(std::size_t node_count, std::string name = "all") {
    return make_static(std::vector<LabelIndex>(node_count, 0), {std::move(name)});
  }

  Mode mode() const { return mode_; }
  bool is_static() const { return mode_ == Mode::static_labels; }

  std::size_t node_count() const {
    if (is_static()) return static_.size();
    return split_.empty() ? 0 : split_.front().size();
  }

  std::size_t split_count() const { return is_static() ? 0 : split_.size(); }

  /// Labels in effect for local split `split` (ignored in static mode).
  std::span<const LabelIndex> for_split(std::size_t split) const {
    if (is_static()) return static_;
    if (split >= split_.size()) throw InvariantError("label assignment has no split " + std::to_string(split));
    return split_[split];
  }

  std::span<const LabelIndex> static_labels() const {
    if (!is_static()) throw InvariantError("static labels requested from a per-split assignment");
    return static_;
  }

  std::size_t label_count(std::size_t split = 0) const { return counts_.empty() ? 0 : counts_[is_static() ? 0 : split]; }

  std::size_t max_label_count() const {
    std::size_t m = 0;
    for (auto c : counts_) m = std::max(m, c);
    return m;
  }

  const std::vector<std::string>& names() const { return names_; }

  friend bool operator==(const LabelAssignment& a, const LabelAssignment& b) {
    return a.mode_ == b.mode_ && a.static_ == b.static_ && a.split_ == b.split_ && a.names_ == b.names_;
  }

 private:
  void check() {
    counts_.clear();
    auto count_of = [](const std::vector<LabelIndex>& v) {
      std::vector<bool> seen;
      for (auto l : v) {
        if (l >= seen.size()) seen.resize(l + 1, false);
        seen[l] = true;
      }
      for (std::size_t i = 0; i < seen.size(); ++i)
        if (!seen[i]) throw InvariantError("label indices are not contiguous: missing " + std::to_string(i));
      return seen.size();
    };
    if (is_static()) {
      counts_.push_back(count_of(static_));
    } else {
      for (const auto& v : split_) {
        if (v.size() != split_.front().size()) throw InvariantError("per-split labels cover different node sets");
        counts_.push_back(count_of(v));
      }
    }
    if (names_.size() < max_label_count()) throw InvariantError("fewer label names than labels");
  }

  Mode mode_ = Mode::static_labels;
  std::vector<LabelIndex> static_;
  std::vector<std::vector<LabelIndex>> split_;
  std::vector<std::string> names_;
  std::vector<std::size_t> counts_;
};

struct WeightedEdge {
  Edge edge;
  double weight = 0.0;
  friend bool operator==(const WeightedEdge&, const WeightedEdge&) = default;
};

/// Simple undirected graph with positive edge weights, edges sorted.
struct WeightedStaticGraph {
  std::size_t node_count = 0;
  std::vector<WeightedEdge> edges;

  double total_weight() const {
    double w = 0.0;
    for (const auto& e : edges) w += e.weight;
    return w;
  }

  std::optional<double> weight(const Edge& e) const {
    auto it = std::lower_bound(edges.begin(), edges.end(), e,
                               [](const WeightedEdge& we, const Edge& x) { return we.edge < x; });
    if (it == edges.end() || it->edge != e) return std::nullopt;
    return it->weight;
  }

  friend bool operator==(const WeightedStaticGraph&, const WeightedStaticGraph&) = default;
};

/// Collapses snapshots [first, last) into one graph weighted by the number
/// of snapshots containing each edge. The whole network when no range is given.
inline WeightedStaticGraph aggregate(const TemporalNetwork& network,
                                     std::optional<std::pair<std::size_t, std::size_t>> range = std::nullopt) {
  std::size_t first = 0, last = network.length();
  if (range) {
    first = range->first;
    last = range->second;
    if (first > last || last > network.length()) throw UsageError("aggregation range out of bounds");
  }
  std::map<Edge, double> counts;
  for (std::size_t t = first; t < last; ++t)
    for (const auto& e : network.snapshots[t].edges) counts[e] += 1.0;
  WeightedStaticGraph g;
  g.node_count = network.node_count;
  g.edges.reserve(counts.size());
  for (const auto& [e, w] : counts) g.edges.push_back({e, w});
  return g;
}

/// Aggregates an arbitrary subset of snapshot indices.
inline WeightedStaticGraph aggregate_where(const TemporalNetwork& network, const std::vector<std::size_t>& indices) {
  std::map<Edge, double> counts;
  for (auto t : indices)
    for (const auto& e : network.snapshots.at(t).edges) counts[e] += 1.0;
  WeightedStaticGraph g;
  g.node_count = network.node_count;
  for (const auto& [e, w] : counts) g.edges.push_back({e, w});
  return g;
}

/// Adjacency list of a single snapshot.
inline std::vector<std::vector<NodeId>> adjacency(const Snapshot& s, std::size_t node_count) {
  std::vector<std::vector<NodeId>> adj(node_count);
  for (const auto& e : s.edges) {
    adj[e.u].push_back(e.v);
    adj[e.v].push_back(e.u);
  }
  return adj;
}

}  // namespace letn
