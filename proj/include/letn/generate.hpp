#pragma once

// Layer-by-layer surrogate generation. Each step samples, for every node,
// an extension of its current masked neighborhood, turns it into connection
// requests, and reconciles the requests into one simple snapshot:
//
//   1. reciprocal requests become edges;
//   2. floor(m/2) of the m one-sided requests, chosen uniformly, become edges;
//   3. new-neighbor stubs are paired within label-compatible buckets.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "letn/core.hpp"
#include "letn/dictionary.hpp"
#include "letn/parallel.hpp"
#include "letn/random.hpp"
#include "letn/signature.hpp"

namespace letn {

enum class Mode { letn, etn, cletn, dletn };

inline std::string to_string(Mode m) {
  switch (m) {
    case Mode::letn: return "letn";
    case Mode::etn: return "etn";
    case Mode::cletn: return "cletn";
    case Mode::dletn: return "dletn";
  }
  return "?";
}

inline Mode mode_from_string(const std::string& s) {
  if (s == "letn") return Mode::letn;
  if (s == "etn") return Mode::etn;
  if (s == "cletn") return Mode::cletn;
  if (s == "dletn") return Mode::dletn;
  throw UsageError("unknown mode '" + s + "' (expected letn, etn, cletn or dletn)");
}

struct GenConfig {
  std::size_t k = 2;
  Seconds gap = 300;
  std::size_t target_length = 0;
  Mode mode = Mode::letn;
  std::vector<Snapshot> seed_layers;  // k-1 layers
  Seconds start_time = 0;             // time of the first seed layer
  SplitConfig split;
  std::uint64_t seed = 0;
  std::size_t surrogate_count = 10;
  std::size_t threads = 1;
  /// When set, one-sided requests rejected by rule 2 become stubs for the
  /// requested neighbor's label instead of being dropped.
  bool rejected_requests_become_stubs = false;
};

struct RequestSet {
  std::vector<std::vector<NodeId>> kept;                         // ego -> requested current neighbors
  std::vector<std::map<LabelIndex, std::uint32_t>> stubs;        // ego -> label -> new ties wanted

  explicit RequestSet(std::size_t nodes = 0) : kept(nodes), stubs(nodes) {}
  std::size_t node_count() const { return kept.size(); }
};

struct GenerationStats {
  std::uint64_t lookups = 0;
  std::uint64_t fallbacks = 0;
  std::uint64_t reciprocal_edges = 0;
  std::uint64_t one_sided_requests = 0;
  std::uint64_t one_sided_accepted = 0;
  std::uint64_t stubs_requested = 0;
  std::uint64_t stub_edges = 0;
  std::uint64_t stubs_discarded = 0;

  GenerationStats& operator+=(const GenerationStats& o) {
    lookups += o.lookups;
    fallbacks += o.fallbacks;
    reciprocal_edges += o.reciprocal_edges;
    one_sided_requests += o.one_sided_requests;
    one_sided_accepted += o.one_sided_accepted;
    stubs_requested += o.stubs_requested;
    stub_edges += o.stub_edges;
    stubs_discarded += o.stubs_discarded;
    return *this;
  }
};

/// Samples each node's desired connections for the snapshot at `target_time`
/// from the masked neighborhood over the last k-1 layers of `history`
/// (layers [first, first+k-1)).
inline RequestSet propose_layer(const AdjacencyIndex& history, std::size_t first, Seconds target_time,
                                const ExtensionTable& table, const LabelAssignment& labels, Rng& rng,
                                GenerationStats* stats = nullptr) {
  const auto& meta = table.meta();
  const std::size_t slots = meta.k - 1;
  if (first + slots > history.length()) throw UsageError("history shorter than k-1 layers");
  const std::size_t split = local_split_of(target_time, meta.split);
  const auto view = labels.for_split(split);
  const NodeEncoding enc = build_encoding(labels.label_count(labels.is_static() ? 0 : split));
  const std::size_t n = labels.node_count();

  RequestSet req(n);
  std::vector<std::pair<std::string, NodeId>> entries;
  std::string key;
  for (NodeId ego = 0; ego < n; ++ego) {
    entries.clear();
    for (const auto& p : window_presence(history, ego, first, slots))
      entries.emplace_back(presence_string(p.mask, slots, enc.code(view[p.node])) + kWildcard, p.node);
    std::sort(entries.begin(), entries.end());
    key = enc.code(view[ego]);
    for (const auto& [s, node] : entries) {
      key += '|';
      key += s;
    }
    auto sample = sample_extension(table, split, key, rng);
    if (stats) {
      ++stats->lookups;
      if (sample.fallback) ++stats->fallbacks;
    }
    if (sample.fallback) continue;
    const Extension& ext = sample.extension;
    if (ext.slots.size() != entries.size()) throw InvariantError("sampled extension does not match its key");
    // Neighbors sharing a masked string are interchangeable; hand out their
    // slots in random order.
    std::vector<NodeId> group;
    for (std::size_t a = 0; a < entries.size();) {
      std::size_t b = a;
      group.clear();
      while (b < entries.size() && entries[b].first == entries[a].first) group.push_back(entries[b++].second);
      if (group.size() > 1) shuffle(group, rng);
      for (std::size_t i = 0; i < group.size(); ++i)
        if (ext.slots[a + i].find('1') != std::string::npos) req.kept[ego].push_back(group[i]);
      a = b;
    }
    std::sort(req.kept[ego].begin(), req.kept[ego].end());
    req.stubs[ego] = ext.new_neighbors;
  }
  return req;
}

namespace detail {

struct EdgeSet {
  std::size_t n;
  std::unordered_set<std::uint64_t> set;
  static std::uint64_t code(std::size_t n, NodeId a, NodeId b) {
    const Edge e(a, b);
    return static_cast<std::uint64_t>(e.u) * n + e.v;
  }
  bool contains(NodeId a, NodeId b) const { return set.count(code(n, a, b)) != 0; }
  bool insert(NodeId a, NodeId b) { return set.insert(code(n, a, b)).second; }
};

}  // namespace detail

/// Reconciles requests into one simple undirected snapshot.
inline Snapshot validate_layer(const RequestSet& requests, std::span<const LabelIndex> labels, Rng& rng,
                               GenerationStats* stats = nullptr, bool rejected_requests_become_stubs = false) {
  const std::size_t n = requests.node_count();
  if (labels.size() != n) throw UsageError("labels do not cover the request set");
  Snapshot out;
  detail::EdgeSet edges{n, {}};

  auto wants = [&](NodeId a, NodeId b) {
    const auto& v = requests.kept[a];
    return std::binary_search(v.begin(), v.end(), b);
  };

  std::vector<std::pair<NodeId, NodeId>> one_sided;
  std::uint64_t reciprocal = 0;
  for (NodeId u = 0; u < n; ++u)
    for (NodeId v : requests.kept[u]) {
      if (v == u || v >= n) throw InvariantError("malformed request " + std::to_string(u) + "->" + std::to_string(v));
      if (wants(v, u)) {
        if (u < v && edges.insert(u, v)) {
          out.edges.emplace_back(u, v);
          ++reciprocal;
        }
      } else {
        one_sided.emplace_back(u, v);
      }
    }

  shuffle(one_sided, rng);
  const std::size_t accepted = one_sided.size() / 2;
  for (std::size_t i = 0; i < accepted; ++i) {
    const auto [u, v] = one_sided[i];
    if (edges.insert(u, v)) out.edges.emplace_back(u, v);
  }

  // Buckets of stub owners keyed by (owner label, wanted label).
  std::map<std::pair<LabelIndex, LabelIndex>, std::vector<NodeId>> buckets;
  std::uint64_t stub_total = 0;
  for (NodeId u = 0; u < n; ++u)
    for (const auto& [label, count] : requests.stubs[u]) {
      auto& b = buckets[{labels[u], label}];
      b.insert(b.end(), count, u);
      stub_total += count;
    }
  if (rejected_requests_become_stubs)
    for (std::size_t i = accepted; i < one_sided.size(); ++i) {
      const auto [u, v] = one_sided[i];
      buckets[{labels[u], labels[v]}].push_back(u);
      ++stub_total;
    }

  std::uint64_t stub_edges = 0;
  for (auto& [pair, owners] : buckets) {
    const auto [a, b] = pair;
    if (a > b) continue;
    if (a == b) {
      shuffle(owners, rng);
      std::vector<bool> used(owners.size(), false);
      for (std::size_t i = 0; i < owners.size(); ++i) {
        if (used[i]) continue;
        for (std::size_t j = i + 1; j < owners.size(); ++j) {
          if (used[j] || owners[j] == owners[i] || edges.contains(owners[i], owners[j])) continue;
          used[i] = used[j] = true;
          edges.insert(owners[i], owners[j]);
          out.edges.emplace_back(owners[i], owners[j]);
          ++stub_edges;
          break;
        }
      }
    } else {
      auto it = buckets.find({b, a});
      if (it == buckets.end()) continue;
      auto& partners = it->second;
      shuffle(owners, rng);
      shuffle(partners, rng);
      std::vector<bool> used(partners.size(), false);
      for (NodeId x : owners)
        for (std::size_t j = 0; j < partners.size(); ++j) {
          if (used[j] || partners[j] == x || edges.contains(x, partners[j])) continue;
          used[j] = true;
          edges.insert(x, partners[j]);
          out.edges.emplace_back(x, partners[j]);
          ++stub_edges;
          break;
        }
    }
  }

  if (stats) {
    stats->reciprocal_edges += reciprocal;
    stats->one_sided_requests += one_sided.size();
    stats->one_sided_accepted += accepted;
    stats->stubs_requested += stub_total;
    stats->stub_edges += stub_edges;
    stats->stubs_discarded += stub_total - 2 * stub_edges;
  }
  out.canonicalize();
  return out;
}

inline void check_generation_inputs(const ExtensionTable& table, const LabelAssignment& labels, const GenConfig& cfg) {
  const auto& meta = table.meta();
  auto mismatch = [](const std::string& what) { throw UsageError("seed/table dimension mismatch: " + what); };
  if (meta.k != cfg.k) mismatch("table k=" + std::to_string(meta.k) + " but k=" + std::to_string(cfg.k));
  if (meta.gap != cfg.gap) mismatch("table gap=" + std::to_string(meta.gap) + " but gap=" + std::to_string(cfg.gap));
  if (cfg.seed_layers.size() + 1 != cfg.k) mismatch("expected k-1 seed layers");
  if (cfg.target_length + 1 < cfg.k) mismatch("target length shorter than the seeds");
  if (meta.label_counts.size() != meta.split.split_count()) mismatch("table split count");
  for (std::size_t s = 0; s < meta.label_counts.size(); ++s)
    if (meta.label_counts[s] != labels.label_count(labels.is_static() ? 0 : s))
      mismatch("label count differs from table in split " + std::to_string(s));
  if (!labels.is_static() && labels.split_count() != meta.split.split_count()) mismatch("per-split label count");
  const std::size_t n = labels.node_count();
  for (const auto& s : cfg.seed_layers)
    for (const auto& e : s.edges)
      if (e.v >= n || e.u == e.v) mismatch("seed edge references an unknown node");
}

/// Grows a surrogate from the seed layers until `target_length` snapshots.
inline TemporalNetwork generate_surrogate(const ExtensionTable& table, const LabelAssignment& labels,
                                          const GenConfig& cfg, Rng& rng, GenerationStats* stats = nullptr) {
  check_generation_inputs(table, labels, cfg);
  const std::size_t n = labels.node_count();
  const std::size_t length = std::max(cfg.target_length, cfg.k - 1);
  TemporalNetwork net = TemporalNetwork::empty(n, length, cfg.gap, cfg.start_time);
  AdjacencyIndex adj;
  adj.set_node_count(n);
  for (std::size_t t = 0; t + 1 < cfg.k; ++t) {
    net.snapshots[t].edges = cfg.seed_layers[t].edges;
    net.snapshots[t].canonicalize();
    adj.push_back(net.snapshots[t]);
  }
  for (std::size_t t = cfg.k - 1; t < length; ++t) {
    const Seconds time = net.snapshots[t].time_start;
    const auto requests = propose_layer(adj, t - (cfg.k - 1), time, table, labels, rng, stats);
    const auto view = labels.for_split(local_split_of(time, table.meta().split));
    Snapshot layer = validate_layer(requests, view, rng, stats, cfg.rejected_requests_become_stubs);
    net.snapshots[t].edges = std::move(layer.edges);
    adj.push_back(net.snapshots[t]);
  }
  return net;
}

/// Surrogate i uses the child seed (master_seed, "surrogate", i).
inline std::vector<TemporalNetwork> generate_batch(const ExtensionTable& table, const LabelAssignment& labels,
                                                   const GenConfig& cfg, std::uint64_t master_seed,
                                                   std::vector<GenerationStats>* stats = nullptr) {
  if (cfg.surrogate_count == 0) throw UsageError("surrogate count must be at least 1");
  check_generation_inputs(table, labels, cfg);
  std::vector<TemporalNetwork> out(cfg.surrogate_count);
  std::vector<GenerationStats> local(cfg.surrogate_count);
  parallel_for(cfg.surrogate_count, cfg.threads, [&](std::size_t i) {
    Rng rng = make_rng(master_seed, "surrogate", i);
    out[i] = generate_surrogate(table, labels, cfg, rng, &local[i]);
  });
  if (stats) *stats = std::move(local);
  return out;
}

/// Seed layers taken from the first k-1 snapshots of `network`.
inline std::vector<Snapshot> seeds_from(const TemporalNetwork& network, std::size_t k) {
  if (network.length() + 1 < k) throw UsageError("network shorter than k-1 snapshots");
  return {network.snapshots.begin(), network.snapshots.begin() + static_cast<std::ptrdiff_t>(k - 1)};
}

struct RescaledPopulation {
  LabelAssignment labels;
  std::vector<Snapshot> seeds;
  std::vector<NodeId> origin;  // new node -> original node it inherits seed edges from, or UINT32_MAX
};

/// Resizes a statically labeled population to `node_count`: labels are
/// apportioned by largest remainder over the original label shares, and
/// seed layers are carried over through a random label-preserving pairing
/// of original and new nodes.
inline RescaledPopulation rescale_population(const LabelAssignment& labels, const std::vector<Snapshot>& seeds,
                                             std::size_t node_count, Rng& rng) {
  if (!labels.is_static()) throw UsageError("population rescaling requires static labels");
  if (node_count == 0) throw UsageError("node count must be positive");
  const auto orig = labels.static_labels();
  const std::size_t L = labels.label_count();
  const std::size_t n0 = orig.size();

  std::vector<std::vector<NodeId>> by_label(L);
  for (NodeId v = 0; v < n0; ++v) by_label[orig[v]].push_back(v);

  std::vector<std::size_t> quota(L);
  std::vector<std::pair<double, std::size_t>> remainders;
  std::size_t assigned = 0;
  for (std::size_t l = 0; l < L; ++l) {
    const double exact = static_cast<double>(by_label[l].size()) * static_cast<double>(node_count) / static_cast<double>(n0);
    quota[l] = static_cast<std::size_t>(exact);
    assigned += quota[l];
    remainders.push_back({exact - static_cast<double>(quota[l]), l});
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t i = 0; assigned < node_count; ++i, ++assigned) ++quota[remainders[i % L].second];

  RescaledPopulation out;
  std::vector<LabelIndex> new_labels;
  std::vector<std::vector<NodeId>> new_by_label(L);
  for (std::size_t l = 0; l < L; ++l)
    for (std::size_t i = 0; i < quota[l]; ++i) {
      new_by_label[l].push_back(static_cast<NodeId>(new_labels.size()));
      new_labels.push_back(static_cast<LabelIndex>(l));
    }
  // Labels that received no nodes would break contiguity; drop them.
  std::vector<LabelIndex> remap(L, 0);
  std::vector<std::string> names;
  for (std::size_t l = 0, next = 0; l < L; ++l)
    if (quota[l] > 0) {
      remap[l] = static_cast<LabelIndex>(next++);
      names.push_back(labels.names()[l]);
    }
  for (auto& l : new_labels) l = remap[l];
  out.labels = LabelAssignment::make_static(std::move(new_labels), std::move(names));

  std::vector<NodeId> image(n0, UINT32_MAX);
  out.origin.assign(node_count, UINT32_MAX);
  for (std::size_t l = 0; l < L; ++l) {
    auto a = by_label[l];
    auto b = new_by_label[l];
    shuffle(a, rng);
    shuffle(b, rng);
    for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) {
      image[a[i]] = b[i];
      out.origin[b[i]] = a[i];
    }
  }
  for (const auto& s : seeds) {
    Snapshot ns;
    ns.index = s.index;
    ns.time_start = s.time_start;
    for (const auto& e : s.edges)
      if (image[e.u] != UINT32_MAX && image[e.v] != UINT32_MAX) ns.edges.emplace_back(image[e.u], image[e.v]);
    ns.canonicalize();
    out.seeds.push_back(std::move(ns));
  }
  return out;
}

}  // namespace letn
