#pragma once

// Louvain community detection and the two community-derived labelings:
// one partition of the fully aggregated network, or one partition per
// local split.

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "letn/core.hpp"
#include "letn/random.hpp"

namespace letn {

struct Partition {
  std::vector<std::size_t> community;  // node -> community index
  std::size_t community_count = 0;

  friend bool operator==(const Partition&, const Partition&) = default;
};

struct LouvainResult {
  Partition partition;
  /// Modularity after each aggregation level, accumulated from the
  /// optimizer's own community totals.
  std::vector<double> level_modularity;
  double modularity = 0.0;
};

namespace detail {

struct LevelGraph {
  std::vector<std::vector<std::pair<std::size_t, double>>> adj;  // no self entries, sorted by neighbor
  std::vector<double> self_loop;                                  // internal weight, each edge once
  std::vector<double> degree;                                     // 2*self_loop + sum of adj weights

  std::size_t size() const { return adj.size(); }
};

inline LevelGraph level_from(const WeightedStaticGraph& g) {
  LevelGraph lg;
  lg.adj.resize(g.node_count);
  lg.self_loop.assign(g.node_count, 0.0);
  lg.degree.assign(g.node_count, 0.0);
  for (const auto& we : g.edges) {
    if (we.weight <= 0.0) throw UsageError("louvain requires positive edge weights");
    lg.adj[we.edge.u].push_back({we.edge.v, we.weight});
    lg.adj[we.edge.v].push_back({we.edge.u, we.weight});
    lg.degree[we.edge.u] += we.weight;
    lg.degree[we.edge.v] += we.weight;
  }
  for (auto& a : lg.adj) std::sort(a.begin(), a.end());
  return lg;
}

/// Renumbers `comm` to 0..C-1 by first appearance; returns C.
inline std::size_t compact(std::vector<std::size_t>& comm) {
  std::vector<std::size_t> remap(comm.size(), SIZE_MAX);
  std::size_t next = 0;
  for (auto& c : comm) {
    if (remap[c] == SIZE_MAX) remap[c] = next++;
    c = remap[c];
  }
  return next;
}

inline LevelGraph collapse(const LevelGraph& g, const std::vector<std::size_t>& comm, std::size_t count) {
  LevelGraph out;
  out.adj.resize(count);
  out.self_loop.assign(count, 0.0);
  out.degree.assign(count, 0.0);
  std::vector<std::map<std::size_t, double>> acc(count);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto ci = comm[i];
    out.self_loop[ci] += g.self_loop[i];
    out.degree[ci] += g.degree[i];
    for (const auto& [j, w] : g.adj[i]) {
      const auto cj = comm[j];
      if (ci == cj) {
        if (i < j) out.self_loop[ci] += w;
      } else {
        acc[ci][cj] += w;
      }
    }
  }
  for (std::size_t c = 0; c < count; ++c)
    for (const auto& [d, w] : acc[c]) out.adj[c].push_back({d, w});
  return out;
}

}  // namespace detail

/// Multi-level Louvain optimisation of weighted modularity. Node visit
/// order within each sweep is shuffled by `rng`.
inline LouvainResult louvain_detailed(const WeightedStaticGraph& graph, Rng& rng, double resolution = 1.0) {
  LouvainResult result;
  const std::size_t n = graph.node_count;
  std::vector<std::size_t> membership(n);
  std::iota(membership.begin(), membership.end(), 0);

  detail::LevelGraph g = detail::level_from(graph);
  const double m = graph.total_weight();
  if (m <= 0.0) {
    result.partition = {membership, n};
    return result;
  }
  const double m2 = 2.0 * m;

  auto level_q = [&](const detail::LevelGraph& lg, const std::vector<std::size_t>& comm, std::size_t count) {
    std::vector<double> in(count, 0.0), tot(count, 0.0);
    for (std::size_t i = 0; i < lg.size(); ++i) {
      in[comm[i]] += lg.self_loop[i];
      tot[comm[i]] += lg.degree[i];
      for (const auto& [j, w] : lg.adj[i])
        if (i < j && comm[i] == comm[j]) in[comm[i]] += w;
    }
    double q = 0.0;
    for (std::size_t c = 0; c < count; ++c) q += in[c] / m - resolution * (tot[c] / m2) * (tot[c] / m2);
    return q;
  };

  for (;;) {
    const std::size_t size = g.size();
    std::vector<std::size_t> comm(size);
    std::iota(comm.begin(), comm.end(), 0);
    std::vector<double> tot = g.degree;
    std::vector<double> link(size, 0.0);
    std::vector<std::size_t> touched;
    std::vector<std::size_t> order(size);
    std::iota(order.begin(), order.end(), 0);

    bool moved_any = false;
    for (bool improved = true; improved;) {
      improved = false;
      shuffle(order, rng);
      for (std::size_t i : order) {
        const std::size_t home = comm[i];
        const double ki = g.degree[i];
        touched.clear();
        for (const auto& [j, w] : g.adj[i]) {
          const auto c = comm[j];
          if (link[c] == 0.0) touched.push_back(c);
          link[c] += w;
        }
        tot[home] -= ki;
        std::size_t best = home;
        double best_gain = link[home] - resolution * tot[home] * ki / m2;
        for (auto c : touched) {
          const double gain = link[c] - resolution * tot[c] * ki / m2;
          if (gain > best_gain + 1e-14) {
            best_gain = gain;
            best = c;
          }
        }
        tot[best] += ki;
        comm[i] = best;
        for (auto c : touched) link[c] = 0.0;
        link[home] = 0.0;
        if (best != home) {
          improved = true;
          moved_any = true;
        }
      }
    }
    if (!moved_any) break;
    const std::size_t count = detail::compact(comm);
    for (auto& c : membership) c = comm[c];
    result.level_modularity.push_back(level_q(g, comm, count));
    g = detail::collapse(g, comm, count);
    if (count == size) break;
  }

  std::vector<std::size_t> top(g.size());
  std::iota(top.begin(), top.end(), 0);
  result.modularity = level_q(g, top, g.size());
  result.partition.community = membership;
  result.partition.community_count = detail::compact(result.partition.community);
  return result;
}

inline Partition louvain(const WeightedStaticGraph& graph, Rng& rng, double resolution = 1.0) {
  return louvain_detailed(graph, rng, resolution).partition;
}

/// Turns a partition into labels: communities ordered by descending size
/// (ties by smallest member), nodes without edges merged into one trailing
/// "isolated" label.
inline std::vector<LabelIndex> labels_from_partition(const Partition& p, const WeightedStaticGraph& graph,
                                                     std::vector<std::string>* names = nullptr) {
  const std::size_t n = p.community.size();
  std::vector<bool> active(n, false);
  for (const auto& we : graph.edges) active[we.edge.u] = active[we.edge.v] = true;

  struct Group {
    std::size_t size = 0;
    std::size_t min_node = SIZE_MAX;
    std::size_t id = 0;
  };
  std::vector<Group> groups(p.community_count);
  for (std::size_t c = 0; c < groups.size(); ++c) groups[c].id = c;
  bool any_isolated = false;
  for (std::size_t v = 0; v < n; ++v) {
    if (!active[v]) {
      any_isolated = true;
      continue;
    }
    auto& g = groups[p.community[v]];
    ++g.size;
    g.min_node = std::min(g.min_node, v);
  }
  std::vector<Group> real;
  for (const auto& g : groups)
    if (g.size > 0) real.push_back(g);
  std::sort(real.begin(), real.end(), [](const Group& a, const Group& b) {
    return a.size != b.size ? a.size > b.size : a.min_node < b.min_node;
  });
  std::vector<LabelIndex> rank(p.community_count, 0);
  for (std::size_t r = 0; r < real.size(); ++r) rank[real[r].id] = static_cast<LabelIndex>(r);
  const auto isolated = static_cast<LabelIndex>(real.size());

  std::vector<LabelIndex> labels(n);
  for (std::size_t v = 0; v < n; ++v) labels[v] = active[v] ? rank[p.community[v]] : isolated;
  if (names) {
    names->clear();
    for (std::size_t r = 0; r < real.size(); ++r) names->push_back("C" + std::to_string(r));
    if (any_isolated) names->push_back("isolated");
  }
  return labels;
}

/// Labels from one Louvain partition of the whole aggregated network.
inline LabelAssignment cletn_labels(const TemporalNetwork& network, Rng& rng, double resolution = 1.0) {
  const auto graph = aggregate(network);
  const auto part = louvain(graph, rng, resolution);
  std::vector<std::string> names;
  auto labels = labels_from_partition(part, graph, &names);
  return LabelAssignment::make_static(std::move(labels), std::move(names));
}

/// Labels from one Louvain partition per local split, each split aggregating
/// its snapshots across all global splits. Split s uses the child seed
/// (seed, "dletn", s).
inline LabelAssignment dletn_labels(const TemporalNetwork& network, const SplitConfig& cfg, std::uint64_t seed,
                                    double resolution = 1.0) {
  const std::size_t splits = cfg.split_count();
  std::vector<std::vector<std::size_t>> members(splits);
  for (std::size_t t = 0; t < network.length(); ++t)
    members[local_split_of(network.snapshots[t].time_start, cfg)].push_back(t);

  std::vector<std::vector<LabelIndex>> per_split;
  std::vector<std::string> names;
  for (std::size_t s = 0; s < splits; ++s) {
    const auto graph = aggregate_where(network, members[s]);
    Rng rng = make_rng(seed, "dletn", s);
    const auto part = louvain(graph, rng, resolution);
    std::vector<std::string> split_names;
    per_split.push_back(labels_from_partition(part, graph, &split_names));
    if (split_names.size() > names.size()) names = split_names;
  }
  // Name list covers the widest split; "isolated" is only meaningful per split.
  for (std::size_t i = 0; i < names.size(); ++i) names[i] = "C" + std::to_string(i);
  return LabelAssignment::make_per_split(std::move(per_split), std::move(names));
}

}  // namespace letn
