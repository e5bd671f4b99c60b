#pragma once

// Fidelity measures for comparing an observed temporal network with its
// surrogates: per-snapshot modularity, label assortativity and clustering,
// label-pair contact and duration matrices, signature feature vectors with
// a two-component PCA, and the comparison report tying them together.

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "letn/core.hpp"
#include "letn/parallel.hpp"
#include "letn/random.hpp"
#include "letn/signature.hpp"

namespace letn {

inline std::size_t label_span_count(std::span<const LabelIndex> labels) {
  LabelIndex m = 0;
  for (auto l : labels) m = std::max(m, l);
  return labels.empty() ? 0 : static_cast<std::size_t>(m) + 1;
}

// ---- single-snapshot metrics -----------------------------------------------

/// Newman-Girvan modularity of the unweighted snapshot with communities
/// given by labels. 0 for a snapshot without edges.
inline double modularity(const Snapshot& s, std::span<const LabelIndex> labels) {
  if (s.edges.empty()) return 0.0;
  const std::size_t L = label_span_count(labels);
  std::vector<double> inside(L, 0.0), degree(L, 0.0);
  for (const auto& e : s.edges) {
    const auto a = labels[e.u], b = labels[e.v];
    if (a == b) inside[a] += 1.0;
    degree[a] += 1.0;
    degree[b] += 1.0;
  }
  const double m = static_cast<double>(s.edges.size());
  double q = 0.0;
  for (std::size_t c = 0; c < L; ++c) q += inside[c] / m - (degree[c] / (2.0 * m)) * (degree[c] / (2.0 * m));
  return q;
}

/// Weighted modularity, Q = sum_c in_c/m - resolution*(tot_c/2m)^2.
inline double modularity(const WeightedStaticGraph& g, std::span<const LabelIndex> labels, double resolution = 1.0) {
  const double m = g.total_weight();
  if (m <= 0.0) return 0.0;
  const std::size_t L = label_span_count(labels);
  std::vector<double> inside(L, 0.0), degree(L, 0.0);
  for (const auto& we : g.edges) {
    const auto a = labels[we.edge.u], b = labels[we.edge.v];
    if (a == b) inside[a] += we.weight;
    degree[a] += we.weight;
    degree[b] += we.weight;
  }
  double q = 0.0;
  for (std::size_t c = 0; c < L; ++c) q += inside[c] / m - resolution * (degree[c] / (2.0 * m)) * (degree[c] / (2.0 * m));
  return q;
}

namespace detail {

/// r = (tr e - sum a^2) / (1 - sum a^2) from a symmetric mixing matrix of
/// edge-endpoint label pairs; 0 when empty or when all mass sits on one label.
inline double assortativity_from_mixing(const std::vector<double>& mix, std::size_t L, double total) {
  if (total <= 0.0) return 0.0;
  double trace = 0.0, sum_a2 = 0.0;
  for (std::size_t i = 0; i < L; ++i) {
    trace += mix[i * L + i] / total;
    double a = 0.0;
    for (std::size_t j = 0; j < L; ++j) a += mix[i * L + j] / total;
    sum_a2 += a * a;
  }
  const double denom = 1.0 - sum_a2;
  if (denom <= 0.0) return 0.0;
  return (trace - sum_a2) / denom;
}

}  // namespace detail

inline double label_assortativity(const Snapshot& s, std::span<const LabelIndex> labels) {
  if (s.edges.empty()) return 0.0;
  const std::size_t L = label_span_count(labels);
  std::vector<double> mix(L * L, 0.0);
  for (const auto& e : s.edges) {
    const auto a = labels[e.u], b = labels[e.v];
    mix[a * L + b] += 1.0;
    mix[b * L + a] += 1.0;
  }
  return detail::assortativity_from_mixing(mix, L, 2.0 * static_cast<double>(s.edges.size()));
}

/// Assortativity of a static graph, counting each edge once unless `weighted`.
inline double label_assortativity(const WeightedStaticGraph& g, std::span<const LabelIndex> labels, bool weighted) {
  const std::size_t L = label_span_count(labels);
  std::vector<double> mix(L * L, 0.0);
  double total = 0.0;
  for (const auto& we : g.edges) {
    const double w = weighted ? we.weight : 1.0;
    const auto a = labels[we.edge.u], b = labels[we.edge.v];
    mix[a * L + b] += w;
    mix[b * L + a] += w;
    total += 2.0 * w;
  }
  return detail::assortativity_from_mixing(mix, L, total);
}

/// Mean local clustering over all `node_count` nodes; degree < 2 counts as 0.
inline double clustering_coefficient(const Snapshot& s, std::size_t node_count) {
  if (s.edges.empty() || node_count == 0) return 0.0;
  auto adj = adjacency(s, node_count);
  for (auto& a : adj) std::sort(a.begin(), a.end());
  double sum = 0.0;
  for (NodeId v = 0; v < node_count; ++v) {
    const auto& nv = adj[v];
    const std::size_t d = nv.size();
    if (d < 2) continue;
    std::size_t links = 0;
    for (std::size_t i = 0; i < d; ++i) {
      const auto& ni = adj[nv[i]];
      for (std::size_t j = i + 1; j < d; ++j)
        if (std::binary_search(ni.begin(), ni.end(), nv[j])) ++links;
    }
    sum += 2.0 * static_cast<double>(links) / (static_cast<double>(d) * static_cast<double>(d - 1));
  }
  return sum / static_cast<double>(node_count);
}

// ---- series ----------------------------------------------------------------

enum class Metric { modularity, assortativity, clustering };

inline std::string metric_name(Metric m) {
  switch (m) {
    case Metric::modularity: return "Q";
    case Metric::assortativity: return "r";
    case Metric::clustering: return "c";
  }
  return "?";
}

inline Metric metric_from_name(const std::string& s) {
  if (s == "Q" || s == "modularity") return Metric::modularity;
  if (s == "r" || s == "assortativity") return Metric::assortativity;
  if (s == "c" || s == "clustering") return Metric::clustering;
  throw UsageError("unknown metric '" + s + "' (expected Q, r or c)");
}

struct MetricSeries {
  std::string name;
  std::vector<double> values;
};

/// Labels in effect at snapshot `s`: the static labels, or those of the
/// snapshot's local split.
inline std::span<const LabelIndex> labels_at(const LabelAssignment& labels, const Snapshot& s, const SplitConfig& cfg) {
  return labels.is_static() ? labels.static_labels() : labels.for_split(local_split_of(s.time_start, cfg));
}

inline MetricSeries metric_series(const TemporalNetwork& network, const LabelAssignment& labels, Metric metric,
                                  const SplitConfig& cfg = {}) {
  MetricSeries out{metric_name(metric), std::vector<double>(network.length(), 0.0)};
  for (std::size_t t = 0; t < network.length(); ++t) {
    const auto& s = network.snapshots[t];
    switch (metric) {
      case Metric::modularity: out.values[t] = modularity(s, labels_at(labels, s, cfg)); break;
      case Metric::assortativity: out.values[t] = label_assortativity(s, labels_at(labels, s, cfg)); break;
      case Metric::clustering: out.values[t] = clustering_coefficient(s, network.node_count); break;
    }
  }
  return out;
}

inline double mean_of(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

/// Population standard deviation.
inline double stddev_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double acc = 0.0;
  for (double x : v) acc += (x - m) * (x - m);
  return std::sqrt(acc / static_cast<double>(v.size()));
}

/// Standard error of the mean (sample standard deviation over sqrt(n)).
inline double stderr_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double acc = 0.0;
  for (double x : v) acc += (x - m) * (x - m);
  return std::sqrt(acc / static_cast<double>(v.size() - 1)) / std::sqrt(static_cast<double>(v.size()));
}

inline double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw UsageError("pearson: length mismatch");
  const double ma = mean_of(a), mb = mean_of(b);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa <= 0.0 || sbb <= 0.0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

struct SeriesStats {
  double mean = 0.0;         // over all snapshots
  double std = 0.0;
  double active_mean = 0.0;  // over snapshots with at least one edge
  double active_std = 0.0;
  std::size_t snapshots = 0;
  std::size_t active_snapshots = 0;
};

inline std::vector<double> active_values(const MetricSeries& s, const TemporalNetwork& network) {
  std::vector<double> out;
  for (std::size_t t = 0; t < s.values.size(); ++t)
    if (!network.snapshots[t].empty()) out.push_back(s.values[t]);
  return out;
}

inline SeriesStats series_stats(const MetricSeries& s, const TemporalNetwork& network) {
  SeriesStats st;
  st.mean = mean_of(s.values);
  st.std = stddev_of(s.values);
  const auto active = active_values(s, network);
  st.active_mean = mean_of(active);
  st.active_std = stddev_of(active);
  st.snapshots = s.values.size();
  st.active_snapshots = active.size();
  return st;
}

inline double series_distance(const MetricSeries& a, const MetricSeries& b) {
  if (a.values.size() != b.values.size())
    throw UsageError("series length mismatch: " + std::to_string(a.values.size()) + " vs " +
                     std::to_string(b.values.size()));
  double acc = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) acc += (a.values[i] - b.values[i]) * (a.values[i] - b.values[i]);
  return std::sqrt(acc);
}

// ---- label-pair matrices ---------------------------------------------------

struct LabelPairMatrix {
  std::size_t size = 0;
  std::vector<double> data;

  LabelPairMatrix() = default;
  explicit LabelPairMatrix(std::size_t L) : size(L), data(L * L, 0.0) {}

  double& at(std::size_t a, std::size_t b) { return data[a * size + b]; }
  double at(std::size_t a, std::size_t b) const { return data[a * size + b]; }

  /// Sum over the upper triangle including the diagonal.
  double upper_sum() const {
    double s = 0.0;
    for (std::size_t a = 0; a < size; ++a)
      for (std::size_t b = a; b < size; ++b) s += at(a, b);
    return s;
  }
};

/// (a,b) = number of (edge, snapshot) occurrences joining labels a and b.
inline LabelPairMatrix contact_matrix(const TemporalNetwork& network, std::span<const LabelIndex> labels,
                                      std::size_t label_count) {
  LabelPairMatrix m(label_count);
  for (const auto& s : network.snapshots)
    for (const auto& e : s.edges) {
      const auto a = labels[e.u], b = labels[e.v];
      m.at(a, b) += 1.0;
      if (a != b) m.at(b, a) += 1.0;
    }
  return m;
}

/// Lengths of the maximal runs of consecutive snapshots containing each edge.
inline std::map<Edge, std::vector<std::size_t>> edge_runs(const TemporalNetwork& network) {
  std::map<Edge, std::vector<std::size_t>> runs;
  std::map<Edge, std::size_t> last_seen;
  for (std::size_t t = 0; t < network.length(); ++t)
    for (const auto& e : network.snapshots[t].edges) {
      auto it = last_seen.find(e);
      auto& r = runs[e];
      if (it != last_seen.end() && it->second + 1 == t)
        ++r.back();
      else
        r.push_back(1);
      last_seen[e] = t;
    }
  return runs;
}

/// (a,b) = mean run length over all runs of edges joining labels a and b.
inline LabelPairMatrix mean_duration_matrix(const TemporalNetwork& network, std::span<const LabelIndex> labels,
                                            std::size_t label_count) {
  LabelPairMatrix sum(label_count), count(label_count);
  for (const auto& [e, runs] : edge_runs(network)) {
    const auto a = labels[e.u], b = labels[e.v];
    for (auto len : runs) {
      sum.at(a, b) += static_cast<double>(len);
      count.at(a, b) += 1.0;
      if (a != b) {
        sum.at(b, a) += static_cast<double>(len);
        count.at(b, a) += 1.0;
      }
    }
  }
  LabelPairMatrix m(label_count);
  for (std::size_t i = 0; i < m.data.size(); ++i) m.data[i] = count.data[i] > 0.0 ? sum.data[i] / count.data[i] : 0.0;
  return m;
}

// ---- signature features and PCA ---------------------------------------------

enum class FeatureMode { etn, letn };

struct FeatureMatrix {
  std::vector<std::string> columns;  // canonical signature renderings, ascending
  std::size_t rows = 0;
  std::vector<double> counts;        // row-major rows x columns

  double at(std::size_t r, std::size_t c) const { return counts[r * columns.size() + c]; }
};

/// Entry (n, s) = number of windows in which node n, as ego, shows full
/// signature s. ETN mode encodes every node with the single label.
inline FeatureMatrix signature_feature_matrix(const TemporalNetwork& network, const LabelAssignment& labels,
                                              std::size_t k, FeatureMode mode, const SplitConfig& cfg = {}) {
  const std::size_t n = network.node_count;
  const LabelAssignment single = LabelAssignment::single(n);
  const LabelAssignment& used = mode == FeatureMode::etn ? single : labels;
  if (used.node_count() != n) throw UsageError("label assignment does not cover the network");
  FeatureMatrix fm;
  fm.rows = n;
  if (network.length() < k) return fm;
  check_window(network, 0, k);
  const auto encs = encodings_for(used);
  const AdjacencyIndex adj(network);
  std::vector<std::map<std::string, double>> per_node(n);
  std::map<std::string, std::size_t> column_index;
  for (std::size_t t = 0; t + k <= network.length(); ++t) {
    const std::size_t split = local_split_of(network.snapshots[t + k - 1].time_start, cfg);
    const auto view = used.for_split(split);
    const auto& enc = encoding_at(encs, split);
    for (NodeId ego = 0; ego < n; ++ego) {
      auto r = signature_from_presence(window_presence(adj, ego, t, k), ego, view, k, enc).render();
      column_index.emplace(r, 0);
      per_node[ego][r] += 1.0;
    }
  }
  std::size_t c = 0;
  for (auto& [name, idx] : column_index) {
    idx = c++;
    fm.columns.push_back(name);
  }
  fm.counts.assign(n * fm.columns.size(), 0.0);
  for (std::size_t v = 0; v < n; ++v)
    for (const auto& [name, cnt] : per_node[v]) fm.counts[v * fm.columns.size() + column_index[name]] = cnt;
  return fm;
}

struct PcaResult {
  std::vector<std::array<double, 2>> coordinates;  // one per row
  std::array<double, 2> eigenvalues{0.0, 0.0};     // of the covariance (divided by rows-1)
  std::array<std::vector<double>, 2> loadings;
};

namespace detail {

using Dense = std::vector<double>;  // square, row-major

inline Dense square_mul(const Dense& a, std::size_t p) {
  Dense out(p * p, 0.0);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t k = 0; k < p; ++k) {
      const double aik = a[i * p + k];
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < p; ++j) out[i * p + j] += aik * a[k * p + j];
    }
  return out;
}

/// Dominant eigenpair of a symmetric positive semidefinite matrix by power
/// iteration on S^(2^squarings). The returned eigenvalue is the Rayleigh
/// quotient on S itself.
inline std::pair<double, std::vector<double>> dominant_eigenpair(const Dense& s, std::size_t p, double tol,
                                                                 std::size_t max_iter = 1000000) {
  const std::size_t squarings = p <= 1024 ? 3 : 0;
  Dense m = s;
  for (std::size_t q = 0; q < squarings; ++q) {
    double scale = 0.0;
    for (double x : m) scale = std::max(scale, std::abs(x));
    if (scale == 0.0) break;
    for (double& x : m) x /= scale;
    m = square_mul(m, p);
  }
  Rng rng(0x5eed5eedULL);
  std::vector<double> x(p), y(p);
  for (auto& v : x) v = 0.5 + uniform_unit(rng);
  auto normalize = [](std::vector<double>& v) {
    double nrm = 0.0;
    for (double a : v) nrm += a * a;
    nrm = std::sqrt(nrm);
    if (nrm > 0.0)
      for (double& a : v) a /= nrm;
    return nrm;
  };
  normalize(x);
  for (std::size_t it = 0; it < max_iter; ++it) {
    for (std::size_t i = 0; i < p; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < p; ++j) acc += m[i * p + j] * x[j];
      y[i] = acc;
    }
    if (normalize(y) == 0.0) return {0.0, std::vector<double>(p, 0.0)};
    double diff = 0.0;
    for (std::size_t i = 0; i < p; ++i) diff = std::max(diff, std::abs(y[i] - x[i]));
    x.swap(y);
    if (diff < tol) break;
  }
  double lambda = 0.0;
  for (std::size_t i = 0; i < p; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < p; ++j) acc += s[i * p + j] * x[j];
    lambda += x[i] * acc;
  }
  return {lambda, x};
}

}  // namespace detail

/// Projects mean-centered rows onto the top two principal directions.
/// Works on whichever of X^T X and X X^T is smaller; each component's
/// largest-magnitude loading is made positive.
inline PcaResult pca2(std::size_t rows, std::size_t cols, const std::vector<double>& data, double tol = 1e-9) {
  if (data.size() != rows * cols) throw UsageError("pca2: data size does not match dimensions");
  if (rows < 2 || cols < 2) throw UsageError("pca2 needs at least 2 rows and 2 columns");
  std::vector<double> x = data;
  for (std::size_t c = 0; c < cols; ++c) {
    double m = 0.0;
    for (std::size_t r = 0; r < rows; ++r) m += x[r * cols + c];
    m /= static_cast<double>(rows);
    for (std::size_t r = 0; r < rows; ++r) x[r * cols + c] -= m;
  }
  const bool feature_side = cols <= rows;
  const std::size_t p = feature_side ? cols : rows;
  detail::Dense s(p * p, 0.0);
  if (feature_side) {
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t i = 0; i < cols; ++i) {
        const double xi = x[r * cols + i];
        if (xi == 0.0) continue;
        for (std::size_t j = 0; j < cols; ++j) s[i * p + j] += xi * x[r * cols + j];
      }
  } else {
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = i; j < rows; ++j) {
        double acc = 0.0;
        for (std::size_t c = 0; c < cols; ++c) acc += x[i * cols + c] * x[j * cols + c];
        s[i * p + j] = s[j * p + i] = acc;
      }
  }
  double trace = 0.0;
  for (std::size_t i = 0; i < p; ++i) trace += s[i * p + i];

  PcaResult res;
  res.coordinates.assign(rows, {0.0, 0.0});
  if (trace <= 0.0) {
    res.loadings = {std::vector<double>(cols, 0.0), std::vector<double>(cols, 0.0)};
    return res;
  }
  for (int comp = 0; comp < 2; ++comp) {
    auto [lambda, vec] = detail::dominant_eigenpair(s, p, tol);
    std::vector<double> loading(cols, 0.0), scores(rows, 0.0);
    if (lambda > 1e-12 * trace) {
      if (feature_side) {
        loading = vec;
        for (std::size_t r = 0; r < rows; ++r) {
          double acc = 0.0;
          for (std::size_t c = 0; c < cols; ++c) acc += x[r * cols + c] * loading[c];
          scores[r] = acc;
        }
      } else {
        const double sigma = std::sqrt(lambda);
        for (std::size_t c = 0; c < cols; ++c) {
          double acc = 0.0;
          for (std::size_t r = 0; r < rows; ++r) acc += x[r * cols + c] * vec[r];
          loading[c] = acc / sigma;
        }
        for (std::size_t r = 0; r < rows; ++r) scores[r] = sigma * vec[r];
      }
      std::size_t arg = 0;
      for (std::size_t c = 1; c < cols; ++c)
        if (std::abs(loading[c]) > std::abs(loading[arg]) + 1e-12) arg = c;
      if (loading[arg] < 0.0) {
        for (double& v : loading) v = -v;
        for (double& v : scores) v = -v;
      }
      for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = 0; j < p; ++j) s[i * p + j] -= lambda * vec[i] * vec[j];
    } else {
      lambda = 0.0;
    }
    for (std::size_t r = 0; r < rows; ++r) res.coordinates[r][static_cast<std::size_t>(comp)] = scores[r];
    res.eigenvalues[static_cast<std::size_t>(comp)] = lambda / static_cast<double>(rows - 1);
    res.loadings[static_cast<std::size_t>(comp)] = std::move(loading);
  }
  return res;
}

inline PcaResult pca2(const FeatureMatrix& fm) { return pca2(fm.rows, fm.columns.size(), fm.counts); }

/// Mean silhouette of labeled points under Euclidean distance. Points in
/// singleton clusters score 0.
template <std::size_t D>
double silhouette(const std::vector<std::array<double, D>>& points, std::span<const LabelIndex> labels) {
  const std::size_t n = points.size();
  if (labels.size() != n) throw UsageError("silhouette: label count mismatch");
  const std::size_t L = label_span_count(labels);
  if (L < 2 || n < 2) return 0.0;
  std::vector<std::size_t> size(L, 0);
  for (auto l : labels) ++size[l];
  double total = 0.0;
  std::vector<double> sum(L);
  for (std::size_t i = 0; i < n; ++i) {
    std::fill(sum.begin(), sum.end(), 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      double d2 = 0.0;
      for (std::size_t k = 0; k < D; ++k) d2 += (points[i][k] - points[j][k]) * (points[i][k] - points[j][k]);
      sum[labels[j]] += std::sqrt(d2);
    }
    const auto own = labels[i];
    if (size[own] < 2) continue;
    const double a = sum[own] / static_cast<double>(size[own] - 1);
    double b = std::numeric_limits<double>::infinity();
    for (std::size_t l = 0; l < L; ++l)
      if (l != own && size[l] > 0) b = std::min(b, sum[l] / static_cast<double>(size[l]));
    const double denom = std::max(a, b);
    if (denom > 0.0 && std::isfinite(b)) total += (b - a) / denom;
  }
  return total / static_cast<double>(n);
}

// ---- evaluation -------------------------------------------------------------

struct EvaluationConfig {
  SplitConfig split;
  std::vector<Metric> metrics{Metric::modularity, Metric::assortativity, Metric::clustering};
  bool matrices = true;
  std::size_t threads = 1;
};

struct MetricReport {
  std::string name;
  std::vector<MetricSeries> series;  // in EvaluationConfig::metrics order
  std::vector<SeriesStats> stats;
  std::optional<double> aggregated_q;  // weighted by occurrence counts
  std::optional<double> aggregated_r;  // each aggregated edge counted once
  std::optional<LabelPairMatrix> contacts;
  std::optional<LabelPairMatrix> durations;
  std::size_t interactions = 0;
};

inline MetricReport metric_report(const TemporalNetwork& network, const LabelAssignment& labels,
                                  const EvaluationConfig& cfg, std::string name) {
  if (labels.node_count() != network.node_count) throw DataError("labels do not cover network '" + name + "'");
  MetricReport rep;
  rep.name = std::move(name);
  rep.interactions = network.interaction_count();
  for (auto m : cfg.metrics) {
    rep.series.push_back(metric_series(network, labels, m, cfg.split));
    rep.stats.push_back(series_stats(rep.series.back(), network));
  }
  if (labels.is_static()) {
    const auto g = aggregate(network);
    rep.aggregated_q = modularity(g, labels.static_labels());
    rep.aggregated_r = label_assortativity(g, labels.static_labels(), false);
    if (cfg.matrices) {
      rep.contacts = contact_matrix(network, labels.static_labels(), labels.label_count());
      rep.durations = mean_duration_matrix(network, labels.static_labels(), labels.label_count());
    }
  }
  return rep;
}

struct MetricComparison {
  std::string metric;
  std::vector<double> distances;  // one per surrogate
  double mean_distance = 0.0;
  double stderr_distance = 0.0;
  double pooled_active_mean = 0.0;  // surrogate values pooled over active snapshots
  double pooled_active_std = 0.0;
  std::vector<double> correlations;  // Pearson correlation with the original series
};

struct ComparisonReport {
  MetricReport original;
  std::vector<MetricReport> surrogates;
  std::vector<MetricComparison> comparisons;
  std::optional<double> aggregated_q_mean, aggregated_q_std;
  std::optional<double> aggregated_r_mean, aggregated_r_std;
  std::optional<LabelPairMatrix> mean_contacts, mean_durations;
};

inline ComparisonReport evaluate(const TemporalNetwork& original, const std::vector<TemporalNetwork>& surrogates,
                                 const LabelAssignment& labels, const EvaluationConfig& cfg) {
  for (std::size_t i = 0; i < surrogates.size(); ++i)
    if (surrogates[i].node_count != original.node_count)
      throw DataError("surrogate " + std::to_string(i) + " has " + std::to_string(surrogates[i].node_count) +
                      " nodes, original has " + std::to_string(original.node_count));
  ComparisonReport rep;
  std::vector<MetricReport> all(surrogates.size() + 1);
  parallel_for(all.size(), cfg.threads, [&](std::size_t i) {
    if (i == 0)
      all[0] = metric_report(original, labels, cfg, "original");
    else
      all[i] = metric_report(surrogates[i - 1], labels, cfg, "surrogate_" + std::to_string(i - 1));
  });
  rep.original = std::move(all[0]);
  rep.surrogates.assign(std::make_move_iterator(all.begin() + 1), std::make_move_iterator(all.end()));

  for (std::size_t m = 0; m < cfg.metrics.size(); ++m) {
    MetricComparison mc;
    mc.metric = metric_name(cfg.metrics[m]);
    std::vector<double> pooled;
    for (std::size_t i = 0; i < surrogates.size(); ++i) {
      const auto& s = rep.surrogates[i].series[m];
      mc.distances.push_back(series_distance(rep.original.series[m], s));
      if (s.values.size() == rep.original.series[m].values.size())
        mc.correlations.push_back(pearson(rep.original.series[m].values, s.values));
      const auto act = active_values(s, surrogates[i]);
      pooled.insert(pooled.end(), act.begin(), act.end());
    }
    mc.mean_distance = mean_of(mc.distances);
    mc.stderr_distance = stderr_of(mc.distances);
    mc.pooled_active_mean = mean_of(pooled);
    mc.pooled_active_std = stddev_of(pooled);
    rep.comparisons.push_back(std::move(mc));
  }

  if (labels.is_static() && !surrogates.empty()) {
    std::vector<double> q, r;
    for (const auto& s : rep.surrogates) {
      q.push_back(*s.aggregated_q);
      r.push_back(*s.aggregated_r);
    }
    rep.aggregated_q_mean = mean_of(q);
    rep.aggregated_q_std = stddev_of(q);
    rep.aggregated_r_mean = mean_of(r);
    rep.aggregated_r_std = stddev_of(r);
    if (cfg.matrices) {
      const std::size_t L = labels.label_count();
      LabelPairMatrix c(L), d(L);
      for (const auto& s : rep.surrogates)
        for (std::size_t i = 0; i < L * L; ++i) {
          c.data[i] += s.contacts->data[i] / static_cast<double>(surrogates.size());
          d.data[i] += s.durations->data[i] / static_cast<double>(surrogates.size());
        }
      rep.mean_contacts = std::move(c);
      rep.mean_durations = std::move(d);
    }
  }
  return rep;
}

}  // namespace letn
