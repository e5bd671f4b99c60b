#pragma once

// Labeled egocentric temporal neighborhood signatures, their masked keys and
// the extensions that a masked key predicts.
//
// A signature over a k-snapshot window renders as
//
//     <ego code>|<neighbor string>|<neighbor string>...
//
// where each neighbor string concatenates, per snapshot, the neighbor's
// label code when linked to the ego and w zeros otherwise. Neighbor strings
// are sorted lexicographically. The masked key drops each neighbor's final
// slot and writes a single 'x' in its place.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "letn/core.hpp"

namespace letn {

inline constexpr char kWildcard = 'x';

struct NodeEncoding {
  std::size_t width = 1;
  std::vector<std::string> codes;  // indexed by label

  const std::string& code(LabelIndex label) const { return codes.at(label); }
  std::string absent() const { return std::string(width, '0'); }

  /// Label encoded by `slot`, or nullopt for the all-zero slot.
  std::optional<LabelIndex> decode(std::string_view slot) const {
    std::uint64_t v = 0;
    for (char c : slot) v = (v << 1) | static_cast<std::uint64_t>(c == '1');
    if (v == 0) return std::nullopt;
    if (v > codes.size()) throw InvariantError("slot '" + std::string(slot) + "' encodes an unknown label");
    return static_cast<LabelIndex>(v - 1);
  }
};

/// Codes are the binary form of label+1 padded to ceil(log2(L+1)) bits.
inline NodeEncoding build_encoding(std::size_t label_count) {
  if (label_count == 0) throw UsageError("no labels");
  NodeEncoding enc;
  std::size_t w = 0;
  while ((std::size_t{1} << w) < label_count + 1) ++w;
  enc.width = std::max<std::size_t>(w, 1);
  enc.codes.reserve(label_count);
  for (std::size_t l = 0; l < label_count; ++l) {
    std::string s(enc.width, '0');
    std::size_t v = l + 1;
    for (std::size_t b = 0; b < enc.width; ++b) s[enc.width - 1 - b] = (v >> b) & 1 ? '1' : '0';
    enc.codes.push_back(std::move(s));
  }
  return enc;
}

struct Signature {
  std::string ego_code;
  std::vector<std::string> neighbors;  // sorted ascending

  std::string render() const {
    std::string out = ego_code;
    for (const auto& n : neighbors) {
      out += '|';
      out += n;
    }
    return out;
  }

  friend auto operator<=>(const Signature&, const Signature&) = default;
};

struct MaskedKey {
  std::string ego_code;
  std::vector<std::string> neighbors;  // each (k-1)*w chars followed by the wildcard

  std::string render() const {
    std::string out = ego_code;
    for (const auto& n : neighbors) {
      out += '|';
      out += n;
    }
    return out;
  }

  static MaskedKey parse(std::string_view text) {
    MaskedKey key;
    std::size_t pos = text.find('|');
    key.ego_code = std::string(text.substr(0, pos));
    while (pos != std::string_view::npos) {
      std::size_t next = text.find('|', pos + 1);
      key.neighbors.emplace_back(text.substr(pos + 1, next == std::string_view::npos ? std::string_view::npos : next - pos - 1));
      pos = next;
    }
    return key;
  }

  friend auto operator<=>(const MaskedKey&, const MaskedKey&) = default;
};

/// Final-slot values of the masked neighbors (aligned with the key's
/// neighbor order) plus per-label counts of neighbors that appear only in
/// the predicted snapshot.
struct Extension {
  std::vector<std::string> slots;
  std::map<LabelIndex, std::uint32_t> new_neighbors;

  bool empty() const { return slots.empty() && new_neighbors.empty(); }

  std::string render() const {
    std::string out;
    for (std::size_t i = 0; i < slots.size(); ++i) {
      if (i) out += ',';
      out += slots[i];
    }
    out += ';';
    bool first = true;
    for (const auto& [label, count] : new_neighbors) {
      if (!first) out += ',';
      first = false;
      out += std::to_string(label) + ':' + std::to_string(count);
    }
    return out;
  }

  friend auto operator<=>(const Extension&, const Extension&) = default;
};

/// Presence of one neighbor across a window: bit j set when linked in slot j.
struct NeighborPresence {
  NodeId node = 0;
  std::uint64_t mask = 0;
};

/// Per-snapshot adjacency lists, built once per network.
class AdjacencyIndex {
 public:
  AdjacencyIndex() = default;
  explicit AdjacencyIndex(const TemporalNetwork& network) : node_count_(network.node_count) {
    layers_.reserve(network.length());
    for (const auto& s : network.snapshots) layers_.push_back(adjacency(s, network.node_count));
  }

  void push_back(const Snapshot& s) { layers_.push_back(adjacency(s, node_count_)); }
  void set_node_count(std::size_t n) { node_count_ = n; }

  std::size_t length() const { return layers_.size(); }
  const std::vector<NodeId>& neighbors(std::size_t t, NodeId node) const { return layers_[t][node]; }

 private:
  std::size_t node_count_ = 0;
  std::vector<std::vector<std::vector<NodeId>>> layers_;
};

/// Neighbors of `ego` in snapshots [t, t+slots), sorted by node id.
inline std::vector<NeighborPresence> window_presence(const AdjacencyIndex& adj, NodeId ego, std::size_t t,
                                                     std::size_t slots) {
  std::vector<NeighborPresence> out;
  for (std::size_t j = 0; j < slots; ++j)
    for (NodeId n : adj.neighbors(t + j, ego)) out.push_back({n, std::uint64_t{1} << j});
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.node < b.node; });
  std::size_t w = 0;
  for (std::size_t r = 0; r < out.size(); ++r) {
    if (w > 0 && out[w - 1].node == out[r].node)
      out[w - 1].mask |= out[r].mask;
    else
      out[w++] = out[r];
  }
  out.resize(w);
  return out;
}

inline std::string presence_string(std::uint64_t mask, std::size_t slots, const std::string& code) {
  std::string s;
  s.reserve(slots * code.size());
  for (std::size_t j = 0; j < slots; ++j) {
    if (mask >> j & 1)
      s += code;
    else
      s.append(code.size(), '0');
  }
  return s;
}

inline Signature signature_from_presence(const std::vector<NeighborPresence>& presence, NodeId ego,
                                         std::span<const LabelIndex> labels, std::size_t slots,
                                         const NodeEncoding& enc) {
  Signature sig;
  sig.ego_code = enc.code(labels[ego]);
  sig.neighbors.reserve(presence.size());
  for (const auto& p : presence) sig.neighbors.push_back(presence_string(p.mask, slots, enc.code(labels[p.node])));
  std::sort(sig.neighbors.begin(), sig.neighbors.end());
  return sig;
}

inline void check_window(const TemporalNetwork& network, std::size_t t, std::size_t k) {
  if (k < 2) throw UsageError("window size k must be at least 2");
  if (k > 64) throw UsageError("window size k must be at most 64");
  if (t + k > network.length())
    throw UsageError("window [" + std::to_string(t) + ", " + std::to_string(t + k) + ") exceeds network length " +
                     std::to_string(network.length()));
}

inline Signature extract_signature(const TemporalNetwork& network, std::span<const LabelIndex> labels, NodeId ego,
                                   std::size_t t, std::size_t k, const NodeEncoding& enc) {
  check_window(network, t, k);
  if (ego >= network.node_count) throw UsageError("ego out of range");
  std::vector<NeighborPresence> presence;
  for (std::size_t j = 0; j < k; ++j)
    for (const auto& e : network.snapshots[t + j].edges) {
      if (e.u == ego) presence.push_back({e.v, std::uint64_t{1} << j});
      if (e.v == ego) presence.push_back({e.u, std::uint64_t{1} << j});
    }
  std::sort(presence.begin(), presence.end(), [](const auto& a, const auto& b) { return a.node < b.node; });
  std::vector<NeighborPresence> merged;
  for (const auto& p : presence) {
    if (!merged.empty() && merged.back().node == p.node)
      merged.back().mask |= p.mask;
    else
      merged.push_back(p);
  }
  return signature_from_presence(merged, ego, labels, k, enc);
}

/// Splits a signature into its lookup key and the extension it realised.
inline std::pair<MaskedKey, Extension> mask_signature(const Signature& sig) {
  MaskedKey key;
  Extension ext;
  key.ego_code = sig.ego_code;
  const std::size_t w = sig.ego_code.size();
  if (w == 0) throw InvariantError("signature without ego code");
  for (const auto& n : sig.neighbors) {
    if (n.size() < w || n.size() % w != 0) throw InvariantError("neighbor string length is not a multiple of w");
    const std::size_t prefix_len = n.size() - w;
    std::string_view prefix(n.data(), prefix_len);
    std::string_view last(n.data() + prefix_len, w);
    if (prefix.find('1') == std::string_view::npos) {
      std::uint64_t v = 0;
      for (char c : last) v = (v << 1) | static_cast<std::uint64_t>(c == '1');
      if (v == 0) throw InvariantError("neighbor string has no nonzero slot");
      ++ext.new_neighbors[static_cast<LabelIndex>(v - 1)];
    } else {
      key.neighbors.push_back(std::string(prefix) + kWildcard);
      ext.slots.emplace_back(last);
    }
  }
  // Neighbor strings arrive sorted, so masked prefixes are already sorted and
  // slots within equal-prefix groups ascend.
  return {std::move(key), std::move(ext)};
}

struct CensusRecord {
  std::size_t split = 0;
  MaskedKey key;
  Extension extension;

  friend auto operator<=>(const CensusRecord&, const CensusRecord&) = default;
};

/// Encoding for each local split (one entry for static labels).
inline std::vector<NodeEncoding> encodings_for(const LabelAssignment& labels) {
  std::vector<NodeEncoding> out;
  if (labels.is_static()) {
    out.push_back(build_encoding(labels.label_count()));
  } else {
    for (std::size_t s = 0; s < labels.split_count(); ++s) out.push_back(build_encoding(labels.label_count(s)));
  }
  return out;
}

inline const NodeEncoding& encoding_at(const std::vector<NodeEncoding>& encs, std::size_t split) {
  return encs.size() == 1 ? encs.front() : encs.at(split);
}

/// One record per (ego, window). The window's split is that of its last
/// snapshot, the one the extension predicts.
inline std::vector<CensusRecord> signature_census(const TemporalNetwork& network, const LabelAssignment& labels,
                                                  std::size_t k, const SplitConfig& cfg) {
  std::vector<CensusRecord> out;
  if (network.length() < k) return out;
  check_window(network, 0, k);
  if (labels.node_count() != network.node_count) throw UsageError("label assignment does not cover the network");
  if (!labels.is_static() && labels.split_count() != cfg.split_count())
    throw UsageError("per-split labels do not match the split configuration");
  const auto encs = encodings_for(labels);
  const AdjacencyIndex adj(network);
  out.reserve(network.node_count * (network.length() - k + 1));
  for (std::size_t t = 0; t + k <= network.length(); ++t) {
    const std::size_t split = local_split_of(network.snapshots[t + k - 1].time_start, cfg);
    const auto view = labels.for_split(split);
    const auto& enc = encoding_at(encs, split);
    for (NodeId ego = 0; ego < network.node_count; ++ego) {
      auto sig = signature_from_presence(window_presence(adj, ego, t, k), ego, view, k, enc);
      auto [key, ext] = mask_signature(sig);
      out.push_back({split, std::move(key), std::move(ext)});
    }
  }
  return out;
}

}  // namespace letn
