#include <gtest/gtest.h>

#include <random>
#include <set>

#include "letn/generate.hpp"
#include "oracles.hpp"

using namespace letn;

namespace {

ExtensionTable single_key_table(const std::string& key, const Extension& ext, std::size_t label_count = 1) {
  std::vector<LabelIndex> labels(label_count);
  std::vector<std::string> names;
  for (std::size_t l = 0; l < label_count; ++l) {
    labels[l] = static_cast<LabelIndex>(l);
    names.push_back("l" + std::to_string(l));
  }
  ExtensionTable t(TableMeta::for_labels(LabelAssignment::make_static(labels, names), 2, 300, SplitConfig{}));
  for (std::size_t s = 0; s < t.split_count(); ++s) t.add(s, key, ext, 1);
  t.finalize();
  return t;
}

RequestSet requests(std::size_t n, const std::vector<std::pair<NodeId, NodeId>>& kept) {
  RequestSet r(n);
  for (const auto& [a, b] : kept) r.kept[a].push_back(b);
  for (auto& v : r.kept) std::sort(v.begin(), v.end());
  return r;
}

RequestSet random_requests(std::mt19937_64& gen, std::size_t n, std::size_t L) {
  RequestSet r(n);
  std::bernoulli_distribution want(0.3), stub(0.4);
  for (NodeId u = 0; u < n; ++u) {
    for (NodeId v = 0; v < n; ++v)
      if (u != v && want(gen)) r.kept[u].push_back(v);
    for (LabelIndex l = 0; l < L; ++l)
      if (stub(gen)) r.stubs[u][l] = 1 + static_cast<std::uint32_t>(gen() % 3);
  }
  return r;
}

}  // namespace

TEST(Propose, IsolatedNodeWithUnknownKeyRequestsNothing) {
  const auto table = single_key_table("1|1x", Extension{{"1"}, {}});
  const auto labels = LabelAssignment::single(3);
  AdjacencyIndex history(TemporalNetwork::empty(3, 1, 300, 0));
  Rng rng(1);
  GenerationStats st;
  const auto req = propose_layer(history, 0, 300, table, labels, rng, &st);
  for (NodeId v = 0; v < 3; ++v) {
    EXPECT_TRUE(req.kept[v].empty());
    EXPECT_TRUE(req.stubs[v].empty());
  }
  EXPECT_EQ(st.lookups, 3u);
  EXPECT_EQ(st.fallbacks, 3u);
}

TEST(Propose, InterchangeableNeighborsAreChosenUniformly) {
  const auto table = single_key_table("1|1x|1x", Extension{{"0", "1"}, {}});
  const auto labels = LabelAssignment::single(3);
  auto net = TemporalNetwork::empty(3, 1, 300, 0);
  net.snapshots[0].edges = {Edge(0, 1), Edge(0, 2)};
  const AdjacencyIndex history(net);
  Rng rng(2024);
  int first = 0;
  for (int i = 0; i < 10000; ++i) {
    const auto req = propose_layer(history, 0, 300, table, labels, rng);
    ASSERT_EQ(req.kept[0].size(), 1u);
    if (req.kept[0][0] == 1) ++first;
  }
  EXPECT_NEAR(first / 10000.0, 0.5, 0.02);
}

TEST(Propose, SingleExtensionIsReproducedExactly) {
  // Ego label 0 with neighbors of labels 0 and 1; keep the label-1 neighbor, drop the other, ask for two new label-0 ties.
  Extension ext{{"00", "10"}, {{0, 2}}};
  const auto table = single_key_table("01|01x|10x", ext, 2);
  const auto labels = LabelAssignment::make_static({0, 0, 1}, {"l0", "l1"});
  auto net = TemporalNetwork::empty(3, 1, 300, 0);
  net.snapshots[0].edges = {Edge(0, 1), Edge(0, 2)};
  const AdjacencyIndex history(net);
  Rng rng(5);
  const auto req = propose_layer(history, 0, 300, table, labels, rng);
  EXPECT_EQ(req.kept[0], std::vector<NodeId>{2});
  EXPECT_EQ(req.stubs[0].at(0), 2u);
}

TEST(Validate, ReciprocalRequestBecomesEdge) {
  const std::vector<LabelIndex> labels{0, 0};
  Rng rng(1);
  const auto s = validate_layer(requests(2, {{0, 1}, {1, 0}}), labels, rng);
  EXPECT_EQ(s.edges, std::vector<Edge>{Edge(0, 1)});
}

TEST(Validate, SingleOneSidedRequestIsNeverAccepted) {
  const std::vector<LabelIndex> labels{0, 0};
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    Rng rng(seed);
    EXPECT_TRUE(validate_layer(requests(2, {{0, 1}}), labels, rng).edges.empty());
  }
}

TEST(Validate, HalfOfTwoOneSidedRequestsUniformly) {
  const std::vector<LabelIndex> labels{0, 0, 0, 0};
  int ab = 0;
  for (std::uint64_t seed = 0; seed < 10000; ++seed) {
    Rng rng(seed);
    const auto s = validate_layer(requests(4, {{0, 1}, {2, 3}}), labels, rng);
    ASSERT_EQ(s.edges.size(), 1u);
    if (s.edges[0] == Edge(0, 1)) ++ab;
  }
  EXPECT_NEAR(ab / 10000.0, 0.5, 0.02);
}

TEST(Validate, ForcedStubMatch) {
  const std::vector<LabelIndex> labels{0, 1, 1};
  RequestSet r(3);
  r.stubs[0][1] = 1;
  r.stubs[1][0] = 1;
  Rng rng(1);
  GenerationStats st;
  const auto s = validate_layer(r, labels, rng, &st);
  EXPECT_EQ(s.edges, std::vector<Edge>{Edge(0, 1)});
  EXPECT_EQ(st.stub_edges, 1u);
  EXPECT_EQ(st.stubs_discarded, 0u);
}

TEST(Validate, StubsNeverDuplicateOrSelfPair) {
  const std::vector<LabelIndex> labels{0, 0};
  RequestSet r = requests(2, {{0, 1}, {1, 0}});
  r.stubs[0][0] = 3;
  r.stubs[1][0] = 3;
  Rng rng(1);
  GenerationStats st;
  const auto s = validate_layer(r, labels, rng, &st);
  EXPECT_EQ(s.edges, std::vector<Edge>{Edge(0, 1)});
  EXPECT_EQ(st.stub_edges, 0u);
  EXPECT_EQ(st.stubs_discarded, 6u);
}

TEST(Validate, RandomizedRuleProperties) {
  std::mt19937_64 gen(606);
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t n = 2 + gen() % 12, L = 1 + gen() % 3;
    std::vector<LabelIndex> labels = oracle::random_labels(gen, n, std::min(L, n));
    const auto req = random_requests(gen, n, std::min(L, n));
    Rng rng(static_cast<std::uint64_t>(trial));
    GenerationStats st;
    const auto s = validate_layer(req, labels, rng, &st);

    std::set<Edge> out(s.edges.begin(), s.edges.end());
    ASSERT_EQ(out.size(), s.edges.size());
    for (const auto& e : s.edges) {
      ASSERT_LT(e.u, e.v);
      ASSERT_LT(e.v, n);
    }
    auto wants = [&](NodeId a, NodeId b) {
      return std::binary_search(req.kept[a].begin(), req.kept[a].end(), b);
    };
    std::size_t m = 0, accepted = 0;
    for (NodeId u = 0; u < n; ++u)
      for (NodeId v : req.kept[u]) {
        if (wants(v, u)) {
          ASSERT_TRUE(out.count(Edge(u, v))) << "rule 1 violated";
        } else {
          ++m;
          if (out.count(Edge(u, v))) ++accepted;
        }
      }
    ASSERT_GE(accepted, m / 2);
    ASSERT_EQ(st.one_sided_accepted, m / 2);
    // Without stubs the same draws leave exactly the rule-2 edges.
    RequestSet bare = req;
    for (auto& sm : bare.stubs) sm.clear();
    Rng again(static_cast<std::uint64_t>(trial));
    const auto plain = validate_layer(bare, labels, again);
    std::size_t plain_accepted = 0;
    for (NodeId u = 0; u < n; ++u)
      for (NodeId v : req.kept[u])
        if (!wants(v, u) && std::binary_search(plain.edges.begin(), plain.edges.end(), Edge(u, v))) ++plain_accepted;
    ASSERT_EQ(plain_accepted, m / 2) << "rule 2 cardinality";
    for (const auto& e : s.edges) {
      if (wants(e.u, e.v) || wants(e.v, e.u)) continue;
      const auto su = req.stubs[e.u].find(labels[e.v]);
      const auto sv = req.stubs[e.v].find(labels[e.u]);
      ASSERT_TRUE(su != req.stubs[e.u].end() && sv != req.stubs[e.v].end()) << "stub edge without mutual stubs";
    }
  }
}

TEST(Validate, RejectedRequestsCanBecomeStubs) {
  // 0->1 and 2->3 one-sided: one is accepted and the other's owner gets a stub.
  const std::vector<LabelIndex> labels{0, 0, 0, 0};
  Rng rng(3);
  GenerationStats st;
  validate_layer(requests(4, {{0, 1}, {2, 3}}), labels, rng, &st, true);
  EXPECT_EQ(st.stubs_requested, 1u);
}

TEST(Generate, ConstantEdgeNetworkIsReproduced) {
  auto net = TemporalNetwork::empty(3, 30, 300, 0);
  for (auto& s : net.snapshots) s.edges = {Edge(0, 1)};
  const auto labels = LabelAssignment::single(3);
  const SplitConfig split{3600, 3600, 0};
  const auto table = build_table(signature_census(net, labels, 2, split), TableMeta::for_labels(labels, 2, 300, split));
  GenConfig cfg;
  cfg.split = split;
  cfg.target_length = 50;
  cfg.seed_layers = seeds_from(net, 2);
  Rng rng(1);
  const auto out = generate_surrogate(table, labels, cfg, rng);
  ASSERT_EQ(out.length(), 50u);
  for (const auto& s : out.snapshots) EXPECT_EQ(s.edges, std::vector<Edge>{Edge(0, 1)});
  EXPECT_NO_THROW(out.validate());
}

TEST(Generate, TargetLengthKMinusOneReturnsSeeds) {
  std::mt19937_64 gen(1);
  const auto net = oracle::random_network(gen, 6, 10, 0.3);
  const auto labels = LabelAssignment::single(6);
  const SplitConfig split;
  const auto table = build_table(signature_census(net, labels, 3, split), TableMeta::for_labels(labels, 3, 300, split));
  GenConfig cfg;
  cfg.k = 3;
  cfg.target_length = 2;
  cfg.seed_layers = seeds_from(net, 3);
  Rng rng(1);
  const auto out = generate_surrogate(table, labels, cfg, rng);
  ASSERT_EQ(out.length(), 2u);
  EXPECT_EQ(out.snapshots[0].edges, net.snapshots[0].edges);
  EXPECT_EQ(out.snapshots[1].edges, net.snapshots[1].edges);
}

TEST(Generate, DimensionMismatchIsAnError) {
  const auto table = single_key_table("1|1x", Extension{{"1"}, {}});
  GenConfig cfg;
  cfg.target_length = 5;
  cfg.seed_layers = {Snapshot{}};
  Rng rng(1);
  EXPECT_THROW(generate_surrogate(table, LabelAssignment::make_static({0, 1}, {"a", "b"}), cfg, rng), UsageError);
  cfg.k = 3;
  EXPECT_THROW(generate_surrogate(table, LabelAssignment::single(2), cfg, rng), UsageError);
  cfg.k = 2;
  cfg.seed_layers[0].edges = {Edge(0, 5)};
  EXPECT_THROW(generate_surrogate(table, LabelAssignment::single(2), cfg, rng), UsageError);
}

namespace {

struct Fixture {
  TemporalNetwork net;
  LabelAssignment labels;
  ExtensionTable table;
  GenConfig cfg;
};

Fixture fixture(std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  Fixture f;
  f.net = oracle::random_network(gen, 12, 48, 0.12);
  f.labels = LabelAssignment::make_static(oracle::random_labels(gen, 12, 3), {"a", "b", "c"});
  const SplitConfig split{3600, 4 * 3600, 0};
  f.table = build_table(signature_census(f.net, f.labels, 2, split), TableMeta::for_labels(f.labels, 2, 300, split));
  f.cfg.split = split;
  f.cfg.target_length = 60;
  f.cfg.seed_layers = seeds_from(f.net, 2);
  f.cfg.surrogate_count = 4;
  f.cfg.threads = 3;
  return f;
}

}  // namespace

TEST(Batch, SingleSurrogateMatchesDerivedSeed) {
  auto f = fixture(4);
  f.cfg.surrogate_count = 1;
  const auto batch = generate_batch(f.table, f.labels, f.cfg, 99);
  Rng rng = make_rng(99, "surrogate", 0);
  EXPECT_EQ(batch.at(0), generate_surrogate(f.table, f.labels, f.cfg, rng));
}

TEST(Batch, DeterministicAcrossThreadCounts) {
  auto f = fixture(5);
  const auto a = generate_batch(f.table, f.labels, f.cfg, 7);
  f.cfg.threads = 1;
  EXPECT_EQ(a, generate_batch(f.table, f.labels, f.cfg, 7));
  EXPECT_NE(a, generate_batch(f.table, f.labels, f.cfg, 8));
  for (const auto& s : a) EXPECT_NO_THROW(s.validate());
  EXPECT_THROW((f.cfg.surrogate_count = 0, generate_batch(f.table, f.labels, f.cfg, 7)), UsageError);
}

TEST(Batch, PerSplitLabelsFollowSplits) {
  auto f = fixture(6);
  std::vector<std::vector<LabelIndex>> per_split;
  for (std::size_t s = 0; s < 4; ++s) {
    std::vector<LabelIndex> l(12, 0);
    for (std::size_t v = 0; v < 12; ++v) l[v] = static_cast<LabelIndex>((v + s) % (s + 1));
    per_split.push_back(l);
  }
  const auto labels = LabelAssignment::make_per_split(per_split, {"C0", "C1", "C2", "C3"});
  const auto table = build_table(signature_census(f.net, labels, 2, f.cfg.split),
                                 TableMeta::for_labels(labels, 2, 300, f.cfg.split));
  EXPECT_EQ(table.meta().label_counts, (std::vector<std::size_t>{1, 2, 3, 4}));
  const auto batch = generate_batch(table, labels, f.cfg, 3);
  for (const auto& s : batch) EXPECT_NO_THROW(s.validate());
}

TEST(Rescale, LargestRemainderAndLabelPreservingSeeds) {
  const auto labels = LabelAssignment::make_static({0, 0, 0, 1, 1, 2}, {"a", "b", "c"});
  Snapshot seed;
  seed.edges = {Edge(0, 3), Edge(1, 2), Edge(4, 5)};
  Rng rng(1);
  const auto pop = rescale_population(labels, {seed}, 12, rng);
  const auto l = pop.labels.static_labels();
  EXPECT_EQ(std::count(l.begin(), l.end(), 0u), 6);
  EXPECT_EQ(std::count(l.begin(), l.end(), 1u), 4);
  EXPECT_EQ(std::count(l.begin(), l.end(), 2u), 2);
  ASSERT_EQ(pop.seeds.size(), 1u);
  EXPECT_EQ(pop.seeds[0].edges.size(), 3u);
  const auto orig = labels.static_labels();
  for (const auto& e : pop.seeds[0].edges) {
    ASSERT_NE(pop.origin[e.u], UINT32_MAX);
    EXPECT_EQ(l[e.u], orig[pop.origin[e.u]]);
    EXPECT_EQ(l[e.v], orig[pop.origin[e.v]]);
  }
  Rng rng2(1);
  const auto small = rescale_population(labels, {seed}, 3, rng2);
  EXPECT_EQ(small.labels.node_count(), 3u);
}
