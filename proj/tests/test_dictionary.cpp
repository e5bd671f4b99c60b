#include <gtest/gtest.h>

#include <random>
#include <set>

#include "letn/dictionary.hpp"
#include "oracles.hpp"

using namespace letn;

namespace {

// Ego 0 (label 0) meets node 1 (label 1) in snapshots 0..3 of 6: the key
// "01|10x" is followed by "keep" three times and "drop" once.
TemporalNetwork toy_network() {
  auto net = TemporalNetwork::empty(5, 6, 300, 0);
  for (std::size_t t = 0; t < 4; ++t) net.snapshots[t].edges = {Edge(0, 1)};
  return net;
}

LabelAssignment toy_labels() { return LabelAssignment::make_static({0, 1, 0, 0, 0}, {"a", "b"}); }

ExtensionTable toy_table() {
  const SplitConfig cfg;
  const auto labels = toy_labels();
  return build_table(signature_census(toy_network(), labels, 2, cfg), TableMeta::for_labels(labels, 2, 300, cfg));
}

}  // namespace

TEST(Table, EmptyStreamGivesEmptySplits) {
  const auto t = build_table({}, TableMeta::for_labels(LabelAssignment::single(3), 2, 300, SplitConfig{}));
  EXPECT_EQ(t.split_count(), 24u);
  for (std::size_t s = 0; s < 24; ++s) EXPECT_TRUE(t.split(s).empty());
  const auto st = table_stats(t);
  EXPECT_EQ(st.total_keys, 0u);
  EXPECT_EQ(st.total_extensions, 0u);
  EXPECT_EQ(st.total_observations, 0u);
  EXPECT_EQ(st.coverage, 0.0);
}

TEST(Table, SingleRecord) {
  const auto meta = TableMeta::for_labels(LabelAssignment::single(2), 2, 300, SplitConfig{});
  const auto [key, ext] = mask_signature(Signature{"1", {"11"}});
  const auto t = build_table({{3, key, ext}}, meta);
  const auto* d = t.find(3, "1|1x");
  ASSERT_NE(d, nullptr);
  EXPECT_EQ(d->extensions.size(), 1u);
  EXPECT_EQ(d->counts[0], 1u);
  EXPECT_EQ(d->total, 1u);
  const auto st = table_stats(t);
  EXPECT_EQ(st.total_keys, 1u);
  EXPECT_EQ(st.total_extensions, 1u);
}

TEST(Table, ToyNetworkProbabilities) {
  const auto t = toy_table();
  const auto* d = t.find(0, "01|10x");
  ASSERT_NE(d, nullptr);
  ASSERT_EQ(d->extensions.size(), 2u);
  std::map<std::string, double> p;
  for (std::size_t i = 0; i < d->extensions.size(); ++i) p[d->extensions[i].render()] = d->probability(i);
  EXPECT_DOUBLE_EQ(p.at("10;"), 0.75);
  EXPECT_DOUBLE_EQ(p.at("00;"), 0.25);
}

TEST(Table, ProbabilitiesSumToOne) {
  std::mt19937_64 gen(8);
  const auto net = oracle::random_network(gen, 8, 30, 0.2);
  const auto labels = LabelAssignment::make_static(oracle::random_labels(gen, 8, 3), {"a", "b", "c"});
  const SplitConfig cfg{600, 3600, 0};
  const auto t = build_table(signature_census(net, labels, 2, cfg), TableMeta::for_labels(labels, 2, 300, cfg));
  for (std::size_t s = 0; s < t.split_count(); ++s)
    for (const auto& [key, d] : t.split(s)) {
      double sum = 0.0;
      std::uint64_t total = 0;
      for (std::size_t i = 0; i < d.counts.size(); ++i) {
        EXPECT_GE(d.counts[i], 1u);
        sum += d.probability(i);
        total += d.counts[i];
      }
      EXPECT_NEAR(sum, 1.0, 1e-12);
      EXPECT_EQ(total, d.total);
    }
}

TEST(Sample, SingleExtensionIsCertain) {
  const auto meta = TableMeta::for_labels(LabelAssignment::single(2), 2, 300, SplitConfig{});
  const auto [key, ext] = mask_signature(Signature{"1", {"11"}});
  const auto t = build_table({{0, key, ext}}, meta);
  Rng rng(1);
  for (int i = 0; i < 100; ++i) {
    const auto r = sample_extension(t, 0, key, rng);
    EXPECT_FALSE(r.fallback);
    EXPECT_EQ(r.extension, ext);
  }
}

TEST(Sample, MissingKeyFallsBackToEmptyExtension) {
  const auto t = toy_table();
  Rng rng(1);
  const auto r = sample_extension(t, 0, "01|11x", rng);
  EXPECT_TRUE(r.fallback);
  EXPECT_TRUE(r.extension.empty());
}

TEST(Sample, FrequenciesFollowCounts) {
  const auto t = toy_table();
  Rng rng(12345);
  int keep = 0;
  for (int i = 0; i < 10000; ++i)
    if (sample_extension(t, 0, "01|10x", rng).extension.slots.at(0) == "10") ++keep;
  EXPECT_NEAR(keep / 10000.0, 0.75, 0.02);
}

TEST(Sample, SplitsAreIsolated) {
  const auto meta = TableMeta::for_labels(LabelAssignment::single(2), 2, 300, SplitConfig{});
  const auto [key, ext] = mask_signature(Signature{"1", {"11"}});
  const auto t = build_table({{0, key, ext}}, meta);
  Rng rng(1);
  EXPECT_FALSE(sample_extension(t, 0, key, rng).fallback);
  for (std::size_t s = 1; s < 24; ++s) EXPECT_TRUE(sample_extension(t, s, key, rng).fallback);
}

TEST(Table, BuildIsOrderIndependent) {
  std::mt19937_64 gen(19);
  const auto net = oracle::random_network(gen, 7, 40, 0.25);
  const auto labels = LabelAssignment::make_static(oracle::random_labels(gen, 7, 2), {"a", "b"});
  const SplitConfig cfg{1200, 3600, 0};
  const auto meta = TableMeta::for_labels(labels, 2, 300, cfg);
  auto records = signature_census(net, labels, 2, cfg);
  const auto reference = build_table(records, meta);
  for (int trial = 0; trial < 10; ++trial) {
    std::shuffle(records.begin(), records.end(), gen);
    EXPECT_EQ(build_table(records, meta), reference);
  }
}

TEST(Table, MergeOfShardsEqualsWholeBuild) {
  std::mt19937_64 gen(23);
  const auto net = oracle::random_network(gen, 6, 30, 0.3);
  const auto labels = LabelAssignment::single(6);
  const SplitConfig cfg{1200, 3600, 0};
  const auto meta = TableMeta::for_labels(labels, 3, 300, cfg);
  const auto records = signature_census(net, labels, 3, cfg);
  const std::vector<CensusRecord> a(records.begin(), records.begin() + 40), b(records.begin() + 40, records.end());
  auto merged = build_table(a, meta);
  merged.merge(build_table(b, meta));
  EXPECT_EQ(merged, build_table(records, meta));
}

TEST(Table, InconsistentRecordIsRejected) {
  const auto meta = TableMeta::for_labels(LabelAssignment::make_static({0, 1}, {"a", "b"}), 2, 300, SplitConfig{});
  const auto [key, ext] = mask_signature(Signature{"1", {"11"}});  // width 1, table expects 2
  EXPECT_THROW(build_table({{0, key, ext}}, meta), UsageError);
  EXPECT_THROW(build_table({{99, key, ext}}, meta), UsageError);
}

TEST(Table, StatsMatchRecount) {
  std::mt19937_64 gen(31);
  const auto net = oracle::random_network(gen, 9, 60, 0.15);
  const auto labels = LabelAssignment::make_static(oracle::random_labels(gen, 9, 3), {"a", "b", "c"});
  const SplitConfig cfg{1800, 7200, 0};
  const auto records = signature_census(net, labels, 2, cfg);
  const auto st = table_stats(build_table(records, TableMeta::for_labels(labels, 2, 300, cfg)));
  std::vector<std::set<std::string>> keys(4), pairs(4);
  std::vector<std::uint64_t> obs(4, 0);
  for (const auto& r : records) {
    keys[r.split].insert(r.key.render());
    pairs[r.split].insert(r.key.render() + "#" + r.extension.render());
    ++obs[r.split];
  }
  for (std::size_t s = 0; s < 4; ++s) {
    EXPECT_EQ(st.splits[s].keys, keys[s].size());
    EXPECT_EQ(st.splits[s].extensions, pairs[s].size());
    EXPECT_EQ(st.splits[s].observations, obs[s]);
  }
  EXPECT_EQ(st.total_observations, records.size());
}

TEST(Artifact, RoundTripIsExact) {
  std::mt19937_64 gen(41);
  const auto net = oracle::random_network(gen, 7, 50, 0.2);
  const auto labels = LabelAssignment::make_static(oracle::random_labels(gen, 7, 3), {"a", "b", "c"});
  const SplitConfig cfg{1800, 7200, 600};
  const auto t = build_table(signature_census(net, labels, 3, cfg), TableMeta::for_labels(labels, 3, 300, cfg));
  const auto text = table_to_string(t);
  const auto back = table_from_string(text);
  EXPECT_EQ(back, t);
  EXPECT_EQ(table_to_string(back), text);
  const auto j = nlohmann::json::parse(text);
  EXPECT_EQ(j["format"], "letn-extension-table");
  EXPECT_EQ(j["version"], 1);
  EXPECT_EQ(j["w"], 2);
  EXPECT_EQ(j["L"], 3);
}

TEST(Artifact, RejectsWrongFormatAndVersion) {
  EXPECT_THROW(table_from_string("{}"), DataError);
  EXPECT_THROW(table_from_string("not json"), DataError);
  auto j = table_to_json(toy_table());
  j["version"] = 99;
  EXPECT_THROW(table_from_json(j), DataError);
}
