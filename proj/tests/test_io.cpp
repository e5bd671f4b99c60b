#include <gtest/gtest.h>

#include <filesystem>
#include <random>

#include "letn/io.hpp"
#include "oracles.hpp"

using namespace letn;

namespace {

std::string error_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

std::filesystem::path temp_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("letn_io_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace

TEST(ParseEvents, RepeatedPairRemapsToOneNodePair) {
  const auto d = parse_events_string("20 5 9\n40 5 9\n", EventFormat::triples);
  ASSERT_EQ(d.events.size(), 2u);
  EXPECT_EQ(d.node_count(), 2u);
  EXPECT_EQ(d.raw_ids, (std::vector<std::string>{"5", "9"}));
  EXPECT_EQ(d.events[0].i, 0u);
  EXPECT_EQ(d.events[1].j, 1u);
}

TEST(ParseEvents, RejectsSelfContactWithLineNumber) {
  const auto msg = error_of([] { parse_events_string("# header\n20 5 9\n20 5 5\n", EventFormat::triples); });
  EXPECT_NE(msg.find(":3:"), std::string::npos) << msg;
  EXPECT_NE(msg.find("self-contact"), std::string::npos) << msg;
}

TEST(ParseEvents, RejectsMalformedLines) {
  EXPECT_NE(error_of([] { parse_events_string("20 5\n", EventFormat::triples); }).find(":1:"), std::string::npos);
  EXPECT_NE(error_of([] { parse_events_string("1 2 3\nx 5 9\n", EventFormat::triples); }).find(":2:"),
            std::string::npos);
  EXPECT_THROW(parse_events_string("20 5 9\n", EventFormat::triples_with_labels), DataError);
}

TEST(ParseEvents, EmptyInputIsAnError) {
  EXPECT_THROW(parse_events_string("", EventFormat::triples), DataError);
  EXPECT_THROW(parse_events_string("# only a comment\n\n", EventFormat::triples), DataError);
}

TEST(ParseEvents, IdsSortNumericallyThenLexically) {
  auto d = parse_events_string("0 10 9\n0 100 2\n", EventFormat::triples);
  EXPECT_EQ(d.raw_ids, (std::vector<std::string>{"2", "9", "10", "100"}));
  d = parse_events_string("0 b a\n0 c a\n", EventFormat::triples);
  EXPECT_EQ(d.raw_ids, (std::vector<std::string>{"a", "b", "c"}));
}

TEST(ParseEvents, UnsortedInputIsSorted) {
  const auto d = parse_events_string("60 1 2\n0 1 2\n30 2 3\n", EventFormat::triples);
  EXPECT_EQ(d.events.front().t, 0);
  EXPECT_EQ(d.events.back().t, 60);
}

TEST(ParseEvents, InlineLabels) {
  const auto d = parse_events_string("0 1 2 A B\n20\t2\t3\tB\tA\n", EventFormat::triples_with_labels);
  ASSERT_TRUE(d.inline_labels);
  const auto labels = labels_from_inline(d);
  EXPECT_EQ(labels.names(), (std::vector<std::string>{"A", "B"}));
  EXPECT_EQ(std::vector<LabelIndex>(labels.static_labels().begin(), labels.static_labels().end()),
            (std::vector<LabelIndex>{0, 1, 0}));
  const auto msg = error_of([] { parse_events_string("0 1 2 A B\n20 2 3 C A\n", EventFormat::triples_with_labels); });
  EXPECT_NE(msg.find("node 2"), std::string::npos) << msg;
}

TEST(Metadata, LabelsInFirstAppearanceOrder) {
  std::istringstream md("# id label\n7 1B\n3\t1A\n");
  const auto m = parse_metadata(md);
  const auto d = parse_events_string("0 3 7\n", EventFormat::triples);
  const auto labels = labels_from_metadata(d, m);
  EXPECT_EQ(labels.names(), (std::vector<std::string>{"1B", "1A"}));
  EXPECT_EQ(labels.label_count(), 2u);
  EXPECT_EQ(build_encoding(labels.label_count()).width, 2u);
  EXPECT_EQ(labels.static_labels()[0], 1u);  // node "3"
}

TEST(Metadata, MissingNodesAreListed) {
  std::istringstream md("1 A\n");
  const auto m = parse_metadata(md);
  const auto d = parse_events_string("0 1 2\n0 1 3\n", EventFormat::triples);
  const auto msg = error_of([&] { labels_from_metadata(d, m); });
  EXPECT_NE(msg.find("2, 3"), std::string::npos) << msg;
}

TEST(Metadata, ConflictingDuplicateIsAnError) {
  std::istringstream md("1 A\n1 B\n");
  EXPECT_THROW(parse_metadata(md), DataError);
  std::istringstream ok("1 A\n1 A\n2 B\n");
  EXPECT_EQ(parse_metadata(ok).entries.size(), 2u);
}

TEST(Snapshotize, GapBoundaries) {
  auto net = snapshotize(parse_events_string("0 1 2\n299 1 2\n", EventFormat::triples), 300, 0);
  ASSERT_EQ(net.length(), 1u);
  EXPECT_EQ(net.snapshots[0].edges.size(), 1u);
  net = snapshotize(parse_events_string("0 1 2\n300 1 2\n", EventFormat::triples), 300, 0);
  ASSERT_EQ(net.length(), 2u);
  EXPECT_EQ(net.snapshots[1].edges.size(), 1u);
}

TEST(Snapshotize, IdleSnapshotsAreMaterializedAndAlignedToOrigin) {
  const auto net = snapshotize(parse_events_string("1000 1 2\n2000 2 3\n", EventFormat::triples), 300, 100);
  EXPECT_EQ(net.start_time(), 1000);
  EXPECT_EQ(net.length(), 4u);
  EXPECT_TRUE(net.snapshots[1].empty());
  const auto net2 = snapshotize(parse_events_string("1000 1 2\n", EventFormat::triples), 300, 0);
  EXPECT_EQ(net2.start_time(), 900);
  EXPECT_THROW(snapshotize(parse_events_string("0 1 2\n", EventFormat::triples), 0), UsageError);
}

TEST(Write, EmptyNetworkIsAHeaderOnlyFile) {
  const auto net = TemporalNetwork::empty(0, 0, 300, 0);
  const auto text = network_to_string(net, {});
  EXPECT_EQ(text.rfind("# letn", 0), 0u);
  for (std::size_t pos = 0; (pos = text.find('\n', pos)) != std::string::npos && pos + 1 < text.size(); ++pos)
    EXPECT_EQ(text[pos + 1], '#');
  const auto back = snapshotize(parse_events_string(text, EventFormat::triples), 300);
  EXPECT_EQ(back, net);
}

TEST(Write, RoundTripIsIdentity) {
  std::mt19937_64 gen(13);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + gen() % 9, T = gen() % 12;
    auto net = oracle::random_network(gen, n, T, 0.2, 300, 86400 * 3 + 600 * static_cast<Seconds>(gen() % 5));
    std::vector<std::string> ids;
    for (std::size_t v = 0; v < n; ++v) ids.push_back("id" + std::to_string((v * 7) % 11) + "_" + std::to_string(v));
    const auto text = network_to_string(net, ids);
    const auto data = parse_events_string(text, EventFormat::triples);
    EXPECT_EQ(data.raw_ids, ids);
    EXPECT_EQ(snapshotize(data, 300), net);
    EXPECT_EQ(network_to_string(snapshotize(data, 300), data.raw_ids), text);
  }
}

TEST(Write, FileRoundTripAndGapCheck) {
  const auto dir = temp_dir("files");
  std::mt19937_64 gen(1);
  const auto net = oracle::random_network(gen, 5, 6, 0.3, 60, 120);
  write_network(dir / "net.txt", net, default_ids(5));
  std::vector<std::string> ids;
  EXPECT_EQ(read_network(dir / "net.txt", 60, &ids), net);
  EXPECT_EQ(ids, default_ids(5));
  EXPECT_THROW(read_network(dir / "net.txt", 300), DataError);
  EXPECT_THROW(read_network(dir / "missing.txt", 60), DataError);
}

TEST(Read, GzipInputIsDecompressed) {
  const auto dir = temp_dir("gzip");
  const std::string text = "#@ ids 4 5 9\n20 5 9\n340 4 9\n";
  gzFile f = gzopen((dir / "ev.txt.gz").c_str(), "wb");
  ASSERT_NE(f, nullptr);
  gzwrite(f, text.data(), static_cast<unsigned>(text.size()));
  gzclose(f);
  write_text(dir / "ev.txt", text);
  const auto a = parse_events_file(dir / "ev.txt.gz", EventFormat::triples);
  const auto b = parse_events_file(dir / "ev.txt", EventFormat::triples);
  EXPECT_EQ(a.raw_ids, b.raw_ids);
  EXPECT_EQ(snapshotize(a, 300), snapshotize(b, 300));
  EXPECT_EQ(snapshotize(a, 300).interaction_count(), 2u);
  EXPECT_THROW(parse_events_file(dir / "absent.gz", EventFormat::triples), DataError);
}

TEST(Write, DataParsedFromDiskMatchesInMemoryReport) {
  const auto dir = temp_dir("pipeline");
  std::mt19937_64 gen(3);
  const auto net = oracle::random_network(gen, 8, 15, 0.2);
  const auto sur = oracle::random_network(gen, 8, 15, 0.2);
  const auto labels = LabelAssignment::make_static(oracle::random_labels(gen, 8, 2), {"a", "b"});
  write_network(dir / "s.txt", sur, default_ids(8));
  const auto back = read_network(dir / "s.txt", 300);
  const EvaluationConfig cfg;
  const ReportContext ctx{"toy", "letn", 1, labels.names()};
  EXPECT_EQ(report_to_json(evaluate(net, {back}, labels, cfg), ctx).dump(),
            report_to_json(evaluate(net, {sur}, labels, cfg), ctx).dump());
}

TEST(Csv, MatrixAndPartitionLayouts) {
  LabelPairMatrix m(2);
  m.at(0, 1) = m.at(1, 0) = 3;
  EXPECT_EQ(matrix_csv(m, {"a", "b"}), "label,a,b\na,0,3\nb,3,0\n");
  const auto stat = LabelAssignment::make_static({1, 0}, {"C0", "C1"});
  EXPECT_EQ(partition_csv(stat, {"x", "y"}), "node,label\nx,C1\ny,C0\n");
  const auto ps = LabelAssignment::make_per_split({{0, 0}, {0, 1}}, {"C0", "C1"});
  EXPECT_EQ(partition_csv(ps, {"x", "y"}), "node,split,label\nx,0,C0\ny,0,C0\nx,1,C0\ny,1,C1\n");
}

TEST(Checksum, StableHex) {
  EXPECT_EQ(checksum_hex(""), "cbf29ce484222325");
  EXPECT_EQ(checksum_hex("a"), "af63dc4c8601ec8c");
}
