#pragma once

// Command-line front end: inspect, generate, evaluate, features, rerun.
// run_cli() is the whole program minus main() so tests can drive it.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <regex>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "letn/community.hpp"
#include "letn/core.hpp"
#include "letn/dictionary.hpp"
#include "letn/generate.hpp"
#include "letn/io.hpp"
#include "letn/metrics.hpp"
#include "letn/signature.hpp"

namespace letn::cli {

inline constexpr const char* kToolVersion = "0.1.0";

namespace fs = std::filesystem;

struct DatasetOptions {
  std::string path;
  std::string metadata;
  bool inline_labels = false;
  Seconds gap = 300;
  Seconds local_split = 3600;
  Seconds global_split = 86400;
  std::optional<Seconds> origin;
};

struct CommonOptions {
  std::string out;
  std::uint64_t seed = 1;
  std::size_t threads = default_threads();
};

struct Dataset {
  EventData data;
  TemporalNetwork network;
  SplitConfig split;
  std::optional<LabelAssignment> labels;
};

inline Dataset load_dataset(const DatasetOptions& o) {
  if (!o.metadata.empty() && o.inline_labels)
    throw UsageError("both --metadata and --inline-labels given; choose one label source");
  Dataset d;
  d.data = parse_events_file(o.path, o.inline_labels ? EventFormat::triples_with_labels : EventFormat::triples);
  d.split.local_split = o.local_split;
  d.split.global_split = o.global_split;
  d.split.validate(o.gap);
  const Seconds first = d.data.hints.start ? *d.data.hints.start
                        : d.data.events.empty() ? 0
                                                : d.data.events.front().t;
  d.split.origin = o.origin.value_or(SplitConfig::default_origin(first, o.global_split));
  d.network = snapshotize(d.data, o.gap, d.split.origin);
  if (!o.metadata.empty()) d.labels = labels_from_metadata(d.data, parse_metadata_file(o.metadata));
  if (o.inline_labels) d.labels = labels_from_inline(d.data);
  return d;
}

inline void add_dataset_options(CLI::App* cmd, DatasetOptions& o) {
  cmd->add_option("dataset", o.path, "Contact events, one 't i j' per line")->required();
  cmd->add_option("--metadata", o.metadata, "Node metadata, one 'id label' per line");
  cmd->add_flag("--inline-labels", o.inline_labels, "Events carry labels as 't i j Li Lj'");
  cmd->add_option("--gap", o.gap, "Snapshot width in seconds")->capture_default_str();
  cmd->add_option("--local-split", o.local_split, "Local split length in seconds")->capture_default_str();
  cmd->add_option("--global-split", o.global_split, "Global split length in seconds")->capture_default_str();
  cmd->add_option("--origin", o.origin, "Split origin (default: first event floored to the global split)");
}

inline void add_common_options(CLI::App* cmd, CommonOptions& o) {
  const char* env = std::getenv("LETN_OUT");
  o.out = env && *env ? env : "letn_out";
  cmd->add_option("--out", o.out, "Output directory (env LETN_OUT)")->capture_default_str();
  cmd->add_option("--seed", o.seed, "Master seed")->capture_default_str();
  cmd->add_option("--threads", o.threads, "Worker threads")->check(CLI::PositiveNumber);
}

inline std::vector<std::string> dataset_args(const DatasetOptions& o, const Dataset& d) {
  std::vector<std::string> a{fs::absolute(o.path).string()};
  if (!o.metadata.empty()) a.insert(a.end(), {"--metadata", fs::absolute(o.metadata).string()});
  if (o.inline_labels) a.push_back("--inline-labels");
  a.insert(a.end(), {"--gap", std::to_string(o.gap), "--local-split", std::to_string(o.local_split), "--global-split",
                     std::to_string(o.global_split), "--origin", std::to_string(d.split.origin)});
  return a;
}

struct Manifest {
  nlohmann::json j;
  fs::path dir;

  Manifest(const std::string& command, const fs::path& out) : dir(out) {
    j["tool"] = "letn";
    j["version"] = kToolVersion;
    j["command"] = command;
    j["inputs"] = nlohmann::json::array();
    j["outputs"] = nlohmann::json::array();
  }

  void input(const std::string& path) {
    const auto text = read_text(path);
    j["inputs"].push_back({{"path", fs::absolute(path).string()}, {"bytes", text.size()}, {"fnv1a64", checksum_hex(text)}});
  }

  void output(const std::string& name, const std::string& text) {
    write_text(dir / name, text);
    j["outputs"].push_back({{"file", name}, {"bytes", text.size()}, {"fnv1a64", checksum_hex(text)}});
  }

  void finish(const std::vector<std::string>& argv) {
    j["argv"] = argv;
    write_text(dir / "manifest.json", j.dump(2) + "\n");
  }
};

inline nlohmann::json split_json(const SplitConfig& s) {
  return {{"local", s.local_split}, {"global", s.global_split}, {"origin", s.origin}};
}

inline std::string fixed(double v, int digits = 4) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << v;
  return s.str();
}

// ---- inspect -----------------------------------------------------------------

inline int cmd_inspect(const DatasetOptions& dopt, const CommonOptions& copt, std::ostream& out) {
  const auto d = load_dataset(dopt);
  const auto& net = d.network;
  std::size_t active = 0;
  std::vector<std::size_t> hist(d.split.split_count(), 0);
  for (const auto& s : net.snapshots) {
    if (!s.empty()) ++active;
    hist[local_split_of(s.time_start, d.split)] += s.edges.size();
  }
  const Seconds span = d.data.events.empty() ? 0 : d.data.events.back().t - d.data.events.front().t;
  out << "participants      " << net.node_count << "\n";
  out << "labels            " << (d.labels ? std::to_string(d.labels->label_count()) : std::string("-")) << "\n";
  out << "raw records       " << d.data.raw_records << "\n";
  out << "measurement       " << span << " s (" << fixed(static_cast<double>(span) / 86400.0, 2) << " days)\n";
  out << "snapshots         " << net.length() << " (" << active << " active, gap " << net.gap << " s)\n";
  out << "interactions      " << net.interaction_count() << " edge-snapshots\n";
  out << "split activity    (local split: edge-snapshots)\n";
  for (std::size_t s = 0; s < hist.size(); ++s) out << "  " << s << ": " << hist[s] << "\n";

  Manifest m("inspect", copt.out);
  m.input(dopt.path);
  if (!dopt.metadata.empty()) m.input(dopt.metadata);
  nlohmann::json summary = {{"participants", net.node_count},
                            {"raw_records", d.data.raw_records},
                            {"measurement_seconds", span},
                            {"snapshots", net.length()},
                            {"active_snapshots", active},
                            {"interactions", net.interaction_count()},
                            {"split_activity", hist}};
  if (d.labels) {
    summary["labels"] = d.labels->label_count();
    summary["label_names"] = d.labels->names();
  }
  m.j["config"] = {{"gap", dopt.gap}, {"split", split_json(d.split)}};
  m.j["summary"] = summary;
  auto argv = std::vector<std::string>{"inspect"};
  for (auto& a : dataset_args(dopt, d)) argv.push_back(a);
  m.finish(argv);
  return 0;
}

// ---- generate ----------------------------------------------------------------

struct GenerateOptions {
  std::string mode = "letn";
  std::size_t k = 2;
  std::size_t count = 10;
  std::size_t length = 0;
  std::size_t nodes = 0;
  std::string table;
  bool stubs_from_rejected = false;
};

/// Labels used by a generation mode; cletn/dletn derive them from the data.
inline LabelAssignment labels_for_mode(Mode mode, const Dataset& d, std::uint64_t seed) {
  switch (mode) {
    case Mode::letn:
      if (!d.labels) throw UsageError("mode letn needs node labels (--metadata or --inline-labels)");
      return *d.labels;
    case Mode::etn: return LabelAssignment::single(d.network.node_count);
    case Mode::cletn: {
      Rng rng = make_rng(seed, "cletn");
      return cletn_labels(d.network, rng);
    }
    case Mode::dletn: return dletn_labels(d.network, d.split, seed);
  }
  throw InvariantError("unhandled mode");
}

inline ExtensionTable train_table(const TemporalNetwork& net, const LabelAssignment& labels, std::size_t k,
                                  const SplitConfig& split) {
  const auto meta = TableMeta::for_labels(labels, k, net.gap, split);
  return build_table(signature_census(net, labels, k, split), meta);
}

inline int cmd_generate(const DatasetOptions& dopt, const CommonOptions& copt, const GenerateOptions& g,
                        std::ostream& out) {
  const Mode mode = mode_from_string(g.mode);
  if (g.k < 2) throw UsageError("--k must be at least 2");
  if (g.count == 0) throw UsageError("--count must be at least 1");
  const auto d = load_dataset(dopt);
  if (d.network.length() < g.k) throw DataError("dataset has fewer than k snapshots");
  LabelAssignment labels = labels_for_mode(mode, d, copt.seed);

  ExtensionTable table;
  bool table_loaded = false;
  if (!g.table.empty() && fs::exists(g.table)) {
    table = read_table(g.table);
    table_loaded = true;
  } else {
    table = train_table(d.network, labels, g.k, d.split);
    if (!g.table.empty()) write_table(g.table, table);
  }

  GenConfig cfg;
  cfg.k = g.k;
  cfg.gap = dopt.gap;
  cfg.mode = mode;
  cfg.split = d.split;
  cfg.seed = copt.seed;
  cfg.surrogate_count = g.count;
  cfg.threads = copt.threads;
  cfg.target_length = g.length ? g.length : d.network.length();
  cfg.start_time = d.network.start_time();
  cfg.rejected_requests_become_stubs = g.stubs_from_rejected;
  cfg.seed_layers = seeds_from(d.network, g.k);
  std::vector<std::string> ids = d.data.raw_ids;
  if (g.nodes && g.nodes != d.network.node_count) {
    if (mode == Mode::dletn) throw UsageError("--nodes is not supported with mode dletn");
    Rng rng = make_rng(copt.seed, "rescale");
    auto pop = rescale_population(labels, cfg.seed_layers, g.nodes, rng);
    labels = std::move(pop.labels);
    cfg.seed_layers = std::move(pop.seeds);
    ids.clear();
    for (std::size_t v = 0; v < g.nodes; ++v)
      ids.push_back(pop.origin[v] == UINT32_MAX ? "n" + std::to_string(v)
                                                : d.data.raw_ids[pop.origin[v]] + "_" + std::to_string(v));
  }

  std::vector<GenerationStats> stats;
  const auto batch = generate_batch(table, labels, cfg, copt.seed, &stats);

  Manifest m("generate", copt.out);
  m.input(dopt.path);
  if (!dopt.metadata.empty()) m.input(dopt.metadata);
  if (table_loaded) m.input(g.table);
  m.output("table.json", table_to_string(table));
  if (mode == Mode::cletn || mode == Mode::dletn) m.output("partition_" + g.mode + ".csv", partition_csv(labels, ids));
  nlohmann::json st = nlohmann::json::array();
  for (std::size_t i = 0; i < batch.size(); ++i) {
    m.output("surrogate_" + std::to_string(i) + ".txt", network_to_string(batch[i], ids));
    const auto& s = stats[i];
    st.push_back({{"seed", child_seed(copt.seed, "surrogate", i)},
                  {"lookups", s.lookups},
                  {"fallbacks", s.fallbacks},
                  {"reciprocal_edges", s.reciprocal_edges},
                  {"one_sided_requests", s.one_sided_requests},
                  {"one_sided_accepted", s.one_sided_accepted},
                  {"stubs_requested", s.stubs_requested},
                  {"stub_edges", s.stub_edges},
                  {"stubs_discarded", s.stubs_discarded},
                  {"interactions", batch[i].interaction_count()}});
  }
  const auto ts = table_stats(table);
  m.j["config"] = {{"mode", g.mode},
                   {"k", g.k},
                   {"gap", dopt.gap},
                   {"split", split_json(d.split)},
                   {"seed", copt.seed},
                   {"surrogate_count", g.count},
                   {"length", cfg.target_length},
                   {"nodes", labels.node_count()},
                   {"rejected_requests_become_stubs", g.stubs_from_rejected}};
  m.j["table"] = {{"keys", ts.total_keys},
                  {"extensions", ts.total_extensions},
                  {"observations", ts.total_observations},
                  {"split_coverage", ts.coverage},
                  {"loaded_from", table_loaded ? fs::absolute(g.table).string() : ""}};
  m.j["surrogates"] = st;

  std::vector<std::string> argv{"generate"};
  for (auto& a : dataset_args(dopt, d)) argv.push_back(a);
  argv.insert(argv.end(), {"--mode", g.mode, "--k", std::to_string(g.k), "--count", std::to_string(g.count),
                           "--length", std::to_string(cfg.target_length), "--seed", std::to_string(copt.seed)});
  if (g.nodes) argv.insert(argv.end(), {"--nodes", std::to_string(g.nodes)});
  if (table_loaded) argv.insert(argv.end(), {"--table", fs::absolute(g.table).string()});
  if (g.stubs_from_rejected) argv.push_back("--stubs-from-rejected");
  m.finish(argv);

  out << "mode " << g.mode << ", k=" << g.k << ", " << batch.size() << " surrogates of " << cfg.target_length
      << " snapshots written to " << copt.out << "\n";
  out << "table: " << ts.total_keys << " keys, " << ts.total_extensions << " extensions\n";
  return 0;
}

// ---- evaluate ----------------------------------------------------------------

struct EvaluateOptions {
  std::vector<std::string> surrogates;
  std::string labels;  // metadata | inline | cletn | dletn | none
  std::string metrics = "Q,r,c";
};

/// Expands '*' and '?' in the file-name part of each pattern.
inline std::vector<std::string> expand_globs(const std::vector<std::string>& patterns) {
  std::vector<std::string> out;
  for (const auto& p : patterns) {
    if (p.find_first_of("*?") == std::string::npos) {
      out.push_back(p);
      continue;
    }
    const fs::path path(p);
    const fs::path dir = path.has_parent_path() ? path.parent_path() : fs::path(".");
    std::string re;
    for (char c : path.filename().string()) {
      if (c == '*')
        re += ".*";
      else if (c == '?')
        re += '.';
      else if (std::isalnum(static_cast<unsigned char>(c)))
        re += c;
      else
        re += std::string("\\") + c;
    }
    const std::regex rx(re);
    std::vector<std::string> hits;
    if (fs::is_directory(dir))
      for (const auto& e : fs::directory_iterator(dir))
        if (e.is_regular_file() && std::regex_match(e.path().filename().string(), rx)) hits.push_back(e.path().string());
    if (hits.empty()) throw DataError("no files match '" + p + "'");
    std::sort(hits.begin(), hits.end(), [](const std::string& a, const std::string& b) {
      return a.size() != b.size() ? a.size() < b.size() : a < b;
    });
    out.insert(out.end(), hits.begin(), hits.end());
  }
  return out;
}

inline std::vector<Metric> parse_metric_list(const std::string& s) {
  std::vector<Metric> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');)
    if (!item.empty()) out.push_back(metric_from_name(item));
  if (out.empty()) throw UsageError("--metrics is empty");
  return out;
}

inline int cmd_evaluate(const DatasetOptions& dopt, const CommonOptions& copt, const EvaluateOptions& e,
                        std::ostream& out) {
  const auto d = load_dataset(dopt);
  std::string source = e.labels;
  if (source.empty()) source = d.labels ? (dopt.inline_labels ? "inline" : "metadata") : "none";
  LabelAssignment labels;
  if (source == "metadata" || source == "inline") {
    if (!d.labels) throw UsageError("--labels " + source + " needs " + (source == "inline" ? "--inline-labels" : "--metadata"));
    labels = *d.labels;
  } else if (source == "cletn") {
    labels = labels_for_mode(Mode::cletn, d, copt.seed);
  } else if (source == "dletn") {
    labels = labels_for_mode(Mode::dletn, d, copt.seed);
  } else if (source == "none") {
    labels = LabelAssignment::single(d.network.node_count);
  } else {
    throw UsageError("unknown label source '" + source + "'");
  }

  const auto files = expand_globs(e.surrogates);
  std::vector<TemporalNetwork> surrogates;
  for (const auto& f : files) {
    std::vector<std::string> ids;
    auto net = read_network(f, dopt.gap, &ids);
    if (ids != d.data.raw_ids) throw DataError("'" + f + "' does not have the original's node set");
    if (net.length() != d.network.length() || net.start_time() != d.network.start_time())
      throw DataError("'" + f + "' covers " + std::to_string(net.length()) + " snapshots from t=" +
                      std::to_string(net.start_time()) + ", original covers " + std::to_string(d.network.length()) +
                      " from t=" + std::to_string(d.network.start_time()));
    surrogates.push_back(std::move(net));
  }

  EvaluationConfig cfg;
  cfg.split = d.split;
  cfg.metrics = parse_metric_list(e.metrics);
  cfg.threads = copt.threads;
  const auto rep = evaluate(d.network, surrogates, labels, cfg);

  ReportContext ctx{fs::path(dopt.path).filename().string(), source, copt.seed, labels.names()};
  Manifest m("evaluate", copt.out);
  m.input(dopt.path);
  if (!dopt.metadata.empty()) m.input(dopt.metadata);
  for (const auto& f : files) m.input(f);
  m.output("report.json", report_to_json(rep, ctx).dump(2) + "\n");
  for (std::size_t i = 0; i < cfg.metrics.size(); ++i)
    m.output("series_" + metric_name(cfg.metrics[i]) + ".csv", series_csv(d.network, rep, i));
  if (rep.original.contacts) {
    m.output("contacts_original.csv", matrix_csv(*rep.original.contacts, labels.names()));
    m.output("durations_original.csv", matrix_csv(*rep.original.durations, labels.names()));
  }
  if (rep.mean_contacts) {
    m.output("contacts_surrogates.csv", matrix_csv(*rep.mean_contacts, labels.names()));
    m.output("durations_surrogates.csv", matrix_csv(*rep.mean_durations, labels.names()));
  }
  m.j["config"] = {{"labels", source}, {"gap", dopt.gap}, {"split", split_json(d.split)}, {"metrics", e.metrics},
                   {"seed", copt.seed}};
  std::vector<std::string> argv{"evaluate"};
  for (auto& a : dataset_args(dopt, d)) argv.push_back(a);
  for (const auto& f : files) argv.push_back(fs::absolute(f).string());
  argv.insert(argv.end(), {"--labels", source, "--metrics", e.metrics, "--seed", std::to_string(copt.seed)});
  m.finish(argv);

  out << "metric  original (active mean ± std)  surrogates (pooled)  distance (mean ± se)\n";
  for (std::size_t i = 0; i < cfg.metrics.size(); ++i) {
    const auto& st = rep.original.stats[i];
    const auto& c = rep.comparisons[i];
    out << c.metric << "       " << fixed(st.active_mean, 3) << " ± " << fixed(st.active_std, 3);
    if (!surrogates.empty())
      out << "               " << fixed(c.pooled_active_mean, 3) << " ± " << fixed(c.pooled_active_std, 3)
          << "       " << fixed(c.mean_distance, 3) << " ± " << fixed(c.stderr_distance, 3);
    out << "\n";
  }
  if (rep.original.aggregated_q) {
    out << "aggregated Q " << fixed(*rep.original.aggregated_q, 3) << ", r " << fixed(*rep.original.aggregated_r, 3);
    if (rep.aggregated_q_mean)
      out << "; surrogates Q " << fixed(*rep.aggregated_q_mean, 3) << " ± " << fixed(*rep.aggregated_q_std, 3)
          << ", r " << fixed(*rep.aggregated_r_mean, 3) << " ± " << fixed(*rep.aggregated_r_std, 3);
    out << "\n";
  }
  return 0;
}

// ---- features ----------------------------------------------------------------

struct FeaturesOptions {
  std::string mode = "letn";
  std::size_t k = 2;
  bool pca = false;
};

inline int cmd_features(const DatasetOptions& dopt, const CommonOptions& copt, const FeaturesOptions& f,
                        std::ostream& out) {
  FeatureMode fmode;
  if (f.mode == "etn")
    fmode = FeatureMode::etn;
  else if (f.mode == "letn")
    fmode = FeatureMode::letn;
  else
    throw UsageError("--mode must be etn or letn for features");
  if (f.k < 2) throw UsageError("--k must be at least 2");
  const auto d = load_dataset(dopt);
  if (fmode == FeatureMode::letn && !d.labels) throw UsageError("letn features need --metadata or --inline-labels");
  const LabelAssignment labels = d.labels ? *d.labels : LabelAssignment::single(d.network.node_count);
  const auto fm = signature_feature_matrix(d.network, labels, f.k, fmode, d.split);

  Manifest m("features", copt.out);
  m.input(dopt.path);
  if (!dopt.metadata.empty()) m.input(dopt.metadata);
  m.output("features_" + f.mode + ".csv", features_csv(fm, d.data.raw_ids));
  m.j["config"] = {{"mode", f.mode}, {"k", f.k}, {"gap", dopt.gap}, {"split", split_json(d.split)}, {"pca", f.pca}};
  m.j["features"] = {{"rows", fm.rows}, {"columns", fm.columns.size()}};
  out << fm.rows << " nodes x " << fm.columns.size() << " signatures\n";
  if (f.pca) {
    if (fm.rows < 2 || fm.columns.size() < 2) throw DataError("PCA needs at least 2 nodes and 2 signatures");
    const auto pca = pca2(fm);
    std::vector<std::string> node_labels;
    for (auto l : labels.static_labels()) node_labels.push_back(labels.names()[l]);
    m.output("pca_" + f.mode + ".csv", pca_csv(pca, d.data.raw_ids, node_labels));
    m.j["pca"] = {{"eigenvalues", pca.eigenvalues}};
    if (d.labels) {
      const double s = silhouette(pca.coordinates, labels.static_labels());
      m.j["pca"]["silhouette"] = s;
      out << "silhouette of label classes in PCA coordinates: " << fixed(s, 4) << "\n";
    }
  }
  std::vector<std::string> argv{"features"};
  for (auto& a : dataset_args(dopt, d)) argv.push_back(a);
  argv.insert(argv.end(), {"--mode", f.mode, "--k", std::to_string(f.k)});
  if (f.pca) argv.push_back("--pca");
  m.finish(argv);
  return 0;
}

// ---- entry point -------------------------------------------------------------

inline int run_cli(std::vector<std::string> args, std::ostream& out = std::cout, std::ostream& err = std::cerr);

inline int cmd_rerun(const std::string& manifest_path, const std::string& out_dir, std::ostream& out,
                     std::ostream& err) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_text(manifest_path));
  } catch (const nlohmann::json::exception& e) {
    throw DataError("malformed manifest '" + manifest_path + "': " + e.what());
  }
  if (!j.contains("argv")) throw DataError("manifest '" + manifest_path + "' has no argv");
  auto argv = j.at("argv").get<std::vector<std::string>>();
  const std::string target = out_dir.empty() ? fs::path(manifest_path).parent_path().string() : out_dir;
  argv.insert(argv.end(), {"--out", target.empty() ? "." : target});
  return run_cli(argv, out, err);
}

inline int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Community-aware temporal network surrogates"};
  app.name("letn");
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  DatasetOptions dopt;
  CommonOptions copt;
  GenerateOptions gopt;
  EvaluateOptions eopt;
  FeaturesOptions fopt;
  std::string manifest_path;

  auto* inspect = app.add_subcommand("inspect", "Summarize a contact dataset");
  add_dataset_options(inspect, dopt);
  add_common_options(inspect, copt);

  auto* generate = app.add_subcommand("generate", "Train an extension table and generate surrogates");
  add_dataset_options(generate, dopt);
  add_common_options(generate, copt);
  generate->add_option("--mode", gopt.mode, "letn, etn, cletn or dletn")->capture_default_str();
  generate->add_option("--k", gopt.k, "Window size in snapshots")->capture_default_str();
  generate->add_option("--count", gopt.count, "Number of surrogates")->capture_default_str();
  generate->add_option("--length", gopt.length, "Snapshots per surrogate (default: original length)");
  generate->add_option("--nodes", gopt.nodes, "Population size (default: original)");
  generate->add_option("--table", gopt.table, "Table artifact: reused when it exists, written otherwise");
  generate->add_flag("--stubs-from-rejected", gopt.stubs_from_rejected,
                     "Turn rejected one-sided requests into stubs");

  auto* evaluate_cmd = app.add_subcommand("evaluate", "Compare an original network with surrogates");
  add_dataset_options(evaluate_cmd, dopt);
  add_common_options(evaluate_cmd, copt);
  evaluate_cmd->add_option("surrogates", eopt.surrogates, "Surrogate files or glob patterns");
  evaluate_cmd->add_option("--labels", eopt.labels, "metadata, inline, cletn, dletn or none");
  evaluate_cmd->add_option("--metrics", eopt.metrics, "Comma-separated subset of Q,r,c")->capture_default_str();

  auto* features = app.add_subcommand("features", "Per-node signature counts and PCA coordinates");
  add_dataset_options(features, dopt);
  add_common_options(features, copt);
  features->add_option("--mode", fopt.mode, "etn or letn")->capture_default_str();
  features->add_option("--k", fopt.k, "Window size in snapshots")->capture_default_str();
  features->add_flag("--pca", fopt.pca, "Also write 2D PCA coordinates");

  auto* rerun = app.add_subcommand("rerun", "Repeat a run from its manifest");
  rerun->add_option("manifest", manifest_path, "manifest.json of an earlier run")->required();
  std::string rerun_out;
  rerun->add_option("--out", rerun_out, "Output directory (default: the manifest's directory)");

  std::reverse(args.begin(), args.end());
  try {
    app.parse(std::move(args));
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*inspect) return cmd_inspect(dopt, copt, out);
    if (*generate) return cmd_generate(dopt, copt, gopt, out);
    if (*evaluate_cmd) return cmd_evaluate(dopt, copt, eopt, out);
    if (*features) return cmd_features(dopt, copt, fopt, out);
    if (*rerun) return cmd_rerun(manifest_path, rerun_out, out, err);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << "\n";
    return 2;
  } catch (const InvariantError& e) {
    err << "internal error: " << e.what() << "\n";
    return 3;
  } catch (const fs::filesystem_error& e) {
    err << "data error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return 3;
  }
  return 1;
}

}  // namespace letn::cli
