// pado: generate planar graphs, build approximate distance oracles, query,
// verify and benchmark them.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "json.hpp"
#include "pado/errors.hpp"
#include "pado/generate.hpp"
#include "pado/graph_io.hpp"
#include "pado/oracle.hpp"
#include "pado/oracle_io.hpp"
#include "pado/shortest_paths.hpp"

namespace {

using json = nlohmann::json;
using Clock = std::chrono::steady_clock;
using Pair = std::pair<pado::NodeId, pado::NodeId>;

constexpr int kExitError = 1;
constexpr int kExitUsage = 2;
constexpr int kExitViolation = 3;
constexpr double kRelTol = 1e-9;

void setup_logging() {
  auto logger = spdlog::stderr_logger_mt("pado");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");
  const char* env = std::getenv("PADO_LOG");
  const std::string level = env != nullptr ? env : "off";
  if (level == "debug") {
    spdlog::set_level(spdlog::level::debug);
  } else if (level == "info") {
    spdlog::set_level(spdlog::level::info);
  } else {
    spdlog::set_level(spdlog::level::off);
  }
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Runs fn(i) for i in [0, count) on up to `threads` workers. Each index writes
// only its own output slot, so results keep input order.
template <typename Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
  if (threads == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < count; i += threads) fn(i);
    });
  }
  for (std::thread& t : pool) t.join();
}

std::vector<Pair> random_pairs(std::size_t n, std::size_t k, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Pair> pairs;
  pairs.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    const auto s = static_cast<pado::NodeId>(rng() % n);
    const auto t = static_cast<pado::NodeId>(rng() % n);
    pairs.emplace_back(s, t);
  }
  return pairs;
}

std::vector<Pair> read_pairs(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw pado::Error("cannot open " + path);
  std::vector<Pair> pairs;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream fields(line);
    long long s = 0;
    long long t = 0;
    if (!(fields >> s)) continue;
    std::string rest;
    if (!(fields >> t) || (fields >> rest) || s < 0 || t < 0) {
      throw pado::ParseError(lineno, "expected '<s> <t>'");
    }
    pairs.emplace_back(static_cast<pado::NodeId>(std::min<long long>(s, pado::kNoNode)),
                       static_cast<pado::NodeId>(std::min<long long>(t, pado::kNoNode)));
  }
  return pairs;
}

struct Stretch {
  double min = 0.0;
  double mean = 0.0;
  double max = 0.0;
  std::size_t violations = 0;
};

bool within_bounds(double estimate, double exact, double epsilon) {
  return estimate >= exact * (1.0 - kRelTol) && estimate <= (1.0 + epsilon) * exact * (1.0 + kRelTol);
}

Stretch summarize(const std::vector<double>& estimates, const std::vector<double>& exact,
                  double epsilon) {
  Stretch out;
  std::size_t counted = 0;
  out.min = pado::kInfinity;
  for (std::size_t i = 0; i < estimates.size(); ++i) {
    if (!within_bounds(estimates[i], exact[i], epsilon)) ++out.violations;
    const double ratio = exact[i] > 0.0 ? estimates[i] / exact[i] : (estimates[i] == 0.0 ? 1.0 : pado::kInfinity);
    out.min = std::min(out.min, ratio);
    out.max = std::max(out.max, ratio);
    out.mean += ratio;
    ++counted;
  }
  if (counted == 0) return {};
  out.mean /= static_cast<double>(counted);
  return out;
}

double percentile(std::vector<double> values, double q) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const auto k = static_cast<std::size_t>(std::ceil(q * static_cast<double>(values.size())));
  return values[std::min(values.size() - 1, k == 0 ? 0 : k - 1)];
}

json report_json(const pado::PreprocessReport& rep, const pado::OracleParams& params) {
  const std::uint32_t budget = 2 + static_cast<std::uint32_t>(std::ceil(2.0 / params.epsilon));
  return json{{"epsilon", params.epsilon},
              {"c_ell", params.c_ell},
              {"ell", params.ell},
              {"r", params.r},
              {"build_s", rep.seconds_rdivision + rep.seconds_decomposition + rep.seconds_connections},
              {"rdivision_s", rep.seconds_rdivision},
              {"decomposition_s", rep.seconds_decomposition},
              {"connections_s", rep.seconds_connections},
              {"regions", rep.regions},
              {"boundary_nodes", rep.boundary_nodes},
              {"c_r", rep.c_r},
              {"c_b", rep.c_b},
              {"c_B", rep.c_B},
              {"decomposition_depth", rep.decomposition_depth},
              {"c_d", rep.c_d},
              {"decomposition_nodes", rep.decomposition_nodes},
              {"pieces", rep.pieces_processed},
              {"connections", rep.connections},
              {"connection_bound", rep.boundary_nodes * (rep.decomposition_depth + 1ull) * 4ull * budget},
              {"c_space", rep.c_space},
              {"max_per_node_phase", rep.audit.max_per_node},
              {"phase_budget", budget},
              {"min_potential_slack",
               rep.audit.non_initial > 0 ? json(rep.audit.min_potential_slack) : json(nullptr)},
              {"max_dart_insertions", rep.max_dart_insertions}};
}

struct GenerateArgs {
  std::string kind = "grid";
  std::size_t rows = 10;
  std::size_t cols = 10;
  std::size_t nodes = 100;
  std::string lengths;
  double min_length = 1.0;
  double max_length = 10.0;
  std::uint64_t seed = 1;
  std::string out;
};

int cmd_generate(const GenerateArgs& a) {
  pado::GeneratorParams p;
  try {
    p.kind = pado::parse_graph_kind(a.kind);
    if (!a.lengths.empty()) p.lengths = pado::parse_length_model(a.lengths);
  } catch (const pado::InvalidParams& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  p.rows = a.rows;
  p.cols = a.cols;
  p.nodes = a.nodes;
  p.min_length = a.min_length;
  p.max_length = a.max_length;
  p.seed = a.seed;
  pado::EmbeddedPlanarGraph graph;
  try {
    graph = pado::generate(p);
  } catch (const pado::InvalidParams& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  spdlog::info("generated {} nodes, {} edges", graph.node_count(), graph.edge_count());
  if (a.out.empty()) {
    pado::serialize_graph(graph, std::cout);
  } else {
    pado::write_graph_file(graph, a.out);
  }
  return 0;
}

struct BuildArgs {
  std::string graph;
  double epsilon = 0.5;
  double c_ell = 1.0;
  std::string out;
};

int cmd_build(const BuildArgs& a) {
  const pado::EmbeddedPlanarGraph graph = pado::read_graph_file(a.graph);
  const pado::OracleParams params = pado::make_params(a.epsilon, a.c_ell, graph.node_count());
  spdlog::info("building oracle: n={} ell={} r={}", graph.node_count(), params.ell, params.r);
  pado::PreprocessReport rep;
  const pado::DistanceOracle oracle = pado::DistanceOracle::preprocess(graph, params, {}, &rep);
  const std::vector<std::uint8_t> bytes = pado::serialize_oracle(oracle);
  if (!a.out.empty()) {
    std::ofstream out(a.out, std::ios::binary);
    if (!out) throw pado::Error("cannot open " + a.out + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  }
  json line = report_json(rep, params);
  line["n"] = graph.node_count();
  line["m"] = graph.edge_count();
  line["bytes"] = bytes.size();
  std::cout << line.dump() << "\n";
  return 0;
}

struct QueryArgs {
  std::string oracle;
  std::string pairs;
  std::size_t random = 0;
  std::uint64_t seed = 1;
  unsigned threads = 1;
};

int cmd_query(const QueryArgs& a) {
  const pado::DistanceOracle oracle = pado::load_oracle_file(a.oracle);
  const std::vector<Pair> pairs =
      a.pairs.empty() ? random_pairs(oracle.node_count(), a.random, a.seed) : read_pairs(a.pairs);
  for (const auto& [s, t] : pairs) {
    if (s >= oracle.node_count() || t >= oracle.node_count()) {
      throw pado::UnknownNode("node " + std::to_string(std::max(s, t)) + " is not in the graph");
    }
  }
  std::vector<double> estimates(pairs.size());
  parallel_for(pairs.size(), a.threads,
               [&](std::size_t i) { estimates[i] = oracle.query(pairs[i].first, pairs[i].second).estimate; });
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    std::cout << pairs[i].first << ' ' << pairs[i].second << ' ' << pado::format_double(estimates[i])
              << "\n";
  }
  return 0;
}

struct VerifyArgs {
  std::string oracle;
  std::string graph;
  std::size_t random = 1000;
  std::uint64_t seed = 1;
  unsigned threads = 1;
};

int cmd_verify(const VerifyArgs& a) {
  const pado::DistanceOracle oracle = pado::load_oracle_file(a.oracle);
  const pado::EmbeddedPlanarGraph graph = pado::read_graph_file(a.graph);
  if (graph.node_count() != oracle.node_count()) {
    throw pado::Error("graph has " + std::to_string(graph.node_count()) + " nodes, oracle has " +
                      std::to_string(oracle.node_count()));
  }
  const double eps = oracle.params().epsilon;
  const std::vector<Pair> pairs = random_pairs(oracle.node_count(), a.random, a.seed);
  std::vector<double> estimates(pairs.size());
  std::vector<double> exact(pairs.size());
  std::vector<double> micros(pairs.size());
  parallel_for(pairs.size(), a.threads, [&](std::size_t i) {
    const auto start = Clock::now();
    estimates[i] = oracle.query(pairs[i].first, pairs[i].second).estimate;
    micros[i] = seconds_since(start) * 1e6;
    exact[i] = pado::exact_distance(graph, pairs[i].first, pairs[i].second);
  });
  const Stretch st = summarize(estimates, exact, eps);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (!within_bounds(estimates[i], exact[i], eps)) {
      spdlog::error("pair {} {}: estimate {} exact {}", pairs[i].first, pairs[i].second,
                    estimates[i], exact[i]);
    }
  }
  json line{{"pairs", pairs.size()}, {"epsilon", eps}, {"violations", st.violations}};
  if (!pairs.empty()) {
    double mean = 0.0;
    for (double us : micros) mean += us;
    mean /= static_cast<double>(micros.size());
    line["min_stretch"] = st.min;
    line["mean_stretch"] = st.mean;
    line["max_stretch"] = st.max;
    line["query_us_mean"] = mean;
    line["query_us_median"] = percentile(micros, 0.5);
    line["query_us_p99"] = percentile(micros, 0.99);
  }
  std::cout << line.dump() << "\n";
  return st.violations == 0 ? 0 : kExitViolation;
}

struct BenchArgs {
  std::string kind = "delaunay";
  std::vector<std::size_t> sizes{100, 1000};
  std::vector<double> epsilons{0.5};
  std::vector<double> c_ells{1.0};
  std::size_t queries = 200;
  std::uint64_t seed = 1;
  unsigned threads = 1;
};

int cmd_bench(const BenchArgs& a) {
  pado::GraphKind kind;
  try {
    kind = pado::parse_graph_kind(a.kind);
  } catch (const pado::InvalidParams& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  std::cout << "n,epsilon,c_ell,build_s,query_us_mean,bytes,connections,max_stretch\n";
  for (std::size_t size : a.sizes) {
    pado::GeneratorParams gp;
    gp.kind = kind;
    gp.seed = a.seed;
    if (kind == pado::GraphKind::grid) {
      gp.rows = gp.cols = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(std::sqrt(size))));
    } else {
      gp.nodes = size;
    }
    const pado::EmbeddedPlanarGraph graph = pado::generate(gp);
    const std::vector<Pair> pairs = random_pairs(graph.node_count(), a.queries, a.seed);
    std::vector<double> exact(pairs.size());
    parallel_for(pairs.size(), a.threads, [&](std::size_t i) {
      exact[i] = pado::exact_distance(graph, pairs[i].first, pairs[i].second);
    });
    for (double eps : a.epsilons) {
      for (double c_ell : a.c_ells) {
        const pado::OracleParams params = pado::make_params(eps, c_ell, graph.node_count());
        const auto start = Clock::now();
        pado::PreprocessReport rep;
        const pado::DistanceOracle oracle = pado::DistanceOracle::preprocess(graph, params, {}, &rep);
        const double build_s = seconds_since(start);
        std::vector<double> estimates(pairs.size());
        std::vector<double> micros(pairs.size());
        parallel_for(pairs.size(), a.threads, [&](std::size_t i) {
          const auto q = Clock::now();
          estimates[i] = oracle.query(pairs[i].first, pairs[i].second).estimate;
          micros[i] = seconds_since(q) * 1e6;
        });
        double mean = 0.0;
        for (double us : micros) mean += us;
        if (!micros.empty()) mean /= static_cast<double>(micros.size());
        const Stretch st = summarize(estimates, exact, eps);
        std::cout << graph.node_count() << ',' << pado::format_double(eps) << ','
                  << pado::format_double(c_ell) << ',' << build_s << ',' << mean << ','
                  << pado::serialize_oracle(oracle).size() << ',' << rep.connections << ','
                  << pado::format_double(st.max) << "\n";
        spdlog::info("n={} eps={} c_ell={}: {} connections, c_space {:.3f}", graph.node_count(), eps,
                     c_ell, rep.connections, rep.c_space);
      }
    }
  }
  return 0;
}

// Power-of-two buckets: 0, 1, 2-3, 4-7, ...
json histogram(const std::vector<std::uint64_t>& values, const std::string& name, bool exact_bins) {
  std::map<std::uint64_t, std::uint64_t> bins;
  for (std::uint64_t v : values) {
    std::uint64_t lo = v;
    if (!exact_bins && v > 1) lo = std::uint64_t{1} << (63 - __builtin_clzll(v));
    ++bins[lo];
  }
  json out{{"histogram", name}, {"count", values.size()}, {"bins", json::array()}};
  for (const auto& [lo, count] : bins) {
    const std::uint64_t hi = exact_bins || lo <= 1 ? lo : 2 * lo - 1;
    out["bins"].push_back({{"lo", lo}, {"hi", hi}, {"count", count}});
  }
  return out;
}

int cmd_stats(const std::string& path) {
  const pado::DistanceOracle oracle = pado::load_oracle_file(path);
  std::vector<std::uint64_t> region_edges;
  std::vector<std::uint64_t> region_boundary;
  for (std::size_t k = 0; k < oracle.regions().size(); ++k) {
    region_edges.push_back(oracle.regions()[k].edges.size());
    region_boundary.push_back(oracle.region_boundary()[k].size());
  }
  std::vector<std::uint64_t> depth;
  std::vector<std::uint64_t> path_size;
  for (const pado::SkeletonNode& node : oracle.skeleton()) {
    depth.push_back(node.depth);
    for (const pado::SeparatorPath& p : node.paths) path_size.push_back(p.size());
  }
  const pado::ConnectionStore& store = oracle.store();
  std::vector<std::uint64_t> keys;
  std::vector<std::uint64_t> per_key;
  std::vector<std::uint64_t> per_node;
  for (std::size_t slot = 0; slot < store.nodes.size(); ++slot) {
    keys.push_back(store.key_offset[slot + 1] - store.key_offset[slot]);
    per_node.push_back(store.conn_offset[store.key_offset[slot + 1]] -
                       store.conn_offset[store.key_offset[slot]]);
  }
  for (std::size_t j = 0; j + 1 < store.conn_offset.size(); ++j) {
    per_key.push_back(store.conn_offset[j + 1] - store.conn_offset[j]);
  }
  json summary{{"n", oracle.node_count()},
               {"epsilon", oracle.params().epsilon},
               {"c_ell", oracle.params().c_ell},
               {"ell", oracle.params().ell},
               {"r", oracle.params().r},
               {"regions", oracle.regions().size()},
               {"boundary_nodes", store.nodes.size()},
               {"decomposition_nodes", oracle.skeleton().size()},
               {"connections", store.total_connections()}};
  std::cout << summary.dump() << "\n";
  std::cout << histogram(region_edges, "region_edges", false).dump() << "\n";
  std::cout << histogram(region_boundary, "region_boundary_nodes", false).dump() << "\n";
  std::cout << histogram(depth, "decomposition_depth", true).dump() << "\n";
  std::cout << histogram(path_size, "separator_path_nodes", false).dump() << "\n";
  std::cout << histogram(keys, "keys_per_boundary_node", true).dump() << "\n";
  std::cout << histogram(per_key, "connections_per_key", true).dump() << "\n";
  std::cout << histogram(per_node, "connections_per_boundary_node", false).dump() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  CLI::App app{"Approximate distance oracles for planar graphs"};
  app.require_subcommand(1);
  int status = 0;

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "Write a generated planar graph");
  generate->add_option("--kind", gen.kind, "grid | delaunay | random-triangulation")->capture_default_str();
  generate->add_option("--rows", gen.rows, "Grid rows")->capture_default_str();
  generate->add_option("--cols", gen.cols, "Grid columns")->capture_default_str();
  generate->add_option("--nodes,-n", gen.nodes, "Node count (delaunay, random-triangulation)")
      ->capture_default_str();
  generate->add_option("--lengths", gen.lengths, "unit | euclidean | uniform");
  generate->add_option("--min-length", gen.min_length)->capture_default_str();
  generate->add_option("--max-length", gen.max_length)->capture_default_str();
  generate->add_option("--seed", gen.seed)->capture_default_str();
  generate->add_option("--out", gen.out, "Output path (stdout when omitted)");
  generate->callback([&] { status = cmd_generate(gen); });

  BuildArgs build;
  auto* build_cmd = app.add_subcommand("build", "Preprocess a graph and save the oracle");
  build_cmd->add_option("graph", build.graph, "Graph file")->required();
  build_cmd->add_option("--epsilon", build.epsilon)->check(CLI::PositiveNumber)->capture_default_str();
  build_cmd->add_option("--c-ell", build.c_ell)->check(CLI::PositiveNumber)->capture_default_str();
  build_cmd->add_option("--out", build.out, "Oracle output path");
  build_cmd->callback([&] { status = cmd_build(build); });

  QueryArgs query;
  auto* query_cmd = app.add_subcommand("query", "Print 's t estimate' per pair");
  query_cmd->add_option("oracle", query.oracle, "Oracle file")->required();
  auto* pairs_opt = query_cmd->add_option("--pairs", query.pairs, "File of 's t' lines");
  query_cmd->add_option("--random", query.random, "Number of random pairs")->excludes(pairs_opt);
  query_cmd->add_option("--seed", query.seed)->capture_default_str();
  query_cmd->add_option("--threads", query.threads)->check(CLI::PositiveNumber)->capture_default_str();
  query_cmd->callback([&] { status = cmd_query(query); });

  VerifyArgs verify;
  auto* verify_cmd = app.add_subcommand("verify", "Compare estimates with exact distances");
  verify_cmd->add_option("oracle", verify.oracle, "Oracle file")->required();
  verify_cmd->add_option("graph", verify.graph, "Graph file the oracle was built from")->required();
  verify_cmd->add_option("--random,-k", verify.random, "Number of random pairs")->capture_default_str();
  verify_cmd->add_option("--seed", verify.seed)->capture_default_str();
  verify_cmd->add_option("--threads", verify.threads)->check(CLI::PositiveNumber)->capture_default_str();
  verify_cmd->callback([&] { status = cmd_verify(verify); });

  BenchArgs bench;
  auto* bench_cmd = app.add_subcommand("bench", "Sweep sizes and parameters, print CSV");
  bench_cmd->add_option("--kind", bench.kind)->capture_default_str();
  bench_cmd->add_option("--sizes", bench.sizes)->delimiter(',')->capture_default_str();
  bench_cmd->add_option("--epsilon", bench.epsilons)
      ->delimiter(',')
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  bench_cmd->add_option("--c-ell", bench.c_ells)
      ->delimiter(',')
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  bench_cmd->add_option("--random,--queries", bench.queries, "Query pairs per setting")
      ->capture_default_str();
  bench_cmd->add_option("--seed", bench.seed)->capture_default_str();
  bench_cmd->add_option("--threads", bench.threads)->check(CLI::PositiveNumber)->capture_default_str();
  bench_cmd->callback([&] { status = cmd_bench(bench); });

  std::string stats_path;
  auto* stats_cmd = app.add_subcommand("stats", "Print oracle histograms as JSON lines");
  stats_cmd->add_option("oracle", stats_path, "Oracle file")->required();
  stats_cmd->callback([&] { status = cmd_stats(stats_path); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  } catch (const pado::InvalidParams& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const pado::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return status;
}
