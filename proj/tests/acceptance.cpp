// Acceptance run: one PASS/FAIL line per criterion, details indented below.
// Exit status is nonzero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "checks.hpp"
#include "pado/connections.hpp"
#include "pado/oracle.hpp"
#include "pado/oracle_io.hpp"
#include "test_support.hpp"

namespace {

using namespace pado;
namespace fs = std::filesystem;

struct Instance {
  std::string name;
  std::function<EmbeddedPlanarGraph()> make;
};

struct Outcome {
  bool pass = true;
  std::vector<std::string> details;

  void note(std::string line) { details.push_back(std::move(line)); }
  void fail(std::string line) {
    pass = false;
    details.push_back("FAILED: " + std::move(line));
  }
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::uint32_t phase_budget(double eps) { return 2 + static_cast<std::uint32_t>(std::ceil(2.0 / eps)); }

// Audits every build for criterion 3, whichever criterion triggered it.
struct BudgetLedger {
  std::uint64_t builds = 0;
  std::uint64_t non_initial = 0;
  std::uint32_t worst_dart_insertions = 0;
  double min_slack = kInfinity;
  Outcome outcome;

  void record(const std::string& name, const PreprocessReport& rep, double eps) {
    ++builds;
    non_initial += rep.audit.non_initial;
    worst_dart_insertions = std::max(worst_dart_insertions, rep.max_dart_insertions);
    min_slack = std::min(min_slack, rep.audit.min_potential_slack);
    if (rep.audit.max_per_node > phase_budget(eps)) {
      outcome.fail(fmt("%s eps=%g: %u connections in one phase, budget %u", name.c_str(), eps,
                       rep.audit.max_per_node, phase_budget(eps)));
    }
    if (rep.audit.min_potential_slack < -1e-9) {
      outcome.fail(fmt("%s eps=%g: potential slack %.3e", name.c_str(), eps, rep.audit.min_potential_slack));
    }
  }
};

BudgetLedger ledger;

DistanceOracle build(const std::string& name, const EmbeddedPlanarGraph& g, double eps, double c_ell,
                     const PreprocessOptions& options = {}, PreprocessReport* out = nullptr) {
  PreprocessReport rep;
  DistanceOracle oracle = DistanceOracle::preprocess(g, make_params(eps, c_ell, g.node_count()), options, &rep);
  ledger.record(name, rep, eps);
  if (out != nullptr) *out = rep;
  return oracle;
}

Outcome stretch() {
  Outcome out;
  using testing::delaunay;
  using testing::grid;
  const std::vector<Instance> instances{
      {"grid 10x10", [] { return grid(10, 10); }},
      {"grid 30x30", [] { return grid(30, 30); }},
      {"grid 60x60", [] { return grid(60, 60); }},
      {"grid 100x100", [] { return grid(100, 100); }},
      {"grid 50x50 uniform", [] { return grid(50, 50, 2, LengthModel::uniform); }},
      {"delaunay 1000", [] { return delaunay(1000, 1); }},
      {"delaunay 5000", [] { return delaunay(5000, 2); }},
      {"delaunay 20000", [] { return delaunay(20000, 3); }},
      {"delaunay 5000 uniform", [] { return delaunay(5000, 4, LengthModel::uniform); }},
      {"stacked 3000", [] { return testing::stacked(3000, 5); }},
  };
  constexpr std::size_t kSources = 20;
  constexpr std::size_t kPerSource = 50;
  for (const Instance& inst : instances) {
    const EmbeddedPlanarGraph g = inst.make();
    // Small c_ell keeps the boundary store busy even when r is large.
    for (double c_ell : {1.0, 0.2}) {
      if (c_ell != 1.0 && g.node_count() > 5000) continue;
      for (double eps : {0.1, 0.5, 1.0}) {
        const DistanceOracle oracle = build(inst.name, g, eps, c_ell);
        std::mt19937_64 rng(g.node_count() * 31 + static_cast<std::uint64_t>(eps * 10));
        double worst = 1.0;
        std::size_t violations = 0;
        std::size_t separator = 0;
        for (std::size_t k = 0; k < kSources; ++k) {
          const auto s = static_cast<NodeId>(rng() % g.node_count());
          const ShortestPathTree exact = sssp(g, s);
          for (std::size_t j = 0; j < kPerSource; ++j) {
            const auto t = static_cast<NodeId>(rng() % g.node_count());
            const QueryResult q = oracle.query(s, t);
            const Length d = exact.dist[t];
            if (q.witness.kind == Witness::Kind::separator) ++separator;
            if (q.estimate < d * (1.0 - 1e-9) || q.estimate > (1.0 + eps) * d * (1.0 + 1e-9)) ++violations;
            if (d > 0.0) worst = std::max(worst, q.estimate / d);
          }
        }
        const std::string line = fmt("%s eps=%g c_ell=%g: %zu pairs, max stretch %.6f, %zu via separators",
                                     inst.name.c_str(), eps, c_ell, kSources * kPerSource, worst, separator);
        if (violations > 0) {
          out.fail(line + fmt(", %zu violations", violations));
        } else {
          out.note(line);
        }
      }
    }
  }
  return out;
}

Outcome cover() {
  Outcome out;
  using testing::delaunay;
  using testing::grid;
  const std::vector<Instance> instances{
      {"grid 10x10", [] { return grid(10, 10); }},
      {"grid 15x20 uniform", [] { return grid(15, 20, 3, LengthModel::uniform); }},
      {"delaunay 300", [] { return delaunay(300, 6); }},
      {"delaunay 250 uniform", [] { return delaunay(250, 7, LengthModel::uniform); }},
      {"stacked 300", [] { return testing::stacked(300, 8); }},
  };
  for (const Instance& inst : instances) {
    const EmbeddedPlanarGraph g = inst.make();
    const DecompositionTree tree = build_decomposition(g);
    for (double c_ell : {1.0, 0.3}) {
      for (double eps : {0.1, 0.5, 1.0}) {
        std::set<std::tuple<DecompId, std::uint8_t, NodeId>> seen;
        std::size_t lists = 0;
        std::size_t bad = 0;
        PreprocessOptions options;
        options.on_piece = [&](const PieceContext& ctx) {
          std::vector<std::vector<Length>> from;
          for (NodeId p : ctx.path->nodes) from.push_back(testing::bellman_ford(*ctx.piece, p));
          for (std::size_t k = 0; k < ctx.designated.size(); ++k) {
            const NodeId v = ctx.designated[k];
            const ConnectionList& list = ctx.result->lists[k];
            bool ok = verify_cover(*ctx.piece, v, *ctx.path, list, eps);
            for (std::size_t i = 0; i < ctx.path->size() && ok; ++i) {
              Length best = kInfinity;
              for (const Connection& c : list) best = std::min(best, ctx.path->between(i, c.path_index) + c.dist);
              ok = best <= (1.0 + eps) * from[i][v] * (1.0 + 1e-9);
            }
            if (!ok) ++bad;
            ++lists;
            seen.emplace(ctx.x, ctx.selector, ctx.to_global[v]);
          }
        };
        const DistanceOracle oracle = build(inst.name, g, eps, c_ell, options);

        // Every boundary node must have been checked against both paths of every
        // ancestor whose separator shares its component.
        std::size_t required = 0;
        std::size_t missing = 0;
        std::map<DecompId, std::vector<std::uint32_t>> component;
        auto same_component = [&](DecompId x, NodeId b) {
          const DecompNode& node = tree.nodes[x];
          auto [it, fresh] = component.try_emplace(x);
          if (fresh) {
            it->second = connected_components(induced_subgraph(g, node.piece_nodes).graph).component_of;
          }
          auto at = [&](NodeId v) {
            return std::lower_bound(node.piece_nodes.begin(), node.piece_nodes.end(), v) - node.piece_nodes.begin();
          };
          return it->second[at(b)] == it->second[at(node.paths[0].nodes[0])];
        };
        for (NodeId b : oracle.store().nodes) {
          for (DecompId x : relevant_ancestors(tree, b)) {
            if (!tree.nodes[x].has_separator() || !same_component(x, b)) continue;
            for (std::uint8_t sel = 0; sel < 2; ++sel) {
              ++required;
              if (!seen.contains({x, sel, b})) ++missing;
            }
          }
        }
        const std::string line = fmt("%s eps=%g c_ell=%g: %zu lists checked, %zu required pairs, %zu boundary nodes",
                                     inst.name.c_str(), eps, c_ell, lists, required, oracle.store().nodes.size());
        if (bad > 0 || missing > 0) {
          out.fail(line + fmt(", %zu not covering, %zu missing", bad, missing));
        } else {
          out.note(line);
        }
      }
    }
  }
  return out;
}

Outcome budget() {
  Outcome out = ledger.outcome;
  out.note(fmt("%llu builds audited, %llu non-initial connections, min potential slack %.3e",
               static_cast<unsigned long long>(ledger.builds), static_cast<unsigned long long>(ledger.non_initial),
               ledger.min_slack));
  if (ledger.builds == 0) out.fail("no builds audited");
  return out;
}

Outcome linear_space() {
  Outcome out;
  const std::vector<std::pair<std::string, std::function<EmbeddedPlanarGraph(std::size_t)>>> families{
      {"delaunay", [](std::size_t n) { return testing::delaunay(n, 11); }},
      {"grid", [](std::size_t n) {
         const auto side = static_cast<std::size_t>(std::lround(std::sqrt(static_cast<double>(n))));
         return testing::grid(side, side);
       }},
  };
  for (const auto& [name, make] : families) {
    double lo = kInfinity;
    double hi = 0.0;
    std::string trend;
    for (std::size_t n : {100u, 1000u, 10000u}) {
      const EmbeddedPlanarGraph g = make(n);
      PreprocessReport rep;
      build(name, g, 0.5, 1.0, {}, &rep);
      lo = std::min(lo, rep.c_space);
      hi = std::max(hi, rep.c_space);
      trend += fmt(" n=%zu:%.2f(B=%zu)", g.node_count(), rep.c_space, rep.boundary_nodes);
    }
    const std::string line = fmt("%s connections/n%s, ratio %.2f", name.c_str(), trend.c_str(), hi / lo);
    if (hi < 2.0 * lo) {
      out.note(line);
    } else {
      out.fail(line);
    }
  }
  return out;
}

Outcome structure() {
  Outcome out;
  struct Case {
    Instance inst;
    std::size_t sample_every;
  };
  using testing::delaunay;
  using testing::grid;
  const std::vector<Case> cases{
      {{"grid 10x10", [] { return grid(10, 10); }}, 1},
      {{"grid 30x30 uniform", [] { return grid(30, 30, 4, LengthModel::uniform); }}, 1},
      {{"delaunay 1000", [] { return delaunay(1000, 12); }}, 1},
      {{"delaunay 800 uniform", [] { return delaunay(800, 13, LengthModel::uniform); }}, 1},
      {{"stacked 1000", [] { return testing::stacked(1000, 14); }}, 1},
      {{"grid 100x100", [] { return grid(100, 100); }}, 25},
      {{"delaunay 10000", [] { return delaunay(10000, 15); }}, 25},
      {{"delaunay 20000", [] { return delaunay(20000, 16); }}, 50},
  };
  double worst_cd = 0.0;
  for (const Case& c : cases) {
    const EmbeddedPlanarGraph g = c.inst.make();
    std::string sizes;
    std::set<std::uint64_t> rs{16};
    for (double eps : {0.1, 0.5, 1.0}) rs.insert(make_params(eps, 1.0, g.node_count()).r);
    for (std::uint64_t rr : rs) {
      const RDivision div = compute_rdivision(g, rr);
      testing::Problems p = testing::check_rdivision(g, div);
      const double limit = std::ceil(4.0 * std::sqrt(static_cast<double>(rr)));
      for (const auto& b : div.region_boundary) {
        if (b.size() > limit) p.push_back("region boundary above ceil(4 sqrt r)");
      }
      for (const std::string& what : p) out.fail(c.inst.name + fmt(" r=%llu: ", static_cast<unsigned long long>(rr)) + what);
      sizes += fmt(" r=%llu:%zu regions c_B=%.2f", static_cast<unsigned long long>(rr), div.region_count(), div.c_B);
    }
    const DecompositionTree tree = build_decomposition(g);
    const testing::DecompositionCheck dc = testing::check_decomposition(g, tree, c.sample_every);
    for (const std::string& what : dc.problems) out.fail(c.inst.name + ": " + what);
    if (dc.worst_balance > 2.0 / 3.0) out.fail(c.inst.name + fmt(": balance %.3f", dc.worst_balance));
    worst_cd = std::max(worst_cd, dc.c_d);
    out.note(fmt("%s: depth %u, c_d %.3f, worst balance %.3f, %zu splits checked%s;%s", c.inst.name.c_str(), dc.depth,
                 dc.c_d, dc.worst_balance, dc.splits_checked, c.sample_every > 1 ? " (sampled)" : " (exhaustive)",
                 sizes.c_str()));
  }
  out.note(fmt("max c_d %.3f", worst_cd));
  return out;
}

Length quadratic_scan(const std::vector<ScanEntry>& entries, const std::vector<Length>& prefix) {
  Length best = kInfinity;
  for (const ScanEntry& a : entries) {
    for (const ScanEntry& b : entries) {
      if (a.side == 0 && b.side == 1) best = std::min(best, a.value + std::abs(prefix[a.pos] - prefix[b.pos]) + b.value);
    }
  }
  return best;
}

Outcome equivalences() {
  Outcome out;
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> unit(0.0, 10.0);
  std::size_t scan_mismatch = 0;
  constexpr std::size_t kScans = 5000;
  for (std::size_t c = 0; c < kScans; ++c) {
    const std::size_t len = 1 + rng() % 40;
    std::vector<Length> prefix{0.0};
    for (std::size_t i = 1; i < len; ++i) prefix.push_back(prefix.back() + (rng() % 6 == 0 ? 0.0 : unit(rng)));
    std::vector<ScanEntry> entries(rng() % 40);
    for (ScanEntry& e : entries) {
      e.pos = static_cast<std::uint32_t>(rng() % len);
      e.side = static_cast<std::uint8_t>(rng() % 2);
      e.value = unit(rng);
    }
    std::stable_sort(entries.begin(), entries.end(), [](const ScanEntry& a, const ScanEntry& b) { return a.pos < b.pos; });
    const Length got = merge_scan(entries, prefix);
    const Length want = quadratic_scan(entries, prefix);
    const bool same = want == kInfinity ? got == kInfinity : std::abs(got - want) <= 1e-9 * std::max(1.0, want);
    if (!same) ++scan_mismatch;
  }
  if (scan_mismatch > 0) {
    out.fail(fmt("merge_scan differs from brute force on %zu of %zu sequences", scan_mismatch, kScans));
  } else {
    out.note(fmt("merge_scan equals brute force on %zu random sequences", kScans));
  }

  std::size_t streams = 0;
  std::size_t steps = 0;
  std::size_t replay_mismatch = 0;
  std::uint32_t worst_insertions = 0;
  using testing::delaunay;
  using testing::grid;
  const std::vector<EmbeddedPlanarGraph> family{grid(12, 12), grid(10, 14, 2, LengthModel::uniform), delaunay(300, 3),
                                                delaunay(250, 4, LengthModel::uniform), testing::stacked(300, 5)};
  for (const EmbeddedPlanarGraph& g : family) {
    for (NodeId root : {NodeId{0}, static_cast<NodeId>(g.node_count() / 2)}) {
      for (const SeparatorPath& p : testing::sample_paths(g, root)) {
        const ParentChangeStream stream = parent_change_stream(g, p);
        ++streams;
        replay_stream(g, p, stream, [&](std::size_t i, const std::vector<DartId>& parent) {
          ++steps;
          if (parent != shortest_path_tree(g, p.nodes[i]).parent_dart) ++replay_mismatch;
        });
        if (p.size() < 2) continue;
        // Insertions are counted on the piece cut open along the path.
        const CutPiece cut = cut_along_path(g, p);
        const Components comps = connected_components(cut.graph);
        for (const SeparatorPath* copy : {&cut.copy_a, &cut.copy_b}) {
          std::vector<NodeId> nodes;
          for (NodeId v = 0; v < cut.graph.node_count(); ++v) {
            if (comps.component_of[v] == comps.component_of[copy->nodes.front()]) nodes.push_back(v);
          }
          std::vector<NodeId> local(cut.graph.node_count(), kNoNode);
          for (NodeId i = 0; i < nodes.size(); ++i) local[nodes[i]] = i;
          const Subgraph sub = induced_subgraph(cut.graph, nodes);
          SeparatorPath lp = *copy;
          for (NodeId& v : lp.nodes) v = local[v];
          worst_insertions = std::max(worst_insertions, max_insertions_per_dart(sub.graph, parent_change_stream(sub.graph, lp)));
        }
      }
    }
  }
  worst_insertions = std::max(worst_insertions, ledger.worst_dart_insertions);
  const std::string replay = fmt("%zu streams, %zu replayed trees", streams, steps);
  if (replay_mismatch > 0) {
    out.fail(replay + fmt(", %zu differ from independent trees", replay_mismatch));
  } else {
    out.note(replay + ", all equal to independent shortest-path trees");
  }
  const std::string darts = fmt("max insertions of one dart across a stream: %u (including every oracle build)",
                                worst_insertions);
  if (worst_insertions > 1) {
    out.fail(darts);
  } else {
    out.note(darts);
  }
  return out;
}

Outcome determinism() {
  Outcome out;
  const fs::path dir = fs::temp_directory_path() / "pado_acceptance";
  fs::create_directories(dir);
  const std::vector<Instance> instances{
      {"grid 30x30 uniform", [] { return testing::grid(30, 30, 21, LengthModel::uniform); }},
      {"delaunay 5000", [] { return testing::delaunay(5000, 22); }},
      {"stacked 2000", [] { return testing::stacked(2000, 23); }},
  };
  for (const Instance& inst : instances) {
    const EmbeddedPlanarGraph g = inst.make();
    const std::vector<std::uint8_t> a = serialize_oracle(build(inst.name, g, 0.5, 0.5));
    const DistanceOracle second = build(inst.name, g, 0.5, 0.5);
    const std::vector<std::uint8_t> b = serialize_oracle(second);
    if (a != b) out.fail(inst.name + ": rebuild differs");

    const fs::path file = dir / "oracle.bin";
    save_oracle_file(second, file.string());
    const DistanceOracle loaded = load_oracle_file(file.string());
    if (serialize_oracle(loaded) != a) out.fail(inst.name + ": reloaded oracle serializes differently");
    std::mt19937_64 rng(77);
    std::size_t differ = 0;
    for (int k = 0; k < 100; ++k) {
      const auto s = static_cast<NodeId>(rng() % g.node_count());
      const auto t = static_cast<NodeId>(rng() % g.node_count());
      const QueryResult x = second.query(s, t);
      const QueryResult y = loaded.query(s, t);
      if (std::bit_cast<std::uint64_t>(x.estimate) != std::bit_cast<std::uint64_t>(y.estimate) ||
          x.witness.kind != y.witness.kind || x.witness.b != y.witness.b || x.witness.b2 != y.witness.b2 ||
          x.witness.x != y.witness.x || x.witness.selector != y.witness.selector) {
        ++differ;
      }
    }
    if (differ > 0) out.fail(inst.name + fmt(": %zu of 100 probes differ after reload", differ));
    out.note(fmt("%s: %zu bytes, rebuild %s, 100 probes replayed", inst.name.c_str(), a.size(),
                 a == b ? "identical" : "different"));
  }
  fs::remove_all(dir);
  return out;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
  };
  // Budget audit reads the ledger filled by the builds before it.
  const std::vector<Criterion> criteria{
      {"1 stretch guarantee", stretch},
      {"2 cover soundness", cover},
      {"4 linear-space trend", linear_space},
      {"5 structural invariants", structure},
      {"6 oracle equivalences", equivalences},
      {"7 determinism and serialization", determinism},
      {"3 connection budget and potential", budget},
  };
  std::map<std::string, std::pair<bool, std::vector<std::string>>> results;
  for (const Criterion& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    o.note(fmt("%.1f s", std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()));
    results[c.name] = {o.pass, o.details};
  }
  bool all = true;
  for (const auto& [name, result] : results) {
    std::printf("%s criterion %s\n", result.first ? "PASS" : "FAIL", name.c_str());
    for (const std::string& line : result.second) std::printf("    %s\n", line.c_str());
    all = all && result.first;
  }
  std::fflush(stdout);
  return all ? 0 : 1;
}
