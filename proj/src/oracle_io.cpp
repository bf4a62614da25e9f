#include "pado/oracle_io.hpp"

#include <bit>
#include <fstream>
#include <istream>
#include <ostream>

#include "pado/errors.hpp"

namespace pado {

namespace {

constexpr char kMagic[4] = {'P', 'A', 'D', 'O'};

std::uint64_t fnv1a(std::span<const std::uint8_t> bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::uint8_t b : bytes) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  return h;
}

class Writer {
 public:
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u16(std::uint16_t v) { put(v, 2); }
  void u32(std::uint32_t v) { put(v, 4); }
  void u64(std::uint64_t v) { put(v, 8); }
  void f64(double v) { put(std::bit_cast<std::uint64_t>(v), 8); }
  void count(std::size_t v) { u32(static_cast<std::uint32_t>(v)); }

  std::vector<std::uint8_t>& bytes() { return out_; }

 private:
  void put(std::uint64_t v, int width) {
    for (int k = 0; k < width; ++k) out_.push_back(static_cast<std::uint8_t>(v >> (8 * k)));
  }

  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::uint8_t u8() { return static_cast<std::uint8_t>(get(1)); }
  std::uint16_t u16() { return static_cast<std::uint16_t>(get(2)); }
  std::uint32_t u32() { return static_cast<std::uint32_t>(get(4)); }
  std::uint64_t u64() { return get(8); }
  double f64() { return std::bit_cast<double>(get(8)); }

  // A count of items that each take at least `min_bytes`.
  std::uint32_t count(std::size_t min_bytes) {
    const std::uint32_t c = u32();
    if (static_cast<std::uint64_t>(c) * min_bytes > remaining()) fail("count exceeds file size");
    return c;
  }

  std::size_t remaining() const { return bytes_.size() - pos_; }

  [[noreturn]] static void fail(const std::string& what) {
    throw CorruptFile("oracle file: " + what);
  }

 private:
  std::uint64_t get(int width) {
    if (remaining() < static_cast<std::size_t>(width)) fail("truncated");
    std::uint64_t v = 0;
    for (int k = 0; k < width; ++k) v |= static_cast<std::uint64_t>(bytes_[pos_ + k]) << (8 * k);
    pos_ += width;
    return v;
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

void check(bool ok, const char* what) {
  if (!ok) Reader::fail(what);
}

}  // namespace

std::vector<std::uint8_t> serialize_oracle(const DistanceOracle& oracle) {
  Writer w;
  for (char c : kMagic) w.u8(static_cast<std::uint8_t>(c));
  w.u16(kOracleFormatVersion);
  const OracleParams& p = oracle.params();
  w.f64(p.epsilon);
  w.f64(p.c_ell);
  w.u32(p.ell);
  w.u64(p.r);
  w.count(oracle.node_count());

  w.count(oracle.regions().size());
  for (const RegionGraph& region : oracle.regions()) {
    w.count(region.edges.size());
    for (const RegionGraph::Edge& e : region.edges) {
      w.u32(e.u);
      w.u32(e.v);
      w.f64(e.length);
    }
  }
  for (RegionId k : oracle.home_region()) w.u32(k);

  w.count(oracle.skeleton().size());
  for (const SkeletonNode& node : oracle.skeleton()) {
    w.u32(node.parent);
    w.u32(node.depth);
    w.u8(static_cast<std::uint8_t>(node.paths.size()));
    for (const SeparatorPath& path : node.paths) {
      w.count(path.size());
      for (NodeId v : path.nodes) w.u32(v);
      for (Length d : path.prefix_dist) w.f64(d);
    }
  }
  for (DecompId x : oracle.leafmost()) w.u32(x);

  const ConnectionStore& store = oracle.store();
  w.count(store.nodes.size());
  for (std::size_t slot = 0; slot < store.nodes.size(); ++slot) {
    w.u32(store.nodes[slot]);
    w.count(store.key_offset[slot + 1] - store.key_offset[slot]);
    for (std::uint64_t j = store.key_offset[slot]; j < store.key_offset[slot + 1]; ++j) {
      w.u32(store.key_node[j]);
      w.u8(store.key_selector[j]);
      w.count(store.conn_offset[j + 1] - store.conn_offset[j]);
      for (std::uint64_t c = store.conn_offset[j]; c < store.conn_offset[j + 1]; ++c) {
        w.u32(store.conn_pos[c]);
        w.f64(store.conn_dist[c]);
      }
    }
  }
  w.u64(fnv1a(w.bytes()));
  return std::move(w.bytes());
}

DistanceOracle deserialize_oracle(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  for (char c : kMagic) check(r.u8() == static_cast<std::uint8_t>(c), "bad magic");
  const std::uint16_t version = r.u16();
  if (version != kOracleFormatVersion) {
    throw VersionMismatch("oracle file version " + std::to_string(version) + ", expected " +
                          std::to_string(kOracleFormatVersion));
  }
  check(bytes.size() >= 14, "truncated");
  const auto body = bytes.first(bytes.size() - 8);
  Reader tail(bytes.last(8));
  check(fnv1a(body) == tail.u64(), "checksum mismatch");
  r = Reader(body);
  for (int k = 0; k < 6; ++k) r.u8();

  OracleParams params;
  params.epsilon = r.f64();
  params.c_ell = r.f64();
  params.ell = r.u32();
  params.r = r.u64();
  check(params.epsilon > 0.0 && params.c_ell > 0.0, "bad parameters");
  const std::uint32_t n = r.u32();

  std::vector<RegionGraph> regions(r.count(4));
  for (RegionGraph& region : regions) {
    region.edges.resize(r.count(16));
    for (RegionGraph::Edge& e : region.edges) {
      e.u = r.u32();
      e.v = r.u32();
      e.length = r.f64();
      check(e.u < n && e.v < n && e.length >= 0.0, "bad region edge");
    }
  }
  check(r.remaining() >= static_cast<std::uint64_t>(n) * 4, "truncated");
  std::vector<RegionId> home_region(n);
  for (RegionId& k : home_region) {
    k = r.u32();
    check(k < regions.size(), "bad home region");
  }

  std::vector<SkeletonNode> skeleton(r.count(9));
  for (SkeletonNode& node : skeleton) {
    node.parent = r.u32();
    check(node.parent == kNoDecomp || node.parent < skeleton.size(), "bad decomposition parent");
    node.depth = r.u32();
    const std::uint8_t paths = r.u8();
    check(paths <= 2, "bad path count");
    node.paths.resize(paths);
    for (SeparatorPath& path : node.paths) {
      const std::uint32_t size = r.count(12);
      path.nodes.resize(size);
      path.prefix_dist.resize(size);
      for (NodeId& v : path.nodes) {
        v = r.u32();
        check(v < n, "bad path node");
      }
      for (Length& d : path.prefix_dist) d = r.f64();
    }
  }
  check(r.remaining() >= static_cast<std::uint64_t>(n) * 4, "truncated");
  std::vector<DecompId> leafmost(n);
  for (DecompId& x : leafmost) {
    x = r.u32();
    check(x == kNoDecomp || x < skeleton.size(), "bad leafmost entry");
  }

  ConnectionStore store;
  const std::uint32_t slots = r.count(8);
  for (std::uint32_t slot = 0; slot < slots; ++slot) {
    const NodeId b = r.u32();
    check(b < n && (store.nodes.empty() || store.nodes.back() < b), "bad boundary node");
    store.nodes.push_back(b);
    const std::uint32_t keys = r.count(9);
    for (std::uint32_t j = 0; j < keys; ++j) {
      const DecompId x = r.u32();
      const std::uint8_t selector = r.u8();
      check(x < skeleton.size() && selector < skeleton[x].paths.size(), "bad connection key");
      store.key_node.push_back(x);
      store.key_selector.push_back(selector);
      const std::uint32_t conns = r.count(12);
      for (std::uint32_t c = 0; c < conns; ++c) {
        const std::uint32_t pos = r.u32();
        check(pos < skeleton[x].paths[selector].size(), "bad connection position");
        store.conn_pos.push_back(pos);
        store.conn_dist.push_back(r.f64());
      }
      store.conn_offset.push_back(store.conn_pos.size());
    }
    store.key_offset.push_back(store.key_node.size());
  }
  check(r.remaining() == 0, "trailing bytes");
  return DistanceOracle::assemble(params, std::move(regions), std::move(home_region),
                                  std::move(skeleton), std::move(leafmost), std::move(store));
}

void save_oracle(const DistanceOracle& oracle, std::ostream& out) {
  const std::vector<std::uint8_t> bytes = serialize_oracle(oracle);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("failed to write oracle");
}

DistanceOracle load_oracle(std::istream& in) {
  std::vector<std::uint8_t> bytes;
  char buffer[1 << 16];
  while (in.read(buffer, sizeof buffer) || in.gcount() > 0) {
    bytes.insert(bytes.end(), buffer, buffer + in.gcount());
  }
  return deserialize_oracle(bytes);
}

void save_oracle_file(const DistanceOracle& oracle, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path + " for writing");
  save_oracle(oracle, out);
}

DistanceOracle load_oracle_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  return load_oracle(in);
}

}  // namespace pado
