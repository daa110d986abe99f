#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string_view>

#include "dg2pix/dyngraph.hpp"

namespace dg2pix {

namespace {

constexpr std::uint64_t kMaxSteps = 100'000'000;

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

template <class T>
T parse_number(std::string_view field, std::size_t line, const char* what) {
  field = trim(field);
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  T value{};
  const auto* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (field.empty() || ec != std::errc() || ptr != end)
    throw ParseError(line, std::string("invalid ") + what + " '" + std::string(field) + "'");
  return value;
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

struct RawEdge {
  std::int64_t t;
  Edge edge;
};

}  // namespace

DynamicGraph ingest_edge_list(std::istream& in, const IngestConfig& config) {
  if (config.mode == IngestConfig::Mode::timed && config.bucket_seconds <= 0)
    throw Error("bucket width must be positive");

  std::vector<RawEdge> raw;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = line;
    if (auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    view = trim(view);
    if (view.empty()) continue;

    std::vector<std::string_view> fields;
    std::size_t pos = 0;
    while (true) {
      auto comma = view.find(',', pos);
      fields.push_back(view.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos));
      if (comma == std::string_view::npos) break;
      pos = comma + 1;
    }
    if (fields.size() < 3 || fields.size() > 5)
      throw ParseError(line_no, "expected t,src,dst[,weight[,sign]] but found " + std::to_string(fields.size()) +
                                    " fields");

    RawEdge r;
    r.t = parse_number<std::int64_t>(fields[0], line_no, "time");
    if (config.mode == IngestConfig::Mode::indexed && r.t < 0) throw ParseError(line_no, "negative step index");
    r.edge.key = EdgeKey::canonical(parse_number<NodeId>(fields[1], line_no, "source node"),
                                    parse_number<NodeId>(fields[2], line_no, "target node"));
    if (fields.size() >= 4 && !trim(fields[3]).empty()) {
      r.edge.weight = parse_number<double>(fields[3], line_no, "weight");
      if (!std::isfinite(r.edge.weight)) throw ParseError(line_no, "non-finite weight");
    }
    if (fields.size() == 5 && !trim(fields[4]).empty()) {
      const int sign = parse_number<int>(fields[4], line_no, "sign");
      if (sign != 1 && sign != -1) throw ParseError(line_no, "sign must be +1 or -1");
      r.edge.sign = sign;
    }
    raw.push_back(r);
  }
  if (raw.empty()) throw Error("empty dataset");

  const auto [min_it, max_it] =
      std::minmax_element(raw.begin(), raw.end(), [](const RawEdge& a, const RawEdge& b) { return a.t < b.t; });
  const bool timed = config.mode == IngestConfig::Mode::timed;
  const std::int64_t width = timed ? config.bucket_seconds : 1;
  const std::int64_t first_bucket = floor_div(min_it->t, width);
  const auto steps = static_cast<std::uint64_t>(floor_div(max_it->t, width) - first_bucket) + 1;
  if (steps > kMaxSteps) throw Error("time range spans too many steps (" + std::to_string(steps) + ")");

  std::vector<std::vector<Edge>> buckets(steps);
  for (const auto& r : raw) buckets[static_cast<std::size_t>(floor_div(r.t, width) - first_bucket)].push_back(r.edge);

  std::vector<Snapshot> snapshots;
  snapshots.reserve(steps);
  for (std::size_t k = 0; k < steps; ++k) {
    snapshots.push_back(Snapshot::build(k, std::move(buckets[k])));
    if (timed) snapshots.back().wall_time = (first_bucket + static_cast<std::int64_t>(k)) * width;
  }
  return make_dynamic_graph(std::move(snapshots));
}

DynamicGraph ingest_edge_list_file(const std::string& path, const IngestConfig& config) {
  std::ifstream in(path);
  if (!in) throw NotFound("cannot open edge list '" + path + "'");
  return ingest_edge_list(in, config);
}

void export_edge_list(std::ostream& out, const DynamicGraph& g) {
  out << "# t,src,dst[,weight[,sign]]\n";
  std::array<char, 64> buf{};
  for (const auto& s : g.snapshots) {
    for (const auto& e : s.edges) {
      out << s.index << ',' << e.key.u << ',' << e.key.v;
      if (e.weight != 1.0 || e.sign) {
        auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), e.weight);
        out << ',' << std::string_view(buf.data(), static_cast<std::size_t>(ptr - buf.data()));
      }
      if (e.sign) out << ',' << (*e.sign > 0 ? "+1" : "-1");
      out << '\n';
    }
  }
}

// ---------------------------------------------------------------------------
// Binary hierarchy: header {magic "DG2PIX\0", u16 version, u64 T, u16 Lmax}, then
// per supergraph in level-major order a block {u64 byte length, u64 node count,
// u64 edge count, nodes as (u64 id, u32 count), edges as (u64 u, u64 v, u32 count)}.

namespace {

constexpr std::array<char, 7> kMagic = {'D', 'G', '2', 'P', 'I', 'X', '\0'};

template <class T>
void put(std::string& buf, T value) {
  for (std::size_t i = 0; i < sizeof(T); ++i) buf.push_back(static_cast<char>((static_cast<std::uint64_t>(value) >> (8 * i)) & 0xff));
}

template <class T>
T get(std::istream& in) {
  std::array<unsigned char, sizeof(T)> bytes{};
  if (!in.read(reinterpret_cast<char*>(bytes.data()), sizeof(T))) throw Error("truncated hierarchy file");
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
  return static_cast<T>(v);
}

}  // namespace

void write_hierarchy(std::ostream& out, const MultiscaleHierarchy& h) {
  std::string header(kMagic.begin(), kMagic.end());
  put<std::uint16_t>(header, kHierarchyFormatVersion);
  put<std::uint64_t>(header, h.steps());
  put<std::uint16_t>(header, static_cast<std::uint16_t>(h.top_level()));
  out.write(header.data(), static_cast<std::streamsize>(header.size()));

  std::string block;
  for (const auto& level : h.levels()) {
    for (const auto& sg : level) {
      block.clear();
      put<std::uint64_t>(block, sg.nodes.size());
      put<std::uint64_t>(block, sg.edges.size());
      for (const auto& n : sg.nodes) {
        put<std::uint64_t>(block, n.id);
        put<std::uint32_t>(block, n.count);
      }
      for (const auto& e : sg.edges) {
        put<std::uint64_t>(block, e.id.u);
        put<std::uint64_t>(block, e.id.v);
        put<std::uint32_t>(block, e.count);
      }
      std::string len;
      put<std::uint64_t>(len, block.size());
      out.write(len.data(), 8);
      out.write(block.data(), static_cast<std::streamsize>(block.size()));
    }
  }
  if (!out) throw Error("failed writing hierarchy");
}

MultiscaleHierarchy read_hierarchy(std::istream& in) {
  std::array<char, 7> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic) throw Error("not a hierarchy file (bad magic)");
  const auto version = get<std::uint16_t>(in);
  if (version != kHierarchyFormatVersion) throw Error("unsupported hierarchy version " + std::to_string(version));
  const auto steps = get<std::uint64_t>(in);
  const auto top = get<std::uint16_t>(in);
  if (steps == 0 || top != top_level(steps)) throw Error("inconsistent hierarchy header");

  std::vector<std::vector<Supergraph>> levels(top + 1);
  for (std::uint32_t l = 0; l <= top; ++l) {
    for (std::uint64_t s = 0; s < level_count(steps, l); ++s) {
      const auto length = get<std::uint64_t>(in);
      Supergraph sg;
      sg.interval = {l, s};
      sg.span = sg.interval.span(steps);
      const auto n_nodes = get<std::uint64_t>(in);
      const auto n_edges = get<std::uint64_t>(in);
      if (length != 16 + 12 * n_nodes + 20 * n_edges) throw Error("corrupt supergraph block length");
      sg.nodes.resize(n_nodes);
      for (auto& n : sg.nodes) {
        n.id = get<std::uint64_t>(in);
        n.count = get<std::uint32_t>(in);
      }
      sg.edges.resize(n_edges);
      for (auto& e : sg.edges) {
        e.id.u = get<std::uint64_t>(in);
        e.id.v = get<std::uint64_t>(in);
        e.count = get<std::uint32_t>(in);
      }
      levels[l].push_back(std::move(sg));
    }
  }
  return MultiscaleHierarchy(steps, std::move(levels));
}

}  // namespace dg2pix
