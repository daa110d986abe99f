#include <bit>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <ostream>

#include "json.hpp"

#include "dg2pix/embed.hpp"

namespace dg2pix {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void put_f32(std::ostream& out, double value) {
  const auto bits = std::bit_cast<std::uint32_t>(static_cast<float>(value));
  const char bytes[4] = {static_cast<char>(bits & 0xff), static_cast<char>((bits >> 8) & 0xff),
                         static_cast<char>((bits >> 16) & 0xff), static_cast<char>((bits >> 24) & 0xff)};
  out.write(bytes, 4);
}

double get_f32(std::istream& in) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4)) throw Error("truncated embedding data file");
  const std::uint32_t bits = b[0] | (b[1] << 8) | (b[2] << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
  return std::bit_cast<float>(bits);
}

json hyper_to_json(const Hyperparameters& h) {
  json j = json::object();
  if (h.epochs) j["epochs"] = *h.epochs;
  if (h.learning_rate) j["learning_rate"] = *h.learning_rate;
  if (h.wl_iterations) j["wl_iterations"] = *h.wl_iterations;
  if (h.negatives) j["negatives"] = *h.negatives;
  if (h.min_count) j["min_count"] = *h.min_count;
  if (h.sample) j["sample"] = *h.sample;
  if (h.bins) j["bins"] = *h.bins;
  if (h.range_max) j["range_max"] = *h.range_max;
  return j;
}

Hyperparameters hyper_from_json(const json& j, const json& seed) {
  Hyperparameters h;
  if (j.contains("epochs")) h.epochs = j["epochs"].get<int>();
  if (j.contains("learning_rate")) h.learning_rate = j["learning_rate"].get<double>();
  if (j.contains("wl_iterations")) h.wl_iterations = j["wl_iterations"].get<int>();
  if (j.contains("negatives")) h.negatives = j["negatives"].get<int>();
  if (j.contains("min_count")) h.min_count = j["min_count"].get<std::size_t>();
  if (j.contains("sample")) h.sample = j["sample"].get<double>();
  if (j.contains("bins")) h.bins = j["bins"].get<int>();
  if (j.contains("range_max")) h.range_max = j["range_max"].get<double>();
  if (!seed.is_null()) h.seed = seed.get<std::uint64_t>();
  return h;
}

}  // namespace

void save_embeddings(const EmbeddingMatrix& m, const std::string& manifest_path) {
  const fs::path manifest(manifest_path);
  fs::path data = manifest;
  data.replace_extension(".f32");

  json j;
  j["method"] = to_string(m.method);
  j["d"] = m.dimensions;
  j["count"] = m.rows.size();
  j["hyperparameters"] = hyper_to_json(m.hyperparameters);
  j["seed"] = m.hyperparameters.seed ? json(*m.hyperparameters.seed) : json(nullptr);
  j["data"] = data.filename().string();
  json keys = json::array();
  json degenerate = json::array();
  for (std::size_t i = 0; i < m.rows.size(); ++i) {
    keys.push_back({m.rows[i].key.level, m.rows[i].key.start});
    if (m.rows[i].degenerate) degenerate.push_back(i);
  }
  j["keys"] = keys;
  j["degenerate"] = degenerate;
  if (!m.epoch_loss.empty()) j["epoch_loss"] = m.epoch_loss;

  std::ofstream out(manifest);
  if (!out) throw Error("cannot write '" + manifest.string() + "'");
  out << j.dump(2) << '\n';

  std::ofstream bin(data, std::ios::binary);
  if (!bin) throw Error("cannot write '" + data.string() + "'");
  for (const auto& row : m.rows) {
    if (row.raw.size() != m.dimensions) throw Error("embedding row has wrong dimension");
    for (double x : row.raw) put_f32(bin, x);
  }
  for (const auto& row : m.rows)
    for (double x : row.normalized) put_f32(bin, x);
  if (!bin) throw Error("failed writing '" + data.string() + "'");
}

EmbeddingMatrix load_embeddings(const std::string& manifest_path) {
  std::ifstream in(manifest_path);
  if (!in) throw NotFound("cannot open embedding manifest '" + manifest_path + "'");
  const json j = json::parse(in);

  EmbeddingMatrix m;
  m.method = parse_method(j.at("method").get<std::string>());
  m.dimensions = j.at("d").get<std::size_t>();
  const auto count = j.at("count").get<std::size_t>();
  m.hyperparameters = hyper_from_json(j.value("hyperparameters", json::object()), j.value("seed", json(nullptr)));
  if (j.contains("epoch_loss")) m.epoch_loss = j["epoch_loss"].get<std::vector<double>>();

  const auto& keys = j.at("keys");
  if (keys.size() != count) throw Error("manifest key count does not match count");
  m.rows.resize(count);
  for (std::size_t i = 0; i < count; ++i) m.rows[i].key = {keys[i][0].get<std::uint32_t>(), keys[i][1].get<std::uint64_t>()};
  for (const auto& i : j.value("degenerate", json::array())) m.rows.at(i.get<std::size_t>()).degenerate = true;

  const fs::path data = fs::path(manifest_path).parent_path() / j.at("data").get<std::string>();
  std::ifstream bin(data, std::ios::binary);
  if (!bin) throw NotFound("cannot open embedding data '" + data.string() + "'");
  for (auto& row : m.rows) {
    row.raw.resize(m.dimensions);
    for (auto& x : row.raw) x = get_f32(bin);
  }
  for (auto& row : m.rows) {
    row.normalized.resize(m.dimensions);
    for (auto& x : row.normalized) x = get_f32(bin);
  }
  return m;
}

void export_embeddings_csv(std::ostream& out, const EmbeddingMatrix& m) {
  out << "method,level,start,degenerate";
  for (std::size_t i = 0; i < m.dimensions; ++i) out << ",raw_" << i;
  out << '\n';
  out.precision(17);
  for (const auto& row : m.rows) {
    out << to_string(m.method) << ',' << row.key.level << ',' << row.key.start << ',' << (row.degenerate ? 1 : 0);
    for (double x : row.raw) out << ',' << x;
    out << '\n';
  }
}

}  // namespace dg2pix
