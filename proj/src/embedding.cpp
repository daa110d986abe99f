#include <algorithm>
#include <cmath>

#include "dg2pix/embed.hpp"

namespace dg2pix {

std::string to_string(Method m) {
  switch (m) {
    case Method::graph2vec: return "graph2vec";
    case Method::gl2vec: return "gl2vec";
    case Method::fgsd: return "fgsd";
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  if (name == "graph2vec") return Method::graph2vec;
  if (name == "gl2vec") return Method::gl2vec;
  if (name == "fgsd") return Method::fgsd;
  throw Error("unknown embedding method '" + std::string(name) + "'");
}

std::optional<std::size_t> EmbeddingMatrix::find(IntervalId key) const {
  // rows are level-major and sorted, so binary search on the key works
  auto it = std::lower_bound(rows.begin(), rows.end(), key,
                             [](const Embedding& e, IntervalId k) { return e.key < k; });
  if (it != rows.end() && it->key == key) return static_cast<std::size_t>(it - rows.begin());
  for (std::size_t i = 0; i < rows.size(); ++i)
    if (rows[i].key == key) return i;
  return std::nullopt;
}

const Embedding& EmbeddingMatrix::at(IntervalId key) const {
  auto i = find(key);
  if (!i) throw NotFound("no " + to_string(method) + " embedding for " + to_string(key));
  return rows[*i];
}

std::vector<const Supergraph*> flatten(const MultiscaleHierarchy& h) {
  std::vector<const Supergraph*> out;
  out.reserve(h.total_count());
  for (const auto& level : h.levels())
    for (const auto& sg : level) out.push_back(&sg);
  return out;
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error("dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  const double na = std::sqrt(dot(a, a));
  const double nb = std::sqrt(dot(b, b));
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot(a, b) / (na * nb);
}

std::vector<double> l2_normalize(std::span<const double> raw, bool* degenerate) {
  const double norm = std::sqrt(dot(raw, raw));
  std::vector<double> out(raw.size(), 0.0);
  if (degenerate) *degenerate = norm == 0.0;
  if (norm == 0.0) return out;
  for (std::size_t i = 0; i < raw.size(); ++i) out[i] = raw[i] / norm;
  return out;
}

void normalize(EmbeddingMatrix& m) {
  for (auto& row : m.rows) {
    bool zero = false;
    row.normalized = l2_normalize(row.raw, &zero);
    row.degenerate = row.degenerate || zero;
  }
}

namespace {

EmbeddingMatrix train_documents(Method method, std::vector<WlDocument> docs, const Graph2VecParams& params) {
  PvDbowOptions options;
  options.dimensions = params.dimensions;
  options.epochs = params.epochs;
  options.learning_rate = params.learning_rate;
  options.negatives = params.negatives;
  options.sample = params.sample;
  options.seed = params.seed;
  options.exec = params.train_exec;
  options.track_loss = params.track_loss;
  prune_rare_words(docs, params.min_count);
  PvDbowResult trained = train_pvdbow(docs, options);

  EmbeddingMatrix m;
  m.method = method;
  m.dimensions = params.dimensions;
  m.hyperparameters.epochs = params.epochs;
  m.hyperparameters.learning_rate = params.learning_rate;
  m.hyperparameters.wl_iterations = params.wl_iterations;
  m.hyperparameters.negatives = params.negatives;
  m.hyperparameters.min_count = params.min_count;
  m.hyperparameters.sample = params.sample;
  m.hyperparameters.seed = params.seed;
  m.epoch_loss = std::move(trained.epoch_loss);
  m.rows.resize(docs.size());
  for (std::size_t i = 0; i < docs.size(); ++i) {
    auto v = trained.model.doc(i);
    m.rows[i].key = docs[i].key;
    m.rows[i].raw.assign(v.begin(), v.end());
    m.rows[i].degenerate = docs[i].degenerate;
  }
  normalize(m);
  return m;
}

}  // namespace

EmbeddingMatrix graph2vec(std::span<const Supergraph* const> graphs, const Graph2VecParams& params) {
  return train_documents(Method::graph2vec, wl_documents(graphs, params.wl_iterations, false, params.feature_exec),
                         params);
}

EmbeddingMatrix graph2vec(const MultiscaleHierarchy& h, const Graph2VecParams& params) {
  const auto graphs = flatten(h);
  return graph2vec(std::span<const Supergraph* const>(graphs), params);
}

EmbeddingMatrix gl2vec(std::span<const Supergraph* const> graphs, const Graph2VecParams& params) {
  return train_documents(Method::gl2vec, wl_documents(graphs, params.wl_iterations, true, params.feature_exec),
                         params);
}

EmbeddingMatrix gl2vec(const MultiscaleHierarchy& h, const Graph2VecParams& params) {
  const auto graphs = flatten(h);
  return gl2vec(std::span<const Supergraph* const>(graphs), params);
}

}  // namespace dg2pix
