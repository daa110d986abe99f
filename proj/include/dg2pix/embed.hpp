#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "dg2pix/dyngraph.hpp"
#include "dg2pix/pvdbow.hpp"

namespace dg2pix {

/// Compact undirected graph on nodes 0..n-1. Neighbor lists are sorted; a
/// self-loop lists the node as its own neighbor once.
struct SimpleGraph {
  std::vector<std::vector<std::uint32_t>> adjacency;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;  // u <= v, sorted

  std::size_t size() const { return adjacency.size(); }
};

SimpleGraph make_simple_graph(std::size_t nodes, std::vector<std::pair<std::uint32_t, std::uint32_t>> edges);
/// Node i of the result is the i-th smallest node id of the supergraph.
SimpleGraph to_simple_graph(const Supergraph& sg);
/// One node per edge (in canonical edge order); adjacent iff the edges share an endpoint.
SimpleGraph line_graph(const SimpleGraph& g);
SimpleGraph line_graph(const Supergraph& sg);

// ---------------------------------------------------------------------------
// Weisfeiler-Lehman documents

inline constexpr std::string_view kEmptyDocumentWord = "EMPTY";

/// 64-bit FNV-1a; stable across runs and platforms.
std::uint64_t stable_hash(std::string_view text);

struct WlDocument {
  IntervalId key;
  std::vector<std::string> words;
  bool degenerate = false;  // sentinel document for a graph with nothing to label
};

/// Iteration 0 labels are node degrees; iteration i hashes the node's label
/// with its sorted neighbor labels. Words are "<iteration>_<label>" for all
/// nodes over iterations 0..h.
WlDocument wl_features(const SimpleGraph& g, int iterations, IntervalId key = {});
WlDocument wl_features(const Supergraph& sg, int iterations);

/// Drops words seen fewer than `min_count` times across the corpus. A
/// document that would lose every word keeps its original words.
void prune_rare_words(std::vector<WlDocument>& docs, std::size_t min_count);

class Vocabulary {
 public:
  /// Ids follow first appearance across `docs` in order.
  static Vocabulary build(std::span<const WlDocument> docs);

  std::size_t size() const { return words_.size(); }
  std::optional<std::uint32_t> id(std::string_view word) const;
  const std::string& word(std::uint32_t id) const { return words_.at(id); }
  std::uint64_t frequency(std::uint32_t id) const { return frequency_.at(id); }
  std::span<const std::uint64_t> frequencies() const { return frequency_; }
  std::vector<std::uint32_t> encode(const WlDocument& doc) const;

 private:
  std::unordered_map<std::string, std::uint32_t> index_;
  std::vector<std::string> words_;
  std::vector<std::uint64_t> frequency_;
};

// ---------------------------------------------------------------------------
// Embeddings

enum class Method { graph2vec, gl2vec, fgsd };

std::string to_string(Method m);
Method parse_method(std::string_view name);

struct Embedding {
  IntervalId key;
  std::vector<double> raw;
  std::vector<double> normalized;
  bool degenerate = false;
};

struct Hyperparameters {
  std::optional<int> epochs;
  std::optional<double> learning_rate;
  std::optional<int> wl_iterations;
  std::optional<int> negatives;
  std::optional<std::size_t> min_count;
  std::optional<double> sample;
  std::optional<std::uint64_t> seed;
  std::optional<int> bins;
  std::optional<double> range_max;
};

struct EmbeddingMatrix {
  Method method = Method::graph2vec;
  std::size_t dimensions = 0;
  std::vector<Embedding> rows;  // level-major, then start
  Hyperparameters hyperparameters;
  std::vector<double> epoch_loss;

  const Embedding& at(IntervalId key) const;
  std::optional<std::size_t> find(IntervalId key) const;
};

struct Graph2VecParams {
  std::size_t dimensions = 128;
  int epochs = 1000;
  double learning_rate = 0.02;
  int wl_iterations = 2;
  int negatives = 5;
  std::size_t min_count = 5;
  double sample = 1e-4;  // karateclub's down_sampling default
  std::uint64_t seed = 42;
  Exec train_exec = Exec::serial;
  Exec feature_exec = Exec::parallel;
  bool track_loss = false;
};

struct FgsdParams {
  int bins = 128;
  double range_max = 20.0;
  Exec exec = Exec::parallel;
};

/// WL documents for each graph (optionally of its line graph). Graphs with
/// nothing to label get the EMPTY sentinel document.
std::vector<WlDocument> wl_documents(std::span<const Supergraph* const> graphs, int iterations, bool use_line_graph,
                                     Exec exec = Exec::parallel);

/// WL documents + shared vocabulary + PV-DBOW + L2 normalization.
EmbeddingMatrix graph2vec(std::span<const Supergraph* const> graphs, const Graph2VecParams& params = {});
EmbeddingMatrix graph2vec(const MultiscaleHierarchy& h, const Graph2VecParams& params = {});
/// graph2vec on the line graph of every supergraph.
EmbeddingMatrix gl2vec(std::span<const Supergraph* const> graphs, const Graph2VecParams& params = {});
EmbeddingMatrix gl2vec(const MultiscaleHierarchy& h, const Graph2VecParams& params = {});

/// Harmonic spectral distance L+(x,x) + L+(y,y) - 2 L+(x,y) for every ordered
/// node pair, computed per connected component; cross-component pairs get
/// `cross_component`. Row-major n x n.
std::vector<double> spectral_distances(const SimpleGraph& g, double cross_component);

/// Histogram of all n^2 spectral distances over [0, range_max] in `bins`
/// equal-width bins; values >= range_max land in the last bin.
std::vector<std::uint64_t> fgsd_histogram(const SimpleGraph& g, int bins, double range_max);

/// Single-graph FGSD embedding (raw = bin counts). Empty graph is an error.
Embedding fgsd(const Supergraph& sg, int bins = 128, double range_max = 20.0);
/// Empty supergraphs map to a zero vector flagged degenerate.
EmbeddingMatrix fgsd(std::span<const Supergraph* const> graphs, const FgsdParams& params = {});
EmbeddingMatrix fgsd(const MultiscaleHierarchy& h, const FgsdParams& params = {});

/// raw / |raw|_2; an all-zero vector stays zero and sets `degenerate`.
std::vector<double> l2_normalize(std::span<const double> raw, bool* degenerate = nullptr);
void normalize(EmbeddingMatrix& m);

double dot(std::span<const double> a, std::span<const double> b);
double cosine_similarity(std::span<const double> a, std::span<const double> b);

/// Pointers to every supergraph, level-major.
std::vector<const Supergraph*> flatten(const MultiscaleHierarchy& h);

// ---------------------------------------------------------------------------
// Files: JSON manifest + little-endian float32 sidecar (raw block, then
// normalized block, each count x d).

void save_embeddings(const EmbeddingMatrix& m, const std::string& manifest_path);
EmbeddingMatrix load_embeddings(const std::string& manifest_path);
void export_embeddings_csv(std::ostream& out, const EmbeddingMatrix& m);

}  // namespace dg2pix
