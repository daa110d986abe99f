#include <algorithm>
#include <cstdio>
#include <unordered_map>
#include <omp.h>

#include "dg2pix/embed.hpp"

namespace dg2pix {

SimpleGraph make_simple_graph(std::size_t nodes, std::vector<std::pair<std::uint32_t, std::uint32_t>> edges) {
  SimpleGraph g;
  g.adjacency.resize(nodes);
  for (auto& [u, v] : edges) {
    if (u >= nodes || v >= nodes) throw Error("edge endpoint out of range");
    if (u > v) std::swap(u, v);
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  for (auto [u, v] : edges) {
    g.adjacency[u].push_back(v);
    if (u != v) g.adjacency[v].push_back(u);
  }
  for (auto& nbrs : g.adjacency) std::sort(nbrs.begin(), nbrs.end());
  g.edges = std::move(edges);
  return g;
}

SimpleGraph to_simple_graph(const Supergraph& sg) {
  auto rank = [&](NodeId id) {
    auto it = std::lower_bound(sg.nodes.begin(), sg.nodes.end(), id,
                               [](const Counted<NodeId>& n, NodeId x) { return n.id < x; });
    return static_cast<std::uint32_t>(it - sg.nodes.begin());
  };
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
  edges.reserve(sg.edges.size());
  for (const auto& e : sg.edges) edges.emplace_back(rank(e.id.u), rank(e.id.v));
  return make_simple_graph(sg.nodes.size(), std::move(edges));
}

SimpleGraph line_graph(const SimpleGraph& g) {
  // incident[v] lists the edges touching v; each pair of them is a line edge.
  std::vector<std::vector<std::uint32_t>> incident(g.size());
  for (std::uint32_t e = 0; e < g.edges.size(); ++e) {
    const auto [u, v] = g.edges[e];
    incident[u].push_back(e);
    if (u != v) incident[v].push_back(e);
  }
  std::vector<std::pair<std::uint32_t, std::uint32_t>> line_edges;
  for (const auto& inc : incident)
    for (std::size_t i = 0; i < inc.size(); ++i)
      for (std::size_t j = i + 1; j < inc.size(); ++j) line_edges.emplace_back(inc[i], inc[j]);
  return make_simple_graph(g.edges.size(), std::move(line_edges));
}

SimpleGraph line_graph(const Supergraph& sg) { return line_graph(to_simple_graph(sg)); }

std::uint64_t stable_hash(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

WlDocument wl_features(const SimpleGraph& g, int iterations, IntervalId key) {
  if (iterations < 0) throw Error("WL iterations must be non-negative");
  WlDocument doc;
  doc.key = key;
  const std::size_t n = g.size();
  doc.words.reserve(n * static_cast<std::size_t>(iterations + 1));

  std::vector<std::string> labels(n);
  for (std::size_t v = 0; v < n; ++v) labels[v] = std::to_string(g.adjacency[v].size());
  for (const auto& l : labels) doc.words.push_back("0_" + l);

  std::vector<std::string> next(n);
  std::vector<const std::string*> nbr;
  std::string buf;
  for (int it = 1; it <= iterations; ++it) {
    for (std::size_t v = 0; v < n; ++v) {
      nbr.clear();
      for (auto u : g.adjacency[v]) nbr.push_back(&labels[u]);
      std::sort(nbr.begin(), nbr.end(), [](const std::string* a, const std::string* b) { return *a < *b; });
      buf = labels[v];
      buf += '|';
      for (std::size_t i = 0; i < nbr.size(); ++i) {
        if (i) buf += ',';
        buf += *nbr[i];
      }
      char hex[17];
      std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(stable_hash(buf)));
      next[v] = hex;
    }
    labels.swap(next);
    const std::string prefix = std::to_string(it) + "_";
    for (const auto& l : labels) doc.words.push_back(prefix + l);
  }
  return doc;
}

WlDocument wl_features(const Supergraph& sg, int iterations) {
  return wl_features(to_simple_graph(sg), iterations, sg.interval);
}

std::vector<WlDocument> wl_documents(std::span<const Supergraph* const> graphs, int iterations, bool use_line_graph,
                                     Exec exec) {
  std::vector<WlDocument> docs(graphs.size());
  const auto n = static_cast<std::int64_t>(graphs.size());
#pragma omp parallel for schedule(dynamic, 1) if (exec == Exec::parallel)
  for (std::int64_t i = 0; i < n; ++i) {
    const Supergraph& sg = *graphs[i];
    const SimpleGraph g = use_line_graph ? line_graph(sg) : to_simple_graph(sg);
    if (g.size() == 0) {
      docs[i].key = sg.interval;
      docs[i].words = {std::string(kEmptyDocumentWord)};
      docs[i].degenerate = true;
    } else {
      docs[i] = wl_features(g, iterations, sg.interval);
    }
  }
  return docs;
}

void prune_rare_words(std::vector<WlDocument>& docs, std::size_t min_count) {
  if (min_count <= 1) return;
  std::unordered_map<std::string, std::size_t> freq;
  for (const auto& doc : docs)
    for (const auto& w : doc.words) ++freq[w];
  for (auto& doc : docs) {
    std::vector<std::string> kept;
    for (const auto& w : doc.words)
      if (freq[w] >= min_count) kept.push_back(w);
    if (!kept.empty()) doc.words = std::move(kept);
  }
}

Vocabulary Vocabulary::build(std::span<const WlDocument> docs) {
  Vocabulary v;
  for (const auto& doc : docs) {
    for (const auto& w : doc.words) {
      auto [it, inserted] = v.index_.try_emplace(w, static_cast<std::uint32_t>(v.words_.size()));
      if (inserted) {
        v.words_.push_back(w);
        v.frequency_.push_back(0);
      }
      ++v.frequency_[it->second];
    }
  }
  return v;
}

std::optional<std::uint32_t> Vocabulary::id(std::string_view word) const {
  auto it = index_.find(std::string(word));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::uint32_t> Vocabulary::encode(const WlDocument& doc) const {
  std::vector<std::uint32_t> ids;
  ids.reserve(doc.words.size());
  for (const auto& w : doc.words) {
    auto it = index_.find(w);
    if (it == index_.end()) throw Error("word '" + w + "' not in vocabulary");
    ids.push_back(it->second);
  }
  return ids;
}

}  // namespace dg2pix
