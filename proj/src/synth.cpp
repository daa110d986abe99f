#include <algorithm>
#include <numeric>
#include <set>

#include "json.hpp"

#include "dg2pix/synth.hpp"

namespace dg2pix {

void StateSpec::validate() const {
  if (n_blocks < 1) throw Error("a state needs at least one block");
  if (nodes_per_block < 1) throw Error("blocks need at least one node");
  if (!(0.0 <= p_out && p_out < p_in && p_in <= 1.0)) throw Error("block probabilities must satisfy 0 <= p_out < p_in <= 1");
}

std::vector<StateSpec> make_states(std::size_t total_nodes, const std::vector<int>& blocks,
                                   const std::vector<std::size_t>& counts, std::size_t node_jitter, double p_in,
                                   double p_out) {
  if (blocks.size() != counts.size()) throw Error("blocks and counts differ in length");
  std::vector<StateSpec> states;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    if (blocks[i] < 1) throw Error("a state needs at least one block");
    StateSpec s;
    s.n_blocks = blocks[i];
    s.nodes_per_block = total_nodes / static_cast<std::size_t>(blocks[i]);
    s.node_jitter = node_jitter;
    s.p_in = p_in;
    s.p_out = p_out;
    s.count = counts[i];
    states.push_back(s);
  }
  return states;
}

SbmConfig desk_sbm_config(std::uint64_t seed) {
  SbmConfig c;
  c.states = make_states(90, {2, 3, 4}, {60, 30, 30}, 5, 0.7, 0.01);
  c.seed = seed;
  return c;
}

SbmConfig paper_sbm_config(std::uint64_t seed) {
  SbmConfig c;
  c.states = make_states(1000, {2, 3, 4}, {500, 250, 250}, 50, 0.12, 0.025);
  c.seed = seed;
  return c;
}

namespace {

double perturb(double p, double jitter, Rng& rng) {
  if (p <= 0.0 || p >= 1.0 || jitter <= 0.0) return p;
  return std::clamp(p * (1.0 + rng.uniform(-jitter, jitter)), 0.0, 1.0);
}

Snapshot sample_sbm_step(const StateSpec& state, double density_jitter, std::uint64_t seed, SbmStepInfo& info) {
  Rng rng(seed);
  info.block_sizes.clear();
  std::vector<int> block_of;
  for (int b = 0; b < state.n_blocks; ++b) {
    const auto jitter = static_cast<std::int64_t>(state.node_jitter);
    const auto size = std::max<std::int64_t>(1, static_cast<std::int64_t>(state.nodes_per_block) +
                                                     rng.between(-jitter, jitter));
    info.block_sizes.push_back(static_cast<std::size_t>(size));
    block_of.insert(block_of.end(), static_cast<std::size_t>(size), b);
  }
  info.p_in = perturb(state.p_in, density_jitter, rng);
  info.p_out = perturb(state.p_out, density_jitter, rng);

  const std::size_t n = block_of.size();
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (rng.bernoulli(block_of[i] == block_of[j] ? info.p_in : info.p_out)) edges.push_back({{i, j}});
  std::vector<NodeId> nodes(n);
  std::iota(nodes.begin(), nodes.end(), NodeId{0});
  return Snapshot::build(0, std::move(edges), std::move(nodes));
}

}  // namespace

SbmDataset sbm_dynamic(const SbmConfig& config, Exec exec) {
  std::size_t total = 0;
  for (const auto& s : config.states) {
    s.validate();
    total += s.count;
  }
  if (total == 0) throw Error("the states cover no time steps");
  if (config.density_jitter < 0.0 || config.density_jitter >= 1.0) throw Error("density jitter must be in [0, 1)");

  std::vector<int> state_of;
  for (std::size_t s = 0; s < config.states.size(); ++s)
    state_of.insert(state_of.end(), config.states[s].count, static_cast<int>(s));

  std::vector<Snapshot> snapshots(total);
  std::vector<SbmStepInfo> info(total);
  const auto n = static_cast<std::int64_t>(total);
#pragma omp parallel for schedule(dynamic, 1) if (exec == Exec::parallel)
  for (std::int64_t i = 0; i < n; ++i) {
    info[i].state = state_of[i];
    snapshots[i] = sample_sbm_step(config.states[state_of[i]], config.density_jitter,
                                   mix_seed(config.seed, static_cast<std::uint64_t>(i)), info[i]);
  }

  std::vector<std::size_t> order(total);
  std::iota(order.begin(), order.end(), 0);
  if (config.shuffle) {
    Rng rng(mix_seed(config.seed, ~std::uint64_t{0}));
    rng.shuffle(order.begin(), order.end());
  }

  SbmDataset out;
  std::vector<Snapshot> ordered;
  ordered.reserve(total);
  for (auto i : order) {
    ordered.push_back(std::move(snapshots[i]));
    out.labels.push_back(state_of[i]);
    out.steps.push_back(std::move(info[i]));
  }
  out.graph = make_dynamic_graph(std::move(ordered));
  return out;
}

// ---------------------------------------------------------------------------

std::vector<std::pair<NodeId, NodeId>> watts_strogatz_edges(std::size_t nodes, std::size_t k, double p_rewire,
                                                            Rng& rng) {
  if (k % 2) ++k;
  if (k >= nodes) throw Error("Watts-Strogatz needs k < n");
  std::vector<std::set<NodeId>> adj(nodes);
  auto add = [&](NodeId a, NodeId b) {
    adj[a].insert(b);
    adj[b].insert(a);
  };
  for (std::size_t j = 1; j <= k / 2; ++j)
    for (std::size_t u = 0; u < nodes; ++u) add(u, (u + j) % nodes);

  for (std::size_t j = 1; j <= k / 2; ++j) {
    for (std::size_t u = 0; u < nodes; ++u) {
      if (!rng.bernoulli(p_rewire)) continue;
      const NodeId v = (u + j) % nodes;
      if (!adj[u].count(v) || adj[u].size() >= nodes - 1) continue;
      NodeId w;
      do {
        w = rng.below(nodes);
      } while (w == u || adj[u].count(w));
      adj[u].erase(v);
      adj[v].erase(u);
      add(u, w);
    }
  }
  std::vector<std::pair<NodeId, NodeId>> edges;
  for (std::size_t u = 0; u < nodes; ++u)
    for (auto v : adj[u])
      if (u < v) edges.emplace_back(u, v);
  return edges;
}

bool is_connected(std::size_t nodes, const std::vector<std::pair<NodeId, NodeId>>& edges) {
  if (nodes == 0) return true;
  std::vector<std::vector<NodeId>> adj(nodes);
  for (auto [a, b] : edges) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  std::vector<char> seen(nodes, 0);
  std::vector<NodeId> stack{0};
  seen[0] = 1;
  std::size_t reached = 1;
  while (!stack.empty()) {
    auto v = stack.back();
    stack.pop_back();
    for (auto u : adj[v])
      if (!seen[u]) {
        seen[u] = 1;
        ++reached;
        stack.push_back(u);
      }
  }
  return reached == nodes;
}

DynamicGraph ws_dynamic(const WsConfig& config, Exec exec) {
  if (config.steps == 0) throw Error("Watts-Strogatz needs at least one step");
  if (config.k_min < 2 || config.k_max < config.k_min) throw Error("need 2 <= k_min <= k_max");
  if (config.p_rewire < 0.0 || config.p_rewire > 1.0) throw Error("rewiring probability must be in [0, 1]");
  if (config.k_max + (config.k_max % 2) >= config.nodes) throw Error("Watts-Strogatz needs k < n");

  std::vector<Snapshot> snapshots(config.steps);
  std::vector<std::string> failures(config.steps);
  const auto n = static_cast<std::int64_t>(config.steps);
#pragma omp parallel for schedule(dynamic, 1) if (exec == Exec::parallel)
  for (std::int64_t t = 0; t < n; ++t) {
    Rng rng(mix_seed(config.seed, static_cast<std::uint64_t>(t)));
    const auto k = static_cast<std::size_t>(
        rng.between(static_cast<std::int64_t>(config.k_min), static_cast<std::int64_t>(config.k_max)));
    std::vector<std::pair<NodeId, NodeId>> edges;
    bool connected = false;
    for (int attempt = 0; attempt < config.max_retries && !connected; ++attempt) {
      edges = watts_strogatz_edges(config.nodes, k, config.p_rewire, rng);
      connected = is_connected(config.nodes, edges);
    }
    if (!connected) {
      failures[t] = "step " + std::to_string(t) + " not connected after " + std::to_string(config.max_retries) + " tries";
      continue;
    }
    std::vector<Edge> es;
    es.reserve(edges.size());
    for (auto [a, b] : edges) es.push_back({{a, b}});
    std::vector<NodeId> all(config.nodes);
    std::iota(all.begin(), all.end(), NodeId{0});
    snapshots[t] = Snapshot::build(static_cast<std::size_t>(t), std::move(es), std::move(all));
  }
  for (const auto& f : failures)
    if (!f.empty()) throw Error("connectivity unachievable: " + f);
  return make_dynamic_graph(std::move(snapshots));
}

std::string to_json(const SbmConfig& config, const std::vector<int>& labels) {
  nlohmann::json states = nlohmann::json::array();
  for (const auto& s : config.states)
    states.push_back({{"n_blocks", s.n_blocks},
                      {"nodes_per_block", s.nodes_per_block},
                      {"node_jitter", s.node_jitter},
                      {"p_in", s.p_in},
                      {"p_out", s.p_out},
                      {"count", s.count}});
  return nlohmann::json{{"generator", "sbm"},
                        {"seed", config.seed},
                        {"shuffle", config.shuffle},
                        {"density_jitter", config.density_jitter},
                        {"states", states},
                        {"labels", labels}}
      .dump(2);
}

std::string to_json(const WsConfig& config) {
  return nlohmann::json{{"generator", "ws"},         {"steps", config.steps}, {"nodes", config.nodes},
                        {"k_min", config.k_min},     {"k_max", config.k_max}, {"p_rewire", config.p_rewire},
                        {"seed", config.seed},       {"max_retries", config.max_retries}}
      .dump(2);
}

}  // namespace dg2pix
