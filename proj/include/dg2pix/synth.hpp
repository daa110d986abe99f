#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dg2pix/common.hpp"
#include "dg2pix/dyngraph.hpp"

namespace dg2pix {

/// One temporal state of the block-model generator.
struct StateSpec {
  int n_blocks = 2;
  std::size_t nodes_per_block = 45;
  std::size_t node_jitter = 2;  // each block gains/loses up to this many nodes per step
  double p_in = 0.2;
  double p_out = 0.02;
  std::size_t count = 1;  // time steps in this state

  void validate() const;
};

struct SbmConfig {
  std::vector<StateSpec> states;
  std::uint64_t seed = 42;
  bool shuffle = true;
  // Per-step relative perturbation of p_in and p_out; 0 and 1 stay exact.
  double density_jitter = 0.10;
};

struct SbmStepInfo {
  int state = 0;
  std::vector<std::size_t> block_sizes;
  double p_in = 0.0;
  double p_out = 0.0;
};

struct SbmDataset {
  DynamicGraph graph;
  std::vector<int> labels;  // ground-truth state per step, aligned with the final order
  std::vector<SbmStepInfo> steps;
};

/// Each step samples a fresh block-model graph from its state; steps are
/// shuffled by the seed when requested.
SbmDataset sbm_dynamic(const SbmConfig& config, Exec exec = Exec::parallel);

/// States with nodes_per_block = total_nodes / blocks[i].
std::vector<StateSpec> make_states(std::size_t total_nodes, const std::vector<int>& blocks,
                                   const std::vector<std::size_t>& counts, std::size_t node_jitter, double p_in,
                                   double p_out);

/// 2/3/4 blocks x 60/30/30 steps on 90 nodes, jitter 5.
SbmConfig desk_sbm_config(std::uint64_t seed);
/// 2/3/4 blocks x 500/250/250 steps on 1000 nodes, jitter 50 (~30M edges).
SbmConfig paper_sbm_config(std::uint64_t seed);

struct WsConfig {
  std::size_t steps = 100;
  std::size_t nodes = 200;
  std::size_t k_min = 6;
  std::size_t k_max = 20;
  double p_rewire = 0.05;
  std::uint64_t seed = 42;
  int max_retries = 100;
};

/// Connected Watts-Strogatz graph per step with k drawn uniformly from
/// [k_min, k_max] (odd k rounded up to even).
DynamicGraph ws_dynamic(const WsConfig& config, Exec exec = Exec::parallel);

/// Single ring-lattice + rewiring draw; nullopt-free: returns edges.
std::vector<std::pair<NodeId, NodeId>> watts_strogatz_edges(std::size_t nodes, std::size_t k, double p_rewire,
                                                            Rng& rng);
bool is_connected(std::size_t nodes, const std::vector<std::pair<NodeId, NodeId>>& edges);

std::string to_json(const SbmConfig& config, const std::vector<int>& labels);
std::string to_json(const WsConfig& config);

}  // namespace dg2pix
