// states.hpp
// Named state families, noise mixtures, separability-structured samplers,
// the merging construction, and graph states.

#pragma once

#include <string>

#include "gme/qcore.hpp"

namespace gme {

enum class NoiseConvention {
  kNoiseWeight,  // (1-p) base + p I/N
  kStateWeight,  // p base + (1-p) I/N
};

struct NoiseMixture {
  DensityMatrix base;
  double p = 0.0;
  NoiseConvention convention = NoiseConvention::kNoiseWeight;
};

struct SeparabilityLabel {
  int intactness = 1;
  bool gme = false;
};

struct Graph {
  int n = 0;
  std::vector<std::pair<int, int>> edges;  // unordered pairs, i < j
};

PureState ghz(int n, int d);
PureState w_state(int n);
PureState cluster4();
PureState dicke24();

DensityMatrix mix_with_white_noise(const NoiseMixture& m);

// Qutrit family (1-a-b)/27 I + a/3 rho_bisep + b |GHZ33><GHZ33|.
DensityMatrix qutrit_family(double alpha, double beta);

// Convex mixture of Haar-random local pure products; fully separable by
// construction. Number of terms drawn uniformly from [1, prod dims].
DensityMatrix sample_fully_separable(const std::vector<int>& dims, std::uint64_t seed);

// Convex mixture over all 2-block partitions; each entangled block is
// rejection-sampled until its partial transpose is negative.
DensityMatrix sample_biseparable(const std::vector<int>& dims, std::uint64_t seed);

// Mixture of k-block product states over set-partitions into exactly k
// blocks; entangled blocks NPT-verified.
DensityMatrix sample_intactness(const std::vector<int>& dims, int k, std::uint64_t seed);

// All set-partitions of {0..n-1} into exactly k nonempty blocks.
std::vector<std::vector<std::vector<int>>> partitions_into_blocks(int n, int k);

// Merging construction: rho on (A, C11..C1n), tau on (B, C21..C2n) ->
// state on (A, B, C1..Cn) with C_j = (C1j, C2j).
DensityMatrix merge(const DensityMatrix& rho, const DensityMatrix& tau, int n_shared);

PureState graph_state(const Graph& g);

Graph random_graph(int n, double edge_prob, std::uint64_t seed);
bool is_connected(const Graph& g);

std::string graph_to_json(const Graph& g);
Graph graph_from_json(const std::string& text);

}  // namespace gme
