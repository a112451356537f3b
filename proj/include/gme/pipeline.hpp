// pipeline.hpp
// End-to-end dataset builders and experiment drivers: labeled state
// generation, feature extraction, threshold scans, the parameter map,
// k-correlation and graph-state studies, and the convex-hull
// biseparable-decomposition search.

#pragma once

#include <optional>
#include <string>

#include "gme/criteria.hpp"
#include "gme/learn.hpp"
#include "gme/measure.hpp"
#include "gme/states.hpp"

namespace gme {

// Labeled quantum states prior to feature extraction. Keeping states and
// features separate lets one state set be featurized under several device
// sets (the robustness and k-correlation studies need exactly that).
struct StateSet {
  std::vector<DensityMatrix> states;
  std::vector<int> labels;
  std::vector<std::string> criteria;  // per-class provenance
  std::vector<std::uint64_t> seeds;
  std::vector<int> dims;
  double scale = 1.0;

  int size() const { return static_cast<int>(states.size()); }
};

struct FeatureSpec {
  CorrelationLayout layout = CorrelationLayout::kFull;
  int k = 0;  // used when layout == kKcorr
};

enum class WernerFamily { kGhz3, kW3, kGhz4, kW4, kCl4, kD24, kGhz5, kGhz43 };

struct ScanReport {
  std::vector<double> grid;
  std::vector<bool> predictions;
  double reported_threshold = 0.0;
  std::pair<double, double> wrong_interval{0.0, 0.0};
  double accuracy_on_known = 0.0;
  int known_points = 0;
};

// Table of per-(n,d) network shapes.
FnnConfig fnn_config_for(int n, int d, int input_dim, std::uint64_t seed);
FnnConfig graph_fnn_config(int input_dim, std::uint64_t seed);

int parallel_jobs(int requested);  // 0 -> GME_JOBS env or hardware count

// --- state-set builders -------------------------------------------------

// 3 qubits: positives by rejection on the biseparability inequality,
// negatives biseparable + fully separable. Counts 30000/20000/20000 at
// scale 1.
StateSet build_states_3qubit(std::uint64_t seed, double scale, int jobs);

// 4 qubits: positives via the concurrence probe search, negatives for
// intactness 2, 3, 4. Counts 30000 + 3 x 20000 at scale 1.
StateSet build_states_4qubit(std::uint64_t seed, double scale, int jobs);

// Tripartite qudits (4,4,4): positives by merging NPT 4x2 bipartite
// states, negatives biseparable. Counts 20000/40000 at scale 1.
StateSet build_states_3qudit(std::uint64_t seed, double scale, int jobs);

// 5 parties: positives merge two 4-qubit GME states then pad to
// (4,4,4,4,4); negatives biseparable in the same padded subspace.
// Counts 20000/60000 at scale 1.
StateSet build_states_5partite(std::uint64_t seed, double scale, int jobs);

StateSet build_random_test_3qubit(std::uint64_t seed, double scale, int jobs);
StateSet build_random_test_4qubit(std::uint64_t seed, double scale, int jobs);
StateSet build_random_test_5partite(std::uint64_t seed, double scale, int jobs);

LabeledDataset featurize(const StateSet& set, const DeviceSet& devices, const FeatureSpec& spec,
                         int jobs);

// --- scans and experiments ----------------------------------------------

PureState werner_base_state(WernerFamily family);
// Ground truth at noise weight p, when known.
std::optional<bool> werner_ground_truth(WernerFamily family, double p);
DensityMatrix werner_state(WernerFamily family, double p, NoiseConvention convention);

ScanReport scan_werner(const FnnModel& model, const DeviceSet& devices, WernerFamily family,
                       NoiseConvention convention, const FeatureSpec& spec, double step = 0.001);

struct AlphaBetaReport {
  double step = 0.01;
  std::vector<std::tuple<double, double, bool>> grid;  // alpha, beta, prediction
  double beta_boundary_at_alpha0 = 1.0;
};

AlphaBetaReport scan_alpha_beta(const FnnModel& model, const DeviceSet& devices, double step);

// --- biseparable-decomposition search -----------------------------------

struct BisepAtom {
  int cut_party = 0;  // the single party split off from the rest
  double weight = 0.0;
  CVec vector;  // unit vector, product across the declared cut
};

struct BisepSearchResult {
  bool found = false;
  double distance = 0.0;  // Frobenius distance of the best decomposition
  std::vector<BisepAtom> atoms;
};

// Conditional-gradient search for rho in conv{biseparable pure states};
// 'found' carries an explicit decomposition, 'not-found' is inconclusive.
BisepSearchResult bisep_search(const DensityMatrix& rho, int budget = 2000,
                               std::uint64_t seed = 7);

// Reconstruction error and per-atom product-across-cut verification.
double bisep_reconstruction_error(const DensityMatrix& rho, const BisepSearchResult& r);
bool bisep_atoms_are_product(const BisepSearchResult& r, const std::vector<int>& dims,
                             double tol = 1e-8);

// --- composite experiments ----------------------------------------------

struct GraphExperimentResult {
  double accuracy = 0.0;
  int train_size = 0;
  int test_size = 0;
};

GraphExperimentResult graph_experiment(int n, int k, std::uint64_t seed, int jobs,
                                       int train_graphs = 600, int test_graphs = 200);

struct RobustnessResult {
  std::vector<double> device_seed_accuracies;
  double fixed_observable_accuracy = 0.0;
};

RobustnessResult robustness_experiment(std::uint64_t seed, double scale, int jobs,
                                       int n_device_seeds = 5);

// --- artifact output ----------------------------------------------------

std::string scan_report_csv(const ScanReport& r, WernerFamily family);
std::string alpha_beta_csv(const AlphaBetaReport& r);
std::string format_real(double v);  // fixed 9-significant-digit formatting

}  // namespace gme
