// measure.hpp
// Simulated local measurement devices and Born-rule correlation features.
// A DeviceSet is frozen once sampled: train and test features within one
// experiment must come from the same set, tracked by fingerprint.

#pragma once

#include <string>

#include "gme/qcore.hpp"

namespace gme {

// One projective device: the rank-1 projectors onto the columns of a
// unitary.
struct Device {
  CMat source_unitary;  // columns are the outcome states

  int dim() const { return static_cast<int>(source_unitary.rows()); }
  CMat projector(int outcome) const;
};

struct DeviceSet {
  std::vector<int> dims;
  int m = 0;  // devices per party
  std::uint64_t seed = 0;
  std::vector<std::vector<Device>> parties;  // [party][device]

  int n_parties() const { return static_cast<int>(dims.size()); }
  int outcome_space() const;  // prod of dims
};

enum class CorrelationLayout { kFull, kKcorr };

struct CorrelationVector {
  std::vector<double> values;  // settings-major, party 0 most significant
  CorrelationLayout layout = CorrelationLayout::kFull;
};

DeviceSet sample_device_set(const std::vector<int>& dims, int m, std::uint64_t seed);

// Two fixed qubit observables per party: sigma_z and the unit xy-plane
// observable at angle (n+1) phi / (2n).
DeviceSet fixed_observable_devices(int n, double phi);

// Full correlation table over all m^n setting tuples.
CorrelationVector correlation(const DensityMatrix& rho, const DeviceSet& devices);

// Same semantics on a statevector: rotate by (x) U^dagger per setting and
// read squared amplitudes.
CorrelationVector correlation_pure(const PureState& psi, const DeviceSet& devices);

// Diagonal-setting restriction: settings (x, x, ..., x) for x in [0, k).
CorrelationVector k_correlation(const DensityMatrix& rho, const DeviceSet& devices, int k);
CorrelationVector k_correlation(const PureState& psi, const DeviceSet& devices, int k);

std::string devices_to_json(const DeviceSet& ds);
DeviceSet devices_from_json(const std::string& text);
void save_devices(const DeviceSet& ds, const std::string& path);
DeviceSet load_devices(const std::string& path);

// 64-bit FNV-1a over the canonical JSON serialization.
std::uint64_t device_fingerprint(const DeviceSet& ds);
std::uint64_t fnv1a(const std::string& bytes);

}  // namespace gme
