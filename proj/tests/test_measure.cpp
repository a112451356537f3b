#include <doctest.h>

#include <cmath>
#include <cstdio>

#include "gme/measure.hpp"
#include "gme/states.hpp"

using namespace gme;

namespace {

DeviceSet identity_devices(const std::vector<int>& dims) {
  DeviceSet ds;
  ds.dims = dims;
  ds.m = 1;
  ds.seed = 0;
  for (int d : dims) {
    Device dev;
    dev.source_unitary = CMat::Identity(d, d);
    ds.parties.push_back({dev});
  }
  return ds;
}

// Sum of joint probabilities over the other parties' outcomes, for party
// `who` fixed to `outcome`, under setting tuple index `setting`.
double marginal(const CorrelationVector& cv, const std::vector<int>& dims, int m, int who,
                int outcome, int setting) {
  int prod = 1;
  for (int d : dims) prod *= d;
  double s = 0.0;
  for (int o = 0; o < prod; ++o) {
    int rest = o, digit = 0;
    for (size_t i = 0; i < dims.size(); ++i) {
      int stride = 1;
      for (size_t j = i + 1; j < dims.size(); ++j) stride *= dims[j];
      digit = (rest / stride) % dims[i];
      if (static_cast<int>(i) == who) break;
    }
    (void)rest;
    if (digit == outcome) s += cv.values[setting * prod + o];
  }
  return s;
}

}  // namespace

TEST_CASE("sampled device sets are unitary and deterministic") {
  DeviceSet ds = sample_device_set({2, 2, 3}, 3, 55);
  CHECK(ds.n_parties() == 3);
  CHECK(ds.outcome_space() == 12);
  for (int p = 0; p < 3; ++p) {
    CHECK(static_cast<int>(ds.parties[p].size()) == 3);
    for (const Device& dev : ds.parties[p]) {
      int d = dev.dim();
      CHECK((dev.source_unitary.adjoint() * dev.source_unitary - CMat::Identity(d, d))
                .cwiseAbs()
                .maxCoeff() < 1e-12);
    }
  }
  DeviceSet again = sample_device_set({2, 2, 3}, 3, 55);
  CHECK((ds.parties[1][2].source_unitary - again.parties[1][2].source_unitary)
            .cwiseAbs()
            .maxCoeff() == 0.0);
}

TEST_CASE("correlation under identity devices reads the diagonal") {
  DensityMatrix rho = projector(ghz(3, 2));
  CorrelationVector cv = correlation(rho, identity_devices({2, 2, 2}));
  REQUIRE(cv.values.size() == 8);
  CHECK(std::abs(cv.values[0] - 0.5) < 1e-12);
  CHECK(std::abs(cv.values[7] - 0.5) < 1e-12);
  for (int i = 1; i < 7; ++i) CHECK(std::abs(cv.values[i]) < 1e-12);
}

TEST_CASE("correlation vectors are normalized per setting") {
  DeviceSet ds = sample_device_set({2, 2, 2}, 3, 66);
  DensityMatrix rho = random_density({8, 5, 67});
  rho.dims = {2, 2, 2};
  CorrelationVector cv = correlation(rho, ds);
  REQUIRE(cv.values.size() == 27u * 8u);
  for (int s = 0; s < 27; ++s) {
    double total = 0.0;
    for (int o = 0; o < 8; ++o) {
      CHECK(cv.values[s * 8 + o] >= 0.0);
      total += cv.values[s * 8 + o];
    }
    CHECK(std::abs(total - 1.0) < 1e-10);
  }
}

TEST_CASE("pure-state fast path matches the density path") {
  DeviceSet ds = sample_device_set({2, 2, 2, 2}, 2, 77);
  PureState psi = cluster4();
  CorrelationVector fast = correlation_pure(psi, ds);
  CorrelationVector slow = correlation(projector(psi), ds);
  REQUIRE(fast.values.size() == slow.values.size());
  for (size_t i = 0; i < fast.values.size(); ++i) {
    CHECK(std::abs(fast.values[i] - slow.values[i]) < 1e-10);
  }
}

TEST_CASE("no-signaling: one party's marginal ignores the others' settings") {
  std::vector<int> dims{2, 2, 2};
  DeviceSet ds = sample_device_set(dims, 3, 88);
  DensityMatrix rho = random_density({8, 3, 89});
  rho.dims = dims;
  CorrelationVector cv = correlation(rho, ds);
  // Fix party 0's setting; its marginal must agree across all 9 choices of
  // the other settings.
  for (int s0 = 0; s0 < 3; ++s0) {
    for (int out = 0; out < 2; ++out) {
      double ref = marginal(cv, dims, 3, 0, out, s0 * 9);
      for (int rest = 1; rest < 9; ++rest) {
        CHECK(std::abs(marginal(cv, dims, 3, 0, out, s0 * 9 + rest) - ref) < 1e-10);
      }
    }
  }
}

TEST_CASE("k-correlation equals the diagonal slice of the full table") {
  std::vector<int> dims{2, 2, 2};
  DeviceSet ds = sample_device_set(dims, 4, 99);
  DensityMatrix rho = random_density({8, 2, 100});
  rho.dims = dims;
  CorrelationVector full = correlation(rho, ds);
  CorrelationVector kc = k_correlation(rho, ds, 3);
  REQUIRE(kc.values.size() == 3u * 8u);
  CHECK(kc.layout == CorrelationLayout::kKcorr);
  for (int x = 0; x < 3; ++x) {
    int setting = x * 16 + x * 4 + x;  // (x, x, x) in base 4
    for (int o = 0; o < 8; ++o) {
      CHECK(std::abs(kc.values[x * 8 + o] - full.values[setting * 8 + o]) < 1e-12);
    }
  }
  PureState psi = ghz(3, 2);
  CorrelationVector kp = k_correlation(psi, ds, 3);
  CorrelationVector kd = k_correlation(projector(psi), ds, 3);
  for (size_t i = 0; i < kp.values.size(); ++i) {
    CHECK(std::abs(kp.values[i] - kd.values[i]) < 1e-10);
  }
}

TEST_CASE("fixed observable devices") {
  DeviceSet ds = fixed_observable_devices(4, 1.1055);
  CHECK(ds.m == 2);
  CHECK(ds.dims == std::vector<int>{2, 2, 2, 2});
  for (int p = 0; p < 4; ++p) {
    // First device measures sigma_z: computational basis.
    CHECK((ds.parties[p][0].source_unitary - CMat::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);
    const CMat& u = ds.parties[p][1].source_unitary;
    CHECK((u.adjoint() * u - CMat::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);
    // Both outcome states are unbiased in the z basis.
    CHECK(std::abs(std::norm(u(0, 0)) - 0.5) < 1e-12);
    CHECK(std::abs(std::norm(u(0, 1)) - 0.5) < 1e-12);
  }
}

TEST_CASE("device json round trip is bit-exact") {
  DeviceSet ds = sample_device_set({2, 3}, 2, 111);
  std::string text = devices_to_json(ds);
  DeviceSet back = devices_from_json(text);
  CHECK(devices_to_json(back) == text);
  CHECK(device_fingerprint(back) == device_fingerprint(ds));
  for (int p = 0; p < 2; ++p) {
    for (int d = 0; d < 2; ++d) {
      CHECK((back.parties[p][d].source_unitary - ds.parties[p][d].source_unitary)
                .cwiseAbs()
                .maxCoeff() == 0.0);
    }
  }

  std::string path = "/tmp/gme_test_devices.json";
  save_devices(ds, path);
  DeviceSet loaded = load_devices(path);
  CHECK(device_fingerprint(loaded) == device_fingerprint(ds));
  std::remove(path.c_str());
}

TEST_CASE("fingerprints separate different device sets") {
  CHECK(device_fingerprint(sample_device_set({2, 2}, 2, 1)) !=
        device_fingerprint(sample_device_set({2, 2}, 2, 2)));
}

TEST_CASE("fnv1a reference vectors") {
  CHECK(fnv1a("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(fnv1a("foobar") == 0x85944171f73967e8ULL);
}
