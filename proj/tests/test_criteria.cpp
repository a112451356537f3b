#include <doctest.h>

#include <cmath>

#include "gme/criteria.hpp"
#include "gme/states.hpp"

using namespace gme;

namespace {

ProductProbe ghz_probe(int n) {
  ProductProbe p;
  for (int i = 0; i < n; ++i) {
    CVec zero = CVec::Zero(2);
    zero(0) = 1.0;
    CVec one = CVec::Zero(2);
    one(1) = 1.0;
    p.locals.push_back(zero);
    p.flipped.push_back(one);
  }
  return p;
}

}  // namespace

TEST_CASE("guhne3 on reference states") {
  CriterionVerdict w = guhne3(projector(w_state(3)));
  CHECK(w.detected);
  CHECK(std::abs(w.margin - 0.5) < 1e-12);

  CriterionVerdict g = guhne3(projector(ghz(3, 2)));
  CHECK(!g.detected);
  CHECK(std::abs(g.margin) < 1e-12);

  DensityMatrix mixed({2, 2, 2}, CMat::Identity(8, 8) / 8.0);
  CriterionVerdict m = guhne3(mixed);
  CHECK(!m.detected);
  CHECK(std::abs(m.margin + 9.0 / 16.0) < 1e-12);
}

TEST_CASE("guhne3 detects the W Werner family below its analytic point") {
  DensityMatrix base = projector(w_state(3));
  auto margin_at = [&](double p) {
    return guhne3(mix_with_white_noise({base, p, NoiseConvention::kNoiseWeight})).margin;
  };
  // margin(p) = (1-p)/2 - (9/16)p is linear, zero at p = 8/17.
  double p_star = 8.0 / 17.0;
  CHECK(margin_at(p_star - 0.01) > 0.0);
  CHECK(margin_at(p_star + 0.01) < 0.0);
  CHECK(std::abs(margin_at(0.2) - (0.5 * 0.8 - 9.0 / 16.0 * 0.2)) < 1e-12);
}

TEST_CASE("guhne3_ghz on reference states") {
  // GHZ3: LHS = |rho_{0,7}| = 1/2, all RHS diagonal products vanish.
  CriterionVerdict g = guhne3_ghz(projector(ghz(3, 2)));
  CHECK(g.detected);
  CHECK(std::abs(g.margin - 0.5) < 1e-12);

  // W3: no GHZ coherence and every RHS product pairs a populated level
  // with an empty one, so the margin is exactly zero (not detected).
  CriterionVerdict w = guhne3_ghz(projector(w_state(3)));
  CHECK(!w.detected);
  CHECK(std::abs(w.margin) < 1e-12);

  DensityMatrix mixed({2, 2, 2}, CMat::Identity(8, 8) / 8.0);
  CriterionVerdict m = guhne3_ghz(mixed);
  CHECK(!m.detected);
  CHECK(std::abs(m.margin + 3.0 / 8.0) < 1e-12);
}

TEST_CASE("guhne3_ghz detects the GHZ Werner family exactly below 4/7") {
  DensityMatrix base = projector(ghz(3, 2));
  auto margin_at = [&](double p) {
    return guhne3_ghz(mix_with_white_noise({base, p, NoiseConvention::kNoiseWeight})).margin;
  };
  // margin(p) = (1-p)/2 - (3/8)p is linear, zero at p = 4/7.
  double p_star = 4.0 / 7.0;
  CHECK(margin_at(p_star - 0.01) > 0.0);
  CHECK(margin_at(p_star + 0.01) < 0.0);
  CHECK(std::abs(margin_at(0.2) - (0.5 * 0.8 - 3.0 / 8.0 * 0.2)) < 1e-12);
}

TEST_CASE("guhne_ghz_n matches guhne3_ghz on three qubits") {
  for (std::uint64_t t = 0; t < 20; ++t) {
    DensityMatrix full = random_density({8, 1 + static_cast<int>(t % 4), derive_seed(4242, t)});
    DensityMatrix rho({2, 2, 2}, full.mat, true);
    CHECK(std::abs(guhne_ghz_n(rho).margin - guhne3_ghz(rho).margin) < 1e-12);
  }
}

TEST_CASE("guhne_ghz_n detects the 4-qubit GHZ Werner family exactly below 8/15") {
  CHECK(std::abs(guhne_ghz_n(projector(ghz(4, 2))).margin - 0.5) < 1e-12);

  DensityMatrix base = projector(ghz(4, 2));
  auto margin_at = [&](double p) {
    return guhne_ghz_n(mix_with_white_noise({base, p, NoiseConvention::kNoiseWeight})).margin;
  };
  // margin(p) = (1-p)/2 - (7/16)p is linear, zero at p = 8/15.
  double p_star = 8.0 / 15.0;
  CHECK(margin_at(p_star - 0.01) > 0.0);
  CHECK(margin_at(p_star + 0.01) < 0.0);
  CHECK(std::abs(margin_at(0.2) - (0.5 * 0.8 - 7.0 / 16.0 * 0.2)) < 1e-12);
}

TEST_CASE("guhne_ghz_n is sound on biseparable 4-qubit samples") {
  for (std::uint64_t s = 1; s <= 30; ++s) {
    DensityMatrix rho = sample_biseparable({2, 2, 2, 2}, 7000 + s);
    CHECK(!guhne_ghz_n(rho).detected);
  }
}

TEST_CASE("vrho on reference states") {
  CriterionVerdict g = vrho(projector(ghz(3, 2)));
  CHECK(g.detected);
  CHECK(std::abs(g.margin - 1.0) < 1e-10);

  DensityMatrix mixed({2, 2, 2}, CMat::Identity(8, 8) / 8.0);
  CriterionVerdict m = vrho(mixed);
  CHECK(!m.detected);
  CHECK(std::abs(m.margin + 5.0) < 1e-10);

  // Product pure state: every entropy term vanishes, margin = -2 log2(2).
  CVec zero = CVec::Zero(2);
  zero(0) = 1.0;
  PureState prod({2, 2, 2}, kron_vec(kron_vec(zero, zero), zero));
  CHECK(std::abs(vrho(projector(prod)).margin + 2.0) < 1e-10);
}

TEST_CASE("concurrence lower bound on W states with the flip probe") {
  // For W_n and the probe (|0>^n with per-party flip |1>), each single-flip
  // state overlaps W_n by 1/sqrt(n): F = (n-1) - 0 - (n-2) = 1.
  DensityMatrix rho = projector(w_state(3));
  CriterionVerdict v = concurrence_lower_bound(rho, ghz_probe(3));
  CHECK(v.detected);
  CHECK(std::abs(v.margin - 1.0) < 1e-10);

  DensityMatrix rho4 = projector(w_state(4));
  CHECK(std::abs(concurrence_lower_bound(rho4, ghz_probe(4)).margin - 1.0) < 1e-10);

  // GHZ is invisible to this particular probe: every single-flip state is
  // orthogonal to it, so the bound collapses to zero.
  CHECK(std::abs(concurrence_lower_bound(projector(ghz(3, 2)), ghz_probe(3)).margin) < 1e-10);
}

TEST_CASE("concurrence fast path matches the doubled-space brute force") {
  for (int t = 0; t < 12; ++t) {
    std::vector<int> dims = (t % 2 == 0) ? std::vector<int>{2, 2, 2} : std::vector<int>{3, 2};
    int total = 1;
    for (int d : dims) total *= d;
    DensityMatrix rho = random_density({total, 1 + t % 4, derive_seed(404, t)});
    rho.dims = dims;
    ProductProbe probe = random_probe(dims, derive_seed(505, t));
    double fast = concurrence_lower_bound(rho, probe).margin;
    double brute = concurrence_f_bruteforce(rho, probe);
    CHECK(std::abs(fast - brute) < 1e-9);
  }
  DensityMatrix mixed({2, 2, 2}, CMat::Identity(8, 8) / 8.0);
  ProductProbe probe = ghz_probe(3);
  CHECK(std::abs(concurrence_lower_bound(mixed, probe).margin -
                 concurrence_f_bruteforce(mixed, probe)) < 1e-9);
  CHECK(concurrence_lower_bound(mixed, probe).margin < 0.0);
}

TEST_CASE("probe search certifies GHZ4 and stays quiet on white noise") {
  CriterionVerdict hit = concurrence_probe_search(projector(ghz(4, 2)), 1234, 200);
  CHECK(hit.detected);
  CHECK(hit.margin > 1e-3);
  DensityMatrix mixed({2, 2, 2, 2}, CMat::Identity(16, 16) / 16.0);
  CHECK(!concurrence_probe_search(mixed, 99, 40).detected);
}

TEST_CASE("tensor4 criterion on reference states") {
  CHECK(tensor4_criterion(projector(ghz(4, 2))).detected);
  CHECK(tensor4_criterion(projector(dicke24())).detected);
  // The cluster state sits exactly on the criterion boundary: margin zero,
  // strictly not detected.
  CriterionVerdict cl = tensor4_criterion(projector(cluster4()));
  CHECK(!cl.detected);
  CHECK(std::abs(cl.margin) < 1e-9);

  CVec zero = CVec::Zero(2);
  zero(0) = 1.0;
  CVec prod = kron_vec(kron_vec(kron_vec(zero, zero), zero), zero);
  CHECK(!tensor4_criterion(projector(PureState({2, 2, 2, 2}, prod))).detected);

  CriterionVerdict m = tensor4_criterion(DensityMatrix({2, 2, 2, 2}, CMat::Identity(16, 16) / 16.0));
  CHECK(!m.detected);
  CHECK(std::abs(m.margin + 2.0) < 1e-10);
}

TEST_CASE("npt margin on Bell and product states") {
  CriterionVerdict bell = is_npt(projector(ghz(2, 2)), {0});
  CHECK(bell.detected);
  CHECK(std::abs(bell.margin - 0.5) < 1e-12);

  CVec zero = CVec::Zero(2);
  zero(0) = 1.0;
  PureState prod({2, 2}, kron_vec(zero, zero));
  CHECK(!is_npt(projector(prod), {0}).detected);
}

TEST_CASE("criteria are silent on separable samples") {
  for (int t = 0; t < 60; ++t) {
    DensityMatrix rho3 = sample_fully_separable({2, 2, 2}, derive_seed(606, t));
    CHECK(!guhne3(rho3).detected);
    CHECK(!guhne3_ghz(rho3).detected);
    CHECK(!vrho(rho3).detected);
  }
  for (int t = 0; t < 30; ++t) {
    DensityMatrix rho4 = sample_fully_separable({2, 2, 2, 2}, derive_seed(707, t));
    CHECK(!tensor4_criterion(rho4).detected);
    CHECK(!concurrence_probe_search(rho4, derive_seed(708, t), 25).detected);
  }
}

TEST_CASE("biseparable 3-qubit samples never violate guhne3") {
  for (int t = 0; t < 40; ++t) {
    DensityMatrix rho = sample_biseparable({2, 2, 2}, derive_seed(808, t));
    CHECK(!guhne3(rho).detected);
    CHECK(!guhne3_ghz(rho).detected);
    CHECK(!vrho(rho).detected);
  }
}
