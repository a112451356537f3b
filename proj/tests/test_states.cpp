#include <doctest.h>

#include <cmath>

#include "gme/criteria.hpp"
#include "gme/states.hpp"

using namespace gme;

namespace {

// Applies the stabilizer generator X_v prod_{u ~ v} Z_u to the amplitudes
// of an n-qubit statevector; graph states are +1 eigenstates.
CVec apply_stabilizer(const Graph& g, int v, const CVec& amps) {
  int n = g.n;
  CVec out = CVec::Zero(amps.size());
  for (int x = 0; x < static_cast<int>(amps.size()); ++x) {
    int flipped = x ^ (1 << (n - 1 - v));
    double sign = 1.0;
    for (auto [a, b] : g.edges) {
      int u = (a == v) ? b : (b == v) ? a : -1;
      if (u >= 0 && ((x >> (n - 1 - u)) & 1)) sign = -sign;
    }
    out(flipped) += sign * amps(x);
  }
  return out;
}

}  // namespace

TEST_CASE("ghz amplitudes") {
  PureState g32 = ghz(3, 2);
  CHECK(g32.amps.size() == 8);
  double r = 1.0 / std::sqrt(2.0);
  CHECK(std::abs(g32.amps(0) - Complex(r)) < 1e-14);
  CHECK(std::abs(g32.amps(7) - Complex(r)) < 1e-14);
  CHECK(std::abs(g32.amps.squaredNorm() - 1.0) < 1e-14);

  PureState g23 = ghz(2, 3);
  double s = 1.0 / std::sqrt(3.0);
  CHECK(std::abs(g23.amps(0) - Complex(s)) < 1e-14);
  CHECK(std::abs(g23.amps(4) - Complex(s)) < 1e-14);  // |11>
  CHECK(std::abs(g23.amps(8) - Complex(s)) < 1e-14);  // |22>
  CHECK(std::abs(g23.amps(1)) < 1e-15);
}

TEST_CASE("w, cluster and dicke amplitudes") {
  PureState w = w_state(3);
  double r = 1.0 / std::sqrt(3.0);
  CHECK(std::abs(w.amps(1) - Complex(r)) < 1e-14);  // |001>
  CHECK(std::abs(w.amps(2) - Complex(r)) < 1e-14);  // |010>
  CHECK(std::abs(w.amps(4) - Complex(r)) < 1e-14);  // |100>
  CHECK(std::abs(w.amps(0)) < 1e-15);

  PureState c = cluster4();
  CHECK(std::abs(c.amps(0) - Complex(0.5)) < 1e-14);
  CHECK(std::abs(c.amps(3) - Complex(0.5)) < 1e-14);
  CHECK(std::abs(c.amps(12) - Complex(0.5)) < 1e-14);
  CHECK(std::abs(c.amps(15) - Complex(-0.5)) < 1e-14);

  PureState d = dicke24();
  double q = 1.0 / std::sqrt(6.0);
  for (int idx : {3, 5, 6, 9, 10, 12}) CHECK(std::abs(d.amps(idx) - Complex(q)) < 1e-14);
  CHECK(std::abs(d.amps(1)) < 1e-15);
  CHECK(std::abs(d.amps.squaredNorm() - 1.0) < 1e-14);
}

TEST_CASE("white-noise mixing conventions") {
  DensityMatrix base = projector(ghz(3, 2));
  DensityMatrix a = mix_with_white_noise({base, 0.0, NoiseConvention::kNoiseWeight});
  CHECK((a.mat - base.mat).cwiseAbs().maxCoeff() < 1e-14);
  DensityMatrix b = mix_with_white_noise({base, 1.0, NoiseConvention::kNoiseWeight});
  CHECK((b.mat - CMat::Identity(8, 8) / 8.0).cwiseAbs().maxCoeff() < 1e-14);
  DensityMatrix c = mix_with_white_noise({base, 0.3, NoiseConvention::kStateWeight});
  DensityMatrix d = mix_with_white_noise({base, 0.7, NoiseConvention::kNoiseWeight});
  CHECK((c.mat - d.mat).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("qutrit family endpoints") {
  DensityMatrix white = qutrit_family(0.0, 0.0);
  CHECK(white.dims == std::vector<int>{3, 3, 3});
  CHECK((white.mat - CMat::Identity(27, 27) / 27.0).cwiseAbs().maxCoeff() < 1e-14);
  DensityMatrix pure = qutrit_family(0.0, 1.0);
  CHECK(std::abs(pure.purity() - 1.0) < 1e-10);
  CHECK_NOTHROW(qutrit_family(0.4, 0.4));
}

TEST_CASE("fully separable samples are PPT across every single-party cut") {
  for (int t = 0; t < 25; ++t) {
    DensityMatrix rho = sample_fully_separable({2, 2, 2}, derive_seed(101, t));
    CHECK(rho.dims == std::vector<int>{2, 2, 2});
    for (int p = 0; p < 3; ++p) {
      CHECK(min_eigenvalue(partial_transpose(rho, {p})) > -1e-9);
    }
  }
}

TEST_CASE("biseparable samples are valid density matrices") {
  for (int t = 0; t < 10; ++t) {
    CHECK_NOTHROW(sample_biseparable({2, 2, 2}, derive_seed(202, t)));
  }
  DensityMatrix a = sample_biseparable({2, 2, 2}, 5);
  DensityMatrix b = sample_biseparable({2, 2, 2}, 5);
  CHECK((a.mat - b.mat).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("partitions_into_blocks counts match Stirling numbers") {
  CHECK(partitions_into_blocks(3, 2).size() == 3);
  CHECK(partitions_into_blocks(4, 2).size() == 7);
  CHECK(partitions_into_blocks(4, 3).size() == 6);
  CHECK(partitions_into_blocks(4, 4).size() == 1);
  for (const auto& part : partitions_into_blocks(4, 2)) {
    int total = 0;
    for (const auto& blk : part) total += static_cast<int>(blk.size());
    CHECK(total == 4);
  }
}

TEST_CASE("intactness samples stay valid for each k") {
  for (int k = 2; k <= 4; ++k) {
    DensityMatrix rho = sample_intactness({2, 2, 2, 2}, k, derive_seed(303, k));
    CHECK(rho.dims == std::vector<int>{2, 2, 2, 2});
    CHECK(std::abs(rho.mat.trace().real() - 1.0) < 1e-10);
  }
  // k = n forces a fully separable state: PPT everywhere.
  DensityMatrix full = sample_intactness({2, 2, 2}, 3, 17);
  for (int p = 0; p < 3; ++p) {
    CHECK(min_eigenvalue(partial_transpose(full, {p})) > -1e-9);
  }
}

TEST_CASE("merge produces the fused-party dimensions") {
  DensityMatrix rho = random_density({8, 1, 71});
  rho.dims = {4, 2};
  DensityMatrix tau = random_density({8, 1, 72});
  tau.dims = {4, 2};
  DensityMatrix merged = merge(rho, tau, 1);
  CHECK(merged.dims == std::vector<int>{4, 4, 4});
  CHECK(std::abs(merged.mat.trace().real() - 1.0) < 1e-10);
  // Merging pure inputs yields a pure output.
  CHECK(std::abs(merged.purity() - 1.0) < 1e-10);

  DensityMatrix r2 = projector(ghz(4, 2));
  DensityMatrix merged2 = merge(r2, r2, 3);
  CHECK(merged2.dims == std::vector<int>{2, 2, 4, 4, 4});
}

TEST_CASE("merged NPT pairs are NPT across every cut of the merged state") {
  // Merge of two entangled 4x2 pairs should be GME; at minimum it must be
  // NPT across each single-party cut.
  DensityMatrix bell = projector(ghz(2, 2));
  CMat m = bell.mat;
  DensityMatrix pair({2, 2}, m);
  DensityMatrix lifted = embed_pad(pair, {4, 2});
  DensityMatrix merged = merge(lifted, lifted, 1);
  REQUIRE(merged.dims == std::vector<int>{4, 4, 4});
  for (int p = 0; p < 3; ++p) {
    CHECK(min_eigenvalue(partial_transpose(merged, {p})) < -1e-6);
  }
}

TEST_CASE("graph states satisfy their stabilizers") {
  Graph g;
  g.n = 5;
  g.edges = {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {0, 4}, {1, 3}};
  PureState psi = graph_state(g);
  CHECK(std::abs(psi.amps.squaredNorm() - 1.0) < 1e-12);
  for (int v = 0; v < g.n; ++v) {
    CVec s = apply_stabilizer(g, v, psi.amps);
    CHECK((s - psi.amps).cwiseAbs().maxCoeff() < 1e-12);
  }
  // Edgeless graph is |+>^n.
  Graph empty;
  empty.n = 3;
  PureState plus = graph_state(empty);
  for (int i = 0; i < 8; ++i) {
    CHECK(std::abs(plus.amps(i) - Complex(1.0 / std::sqrt(8.0))) < 1e-12);
  }
}

TEST_CASE("graph connectivity and random graphs") {
  Graph path;
  path.n = 4;
  path.edges = {{0, 1}, {1, 2}, {2, 3}};
  CHECK(is_connected(path));
  Graph split;
  split.n = 4;
  split.edges = {{0, 1}, {2, 3}};
  CHECK(!is_connected(split));
  Graph lone;
  lone.n = 1;
  CHECK(is_connected(lone));

  Graph none = random_graph(6, 0.0, 1);
  CHECK(none.edges.empty());
  Graph all = random_graph(6, 1.0, 1);
  CHECK(all.edges.size() == 15);
  Graph a = random_graph(8, 0.3, 9);
  Graph b = random_graph(8, 0.3, 9);
  CHECK(a.edges == b.edges);
}

TEST_CASE("graph json round trip") {
  Graph g = random_graph(7, 0.4, 33);
  Graph back = graph_from_json(graph_to_json(g));
  CHECK(back.n == g.n);
  CHECK(back.edges == g.edges);
}
