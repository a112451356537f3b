#include "gme/criteria.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>

namespace gme {

namespace {

constexpr double kDetectTol = 1e-9;

bool detect(double margin) { return margin > kDetectTol; }

CVec probe_product(const ProductProbe& p, unsigned flip_mask) {
  CVec v = (flip_mask & 1u) ? p.flipped[0] : p.locals[0];
  for (size_t i = 1; i < p.locals.size(); ++i)
    v = kron_vec(v, (flip_mask & (1u << i)) ? p.flipped[i] : p.locals[i]);
  return v;
}

double expect(const CMat& rho, const CVec& v) { return (v.adjoint() * rho * v)(0, 0).real(); }

// Permutation matrix swapping subsystem `which` between the two copies of
// an n-party space (2n subsystems total, copy layout [0..n-1][n..2n-1]).
CMat swap_copy_operator(const std::vector<int>& dims, int which) {
  const int n = static_cast<int>(dims.size());
  std::vector<int> ddims(dims);
  ddims.insert(ddims.end(), dims.begin(), dims.end());
  std::vector<int> strides(2 * n);
  int acc = 1;
  for (int i = 2 * n - 1; i >= 0; --i) {
    strides[i] = acc;
    acc *= ddims[i];
  }
  CMat p = CMat::Zero(acc, acc);
  for (int idx = 0; idx < acc; ++idx) {
    int a = (idx / strides[which]) % ddims[which];
    int b = (idx / strides[n + which]) % ddims[n + which];
    int out = idx + (b - a) * strides[which] + (a - b) * strides[n + which];
    p(out, idx) = 1;
  }
  return p;
}

const std::array<CMat, 3>& paulis() {
  static const std::array<CMat, 3> sigma = [] {
    std::array<CMat, 3> s;
    for (auto& m : s) m = CMat::Zero(2, 2);
    s[0](0, 1) = s[0](1, 0) = 1;                       // X
    s[1](0, 1) = Complex(0, -1); s[1](1, 0) = Complex(0, 1);  // Y
    s[2](0, 0) = 1; s[2](1, 1) = -1;                   // Z
    return s;
  }();
  return sigma;
}

}  // namespace

ProductProbe random_probe(const std::vector<int>& dims, std::uint64_t seed) {
  ProductProbe p;
  p.seed = seed;
  for (size_t i = 0; i < dims.size(); ++i) {
    p.locals.push_back(haar_vector(dims[i], derive_seed(seed, 2 * i)));
    p.flipped.push_back(haar_vector(dims[i], derive_seed(seed, 2 * i + 1)));
  }
  return p;
}

CriterionVerdict guhne3(const DensityMatrix& rho) {
  if (rho.dims != std::vector<int>{2, 2, 2}) throw InvalidDimension("guhne3: dims must be (2,2,2)");
  const CMat& m = rho.mat;
  double lhs = std::abs(m(1, 2)) + std::abs(m(1, 4)) + std::abs(m(2, 4));
  double rhs = std::sqrt(m(0, 0).real() * m(3, 3).real()) +
               std::sqrt(m(0, 0).real() * m(5, 5).real()) +
               std::sqrt(m(0, 0).real() * m(6, 6).real()) +
               0.5 * (m(1, 1).real() + m(2, 2).real() + m(4, 4).real());
  double margin = lhs - rhs;
  return {detect(margin), margin, CriterionId::kGuhne3};
}

CriterionVerdict guhne3_ghz(const DensityMatrix& rho) {
  if (rho.dims != std::vector<int>{2, 2, 2})
    throw InvalidDimension("guhne3_ghz: dims must be (2,2,2)");
  const CMat& m = rho.mat;
  double lhs = std::abs(m(0, 7));
  double rhs = std::sqrt(m(1, 1).real() * m(6, 6).real()) +
               std::sqrt(m(2, 2).real() * m(5, 5).real()) +
               std::sqrt(m(3, 3).real() * m(4, 4).real());
  double margin = lhs - rhs;
  return {detect(margin), margin, CriterionId::kGuhne3Ghz};
}

CriterionVerdict guhne_ghz_n(const DensityMatrix& rho) {
  for (int d : rho.dims)
    if (d != 2) throw InvalidDimension("guhne_ghz_n: all parties must be qubits");
  const int N = rho.total_dim();
  const CMat& m = rho.mat;
  double lhs = std::abs(m(0, N - 1));
  double rhs = 0.0;
  for (int k = 1; k < N / 2; ++k)
    rhs += std::sqrt(m(k, k).real() * m(N - 1 - k, N - 1 - k).real());
  double margin = lhs - rhs;
  return {detect(margin), margin, CriterionId::kGuhne3Ghz};
}

CriterionVerdict vrho(const DensityMatrix& rho) {
  if (rho.n_parties() != 3) throw InvalidDimension("vrho: need exactly 3 parties");
  double s_ab = von_neumann_entropy(partial_trace(rho, {0, 1}));
  double s_ac = von_neumann_entropy(partial_trace(rho, {0, 2}));
  double s_bc = von_neumann_entropy(partial_trace(rho, {1, 2}));
  double s = von_neumann_entropy(rho);
  int dmax = *std::max_element(rho.dims.begin(), rho.dims.end());
  double margin = s_ab + s_ac + s_bc - 3 * s - 2 * std::log2(static_cast<double>(dmax));
  return {detect(margin), margin, CriterionId::kVrho};
}

CriterionVerdict concurrence_lower_bound(const DensityMatrix& rho, const ProductProbe& probe) {
  const int n = rho.n_parties();
  if (static_cast<int>(probe.locals.size()) != n)
    throw InvalidDimension("concurrence_lower_bound: probe party count mismatch");
  for (int i = 0; i < n; ++i)
    if (probe.locals[i].size() != rho.dims[i] || probe.flipped[i].size() != rho.dims[i])
      throw InvalidDimension("concurrence_lower_bound: probe dimension mismatch");

  std::vector<CVec> flip_one(n);
  for (int i = 0; i < n; ++i) flip_one[i] = probe_product(probe, 1u << i);
  CVec psi = probe_product(probe, 0);

  double sum1 = 0, sum2 = 0, sum3 = 0;
  double base = expect(rho.mat, psi);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      sum1 += std::abs((flip_one[i].adjoint() * rho.mat * flip_one[j])(0, 0));
      CVec psi_ij = probe_product(probe, (1u << i) | (1u << j));
      sum2 += std::sqrt(std::max(0.0, base * expect(rho.mat, psi_ij)));
    }
  for (int i = 0; i < n; ++i) sum3 += expect(rho.mat, flip_one[i]);
  double margin = sum1 - sum2 - (n - 2) * sum3;
  return {detect(margin), margin, CriterionId::kConcurrenceLb};
}

double concurrence_f_bruteforce(const DensityMatrix& rho, const ProductProbe& probe) {
  const int n = rho.n_parties();
  CMat rr = kron(rho.mat, rho.mat);
  std::vector<CMat> p_ops(n);
  CMat pi_op = CMat::Identity(rr.rows(), rr.cols());
  for (int i = 0; i < n; ++i) {
    p_ops[i] = swap_copy_operator(rho.dims, i);
    pi_op = p_ops[i] * pi_op;
  }
  std::vector<CVec> flip_one(n);
  for (int i = 0; i < n; ++i) flip_one[i] = probe_product(probe, 1u << i);

  double sum1 = 0, sum2 = 0, sum3 = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      CVec big = kron_vec(flip_one[i], flip_one[j]);
      double t1 = (big.adjoint() * rr * pi_op * big)(0, 0).real();
      double t2 = (big.adjoint() * p_ops[i].adjoint() * rr * p_ops[i] * big)(0, 0).real();
      sum1 += std::sqrt(std::max(0.0, t1));
      sum2 += std::sqrt(std::max(0.0, t2));
    }
  for (int i = 0; i < n; ++i) {
    CVec big = kron_vec(flip_one[i], flip_one[i]);
    double t3 = (big.adjoint() * p_ops[i].adjoint() * rr * p_ops[i] * big)(0, 0).real();
    sum3 += std::sqrt(std::max(0.0, t3));
  }
  return sum1 - sum2 - (n - 2) * sum3;
}

namespace {

// State orthogonal to a given qubit state (up to phase).
CVec orth_qubit(const CVec& a) {
  CVec b(2);
  b(0) = -std::conj(a(1));
  b(1) = std::conj(a(0));
  return b;
}

// Small SU(2) rotation exp(-i theta n.sigma / 2) applied to a qubit state.
CVec rotate_qubit(const CVec& a, double theta, double nx, double ny, double nz) {
  double norm = std::sqrt(nx * nx + ny * ny + nz * nz);
  if (norm < 1e-300) return a;
  nx /= norm;
  ny /= norm;
  nz /= norm;
  std::complex<double> c(std::cos(theta / 2.0), 0.0);
  std::complex<double> s(0.0, -std::sin(theta / 2.0));
  CVec b(2);
  b(0) = (c + s * nz) * a(0) + s * std::complex<double>(nx, -ny) * a(1);
  b(1) = s * std::complex<double>(nx, ny) * a(0) + (c - s * nz) * a(1);
  return b;
}

}  // namespace

CriterionVerdict concurrence_probe_search(const DensityMatrix& rho, std::uint64_t seed,
                                          int max_probes, ProductProbe* best_probe) {
  const int n = rho.n_parties();
  bool all_qubits = true;
  for (int d : rho.dims) all_qubits = all_qubits && d == 2;

  CriterionVerdict best{false, -std::numeric_limits<double>::infinity(),
                        CriterionId::kConcurrenceLb};
  ProductProbe best_p;
  std::mt19937_64 gen(derive_seed(seed, 0xF00));
  std::normal_distribution<double> nrm;
  int budget = max_probes;
  const int starts = std::max(1, max_probes / 25);
  for (int s = 0; s < starts && budget > 0; ++s) {
    ProductProbe p = random_probe(rho.dims, derive_seed(seed, 1000 + s));
    if (all_qubits)
      for (int i = 0; i < n; ++i) p.flipped[i] = orth_qubit(p.locals[i]);
    auto v = concurrence_lower_bound(rho, p);
    --budget;
    if (v.margin > best.margin) {
      best = v;
      best_p = p;
    }
    if (!all_qubits) continue;  // plain multistart for qudit parties
    double cur = v.margin;
    double step = 0.6;
    while (budget > 0 && step > 0.02) {
      bool improved = false;
      for (int i = 0; i < n && budget > 0; ++i) {
        ProductProbe q = p;
        q.locals[i] = rotate_qubit(p.locals[i], step * std::abs(nrm(gen)), nrm(gen), nrm(gen),
                                   nrm(gen));
        q.flipped[i] = orth_qubit(q.locals[i]);
        auto w = concurrence_lower_bound(rho, q);
        --budget;
        if (w.margin > cur) {
          p = std::move(q);
          cur = w.margin;
          improved = true;
          if (cur > best.margin) {
            best = w;
            best_p = p;
          }
        }
      }
      if (!improved) step *= 0.5;
    }
  }
  if (best_probe) *best_probe = best_p;
  return best;
}

CriterionVerdict tensor4_criterion(const DensityMatrix& rho) {
  if (rho.dims != std::vector<int>{2, 2, 2, 2})
    throw InvalidDimension("tensor4_criterion: dims must be (2,2,2,2)");
  const auto& sigma = paulis();
  double t[3][3][3][3];
  for (int i1 = 0; i1 < 3; ++i1)
    for (int i2 = 0; i2 < 3; ++i2)
      for (int i3 = 0; i3 < 3; ++i3)
        for (int i4 = 0; i4 < 3; ++i4) {
          CMat op = kron(kron(sigma[i1], sigma[i2]), kron(sigma[i3], sigma[i4]));
          t[i1][i2][i3][i4] = (op * rho.mat).trace().real();
        }
  // three pair matricizations: row indices {1,2}, {1,3}, {1,4}
  CMat m12(9, 9), m13(9, 9), m14(9, 9);
  for (int i1 = 0; i1 < 3; ++i1)
    for (int i2 = 0; i2 < 3; ++i2)
      for (int i3 = 0; i3 < 3; ++i3)
        for (int i4 = 0; i4 < 3; ++i4) {
          m12(3 * i1 + i2, 3 * i3 + i4) = t[i1][i2][i3][i4];
          m13(3 * i1 + i3, 3 * i2 + i4) = t[i1][i2][i3][i4];
          m14(3 * i1 + i4, 3 * i2 + i3) = t[i1][i2][i3][i4];
        }
  Eigen::JacobiSVD<CMat> s12(m12), s13(m13), s14(m14);
  double margin = -std::numeric_limits<double>::infinity();
  double acc12 = 0, acc13 = 0, acc14 = 0;
  for (int k = 1; k <= 9; ++k) {
    acc12 += s12.singularValues()(k - 1);
    acc13 += s13.singularValues()(k - 1);
    acc14 += s14.singularValues()(k - 1);
    double norm_k = (acc12 + acc13 + acc14) / 3.0;
    double threshold = (k <= 3) ? 2.0 * std::sqrt(static_cast<double>(k)) : 1.0 + 2.0 * k / 3.0;
    margin = std::max(margin, norm_k - threshold);
  }
  return {detect(margin), margin, CriterionId::kTensor4};
}

CriterionVerdict is_npt(const DensityMatrix& rho, const std::vector<int>& cut) {
  double margin = -min_eigenvalue(partial_transpose(rho, cut));
  return {detect(margin), margin, CriterionId::kNpt};
}

}  // namespace gme
