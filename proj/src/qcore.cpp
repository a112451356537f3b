#include "gme/qcore.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace gme {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Strides for a given dims list, party 0 most significant.
std::vector<int> strides_of(const std::vector<int>& dims) {
  std::vector<int> s(dims.size());
  int acc = 1;
  for (int i = static_cast<int>(dims.size()) - 1; i >= 0; --i) {
    s[i] = acc;
    acc *= dims[i];
  }
  return s;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t root, std::uint64_t counter) {
  return splitmix64(splitmix64(root) ^ splitmix64(counter * 0x9e3779b97f4a7c15ULL + 0x243f6a8885a308d3ULL));
}

PureState::PureState(std::vector<int> d, CVec a) : dims(std::move(d)), amps(std::move(a)) {
  int n = 1;
  for (int di : dims) {
    if (di < 1) throw InvalidDimension("PureState: nonpositive subsystem dimension");
    n *= di;
  }
  if (amps.size() != n) throw InvariantViolation("PureState: amplitude length mismatch");
  if (std::abs(amps.squaredNorm() - 1.0) > kTraceTol)
    throw InvariantViolation("PureState: not normalized");
}

int PureState::total_dim() const { return static_cast<int>(amps.size()); }

DensityMatrix::DensityMatrix(std::vector<int> d, CMat m, bool validate)
    : dims(std::move(d)), mat(std::move(m)) {
  long n = 1;
  for (int di : dims) {
    if (di < 1) throw InvalidDimension("DensityMatrix: nonpositive subsystem dimension");
    n *= di;
  }
  if (mat.rows() != n || mat.cols() != n)
    throw InvalidDimension("DensityMatrix: matrix side does not match dims product");
  if (validate) {
    double herm = (mat - mat.adjoint()).cwiseAbs().maxCoeff();
    if (herm > kHermTol) throw InvariantViolation("DensityMatrix: not Hermitian");
    if (std::abs(mat.trace().real() - 1.0) > kTraceTol || std::abs(mat.trace().imag()) > kTraceTol)
      throw InvariantViolation("DensityMatrix: trace != 1");
    if (n <= 1024) {
      Eigen::SelfAdjointEigenSolver<CMat> es(mat, Eigen::EigenvaluesOnly);
      if (es.eigenvalues().minCoeff() < kPsdTol)
        throw InvariantViolation("DensityMatrix: negative eigenvalue");
    }
  }
}

int DensityMatrix::total_dim() const { return static_cast<int>(mat.rows()); }

double DensityMatrix::purity() const { return (mat * mat).trace().real(); }

DensityMatrix projector(const PureState& psi) {
  CMat m = psi.amps * psi.amps.adjoint();
  return DensityMatrix(psi.dims, std::move(m));
}

CMat haar_unitary(int d, std::uint64_t seed) {
  if (d < 1) throw InvalidDimension("haar_unitary: d must be >= 1");
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  CMat g(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) g(i, j) = Complex(gauss(gen), gauss(gen));
  Eigen::HouseholderQR<CMat> qr(g);
  CMat q = qr.householderQ();
  CMat r = qr.matrixQR().template triangularView<Eigen::Upper>();
  // Fix the phase ambiguity so Q is exactly Haar distributed.
  for (int j = 0; j < d; ++j) {
    Complex rjj = r(j, j);
    double a = std::abs(rjj);
    Complex phase = (a > 0) ? rjj / a : Complex(1, 0);
    q.col(j) *= phase;
  }
  return q;
}

CVec haar_vector(int d, std::uint64_t seed) {
  if (d < 1) throw InvalidDimension("haar_vector: d must be >= 1");
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  CVec v(d);
  for (int i = 0; i < d; ++i) v(i) = Complex(gauss(gen), gauss(gen));
  v /= v.norm();
  return v;
}

std::vector<double> simplex_sample(int k, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::exponential_distribution<double> expo(1.0);
  std::vector<double> w(k);
  double sum = 0;
  for (auto& x : w) {
    x = expo(gen);
    sum += x;
  }
  for (auto& x : w) x /= sum;
  return w;
}

DensityMatrix random_density(const RandomStateSpec& spec) {
  if (spec.rank < 1 || spec.rank > spec.dim)
    throw InvalidDimension("random_density: rank out of range");
  CMat u = haar_unitary(spec.dim, derive_seed(spec.seed, 1));
  std::vector<double> lam = simplex_sample(spec.rank, derive_seed(spec.seed, 2));
  CMat rho = CMat::Zero(spec.dim, spec.dim);
  for (int i = 0; i < spec.rank; ++i) rho += lam[i] * (u.col(i) * u.col(i).adjoint());
  return DensityMatrix({spec.dim}, std::move(rho));
}

CMat kron(const CMat& a, const CMat& b) {
  CMat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (long i = 0; i < a.rows(); ++i)
    for (long j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

CVec kron_vec(const CVec& a, const CVec& b) {
  CVec out(a.size() * b.size());
  for (long i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

DensityMatrix permute_subsystems(const DensityMatrix& rho, const std::vector<int>& perm) {
  const int n = rho.n_parties();
  if (static_cast<int>(perm.size()) != n) throw InvalidDimension("permute_subsystems: bad perm size");
  std::vector<bool> seen(n, false);
  for (int p : perm) {
    if (p < 0 || p >= n || seen[p]) throw InvalidDimension("permute_subsystems: not a permutation");
    seen[p] = true;
  }
  std::vector<int> new_dims(n);
  for (int i = 0; i < n; ++i) new_dims[i] = rho.dims[perm[i]];
  auto old_str = strides_of(rho.dims);
  auto new_str = strides_of(new_dims);
  const int dim = rho.total_dim();

  // old index for each new index
  std::vector<int> map(dim);
  std::vector<int> digits(n);
  for (int idx = 0; idx < dim; ++idx) {
    int rem = idx;
    for (int i = 0; i < n; ++i) {
      digits[i] = rem / new_str[i];
      rem %= new_str[i];
    }
    int old_idx = 0;
    for (int i = 0; i < n; ++i) old_idx += digits[i] * old_str[perm[i]];
    map[idx] = old_idx;
  }
  CMat out(dim, dim);
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c) out(r, c) = rho.mat(map[r], map[c]);
  return DensityMatrix(std::move(new_dims), std::move(out), false);
}

DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<int>& keep) {
  const int n = rho.n_parties();
  if (keep.empty()) throw InvalidDimension("partial_trace: empty keep set");
  std::vector<bool> is_kept(n, false);
  for (int k : keep) {
    if (k < 0 || k >= n) throw InvalidDimension("partial_trace: index out of range");
    is_kept[k] = true;
  }
  std::vector<int> kept, traced;
  for (int i = 0; i < n; ++i) (is_kept[i] ? kept : traced).push_back(i);

  std::vector<int> kd, td;
  for (int i : kept) kd.push_back(rho.dims[i]);
  for (int i : traced) td.push_back(rho.dims[i]);
  int dk = 1, dt = 1;
  for (int d : kd) dk *= d;
  for (int d : td) dt *= d;

  auto str = strides_of(rho.dims);
  auto kstr = strides_of(kd);
  auto tstr = strides_of(td);
  // full index of (kept digits a, traced digits t)
  auto full_index = [&](int a, int t) {
    int idx = 0;
    for (size_t i = 0; i < kept.size(); ++i) idx += ((a / kstr[i]) % kd[i]) * str[kept[i]];
    for (size_t i = 0; i < traced.size(); ++i) idx += ((t / tstr[i]) % td[i]) * str[traced[i]];
    return idx;
  };

  CMat out = CMat::Zero(dk, dk);
  for (int a = 0; a < dk; ++a)
    for (int b = 0; b < dk; ++b) {
      Complex s = 0;
      for (int t = 0; t < dt; ++t) s += rho.mat(full_index(a, t), full_index(b, t));
      out(a, b) = s;
    }
  return DensityMatrix(std::move(kd), std::move(out), false);
}

CMat partial_transpose(const DensityMatrix& rho, const std::vector<int>& subset) {
  const int n = rho.n_parties();
  if (subset.empty() || static_cast<int>(subset.size()) >= n)
    throw InvalidDimension("partial_transpose: subset must be nonempty and proper");
  std::vector<bool> flip(n, false);
  for (int s : subset) {
    if (s < 0 || s >= n) throw InvalidDimension("partial_transpose: index out of range");
    flip[s] = true;
  }
  auto str = strides_of(rho.dims);
  const int dim = rho.total_dim();
  CMat out(dim, dim);
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c) {
      int rr = 0, cc = 0;
      for (int i = 0; i < n; ++i) {
        int ri = (r / str[i]) % rho.dims[i];
        int ci = (c / str[i]) % rho.dims[i];
        if (flip[i]) std::swap(ri, ci);
        rr += ri * str[i];
        cc += ci * str[i];
      }
      out(rr, cc) = rho.mat(r, c);
    }
  return out;
}

double min_eigenvalue(const CMat& h) {
  if ((h - h.adjoint()).cwiseAbs().maxCoeff() > 1e-8)
    throw InvariantViolation("min_eigenvalue: matrix is not Hermitian");
  Eigen::SelfAdjointEigenSolver<CMat> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

double von_neumann_entropy(const DensityMatrix& rho) {
  Eigen::SelfAdjointEigenSolver<CMat> es(rho.mat, Eigen::EigenvaluesOnly);
  double s = 0;
  for (long i = 0; i < es.eigenvalues().size(); ++i) {
    double lam = es.eigenvalues()(i);
    if (lam < 1e-12) continue;
    s -= lam * std::log2(lam);
  }
  return s;
}

double kyfan_norm(const CMat& m, int k) {
  const int maxk = static_cast<int>(std::min(m.rows(), m.cols()));
  if (k < 1 || k > maxk) throw InvalidDimension("kyfan_norm: k out of range");
  Eigen::JacobiSVD<CMat> svd(m);
  double s = 0;
  for (int i = 0; i < k; ++i) s += svd.singularValues()(i);
  return s;
}

DensityMatrix embed_pad(const DensityMatrix& rho, const std::vector<int>& new_dims) {
  const int n = rho.n_parties();
  if (static_cast<int>(new_dims.size()) != n) throw InvalidDimension("embed_pad: dims size mismatch");
  for (int i = 0; i < n; ++i)
    if (new_dims[i] < rho.dims[i]) throw InvalidDimension("embed_pad: cannot shrink a subsystem");
  auto old_str = strides_of(rho.dims);
  auto new_str = strides_of(new_dims);
  int nd = 1;
  for (int d : new_dims) nd *= d;
  // index map old -> new (same local digits, wider radix)
  std::vector<int> map(rho.total_dim());
  for (int idx = 0; idx < rho.total_dim(); ++idx) {
    int out = 0;
    for (int i = 0; i < n; ++i) out += ((idx / old_str[i]) % rho.dims[i]) * new_str[i];
    map[idx] = out;
  }
  CMat out = CMat::Zero(nd, nd);
  for (int r = 0; r < rho.total_dim(); ++r)
    for (int c = 0; c < rho.total_dim(); ++c) out(map[r], map[c]) = rho.mat(r, c);
  return DensityMatrix(new_dims, std::move(out), false);
}

PureState embed_pad(const PureState& psi, const std::vector<int>& new_dims) {
  const int n = psi.n_parties();
  if (static_cast<int>(new_dims.size()) != n) throw InvalidDimension("embed_pad: dims size mismatch");
  for (int i = 0; i < n; ++i)
    if (new_dims[i] < psi.dims[i]) throw InvalidDimension("embed_pad: cannot shrink a subsystem");
  auto old_str = strides_of(psi.dims);
  auto new_str = strides_of(new_dims);
  int nd = 1;
  for (int d : new_dims) nd *= d;
  CVec out = CVec::Zero(nd);
  for (int idx = 0; idx < psi.total_dim(); ++idx) {
    int o = 0;
    for (int i = 0; i < n; ++i) o += ((idx / old_str[i]) % psi.dims[i]) * new_str[i];
    out(o) = psi.amps(idx);
  }
  return PureState(new_dims, std::move(out));
}

}  // namespace gme
