#include "gme/states.hpp"

#include <cmath>
#include <deque>
#include <random>

#include <nlohmann/json.hpp>

namespace gme {

namespace {

DensityMatrix local_pure_product(const std::vector<int>& dims, std::uint64_t seed) {
  CVec v = haar_vector(dims[0], derive_seed(seed, 0));
  for (size_t i = 1; i < dims.size(); ++i)
    v = kron_vec(v, haar_vector(dims[i], derive_seed(seed, i)));
  return projector(PureState(dims, std::move(v)));
}

// Arbitrary mixed state on a single-party block (rank uniform in
// [1, d]).
DensityMatrix random_block_state(const std::vector<int>& dims, std::uint64_t seed) {
  int total = 1;
  for (int d : dims) total *= d;
  std::mt19937_64 gen(derive_seed(seed, 0xB));
  int rank = 1 + static_cast<int>(gen() % total);
  DensityMatrix rho = random_density({total, rank, seed});
  rho.dims = dims;
  return rho;
}

// Entangled block state: rejection-sampled until some single-subsystem
// partial transpose is negative. Blocks of one subsystem never qualify.
DensityMatrix sample_npt_block(const std::vector<int>& dims, std::uint64_t seed) {
  int total = 1;
  for (int d : dims) total *= d;
  for (std::uint64_t attempt = 0;; ++attempt) {
    std::uint64_t s = derive_seed(seed, attempt);
    std::mt19937_64 gen(derive_seed(s, 999));
    int rank = 1 + static_cast<int>(gen() % total);
    DensityMatrix rho({total}, random_density({total, rank, s}).mat);
    rho.dims = dims;
    bool npt = false;
    for (size_t i = 0; i < dims.size(); ++i) {
      if (min_eigenvalue(partial_transpose(rho, {static_cast<int>(i)})) < -1e-8) {
        npt = true;
        break;
      }
    }
    if (npt) return rho;
  }
}

DensityMatrix product_over_blocks(const std::vector<int>& dims,
                                  const std::vector<std::vector<int>>& blocks,
                                  std::uint64_t seed) {
  const int n = static_cast<int>(dims.size());
  CMat m(1, 1);
  m(0, 0) = 1;
  std::vector<int> order;
  for (size_t b = 0; b < blocks.size(); ++b) {
    std::vector<int> bd;
    for (int p : blocks[b]) bd.push_back(dims[p]);
    DensityMatrix blk = blocks[b].size() == 1
                            ? random_block_state(bd, derive_seed(seed, 100 + b))
                            : sample_npt_block(bd, derive_seed(seed, 200 + b));
    m = kron(m, blk.mat);
    for (int p : blocks[b]) order.push_back(p);
  }
  std::vector<int> cur_dims;
  for (int p : order) cur_dims.push_back(dims[p]);
  DensityMatrix prod(cur_dims, std::move(m), false);
  // restore original party order
  std::vector<int> pos(n);
  for (int i = 0; i < n; ++i) pos[order[i]] = i;
  std::vector<int> perm(n);
  for (int i = 0; i < n; ++i) perm[i] = pos[i];
  return permute_subsystems(prod, perm);
}

void partitions_rec(int next, int n, int k, std::vector<std::vector<int>>& cur,
                    std::vector<std::vector<std::vector<int>>>& out) {
  if (next == n) {
    if (static_cast<int>(cur.size()) == k) out.push_back(cur);
    return;
  }
  // prune: remaining elements cannot fill k blocks
  if (static_cast<int>(cur.size()) + (n - next) < k) return;
  // index-based: recursion appends to cur and would invalidate range-for
  // iterators (sizes are restored before each call returns)
  const size_t n_blocks = cur.size();
  for (size_t b = 0; b < n_blocks; ++b) {
    cur[b].push_back(next);
    partitions_rec(next + 1, n, k, cur, out);
    cur[b].pop_back();
  }
  if (static_cast<int>(cur.size()) < k) {
    cur.push_back({next});
    partitions_rec(next + 1, n, k, cur, out);
    cur.pop_back();
  }
}

}  // namespace

std::vector<std::vector<std::vector<int>>> partitions_into_blocks(int n, int k) {
  std::vector<std::vector<std::vector<int>>> out;
  std::vector<std::vector<int>> cur;
  partitions_rec(0, n, k, cur, out);
  return out;
}

PureState ghz(int n, int d) {
  if (n < 2 || d < 2) throw InvalidDimension("ghz: need n >= 2, d >= 2");
  long total = 1;
  for (int i = 0; i < n; ++i) total *= d;
  CVec v = CVec::Zero(total);
  long stride = 0;  // index of |i i ... i> = i * (d^{n-1} + ... + 1)
  long acc = 1;
  for (int i = 0; i < n; ++i) {
    stride += acc;
    acc *= d;
  }
  for (int i = 0; i < d; ++i) v(i * stride) = 1.0 / std::sqrt(static_cast<double>(d));
  return PureState(std::vector<int>(n, d), std::move(v));
}

PureState w_state(int n) {
  if (n < 2) throw InvalidDimension("w_state: need n >= 2");
  CVec v = CVec::Zero(1L << n);
  for (int j = 0; j < n; ++j) v(1L << j) = 1.0 / std::sqrt(static_cast<double>(n));
  return PureState(std::vector<int>(n, 2), std::move(v));
}

PureState cluster4() {
  CVec v = CVec::Zero(16);
  v(0b0000) = 0.5;
  v(0b0011) = 0.5;
  v(0b1100) = 0.5;
  v(0b1111) = -0.5;
  return PureState({2, 2, 2, 2}, std::move(v));
}

PureState dicke24() {
  CVec v = CVec::Zero(16);
  const double a = 1.0 / std::sqrt(6.0);
  for (int idx : {0b0011, 0b0101, 0b0110, 0b1001, 0b1010, 0b1100}) v(idx) = a;
  return PureState({2, 2, 2, 2}, std::move(v));
}

DensityMatrix mix_with_white_noise(const NoiseMixture& m) {
  if (m.p < 0 || m.p > 1) throw InvalidDimension("mix_with_white_noise: p outside [0,1]");
  const int n = m.base.total_dim();
  double ps = (m.convention == NoiseConvention::kNoiseWeight) ? 1 - m.p : m.p;
  CMat out = ps * m.base.mat + (1 - ps) / n * CMat::Identity(n, n);
  return DensityMatrix(m.base.dims, std::move(out));
}

DensityMatrix qutrit_family(double alpha, double beta) {
  if (alpha < 0 || beta < 0 || alpha + beta > 1 + 1e-12)
    throw InvalidDimension("qutrit_family: parameters outside the simplex");
  CMat out = (1 - alpha - beta) / 27.0 * CMat::Identity(27, 27);
  // |0><0| x (|00>+|11>+|22>)(<00|+<11|+<22|), unnormalized projector of norm 3
  CVec phi = CVec::Zero(9);
  phi(0) = phi(4) = phi(8) = 1.0;
  CMat bis = CMat::Zero(27, 27);
  bis.block(0, 0, 9, 9) = phi * phi.adjoint();
  out += alpha / 3.0 * bis;
  out += beta * projector(ghz(3, 3)).mat;
  return DensityMatrix({3, 3, 3}, std::move(out));
}

DensityMatrix sample_fully_separable(const std::vector<int>& dims, std::uint64_t seed) {
  int total = 1;
  for (int d : dims) total *= d;
  std::mt19937_64 gen(derive_seed(seed, 0));
  int terms = 1 + static_cast<int>(gen() % total);
  auto q = simplex_sample(terms, derive_seed(seed, 1));
  CMat m = CMat::Zero(total, total);
  for (int t = 0; t < terms; ++t)
    m += q[t] * local_pure_product(dims, derive_seed(seed, 10 + t)).mat;
  return DensityMatrix(dims, std::move(m));
}

DensityMatrix sample_biseparable(const std::vector<int>& dims, std::uint64_t seed) {
  const int n = static_cast<int>(dims.size());
  if (n < 3) throw InvalidDimension("sample_biseparable: need at least 3 parties");
  auto parts = partitions_into_blocks(n, 2);
  auto p = simplex_sample(static_cast<int>(parts.size()), derive_seed(seed, 0));
  int total = 1;
  for (int d : dims) total *= d;
  CMat m = CMat::Zero(total, total);
  std::mt19937_64 gen(derive_seed(seed, 0xD));
  for (size_t i = 0; i < parts.size(); ++i) {
    // several product terms per partition: single products sit on a thin
    // slice of the biseparable set, richer mixtures cover it much better
    int terms = 1 + static_cast<int>(gen() % 4);
    auto q = simplex_sample(terms, derive_seed(seed, 50 + i));
    for (int t = 0; t < terms; ++t) {
      m += p[i] * q[t] *
           product_over_blocks(dims, parts[i], derive_seed(seed, 1 + i + 16 * t)).mat;
    }
  }
  return DensityMatrix(dims, std::move(m));
}

DensityMatrix sample_intactness(const std::vector<int>& dims, int k, std::uint64_t seed) {
  const int n = static_cast<int>(dims.size());
  if (k < 2 || k > n) throw InvalidDimension("sample_intactness: k out of range");
  auto parts = partitions_into_blocks(n, k);
  auto p = simplex_sample(static_cast<int>(parts.size()), derive_seed(seed, 0));
  int total = 1;
  for (int d : dims) total *= d;
  CMat m = CMat::Zero(total, total);
  for (size_t i = 0; i < parts.size(); ++i)
    m += p[i] * product_over_blocks(dims, parts[i], derive_seed(seed, 1 + i)).mat;
  return DensityMatrix(dims, std::move(m));
}

DensityMatrix merge(const DensityMatrix& rho, const DensityMatrix& tau, int n_shared) {
  if (rho.n_parties() != n_shared + 1 || tau.n_parties() != n_shared + 1)
    throw InvalidDimension("merge: party counts do not match n_shared");
  CMat m = kron(rho.mat, tau.mat);
  std::vector<int> dims = rho.dims;
  dims.insert(dims.end(), tau.dims.begin(), tau.dims.end());
  DensityMatrix prod(dims, std::move(m), false);
  // current order: A, C11..C1n, B, C21..C2n -> A, B, C11, C21, ..., C1n, C2n
  std::vector<int> perm;
  perm.push_back(0);
  perm.push_back(n_shared + 1);
  for (int j = 0; j < n_shared; ++j) {
    perm.push_back(1 + j);
    perm.push_back(n_shared + 2 + j);
  }
  DensityMatrix permuted = permute_subsystems(prod, perm);
  // fuse each (C1j, C2j) pair, C1j-major
  std::vector<int> fused = {permuted.dims[0], permuted.dims[1]};
  for (int j = 0; j < n_shared; ++j)
    fused.push_back(permuted.dims[2 + 2 * j] * permuted.dims[3 + 2 * j]);
  return DensityMatrix(fused, std::move(permuted.mat), false);
}

PureState graph_state(const Graph& g) {
  if (g.n > 14) throw InvalidDimension("graph_state: statevector budget is n <= 14");
  const long dim = 1L << g.n;
  CVec v = CVec::Constant(dim, 1.0 / std::sqrt(static_cast<double>(dim)));
  for (auto [i, j] : g.edges) {
    long bi = 1L << (g.n - 1 - i);
    long bj = 1L << (g.n - 1 - j);
    for (long idx = 0; idx < dim; ++idx)
      if ((idx & bi) && (idx & bj)) v(idx) = -v(idx);
  }
  return PureState(std::vector<int>(g.n, 2), std::move(v));
}

Graph random_graph(int n, double edge_prob, std::uint64_t seed) {
  if (n < 1 || edge_prob < 0 || edge_prob > 1)
    throw InvalidDimension("random_graph: bad parameters");
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Graph g;
  g.n = n;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (unif(gen) < edge_prob) g.edges.emplace_back(i, j);
  return g;
}

bool is_connected(const Graph& g) {
  if (g.n <= 1) return true;
  std::vector<std::vector<int>> adj(g.n);
  for (auto [i, j] : g.edges) {
    adj[i].push_back(j);
    adj[j].push_back(i);
  }
  std::vector<bool> seen(g.n, false);
  std::deque<int> q{0};
  seen[0] = true;
  int count = 1;
  while (!q.empty()) {
    int u = q.front();
    q.pop_front();
    for (int v : adj[u])
      if (!seen[v]) {
        seen[v] = true;
        ++count;
        q.push_back(v);
      }
  }
  return count == g.n;
}

std::string graph_to_json(const Graph& g) {
  nlohmann::json j;
  j["n"] = g.n;
  j["edges"] = nlohmann::json::array();
  for (auto [a, b] : g.edges) j["edges"].push_back({a, b});
  return j.dump();
}

Graph graph_from_json(const std::string& text) {
  auto j = nlohmann::json::parse(text);
  Graph g;
  g.n = j.at("n").get<int>();
  for (auto& e : j.at("edges")) {
    int a = e.at(0).get<int>(), b = e.at(1).get<int>();
    if (a == b || a < 0 || b < 0 || a >= g.n || b >= g.n)
      throw InvalidDimension("graph_from_json: bad edge");
    g.edges.emplace_back(std::min(a, b), std::max(a, b));
  }
  return g;
}

}  // namespace gme
