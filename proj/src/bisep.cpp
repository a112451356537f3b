// Conditional-gradient (fully corrective Frank-Wolfe) search for a
// biseparable decomposition: minimize ||rho - sigma||_F^2 over sigma in
// the convex hull of pure states product across some bipartition. The
// linear subproblem is solved per cut by alternating minimum-eigenvector
// ascent over product vectors, with random restarts.

#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "gme/pipeline.hpp"

namespace gme {

namespace {

struct CutShape {
  int party;           // the single party split off
  int d_cut, d_rest;   // dimensions of the two sides
  std::vector<int> index_map;  // (a * d_rest + r) -> full index
};

CutShape cut_shape(const std::vector<int>& dims, int party) {
  CutShape cs;
  cs.party = party;
  cs.d_cut = dims[party];
  int total = 1;
  for (int d : dims) total *= d;
  cs.d_rest = total / cs.d_cut;
  cs.index_map.resize(total);
  // rest index runs over remaining parties in original order
  std::vector<int> rest_dims;
  for (size_t i = 0; i < dims.size(); ++i)
    if (static_cast<int>(i) != party) rest_dims.push_back(dims[i]);
  std::vector<int> strides(dims.size());
  int acc = 1;
  for (int i = static_cast<int>(dims.size()) - 1; i >= 0; --i) {
    strides[i] = acc;
    acc *= dims[i];
  }
  for (int a = 0; a < cs.d_cut; ++a)
    for (int r = 0; r < cs.d_rest; ++r) {
      int rem = r, idx = a * strides[party];
      int pos = static_cast<int>(rest_dims.size()) - 1;
      for (int i = static_cast<int>(dims.size()) - 1; i >= 0; --i) {
        if (i == party) continue;
        idx += (rem % rest_dims[pos]) * strides[i];
        rem /= rest_dims[pos];
        --pos;
      }
      cs.index_map[a * cs.d_rest + r] = idx;
    }
  return cs;
}

CVec assemble(const CutShape& cs, const CVec& x, const CVec& y) {
  CVec v = CVec::Zero(cs.index_map.size());
  for (int a = 0; a < cs.d_cut; ++a)
    for (int r = 0; r < cs.d_rest; ++r) v(cs.index_map[a * cs.d_rest + r]) = x(a) * y(r);
  return v;
}

CVec min_eigvec(const CMat& h) {
  Eigen::SelfAdjointEigenSolver<CMat> es((h + h.adjoint()) / 2.0);
  return es.eigenvectors().col(0);
}

// Minimize <x (x) y| G |x (x) y> over unit product vectors across the cut.
std::pair<double, CVec> cut_oracle(const CMat& g, const CutShape& cs, std::mt19937_64& rng,
                                   int restarts, int sweeps) {
  double best_val = std::numeric_limits<double>::infinity();
  CVec best;
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int t = 0; t < restarts; ++t) {
    CVec y(cs.d_rest);
    for (int i = 0; i < cs.d_rest; ++i) y(i) = Complex(gauss(rng), gauss(rng));
    y /= y.norm();
    CVec x;
    double val = 0;
    for (int sweep = 0; sweep < sweeps; ++sweep) {
      CMat a = CMat::Zero(cs.d_cut, cs.d_cut);
      for (int p = 0; p < cs.d_cut; ++p)
        for (int q = 0; q < cs.d_cut; ++q) {
          Complex s = 0;
          for (int r = 0; r < cs.d_rest; ++r)
            for (int rp = 0; rp < cs.d_rest; ++rp)
              s += std::conj(y(r)) * g(cs.index_map[p * cs.d_rest + r],
                                       cs.index_map[q * cs.d_rest + rp]) * y(rp);
          a(p, q) = s;
        }
      x = min_eigvec(a);
      CMat b = CMat::Zero(cs.d_rest, cs.d_rest);
      for (int r = 0; r < cs.d_rest; ++r)
        for (int rp = 0; rp < cs.d_rest; ++rp) {
          Complex s = 0;
          for (int p = 0; p < cs.d_cut; ++p)
            for (int q = 0; q < cs.d_cut; ++q)
              s += std::conj(x(p)) * g(cs.index_map[p * cs.d_rest + r],
                                       cs.index_map[q * cs.d_rest + rp]) * x(q);
          b(r, rp) = s;
        }
      Eigen::SelfAdjointEigenSolver<CMat> es((b + b.adjoint()) / 2.0);
      double new_val = es.eigenvalues()(0);
      y = es.eigenvectors().col(0);
      if (sweep > 0 && std::abs(new_val - val) < 1e-13) { val = new_val; break; }
      val = new_val;
    }
    if (val < best_val) {
      best_val = val;
      best = assemble(cs, x, y);
    }
  }
  return {best_val, best};
}

// Euclidean projection onto the probability simplex.
void project_simplex(Eigen::VectorXd& w) {
  const int n = static_cast<int>(w.size());
  std::vector<double> u(w.data(), w.data() + n);
  std::sort(u.begin(), u.end(), std::greater<double>());
  double css = 0, theta = 0;
  int k = 0;
  for (int i = 0; i < n; ++i) {
    css += u[i];
    double th = (css - 1.0) / (i + 1);
    if (u[i] - th > 0) { k = i + 1; theta = th; }
  }
  if (k == 0) { w.setZero(); w(0) = 1; return; }
  for (int i = 0; i < n; ++i) w(i) = std::max(0.0, w(i) - theta);
}

}  // namespace

BisepSearchResult bisep_search(const DensityMatrix& rho, int budget, std::uint64_t seed) {
  if (rho.n_parties() != 3) throw InvalidDimension("bisep_search: need 3 parties");
  if (rho.total_dim() > 64) throw InvalidDimension("bisep_search: total dimension above 64");
  const int dim = rho.total_dim();
  std::vector<CutShape> cuts;
  for (int i = 0; i < rho.n_parties(); ++i) cuts.push_back(cut_shape(rho.dims, i));
  std::mt19937_64 rng(derive_seed(seed, 0xB15E));

  std::vector<CVec> atoms;
  std::vector<int> atom_cut;
  Eigen::MatrixXd gram(0, 0);
  Eigen::VectorXd bvec(0), w(0);
  const double rho_sq = (rho.mat * rho.mat).trace().real();

  auto add_atom = [&](const CVec& v, int cut) {
    const int k = static_cast<int>(atoms.size());
    atoms.push_back(v);
    atom_cut.push_back(cut);
    gram.conservativeResize(k + 1, k + 1);
    bvec.conservativeResize(k + 1);
    w.conservativeResize(k + 1);
    w(k) = 0;
    for (int i = 0; i <= k; ++i) {
      double overlap = std::norm((atoms[i].adjoint() * v)(0, 0));
      gram(i, k) = gram(k, i) = overlap;
    }
    bvec(k) = (v.adjoint() * rho.mat * v)(0, 0).real();
  };

  auto current_sigma = [&] {
    CMat sigma = CMat::Zero(dim, dim);
    for (size_t i = 0; i < atoms.size(); ++i)
      if (w(i) > 0) sigma += w(i) * (atoms[i] * atoms[i].adjoint());
    return sigma;
  };

  auto dist_sq = [&] {
    if (atoms.empty()) return rho_sq;
    return std::max(0.0, (w.transpose() * gram * w)(0, 0) - 2 * bvec.dot(w) + rho_sq);
  };

  auto corrective_pass = [&](int iters) {
    const int k = static_cast<int>(atoms.size());
    double lip = 2.0 * gram.cwiseAbs().rowwise().sum().maxCoeff();
    if (lip <= 0) lip = 2.0;
    Eigen::VectorXd z = w, w_prev = w;
    double t_acc = 1;
    for (int it = 0; it < iters; ++it) {
      Eigen::VectorXd grad = 2.0 * (gram * z - bvec);
      Eigen::VectorXd w_new = z - grad / lip;
      project_simplex(w_new);
      double t_new = (1 + std::sqrt(1 + 4 * t_acc * t_acc)) / 2;
      z = w_new + ((t_acc - 1) / t_new) * (w_new - w_prev);
      w_prev = w_new;
      t_acc = t_new;
    }
    w = w_prev;
    (void)k;
  };

  auto prune = [&] {
    std::vector<int> keep;
    for (size_t i = 0; i < atoms.size(); ++i)
      if (w(i) > 1e-12) keep.push_back(static_cast<int>(i));
    if (keep.size() == atoms.size()) return;
    std::vector<CVec> na;
    std::vector<int> nc;
    Eigen::MatrixXd ng(keep.size(), keep.size());
    Eigen::VectorXd nb(keep.size()), nw(keep.size());
    for (size_t i = 0; i < keep.size(); ++i) {
      na.push_back(atoms[keep[i]]);
      nc.push_back(atom_cut[keep[i]]);
      nb(i) = bvec(keep[i]);
      nw(i) = w(keep[i]);
      for (size_t j = 0; j < keep.size(); ++j) ng(i, j) = gram(keep[i], keep[j]);
    }
    atoms = std::move(na);
    atom_cut = std::move(nc);
    gram = std::move(ng);
    bvec = std::move(nb);
    w = std::move(nw);
  };

  double best_dist = std::sqrt(rho_sq);
  int stall = 0;
  for (int iter = 0; iter < budget; ++iter) {
    CMat g = atoms.empty() ? CMat(-rho.mat) : CMat(current_sigma() - rho.mat);
    double best_val = std::numeric_limits<double>::infinity();
    CVec best_v;
    int best_cut = 0;
    for (size_t c = 0; c < cuts.size(); ++c) {
      auto [val, v] = cut_oracle(g, cuts[c], rng, 3, 12);
      if (val < best_val) {
        best_val = val;
        best_v = v;
        best_cut = static_cast<int>(c);
      }
    }
    add_atom(best_v, best_cut);
    if (atoms.size() == 1) w(0) = 1;
    corrective_pass(150);
    prune();

    double d = std::sqrt(dist_sq());
    if (d < best_dist - 1e-14) {
      best_dist = d;
      stall = 0;
    } else if (++stall > 60) {
      break;  // bounded away; budget would be wasted
    }
    if (d < 1e-6) break;
  }

  BisepSearchResult out;
  out.distance = std::sqrt(dist_sq());
  out.found = out.distance < 1e-6;
  for (size_t i = 0; i < atoms.size(); ++i)
    if (w(i) > 0) out.atoms.push_back({atom_cut[i], w(i), atoms[i]});
  return out;
}

double bisep_reconstruction_error(const DensityMatrix& rho, const BisepSearchResult& r) {
  CMat sigma = CMat::Zero(rho.total_dim(), rho.total_dim());
  for (const auto& a : r.atoms) sigma += a.weight * (a.vector * a.vector.adjoint());
  return (rho.mat - sigma).norm();
}

bool bisep_atoms_are_product(const BisepSearchResult& r, const std::vector<int>& dims,
                             double tol) {
  for (const auto& a : r.atoms) {
    CutShape cs = cut_shape(dims, a.cut_party);
    CMat m(cs.d_cut, cs.d_rest);
    for (int p = 0; p < cs.d_cut; ++p)
      for (int q = 0; q < cs.d_rest; ++q) m(p, q) = a.vector(cs.index_map[p * cs.d_rest + q]);
    Eigen::JacobiSVD<CMat> svd(m);
    if (svd.singularValues().size() > 1 && svd.singularValues()(1) > tol) return false;
  }
  return true;
}

}  // namespace gme
