// qcore.hpp
// Dense complex linear algebra and quantum-information primitives.

#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace gme {

using Complex = std::complex<double>;
// Row-major dense complex matrix; the working type of the whole toolkit.
using CMat = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using CVec = Eigen::Matrix<Complex, Eigen::Dynamic, 1>;

constexpr double kHermTol = 1e-10;
constexpr double kTraceTol = 1e-10;
constexpr double kPsdTol = -1e-9;

struct InvalidDimension : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct InvariantViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Derives an independent substream seed from a root seed and an object
// counter (splitmix64 over the mixed pair).
std::uint64_t derive_seed(std::uint64_t root, std::uint64_t counter);

// Pure state on a tensor-product space with explicit subsystem dimensions.
struct PureState {
  std::vector<int> dims;
  CVec amps;

  PureState() = default;
  PureState(std::vector<int> d, CVec a);

  int total_dim() const;
  int n_parties() const { return static_cast<int>(dims.size()); }
};

// Hermitian, unit-trace, PSD operator with explicit subsystem dimensions.
// Invariants are checked at construction.
struct DensityMatrix {
  std::vector<int> dims;
  CMat mat;

  DensityMatrix() = default;
  DensityMatrix(std::vector<int> d, CMat m, bool validate = true);

  int total_dim() const;
  int n_parties() const { return static_cast<int>(dims.size()); }
  double purity() const;
};

DensityMatrix projector(const PureState& psi);

struct RandomStateSpec {
  int dim = 2;
  int rank = 1;
  std::uint64_t seed = 0;
};

// d x d unitary drawn from the Haar measure (QR of a complex Gaussian
// matrix with the R-diagonal phase fix). Deterministic in seed.
CMat haar_unitary(int d, std::uint64_t seed);

// Haar-random local pure state of dimension d.
CVec haar_vector(int d, std::uint64_t seed);

// Random density matrix: simplex-uniform eigenvalues over `rank` entries,
// eigenvectors from a Haar unitary.
DensityMatrix random_density(const RandomStateSpec& spec);

// Simplex-uniform weights (normalized exponential variates).
std::vector<double> simplex_sample(int k, std::uint64_t seed);

CMat kron(const CMat& a, const CMat& b);
CVec kron_vec(const CVec& a, const CVec& b);

// Reorders the tensor factors; perm[i] is the original index of the
// subsystem placed at slot i of the output.
DensityMatrix permute_subsystems(const DensityMatrix& rho, const std::vector<int>& perm);

DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<int>& keep);

// Transposes the chosen tensor factors. The result need not be PSD, so it
// is returned as a plain matrix.
CMat partial_transpose(const DensityMatrix& rho, const std::vector<int>& subset);

double min_eigenvalue(const CMat& h);

// Base-2 von Neumann entropy; eigenvalues below 1e-12 are clamped to zero.
double von_neumann_entropy(const DensityMatrix& rho);

// Sum of the k largest singular values.
double kyfan_norm(const CMat& m, int k);

// Embeds rho into larger local spaces, original basis vectors mapping to
// the first dims[i] basis vectors of each enlarged factor.
DensityMatrix embed_pad(const DensityMatrix& rho, const std::vector<int>& new_dims);
PureState embed_pad(const PureState& psi, const std::vector<int>& new_dims);

}  // namespace gme
