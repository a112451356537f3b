// criteria.hpp
// Analytic GME certifiers used to label data and benchmark the classifier.
// All criteria are sufficient-only: detected == true certifies, false is
// inconclusive.

#pragma once

#include "gme/qcore.hpp"

namespace gme {

enum class CriterionId { kGuhne3, kGuhne3Ghz, kVrho, kConcurrenceLb, kTensor4, kNpt };

struct CriterionVerdict {
  bool detected = false;
  double margin = 0.0;  // positive => detected (strict, with 1e-9 dead zone)
  CriterionId criterion_id = CriterionId::kGuhne3;
};

// A product state |psi> = (x)_i |x_i> together with per-party flipped
// states |x'_i>; the probe of the concurrence lower bound.
struct ProductProbe {
  std::vector<CVec> locals;   // |x_i>
  std::vector<CVec> flipped;  // |x'_i>
  std::uint64_t seed = 0;
};

ProductProbe random_probe(const std::vector<int>& dims, std::uint64_t seed);

// Biseparability inequality for 3-qubit states; violation certifies
// genuine tripartite entanglement.
CriterionVerdict guhne3(const DensityMatrix& rho);

// GHZ-type companion biseparability inequality from the same family:
// |rho_{1,8}| <= sqrt(rho_{2,2} rho_{7,7}) + sqrt(rho_{3,3} rho_{6,6})
//              + sqrt(rho_{4,4} rho_{5,5}) holds for every biseparable
// 3-qubit state; violation certifies genuine tripartite entanglement.
// Complements guhne3, which is blind to GHZ-diagonal coherence.
CriterionVerdict guhne3_ghz(const DensityMatrix& rho);

// n-qubit generalization of the GHZ-type biseparability inequality:
// |rho_{0,N-1}| <= sum over bit-complement diagonal pairs (k, N-1-k) of
// sqrt(rho_{k,k} rho_{N-1-k,N-1-k}). Violation certifies GME; on the
// GHZ_n Werner line it margins to zero exactly at p = 1/(2(1-2^{-n})).
CriterionVerdict guhne_ghz_n(const DensityMatrix& rho);

// Entropic lower bound on tripartite entanglement of formation:
// margin = S(AB)+S(AC)+S(BC) - 3 S(rho) - 2 log2(Dmax).
CriterionVerdict vrho(const DensityMatrix& rho);

// GME-concurrence lower bound F(rho, psi); positive F certifies GME with
// C >= F / (sqrt(2) (n-1)). Fast factorized evaluation.
CriterionVerdict concurrence_lower_bound(const DensityMatrix& rho, const ProductProbe& probe);

// Same quantity evaluated literally in the doubled space (explicit
// rho (x) rho and swap operators); test oracle for the fast path.
double concurrence_f_bruteforce(const DensityMatrix& rho, const ProductProbe& probe);

// Probe search: multi-start hill climbing over product probes with a total
// budget of `max_probes` F-evaluations (random restarts plus small local
// rotations; purely random draws rarely come close to the optimal probe).
// Returns the best F found; if `best_probe` is non-null it receives the
// probe that achieved it.
CriterionVerdict concurrence_probe_search(const DensityMatrix& rho, std::uint64_t seed,
                                          int max_probes = 200,
                                          ProductProbe* best_probe = nullptr);

// Pauli correlation-tensor unfolding criterion for 4-qubit states.
CriterionVerdict tensor4_criterion(const DensityMatrix& rho);

CriterionVerdict is_npt(const DensityMatrix& rho, const std::vector<int>& cut);

}  // namespace gme
