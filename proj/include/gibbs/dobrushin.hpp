#pragma once

#include <cstdint>
#include <string>

#include "gibbs/potentials.hpp"
#include "gibbs/specification.hpp"

namespace gibbs {

// Certified upper bound on the Dobrushin interdependence coefficient
// rho_{g,h} of the clustering family's single-site kernels:
//   rho_{g,h} <= 2 beta (C(h g^{-1}) + C(g h^{-1})),  rho_{g,g} = 0.
Interval rho_bound_example(const CountablePottsPotential& fam, const Site& g,
                           const Site& h);

// Certified upper bound on the Dobrushin contraction coefficient
//   c(gamma) = sup_g sum_{h != g} rho_{g,h} <= 4 beta sum_{h != 1} C(h).
Interval dobrushin_constant_bound(const CountablePottsPotential& fam);

struct UniquenessCertificate {
  enum class Verdict { unique, inconclusive };

  ExampleConditionsReport conditions;
  Interval contraction;     // certified bound on c(gamma)
  Interval beta_threshold;  // 1 / (4 sum C); contraction < 1 below its lower end
  Verdict verdict = Verdict::inconclusive;
  std::string reason;

  bool unique() const { return verdict == Verdict::unique; }
};

// Full certificate: admissibility of the family at its configured beta, the
// contraction bound, and the verdict. Inconclusive never means "non-unique";
// it only means this criterion does not certify uniqueness.
UniquenessCertificate uniqueness_certificate(const CountablePottsPotential& fam);

struct RhoNumericResult {
  double lower = 0.0;  // certified lower bound on rho_{g,h}
  std::size_t trials = 0;
  Letter background = 0;  // witness boundary data
  Letter letter_a = 0, letter_b = 0;
};

// Randomized certified lower bound on rho_{g,h}: boundary pairs differing only
// at h, total-variation distance of the single-site kernels at g bounded from
// below through the certified tables.
RhoNumericResult rho_numeric(const Potential& pot, const Site& g, const Site& h,
                             const Alphabet& A, std::size_t trials,
                             std::uint64_t seed, const KernelOptions& kopts = {});

}  // namespace gibbs
