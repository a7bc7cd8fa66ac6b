#pragma once

#include <cstdint>
#include <vector>

#include "gibbs/group.hpp"
#include "gibbs/interval.hpp"
#include "gibbs/pattern.hpp"
#include "gibbs/potentials.hpp"

// Independent cross-checking oracles. These deliberately avoid the library's
// potential / enumeration machinery: each rebuilds its answer from raw
// parameters along a different route, so agreement is evidence rather than
// tautology. They back the `verify` subcommand and the test suite.
namespace gibbs::oracle {

struct TransferBracket {
  Interval log_lambda;  // encloses log of the spectral radius
  int iterations = 0;
};

// d = 1 nearest-neighbor pressure via the transfer matrix
// M(a, b) = exp(beta (f0(a) + J(a, b))): power iteration in plain doubles for
// the test vector, then a Collatz-Wielandt interval bracket
// min_a (Mv)_a / v_a <= lambda_max <= max_a (Mv)_a / v_a, valid for any
// positive v since M is componentwise positive.
TransferBracket transfer_matrix_pressure(const std::vector<double>& f0,
                                         const std::vector<std::vector<double>>& J,
                                         double beta, int iterations = 200);

struct PottsConditional {
  std::vector<double> weights;  // unnormalized exp(E(a)), aligned with A
  double denom_tail_lo = 0.0;   // bounds on the off-A denominator mass
  double denom_tail_hi = 0.0;
  double slop = 0.0;            // truncation + floating-point allowance
};

// Truncated single-site conditional of the clustering family (linear cost
// form, geometric or zero coupling) at site g under boundary x: plain-double
// energies E(a) = -beta (c0(a) + 2 sum_{h != g, x(h) = a} C(h g^{-1})) summed
// over the radius-R ball around g, with closed-form bounds for both the
// dropped coupling terms and the off-A denominator mass.
PottsConditional potts_site_conditional(const GroupContext& ctx,
                                        const CountablePottsPotential::Params& p,
                                        double beta, const Site& g,
                                        const BoundaryCondition& x,
                                        const Alphabet& A, std::int64_t radius = 60);

}  // namespace gibbs::oracle
