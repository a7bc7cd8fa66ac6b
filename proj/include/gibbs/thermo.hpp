#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "gibbs/interval.hpp"
#include "gibbs/potential.hpp"

namespace gibbs {

struct EnumOptions {
  std::uint64_t budget = 2'000'000;  // max patterns per enumeration
  int threads = 0;                   // 0 = AMENABLE_GIBBS_THREADS / hardware
};

// Worker-thread count honoring AMENABLE_GIBBS_THREADS.
int resolve_threads(int requested);

// Deterministic chunked map-reduce over all |A|^n letter tuples: partial sums
// per fixed-size chunk are reduced in chunk order, so the result does not
// depend on the number of worker threads.
Interval sum_over_patterns(const Alphabet& A, std::size_t n,
                           const EnumOptions& opts,
                           const std::function<Interval(const std::vector<Letter>&)>& term);

// Z_F(A, phi) = sum_{w in A^F} exp(sup phi_F([w] n A^G)).
Interval partition_function(const Potential& pot, const SiteSet& F,
                            const Alphabet& A, const EnumOptions& opts = {});

// Enclosure of the countable-alphabet Z_F(phi): the A-truncated sum over full
// cylinder sups plus the certified product-factorized remainder
// Z_1^{|F|} - (Z_1 - t(A))^{|F|}.
Interval partition_function_countable(const Potential& pot, const SiteSet& F,
                                      const Alphabet& A, const EnumOptions& opts = {});

// Certified bound [0, r] on sum over the patterns in (full shift)^n \ A^n of
// prod_g exp(sup phi([w(g)])), i.e. the part of an n-site partition sum that a
// truncation to A discards.
Interval countable_pattern_remainder(const Potential& pot, std::size_t n,
                                     const Alphabet& A);

struct PressureUpperResult {
  double upper = 0.0;                 // certified upper bound on p(phi)
  std::size_t witness = 0;            // index of the minimizing candidate
  std::vector<double> per_candidate;  // (1/|F|) log Z upper per candidate
};

// Upper bound via the infimum characterization over candidate windows.
// countable == true uses the countable enclosure, else the A-restricted one.
PressureUpperResult pressure_upper(const Potential& pot,
                                   const std::vector<SiteSet>& candidates,
                                   const Alphabet& A, bool countable,
                                   const EnumOptions& opts = {});

// Shannon entropy -sum q log q of a finite marginal, certified.
Interval entropy(const std::vector<double>& q);

// Expectation of phi under the Bernoulli product with marginal q on A.
Interval mean_energy(const Potential& pot, const Alphabet& A,
                     const std::vector<double>& q);

struct PressureLowerOptions {
  int max_iterations = 500;
  double rel_tol = 1e-10;
};

struct PressureLowerResult {
  double lower = 0.0;        // certified lower bound on p(phi)
  std::vector<double> q;     // optimized Bernoulli marginal on A
  Interval entropy_part;
  Interval energy_part;
  int iterations = 0;
};

// Variational lower bound h(q) + E_q[phi] over Bernoulli product measures,
// maximized by a damped mean-field fixed point. The certified bound is the
// interval value at the final q; optimizer quality never affects soundness.
PressureLowerResult pressure_lower(const Potential& pot, const Alphabet& A,
                                   const PressureLowerOptions& opts = {});

struct LadderEntry {
  std::size_t alphabet_size = 0;
  double upper = 0.0;  // upper bound on the A_n-restricted pressure
};

struct PressureBracket {
  double lower = 0.0;
  double upper = 0.0;
  PressureUpperResult upper_detail;
  PressureLowerResult lower_detail;
  std::vector<LadderEntry> ladder;  // countable mode only
};

struct BracketOptions {
  std::int64_t max_radius = 2;     // candidate Folner boxes 0..max_radius
  bool countable = true;
  std::vector<std::size_t> ladder;  // alphabet sizes for the finite ladder
  EnumOptions enumeration;
  PressureLowerOptions lower;
};

PressureBracket pressure_bracket(const Potential& pot, const Alphabet& A,
                                 const BracketOptions& opts = {});

struct ShearerResult {
  bool holds_certified = false;     // lhs.hi <= rhs.lo
  bool violated_certified = false;  // lhs.lo >  rhs.hi (would indicate a bug)
  Interval lhs, rhs;                // both sides after the nonnegativity shift
  std::int64_t k = 0;               // cover multiplicity used
};

// Checks Z_F <= prod_K Z_K^{1/k} for a k-cover of F after shifting phi by its
// |A|-restricted sup-norm to enforce nonnegativity (the shift multiplies both
// sides by the matching exponential, preserving the inequality).
ShearerResult shearer_check(const Potential& pot, const SiteSet& F,
                            const std::vector<SiteSet>& cover, const Alphabet& A,
                            const EnumOptions& opts = {});

}  // namespace gibbs
