#pragma once

#include <cstdint>
#include <vector>

#include "gibbs/interval.hpp"
#include "gibbs/potential.hpp"
#include "gibbs/thermo.hpp"

namespace gibbs {

// Coordinate-wise involution exchanging two patterns on K: at each site k the
// letters w(k) and v(k) are transposed, everything else is fixed.
struct Swap {
  SiteSet K;
  Pattern w;
  Pattern v;

  Swap(SiteSet K_, Pattern w_, Pattern v_);
  bool is_identity() const { return w == v; }
};

BoundaryCondition apply_swap(const Swap& s, const BoundaryCondition& x,
                             const GroupContext& ctx);

// phi^tau_F(x) = phi_F(tau^{-1} x) - phi_F(x), summed over the window F.
Interval energy_diff_window(const Potential& pot, const Swap& s,
                            const BoundaryCondition& x, const SiteSet& F);

struct EnergyDiff {
  Interval value;        // enclosure of the exhaustion limit phi^tau_*(x)
  std::int64_t window;   // exhaustion index actually used
  double remainder;      // certified bound on the out-of-window contribution
};

// The exhaustion limit of the swap energy difference: window value over
// E_m^{-1} K plus the variation-tail remainder (exactly zero once the window
// swallows the influence set of a finite-range potential).
EnergyDiff energy_diff_limit(const Potential& pot, const Swap& s,
                             const BoundaryCondition& x, std::int64_t window = 0,
                             double tol = 1e-14);

struct KernelOptions {
  std::int64_t window = 0;  // 0 = automatic
  double tol = 1e-14;
  std::uint64_t budget = 2'000'000;
};

struct KernelTable {
  SiteSet K;
  Alphabet A;
  BoundaryCondition boundary;
  std::vector<Pattern> patterns;   // canonical order over A^K
  std::vector<Interval> entries;   // aligned with patterns
  Interval tail_mass;              // mass of the letters outside A^K
  std::int64_t window = 0;
  double v_k_upper = 0.0;          // V_K bound entering the tail envelope
  double delta_k_upper = 0.0;      // Delta_K bound entering the tail envelope

  const Interval& entry_for(const Pattern& w) const;
};

// Certified single-window Gibbs kernel gamma_K(., x) truncated to A^K: entries
// exp(phi^tau_*) normalized against the full countable denominator, whose
// outside-A part is enclosed through the sup-difference envelope.
KernelTable kernel_table(const Potential& pot, const SiteSet& K,
                         const BoundaryCondition& x, const Alphabet& A,
                         const KernelOptions& opts = {});

struct ConsistencyReport {
  double max_gap = 0.0;        // certified interval gap (> 0 would be a bug)
  double max_deviation = 0.0;  // worst midpoint deviation minus slack
  double tail_mass = 0.0;
  bool pass = false;
};

// Checks gamma_K gamma_F = gamma_K on A-cylinders for F subseteq K by
// composing the truncated tables; the A-truncation contributes certified
// slack instead of a verdict flip.
ConsistencyReport consistency_check(const Potential& pot, const SiteSet& K,
                                    const SiteSet& F, const BoundaryCondition& x,
                                    const Alphabet& A, const KernelOptions& opts = {});

struct InvarianceReport {
  double max_gap = 0.0;
  double max_deviation = 0.0;  // worst midpoint deviation
  double width_allowance = 0.0;
  bool pass = false;
};

// Compares gamma_K(., x) against the right-translated kernel
// gamma_{K g^{-1}}(g.[w], g.x) entry by entry.
InvarianceReport invariance_check(const Potential& pot, const SiteSet& K,
                                  const BoundaryCondition& x, const Alphabet& A,
                                  const Site& g, const KernelOptions& opts = {});

struct BowenGibbsReport {
  std::size_t violations = 0;   // certified violations (bugs)
  double worst_low = 1e300;     // min over w of ratio.hi / lower bound
  double worst_high = 0.0;      // max over w of ratio.lo / upper bound
  double v_f = 0.0, delta_f = 0.0;
  Interval z;
  bool pass = false;
};

// Verifies exp(-2V_F - 3Delta_F) <= gamma_F([w], x) / (exp(phi_F(w y)) / Z_F)
// <= exp(2V_F + 3Delta_F) for every w in A^F, with certified two-sided data.
BowenGibbsReport bowen_gibbs_check(const Potential& pot, const SiteSet& F,
                                   const BoundaryCondition& x,
                                   const BoundaryCondition& y, const Alphabet& A,
                                   const KernelOptions& opts = {});

}  // namespace gibbs
