#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <vector>

#include "gibbs/specification.hpp"

namespace gibbs {

struct SamplerOptions {
  std::uint64_t seed = 1;
  std::size_t max_alphabet = 4096;  // cap for tail-driven alphabet growth
  KernelOptions kernel;
};

// Systematic-scan heat-bath chain on a finite window with fixed boundary,
// driven by the certified single-site kernel tables. Draws use the table
// midpoints; when the inverse-CDF position lands in the certified tail the
// working alphabet is widened and the draw repeated, so the chain genuinely
// walks the countable alphabet instead of silently truncating it.
class HeatBathSampler {
 public:
  HeatBathSampler(const Potential& pot, SiteSet window,
                  BoundaryCondition boundary, Alphabet A,
                  SamplerOptions opts = {});

  // One systematic sweep through the window in canonical site order; records
  // the post-sweep letters into the marginal counters.
  void sweep();
  void run(std::size_t sweeps);
  void reset_marginals();

  const SiteSet& window() const { return window_; }
  Pattern state() const { return Pattern(window_, letters_); }
  const Alphabet& working_alphabet() const { return alphabet_; }
  std::size_t extensions() const { return extensions_; }
  std::uint64_t steps() const { return steps_; }
  // Per-site letter counts, aligned with the window's canonical order.
  const std::vector<std::map<Letter, std::uint64_t>>& marginals() const {
    return marginals_;
  }

 private:
  Letter draw_site(const Site& g);

  const Potential& pot_;
  SiteSet window_;
  BoundaryCondition boundary_;
  Alphabet alphabet_;
  SamplerOptions opts_;
  std::mt19937_64 rng_;
  std::vector<Letter> letters_;
  std::vector<std::map<Letter, std::uint64_t>> marginals_;
  std::size_t extensions_ = 0;
  std::uint64_t steps_ = 0;
};

struct KernelCheckReport {
  double tv = 0.0;     // empirical vs table-midpoint total variation
  double slack = 0.0;  // certified interval + tail allowance
  double chi_square = 0.0;
  double p_value = 1.0;
  std::int64_t dof = 0;
  std::size_t draws = 0;
  std::size_t off_alphabet = 0;  // draws that extended past A
  bool pass(double tol) const { return tv <= tol + slack; }
};

// Draws `draws` iid single-site heat-bath samples at g under boundary x and
// compares the empirical law against the certified kernel table on A.
KernelCheckReport empirical_kernel_check(const Potential& pot, const Site& g,
                                         const BoundaryCondition& x,
                                         const Alphabet& A, std::size_t draws,
                                         std::uint64_t seed,
                                         const KernelOptions& kopts = {});

// Upper regularized incomplete gamma Q(a, x) = Gamma(a, x) / Gamma(a),
// a > 0, x >= 0; powers the chi-square tail probability below.
double regularized_gamma_upper(double a, double x);
double chi_square_pvalue(double stat, std::int64_t dof);

}  // namespace gibbs
