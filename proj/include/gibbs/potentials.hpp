#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "gibbs/potential.hpp"

namespace gibbs {

// phi(x) = beta * f(x(1_G)) for a table f on a finite declared alphabet.
class SingleSitePotential final : public Potential {
 public:
  SingleSitePotential(std::shared_ptr<const GroupContext> ctx, double beta,
                      std::vector<double> values);

  std::string describe() const override;
  Interval eval(const BoundaryCondition& x) const override;
  Interval eval_diff(const BoundaryCondition& x,
                     const BoundaryCondition& y) const override;
  Interval sup_phi_F_cylinder(const SiteSet& F, const Pattern& w,
                              const Alphabet* restrict) const override;
  Interval inf_phi_F_cylinder(const SiteSet& F, const Pattern& w,
                              const Alphabet* restrict) const override;
  double delta_upper(std::int64_t m) const override;
  double variation_tail_upper(std::int64_t m) const override;
  Interval single_site_sup(Letter a) const override;
  Interval single_site_tail(const Alphabet& A) const override;
  std::optional<Alphabet> declared_alphabet() const override { return alphabet_; }
  std::optional<SiteSet> influence_set() const override;
  Interval mean_energy(const Alphabet& A, const std::vector<double>& q) const override;
  std::vector<double> mean_energy_gradient(const Alphabet& A,
                                           const std::vector<double>& q) const override;
  Interval abs_sup(const Alphabet& A) const override;

 private:
  Interval value_of(Letter a) const;  // beta * f(a), certified
  Alphabet alphabet_;
  std::vector<Interval> values_;  // pre-scaled by beta
};

// phi(x) = beta * [ f0(x(1_G)) + sum_n J_n(x(1_G), x(n)) ] over a finite
// neighbor set N (identity excluded), on a finite declared alphabet.
// Lattice groups only: neighbor offsets are coordinate vectors.
class PairPotential final : public Potential {
 public:
  struct Neighbor {
    Site offset;
    std::vector<std::vector<double>> J;  // q x q
  };

  PairPotential(std::shared_ptr<const GroupContext> ctx, double beta,
                std::vector<double> f0, std::vector<Neighbor> neighbors);

  std::string describe() const override;
  Interval eval(const BoundaryCondition& x) const override;
  Interval eval_diff(const BoundaryCondition& x,
                     const BoundaryCondition& y) const override;
  Interval sup_phi_F_cylinder(const SiteSet& F, const Pattern& w,
                              const Alphabet* restrict) const override;
  Interval inf_phi_F_cylinder(const SiteSet& F, const Pattern& w,
                              const Alphabet* restrict) const override;
  double delta_upper(std::int64_t m) const override;
  double variation_tail_upper(std::int64_t m) const override;
  Interval single_site_sup(Letter a) const override;
  Interval single_site_tail(const Alphabet& A) const override;
  std::optional<Alphabet> declared_alphabet() const override { return alphabet_; }
  std::optional<SiteSet> influence_set() const override { return influence_; }
  Interval mean_energy(const Alphabet& A, const std::vector<double>& q) const override;
  std::vector<double> mean_energy_gradient(const Alphabet& A,
                                           const std::vector<double>& q) const override;
  Interval abs_sup(const Alphabet& A) const override;

 private:
  // Certified extreme of phi_F over [w] (+1 sup, -1 inf) by per-exterior-site
  // optimization; exact because distinct exterior sites never share a term.
  Interval extreme_phi_F(const SiteSet& F, const Pattern& w, const Alphabet& A,
                         bool want_sup) const;
  Interval f0_of(Letter a) const;
  Interval j_of(std::size_t n, Letter a, Letter b) const;

  Alphabet alphabet_;
  std::vector<Interval> f0_;                          // pre-scaled by beta
  std::vector<Neighbor> neighbors_raw_;
  std::vector<std::vector<std::vector<Interval>>> j_;  // [n][a][b], pre-scaled
  std::vector<double> osc_;                            // per-neighbor oscillation bound
  SiteSet influence_;
  SiteSet neighbor_sites_;
};

// The countable-alphabet clustering family
//   phi(x) = - sum_g c(g, x(1_G)) * 1{x(1_G) = x(g)},
// with c(1_G, n) a monotone cost on letters (linear or logarithmic form) and
// c(g, .) = C(g) = amplitude * lambda^{|g|} for g != 1_G (or zero coupling).
// All countable tails are certified: shell-count ratio tests on linf lattices,
// exact finite sums on complete table groups.
class CountablePottsPotential final : public Potential {
 public:
  enum class CostForm { linear, logarithmic };
  enum class CouplingForm { zero, geometric };

  struct Params {
    CostForm cost_form = CostForm::linear;
    double cost_coef = 1.0;
    CouplingForm coupling_form = CouplingForm::zero;
    double amplitude = 1.0;
    double lambda = 0.5;
  };

  CountablePottsPotential(std::shared_ptr<const GroupContext> ctx, double beta,
                          Params params);

  std::string describe() const override;
  Interval eval(const BoundaryCondition& x) const override;
  Interval eval_diff(const BoundaryCondition& x,
                     const BoundaryCondition& y) const override;
  Interval sup_phi_F_cylinder(const SiteSet& F, const Pattern& w,
                              const Alphabet* restrict) const override;
  Interval inf_phi_F_cylinder(const SiteSet& F, const Pattern& w,
                              const Alphabet* restrict) const override;
  double delta_upper(std::int64_t m) const override;
  double variation_tail_upper(std::int64_t m) const override;
  Interval single_site_sup(Letter a) const override;
  Interval single_site_tail(const Alphabet& A) const override;
  std::optional<SiteSet> influence_set() const override;
  Interval mean_energy(const Alphabet& A, const std::vector<double>& q) const override;
  std::vector<double> mean_energy_gradient(const Alphabet& A,
                                           const std::vector<double>& q) const override;
  Interval abs_sup(const Alphabet& A) const override;

  const Params& params() const { return params_; }
  // C(g) = sup_n c(g, n) at unit beta; exact for the built-in coupling.
  Interval coupling_sup_base(const Site& g) const;
  // Certified enclosure of sum_{g not in E_m} C(g) at unit beta.
  Interval coupling_tail_base(std::int64_t m) const;
  // sum over g != identity of C(g), at unit beta.
  Interval coupling_total_base() const { return coupling_tail_base(1); }
  // Unit-beta cost c(1_G, a).
  Interval cost_base(Letter a) const;

 private:
  Interval cost_scaled(Letter a) const;                 // beta * c(1_G, a)
  Interval coupling_scaled(const Site& g) const;        // beta * C(g)
  Interval coupling_tail_scaled(std::int64_t m) const;  // beta * tail
  // Certified sum_{k >= m} s_k^p lambda^k where s_k is the linf shell count
  // (2k+1)^d - (2k-1)^d; closed by a decreasing-ratio geometric bound.
  Interval shell_geom_sum(std::int64_t m, int p) const;
  std::int64_t table_diameter() const;
  Interval coupling_tail_uncached(std::int64_t m) const;
  double variation_tail_uncached(std::int64_t m) const;

  Params params_;
  // Tails for small m precomputed at construction; hot paths read these
  // without recomputing the certified series.
  std::vector<Interval> tail_base_memo_;
  std::vector<double> variation_tail_memo_;
};

// Diagnosis of the admissibility conditions of the clustering family: a
// certified bound for the summable-variation condition, an analytic check of
// the super-logarithmic cost growth, and exp-summability at the configured
// beta.
struct ExampleConditionsReport {
  bool variation_summable = false;
  Interval variation_bound;  // certified bound when summable
  bool growth_ok = false;
  std::string growth_witness;  // n0 table, or the refuting (M, n) pair
  bool exp_summable = false;
  Interval z1;  // certified Z_{1_G} enclosure when exp-summable
  bool all_ok() const { return variation_summable && growth_ok && exp_summable; }
};

ExampleConditionsReport check_example_conditions(const CountablePottsPotential& pot,
                                                 Letter horizon = 100000);

}  // namespace gibbs
