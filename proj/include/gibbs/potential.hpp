#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "gibbs/group.hpp"
#include "gibbs/interval.hpp"
#include "gibbs/pattern.hpp"

namespace gibbs {

// Upper-bound data for the variations of a potential along the canonical
// exhaustion E_1 = {1_G}, E_{m+1} = S^m. delta_upper(m) bounds the m-th
// variation (oscillation over pairs agreeing on E_m) and is non-increasing;
// tail(m) bounds sum_{k >= m} |E_{k+1}^{-1} \ E_k^{-1}| * delta_{E_k} and
// vanishes as m grows exactly when the potential has summable variation.
struct VariationProfile {
  std::function<double(std::int64_t)> delta_upper;
  std::function<double(std::int64_t)> tail;
  double oscillation_upper = 0.0;
  bool summable = false;
};

// An absolutely summable, exp-summable interaction evaluated through certified
// intervals. Configurations are finitely described (background + finite
// override), cylinder sup/inf come with enclosures, and all countable tails
// are certified by closed-form bounds supplied by the concrete family.
class Potential {
 public:
  Potential(std::shared_ptr<const GroupContext> ctx, double beta)
      : ctx_(std::move(ctx)), exhaustion_(ctx_), beta_(beta) {}
  virtual ~Potential() = default;

  const GroupContext& group() const { return *ctx_; }
  std::shared_ptr<const GroupContext> group_ptr() const { return ctx_; }
  const Exhaustion& exhaustion() const { return exhaustion_; }
  double beta() const { return beta_; }
  virtual std::string describe() const = 0;

  // phi(x).
  virtual Interval eval(const BoundaryCondition& x) const = 0;

  // Certified enclosure of phi(x) - phi(y); concrete families override this
  // with a cancellation-aware version when x and y share their background.
  virtual Interval eval_diff(const BoundaryCondition& x,
                             const BoundaryCondition& y) const {
    return eval(x) - eval(y);
  }

  // sup / inf of phi_F = sum_{g in F} phi(g . ) over the cylinder [w],
  // w a pattern on F. restrict == nullptr means the full countable shift;
  // otherwise the cylinder is intersected with restrict^G.
  virtual Interval sup_phi_F_cylinder(const SiteSet& F, const Pattern& w,
                                      const Alphabet* restrict) const = 0;
  virtual Interval inf_phi_F_cylinder(const SiteSet& F, const Pattern& w,
                                      const Alphabet* restrict) const = 0;

  // Upper bound on the m-th variation delta_{E_m}(phi); non-increasing, m >= 1.
  virtual double delta_upper(std::int64_t m) const = 0;
  // Upper bound on sum_{k >= m} |E_{k+1}^{-1} \ E_k^{-1}| * delta_{E_k}(phi).
  virtual double variation_tail_upper(std::int64_t m) const = 0;
  double oscillation_upper() const { return delta_upper(1); }
  VariationProfile variation_profile() const;

  // sup phi([a]) over the single-site cylinder, and an upper bound on
  // sum_{a not in A} exp(sup phi([a])). The latter is what certifies every
  // countable-alphabet truncation; it throws ConfigError when the family is
  // not exp-summable at its configured beta.
  virtual Interval single_site_sup(Letter a) const = 0;
  Interval single_site_weight(Letter a) const { return exp(single_site_sup(a)); }
  virtual Interval single_site_tail(const Alphabet& A) const = 0;

  // Finite alphabet the family is defined on, when it is not countable.
  virtual std::optional<Alphabet> declared_alphabet() const { return std::nullopt; }
  // Finite influence set K0 when phi(x) depends on x|K0 only.
  virtual std::optional<SiteSet> influence_set() const { return std::nullopt; }

  // Expectation of phi under the Bernoulli product measure with marginal q on
  // A (q aligned with A's order, non-negative, summing to ~1).
  virtual Interval mean_energy(const Alphabet& A, const std::vector<double>& q) const = 0;
  // Gradient of the mean energy in q (plain doubles; only steers the
  // variational optimizer, never enters a certified bound).
  virtual std::vector<double> mean_energy_gradient(const Alphabet& A,
                                                   const std::vector<double>& q) const = 0;

  // Upper bound on sup_{x in A^G} |phi(x)|.
  virtual Interval abs_sup(const Alphabet& A) const = 0;

 private:
  std::shared_ptr<const GroupContext> ctx_;
  Exhaustion exhaustion_;
  double beta_;
};

// sum_{g in F} phi(g . x) for the finitely described configuration x.
Interval phi_F(const Potential& pot, const SiteSet& F, const BoundaryCondition& x);

// Certified upper interval bound on
//   V_F(phi) = sum_{m >= 1} |E_{m+1}^{-1} F \ E_m^{-1} F| * delta_{E_m}(phi):
// exact set sizes for m < depth, then the |F| * tail(depth) remainder.
// depth == 0 chooses a depth automatically. Lower end is 0.
Interval v_f_upper(const Potential& pot, const SiteSet& F, std::int64_t depth = 0);

// Certified upper interval bound on Delta_F(phi) = delta_F(phi_F): the best of
//   (a) min_m |Int_{E_m}(F) n F| * delta_m + |F \ Int_{E_m}(F)| * delta(phi)
//   (b) V(phi) * |S|^2 * |SF \ F|          (word-ball exhaustions)
Interval delta_f_upper(const Potential& pot, const SiteSet& F);

// Partial variation sum from index m on, used by swap-limit remainders:
// upper bound on sum_{k >= m} |E_{k+1}^{-1} K \ E_k^{-1} K| * delta_{E_k}(phi).
double variation_sum_from(const Potential& pot, const SiteSet& K, std::int64_t m);

}  // namespace gibbs
