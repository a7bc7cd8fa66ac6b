#include "gibbs/potentials.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>

#include "gibbs/errors.hpp"

namespace gibbs {

namespace {

void require_support_matches(const SiteSet& F, const Pattern& w) {
  if (w.support() != F)
    throw ConfigError("cylinder pattern support does not match the window F");
}

void require_letters_in(const Alphabet& alphabet, const Pattern& w) {
  for (std::size_t i = 0; i < w.size(); ++i)
    if (!alphabet.contains(w.at_index(i)))
      throw ConfigError("pattern letter " + std::to_string(w.at_index(i)) +
                        " outside the declared alphabet");
}

void require_subalphabet(const Alphabet& alphabet, const Alphabet& A) {
  for (Letter a : A)
    if (!alphabet.contains(a))
      throw ConfigError("letter " + std::to_string(a) +
                        " outside the declared alphabet");
}

void require_marginal(const Alphabet& A, const std::vector<double>& q) {
  if (q.size() != A.size())
    throw ConfigError("marginal length does not match alphabet size");
  double sum = 0.0;
  for (double v : q) {
    if (!(v >= 0.0)) throw ConfigError("marginal entries must be >= 0");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw ConfigError("marginal must sum to 1 (got " + std::to_string(sum) + ")");
}

double abs_max(const Interval& v) { return std::max(std::abs(v.lo), std::abs(v.hi)); }

}  // namespace

// --- SingleSitePotential -----------------------------------------------------

SingleSitePotential::SingleSitePotential(std::shared_ptr<const GroupContext> ctx,
                                         double beta, std::vector<double> values)
    : Potential(std::move(ctx), beta),
      alphabet_(Alphabet::prefix(static_cast<Letter>(values.size()))) {
  if (values.empty()) throw ConfigError("single-site potential needs >= 1 value");
  if (!(beta >= 0.0)) throw ConfigError("beta must be >= 0");
  values_.reserve(values.size());
  for (double v : values) values_.push_back(Interval(beta) * Interval(v));
}

std::string SingleSitePotential::describe() const {
  return "single-site potential on " + std::to_string(alphabet_.size()) +
         " letters, beta=" + std::to_string(beta());
}

Interval SingleSitePotential::value_of(Letter a) const {
  if (!alphabet_.contains(a))
    throw ConfigError("letter " + std::to_string(a) + " outside the declared alphabet");
  return values_[a];
}

Interval SingleSitePotential::eval(const BoundaryCondition& x) const {
  return value_of(x.at(group().identity()));
}

Interval SingleSitePotential::eval_diff(const BoundaryCondition& x,
                                        const BoundaryCondition& y) const {
  Letter a = x.at(group().identity()), b = y.at(group().identity());
  if (a == b) return Interval::zero();
  return value_of(a) - value_of(b);
}

Interval SingleSitePotential::sup_phi_F_cylinder(const SiteSet& F, const Pattern& w,
                                                 const Alphabet* restrict) const {
  require_support_matches(F, w);
  require_letters_in(alphabet_, w);
  if (restrict) require_subalphabet(alphabet_, *restrict);
  Interval total = Interval::zero();
  for (std::size_t i = 0; i < w.size(); ++i) total += values_[w.at_index(i)];
  return total;
}

Interval SingleSitePotential::inf_phi_F_cylinder(const SiteSet& F, const Pattern& w,
                                                 const Alphabet* restrict) const {
  return sup_phi_F_cylinder(F, w, restrict);  // phi_F is constant on [w]
}

double SingleSitePotential::delta_upper(std::int64_t m) const {
  if (m < 1) throw ConfigError("variation index must be >= 1");
  return 0.0;  // phi depends on x(1_G) only, pinned by E_1 already
}

double SingleSitePotential::variation_tail_upper(std::int64_t) const { return 0.0; }

Interval SingleSitePotential::single_site_sup(Letter a) const { return value_of(a); }

Interval SingleSitePotential::single_site_tail(const Alphabet& A) const {
  Interval total = Interval::zero();
  for (Letter a : alphabet_)
    if (!A.contains(a)) total += exp(values_[a]);
  return total;
}

std::optional<SiteSet> SingleSitePotential::influence_set() const {
  return SiteSet::singleton(group().identity());
}

Interval SingleSitePotential::mean_energy(const Alphabet& A,
                                          const std::vector<double>& q) const {
  require_subalphabet(alphabet_, A);
  require_marginal(A, q);
  Interval total = Interval::zero();
  for (std::size_t i = 0; i < A.size(); ++i)
    total += scale_nonneg(values_[A[i]], q[i]);
  return total;
}

std::vector<double> SingleSitePotential::mean_energy_gradient(
    const Alphabet& A, const std::vector<double>& q) const {
  require_subalphabet(alphabet_, A);
  std::vector<double> g(A.size());
  for (std::size_t i = 0; i < A.size(); ++i) g[i] = values_[A[i]].mid();
  (void)q;
  return g;
}

Interval SingleSitePotential::abs_sup(const Alphabet& A) const {
  require_subalphabet(alphabet_, A);
  double m = 0.0;
  for (Letter a : A) m = std::max(m, abs_max(values_[a]));
  return Interval(0.0, m);
}

// --- PairPotential -----------------------------------------------------------

PairPotential::PairPotential(std::shared_ptr<const GroupContext> ctx, double beta,
                             std::vector<double> f0, std::vector<Neighbor> neighbors)
    : Potential(std::move(ctx), beta),
      alphabet_(Alphabet::prefix(static_cast<Letter>(f0.size()))),
      neighbors_raw_(std::move(neighbors)) {
  if (group().kind() != GroupKind::lattice)
    throw ConfigError("pair potentials are supported on lattice groups only");
  if (f0.empty()) throw ConfigError("pair potential needs >= 1 letter");
  if (!(beta >= 0.0)) throw ConfigError("beta must be >= 0");
  const std::size_t q = f0.size();
  f0_.reserve(q);
  for (double v : f0) f0_.push_back(Interval(beta) * Interval(v));

  std::vector<Site> inf_sites{group().identity()};
  std::vector<Site> nbr_sites;
  for (const auto& nb : neighbors_raw_) {
    group().check_site(nb.offset);
    if (nb.offset == group().identity())
      throw ConfigError("pair potential neighbor offset must not be the identity");
    if (nb.J.size() != q)
      throw ConfigError("pair potential coupling matrix must be q x q");
    for (const auto& row : nb.J)
      if (row.size() != q)
        throw ConfigError("pair potential coupling matrix must be q x q");
    inf_sites.push_back(nb.offset);
    nbr_sites.push_back(nb.offset);
  }
  influence_ = SiteSet(std::move(inf_sites));
  neighbor_sites_ = SiteSet(std::move(nbr_sites));
  if (neighbor_sites_.size() != neighbors_raw_.size())
    throw ConfigError("pair potential neighbor offsets must be distinct");

  j_.resize(neighbors_raw_.size());
  osc_.resize(neighbors_raw_.size());
  for (std::size_t n = 0; n < neighbors_raw_.size(); ++n) {
    j_[n].assign(q, std::vector<Interval>(q));
    double osc = 0.0;
    for (std::size_t a = 0; a < q; ++a) {
      double mx = -std::numeric_limits<double>::infinity();
      double mn = std::numeric_limits<double>::infinity();
      for (std::size_t b = 0; b < q; ++b) {
        j_[n][a][b] = Interval(beta) * Interval(neighbors_raw_[n].J[a][b]);
        mx = std::max(mx, j_[n][a][b].hi);
        mn = std::min(mn, j_[n][a][b].lo);
      }
      osc = std::max(osc, mx - mn);
    }
    osc_[n] = detail::next_up(osc);
  }
}

std::string PairPotential::describe() const {
  return "finite-range pair potential, " + std::to_string(alphabet_.size()) +
         " letters, " + std::to_string(neighbors_raw_.size()) +
         " neighbor(s), beta=" + std::to_string(beta());
}

Interval PairPotential::f0_of(Letter a) const {
  if (!alphabet_.contains(a))
    throw ConfigError("letter " + std::to_string(a) + " outside the declared alphabet");
  return f0_[a];
}

Interval PairPotential::j_of(std::size_t n, Letter a, Letter b) const {
  if (!alphabet_.contains(a) || !alphabet_.contains(b))
    throw ConfigError("letter outside the declared alphabet");
  return j_[n][a][b];
}

Interval PairPotential::eval(const BoundaryCondition& x) const {
  Letter a = x.at(group().identity());
  Interval total = f0_of(a);
  for (std::size_t n = 0; n < neighbors_raw_.size(); ++n)
    total += j_of(n, a, x.at(neighbors_raw_[n].offset));
  return total;
}

Interval PairPotential::eval_diff(const BoundaryCondition& x,
                                  const BoundaryCondition& y) const {
  // eval is already exact up to scaling rounding; a direct difference with
  // an early-out for equal reads keeps translates of untouched sites at 0.
  Letter ax = x.at(group().identity()), ay = y.at(group().identity());
  Interval total = Interval::zero();
  if (ax != ay) total += f0_of(ax) - f0_of(ay);
  for (std::size_t n = 0; n < neighbors_raw_.size(); ++n) {
    Letter bx = x.at(neighbors_raw_[n].offset), by = y.at(neighbors_raw_[n].offset);
    if (ax == ay && bx == by) continue;
    total += j_of(n, ax, bx) - j_of(n, ay, by);
  }
  return total;
}

Interval PairPotential::extreme_phi_F(const SiteSet& F, const Pattern& w,
                                      const Alphabet& A, bool want_sup) const {
  const GroupContext& ctx = group();
  Interval fixed = Interval::zero();
  for (std::size_t i = 0; i < F.size(); ++i) fixed += f0_of(w.at_index(i));

  // Exterior site -> list of (neighbor index, interior letter) terms touching
  // it. Every pair term has its first site inside F, so exterior sites never
  // interact with each other and can be optimized independently.
  std::map<Site, std::vector<std::pair<std::size_t, Letter>>> exterior;
  for (std::size_t i = 0; i < F.size(); ++i) {
    const Site& g = F[i];
    for (std::size_t n = 0; n < neighbors_raw_.size(); ++n) {
      Site y = ctx.multiply(neighbors_raw_[n].offset, g);
      auto idx = F.index_of(y);
      if (idx >= 0) {
        fixed += j_of(n, w.at_index(i), w.at_index(static_cast<std::size_t>(idx)));
      } else {
        exterior[y].emplace_back(n, w.at_index(i));
      }
    }
  }
  Interval total = fixed;
  for (const auto& [y, terms] : exterior) {
    bool first = true;
    Interval best;
    for (Letter b : A) {
      Interval s = Interval::zero();
      for (const auto& [n, a] : terms) s += j_of(n, a, b);
      if (first) {
        best = s;
        first = false;
      } else {
        best = want_sup ? max(best, s) : min(best, s);
      }
    }
    total += best;
  }
  return total;
}

Interval PairPotential::sup_phi_F_cylinder(const SiteSet& F, const Pattern& w,
                                           const Alphabet* restrict) const {
  require_support_matches(F, w);
  require_letters_in(alphabet_, w);
  const Alphabet& A = restrict ? *restrict : alphabet_;
  require_subalphabet(alphabet_, A);
  return extreme_phi_F(F, w, A, /*want_sup=*/true);
}

Interval PairPotential::inf_phi_F_cylinder(const SiteSet& F, const Pattern& w,
                                           const Alphabet* restrict) const {
  require_support_matches(F, w);
  require_letters_in(alphabet_, w);
  const Alphabet& A = restrict ? *restrict : alphabet_;
  require_subalphabet(alphabet_, A);
  return extreme_phi_F(F, w, A, /*want_sup=*/false);
}

double PairPotential::delta_upper(std::int64_t m) const {
  if (m < 1) throw ConfigError("variation index must be >= 1");
  const SiteSet& em = exhaustion().set(m);
  double total = 0.0;
  for (std::size_t n = 0; n < neighbors_raw_.size(); ++n)
    if (!em.contains(neighbors_raw_[n].offset)) total += osc_[n];
  return detail::next_up(total);
}

double PairPotential::variation_tail_upper(std::int64_t m) const {
  // delta_upper vanishes once E_k covers the neighbor set, so the sum is
  // finite and uses exact inverse-shell sizes.
  const Exhaustion& ex = exhaustion();
  std::int64_t cover = ex.cover_index(influence_);
  Interval sum = Interval::zero();
  for (std::int64_t k = m; k < cover; ++k) {
    std::size_t shell = ex.inverse_set_of(k + 1).set_difference(ex.inverse_set_of(k)).size();
    sum += scale_nonneg(Interval(0.0, delta_upper(k)), static_cast<double>(shell));
  }
  return sum.hi;
}

Interval PairPotential::single_site_sup(Letter a) const {
  Interval total = f0_of(a);
  for (std::size_t n = 0; n < neighbors_raw_.size(); ++n) {
    Interval best = j_of(n, a, alphabet_[0]);
    for (Letter b : alphabet_) best = max(best, j_of(n, a, b));
    total += best;
  }
  return total;
}

Interval PairPotential::single_site_tail(const Alphabet& A) const {
  Interval total = Interval::zero();
  for (Letter a : alphabet_)
    if (!A.contains(a)) total += exp(single_site_sup(a));
  return total;
}

Interval PairPotential::mean_energy(const Alphabet& A,
                                    const std::vector<double>& q) const {
  require_subalphabet(alphabet_, A);
  require_marginal(A, q);
  Interval total = Interval::zero();
  for (std::size_t i = 0; i < A.size(); ++i) total += scale_nonneg(f0_[A[i]], q[i]);
  for (std::size_t n = 0; n < neighbors_raw_.size(); ++n)
    for (std::size_t i = 0; i < A.size(); ++i)
      for (std::size_t k = 0; k < A.size(); ++k)
        total += scale_nonneg(j_[n][A[i]][A[k]], q[i] * q[k]);
  return total;
}

std::vector<double> PairPotential::mean_energy_gradient(
    const Alphabet& A, const std::vector<double>& q) const {
  require_subalphabet(alphabet_, A);
  std::vector<double> g(A.size(), 0.0);
  for (std::size_t i = 0; i < A.size(); ++i) {
    g[i] = f0_[A[i]].mid();
    for (std::size_t n = 0; n < neighbors_raw_.size(); ++n)
      for (std::size_t k = 0; k < A.size(); ++k)
        g[i] += q[k] * (j_[n][A[i]][A[k]].mid() + j_[n][A[k]][A[i]].mid());
  }
  return g;
}

Interval PairPotential::abs_sup(const Alphabet& A) const {
  require_subalphabet(alphabet_, A);
  double m = 0.0;
  for (Letter a : A) {
    double row = abs_max(f0_[a]);
    for (std::size_t n = 0; n < neighbors_raw_.size(); ++n) {
      double best = 0.0;
      for (Letter b : A) best = std::max(best, abs_max(j_[n][a][b]));
      row += best;
    }
    m = std::max(m, row);
  }
  return Interval(0.0, detail::next_up(m));
}

// --- CountablePottsPotential ---------------------------------------------------

CountablePottsPotential::CountablePottsPotential(
    std::shared_ptr<const GroupContext> ctx, double beta, Params params)
    : Potential(std::move(ctx), beta), params_(params) {
  if (!(beta >= 0.0)) throw ConfigError("beta must be >= 0");
  if (!(params_.cost_coef > 0.0))
    throw ConfigError("clustering family: cost coefficient must be > 0");
  if (params_.coupling_form == CouplingForm::geometric) {
    if (!(params_.amplitude >= 0.0))
      throw ConfigError("clustering family: amplitude must be >= 0");
    if (!(params_.lambda > 0.0 && params_.lambda < 1.0))
      throw ConfigError("clustering family: lambda must lie in (0, 1)");
    if (group().kind() == GroupKind::lattice) {
      auto* lat = dynamic_cast<const LatticeGroup*>(&group());
      if (lat->norm() != LatticeNorm::linf)
        throw ConfigError(
            "clustering family: certified coupling tails require the linf word "
            "metric on lattices (or a complete table group)");
    } else {
      auto* tab = dynamic_cast<const TableGroup*>(&group());
      if (!tab->is_complete())
        throw ConfigError(
            "clustering family: countable couplings require a complete group table");
    }
    // Precompute the certified tails once; every kernel entry and swap bound
    // reads them on its hot path. Past a finite table's diameter the tails
    // are exactly zero and the fallback answers instantly.
    std::int64_t memo = 160;
    if (group().kind() == GroupKind::table)
      memo = std::min<std::int64_t>(memo, table_diameter() + 2);
    tail_base_memo_.reserve(static_cast<std::size_t>(memo));
    for (std::int64_t m = 1; m <= memo; ++m)
      tail_base_memo_.push_back(coupling_tail_uncached(m));
    variation_tail_memo_.reserve(static_cast<std::size_t>(memo));
    for (std::int64_t m = 1; m <= memo; ++m)
      variation_tail_memo_.push_back(variation_tail_uncached(m));
  }
}

std::string CountablePottsPotential::describe() const {
  std::ostringstream os;
  os << "clustering family: cost "
     << (params_.cost_form == CostForm::linear ? "linear" : "log") << " coef "
     << params_.cost_coef << ", coupling "
     << (params_.coupling_form == CouplingForm::zero ? "zero" : "geometric")
     << ", beta=" << beta();
  return os.str();
}

Interval CountablePottsPotential::cost_base(Letter a) const {
  if (params_.cost_form == CostForm::linear)
    return Interval(params_.cost_coef) * Interval(static_cast<double>(a));
  return Interval(params_.cost_coef) * log(Interval(1.0 + static_cast<double>(a)));
}

Interval CountablePottsPotential::cost_scaled(Letter a) const {
  return Interval(beta()) * cost_base(a);
}

Interval CountablePottsPotential::coupling_sup_base(const Site& g) const {
  if (params_.coupling_form == CouplingForm::zero) return Interval::zero();
  if (g == group().identity()) return Interval::zero();
  return scale_nonneg(pow_int(Interval(params_.lambda), group().word_norm(g)),
                      params_.amplitude);
}

Interval CountablePottsPotential::coupling_scaled(const Site& g) const {
  return Interval(beta()) * coupling_sup_base(g);
}

std::int64_t CountablePottsPotential::table_diameter() const {
  return dynamic_cast<const TableGroup&>(group()).diameter();
}

Interval CountablePottsPotential::shell_geom_sum(std::int64_t m, int p) const {
  const auto* lat = dynamic_cast<const LatticeGroup*>(&group());
  const std::int64_t d = lat->dim();
  const Interval lam(params_.lambda);
  const int power = p * static_cast<int>(d - 1);

  auto shell_count = [&](std::int64_t k) {
    return pow_int(Interval(static_cast<double>(2 * k + 1)), d) -
           pow_int(Interval(static_cast<double>(2 * k - 1)), d);
  };
  // Decreasing bound on the term ratio: s_{k+1}/s_k <= ((2k+3)/(2k-1))^{d-1}.
  auto rho_at = [&](std::int64_t k) {
    Interval r = pow_int(Interval(static_cast<double>(2 * k + 3)) /
                             Interval(static_cast<double>(2 * k - 1)),
                         power);
    return lam * r;
  };

  std::int64_t start = std::max<std::int64_t>(m, 1);
  std::int64_t M = start;
  while (rho_at(M).hi >= 1.0) {
    ++M;
    if (M > 1000000)
      throw ConfigError("clustering family: lambda too close to 1 for a certified tail");
  }
  // Sum shells explicitly until the closing geometric bound is negligible
  // next to the accumulated mass; the ratio bound decreases in k, so closing
  // at any k >= M stays sound and late terms only sharpen the enclosure.
  Interval partial = Interval::zero();
  for (std::int64_t k = start;; ++k) {
    Interval term = pow_int(shell_count(k), p) * pow_int(lam, k);
    partial += term;
    if (k < M) continue;
    Interval rho = rho_at(k);
    Interval closing = term * rho / (Interval(1.0) - rho);
    if (closing.hi <= 1e-17 * partial.hi || k >= M + 600)
      return Interval(std::max(0.0, partial.lo),
                      (partial + Interval(0.0, closing.hi)).hi);
  }
}

Interval CountablePottsPotential::coupling_tail_base(std::int64_t m) const {
  if (m < 1) throw ConfigError("tail index must be >= 1");
  if (params_.coupling_form == CouplingForm::zero) return Interval::zero();
  if (m - 1 < static_cast<std::int64_t>(tail_base_memo_.size()))
    return tail_base_memo_[static_cast<std::size_t>(m - 1)];
  return coupling_tail_uncached(m);
}

Interval CountablePottsPotential::coupling_tail_uncached(std::int64_t m) const {
  if (group().kind() == GroupKind::table) {
    // Finite group: exact sum over everything outside E_m = ball(m-1).
    std::int64_t diam = table_diameter();
    if (m - 1 >= diam + 1) return Interval::zero();
    const SiteSet& all = group().ball(diam);
    const SiteSet& inner = group().ball(m - 1);
    Interval total = Interval::zero();
    for (const Site& g : all)
      if (!inner.contains(g)) total += coupling_sup_base(g);
    return total;
  }
  return scale_nonneg(shell_geom_sum(m, 1), params_.amplitude);
}

Interval CountablePottsPotential::coupling_tail_scaled(std::int64_t m) const {
  return Interval(beta()) * coupling_tail_base(m);
}

double CountablePottsPotential::delta_upper(std::int64_t m) const {
  if (m < 1) throw ConfigError("variation index must be >= 1");
  // Pairs agreeing on E_m see identical indicators for every g in E_m \ {1},
  // so the oscillation is at most the coupling mass outside E_m.
  return coupling_tail_scaled(m).hi;
}

double CountablePottsPotential::variation_tail_upper(std::int64_t m) const {
  if (m < 1) throw ConfigError("variation index must be >= 1");
  if (params_.coupling_form == CouplingForm::zero) return 0.0;
  if (m - 1 < static_cast<std::int64_t>(variation_tail_memo_.size()))
    return variation_tail_memo_[static_cast<std::size_t>(m - 1)];
  return variation_tail_uncached(m);
}

double CountablePottsPotential::variation_tail_uncached(std::int64_t m) const {
  if (group().kind() == GroupKind::table) {
    std::int64_t diam = table_diameter();
    const Exhaustion& ex = exhaustion();
    Interval sum = Interval::zero();
    // delta_upper(k) = 0 once E_k swallows the whole group (k-1 >= diam).
    for (std::int64_t k = m; k <= diam; ++k) {
      std::size_t shell =
          ex.inverse_set_of(k + 1).set_difference(ex.inverse_set_of(k)).size();
      sum += scale_nonneg(Interval(0.0, delta_upper(k)), static_cast<double>(shell));
    }
    return sum.hi;
  }
  // Lattice: sum_{k >= m} s_k T(k) with T(k) <= amp s_k lambda^k / (1 - rho_k).
  const auto* lat = dynamic_cast<const LatticeGroup*>(&group());
  const std::int64_t d = lat->dim();
  const Interval lam(params_.lambda);
  auto rho_at = [&](std::int64_t k) {
    Interval r = pow_int(Interval(static_cast<double>(2 * k + 3)) /
                             Interval(static_cast<double>(2 * k - 1)),
                         static_cast<int>(d - 1));
    return lam * r;
  };
  std::int64_t M = std::max<std::int64_t>(m, 1);
  while (rho_at(M).hi >= 1.0) {
    ++M;
    if (M > 1000000)
      throw ConfigError("clustering family: lambda too close to 1 for a certified tail");
  }
  Interval sum = Interval::zero();
  auto shell_count = [&](std::int64_t k) {
    return pow_int(Interval(static_cast<double>(2 * k + 1)), d) -
           pow_int(Interval(static_cast<double>(2 * k - 1)), d);
  };
  for (std::int64_t k = m; k < M; ++k)
    sum += shell_count(k) * coupling_tail_base(k);
  Interval rho = rho_at(M);
  Interval closing = scale_nonneg(shell_geom_sum(M, 2), params_.amplitude) /
                     (Interval(1.0) - rho);
  sum += Interval(0.0, closing.hi);
  return (Interval(beta()) * Interval(0.0, sum.hi)).hi;
}

Interval CountablePottsPotential::eval(const BoundaryCondition& x) const {
  const GroupContext& ctx = group();
  const Site id = ctx.identity();
  const Letter a = x.at(id);
  Interval inner = Interval::zero();
  Interval tail = Interval::zero();
  if (params_.coupling_form != CouplingForm::zero) {
    SiteSet sup = x.overrides().support().set_union(SiteSet::singleton(id));
    std::int64_t j = exhaustion().cover_index(sup);
    for (const Site& g : exhaustion().set(j)) {
      if (g == id) continue;
      if (x.at(g) == a) inner += coupling_scaled(g);
    }
    if (a == x.background()) tail = coupling_tail_scaled(j);
  }
  return -(cost_scaled(a) + inner + tail);
}

Interval CountablePottsPotential::eval_diff(const BoundaryCondition& x,
                                            const BoundaryCondition& y) const {
  if (x.background() != y.background()) return eval(x) - eval(y);
  const GroupContext& ctx = group();
  const Site id = ctx.identity();
  const Letter a = x.at(id), b = y.at(id);
  if (params_.coupling_form == CouplingForm::zero)
    return a == b ? Interval::zero() : -(cost_scaled(a) - cost_scaled(b));

  if (a == b) {
    // Indicators only differ where the configurations differ; that set is
    // finite and known, so the difference is an exact finite sum.
    SiteSet sup = x.overrides().support().set_union(y.overrides().support());
    Interval total = Interval::zero();
    for (const Site& g : sup) {
      if (g == id) continue;
      bool xa = x.at(g) == a, ya = y.at(g) == a;
      if (xa == ya) continue;
      total += xa ? -coupling_scaled(g) : coupling_scaled(g);
    }
    return total;
  }
  SiteSet sup = x.overrides().support().set_union(y.overrides().support());
  sup = sup.set_union(SiteSet::singleton(id));
  std::int64_t j = exhaustion().cover_index(sup);
  Interval diff = Interval::zero();
  for (const Site& g : exhaustion().set(j)) {
    if (g == id) continue;
    bool xa = x.at(g) == a, yb = y.at(g) == b;
    if (xa && !yb)
      diff += coupling_scaled(g);
    else if (yb && !xa)
      diff -= coupling_scaled(g);
  }
  Interval tail = coupling_tail_scaled(j);
  if (a == x.background()) diff += tail;
  if (b == y.background()) diff -= tail;
  return -(cost_scaled(a) - cost_scaled(b)) - diff;
}

Interval CountablePottsPotential::sup_phi_F_cylinder(const SiteSet& F, const Pattern& w,
                                                     const Alphabet* restrict) const {
  require_support_matches(F, w);
  const GroupContext& ctx = group();
  // Interior part: attained in the full shift by pairwise-fresh exterior
  // letters, since every coupling cost is >= 0.
  Interval base = Interval::zero();
  for (std::size_t i = 0; i < F.size(); ++i) base -= cost_scaled(w.at_index(i));
  if (params_.coupling_form != CouplingForm::zero) {
    for (std::size_t i = 0; i < F.size(); ++i)
      for (std::size_t k = 0; k < F.size(); ++k) {
        if (i == k || w.at_index(i) != w.at_index(k)) continue;
        base -= coupling_scaled(ctx.multiply(F[k], ctx.inverse(F[i])));
      }
  }
  if (!restrict || params_.coupling_form == CouplingForm::zero) return base;

  const Alphabet& A = *restrict;
  bool has_fresh = false;
  for (Letter b : A) {
    bool used = false;
    for (std::size_t i = 0; i < F.size() && !used; ++i) used = (w.at_index(i) == b);
    if (!used) {
      has_fresh = true;
      break;
    }
  }
  if (has_fresh) return base;  // exterior can still dodge every interior letter

  // Every letter of A appears in w: exterior sites may be forced to agree.
  // Penalties decompose per exterior site; certify a window exactly and close
  // with the coupling tail.
  double scale = 1.0 + std::abs(base.lo);
  std::int64_t R = 2;
  while (R < 80 && coupling_tail_scaled(R).hi * static_cast<double>(F.size()) >
                       1e-18 * scale)
    ++R;
  SiteSet window = product_set(ctx, exhaustion().set(R), F).set_difference(F);
  Interval penalty = Interval::zero();
  for (const Site& y : window) {
    bool first = true;
    Interval best;
    for (Letter bcand : A) {
      Interval s = Interval::zero();
      for (std::size_t i = 0; i < F.size(); ++i) {
        if (w.at_index(i) != bcand) continue;
        s += coupling_scaled(ctx.multiply(y, ctx.inverse(F[i])));
      }
      if (first) {
        best = s;
        first = false;
      } else {
        best = min(best, s);
      }
    }
    penalty += best;
  }
  penalty += scale_nonneg(Interval(0.0, coupling_tail_scaled(R).hi),
                          static_cast<double>(F.size()));
  return base - penalty;
}

Interval CountablePottsPotential::inf_phi_F_cylinder(const SiteSet& F, const Pattern& w,
                                                     const Alphabet* restrict) const {
  (void)restrict;  // the unrestricted envelope is sound for any restriction
  require_support_matches(F, w);
  const GroupContext& ctx = group();
  Interval base = sup_phi_F_cylinder(F, w, nullptr);
  if (params_.coupling_form == CouplingForm::zero) return base;
  Interval total_coupling = coupling_tail_scaled(1);
  Interval slack = Interval::zero();
  for (std::size_t i = 0; i < F.size(); ++i) {
    Interval in_part = Interval::zero();
    for (std::size_t k = 0; k < F.size(); ++k) {
      if (i == k) continue;
      in_part += coupling_scaled(ctx.multiply(F[k], ctx.inverse(F[i])));
    }
    slack += max(total_coupling - in_part, Interval::zero());
  }
  return Interval((base - slack).lo, base.hi);
}

Interval CountablePottsPotential::single_site_sup(Letter a) const {
  return -cost_scaled(a);
}

Interval CountablePottsPotential::single_site_tail(const Alphabet& A) const {
  // First letter missing from A; costs are monotone in the letter, so the
  // tail past that letter dominates the true remainder.
  Letter p = static_cast<Letter>(A.size());
  for (std::size_t i = 0; i < A.size(); ++i) {
    if (A[i] != static_cast<Letter>(i)) {
      p = static_cast<Letter>(i);
      break;
    }
  }
  bool pure_prefix = (static_cast<std::size_t>(p) == A.size());
  if (params_.cost_form == CostForm::linear) {
    Interval rate = Interval(beta()) * Interval(params_.cost_coef);
    if (!(rate.lo > 0.0))
      throw ConfigError("clustering family is not exp-summable: beta * coef must be > 0");
    Interval r = exp(-rate);
    // sum_{a >= p} r^a = r^p / (1 - r), exact for a pure prefix alphabet.
    Interval tail = pow_int(r, p) / (Interval(1.0) - r);
    return pure_prefix ? tail : Interval(0.0, tail.hi);
  }
  Interval q = Interval(beta()) * Interval(params_.cost_coef);
  if (!(q.lo > 1.0))
    throw ConfigError(
        "clustering family is not exp-summable: beta * coef must exceed 1 for the "
        "logarithmic cost form");
  Interval lp = log(Interval(1.0 + static_cast<double>(p)));
  Interval head = exp(-(q * lp));                          // (1+p)^{-q}
  Interval integral = exp((Interval(1.0) - q) * lp) / (q - Interval(1.0));
  return Interval(0.0, (head + integral).hi);
}

std::optional<SiteSet> CountablePottsPotential::influence_set() const {
  if (params_.coupling_form == CouplingForm::zero)
    return SiteSet::singleton(group().identity());
  return std::nullopt;
}

Interval CountablePottsPotential::mean_energy(const Alphabet& A,
                                              const std::vector<double>& q) const {
  require_marginal(A, q);
  Interval total = Interval::zero();
  Interval sq = Interval::zero();
  for (std::size_t i = 0; i < A.size(); ++i) {
    total += scale_nonneg(cost_scaled(A[i]), q[i]);
    sq += Interval(q[i]) * Interval(q[i]);
  }
  if (params_.coupling_form != CouplingForm::zero)
    total += sq * coupling_tail_scaled(1);
  return -total;
}

std::vector<double> CountablePottsPotential::mean_energy_gradient(
    const Alphabet& A, const std::vector<double>& q) const {
  double ctot = params_.coupling_form == CouplingForm::zero
                    ? 0.0
                    : coupling_tail_scaled(1).mid();
  std::vector<double> g(A.size());
  for (std::size_t i = 0; i < A.size(); ++i)
    g[i] = -(cost_scaled(A[i]).mid() + 2.0 * ctot * q[i]);
  return g;
}

Interval CountablePottsPotential::abs_sup(const Alphabet& A) const {
  Interval worst = cost_scaled(A.max_letter());
  if (params_.coupling_form != CouplingForm::zero) worst += coupling_tail_scaled(1);
  return Interval(0.0, worst.hi);
}

// --- Example-family admissibility -----------------------------------------------

ExampleConditionsReport check_example_conditions(const CountablePottsPotential& pot,
                                                 Letter horizon) {
  ExampleConditionsReport rep;
  const auto& params = pot.params();

  // Summable-variation condition at unit beta (it is a property of c itself).
  CountablePottsPotential unit(pot.group_ptr(), 1.0, params);
  double bound = unit.variation_tail_upper(1);
  rep.variation_summable = std::isfinite(bound);
  rep.variation_bound = Interval(0.0, bound);

  // Super-logarithmic growth of the on-site cost.
  std::ostringstream wit;
  if (params.cost_form == CountablePottsPotential::CostForm::linear) {
    rep.growth_ok = true;
    for (double M : {1.0, 2.0, 4.0, 8.0}) {
      Letter n0 = 1;
      // coef*n - M log n is increasing past M/coef; find the threshold.
      Letter start = static_cast<Letter>(std::max(1.0, std::ceil(M / params.cost_coef)));
      Letter n = start;
      while (n <= horizon && params.cost_coef * n < M * std::log(static_cast<double>(n)))
        ++n;
      if (n > horizon) {
        rep.growth_ok = false;
        wit << "M=" << M << " unresolved below horizon; ";
        continue;
      }
      n0 = n;
      wit << "M=" << M << " holds from n0=" << n0 << "; ";
    }
  } else {
    // c(1_G, n) = L log(1+n): the ratio to log n tends to L, so growth fails
    // for any M > L. Exhibit a witness.
    double L = params.cost_coef;
    double M = std::floor(L) + 1.0;
    Letter n = 2;
    while (n <= horizon &&
           M * std::log(static_cast<double>(n)) <= L * std::log(1.0 + static_cast<double>(n)))
      ++n;
    rep.growth_ok = false;
    wit << "refuted at M=" << M << " by n=" << n << " (M log n > c(1,n) from there on)";
  }
  rep.growth_witness = wit.str();

  // Exp-summability at the configured beta.
  try {
    Interval z1 = pot.single_site_weight(0) + pot.single_site_tail(Alphabet({0}));
    rep.exp_summable = std::isfinite(z1.hi);
    rep.z1 = z1;
  } catch (const ConfigError&) {
    rep.exp_summable = false;
  }
  return rep;
}

}  // namespace gibbs
