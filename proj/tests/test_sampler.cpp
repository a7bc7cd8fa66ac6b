#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <memory>
#include <vector>

#include "gibbs/errors.hpp"
#include "gibbs/group.hpp"
#include "gibbs/pattern.hpp"
#include "gibbs/potentials.hpp"
#include "gibbs/sampler.hpp"

using namespace gibbs;

namespace {

std::shared_ptr<const GroupContext> line() {
  return make_lattice(1, LatticeNorm::linf);
}

SiteSet range_set(std::int64_t lo, std::int64_t hi) {
  std::vector<Site> v;
  for (std::int64_t i = lo; i <= hi; ++i) v.push_back(Site{{i}});
  return SiteSet(std::move(v));
}

double marginal_freq(const HeatBathSampler& s, std::size_t site_idx, Letter a) {
  const auto& counts = s.marginals()[site_idx];
  std::uint64_t total = 0;
  for (const auto& [letter, n] : counts) total += n;
  auto it = counts.find(a);
  const std::uint64_t hits = it == counts.end() ? 0 : it->second;
  return total == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(total);
}

}  // namespace

TEST_CASE("deterministic restart and initial state") {
  auto ctx = line();
  SingleSitePotential pot(ctx, 1.0, {0.0, -1.0});
  SiteSet W = range_set(0, 4);

  HeatBathSampler a(pot, W, BoundaryCondition(0), Alphabet::prefix(2));
  CHECK(a.steps() == 0);
  Pattern init = a.state();
  for (std::size_t i = 0; i < W.size(); ++i)
    CHECK(init.at_index(i) == Alphabet::prefix(2).min_letter());

  a.run(13);
  CHECK(a.steps() == 13 * W.size());

  HeatBathSampler b(pot, W, BoundaryCondition(0), Alphabet::prefix(2));
  b.run(13);
  Pattern sa = a.state(), sb = b.state();
  for (std::size_t i = 0; i < W.size(); ++i)
    CHECK(sa.at_index(i) == sb.at_index(i));
  REQUIRE(a.marginals().size() == b.marginals().size());
  for (std::size_t i = 0; i < a.marginals().size(); ++i)
    CHECK(a.marginals()[i] == b.marginals()[i]);

  SamplerOptions other;
  other.seed = 99;
  HeatBathSampler c(pot, W, BoundaryCondition(0), Alphabet::prefix(2), other);
  c.run(13);
  bool any_diff = false;
  for (std::size_t i = 0; i < W.size(); ++i)
    any_diff = any_diff || c.state().at_index(i) != sa.at_index(i) ||
               c.marginals()[i] != a.marginals()[i];
  CHECK(any_diff);

  a.reset_marginals();
  for (const auto& m : a.marginals()) CHECK(m.empty());
}

TEST_CASE("flat potential mixes to the uniform marginal") {
  auto ctx = line();
  SingleSitePotential flat(ctx, 1.0, {0.0, 0.0});
  SiteSet W = range_set(0, 3);
  HeatBathSampler s(flat, W, BoundaryCondition(0), Alphabet::prefix(2));
  const std::size_t sweeps = 4000;
  s.run(sweeps);
  CHECK(s.extensions() == 0);  // declared family: the alphabet never grows
  CHECK(s.working_alphabet().size() == 2);

  // Independent coin flips at each site: three-sigma band around 1/2.
  const double sigma = 0.5 / std::sqrt(static_cast<double>(sweeps));
  for (std::size_t i = 0; i < W.size(); ++i)
    CHECK(std::fabs(marginal_freq(s, i, 0) - 0.5) < 3.5 * sigma);
}

TEST_CASE("single-site softmax marginals") {
  auto ctx = line();
  SingleSitePotential pot(ctx, 1.0, {0.0, -1.0});
  SiteSet W = range_set(0, 2);
  SamplerOptions opts;
  opts.seed = 5;
  HeatBathSampler s(pot, W, BoundaryCondition(0), Alphabet::prefix(2), opts);
  const std::size_t sweeps = 4000;
  s.run(sweeps);

  const double p0 = 1.0 / (1.0 + std::exp(-1.0));
  const double sigma = std::sqrt(p0 * (1.0 - p0) / static_cast<double>(sweeps));
  for (std::size_t i = 0; i < W.size(); ++i)
    CHECK(std::fabs(marginal_freq(s, i, 0) - p0) < 4.0 * sigma);
}

TEST_CASE("ferromagnetic chain orders more than independent spins") {
  auto ctx = line();
  PairPotential::Neighbor nb;
  nb.offset = Site{{1}};
  nb.J = {{1.0, -1.0}, {-1.0, 1.0}};
  PairPotential chain(ctx, 1.2, {0.0, 0.0}, {nb});

  SiteSet W = range_set(0, 7);
  SamplerOptions opts;
  opts.seed = 11;
  HeatBathSampler s(chain, W, BoundaryCondition(0), Alphabet::prefix(2), opts);
  s.run(500);  // burn-in
  s.reset_marginals();

  std::size_t agree = 0, total = 0;
  for (std::size_t sweep = 0; sweep < 2000; ++sweep) {
    s.sweep();
    Pattern x = s.state();
    for (std::size_t i = 0; i + 1 < W.size(); ++i) {
      agree += x.at_index(i) == x.at_index(i + 1);
      ++total;
    }
  }
  const double agreement = static_cast<double>(agree) / static_cast<double>(total);
  CHECK(agreement > 0.75);  // iid letters would sit near one half

  // The boundary letter leans on the edge sites: site 0 sees the fixed 0 at -1.
  CHECK(marginal_freq(s, 0, 0) > 0.5);
}

TEST_CASE("countable families widen the working alphabet on demand") {
  auto ctx = line();
  CountablePottsPotential::Params p;
  p.cost_form = CountablePottsPotential::CostForm::linear;
  p.cost_coef = 1.0;
  p.coupling_form = CountablePottsPotential::CouplingForm::geometric;
  p.amplitude = 0.5;
  p.lambda = 0.5;
  CountablePottsPotential pot(ctx, 0.4, p);

  SiteSet W = range_set(0, 2);
  SamplerOptions opts;
  opts.seed = 3;
  HeatBathSampler s(pot, W, BoundaryCondition(0), Alphabet::prefix(2), opts);
  s.run(800);
  // At beta = 0.4 the letter weights decay like e^{-0.4 a}: mass beyond
  // letter 1 is around a third, so the alphabet must have grown.
  CHECK(s.extensions() > 0);
  CHECK(s.working_alphabet().size() > 2);
  CHECK(s.working_alphabet().size() <= opts.max_alphabet);

  // A tiny cap turns unavoidable growth into a resource error.
  SamplerOptions capped;
  capped.seed = 3;
  capped.max_alphabet = 2;
  bool threw = false;
  try {
    HeatBathSampler t(pot, W, BoundaryCondition(0), Alphabet::prefix(2), capped);
    t.run(800);
  } catch (const ResourceError&) {
    threw = true;
  }
  CHECK(threw);
}

TEST_CASE("empirical draws match the certified kernel table") {
  auto ctx = line();

  SingleSitePotential flat(ctx, 1.0, {0.0, 0.0});
  auto uniform = empirical_kernel_check(flat, Site{{0}}, BoundaryCondition(0),
                                        Alphabet::prefix(2), 20000, 42);
  CHECK(uniform.draws == 20000);
  CHECK(uniform.off_alphabet == 0);
  // Two letter cells plus the pooled tail cell, minus normalization.
  CHECK(uniform.dof == 2);
  CHECK(uniform.tv < 0.02);
  CHECK(uniform.p_value > 1e-4);
  CHECK(uniform.pass(0.02));

  SingleSitePotential soft(ctx, 1.0, {0.0, -1.0});
  auto softmax = empirical_kernel_check(soft, Site{{0}}, BoundaryCondition(0),
                                        Alphabet::prefix(2), 20000, 43);
  CHECK(softmax.tv < 0.02);
  CHECK(softmax.pass(0.02));

  CountablePottsPotential::Params p;
  p.cost_form = CountablePottsPotential::CostForm::linear;
  p.cost_coef = 1.0;
  p.coupling_form = CountablePottsPotential::CouplingForm::geometric;
  p.amplitude = 1.0;
  p.lambda = 0.5;
  CountablePottsPotential potts(ctx, 1.0, p);
  auto clustered = empirical_kernel_check(potts, Site{{0}}, BoundaryCondition(0),
                                          Alphabet::prefix(4), 20000, 44);
  CHECK(clustered.pass(0.02));
  CHECK(clustered.slack > 0.0);  // countable tail contributes real allowance

  // Different seeds, same verdict; same seed, same numbers.
  auto again = empirical_kernel_check(soft, Site{{0}}, BoundaryCondition(0),
                                      Alphabet::prefix(2), 20000, 43);
  CHECK(again.tv == softmax.tv);
  CHECK(again.chi_square == softmax.chi_square);
}

TEST_CASE("chi-square tail machinery") {
  // Q(1/2, x) = erfc(sqrt(x)); at x = 1 this is erfc(1).
  CHECK(regularized_gamma_upper(0.5, 1.0) ==
        doctest::Approx(0.15729920705028513).epsilon(1e-12));
  // Q(1, x) = e^{-x}.
  CHECK(regularized_gamma_upper(1.0, 2.0) ==
        doctest::Approx(std::exp(-2.0)).epsilon(1e-12));
  // Q(2, x) = (1 + x) e^{-x}.
  CHECK(regularized_gamma_upper(2.0, 1.0) ==
        doctest::Approx(2.0 * std::exp(-1.0)).epsilon(1e-12));
  CHECK(regularized_gamma_upper(0.5, 0.0) == doctest::Approx(1.0));
  CHECK(regularized_gamma_upper(3.0, 200.0) < 1e-60);

  // Classic 5% critical value of chi-square with one degree of freedom.
  CHECK(chi_square_pvalue(3.841458820694124, 1) ==
        doctest::Approx(0.05).epsilon(1e-6));
  CHECK(chi_square_pvalue(0.0, 4) == doctest::Approx(1.0));
  CHECK(chi_square_pvalue(5.991464547107979, 2) ==
        doctest::Approx(0.05).epsilon(1e-6));
}
