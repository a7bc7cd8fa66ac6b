#include "gibbs/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <utility>

#include "gibbs/dobrushin.hpp"
#include "gibbs/oracles.hpp"
#include "gibbs/potentials.hpp"
#include "gibbs/sampler.hpp"
#include "gibbs/specification.hpp"
#include "gibbs/thermo.hpp"

namespace gibbs {

namespace {

using CheckFn = std::function<std::pair<bool, std::string>()>;

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

CountablePottsPotential::Params potts_params(double cost_coef, double amplitude,
                                             double lambda) {
  CountablePottsPotential::Params p;
  p.cost_form = CountablePottsPotential::CostForm::linear;
  p.cost_coef = cost_coef;
  p.coupling_form = amplitude == 0.0
                        ? CountablePottsPotential::CouplingForm::zero
                        : CountablePottsPotential::CouplingForm::geometric;
  p.amplitude = amplitude;
  p.lambda = lambda;
  return p;
}

SiteSet interval_sites_1d(const GroupContext& ctx, std::int64_t a, std::int64_t b) {
  SiteSet out;
  for (std::int64_t i = a; i <= b; ++i) out.insert(Site{{i}});
  (void)ctx;
  return out;
}

// --- 1: countable single-site partition function and pressure bracket -------

std::pair<bool, std::string> crit_single_site_pressure() {
  constexpr double kZTarget = 1.5819767068693265;   // geometric series value
  constexpr double kPTarget = 0.45867514538708193;  // its logarithm
  constexpr double kZWidthTol = 1e-6;
  constexpr double kBracketTol = 1e-5;

  auto ctx = make_lattice(1, LatticeNorm::linf);
  CountablePottsPotential pot(ctx, 1.0, potts_params(1.0, 0.0, 0.5));

  SiteSet F;
  F.insert(ctx->identity());
  const Alphabet A = Alphabet::prefix(41);
  const Interval Z = partition_function_countable(pot, F, A);

  BracketOptions bo;
  bo.max_radius = 0;
  const PressureBracket br = pressure_bracket(pot, A, bo);

  const bool ok = Z.contains(kZTarget) && Z.width() <= kZWidthTol &&
                  br.lower <= kPTarget && kPTarget <= br.upper &&
                  (br.upper - br.lower) <= kBracketTol;
  std::ostringstream d;
  d << "Z=[" << num(Z.lo) << "," << num(Z.hi) << "] width=" << num(Z.width())
    << " bracket=[" << num(br.lower) << "," << num(br.upper) << "]";
  return {ok, d.str()};
}

// --- 2: d=1 nearest-neighbor pressure vs transfer-matrix oracle -------------

std::pair<bool, std::string> crit_transfer_matrix() {
  constexpr double kUpperGapTol = 0.05;
  constexpr double kConsistencyTol = 1e-9;
  constexpr int kDraws = 20;

  auto ctx = make_lattice(1, LatticeNorm::linf);
  std::mt19937_64 rng(20250814ull);
  std::uniform_int_distribution<int> qd(2, 3);
  std::uniform_real_distribution<double> fd(-1.0, 1.0);
  std::uniform_real_distribution<double> jd(-0.4, 0.4);
  std::uniform_real_distribution<double> bd(0.1, 0.3);

  double worst_gap = 0.0, worst_inconsistency = 0.0;
  for (int t = 0; t < kDraws; ++t) {
    const int q = qd(rng);
    std::vector<double> f0(q);
    for (double& v : f0) v = fd(rng);
    std::vector<std::vector<double>> J(q, std::vector<double>(q));
    for (auto& row : J)
      for (double& v : row) v = jd(rng);
    const double beta = bd(rng);

    PairPotential pot(ctx, beta, f0, {{Site{{1}}, J}});
    BracketOptions bo;
    bo.max_radius = 5;  // windows up to 11 sites
    bo.enumeration.budget = 400000;
    const PressureBracket br = pressure_bracket(pot, Alphabet::prefix(q), bo);
    const auto oracle = oracle::transfer_matrix_pressure(f0, J, beta);

    worst_inconsistency =
        std::max({worst_inconsistency, br.lower - oracle.log_lambda.hi,
                  oracle.log_lambda.lo - br.upper});
    worst_gap = std::max(worst_gap, br.upper - oracle.log_lambda.lo);
  }
  const bool ok =
      worst_inconsistency <= kConsistencyTol && worst_gap <= kUpperGapTol;
  return {ok, "worst upper gap=" + num(worst_gap) +
                  " inconsistency=" + num(worst_inconsistency)};
}

// --- 3: randomized Shearer-type subadditivity ---------------------------------

std::pair<bool, std::string> crit_shearer() {
  constexpr int kInstances = 1000;

  auto ctx = make_lattice(2, LatticeNorm::linf);
  std::vector<Site> box;
  for (std::int64_t i = 0; i <= 2; ++i)
    for (std::int64_t j = 0; j <= 2; ++j) box.push_back(Site{{i, j}});

  std::mt19937_64 rng(777u);
  std::size_t held = 0, violated = 0;
  for (int t = 0; t < kInstances; ++t) {
    const int q = 2 + int(rng() % 2);
    const Alphabet A = Alphabet::prefix(q);

    std::vector<Site> shuffled = box;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    const std::size_t fsize = 1 + rng() % 6;
    SiteSet F;
    for (std::size_t i = 0; i < fsize; ++i) F.insert(shuffled[i]);

    // Random cover of F by 2..4 non-empty subsets, patched to cover.
    const std::size_t members = 2 + rng() % 3;
    std::vector<SiteSet> cover(members);
    for (auto& K : cover) {
      for (std::size_t i = 0; i < F.size(); ++i)
        if (rng() % 2) K.insert(F[i]);
      if (K.is_empty()) K.insert(F[rng() % F.size()]);
    }
    for (std::size_t i = 0; i < F.size(); ++i) {
      bool covered = false;
      for (const auto& K : cover) covered = covered || K.contains(F[i]);
      if (!covered) cover[rng() % members].insert(F[i]);
    }

    std::uniform_real_distribution<double> jd(-0.5, 0.5), fd(-1.0, 1.0),
        bd(0.2, 1.0);
    std::unique_ptr<Potential> pot;
    if (t % 2 == 0) {
      std::vector<double> values(q);
      for (double& v : values) v = fd(rng);
      pot = std::make_unique<SingleSitePotential>(ctx, bd(rng), values);
    } else {
      std::vector<double> f0(q);
      for (double& v : f0) v = fd(rng);
      auto mat = [&] {
        std::vector<std::vector<double>> J(q, std::vector<double>(q));
        for (auto& row : J)
          for (double& v : row) v = jd(rng);
        return J;
      };
      pot = std::make_unique<PairPotential>(
          ctx, bd(rng), f0,
          std::vector<PairPotential::Neighbor>{{Site{{1, 0}}, mat()},
                                               {Site{{0, 1}}, mat()}});
    }

    const ShearerResult res = shearer_check(*pot, F, cover, A);
    if (res.violated_certified) ++violated;
    if (res.holds_certified) ++held;
  }
  const bool ok = violated == 0;
  return {ok, "certified holds " + std::to_string(held) + "/" +
                  std::to_string(kInstances) + ", violations " +
                  std::to_string(violated)};
}

// --- 4: kernel consistency gamma_K gamma_F = gamma_K --------------------------

std::pair<bool, std::string> crit_kernel_consistency() {
  constexpr double kDeviationTol = 1e-10;

  auto ctx = make_lattice(1, LatticeNorm::linf);
  CountablePottsPotential pot(ctx, 0.1, potts_params(10.0, 1.0, 0.5));
  const Alphabet A = Alphabet::prefix(3);

  const std::vector<std::pair<std::int64_t, std::int64_t>> pairs = {
      {0, 1}, {0, 2}, {-1, 1}};
  std::vector<BoundaryCondition> boundaries;
  boundaries.emplace_back(0);
  boundaries.emplace_back(1);
  SiteSet far;
  far.insert(Site{{5}});
  boundaries.emplace_back(0, Pattern(far, {2}));

  double worst_dev = -1e300, worst_gap = 0.0, worst_tail = 0.0;
  for (const auto& [a, b] : pairs) {
    SiteSet K;
    K.insert(Site{{a}});
    K.insert(Site{{b}});
    for (const std::int64_t f : {a, b}) {
      SiteSet F;
      F.insert(Site{{f}});
      for (const auto& x : boundaries) {
        const ConsistencyReport rep = consistency_check(pot, K, F, x, A);
        worst_dev = std::max(worst_dev, rep.max_deviation);
        worst_gap = std::max(worst_gap, rep.max_gap);
        worst_tail = std::max(worst_tail, rep.tail_mass);
      }
    }
  }
  const bool ok = worst_gap == 0.0 && worst_dev <= kDeviationTol;
  return {ok, "max gap=" + num(worst_gap) + " max deviation=" + num(worst_dev) +
                  " tail mass<=" + num(worst_tail)};
}

// --- 5: two-sided kernel/partition envelope ----------------------------------

std::pair<bool, std::string> crit_bowen_gibbs() {
  constexpr int kInstances = 10;

  auto ctx = make_lattice(1, LatticeNorm::linf);
  std::mt19937_64 rng(4242u);
  std::uniform_real_distribution<double> jd(-0.4, 0.4), fd(-0.5, 0.5),
      bd(0.2, 0.6);

  std::size_t violations = 0;
  double worst_low = 1e300, worst_high = 0.0;
  for (int t = 0; t < kInstances; ++t) {
    std::vector<Site> line;
    for (std::int64_t i = -2; i <= 2; ++i) line.push_back(Site{{i}});
    std::shuffle(line.begin(), line.end(), rng);
    SiteSet F;
    const std::size_t fsize = 1 + rng() % 4;
    for (std::size_t i = 0; i < fsize; ++i) F.insert(line[i]);

    std::unique_ptr<Potential> pot;
    Alphabet A = Alphabet::prefix(3);
    if (t % 2 == 0) {
      pot = std::make_unique<CountablePottsPotential>(
          ctx, 0.1, potts_params(10.0, 1.0, 0.5));
      A = Alphabet::prefix(4);
    } else {
      const int q = 3;
      std::vector<double> f0(q);
      for (double& v : f0) v = fd(rng);
      std::vector<std::vector<double>> J(q, std::vector<double>(q));
      for (auto& row : J)
        for (double& v : row) v = jd(rng);
      pot = std::make_unique<PairPotential>(
          ctx, bd(rng), f0,
          std::vector<PairPotential::Neighbor>{{Site{{1}}, J}});
    }

    SiteSet over_site;
    over_site.insert(Site{{3}});
    const BoundaryCondition x(Letter(rng() % A.size()),
                              Pattern(over_site, {Letter(rng() % A.size())}));
    const BoundaryCondition y(Letter(rng() % A.size()));

    const BowenGibbsReport rep = bowen_gibbs_check(*pot, F, x, y, A);
    violations += rep.violations;
    worst_low = std::min(worst_low, rep.worst_low);
    worst_high = std::max(worst_high, rep.worst_high);
  }
  const bool ok = violations == 0;
  return {ok, "violations=" + std::to_string(violations) +
                  " margin ratios low=" + num(worst_low) +
                  " high=" + num(worst_high)};
}

// --- 6: Dobrushin certificates and numeric lower bounds -----------------------

std::pair<bool, std::string> crit_dobrushin() {
  constexpr double kThresholdTarget = 0.125;
  constexpr double kBetaUnique = 0.1125;
  constexpr double kBetaBorderline = 0.1375;
  constexpr double kGridSlack = 1e-12;

  auto ctx = make_lattice(1, LatticeNorm::linf);
  auto family = [&](double beta) {
    return CountablePottsPotential(ctx, beta, potts_params(1.0, 1.0, 0.5));
  };

  const CountablePottsPotential unique_pot = family(kBetaUnique);
  const UniquenessCertificate c1 = uniqueness_certificate(unique_pot);
  const UniquenessCertificate c2 = uniqueness_certificate(family(kBetaBorderline));

  bool ok = c1.unique() && c1.beta_threshold.contains(kThresholdTarget) &&
            c1.contraction.contains(0.9) && !c2.unique() &&
            c2.contraction.contains(1.1);

  // Numeric lower bounds never exceed the analytic upper bounds on the grid.
  double worst_excess = -1e300;
  for (std::int64_t i = -2; i <= 2; ++i) {
    for (std::int64_t j = -2; j <= 2; ++j) {
      const Site g{{i}}, h{{j}};
      const RhoNumericResult lo = rho_numeric(
          unique_pot, g, h, Alphabet::prefix(4), 12,
          0x9e3779b97f4a7c15ull ^ (std::uint64_t(i + 7) << 8) ^ std::uint64_t(j + 7));
      const Interval hi = rho_bound_example(unique_pot, g, h);
      worst_excess = std::max(worst_excess, lo.lower - hi.hi);
      if (lo.lower > hi.hi + kGridSlack) ok = false;
    }
  }
  std::ostringstream d;
  d << "threshold=[" << num(c1.beta_threshold.lo) << ","
    << num(c1.beta_threshold.hi) << "] c(0.1125)=[" << num(c1.contraction.lo)
    << "," << num(c1.contraction.hi) << "] c(0.1375).hi="
    << num(c2.contraction.hi) << " grid excess=" << num(worst_excess);
  return {ok, d.str()};
}

// --- 7: empirical sampler law vs certified kernels ----------------------------

std::pair<bool, std::string> crit_sampler() {
  constexpr std::size_t kDraws = 100000;
  constexpr double kUniformTvTol = 0.01;
  constexpr double kPottsTvTol = 0.02;

  auto ctx = make_lattice(1, LatticeNorm::linf);
  const Site origin{{0}};

  SingleSitePotential flat(ctx, 1.0, {0.0, 0.0, 0.0, 0.0});
  const KernelCheckReport ra = empirical_kernel_check(
      flat, origin, BoundaryCondition(0), Alphabet::prefix(4), kDraws, 11u);

  CountablePottsPotential potts(ctx, 0.1, potts_params(10.0, 1.0, 0.5));
  const KernelCheckReport rb = empirical_kernel_check(
      potts, origin, BoundaryCondition(0), Alphabet::prefix(4), kDraws, 12u);

  const bool ok = ra.pass(kUniformTvTol) && rb.pass(kPottsTvTol);
  std::ostringstream d;
  d << "uniform tv=" << num(ra.tv) << " (slack " << num(ra.slack)
    << ", p=" << num(ra.p_value) << "), clustering tv=" << num(rb.tv)
    << " (slack " << num(rb.slack) << ", off-A " << rb.off_alphabet << ")";
  return {ok, d.str()};
}

// --- 8: translation invariance -------------------------------------------------

std::pair<bool, std::string> crit_translation() {
  auto ctx1 = make_lattice(1, LatticeNorm::linf);
  auto ctx2 = make_lattice(2, LatticeNorm::linf);
  std::mt19937_64 rng(31337u);

  std::size_t mismatches = 0, checked = 0;

  {  // d=1 countable family, 60 translates, bit-exact partition functions
    CountablePottsPotential pot(ctx1, 0.1, potts_params(10.0, 1.0, 0.5));
    const SiteSet F = interval_sites_1d(*ctx1, -1, 1);
    const Alphabet A = Alphabet::prefix(3);
    const Interval z0 = partition_function_countable(pot, F, A);
    for (int t = 0; t < 60; ++t) {
      const std::int64_t shift = std::int64_t(rng() % 81) - 40;
      const Interval z = partition_function_countable(
          pot, translate(*ctx1, F, Site{{shift}}), A);
      ++checked;
      if (z.lo != z0.lo || z.hi != z0.hi) ++mismatches;
    }
  }

  {  // d=2 finite-range pair family, 40 translates
    std::vector<std::vector<double>> J{{0.3, -0.2}, {-0.2, 0.1}};
    PairPotential pot(ctx2, 0.7, {0.1, -0.4},
                      {{Site{{1, 0}}, J}, {Site{{0, 1}}, J}});
    const SiteSet F = ctx2->folner_set(1);  // 3x3 box
    const Alphabet A = Alphabet::prefix(2);
    const Interval z0 = partition_function(pot, F, A);
    for (int t = 0; t < 40; ++t) {
      const Site g{{std::int64_t(rng() % 41) - 20, std::int64_t(rng() % 41) - 20}};
      const Interval z = partition_function(pot, translate(*ctx2, F, g), A);
      ++checked;
      if (z.lo != z0.lo || z.hi != z0.hi) ++mismatches;
    }
  }

  // Kernel translation covariance within certified widths.
  double worst_gap = 0.0;
  {
    CountablePottsPotential pot(ctx1, 0.1, potts_params(10.0, 1.0, 0.5));
    SiteSet K;
    K.insert(Site{{0}});
    K.insert(Site{{1}});
    SiteSet far;
    far.insert(Site{{3}});
    const BoundaryCondition x(0, Pattern(far, {1}));
    for (int t = 0; t < 10; ++t) {
      const Site g{{std::int64_t(rng() % 17) - 8}};
      const InvarianceReport rep =
          invariance_check(pot, K, x, Alphabet::prefix(3), g);
      worst_gap = std::max(worst_gap, rep.max_gap);
      ++checked;
      if (!rep.pass) ++mismatches;
    }
  }

  const bool ok = mismatches == 0;
  return {ok, std::to_string(checked) + " checks, " +
                  std::to_string(mismatches) +
                  " mismatches, kernel gap=" + num(worst_gap)};
}

}  // namespace

std::vector<AcceptanceResult> run_acceptance() {
  const std::vector<std::tuple<std::string, double, CheckFn>> checks = {
      {"countable-single-site-pressure", 1.0, crit_single_site_pressure},
      {"transfer-matrix-cross-check", 30.0, crit_transfer_matrix},
      {"shearer-subadditivity", 60.0, crit_shearer},
      {"kernel-consistency", 10.0, crit_kernel_consistency},
      {"bowen-gibbs-envelope", 60.0, crit_bowen_gibbs},
      {"dobrushin-certificates", 30.0, crit_dobrushin},
      {"sampler-empirical-kernels", 60.0, crit_sampler},
      {"translation-invariance", 60.0, crit_translation},
  };

  std::vector<AcceptanceResult> out;
  for (const auto& [name, limit, fn] : checks) {
    AcceptanceResult r;
    r.name = name;
    r.limit_seconds = limit;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      auto [pass, detail] = fn();
      r.pass = pass;
      r.detail = std::move(detail);
    } catch (const std::exception& e) {
      r.pass = false;
      r.detail = std::string("exception: ") + e.what();
    }
    const auto t1 = std::chrono::steady_clock::now();
    r.seconds = std::chrono::duration<double>(t1 - t0).count();
    if (r.seconds >= r.limit_seconds) {
      r.pass = false;
      r.detail += " [exceeded " + num(limit) + "s budget]";
    }
    out.push_back(std::move(r));
  }
  return out;
}

int run_acceptance_cli() {
  const auto results = run_acceptance();
  int failures = 0;
  for (const auto& r : results) {
    std::printf("[%s] %-32s (%.2fs/%.0fs) %s\n", r.pass ? "PASS" : "FAIL",
                r.name.c_str(), r.seconds, r.limit_seconds, r.detail.c_str());
    if (!r.pass) ++failures;
  }
  std::printf("%d/%zu criteria passed\n", int(results.size()) - failures,
              results.size());
  return failures;
}

}  // namespace gibbs
