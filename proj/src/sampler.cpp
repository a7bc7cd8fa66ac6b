#include "gibbs/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>

#include "gibbs/errors.hpp"

namespace gibbs {

namespace {

double unit_uniform(std::mt19937_64& rng) {
  return std::ldexp(static_cast<double>(rng() >> 11), -53);  // [0, 1)
}

// Memoizes the last kernel table so iid draws at a fixed boundary do not
// rebuild it; chain updates naturally miss and recompute.
struct TableCache {
  std::optional<KernelTable> table;

  const KernelTable& get(const Potential& pot, const SiteSet& Kg,
                         const BoundaryCondition& y, const Alphabet& A,
                         const KernelOptions& kopts) {
    if (!table || !(table->boundary == y) || !(table->A == A) ||
        !(table->K == Kg))
      table = kernel_table(pot, Kg, y, A, kopts);
    return *table;
  }
};

// One inverse-CDF draw from the kernel-table midpoints at the single site g.
// Falling past the accumulated mass means the draw landed in the certified
// tail: widen the working alphabet with fresh letters and redraw. Alphabets
// that cannot grow (declared-finite families) absorb the sub-1e-9 rounding
// sliver into the last cell.
Letter draw_single_site(const Potential& pot, const SiteSet& Kg,
                        const BoundaryCondition& y, Alphabet& A,
                        std::mt19937_64& rng, const KernelOptions& kopts,
                        std::size_t max_alphabet, std::size_t& extensions,
                        TableCache& cache) {
  for (;;) {
    const KernelTable& t = cache.get(pot, Kg, y, A, kopts);
    const double u = unit_uniform(rng);
    double acc = 0.0;
    for (std::size_t i = 0; i < t.entries.size(); ++i) {
      acc += std::max(0.0, t.entries[i].mid());
      if (u < acc) return t.patterns[i].at_index(0);
    }
    const bool can_extend =
        !pot.declared_alphabet().has_value() && A.size() + 4 <= max_alphabet;
    if (!can_extend) {
      if (1.0 - acc <= 1e-9 && !t.patterns.empty())
        return t.patterns.back().at_index(0);
      throw ResourceError(
          "heat-bath draw fell into unaccounted kernel mass and the alphabet "
          "cannot be extended");
    }
    std::vector<Letter> ext = A.items();
    const Letter top = A.max_letter();
    for (Letter k = 1; k <= 4; ++k) ext.push_back(top + k);
    A = Alphabet(std::move(ext));
    ++extensions;
  }
}

}  // namespace

HeatBathSampler::HeatBathSampler(const Potential& pot, SiteSet window,
                                 BoundaryCondition boundary, Alphabet A,
                                 SamplerOptions opts)
    : pot_(pot),
      window_(std::move(window)),
      boundary_(std::move(boundary)),
      alphabet_(std::move(A)),
      opts_(opts),
      rng_(opts.seed) {
  if (window_.is_empty()) throw ConfigError("sampler window must be non-empty");
  if (alphabet_.is_empty()) throw ConfigError("sampler alphabet must be non-empty");
  letters_.assign(window_.size(), alphabet_.min_letter());
  marginals_.assign(window_.size(), {});
}

Letter HeatBathSampler::draw_site(const Site& g) {
  SiteSet Kg;
  Kg.insert(g);
  const BoundaryCondition y =
      boundary_.overridden_by(Pattern(window_, letters_));
  TableCache cache;
  return draw_single_site(pot_, Kg, y, alphabet_, rng_, opts_.kernel,
                          opts_.max_alphabet, extensions_, cache);
}

void HeatBathSampler::sweep() {
  for (std::size_t i = 0; i < window_.size(); ++i) {
    letters_[i] = draw_site(window_[i]);
    ++steps_;
  }
  for (std::size_t i = 0; i < window_.size(); ++i) ++marginals_[i][letters_[i]];
}

void HeatBathSampler::run(std::size_t sweeps) {
  for (std::size_t s = 0; s < sweeps; ++s) sweep();
}

void HeatBathSampler::reset_marginals() {
  marginals_.assign(window_.size(), {});
}

KernelCheckReport empirical_kernel_check(const Potential& pot, const Site& g,
                                         const BoundaryCondition& x,
                                         const Alphabet& A, std::size_t draws,
                                         std::uint64_t seed,
                                         const KernelOptions& kopts) {
  SiteSet Kg;
  Kg.insert(g);
  const KernelTable t = kernel_table(pot, Kg, x, A, kopts);

  std::mt19937_64 rng(seed);
  Alphabet work = A;
  std::size_t extensions = 0;
  TableCache cache;
  std::map<Letter, std::uint64_t> counts;
  KernelCheckReport rep;
  rep.draws = draws;
  for (std::size_t i = 0; i < draws; ++i) {
    const Letter a =
        draw_single_site(pot, Kg, x, work, rng, kopts, 4096, extensions, cache);
    ++counts[a];
    if (!A.contains(a)) ++rep.off_alphabet;
  }

  const double n = static_cast<double>(draws);
  double tv = 0.0, slack = 0.0;
  for (std::size_t i = 0; i < t.entries.size(); ++i) {
    const Letter a = t.patterns[i].at_index(0);
    const auto it = counts.find(a);
    const double freq = it == counts.end() ? 0.0 : double(it->second) / n;
    tv += std::abs(freq - t.entries[i].mid());
    slack += t.entries[i].width();
  }
  tv += std::abs(double(rep.off_alphabet) / n - t.tail_mass.mid());
  slack += t.tail_mass.width();
  rep.tv = 0.5 * tv;
  rep.slack = 0.5 * slack;

  // Chi-square against the midpoint law: letters with expectation >= 5 are
  // their own cells, everything else (tail included) pools into one.
  double stat = 0.0;
  std::int64_t cells = 0;
  double pooled_exp = t.tail_mass.mid() * n;
  double pooled_obs = static_cast<double>(rep.off_alphabet);
  for (std::size_t i = 0; i < t.entries.size(); ++i) {
    const Letter a = t.patterns[i].at_index(0);
    const auto it = counts.find(a);
    const double obs = it == counts.end() ? 0.0 : double(it->second);
    const double expd = t.entries[i].mid() * n;
    if (expd >= 5.0) {
      stat += (obs - expd) * (obs - expd) / expd;
      ++cells;
    } else {
      pooled_exp += expd;
      pooled_obs += obs;
    }
  }
  if (pooled_exp > 0.0) {
    stat += (pooled_obs - pooled_exp) * (pooled_obs - pooled_exp) / pooled_exp;
    ++cells;
  }
  rep.chi_square = stat;
  rep.dof = std::max<std::int64_t>(cells - 1, 1);
  rep.p_value = chi_square_pvalue(stat, rep.dof);
  return rep;
}

// Series expansion of P(a, x) for x < a + 1; Lentz continued fraction for the
// complement otherwise.
double regularized_gamma_upper(double a, double x) {
  if (!(a > 0.0) || x < 0.0)
    throw std::domain_error("regularized_gamma_upper needs a > 0, x >= 0");
  if (x == 0.0) return 1.0;
  const double lg = std::lgamma(a);
  if (x < a + 1.0) {
    double term = 1.0 / a, sum = term, ap = a;
    for (int i = 0; i < 500; ++i) {
      ap += 1.0;
      term *= x / ap;
      sum += term;
      if (std::abs(term) < std::abs(sum) * 1e-16) break;
    }
    const double p = sum * std::exp(-x + a * std::log(x) - lg);
    return std::clamp(1.0 - p, 0.0, 1.0);
  }
  const double tiny = 1e-300;
  double b = x + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, h = d;
  for (int i = 1; i <= 500; ++i) {
    const double an = -double(i) * (double(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-16) break;
  }
  const double q = std::exp(-x + a * std::log(x) - lg) * h;
  return std::clamp(q, 0.0, 1.0);
}

double chi_square_pvalue(double stat, std::int64_t dof) {
  if (dof <= 0) throw std::domain_error("chi_square_pvalue needs dof >= 1");
  if (stat <= 0.0) return 1.0;
  return regularized_gamma_upper(0.5 * static_cast<double>(dof), 0.5 * stat);
}

}  // namespace gibbs
