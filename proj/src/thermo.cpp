#include "gibbs/thermo.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <thread>

#include "gibbs/errors.hpp"

namespace gibbs {

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("AMENABLE_GIBBS_THREADS")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end && *end == '\0' && v >= 1 && v <= 512) return static_cast<int>(v);
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(std::min(hw, 16u));
}

namespace {

constexpr std::uint64_t kChunk = 4096;

// Tuple with the given big-endian base-|A| rank (index 0 varies slowest,
// matching the odometer order of for_each_tuple).
std::vector<Letter> unrank_tuple(const Alphabet& A, std::size_t n, std::uint64_t rank) {
  std::vector<Letter> tuple(n, n ? A[0] : Letter{0});
  for (std::size_t i = n; i-- > 0;) {
    tuple[i] = A[rank % A.size()];
    rank /= A.size();
  }
  return tuple;
}

bool advance_tuple(const Alphabet& A, std::vector<Letter>& tuple) {
  for (std::size_t i = tuple.size(); i-- > 0;) {
    auto idx = static_cast<std::size_t>(A.index_of(tuple[i]));
    if (idx + 1 < A.size()) {
      tuple[i] = A[idx + 1];
      return true;
    }
    tuple[i] = A[0];
  }
  return false;
}

}  // namespace

Interval sum_over_patterns(const Alphabet& A, std::size_t n, const EnumOptions& opts,
                           const std::function<Interval(const std::vector<Letter>&)>& term) {
  const std::uint64_t total = tuple_count(A.size(), n);
  if (total > opts.budget)
    throw ResourceError("pattern enumeration needs " + std::to_string(total) +
                        " evaluations, budget is " + std::to_string(opts.budget));
  const std::uint64_t chunks = (total + kChunk - 1) / kChunk;
  std::vector<Interval> partial(static_cast<std::size_t>(chunks), Interval::zero());

  auto run_chunk = [&](std::uint64_t c) {
    const std::uint64_t begin = c * kChunk;
    const std::uint64_t end = std::min(total, begin + kChunk);
    std::vector<Letter> tuple = unrank_tuple(A, n, begin);
    Interval acc = Interval::zero();
    for (std::uint64_t i = begin; i < end; ++i) {
      acc += term(tuple);
      if (i + 1 < end) advance_tuple(A, tuple);
    }
    partial[static_cast<std::size_t>(c)] = acc;
  };

  const int threads = std::min<std::uint64_t>(resolve_threads(opts.threads), chunks);
  if (threads <= 1) {
    for (std::uint64_t c = 0; c < chunks; ++c) run_chunk(c);
  } else {
    std::atomic<std::uint64_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (std::uint64_t c = next.fetch_add(1); c < chunks; c = next.fetch_add(1))
          run_chunk(c);
      });
    }
    for (auto& th : pool) th.join();
  }
  // Sequential reduce in chunk order keeps the result thread-count independent.
  Interval sum = Interval::zero();
  for (const Interval& p : partial) sum += p;
  return sum;
}

Interval partition_function(const Potential& pot, const SiteSet& F,
                            const Alphabet& A, const EnumOptions& opts) {
  if (F.is_empty()) throw ConfigError("partition function needs a non-empty window");
  return sum_over_patterns(A, F.size(), opts, [&](const std::vector<Letter>& tuple) {
    Pattern w(F, tuple);
    return exp(pot.sup_phi_F_cylinder(F, w, &A));
  });
}

Interval partition_function_countable(const Potential& pot, const SiteSet& F,
                                      const Alphabet& A, const EnumOptions& opts) {
  if (F.is_empty()) throw ConfigError("partition function needs a non-empty window");
  Interval truncated =
      sum_over_patterns(A, F.size(), opts, [&](const std::vector<Letter>& tuple) {
        Pattern w(F, tuple);
        return exp(pot.sup_phi_F_cylinder(F, w, nullptr));
      });
  return truncated + countable_pattern_remainder(pot, F.size(), A);
}

Interval countable_pattern_remainder(const Potential& pot, std::size_t n,
                                     const Alphabet& A) {
  // Product bound: the discarded mass is at most Z_1^n - (sum_{a in A} w_a)^n
  // where Z_1 adds the certified single-site tail outside A.
  Interval weights_A = Interval::zero();
  for (Letter a : A) weights_A += pot.single_site_weight(a);
  Interval tail = pot.single_site_tail(A);
  Interval z1 = weights_A + Interval(0.0, tail.hi);
  Interval remainder = pow_int(z1, static_cast<long long>(n)) -
                       pow_int(max(weights_A, Interval::zero()), static_cast<long long>(n));
  return Interval(0.0, std::max(0.0, remainder.hi));
}

PressureUpperResult pressure_upper(const Potential& pot,
                                   const std::vector<SiteSet>& candidates,
                                   const Alphabet& A, bool countable,
                                   const EnumOptions& opts) {
  if (candidates.empty()) throw ConfigError("pressure_upper needs >= 1 candidate window");
  PressureUpperResult res;
  res.per_candidate.reserve(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const SiteSet& F = candidates[i];
    Interval z = countable ? partition_function_countable(pot, F, A, opts)
                           : partition_function(pot, F, A, opts);
    if (!(z.lo > 0.0))
      throw ConfigError("partition function lower end is not positive; cannot certify");
    Interval val = log(z) / Interval(static_cast<double>(F.size()));
    res.per_candidate.push_back(val.hi);
    if (i == 0 || val.hi < res.upper) {
      res.upper = val.hi;
      res.witness = i;
    }
  }
  return res;
}

Interval entropy(const std::vector<double>& q) {
  Interval acc = Interval::zero();
  for (double v : q) {
    if (!(v >= 0.0) || v > 1.0) throw ConfigError("entropy expects q entries in [0, 1]");
    if (v == 0.0) continue;
    acc += Interval(v) * log(Interval(v));
  }
  return -acc;
}

Interval mean_energy(const Potential& pot, const Alphabet& A,
                     const std::vector<double>& q) {
  return pot.mean_energy(A, q);
}

PressureLowerResult pressure_lower(const Potential& pot, const Alphabet& A,
                                   const PressureLowerOptions& opts) {
  const std::size_t n = A.size();
  auto objective = [&](const std::vector<double>& q) {
    Interval h = entropy(q);
    Interval e = pot.mean_energy(A, q);
    return std::make_pair(h, e);
  };
  auto normalize = [](std::vector<double>& q) {
    double s = 0.0;
    for (double v : q) s += v;
    for (double& v : q) v /= s;
  };

  std::vector<double> q(n, 1.0 / static_cast<double>(n));
  PressureLowerResult best;
  {
    auto [h, e] = objective(q);
    best.lower = (h + e).lo;
    best.q = q;
    best.entropy_part = h;
    best.energy_part = e;
  }

  double prev = best.lower;
  for (int it = 1; it <= opts.max_iterations; ++it) {
    // Damped mean-field step: the stationary point of h(q) + E(q) satisfies
    // q proportional to exp(grad E).
    std::vector<double> grad = pot.mean_energy_gradient(A, q);
    double gmax = grad[0];
    for (double g : grad) gmax = std::max(gmax, g);
    std::vector<double> target(n);
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      target[i] = std::exp(grad[i] - gmax);
      s += target[i];
    }
    for (std::size_t i = 0; i < n; ++i)
      q[i] = 0.5 * q[i] + 0.5 * (target[i] / s);
    normalize(q);

    auto [h, e] = objective(q);
    double val = (h + e).lo;
    best.iterations = it;
    if (val > best.lower) {
      best.lower = val;
      best.q = q;
      best.entropy_part = h;
      best.energy_part = e;
    }
    double denom = std::max(1.0, std::abs(val));
    if (it > 1 && std::abs(val - prev) < opts.rel_tol * denom) break;
    prev = val;
  }
  return best;
}

PressureBracket pressure_bracket(const Potential& pot, const Alphabet& A,
                                 const BracketOptions& opts) {
  PressureBracket out;
  std::vector<SiteSet> candidates;
  for (std::int64_t r = 0; r <= opts.max_radius; ++r) {
    SiteSet F = pot.group().folner_set(r);
    if (tuple_count(A.size(), F.size()) > opts.enumeration.budget) break;
    candidates.push_back(std::move(F));
  }
  if (candidates.empty()) candidates.push_back(pot.group().folner_set(0));

  const bool countable = opts.countable && !pot.declared_alphabet().has_value();
  out.upper_detail = pressure_upper(pot, candidates, A, countable, opts.enumeration);
  out.upper = out.upper_detail.upper;
  out.lower_detail = pressure_lower(pot, A, opts.lower);
  out.lower = out.lower_detail.lower;

  if (countable) {
    for (std::size_t size : opts.ladder) {
      if (size < 1 || size > A.size()) continue;
      Alphabet sub = Alphabet::prefix(static_cast<Letter>(size));
      PressureUpperResult r =
          pressure_upper(pot, candidates, sub, /*countable=*/false, opts.enumeration);
      out.ladder.push_back({size, r.upper});
    }
  }
  return out;
}

ShearerResult shearer_check(const Potential& pot, const SiteSet& F,
                            const std::vector<SiteSet>& cover, const Alphabet& A,
                            const EnumOptions& opts) {
  if (F.is_empty()) throw ConfigError("shearer_check needs a non-empty F");
  if (cover.empty()) throw ConfigError("shearer_check needs a non-empty cover");
  // Validate the k-cover: every member inside F, every site covered >= k times
  // with k the minimum multiplicity.
  std::int64_t k = -1;
  for (const SiteSet& K : cover) {
    if (K.is_empty()) throw ConfigError("shearer_check: cover members must be non-empty");
    if (!K.is_subset_of(F))
      throw ConfigError("shearer_check: cover member not contained in F");
  }
  for (const Site& g : F) {
    std::int64_t mult = 0;
    for (const SiteSet& K : cover)
      if (K.contains(g)) ++mult;
    if (mult == 0)
      throw ConfigError("shearer_check: site " + to_string(g) + " not covered");
    k = (k < 0) ? mult : std::min(k, mult);
  }

  const double shift = pot.abs_sup(A).hi;
  auto shifted_z = [&](const SiteSet& W) {
    Interval z = partition_function(pot, W, A, opts);
    Interval boost = exp(Interval(shift) * Interval(static_cast<double>(W.size())));
    return z * boost;
  };

  ShearerResult res;
  res.k = k;
  res.lhs = shifted_z(F);
  Interval rhs = Interval::exact(1.0);
  for (const SiteSet& K : cover) rhs *= root(shifted_z(K), k);
  res.rhs = rhs;
  res.holds_certified = res.lhs.hi <= res.rhs.lo;
  res.violated_certified = res.lhs.lo > res.rhs.hi;
  return res;
}

}  // namespace gibbs
