#include "gibbs/oracles.hpp"

#include <algorithm>
#include <cmath>

#include "gibbs/errors.hpp"

namespace gibbs::oracle {

TransferBracket transfer_matrix_pressure(const std::vector<double>& f0,
                                         const std::vector<std::vector<double>>& J,
                                         double beta, int iterations) {
  const std::size_t q = f0.size();
  if (q == 0 || J.size() != q)
    throw ConfigError("transfer oracle needs a square nonempty matrix");
  for (const auto& row : J)
    if (row.size() != q) throw ConfigError("transfer oracle needs a square matrix");

  // Certified entries and a plain-double copy for the power iteration.
  std::vector<std::vector<Interval>> M(q, std::vector<Interval>(q));
  std::vector<std::vector<double>> Md(q, std::vector<double>(q));
  for (std::size_t a = 0; a < q; ++a)
    for (std::size_t b = 0; b < q; ++b) {
      M[a][b] = exp(Interval(beta) * (Interval(f0[a]) + Interval(J[a][b])));
      Md[a][b] = std::exp(beta * (f0[a] + J[a][b]));
    }

  std::vector<double> v(q, 1.0), w(q, 0.0);
  for (int it = 0; it < iterations; ++it) {
    double norm = 0.0;
    for (std::size_t a = 0; a < q; ++a) {
      w[a] = 0.0;
      for (std::size_t b = 0; b < q; ++b) w[a] += Md[a][b] * v[b];
      norm = std::max(norm, w[a]);
    }
    for (std::size_t a = 0; a < q; ++a) v[a] = std::max(w[a] / norm, 1e-300);
  }

  // Collatz-Wielandt bracket with the certified matrix and the fixed v.
  double lo = 1e308, hi = -1e308;
  for (std::size_t a = 0; a < q; ++a) {
    Interval mv = Interval::zero();
    for (std::size_t b = 0; b < q; ++b) mv += M[a][b] * Interval(v[b]);
    const Interval ratio = mv / Interval(v[a]);
    lo = std::min(lo, ratio.lo);
    hi = std::max(hi, ratio.hi);
  }
  TransferBracket out;
  out.log_lambda = log(Interval(lo, hi));
  out.iterations = iterations;
  return out;
}

PottsConditional potts_site_conditional(const GroupContext& ctx,
                                        const CountablePottsPotential::Params& p,
                                        double beta, const Site& g,
                                        const BoundaryCondition& x,
                                        const Alphabet& A, std::int64_t radius) {
  if (p.cost_form != CountablePottsPotential::CostForm::linear)
    throw ConfigError("conditional oracle covers the linear cost form only");
  if (!(beta > 0.0) || !(p.cost_coef > 0.0))
    throw ConfigError("conditional oracle needs beta > 0 and a positive cost");

  const bool coupled =
      p.coupling_form == CountablePottsPotential::CouplingForm::geometric;

  // Coupling pulled in by letter a at g: 2 sum over h in B_R(g) \ {g} with
  // x(h) = a of amp * lambda^{|h g^{-1}|}. Letters beyond the ball are covered
  // by `slop` below.
  const SiteSet ball_g = translate(ctx, ctx.ball(radius), g);
  PottsConditional out;
  out.weights.assign(A.size(), 0.0);
  for (std::size_t i = 0; i < A.size(); ++i) {
    const Letter a = A[i];
    double couple = 0.0;
    if (coupled) {
      for (const Site& h : ball_g) {
        if (h == g || x.at(h) != a) continue;
        const auto norm = ctx.word_norm(ctx.multiply(h, ctx.inverse(g)));
        couple += 2.0 * p.amplitude * std::pow(p.lambda, double(norm));
      }
    }
    out.weights[i] = std::exp(-beta * (p.cost_coef * double(a) + couple));
  }

  // Total coupling mass sum_{h != 1} C(h), crude closed form good enough for
  // the slop and tail estimates (d-dim ball sizes bounded by (2k+1)^d terms).
  double total_coupling = 0.0;
  double beyond_radius = 0.0;
  if (coupled) {
    int d = 1;
    if (const auto* lat = dynamic_cast<const LatticeGroup*>(&ctx)) d = lat->dim();
    for (std::int64_t k = 1; k <= radius + 400; ++k) {
      const double shell =
          std::pow(2.0 * double(k) + 1.0, d) - std::pow(2.0 * double(k) - 1.0, d);
      const double c = p.amplitude * std::pow(p.lambda, double(k));
      total_coupling += shell * c;
      if (k > radius) beyond_radius += shell * c;
      if (shell * c < 1e-280) break;
    }
  }
  // Each energy misses at most 2 beta * (coupling beyond the ball); the
  // normalized probabilities move by at most twice that for small values.
  out.slop = 4.0 * beta * beyond_radius + 1e-13;

  // Off-A letters: e^{E(a)} in e^{-beta c0(a)} * [e^{-2 beta total}, 1];
  // the cost tail is geometric for the linear form.
  const double r = std::exp(-beta * p.cost_coef);
  double cost_tail = 0.0;
  for (Letter a = 0; a <= A.max_letter() + 1; ++a)
    if (!A.contains(a)) cost_tail += std::pow(r, double(a));
  cost_tail += std::pow(r, double(A.max_letter()) + 2.0) / (1.0 - r);
  out.denom_tail_hi = cost_tail;
  out.denom_tail_lo = cost_tail * std::exp(-2.0 * beta * total_coupling);
  return out;
}

}  // namespace gibbs::oracle
