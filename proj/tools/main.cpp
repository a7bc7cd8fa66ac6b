#include <cstdio>
#include <memory>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "gibbs/acceptance.hpp"
#include "gibbs/config.hpp"
#include "gibbs/dobrushin.hpp"
#include "gibbs/emit.hpp"
#include "gibbs/errors.hpp"
#include "gibbs/sampler.hpp"
#include "gibbs/specification.hpp"
#include "gibbs/thermo.hpp"

namespace {

using gibbs::ExperimentConfig;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitResource = 3;
constexpr int kExitVerification = 4;

struct CommonFlags {
  std::string config_path;
  std::string out;
  std::string format;
  std::int64_t seed = -1;
  std::int64_t budget = -1;
  int threads = -1;
};

void add_common(CLI::App* sub, CommonFlags& flags) {
  sub->add_option("--config", flags.config_path, "experiment config (.toml or .json)")
      ->required();
  sub->add_option("--out", flags.out, "output file prefix");
  sub->add_option("--format", flags.format, "json | csv | both");
  sub->add_option("--seed", flags.seed, "RNG seed override");
  sub->add_option("--budget", flags.budget, "enumeration budget override");
  sub->add_option("--threads", flags.threads, "worker thread override");
}

ExperimentConfig load_with_overrides(const CommonFlags& flags) {
  ExperimentConfig cfg = gibbs::load_config(flags.config_path);
  if (!flags.out.empty()) cfg.out = flags.out;
  if (!flags.format.empty()) {
    if (flags.format != "json" && flags.format != "csv" && flags.format != "both")
      throw gibbs::ConfigError("--format expects json, csv or both");
    cfg.format = flags.format;
  }
  if (flags.seed >= 0) cfg.seed = static_cast<std::uint64_t>(flags.seed);
  if (flags.budget > 0) cfg.budget = static_cast<std::uint64_t>(flags.budget);
  if (flags.threads >= 0) cfg.threads = flags.threads;
  return cfg;
}

void emit_result(const ExperimentConfig& cfg, const json& result,
                 const std::string& csv_override = std::string()) {
  const std::string text = result.dump(2) + "\n";
  std::fputs(text.c_str(), stdout);
  if (cfg.out.empty()) return;
  if (cfg.format == "json" || cfg.format == "both")
    gibbs::write_text(cfg.out + ".json", text);
  if (cfg.format == "csv" || cfg.format == "both")
    gibbs::write_text(cfg.out + ".csv", csv_override.empty()
                                            ? gibbs::json_to_csv(result)
                                            : csv_override);
}

// Kernel tables get a dedicated tabular layout instead of the generic flatten.
std::string kernel_csv(const json& out) {
  std::string csv = "pattern,lo,hi\n";
  for (const auto& e : out.at("kernel").at("entries")) {
    std::string pat;
    for (const auto& l : e.at("letters")) {
      if (!pat.empty()) pat += ' ';
      pat += std::to_string(l.get<long long>());
    }
    csv += pat + ',' +
           gibbs::format_double(e.at("probability").at("lo").get<double>()) +
           ',' +
           gibbs::format_double(e.at("probability").at("hi").get<double>()) +
           '\n';
  }
  const auto& tail = out.at("kernel").at("tail_mass");
  csv += "tail," + gibbs::format_double(tail.at("lo").get<double>()) + ',' +
         gibbs::format_double(tail.at("hi").get<double>()) + '\n';
  return csv;
}

json run_pressure(const ExperimentConfig& cfg) {
  auto ctx = gibbs::make_group(cfg.group);
  auto pot = gibbs::make_potential(ctx, cfg.potential);

  gibbs::BracketOptions bo;
  bo.max_radius = cfg.pressure.max_radius;
  bo.ladder = cfg.pressure.ladder;
  bo.countable = cfg.pressure.countable;
  bo.enumeration.budget = cfg.budget;
  bo.enumeration.threads = cfg.threads;
  const gibbs::PressureBracket br =
      gibbs::pressure_bracket(*pot, gibbs::Alphabet::prefix(
                                        static_cast<gibbs::Letter>(cfg.pressure.alphabet)),
                              bo);

  json out;
  out["group"] = ctx->describe();
  out["potential"] = pot->describe();
  out["pressure"]["lower"] = br.lower;
  out["pressure"]["upper"] = br.upper;
  out["pressure"]["width"] = br.upper - br.lower;
  out["pressure"]["upper_witness"] = br.upper_detail.witness;
  out["pressure"]["per_candidate"] = br.upper_detail.per_candidate;
  out["pressure"]["lower_entropy"] = gibbs::interval_json(br.lower_detail.entropy_part);
  out["pressure"]["lower_energy"] = gibbs::interval_json(br.lower_detail.energy_part);
  out["pressure"]["lower_iterations"] = br.lower_detail.iterations;
  out["pressure"]["marginal"] = br.lower_detail.q;
  if (!br.ladder.empty()) {
    json ladder = json::array();
    for (const auto& e : br.ladder)
      ladder.push_back({{"alphabet", e.alphabet_size}, {"upper", e.upper}});
    out["pressure"]["ladder"] = ladder;
  }
  return out;
}

json run_kernel(const ExperimentConfig& cfg) {
  if (!cfg.kernel.enabled || cfg.kernel.window.empty())
    throw gibbs::ConfigError("kernel command needs an enabled [kernel] section");
  auto ctx = gibbs::make_group(cfg.group);
  auto pot = gibbs::make_potential(ctx, cfg.potential);

  const gibbs::SiteSet K = gibbs::site_set_from(*ctx, cfg.kernel.window);
  const gibbs::Alphabet A =
      gibbs::Alphabet::prefix(static_cast<gibbs::Letter>(cfg.kernel.alphabet));

  gibbs::Pattern overrides;
  for (const auto& [coords, letter] : cfg.kernel.overrides) {
    gibbs::SiteSet s;
    s.insert(gibbs::site_from(*ctx, coords));
    overrides = overrides.overridden_by(gibbs::Pattern(s, {letter}));
  }
  const gibbs::BoundaryCondition x(cfg.kernel.background, overrides);

  gibbs::KernelOptions kopts;
  kopts.budget = cfg.budget;
  const gibbs::KernelTable table = gibbs::kernel_table(*pot, K, x, A, kopts);

  json out;
  out["group"] = ctx->describe();
  out["potential"] = pot->describe();
  out["kernel"]["window"] = gibbs::site_set_json(K);
  out["kernel"]["alphabet"] = A.items();
  out["kernel"]["exhaustion_index"] = table.window;
  out["kernel"]["tail_mass"] = gibbs::interval_json(table.tail_mass);
  out["kernel"]["v_upper"] = table.v_k_upper;
  out["kernel"]["delta_upper"] = table.delta_k_upper;
  json entries = json::array();
  for (std::size_t i = 0; i < table.patterns.size(); ++i)
    entries.push_back({{"letters", table.patterns[i].letters()},
                       {"probability", gibbs::interval_json(table.entries[i])}});
  out["kernel"]["entries"] = entries;

  if (!cfg.kernel.consistency_sub.empty()) {
    const gibbs::SiteSet F = gibbs::site_set_from(*ctx, cfg.kernel.consistency_sub);
    const gibbs::ConsistencyReport rep =
        gibbs::consistency_check(*pot, K, F, x, A, kopts);
    out["consistency"] = {{"max_gap", rep.max_gap},
                          {"max_deviation", rep.max_deviation},
                          {"tail_mass", rep.tail_mass},
                          {"pass", rep.pass}};
  }
  if (!cfg.kernel.invariance_shift.empty()) {
    const gibbs::Site g = gibbs::site_from(*ctx, cfg.kernel.invariance_shift);
    const gibbs::InvarianceReport rep =
        gibbs::invariance_check(*pot, K, x, A, g, kopts);
    out["invariance"] = {{"max_gap", rep.max_gap},
                         {"max_deviation", rep.max_deviation},
                         {"width_allowance", rep.width_allowance},
                         {"pass", rep.pass}};
  }
  if (cfg.kernel.bowen_gibbs) {
    const gibbs::BoundaryCondition y(cfg.kernel.bowen_background);
    const gibbs::BowenGibbsReport rep =
        gibbs::bowen_gibbs_check(*pot, K, x, y, A, kopts);
    out["bowen_gibbs"] = {{"violations", rep.violations},
                          {"z", gibbs::interval_json(rep.z)},
                          {"v_upper", rep.v_f},
                          {"delta_upper", rep.delta_f},
                          {"worst_low_ratio", rep.worst_low},
                          {"worst_high_ratio", rep.worst_high},
                          {"pass", rep.pass}};
  }
  return out;
}

json run_dobrushin(const ExperimentConfig& cfg) {
  auto ctx = gibbs::make_group(cfg.group);
  if (cfg.potential.kind != "countable_potts")
    throw gibbs::ConfigError(
        "dobrushin command requires the countable_potts potential family");

  std::vector<double> betas = cfg.dobrushin.betas;
  if (betas.empty()) betas.push_back(cfg.potential.beta);

  json out;
  out["group"] = ctx->describe();
  json certs = json::array();
  for (const double beta : betas) {
    const gibbs::CountablePottsPotential fam(ctx, beta, cfg.potential.potts);
    const gibbs::UniquenessCertificate cert = gibbs::uniqueness_certificate(fam);
    certs.push_back(
        {{"beta", beta},
         {"verdict", cert.unique() ? "unique" : "inconclusive"},
         {"reason", cert.reason},
         {"contraction", gibbs::interval_json(cert.contraction)},
         {"beta_threshold", gibbs::interval_json(cert.beta_threshold)},
         {"conditions",
          {{"variation_summable", cert.conditions.variation_summable},
           {"variation_bound", gibbs::interval_json(cert.conditions.variation_bound)},
           {"growth_ok", cert.conditions.growth_ok},
           {"growth_witness", cert.conditions.growth_witness},
           {"exp_summable", cert.conditions.exp_summable}}}});
  }
  out["certificates"] = certs;

  if (cfg.dobrushin.trials > 0) {
    const gibbs::CountablePottsPotential fam(ctx, betas.front(),
                                             cfg.potential.potts);
    const gibbs::SiteSet grid = ctx->ball(cfg.dobrushin.grid_radius);
    json rows = json::array();
    std::uint64_t salt = 0;
    for (const gibbs::Site& g : grid) {
      for (const gibbs::Site& h : grid) {
        if (g == h) continue;
        const gibbs::Interval upper = gibbs::rho_bound_example(fam, g, h);
        const gibbs::RhoNumericResult lower = gibbs::rho_numeric(
            fam, g, h, gibbs::Alphabet::prefix(4), cfg.dobrushin.trials,
            cfg.seed + (++salt));
        rows.push_back({{"g", gibbs::site_json(g)},
                        {"h", gibbs::site_json(h)},
                        {"upper", gibbs::interval_json(upper)},
                        {"numeric_lower", lower.lower},
                        {"consistent", lower.lower <= upper.hi + 1e-12}});
      }
    }
    out["rho_grid"] = rows;
  }
  return out;
}

json run_sample(const ExperimentConfig& cfg) {
  if (!cfg.sample.enabled)
    throw gibbs::ConfigError("sample command needs an enabled [sample] section");
  auto ctx = gibbs::make_group(cfg.group);
  auto pot = gibbs::make_potential(ctx, cfg.potential);

  gibbs::SiteSet window;
  if (!cfg.sample.window.empty())
    window = gibbs::site_set_from(*ctx, cfg.sample.window);
  else
    window = ctx->folner_set(cfg.sample.window_radius);

  gibbs::SamplerOptions sopts;
  sopts.seed = cfg.seed;
  sopts.kernel.budget = cfg.budget;
  gibbs::HeatBathSampler chain(
      *pot, window, gibbs::BoundaryCondition(0),
      gibbs::Alphabet::prefix(static_cast<gibbs::Letter>(cfg.sample.alphabet)),
      sopts);
  chain.run(cfg.sample.burn_in);
  chain.reset_marginals();
  chain.run(cfg.sample.sweeps);

  json out;
  out["group"] = ctx->describe();
  out["potential"] = pot->describe();
  out["sample"]["window"] = gibbs::site_set_json(window);
  out["sample"]["sweeps"] = cfg.sample.sweeps;
  out["sample"]["burn_in"] = cfg.sample.burn_in;
  out["sample"]["steps"] = chain.steps();
  out["sample"]["alphabet_extensions"] = chain.extensions();
  out["sample"]["working_alphabet"] = chain.working_alphabet().items();
  json marg = json::array();
  const auto& counts = chain.marginals();
  for (std::size_t i = 0; i < window.size(); ++i) {
    json site_counts = json::object();
    for (const auto& [letter, count] : counts[i])
      site_counts[std::to_string(letter)] =
          double(count) / double(cfg.sample.sweeps);
    marg.push_back(
        {{"site", gibbs::site_json(window[i])}, {"marginal", site_counts}});
  }
  out["sample"]["marginals"] = marg;
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"certified thermodynamic formalism on countable shifts over "
               "amenable groups"};
  app.require_subcommand(1);

  CommonFlags pressure_flags, kernel_flags, dobrushin_flags, sample_flags;
  CLI::App* pressure = app.add_subcommand(
      "pressure", "certified pressure brackets and partition functions");
  add_common(pressure, pressure_flags);
  CLI::App* kernel = app.add_subcommand(
      "kernel", "certified specification kernel tables and checks");
  add_common(kernel, kernel_flags);
  CLI::App* dobrushin = app.add_subcommand(
      "dobrushin", "uniqueness certificates and interdependence bounds");
  add_common(dobrushin, dobrushin_flags);
  CLI::App* sample =
      app.add_subcommand("sample", "heat-bath sampling on a finite window");
  add_common(sample, sample_flags);
  app.add_subcommand("verify", "run the acceptance battery");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (pressure->parsed()) {
      const ExperimentConfig cfg = load_with_overrides(pressure_flags);
      emit_result(cfg, run_pressure(cfg));
    } else if (kernel->parsed()) {
      const ExperimentConfig cfg = load_with_overrides(kernel_flags);
      const json out = run_kernel(cfg);
      emit_result(cfg, out, kernel_csv(out));
    } else if (dobrushin->parsed()) {
      const ExperimentConfig cfg = load_with_overrides(dobrushin_flags);
      emit_result(cfg, run_dobrushin(cfg));
    } else if (sample->parsed()) {
      const ExperimentConfig cfg = load_with_overrides(sample_flags);
      emit_result(cfg, run_sample(cfg));
    } else {
      return gibbs::run_acceptance_cli() == 0 ? kExitOk : kExitVerification;
    }
  } catch (const gibbs::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const gibbs::ResourceError& e) {
    std::fprintf(stderr, "resource limit: %s\n", e.what());
    return kExitResource;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return kExitOk;
}
