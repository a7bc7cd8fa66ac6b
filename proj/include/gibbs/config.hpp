#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "gibbs/group.hpp"
#include "gibbs/potentials.hpp"

namespace gibbs {

struct GroupConfig {
  std::string kind = "zd";  // "zd" | "table"
  int d = 1;
  std::string norm = "linf";  // "linf" | "l1"
  std::string file;           // table-group JSON path
};

struct PotentialConfig {
  std::string kind = "countable_potts";  // | "single_site" | "pair_finite_range"
  double beta = 1.0;
  std::vector<double> values;  // single_site
  struct NeighborConfig {
    std::vector<std::int64_t> offset;
    std::vector<std::vector<double>> J;
  };
  std::vector<double> f0;                  // pair_finite_range
  std::vector<NeighborConfig> neighbors;   // pair_finite_range
  CountablePottsPotential::Params potts;   // countable_potts
};

struct PressureConfig {
  bool enabled = false;
  std::size_t alphabet = 4;    // prefix alphabet size used for truncation
  std::int64_t max_radius = 1;
  std::vector<std::size_t> ladder;
  bool countable = true;
};

struct KernelConfig {
  bool enabled = false;
  std::vector<std::vector<std::int64_t>> window;
  std::size_t alphabet = 2;
  Letter background = 0;
  std::vector<std::pair<std::vector<std::int64_t>, Letter>> overrides;
  std::vector<std::vector<std::int64_t>> consistency_sub;  // optional F subset
  std::vector<std::int64_t> invariance_shift;              // optional site g
  bool bowen_gibbs = false;
  Letter bowen_background = 0;
};

struct DobrushinConfig {
  bool enabled = false;
  std::vector<double> betas;
  std::int64_t grid_radius = 2;
  std::size_t trials = 32;
};

struct SampleConfig {
  bool enabled = false;
  std::vector<std::vector<std::int64_t>> window;  // explicit sites, or:
  std::int64_t window_radius = -1;                // Folner box radius
  std::size_t alphabet = 3;
  std::size_t sweeps = 200;
  std::size_t burn_in = 50;
};

struct ExperimentConfig {
  GroupConfig group;
  PotentialConfig potential;
  PressureConfig pressure;
  KernelConfig kernel;
  DobrushinConfig dobrushin;
  SampleConfig sample;
  std::string out;  // output file prefix; empty writes to stdout only
  std::uint64_t seed = 1;
  std::uint64_t budget = 2'000'000;
  std::string format = "json";  // "json" | "csv" | "both"
  int threads = 0;
};

// Strict TOML subset (tables, arrays of tables, dotted keys, strings, numbers,
// booleans, arrays, inline tables) lowered into a JSON tree; errors carry line
// numbers.
nlohmann::json parse_toml_subset(const std::string& text);

// Typed extraction with field-path diagnostics.
ExperimentConfig config_from_json(const nlohmann::json& j);

// Dispatches on extension: .toml via the subset parser, .json via nlohmann.
ExperimentConfig load_config(const std::string& path);

std::shared_ptr<const GroupContext> make_group(const GroupConfig& cfg);
std::unique_ptr<Potential> make_potential(std::shared_ptr<const GroupContext> ctx,
                                          const PotentialConfig& cfg);
// Validates arity/membership against the context.
Site site_from(const GroupContext& ctx, const std::vector<std::int64_t>& coords);
SiteSet site_set_from(const GroupContext& ctx,
                      const std::vector<std::vector<std::int64_t>>& coords);

}  // namespace gibbs
