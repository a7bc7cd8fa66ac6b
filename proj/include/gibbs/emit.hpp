#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "gibbs/interval.hpp"
#include "gibbs/pattern.hpp"
#include "gibbs/site.hpp"

namespace gibbs {

nlohmann::json interval_json(const Interval& iv);
nlohmann::json site_json(const Site& s);
nlohmann::json site_set_json(const SiteSet& s);
nlohmann::json pattern_json(const Pattern& p);

// Shortest exact decimal for a double ("%.17g"-grade round trip).
std::string format_double(double v);

// Flattens a JSON tree into deterministic "key,value" CSV rows: object keys
// joined with '.', array indices bracketed, leaves only.
std::string json_to_csv(const nlohmann::json& j);

void write_text(const std::string& path, const std::string& text);

}  // namespace gibbs
