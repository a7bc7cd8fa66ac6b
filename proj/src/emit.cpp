#include "gibbs/emit.hpp"

#include <cstdio>
#include <fstream>

#include "gibbs/errors.hpp"

namespace gibbs {

nlohmann::json interval_json(const Interval& iv) {
  return {{"lo", iv.lo}, {"hi", iv.hi}};
}

nlohmann::json site_json(const Site& s) { return nlohmann::json(s.v); }

nlohmann::json site_set_json(const SiteSet& s) {
  nlohmann::json arr = nlohmann::json::array();
  for (const Site& x : s) arr.push_back(site_json(x));
  return arr;
}

nlohmann::json pattern_json(const Pattern& p) {
  nlohmann::json arr = nlohmann::json::array();
  for (std::size_t i = 0; i < p.size(); ++i)
    arr.push_back({{"site", site_json(p.support()[i])},
                   {"letter", p.at_index(i)}});
  return arr;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

void flatten(const nlohmann::json& j, const std::string& prefix,
             std::string& out) {
  switch (j.type()) {
    case nlohmann::json::value_t::object:
      for (const auto& [k, v] : j.items())
        flatten(v, prefix.empty() ? k : prefix + "." + k, out);
      break;
    case nlohmann::json::value_t::array:
      for (std::size_t i = 0; i < j.size(); ++i)
        flatten(j[i], prefix + "[" + std::to_string(i) + "]", out);
      break;
    default: {
      out += prefix;
      out += ',';
      if (j.is_number_float())
        out += format_double(j.get<double>());
      else if (j.is_string())
        out += '"' + j.get<std::string>() + '"';
      else
        out += j.dump();
      out += '\n';
    }
  }
}

}  // namespace

std::string json_to_csv(const nlohmann::json& j) {
  std::string out = "key,value\n";
  flatten(j, "", out);
  return out;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ResourceError("cannot open output file: " + path);
  f << text;
  if (!f) throw ResourceError("failed writing output file: " + path);
}

}  // namespace gibbs
