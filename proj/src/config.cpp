#include "gibbs/config.hpp"

#include <cctype>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "gibbs/errors.hpp"

namespace gibbs {

namespace {

using nlohmann::json;

// ---------------------------------------------------------------------------
// TOML subset -> JSON tree
// ---------------------------------------------------------------------------

class TomlParser {
 public:
  explicit TomlParser(const std::string& text) : text_(text) {}

  json parse() {
    current_ = &root_;
    while (true) {
      skip_blank();
      if (eof()) break;
      if (peek() == '[')
        parse_header();
      else
        parse_key_value(*current_);
      expect_line_end();
    }
    return std::move(root_);
  }

 private:
  const std::string& text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  json root_ = json::object();
  json* current_ = nullptr;

  [[noreturn]] void fail(const std::string& msg) const {
    throw ConfigError("config line " + std::to_string(line_) + ": " + msg);
  }

  bool eof() const { return pos_ >= text_.size(); }
  char peek() const { return text_[pos_]; }
  char get() {
    const char c = text_[pos_++];
    if (c == '\n') ++line_;
    return c;
  }

  void skip_spaces() {
    while (!eof() && (peek() == ' ' || peek() == '\t')) ++pos_;
  }

  void skip_comment() {
    if (!eof() && peek() == '#')
      while (!eof() && peek() != '\n') ++pos_;
  }

  // Blank lines, comments and newlines between statements.
  void skip_blank() {
    while (!eof()) {
      skip_spaces();
      skip_comment();
      if (!eof() && peek() == '\n') {
        get();
        continue;
      }
      break;
    }
  }

  // Whitespace permitted inside arrays: spans newlines and comments.
  void skip_ws_multiline() {
    while (!eof()) {
      skip_spaces();
      skip_comment();
      if (!eof() && peek() == '\n') {
        get();
        continue;
      }
      break;
    }
  }

  void expect_line_end() {
    skip_spaces();
    skip_comment();
    if (eof()) return;
    if (peek() != '\n') fail("unexpected trailing characters");
    get();
  }

  static bool is_bare_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
  }

  std::string parse_basic_string() {
    if (get() != '"') fail("expected '\"'");
    std::string out;
    while (true) {
      if (eof()) fail("unterminated string");
      char c = get();
      if (c == '"') break;
      if (c == '\n') fail("newline inside string");
      if (c == '\\') {
        if (eof()) fail("dangling escape");
        const char e = get();
        switch (e) {
          case '"': out.push_back('"'); break;
          case '\\': out.push_back('\\'); break;
          case 'n': out.push_back('\n'); break;
          case 't': out.push_back('\t'); break;
          case 'r': out.push_back('\r'); break;
          default: fail("unsupported escape sequence");
        }
      } else {
        out.push_back(c);
      }
    }
    return out;
  }

  std::string parse_key_part() {
    skip_spaces();
    if (eof()) fail("expected a key");
    if (peek() == '"') return parse_basic_string();
    std::string out;
    while (!eof() && is_bare_char(peek())) out.push_back(get());
    if (out.empty()) fail("expected a key");
    return out;
  }

  std::vector<std::string> parse_dotted_key() {
    std::vector<std::string> keys{parse_key_part()};
    skip_spaces();
    while (!eof() && peek() == '.') {
      get();
      keys.push_back(parse_key_part());
      skip_spaces();
    }
    return keys;
  }

  // Walk/create nested objects; arrays of tables contribute their last
  // element, matching TOML's resolution rule.
  json* descend(json* node, const std::string& key) {
    if (node->is_array()) {
      if (node->empty()) fail("internal: empty table array");
      node = &node->back();
    }
    if (!node->is_object()) fail("key '" + key + "' addresses a non-table");
    json& slot = (*node)[key];
    if (slot.is_null()) slot = json::object();
    return &slot;
  }

  json* leaf_table(json* node) {
    if (node->is_array()) {
      if (node->empty()) fail("internal: empty table array");
      node = &node->back();
    }
    if (!node->is_object()) fail("a table was redefined as a value");
    return node;
  }

  void parse_header() {
    get();  // '['
    const bool array_of_tables = !eof() && peek() == '[';
    if (array_of_tables) get();
    const std::vector<std::string> keys = parse_dotted_key();
    skip_spaces();
    if (eof() || get() != ']') fail("expected ']' closing the table header");
    if (array_of_tables && (eof() || get() != ']'))
      fail("expected ']]' closing the table-array header");

    json* node = &root_;
    for (std::size_t i = 0; i + 1 < keys.size(); ++i) node = descend(node, keys[i]);
    node = leaf_table(node);
    json& slot = (*node)[keys.back()];
    if (array_of_tables) {
      if (slot.is_null()) slot = json::array();
      if (!slot.is_array()) fail("'" + keys.back() + "' is not a table array");
      slot.push_back(json::object());
      current_ = &slot.back();
    } else {
      if (slot.is_null()) slot = json::object();
      if (!slot.is_object()) fail("'" + keys.back() + "' is not a table");
      current_ = &slot;
    }
  }

  void parse_key_value(json& table) {
    const std::vector<std::string> keys = parse_dotted_key();
    skip_spaces();
    if (eof() || get() != '=') fail("expected '=' after key");
    skip_spaces();
    json value = parse_value();

    json* node = &table;
    for (std::size_t i = 0; i + 1 < keys.size(); ++i) node = descend(node, keys[i]);
    node = leaf_table(node);
    if (node->contains(keys.back())) fail("duplicate key '" + keys.back() + "'");
    (*node)[keys.back()] = std::move(value);
  }

  json parse_value() {
    if (eof()) fail("expected a value");
    const char c = peek();
    if (c == '"') return parse_basic_string();
    if (c == '[') return parse_array();
    if (c == '{') return parse_inline_table();
    if (std::isalpha(static_cast<unsigned char>(c))) return parse_boolean();
    return parse_number();
  }

  json parse_array() {
    get();  // '['
    json arr = json::array();
    skip_ws_multiline();
    if (!eof() && peek() == ']') {
      get();
      return arr;
    }
    while (true) {
      skip_ws_multiline();
      arr.push_back(parse_value());
      skip_ws_multiline();
      if (eof()) fail("unterminated array");
      const char d = get();
      if (d == ']') break;
      if (d != ',') fail("expected ',' or ']' in array");
      skip_ws_multiline();
      if (!eof() && peek() == ']') {  // trailing comma
        get();
        break;
      }
    }
    return arr;
  }

  json parse_inline_table() {
    get();  // '{'
    json obj = json::object();
    skip_spaces();
    if (!eof() && peek() == '}') {
      get();
      return obj;
    }
    while (true) {
      skip_spaces();
      parse_key_value(obj);
      skip_spaces();
      if (eof()) fail("unterminated inline table");
      const char d = get();
      if (d == '}') break;
      if (d != ',') fail("expected ',' or '}' in inline table");
    }
    return obj;
  }

  json parse_boolean() {
    std::string word;
    while (!eof() && std::isalpha(static_cast<unsigned char>(peek())))
      word.push_back(get());
    if (word == "true") return true;
    if (word == "false") return false;
    fail("unsupported value '" + word + "'");
  }

  json parse_number() {
    std::string tok;
    while (!eof()) {
      const char c = peek();
      if (std::isdigit(static_cast<unsigned char>(c)) || c == '+' || c == '-' ||
          c == '.' || c == 'e' || c == 'E') {
        tok.push_back(get());
      } else {
        break;
      }
    }
    if (tok.empty()) fail("expected a number");
    const bool is_float = tok.find_first_of(".eE") != std::string::npos;
    try {
      std::size_t used = 0;
      if (is_float) {
        const double v = std::stod(tok, &used);
        if (used != tok.size()) fail("malformed number '" + tok + "'");
        return v;
      }
      const std::int64_t v = static_cast<std::int64_t>(std::stoll(tok, &used));
      if (used != tok.size()) fail("malformed number '" + tok + "'");
      return v;
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception&) {
      fail("malformed number '" + tok + "'");
    }
  }
};

// ---------------------------------------------------------------------------
// Typed extraction with field-path diagnostics
// ---------------------------------------------------------------------------

[[noreturn]] void fail_at(const std::string& path, const std::string& what) {
  throw ConfigError("config field '" + path + "': " + what);
}

std::string join(const std::string& a, const std::string& b) {
  return a.empty() ? b : a + "." + b;
}

const json* find(const json& j, const std::string& key) {
  if (!j.is_object()) return nullptr;
  const auto it = j.find(key);
  return it == j.end() ? nullptr : &*it;
}

std::string get_string(const json& j, const std::string& path,
                       const std::string& key, const std::string& def) {
  const json* v = find(j, key);
  if (!v) return def;
  if (!v->is_string()) fail_at(join(path, key), "expected a string");
  return v->get<std::string>();
}

double get_double(const json& j, const std::string& path, const std::string& key,
                  double def) {
  const json* v = find(j, key);
  if (!v) return def;
  if (!v->is_number()) fail_at(join(path, key), "expected a number");
  return v->get<double>();
}

std::int64_t get_int(const json& j, const std::string& path,
                     const std::string& key, std::int64_t def) {
  const json* v = find(j, key);
  if (!v) return def;
  if (!v->is_number_integer()) fail_at(join(path, key), "expected an integer");
  return v->get<std::int64_t>();
}

bool get_bool(const json& j, const std::string& path, const std::string& key,
              bool def) {
  const json* v = find(j, key);
  if (!v) return def;
  if (!v->is_boolean()) fail_at(join(path, key), "expected a boolean");
  return v->get<bool>();
}

Letter get_letter(const json& j, const std::string& path, const std::string& key,
                  Letter def) {
  const std::int64_t v = get_int(j, path, key, static_cast<std::int64_t>(def));
  if (v < 0 || v > 0xffffffffll) fail_at(join(path, key), "letter out of range");
  return static_cast<Letter>(v);
}

std::vector<double> get_double_array(const json& j, const std::string& path,
                                     const std::string& key, bool required) {
  const json* v = find(j, key);
  if (!v) {
    if (required) fail_at(join(path, key), "required array is missing");
    return {};
  }
  if (!v->is_array()) fail_at(join(path, key), "expected an array of numbers");
  std::vector<double> out;
  for (const json& e : *v) {
    if (!e.is_number()) fail_at(join(path, key), "expected an array of numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

std::vector<std::int64_t> get_int_array(const json& j, const std::string& path,
                                        const std::string& key, bool required) {
  const json* v = find(j, key);
  if (!v) {
    if (required) fail_at(join(path, key), "required array is missing");
    return {};
  }
  if (!v->is_array()) fail_at(join(path, key), "expected an array of integers");
  std::vector<std::int64_t> out;
  for (const json& e : *v) {
    if (!e.is_number_integer())
      fail_at(join(path, key), "expected an array of integers");
    out.push_back(e.get<std::int64_t>());
  }
  return out;
}

std::vector<std::int64_t> int_array_of(const json& v, const std::string& path) {
  if (!v.is_array()) fail_at(path, "expected an array of integers");
  std::vector<std::int64_t> out;
  for (const json& e : v) {
    if (!e.is_number_integer()) fail_at(path, "expected an array of integers");
    out.push_back(e.get<std::int64_t>());
  }
  return out;
}

std::vector<std::vector<std::int64_t>> get_site_list(const json& j,
                                                     const std::string& path,
                                                     const std::string& key,
                                                     bool required) {
  const json* v = find(j, key);
  if (!v) {
    if (required) fail_at(join(path, key), "required site list is missing");
    return {};
  }
  if (!v->is_array()) fail_at(join(path, key), "expected a list of sites");
  std::vector<std::vector<std::int64_t>> out;
  for (std::size_t i = 0; i < v->size(); ++i)
    out.push_back(int_array_of((*v)[i], join(path, key) + "[" + std::to_string(i) + "]"));
  return out;
}

GroupConfig parse_group(const json& j) {
  GroupConfig g;
  const json* sec = find(j, "group");
  if (!sec) return g;
  g.kind = get_string(*sec, "group", "kind", g.kind);
  if (g.kind != "zd" && g.kind != "table")
    fail_at("group.kind", "expected \"zd\" or \"table\"");
  g.d = static_cast<int>(get_int(*sec, "group", "d", g.d));
  g.norm = get_string(*sec, "group", "norm", g.norm);
  if (g.norm != "linf" && g.norm != "l1")
    fail_at("group.norm", "expected \"linf\" or \"l1\"");
  g.file = get_string(*sec, "group", "file", g.file);
  if (g.kind == "table" && g.file.empty())
    fail_at("group.file", "table groups need a table file");
  return g;
}

PotentialConfig parse_potential(const json& j) {
  PotentialConfig p;
  const json* sec = find(j, "potential");
  if (!sec) fail_at("potential", "section is required");
  p.kind = get_string(*sec, "potential", "kind", p.kind);
  p.beta = get_double(*sec, "potential", "beta", p.beta);
  const json* params = find(*sec, "params");
  const json empty = json::object();
  if (!params) params = &empty;
  const std::string pp = "potential.params";

  if (p.kind == "single_site") {
    p.values = get_double_array(*params, pp, "values", /*required=*/true);
  } else if (p.kind == "pair_finite_range") {
    p.f0 = get_double_array(*params, pp, "f0", /*required=*/true);
    const json* nb = find(*params, "neighbors");
    if (!nb || !nb->is_array())
      fail_at(pp + ".neighbors", "required array is missing");
    for (std::size_t i = 0; i < nb->size(); ++i) {
      const std::string np = pp + ".neighbors[" + std::to_string(i) + "]";
      const json& e = (*nb)[i];
      if (!e.is_object()) fail_at(np, "expected a table");
      PotentialConfig::NeighborConfig n;
      const json* off = find(e, "offset");
      if (!off) fail_at(np + ".offset", "required array is missing");
      n.offset = int_array_of(*off, np + ".offset");
      const json* jm = find(e, "J");
      if (!jm || !jm->is_array()) fail_at(np + ".J", "required matrix is missing");
      for (std::size_t r = 0; r < jm->size(); ++r) {
        const json& row = (*jm)[r];
        if (!row.is_array()) fail_at(np + ".J", "expected a matrix");
        std::vector<double> rv;
        for (const json& x : row) {
          if (!x.is_number()) fail_at(np + ".J", "expected a numeric matrix");
          rv.push_back(x.get<double>());
        }
        n.J.push_back(std::move(rv));
      }
      p.neighbors.push_back(std::move(n));
    }
  } else if (p.kind == "countable_potts") {
    using Potts = CountablePottsPotential;
    const std::string cf = get_string(*params, pp, "cost_form", "linear");
    if (cf == "linear")
      p.potts.cost_form = Potts::CostForm::linear;
    else if (cf == "logarithmic")
      p.potts.cost_form = Potts::CostForm::logarithmic;
    else
      fail_at(pp + ".cost_form", "expected \"linear\" or \"logarithmic\"");
    p.potts.cost_coef = get_double(*params, pp, "cost_coef", p.potts.cost_coef);
    const std::string qf = get_string(*params, pp, "coupling_form", "geometric");
    if (qf == "zero")
      p.potts.coupling_form = Potts::CouplingForm::zero;
    else if (qf == "geometric")
      p.potts.coupling_form = Potts::CouplingForm::geometric;
    else
      fail_at(pp + ".coupling_form", "expected \"zero\" or \"geometric\"");
    p.potts.amplitude = get_double(*params, pp, "amplitude", p.potts.amplitude);
    p.potts.lambda = get_double(*params, pp, "lambda", p.potts.lambda);
  } else {
    fail_at("potential.kind",
            "expected \"single_site\", \"pair_finite_range\" or \"countable_potts\"");
  }
  return p;
}

}  // namespace

nlohmann::json parse_toml_subset(const std::string& text) {
  return TomlParser(text).parse();
}

ExperimentConfig config_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("config root must be a table");
  ExperimentConfig cfg;
  cfg.group = parse_group(j);
  cfg.potential = parse_potential(j);

  cfg.out = get_string(j, "", "out", cfg.out);
  const std::int64_t seed = get_int(j, "", "seed", static_cast<std::int64_t>(cfg.seed));
  if (seed < 0) fail_at("seed", "expected a non-negative integer");
  cfg.seed = static_cast<std::uint64_t>(seed);
  const std::int64_t budget =
      get_int(j, "", "budget", static_cast<std::int64_t>(cfg.budget));
  if (budget < 1) fail_at("budget", "expected a positive integer");
  cfg.budget = static_cast<std::uint64_t>(budget);
  cfg.format = get_string(j, "", "format", cfg.format);
  if (cfg.format != "json" && cfg.format != "csv" && cfg.format != "both")
    fail_at("format", "expected \"json\", \"csv\" or \"both\"");
  cfg.threads = static_cast<int>(get_int(j, "", "threads", cfg.threads));

  if (const json* sec = find(j, "pressure")) {
    PressureConfig& p = cfg.pressure;
    p.enabled = get_bool(*sec, "pressure", "enabled", true);
    const std::int64_t a = get_int(*sec, "pressure", "alphabet",
                                   static_cast<std::int64_t>(p.alphabet));
    if (a < 1) fail_at("pressure.alphabet", "expected a positive size");
    p.alphabet = static_cast<std::size_t>(a);
    p.max_radius = get_int(*sec, "pressure", "max_radius", p.max_radius);
    if (p.max_radius < 0) fail_at("pressure.max_radius", "expected >= 0");
    for (std::int64_t v : get_int_array(*sec, "pressure", "ladder", false)) {
      if (v < 1) fail_at("pressure.ladder", "ladder sizes must be positive");
      p.ladder.push_back(static_cast<std::size_t>(v));
    }
    p.countable = get_bool(*sec, "pressure", "countable", p.countable);
  }

  if (const json* sec = find(j, "kernel")) {
    KernelConfig& k = cfg.kernel;
    k.enabled = get_bool(*sec, "kernel", "enabled", true);
    k.window = get_site_list(*sec, "kernel", "window", /*required=*/true);
    const std::int64_t a =
        get_int(*sec, "kernel", "alphabet", static_cast<std::int64_t>(k.alphabet));
    if (a < 1) fail_at("kernel.alphabet", "expected a positive size");
    k.alphabet = static_cast<std::size_t>(a);
    k.background = get_letter(*sec, "kernel", "background", k.background);
    if (const json* ov = find(*sec, "overrides")) {
      if (!ov->is_array()) fail_at("kernel.overrides", "expected a list");
      for (std::size_t i = 0; i < ov->size(); ++i) {
        const std::string op = "kernel.overrides[" + std::to_string(i) + "]";
        const json& e = (*ov)[i];
        if (!e.is_object()) fail_at(op, "expected {site = [...], letter = n}");
        const json* st = find(e, "site");
        if (!st) fail_at(op + ".site", "required");
        k.overrides.emplace_back(int_array_of(*st, op + ".site"),
                                 get_letter(e, op, "letter", 0));
      }
    }
    k.consistency_sub = get_site_list(*sec, "kernel", "consistency_sub", false);
    k.invariance_shift = get_int_array(*sec, "kernel", "invariance_shift", false);
    k.bowen_gibbs = get_bool(*sec, "kernel", "bowen_gibbs", false);
    k.bowen_background =
        get_letter(*sec, "kernel", "bowen_background", k.background);
  }

  if (const json* sec = find(j, "dobrushin")) {
    DobrushinConfig& d = cfg.dobrushin;
    d.enabled = get_bool(*sec, "dobrushin", "enabled", true);
    d.betas = get_double_array(*sec, "dobrushin", "betas", false);
    d.grid_radius = get_int(*sec, "dobrushin", "grid_radius", d.grid_radius);
    if (d.grid_radius < 0) fail_at("dobrushin.grid_radius", "expected >= 0");
    const std::int64_t t = get_int(*sec, "dobrushin", "trials",
                                   static_cast<std::int64_t>(d.trials));
    if (t < 0) fail_at("dobrushin.trials", "expected >= 0");
    d.trials = static_cast<std::size_t>(t);
  }

  if (const json* sec = find(j, "sample")) {
    SampleConfig& s = cfg.sample;
    s.enabled = get_bool(*sec, "sample", "enabled", true);
    s.window = get_site_list(*sec, "sample", "window", false);
    s.window_radius = get_int(*sec, "sample", "window_radius", s.window_radius);
    if (s.window.empty() && s.window_radius < 0)
      fail_at("sample.window", "need either explicit sites or window_radius");
    const std::int64_t a =
        get_int(*sec, "sample", "alphabet", static_cast<std::int64_t>(s.alphabet));
    if (a < 1) fail_at("sample.alphabet", "expected a positive size");
    s.alphabet = static_cast<std::size_t>(a);
    const std::int64_t sw =
        get_int(*sec, "sample", "sweeps", static_cast<std::int64_t>(s.sweeps));
    if (sw < 1) fail_at("sample.sweeps", "expected >= 1");
    s.sweeps = static_cast<std::size_t>(sw);
    const std::int64_t bi =
        get_int(*sec, "sample", "burn_in", static_cast<std::int64_t>(s.burn_in));
    if (bi < 0) fail_at("sample.burn_in", "expected >= 0");
    s.burn_in = static_cast<std::size_t>(bi);
  }

  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();

  json tree;
  if (path.size() >= 5 && path.substr(path.size() - 5) == ".json") {
    tree = json::parse(text, nullptr, /*allow_exceptions=*/false);
    if (tree.is_discarded())
      throw ConfigError("malformed JSON in config file: " + path);
  } else {
    tree = parse_toml_subset(text);
  }
  ExperimentConfig cfg = config_from_json(tree);
  // Auxiliary files are named relative to the config that mentions them, so
  // loading works from any working directory.
  if (!cfg.group.file.empty()) {
    const std::filesystem::path f(cfg.group.file);
    if (f.is_relative())
      cfg.group.file = (std::filesystem::path(path).parent_path() / f).string();
  }
  return cfg;
}

std::shared_ptr<const GroupContext> make_group(const GroupConfig& cfg) {
  if (cfg.kind == "zd") {
    if (cfg.d < 1 || cfg.d > 6)
      throw ConfigError("config field 'group.d': expected 1 <= d <= 6");
    return make_lattice(cfg.d,
                        cfg.norm == "l1" ? LatticeNorm::l1 : LatticeNorm::linf);
  }
  return TableGroup::load(cfg.file);
}

std::unique_ptr<Potential> make_potential(std::shared_ptr<const GroupContext> ctx,
                                          const PotentialConfig& cfg) {
  if (cfg.kind == "single_site")
    return std::make_unique<SingleSitePotential>(std::move(ctx), cfg.beta,
                                                 cfg.values);
  if (cfg.kind == "pair_finite_range") {
    std::vector<PairPotential::Neighbor> neighbors;
    for (const auto& n : cfg.neighbors)
      neighbors.push_back({Site{n.offset}, n.J});
    return std::make_unique<PairPotential>(std::move(ctx), cfg.beta, cfg.f0,
                                           std::move(neighbors));
  }
  return std::make_unique<CountablePottsPotential>(std::move(ctx), cfg.beta,
                                                   cfg.potts);
}

Site site_from(const GroupContext& ctx, const std::vector<std::int64_t>& coords) {
  Site s{coords};
  ctx.check_site(s);
  return s;
}

SiteSet site_set_from(const GroupContext& ctx,
                      const std::vector<std::vector<std::int64_t>>& coords) {
  SiteSet out;
  for (const auto& c : coords) out.insert(site_from(ctx, c));
  return out;
}

}  // namespace gibbs
