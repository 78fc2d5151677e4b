#include "resolvlab/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "resolvlab/expr.hpp"

namespace resolvlab::expcli {

namespace {

const std::vector<FcalcFunction>& fcalc_registry() {
  static const std::vector<FcalcFunction> registry = {
      {"inv_quad", [](double t) { return cxd(1.0 / (1.0 + t * t), 0.0); }, true},
      {"lin_quad", [](double t) { return cxd(t / (1.0 + t * t), 0.0); }, true},
      {"gauss", [](double t) { return cxd(std::exp(-t * t), 0.0); }, true},
      {"res_i", [](double t) { return 1.0 / (cxd(t, 0.0) - cxd(0.0, 1.0)); }, true},
      {"atan", [](double t) { return cxd(std::atan(t), 0.0); }, false},
  };
  return registry;
}

struct ConfigValue {
  enum class Type { Number, Text, List };
  Type type = Type::Text;
  double number = 0.0;
  std::string text;
  std::vector<ConfigValue> items;
  int line = 0;
};

std::string trim(const std::string& s) {
  std::size_t lo = 0, hi = s.size();
  while (lo < hi && std::isspace(static_cast<unsigned char>(s[lo]))) ++lo;
  while (hi > lo && std::isspace(static_cast<unsigned char>(s[hi - 1]))) --hi;
  return s.substr(lo, hi - lo);
}

[[noreturn]] void parse_fail(const std::string& origin, int line, const std::string& msg) {
  throw Error(ErrorKind::ParseError, origin + ":" + std::to_string(line) + ": " + msg);
}

ConfigValue parse_value(const std::string& origin, int line, const std::string& raw) {
  const std::string s = trim(raw);
  if (s.empty()) parse_fail(origin, line, "empty value");
  ConfigValue v;
  v.line = line;
  if (s.front() == '[') {
    if (s.back() != ']') parse_fail(origin, line, "unterminated list");
    v.type = ConfigValue::Type::List;
    const std::string body = s.substr(1, s.size() - 2);
    int depth = 0;
    std::string current;
    auto flush = [&]() {
      const std::string item = trim(current);
      if (item.empty()) parse_fail(origin, line, "empty list element");
      v.items.push_back(parse_value(origin, line, item));
      current.clear();
    };
    for (char c : body) {
      if (c == '[') ++depth;
      if (c == ']') --depth;
      if (c == ',' && depth == 0) {
        flush();
        continue;
      }
      current += c;
    }
    if (!trim(current).empty()) flush();
    else if (!v.items.empty()) parse_fail(origin, line, "trailing comma in list");
    return v;
  }
  char* end = nullptr;
  const double num = std::strtod(s.c_str(), &end);
  if (end == s.c_str() + s.size()) {
    v.type = ConfigValue::Type::Number;
    v.number = num;
    return v;
  }
  v.type = ConfigValue::Type::Text;
  v.text = s;
  return v;
}

using ConfigMap = std::map<std::string, ConfigValue>;

ConfigMap parse_config(const std::string& text, const std::string& origin) {
  ConfigMap out;
  std::istringstream stream(text);
  std::string raw;
  int line = 0;
  while (std::getline(stream, raw)) {
    ++line;
    const std::size_t hash = raw.find('#');
    if (hash != std::string::npos) raw = raw.substr(0, hash);
    const std::string s = trim(raw);
    if (s.empty()) continue;
    if (s.front() == '[' && s.find('=') == std::string::npos) {
      // cosmetic section header; the key space stays flat
      if (s.back() != ']') parse_fail(origin, line, "malformed section header");
      continue;
    }
    const std::size_t eq = s.find('=');
    if (eq == std::string::npos) parse_fail(origin, line, "expected key = value");
    const std::string key = trim(s.substr(0, eq));
    if (key.empty()) parse_fail(origin, line, "empty key");
    for (char c : key)
      if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_')
        parse_fail(origin, line, "invalid key '" + key + "'");
    if (out.count(key))
      throw Error(ErrorKind::SchemaError, "duplicate key '" + key + "'");
    out.emplace(key, parse_value(origin, line, s.substr(eq + 1)));
  }
  return out;
}

[[noreturn]] void schema_fail(const std::string& key, const std::string& reason) {
  throw Error(ErrorKind::SchemaError, "key '" + key + "': " + reason);
}

class Schema {
 public:
  Schema(ConfigMap map, std::string origin) : map_(std::move(map)), origin_(std::move(origin)) {}

  bool has(const std::string& key) const { return map_.count(key) > 0; }

  const ConfigValue& get(const std::string& key) {
    auto it = map_.find(key);
    if (it == map_.end()) schema_fail(key, "required key missing");
    return it->second;
  }

  double number(const std::string& key) {
    const ConfigValue& v = get(key);
    if (v.type != ConfigValue::Type::Number) schema_fail(key, "expected a number");
    return v.number;
  }

  double number_or(const std::string& key, double fallback) {
    return has(key) ? number(key) : fallback;
  }

  long integer(const std::string& key) {
    const double v = number(key);
    if (v != std::floor(v)) schema_fail(key, "expected an integer");
    return static_cast<long>(v);
  }

  std::string text(const std::string& key) {
    const ConfigValue& v = get(key);
    if (v.type != ConfigValue::Type::Text) schema_fail(key, "expected text");
    return v.text;
  }

  std::string expression_text(const std::string& key) {
    const ConfigValue& v = get(key);
    if (v.type == ConfigValue::Type::Number) {
      std::ostringstream os;
      os.precision(17);
      os << v.number;
      return os.str();
    }
    if (v.type != ConfigValue::Type::Text) schema_fail(key, "expected an expression");
    return v.text;
  }

  std::vector<double> number_list(const std::string& key) {
    const ConfigValue& v = get(key);
    if (v.type != ConfigValue::Type::List) schema_fail(key, "expected a list");
    std::vector<double> out;
    for (const ConfigValue& item : v.items) {
      if (item.type != ConfigValue::Type::Number) schema_fail(key, "expected numeric entries");
      out.push_back(item.number);
    }
    return out;
  }

  std::vector<std::string> text_list(const std::string& key) {
    const ConfigValue& v = get(key);
    if (v.type != ConfigValue::Type::List) schema_fail(key, "expected a list");
    std::vector<std::string> out;
    for (const ConfigValue& item : v.items) {
      if (item.type != ConfigValue::Type::Text) schema_fail(key, "expected name entries");
      out.push_back(item.text);
    }
    return out;
  }

  std::vector<cxd> complex_list(const std::string& key) {
    const ConfigValue& v = get(key);
    if (v.type != ConfigValue::Type::List) schema_fail(key, "expected a list");
    std::vector<cxd> out;
    for (const ConfigValue& item : v.items) {
      if (item.type != ConfigValue::Type::List || item.items.size() != 2 ||
          item.items[0].type != ConfigValue::Type::Number ||
          item.items[1].type != ConfigValue::Type::Number)
        schema_fail(key, "complex entries must be [re, im] pairs");
      out.emplace_back(item.items[0].number, item.items[1].number);
    }
    return out;
  }

  void reject_unknown(const std::set<std::string>& known,
                      const std::vector<std::string>& prefixes) const {
    for (const auto& [key, value] : map_) {
      if (known.count(key)) continue;
      bool prefixed = false;
      for (const std::string& p : prefixes)
        if (key.rfind(p, 0) == 0) prefixed = true;
      if (!prefixed) schema_fail(key, "unknown key");
    }
  }

  const ConfigMap& map() const { return map_; }
  const std::string& origin() const { return origin_; }

 private:
  ConfigMap map_;
  std::string origin_;
};

expr::Expression parse_expr(Schema& schema, const std::string& key) {
  const std::string text = schema.expression_text(key);
  try {
    return expr::Expression::parse(text);
  } catch (const Error& e) {
    throw Error(ErrorKind::ParseError, "key '" + key + "': " + e.what());
  }
}

sturm::ScalarField bind_limit(const expr::Expression& e) {
  if (e.uses_n())
    throw Error(ErrorKind::SchemaError,
                "limit coefficient '" + e.text() + "' must not reference n");
  return [e](double x) { return e.eval(x, 0.0); };
}

sturm::ScalarField bind_member(const expr::Expression& e, int n) {
  const double nn = static_cast<double>(n);
  return [e, nn](double x) { return e.eval(x, nn); };
}

}  // namespace

const FcalcFunction& fcalc_function(const std::string& name) {
  for (const FcalcFunction& f : fcalc_registry())
    if (f.name == name) return f;
  throw Error(ErrorKind::SchemaError, "unknown fcalc function '" + name + "'");
}

std::vector<std::string> fcalc_function_names() {
  std::vector<std::string> out;
  for (const FcalcFunction& f : fcalc_registry()) out.push_back(f.name);
  return out;
}

std::vector<std::string> Scenario::columns() const {
  std::vector<std::string> cols = {"n",     "dim",           "j_norm", "jstarj_defect",
                                   "jjstar_defect", "nrc_i", "nrc_alt_i", "src_max"};
  for (const std::string& f : fcalc_names) cols.push_back("fcalc_" + f);
  for (const char* c : {"hausdorff", "relbound_cert", "form_delta", "min_eig_A",
                        "min_eig_An", "runtime_ms"})
    cols.emplace_back(c);
  return cols;
}

Scenario scenario_from_text(const std::string& text, const std::string& origin) {
  Schema schema(parse_config(text, origin), origin);

  static const std::set<std::string> known = {
      "name", "kind", "interval", "m", "ns", "seed", "z_list", "window", "proj_window",
      "proj_rank_from", "delta", "gamma", "fcalc", "times_heat", "times_unitary",
      "qfree_slack", "relbound_slack", "equiv_slack", "sandwich_slack", "sandwich_lambda",
      "w", "p", "q", "w_n", "p_n", "q_n",
      "w0", "p0", "q0", "winf", "pinf", "qinf",
      "verdict_decreasing", "verdict_trend_decreasing"};
  schema.reject_unknown(known, {"verdict_slope_", "verdict_final_ratio_", "verdict_final_below_"});

  Scenario s;
  s.name = schema.text("name");
  const std::string kind = schema.text("kind");
  if (kind == "slnrc") s.kind = sturm::FamilyKind::Slnrc;
  else if (kind == "compact_cutoff") s.kind = sturm::FamilyKind::CompactCutoff;
  else if (kind == "custom_pair") s.kind = sturm::FamilyKind::CustomPair;
  else schema_fail("kind", "must be slnrc, compact_cutoff or custom_pair");

  const std::vector<double> interval = schema.number_list("interval");
  if (interval.size() != 2 || !(interval[0] < interval[1]))
    schema_fail("interval", "expected [a, b] with a < b");
  s.a = interval[0];
  s.b = interval[1];

  const long m = schema.integer("m");
  if (m < 8) schema_fail("m", "m must be at least 8");
  s.m = static_cast<std::size_t>(m);

  const std::vector<double> ns = schema.number_list("ns");
  if (ns.empty()) schema_fail("ns", "must be nonempty");
  for (double v : ns) {
    if (v != std::floor(v) || v < 1) schema_fail("ns", "entries must be positive integers");
    s.ns.push_back(static_cast<int>(v));
  }
  for (std::size_t i = 0; i + 1 < s.ns.size(); ++i)
    if (s.ns[i] >= s.ns[i + 1]) schema_fail("ns", "entries must be strictly ascending");

  if (schema.has("seed")) {
    const long seed = schema.integer("seed");
    if (seed < 0) schema_fail("seed", "must be nonnegative");
    s.seed = static_cast<std::uint64_t>(seed);
  }

  s.z_list = schema.has("z_list") ? schema.complex_list("z_list")
                                  : std::vector<cxd>{cxd(0.0, 1.0)};
  if (s.z_list.empty()) schema_fail("z_list", "must be nonempty");
  for (cxd z : s.z_list)
    if (z.imag() == 0.0) schema_fail("z_list", "audit parameters must be non-real");

  const std::vector<double> window = schema.number_list("window");
  if (window.size() != 2 || !(window[0] < window[1]))
    schema_fail("window", "expected [lo, hi] with lo < hi");
  s.window = selfadj::SpectrumWindow{window[0], window[1], 0.0};

  if (schema.has("proj_window")) {
    const std::vector<double> pw = schema.number_list("proj_window");
    if (pw.size() != 2 || !(pw[0] < pw[1]))
      schema_fail("proj_window", "expected [lo, hi] with lo < hi");
    s.proj_window = selfadj::SpectrumWindow{pw[0], pw[1], 0.0};
  }
  s.proj_rank_from = static_cast<int>(schema.has("proj_rank_from")
                                          ? schema.integer("proj_rank_from")
                                          : (s.ns.empty() ? 1 : s.ns.front()));

  s.delta = schema.number("delta");
  if (!(s.delta > 0.0)) schema_fail("delta", "must be positive");
  s.gamma = schema.number("gamma");

  s.fcalc_names = schema.has("fcalc")
                      ? schema.text_list("fcalc")
                      : std::vector<std::string>{"inv_quad", "lin_quad", "gauss", "atan"};
  for (const std::string& f : s.fcalc_names) fcalc_function(f);   // SchemaError if unknown

  s.times_heat = schema.has("times_heat") ? schema.number_list("times_heat")
                                          : std::vector<double>{1.0};
  for (double t : s.times_heat)
    if (t < 0.0) schema_fail("times_heat", "heat times must be nonnegative");
  s.times_unitary = schema.has("times_unitary") ? schema.number_list("times_unitary")
                                                : std::vector<double>{0.7};

  s.qfree_slack = schema.number_or("qfree_slack", 0.05);
  s.relbound_slack = schema.number_or("relbound_slack", 1e-10);
  s.equiv_slack = schema.number_or("equiv_slack", 1e-9);
  s.sandwich_slack = schema.number_or("sandwich_slack", 1e-8);
  s.sandwich_lambda = schema.number_or("sandwich_lambda", 1.0 - s.gamma);
  if (!(s.sandwich_lambda > -s.gamma))
    schema_fail("sandwich_lambda", "must exceed -gamma");

  // coefficient expressions -> family
  const wspace::Grid grid(s.a, s.b, s.m);
  if (s.kind == sturm::FamilyKind::CompactCutoff) {
    sturm::Coefficients c0{bind_limit(parse_expr(schema, "w0")), bind_limit(parse_expr(schema, "p0")),
                           bind_limit(parse_expr(schema, "q0")), s.delta, s.gamma};
    sturm::Coefficients cinf{bind_limit(parse_expr(schema, "winf")),
                             bind_limit(parse_expr(schema, "pinf")),
                             bind_limit(parse_expr(schema, "qinf")), s.delta, s.gamma};
    s.family = std::make_shared<sturm::CoefficientFamily>(
        sturm::compact_cutoff_family(grid, std::move(c0), std::move(cinf), s.ns));
  } else {
    sturm::Coefficients limit{bind_limit(parse_expr(schema, "w")), bind_limit(parse_expr(schema, "p")),
                              bind_limit(parse_expr(schema, "q")), s.delta, s.gamma};
    const expr::Expression wn = parse_expr(schema, "w_n");
    const expr::Expression pn = parse_expr(schema, "p_n");
    const expr::Expression qn = parse_expr(schema, "q_n");
    const double delta = s.delta, gamma = s.gamma;
    auto schedule = [wn, pn, qn, delta, gamma](int n) {
      return sturm::Coefficients{bind_member(wn, n), bind_member(pn, n), bind_member(qn, n),
                                 delta, gamma};
    };
    s.family = std::make_shared<sturm::CoefficientFamily>(
        sturm::slnrc_family(grid, std::move(limit), schedule, s.ns, s.kind));
  }

  // verdict configuration; every referenced column must exist
  const std::vector<std::string> cols = s.columns();
  const std::set<std::string> colset(cols.begin(), cols.end());
  auto require_column = [&](const std::string& key, const std::string& col) {
    if (!colset.count(col)) schema_fail(key, "references unknown column '" + col + "'");
  };
  if (schema.has("verdict_decreasing")) {
    s.verdicts.decreasing = schema.text_list("verdict_decreasing");
    for (const std::string& c : s.verdicts.decreasing) require_column("verdict_decreasing", c);
  }
  if (schema.has("verdict_trend_decreasing")) {
    s.verdicts.trend_decreasing = schema.text_list("verdict_trend_decreasing");
    for (const std::string& c : s.verdicts.trend_decreasing)
      require_column("verdict_trend_decreasing", c);
  }
  for (const auto& [key, value] : schema.map()) {
    if (key.rfind("verdict_slope_", 0) == 0) {
      const std::string col = key.substr(std::string("verdict_slope_").size());
      require_column(key, col);
      const std::vector<double> range = schema.number_list(key);
      if (range.size() != 2 || !(range[0] < range[1]))
        schema_fail(key, "expected [lo, hi] with lo < hi");
      s.verdicts.slope[col] = {range[0], range[1]};
    } else if (key.rfind("verdict_final_ratio_", 0) == 0) {
      const std::string col = key.substr(std::string("verdict_final_ratio_").size());
      require_column(key, col);
      s.verdicts.final_ratio[col] = schema.number(key);
    } else if (key.rfind("verdict_final_below_", 0) == 0) {
      const std::string col = key.substr(std::string("verdict_final_below_").size());
      require_column(key, col);
      s.verdicts.final_below[col] = schema.number(key);
    }
  }
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot open scenario file '" + path + "'");
  std::ostringstream body;
  body << in.rdbuf();
  return scenario_from_text(body.str(), path);
}

}  // namespace resolvlab::expcli
