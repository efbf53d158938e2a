#include "halfcell/config.hpp"

#include <fstream>
#include <sstream>

namespace halfcell {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::string unquote(const std::string& s) {
  if (s.size() >= 2 && ((s.front() == '"' && s.back() == '"') ||
                        (s.front() == '\'' && s.back() == '\'')))
    return s.substr(1, s.size() - 2);
  return s;
}

}  // namespace

RunConfig RunConfig::parse_text(const std::string& text) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line, section = "problem";
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    // strip comments outside quotes
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      char c = line[i];
      if (c == '"' || c == '\'') quoted = !quoted;
      if (!quoted && (c == '#' || c == ';')) {
        line = line.substr(0, i);
        break;
      }
    }
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("line " + std::to_string(lineno) + ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      cfg.sections[section];
      continue;
    }
    std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string value = unquote(trim(line.substr(eq + 1)));
    if (key.empty())
      throw ConfigError("line " + std::to_string(lineno) + ": empty key");
    cfg.sections[section][key] = value;
  }
  return cfg;
}

RunConfig RunConfig::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_text(ss.str());
}

bool RunConfig::has(const std::string& section, const std::string& key) const {
  auto s = sections.find(section);
  return s != sections.end() && s->second.count(key) > 0;
}

std::string RunConfig::get(const std::string& section, const std::string& key,
                           const std::string& fallback) const {
  auto s = sections.find(section);
  if (s == sections.end()) return fallback;
  auto k = s->second.find(key);
  return k == s->second.end() ? fallback : k->second;
}

std::string RunConfig::require(const std::string& section, const std::string& key) const {
  if (!has(section, key))
    throw ConfigError("missing required key [" + section + "] " + key);
  return get(section, key);
}

double RunConfig::get_double(const std::string& section, const std::string& key,
                             double fallback) const {
  if (!has(section, key)) return fallback;
  const std::string v = get(section, key);
  try {
    std::size_t pos = 0;
    double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("[" + section + "] " + key + ": not a number: " + v);
  }
}

int RunConfig::get_int(const std::string& section, const std::string& key,
                       int fallback) const {
  double d = get_double(section, key, fallback);
  int i = static_cast<int>(d);
  if (static_cast<double>(i) != d)
    throw ConfigError("[" + section + "] " + key + ": not an integer");
  return i;
}

std::vector<double> RunConfig::get_list(const std::string& section, const std::string& key,
                                        const std::vector<double>& fallback) const {
  if (!has(section, key)) return fallback;
  std::vector<double> out;
  std::stringstream ss(get(section, key));
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw ConfigError("[" + section + "] " + key + ": bad list entry: " + item);
    }
  }
  if (out.empty()) throw ConfigError("[" + section + "] " + key + ": empty list");
  return out;
}

Expr RunConfig::get_expr(const std::string& section, const std::string& key) const {
  if (!has(section, key)) return Expr();
  try {
    return Expr::parse(get(section, key));
  } catch (const ParseError& e) {
    throw ConfigError("[" + section + "] " + key + ": " + e.what());
  }
}

void RunConfig::apply_override(const std::string& spec) {
  std::size_t eq = spec.find('=');
  if (eq == std::string::npos) throw ConfigError("override must be key=value: " + spec);
  std::string key = trim(spec.substr(0, eq));
  std::string value = unquote(trim(spec.substr(eq + 1)));
  std::string section = "problem";
  std::size_t dot = key.find('.');
  if (dot != std::string::npos) {
    section = key.substr(0, dot);
    key = key.substr(dot + 1);
  }
  if (key.empty()) throw ConfigError("override has empty key: " + spec);
  sections[section][key] = value;
}

namespace {

Expr expr_or(const RunConfig& cfg, const std::string& key, double fallback) {
  Expr e = cfg.get_expr("problem", key);
  return e.valid() ? e : Expr::constant(fallback);
}

LinearCoeffs control_from(const RunConfig& cfg, int dim, const std::string& prefix) {
  LinearCoeffs c;
  c.dim = dim;
  if (dim == 1) {
    c.A = {expr_or(cfg, prefix + "A", 1.0)};
    c.b = {expr_or(cfg, prefix + "b1", 0.0)};
  } else {
    Expr a12 = expr_or(cfg, prefix + "A12", 0.0);
    c.A = {expr_or(cfg, prefix + "A11", 1.0), a12, a12, expr_or(cfg, prefix + "A22", 1.0)};
    c.b = {expr_or(cfg, prefix + "b1", 0.0), expr_or(cfg, prefix + "b2", 0.0)};
  }
  c.f = expr_or(cfg, prefix + "f", 0.0);
  Expr h = cfg.get_expr("problem", prefix + "hterm");
  if (h.valid()) c.hterm = h;
  return c;
}

}  // namespace

CoefficientSet problem_from_config(const RunConfig& cfg) {
  const int dim = cfg.get_int("problem", "dim", 1);
  if (dim != 1 && dim != 2) throw ConfigError("dim must be 1 or 2");
  const std::string kind = cfg.get("problem", "operator", "linear");

  CoefficientSet set;
  if (kind == "linear") {
    set.op = OperatorSpec::linear(control_from(cfg, dim, ""));
  } else if (kind == "hjb") {
    const int n = cfg.get_int("problem", "controls", 0);
    if (n < 1) throw ConfigError("hjb operator needs controls >= 1");
    OperatorSpec op;
    op.kind = OperatorSpec::Kind::HJB;
    op.dim = dim;
    for (int k = 1; k <= n; ++k)
      op.controls.push_back(control_from(cfg, dim, "c" + std::to_string(k) + "."));
    set.op = std::move(op);
  } else if (kind == "pucci") {
    set.op = OperatorSpec::pucci(dim, cfg.get_double("problem", "kappa", 1.0),
                                 cfg.get_double("problem", "kappa_big", 1.0));
  } else {
    throw ConfigError("unknown operator kind: " + kind);
  }
  set.op.singular_drift = cfg.get_int("problem", "singular_drift", 1) != 0;
  set.op.nu = cfg.get_double("problem", "nu", set.op.nu);

  BoundaryOperatorSpec bop;
  bop.dim = dim;
  if (dim == 1) {
    bop.gamma = {expr_or(cfg, "gamma1", -1.0)};
  } else {
    bop.gamma = {expr_or(cfg, "gamma1", 0.0), expr_or(cfg, "gamma2", -1.0)};
  }
  bop.g = expr_or(cfg, "g", 0.0);
  Expr bh = cfg.get_expr("problem", "boundary_hterm");
  if (bh.valid()) bop.hterm = bh;
  set.bop = std::move(bop);

  DomainSpec dom;
  dom.dim = dim;
  dom.kind = DomainSpec::Kind::HalfStrip;
  dom.height = cfg.get_double("problem", "height", 4.0);
  dom.epsilon = cfg.get_double("problem", "epsilon", 1.0);
  Expr psi = cfg.get_expr("problem", "psi");
  if (psi.valid()) {
    if (dim == 1) throw ConfigError("psi requires dim = 2");
    dom.psi = psi;
    dom.kind = DomainSpec::Kind::OscillatingHalfPlane;
  }
  set.dom = dom;
  return set;
}

}  // namespace halfcell
