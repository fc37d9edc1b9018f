// SPDX-License-Identifier: Apache-2.0

#include "carleman/scenario_io.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <sstream>

#include "carleman/error.hpp"
#include "carleman/expression.hpp"
#include "carleman/transmission.hpp"

namespace carleman {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string context(const IniDocument& doc, const IniSection* sec, int line) {
  std::ostringstream os;
  os << doc.source << ":" << line << ": ";
  if (sec) os << "[" << sec->name << "] ";
  return os.str();
}

[[noreturn]] void fail(const IniDocument& doc, const IniSection* sec, int line,
                       const std::string& msg) {
  throw ParseError(context(doc, sec, line) + msg);
}

double to_number(const IniDocument& doc, const IniSection* sec, const IniEntry& e) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(e.value, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || trim(e.value.substr(used)) != "")
    fail(doc, sec, e.line, "'" + e.key + "' expects a number, got '" + e.value + "'");
  return v;
}

int to_int(const IniDocument& doc, const IniSection* sec, const IniEntry& e) {
  const double v = to_number(doc, sec, e);
  if (v != static_cast<int>(v))
    fail(doc, sec, e.line, "'" + e.key + "' expects an integer, got '" + e.value + "'");
  return static_cast<int>(v);
}

bool to_bool(const IniDocument& doc, const IniSection* sec, const IniEntry& e) {
  std::string v = e.value;
  std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
  if (v == "true" || v == "yes" || v == "1") return true;
  if (v == "false" || v == "no" || v == "0") return false;
  fail(doc, sec, e.line, "'" + e.key + "' expects true or false, got '" + e.value + "'");
}

std::vector<Eigen::VectorXd> to_points(const IniDocument& doc, const IniSection* sec,
                                       const IniEntry& e, int dim) {
  std::vector<Eigen::VectorXd> pts;
  std::stringstream ss(e.value);
  for (std::string tok; std::getline(ss, tok, ';');) {
    if (trim(tok).empty()) continue;
    std::vector<double> v;
    try {
      v = parse_number_list(tok);
    } catch (const Error& err) {
      fail(doc, sec, e.line, err.what());
    }
    if (static_cast<int>(v.size()) != dim)
      fail(doc, sec, e.line, "point '" + trim(tok) + "' must have n coordinates");
    pts.push_back(Eigen::Map<Eigen::VectorXd>(v.data(), dim));
  }
  return pts;
}

const std::map<std::string, std::vector<std::string>>& known_keys() {
  static const std::map<std::string, std::vector<std::string>> k{
      {"problem", {"name", "n", "m_left", "m_right", "x0", "eigenvalue_shift", "relaxed_orders"}},
      {"operator.left", {"term"}},
      {"operator.right", {"term"}},
      {"weight", {"kind", "left", "right", "gamma"}},
      {"region", {"left_points", "right_points", "samples", "seed"}},
      {"estimator", {"length", "grid_n", "tau", "gamma", "tau_gamma", "xi", "mode"}},
  };
  return k;
}

void check_keys(const IniDocument& doc) {
  for (const auto& sec : doc.sections) {
    std::vector<std::string> allowed;
    if (sec.name == "params") continue;
    if (sec.name.rfind("transmission.", 0) == 0) {
      allowed = {"left_order", "right_order", "left", "right"};
    } else {
      const auto it = known_keys().find(sec.name);
      if (it == known_keys().end()) fail(doc, &sec, sec.line, "unknown section");
      allowed = it->second;
    }
    for (const auto& e : sec.entries)
      if (std::find(allowed.begin(), allowed.end(), e.key) == allowed.end())
        fail(doc, &sec, e.line, "unknown key '" + e.key + "'");
  }
}

struct Builder {
  const IniDocument& doc;
  const ParamMap& params;
  int dim;

  Expression expression(const IniSection* sec, const IniEntry& e, const std::string& text) const {
    Expression ex;
    try {
      ex = Expression::parse(text);
    } catch (const Error& err) {
      fail(doc, sec, e.line, std::string("in '") + e.key + "': " + err.what());
    }
    if (ex.max_variable() > dim)
      fail(doc, sec, e.line, "expression uses x" + std::to_string(ex.max_variable()) +
                                 " but n = " + std::to_string(dim));
    for (const auto& p : ex.parameters())
      if (!params.count(p)) fail(doc, sec, e.line, "unknown parameter '" + p + "'");
    return ex;
  }

  CoefficientField field(const IniSection* sec, const IniEntry& e, const std::string& text) const {
    return CoefficientField::from_expression(expression(sec, e, text), params);
  }

  double scalar(const IniSection* sec, const IniEntry& e) const {
    const Complex v = expression(sec, e, e.value).value(Eigen::VectorXd::Zero(dim), params);
    if (v.imag() != 0.0) fail(doc, sec, e.line, "'" + e.key + "' must be real");
    return v.real();
  }

  SymbolTerm term(const IniSection* sec, const IniEntry& e) const {
    const auto colon = e.value.find(':');
    if (colon == std::string::npos)
      fail(doc, sec, e.line, "term must look like '<alpha...> : <coefficient>'");
    std::vector<double> a;
    try {
      a = parse_number_list(e.value.substr(0, colon));
    } catch (const Error& err) {
      fail(doc, sec, e.line, err.what());
    }
    if (static_cast<int>(a.size()) != dim)
      fail(doc, sec, e.line, "multi-index must have n entries");
    MultiIndex alpha;
    for (double v : a) {
      if (v < 0 || v != static_cast<int>(v))
        fail(doc, sec, e.line, "multi-index entries must be non-negative integers");
      alpha.push_back(static_cast<int>(v));
    }
    return {alpha, field(sec, e, trim(e.value.substr(colon + 1)))};
  }

  Symbol symbol(const IniSection* sec, const std::vector<const IniEntry*>& entries,
                int order) const {
    std::vector<SymbolTerm> terms;
    for (const IniEntry* e : entries) terms.push_back(term(sec, *e));
    try {
      return Symbol(dim, order, std::move(terms));
    } catch (const InvariantError&) {
      throw;
    } catch (const Error& err) {
      fail(doc, sec, entries.empty() ? sec->line : entries.front()->line, err.what());
    }
  }
};

const IniSection& require_section(const IniDocument& doc, const std::string& name) {
  const IniSection* s = doc.find(name);
  if (!s) throw ParseError(doc.source + ": missing section [" + name + "]");
  return *s;
}

const IniEntry& require_key(const IniDocument& doc, const IniSection& sec, const std::string& key) {
  const IniEntry* e = sec.find(key);
  if (!e) fail(doc, &sec, sec.line, "missing key '" + key + "'");
  return *e;
}

}  // namespace

const IniEntry* IniSection::find(const std::string& key) const {
  const IniEntry* out = nullptr;
  for (const auto& e : entries)
    if (e.key == key) out = &e;
  return out;
}

std::vector<const IniEntry*> IniSection::all(const std::string& key) const {
  std::vector<const IniEntry*> out;
  for (const auto& e : entries)
    if (e.key == key) out.push_back(&e);
  return out;
}

const IniSection* IniDocument::find(const std::string& name) const {
  for (const auto& s : sections)
    if (s.name == name) return &s;
  return nullptr;
}

IniDocument IniDocument::parse(const std::string& text, const std::string& source) {
  IniDocument doc;
  doc.source = source;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string s = trim(raw);
    if (s.empty() || s[0] == '#' || s[0] == ';') continue;
    if (s.front() == '[') {
      if (s.back() != ']') fail(doc, nullptr, line, "unterminated section header");
      const std::string name = trim(s.substr(1, s.size() - 2));
      if (name.empty()) fail(doc, nullptr, line, "empty section name");
      if (doc.find(name)) fail(doc, nullptr, line, "duplicate section [" + name + "]");
      doc.sections.push_back({name, line, {}});
      continue;
    }
    if (doc.sections.empty()) fail(doc, nullptr, line, "key outside of any section");
    const auto hash = s.find('#');
    if (hash != std::string::npos) s = trim(s.substr(0, hash));
    const auto eq = s.find('=');
    if (eq == std::string::npos || trim(s.substr(0, eq)).empty())
      fail(doc, &doc.sections.back(), line, "expected 'key = value'");
    doc.sections.back().entries.push_back({trim(s.substr(0, eq)), trim(s.substr(eq + 1)), line});
  }
  return doc;
}

std::vector<double> parse_number_list(const std::string& text) {
  const std::string t = trim(text);
  if (t.find(':') != std::string::npos) {
    const ParamAxis axis = parse_param_axis("v=" + t);
    return axis.values;
  }
  std::vector<double> out;
  std::istringstream ss(t);
  for (std::string tok; ss >> tok;) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != tok.size()) throw Error("bad number '" + tok + "'");
    out.push_back(v);
  }
  return out;
}

ScenarioTemplate ScenarioTemplate::parse(const std::string& text, const std::string& source) {
  ScenarioTemplate t;
  t.doc_ = IniDocument::parse(text, source);
  const IniDocument& doc = t.doc_;
  check_keys(doc);
  const IniSection& prob = require_section(doc, "problem");
  t.name_ = prob.find("name") ? prob.find("name")->value : source;
  const int dim = to_int(doc, &prob, require_key(doc, prob, "n"));
  if (dim < 2) fail(doc, &prob, require_key(doc, prob, "n").line, "n must be at least 2");

  if (const IniSection* ps = doc.find("params")) {
    for (const auto& e : ps->entries) {
      if (t.params_.count(e.key)) fail(doc, ps, e.line, "duplicate parameter '" + e.key + "'");
      if (e.key == "i" || (e.key.size() > 1 && e.key[0] == 'x' &&
                           std::all_of(e.key.begin() + 1, e.key.end(), ::isdigit)))
        fail(doc, ps, e.line, "reserved parameter name '" + e.key + "'");
      t.params_[e.key] = to_number(doc, ps, e);
    }
  }

  if (const IniSection* rs = doc.find("region")) {
    if (auto e = rs->find("left_points")) t.region_.left_points = to_points(doc, rs, *e, dim);
    if (auto e = rs->find("right_points")) t.region_.right_points = to_points(doc, rs, *e, dim);
    if (auto e = rs->find("samples")) t.region_.samples = to_int(doc, rs, *e);
    if (auto e = rs->find("seed")) t.region_.seed = static_cast<std::uint64_t>(to_int(doc, rs, *e));
  }
  if (const IniSection* es = doc.find("estimator")) {
    auto list = [&](const IniEntry& e) {
      try {
        return parse_number_list(e.value);
      } catch (const Error& err) {
        fail(doc, es, e.line, err.what());
      }
    };
    if (auto e = es->find("length")) t.estimator_.length = to_number(doc, es, *e);
    if (auto e = es->find("grid_n")) t.estimator_.grid_n = to_int(doc, es, *e);
    if (auto e = es->find("tau")) t.estimator_.taus = list(*e);
    if (auto e = es->find("gamma")) t.estimator_.gammas = list(*e);
    if (auto e = es->find("xi")) t.estimator_.xi_samples = list(*e);
    if (auto e = es->find("tau_gamma")) t.estimator_.tau_gamma = to_number(doc, es, *e);
    if (auto e = es->find("mode")) {
      if (e->value == "standard") t.estimator_.mode = EstimateMode::standard;
      else if (e->value == "two_parameter") t.estimator_.mode = EstimateMode::two_parameter;
      else if (e->value == "simple_characteristic")
        t.estimator_.mode = EstimateMode::simple_characteristic;
      else fail(doc, es, e->line, "unknown estimator mode '" + e->value + "'");
    }
  }
  // Surface structural errors at load time.
  t.instantiate();
  return t;
}

ScenarioTemplate ScenarioTemplate::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open scenario file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path);
}

Scenario ScenarioTemplate::instantiate(const ParamMap& overrides) const {
  ParamMap params = params_;
  for (const auto& [k, v] : overrides) {
    if (!params.count(k)) throw Error("unknown scenario parameter '" + k + "'");
    params[k] = v;
  }
  const IniDocument& doc = doc_;
  const IniSection& prob = require_section(doc, "problem");
  Scenario scn;
  scn.name = name_;
  scn.params = params;
  scn.dim = to_int(doc, &prob, require_key(doc, prob, "n"));
  const int ml = to_int(doc, &prob, require_key(doc, prob, "m_left"));
  const int mr = to_int(doc, &prob, require_key(doc, prob, "m_right"));
  if (ml <= 0 || mr <= 0) fail(doc, &prob, prob.line, "operator orders must be positive");
  scn.x0 = Eigen::VectorXd::Zero(scn.dim);
  if (auto e = prob.find("x0")) scn.x0 = to_points(doc, &prob, *e, scn.dim).at(0);
  if (auto e = prob.find("eigenvalue_shift")) scn.eigenvalue_shift = to_bool(doc, &prob, *e);
  if (auto e = prob.find("relaxed_orders")) scn.relaxed_orders = to_bool(doc, &prob, *e);

  const Builder b{doc, params, scn.dim};
  const IniSection& opl = require_section(doc, "operator.left");
  const IniSection& opr = require_section(doc, "operator.right");
  scn.left.principal = b.symbol(&opl, opl.all("term"), ml);
  scn.right.principal = b.symbol(&opr, opr.all("term"), mr);
  scn.left.eigenvalue_shift = scn.right.eigenvalue_shift = scn.eigenvalue_shift;

  const int m = (ml + mr) / 2;
  if ((ml + mr) % 2 != 0) fail(doc, &prob, prob.line, "m_left + m_right must be even");
  for (int j = 1; j <= m; ++j) {
    const std::string name = "transmission." + std::to_string(j);
    const IniSection* ts = doc.find(name);
    if (!ts)
      throw InvariantError("transmission-count", doc.source + ": missing section [" + name +
                                                     "]; m = " + std::to_string(m) +
                                                     " transmission pairs are required");
    TransmissionPair pair;
    pair.left.side = Side::left;
    pair.right.side = Side::right;
    pair.left.index = pair.right.index = j;
    pair.left.order = to_int(doc, ts, require_key(doc, *ts, "left_order"));
    pair.right.order = to_int(doc, ts, require_key(doc, *ts, "right_order"));
    pair.left.principal = b.symbol(ts, ts->all("left"), pair.left.order);
    pair.right.principal = b.symbol(ts, ts->all("right"), pair.right.order);
    scn.transmission.push_back(std::move(pair));
  }
  for (const auto& sec : doc.sections) {
    if (sec.name.rfind("transmission.", 0) != 0) continue;
    const std::string idx = sec.name.substr(13);
    const bool ok = !idx.empty() && std::all_of(idx.begin(), idx.end(), ::isdigit) &&
                    std::stoi(idx) >= 1 && std::stoi(idx) <= m;
    if (!ok)
      throw InvariantError("transmission-count", context(doc, &sec, sec.line) +
                                                     "transmission index out of range 1.." +
                                                     std::to_string(m));
  }

  const IniSection& ws = require_section(doc, "weight");
  const std::string kind = ws.find("kind") ? ws.find("kind")->value : "direct";
  const IniEntry& wl = require_key(doc, ws, "left");
  const IniEntry& wr = require_key(doc, ws, "right");
  if (kind == "direct") {
    if (ws.find("gamma")) fail(doc, &ws, ws.find("gamma")->line, "gamma needs kind = two_parameter");
    scn.weight = WeightSpec::direct(b.field(&ws, wl, wl.value), b.field(&ws, wr, wr.value));
  } else if (kind == "two_parameter") {
    const double gamma = b.scalar(&ws, require_key(doc, ws, "gamma"));
    if (!(gamma > 0.0)) fail(doc, &ws, ws.find("gamma")->line, "gamma must be positive");
    scn.weight =
        WeightSpec::two_parameter(b.field(&ws, wl, wl.value), b.field(&ws, wr, wr.value), gamma);
  } else {
    fail(doc, &ws, ws.find("kind")->line, "weight kind must be direct or two_parameter");
  }
  scn.validate();
  return scn;
}

namespace {

const char* const kDiffusionOps = R"(
[operator.left]
term = 2 0 : 1
term = 0 2 : 1

[operator.right]
term = 2 0 : 1
term = 0 2 : 1

[transmission.1]
left_order = 0
right_order = 0
left = 0 0 : -1
right = 0 0 : 1

[transmission.2]
left_order = 1
right_order = 1
left = 0 1 : -1
right = 0 1 : 1

[region]
left_points = 0 0; 0.3 -0.1; -0.2 -0.2
right_points = 0 0; 0.3 0.1; -0.2 0.2
samples = 2048
seed = 0
)";

std::string diffusion2d() {
  return std::string(R"(# Isotropic second-order transmission problem: continuity of u and of the
# normal flux. The weight depends only on x2.
[problem]
name = diffusion2d
n = 2
m_left = 2
m_right = 2

[params]
gamma1 = 0.5
gamma2 = 1
c2 = 1

[weight]
kind = direct
left = gamma1*x2 + c2*x2^2/2
right = gamma2*x2 + c2*x2^2/2

[estimator]
length = 0.25
grid_n = 400
tau = 5:100:20
xi = 0 0.25 0.5 0.75 1 1.25 1.5 1.75
)") + kDiffusionOps;
}

std::string twoparam_diffusion() {
  return std::string(R"(# diffusion2d with phi = exp(gamma psi), psi linear plus quadratic in x2.
[problem]
name = twoparam-diffusion
n = 2
m_left = 2
m_right = 2

[params]
s1 = 0.5
s2 = 1
c2 = 1
gamma = 4

[weight]
kind = two_parameter
left = s1*x2 + c2*x2^2/2
right = s2*x2 + c2*x2^2/2
gamma = gamma

[estimator]
length = 0.0625
grid_n = 400
tau_gamma = 128
gamma = 4 8 16
mode = simple_characteristic
xi = 0 0.25 0.5 0.75 1 1.25 1.5 1.75
)") + kDiffusionOps;
}

std::string laplace_quadratic() {
  return std::string(R"(# Laplacians with the convex weight |x - y0|^2 / 2, y0 = (0, -1).
[problem]
name = laplace-quadratic
n = 2
m_left = 2
m_right = 2

[params]
y1 = 0
y2 = -1

[weight]
kind = direct
left = ((x1 - y1)^2 + (x2 - y2)^2)/2
right = ((x1 - y1)^2 + (x2 - y2)^2)/2
)") + kDiffusionOps;
}

const char* const kDecoupled = R"(# Two independent Dirichlet conditions written as u_l + u_r and u_l - u_r.
[problem]
name = decoupled-dirichlet
n = 2
m_left = 2
m_right = 2

[params]
gamma1 = -1
gamma2 = 1

[operator.left]
term = 2 0 : 1
term = 0 2 : 1

[operator.right]
term = 2 0 : 1
term = 0 2 : 1

[transmission.1]
left_order = 0
right_order = 0
left = 0 0 : 1
right = 0 0 : 1

[transmission.2]
left_order = 0
right_order = 0
left = 0 0 : 1
right = 0 0 : -1

[weight]
kind = direct
left = gamma1*x2
right = gamma2*x2

[region]
left_points = 0 0; 0.3 -0.1
right_points = 0 0; 0.3 0.1
)";

const char* const kMixed = R"(# Second order on the left, fourth order on the right, with
# b1 = b2 = x1-frequency squared. The third left symbol vanishes, so the
# order-compatibility and normality checks are relaxed.
[problem]
name = mixed-order24
n = 2
m_left = 2
m_right = 4
relaxed_orders = true

[params]
dphi1 = 1
dphi2 = 1

[operator.left]
term = 2 0 : 1
term = 0 2 : 1

[operator.right]
term = 4 0 : 1
term = 0 4 : 1

[transmission.1]
left_order = 0
right_order = 0
left = 0 0 : -1
right = 0 0 : 1

[transmission.2]
left_order = 1
right_order = 3
left = 0 1 : -1
right = 0 3 : 1

[transmission.3]
left_order = 0
right_order = 2
right = 0 2 : 1

[weight]
kind = direct
left = dphi1*x2
right = dphi2*x2

[region]
left_points = 0 0
right_points = 0 0
)";

const char* const kBilaplace = R"(# Bi-Laplacians with continuity of u and its first three normal derivatives.
[problem]
name = bilaplace
n = 2
m_left = 4
m_right = 4

[params]
gamma = 1

[operator.left]
term = 4 0 : 1
term = 2 2 : 2
term = 0 4 : 1

[operator.right]
term = 4 0 : 1
term = 2 2 : 2
term = 0 4 : 1

[transmission.1]
left_order = 0
right_order = 0
left = 0 0 : -1
right = 0 0 : 1

[transmission.2]
left_order = 1
right_order = 1
left = 0 1 : -1
right = 0 1 : 1

[transmission.3]
left_order = 2
right_order = 2
left = 0 2 : -1
right = 0 2 : 1

[transmission.4]
left_order = 3
right_order = 3
left = 0 3 : -1
right = 0 3 : 1

[weight]
kind = two_parameter
left = x2
right = x2
gamma = gamma

[region]
left_points = 0 0; 0.3 -0.1
right_points = 0 0; 0.3 0.1
)";

}  // namespace

std::vector<std::string> builtin_names() {
  return {"bilaplace",    "decoupled-dirichlet", "diffusion2d",
          "laplace-quadratic", "mixed-order24", "twoparam-diffusion"};
}

std::optional<std::string> builtin_text(const std::string& name) {
  if (name == "diffusion2d") return diffusion2d();
  if (name == "twoparam-diffusion") return twoparam_diffusion();
  if (name == "laplace-quadratic") return laplace_quadratic();
  if (name == "decoupled-dirichlet") return std::string(kDecoupled);
  if (name == "mixed-order24") return std::string(kMixed);
  if (name == "bilaplace") return std::string(kBilaplace);
  return std::nullopt;
}

ScenarioTemplate resolve_scenario(const std::string& name_or_path) {
  if (auto text = builtin_text(name_or_path))
    return ScenarioTemplate::parse(*text, "builtin:" + name_or_path);
  return ScenarioTemplate::load(name_or_path);
}

Scenario parse_scenario(const std::string& path) { return ScenarioTemplate::load(path).instantiate(); }

}  // namespace carleman
