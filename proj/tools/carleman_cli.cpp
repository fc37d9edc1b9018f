// SPDX-License-Identifier: Apache-2.0
//
// carleman: command-line front end.
//
//   carleman check        --scenario NAME|FILE
//   carleman transmission --scenario NAME|FILE [--tau T --xi1 V ...]
//   carleman scan         --scenario NAME|FILE --param name=a:b:n ...
//   carleman estimate     --scenario NAME|FILE [--tau LIST --gamma LIST]
//   carleman demo         NAME
//   carleman report       --scenario NAME|FILE
//
// Scenario parameters are overridden with --<param> VALUE. Exit status is 0
// when every verdict holds, 1 when one fails or is indeterminate and 2 on
// input errors.

#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <regex>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>

#include "carleman/conditions.hpp"
#include "carleman/error.hpp"
#include "carleman/estimator.hpp"
#include "carleman/parallel.hpp"
#include "carleman/report.hpp"
#include "carleman/scenario_io.hpp"
#include "carleman/transmission.hpp"

using namespace carleman;

namespace {

constexpr int kExitHolds = 0;
constexpr int kExitFails = 1;
constexpr int kExitInput = 2;

struct Common {
  std::string scenario;
  std::optional<int> samples;
  std::optional<std::uint64_t> seed;
  double tol_rank = TransmissionOptions{}.tol_rank;
  std::optional<double> eps_im;
  std::optional<double> tol_sub;
  std::optional<int> grid_n;
  std::string out;
  int threads = 0;
  bool timing = false;
};

struct Invocation {
  Common common;
  // transmission
  std::optional<double> tau;
  // scan
  std::vector<std::string> axes;
  // estimate
  std::string tau_list;
  std::string gamma_list;
  std::optional<double> tau_gamma;
  std::string xi_list;
  std::string mode;
  std::optional<double> length;
  // demo
  std::string demo_name;
  bool demo_estimate = false;
};

void add_common(CLI::App* sub, Common& c, bool needs_scenario = true) {
  if (needs_scenario)
    sub->add_option("--scenario", c.scenario, "builtin name or scenario file")->required();
  sub->add_option("--samples", c.samples, "sphere samples per base point");
  sub->add_option("--seed", c.seed, "sampler seed");
  sub->add_option("--tol-rank", c.tol_rank, "sigma ratio tolerance for the transmission rank");
  sub->add_option("--eps-im", c.eps_im, "root classification tolerance");
  sub->add_option("--tol-sub", c.tol_sub, "sub-ellipticity tolerance (fail threshold tol/100)");
  sub->add_option("--grid-n", c.grid_n, "estimator grid intervals per side");
  sub->add_option("--out", c.out, "output file (default stdout)");
  sub->add_option("--threads", c.threads, "worker threads, 0 = hardware concurrency");
  sub->add_flag("--timing", c.timing, "record wall time in reports");
  sub->allow_extras();
}

double parse_double(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size())
    throw Error("--" + key + " expects a number, got '" + text + "'");
  return v;
}

struct Extras {
  ParamMap params;
  std::map<int, double> xi;
};

// --name VALUE or --name=VALUE pairs left over by CLI11.
Extras parse_extras(const std::vector<std::string>& rest, const ScenarioTemplate& tpl) {
  Extras out;
  static const std::regex xi_key("xi([1-9][0-9]*)");
  for (std::size_t i = 0; i < rest.size(); ++i) {
    const std::string& a = rest[i];
    if (a.rfind("--", 0) != 0 || a.size() < 3) throw Error("unexpected argument '" + a + "'");
    std::string key = a.substr(2), value;
    const auto eq = key.find('=');
    if (eq != std::string::npos) {
      value = key.substr(eq + 1);
      key = key.substr(0, eq);
    } else {
      if (i + 1 >= rest.size()) throw Error("--" + key + " needs a value");
      value = rest[++i];
    }
    std::smatch m;
    if (tpl.has_param(key)) {
      out.params[key] = parse_double(key, value);
    } else if (std::regex_match(key, m, xi_key)) {
      out.xi[std::stoi(m[1])] = parse_double(key, value);
    } else {
      throw Error("unknown option --" + key + " (not a parameter of scenario '" + tpl.name() +
                  "')");
    }
  }
  return out;
}

class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary);
      if (!file_) throw Error("cannot open '" + path + "' for writing");
    }
  }
  std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

 private:
  std::ofstream file_;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

int exit_for(Verdict v) { return v == Verdict::holds ? kExitHolds : kExitFails; }

ConditionTolerances tolerances(const Common& c) {
  ConditionTolerances t;
  if (c.tol_sub) {
    t.subellipticity = *c.tol_sub;
    t.subellipticity_fail = *c.tol_sub / 100.0;
  }
  return t;
}

TransmissionOptions transmission_options(const Common& c) {
  TransmissionOptions o;
  o.tol_rank = c.tol_rank;
  o.eps_im = c.eps_im;
  return o;
}

SampleRegion side_region(const ScenarioTemplate& tpl, Side side, const Common& c) {
  SampleRegion r;
  const RegionConfig& rc = tpl.region();
  r.points = side == Side::left ? rc.left_points : rc.right_points;
  r.n_sphere = c.samples.value_or(rc.samples);
  r.seed = c.seed.value_or(rc.seed);
  return r;
}

// Ellipticity and sub-ellipticity per side, plus pseudo-convexity and the
// simple-characteristic property for two-parameter weights.
Json run_checks(const ScenarioTemplate& tpl, const Scenario& scn, const Common& c,
                Verdict& overall) {
  const ConditionTolerances tol = tolerances(c);
  Json list = Json::array();
  auto add = [&](const ConditionReport& r) {
    overall = worst(overall, r.verdict);
    list.push_back(to_json(r));
  };
  for (Side s : {Side::left, Side::right}) {
    const SampleRegion region = side_region(tpl, s, c);
    if (region.points.empty())
      throw Error(std::string("scenario has no ") + to_string(s) + "_points in [region]");
    ConditionReport ell = check_ellipticity(scn.op(s), region, tol);
    ell.side = s;
    add(ell);
    add(check_subellipticity(scn, s, region, tol));
    if (scn.weight.kind() == WeightSpec::Kind::two_parameter) {
      add(check_strong_pseudoconvexity(scn, s, region, tol));
      add(check_simple_characteristic(scn, s, region, tol));
    }
  }
  return list;
}

struct TransmissionRun {
  Json json;
  Verdict verdict = Verdict::indeterminate;
};

TransmissionRun run_transmission(const Scenario& scn, const ScenarioTemplate& tpl,
                                 const Common& c, std::optional<double> tau,
                                 const std::map<int, double>& xi_parts) {
  const TransmissionOptions opts = transmission_options(c);
  TransmissionRun out;
  if (tau) {
    Eigen::VectorXd xi = Eigen::VectorXd::Zero(scn.dim - 1);
    for (const auto& [k, v] : xi_parts) {
      if (k > scn.dim - 1) throw Error("--xi" + std::to_string(k) + " exceeds n - 1");
      xi(k - 1) = v;
    }
    const InterfaceQuadruple q(scn.x0, xi, *tau);
    const TransmissionVerdict v = check_transmission_at(scn, q, opts);
    out.json = to_json(v);
    // The verdict is scale free; the matrix is reported at the point as given.
    const TransmissionMatrix tm = assemble_T_at(scn, scn.x0, xi, *tau, opts);
    out.json["matrix"] = to_json(tm);
    out.json.erase("determinant");
    out.json.erase("abs_determinant");
    if (const auto d = tm.determinant()) {
      out.json["determinant"] = Json::array({d->real(), d->imag()});
      out.json["abs_determinant"] = std::abs(*d);
    }
    out.verdict = v.verdict;
  } else {
    if (!xi_parts.empty()) throw Error("--xi<k> needs --tau");
    TransmissionSampler sampler;
    if (c.samples) sampler.count = *c.samples;
    sampler.seed = c.seed.value_or(tpl.region().seed);
    const TransmissionVerdict v = check_transmission_point(scn, scn.x0, sampler, opts);
    out.json = to_json(v);
    out.json["sampler"] = {{"count", sampler.count}, {"seed", sampler.seed}};
    out.verdict = v.verdict;
  }
  return out;
}

Json tolerance_block(const Common& c) {
  Json t;
  t["conditions"] = to_json(tolerances(c));
  t["transmission"] = to_json(transmission_options(c));
  return t;
}

EstimateMode parse_mode(const std::string& s) {
  for (EstimateMode m : {EstimateMode::standard, EstimateMode::two_parameter,
                         EstimateMode::simple_characteristic})
    if (s == to_string(m)) return m;
  throw Error("unknown estimator mode '" + s + "'");
}

EstimateCurve run_estimate(const Scenario& scn, const ScenarioTemplate& tpl, const Invocation& iv) {
  const EstimatorConfig& ec = tpl.estimator();
  EstimatorOptions o;
  o.length = iv.length.value_or(ec.length);
  o.grid_n = iv.common.grid_n.value_or(ec.grid_n);
  o.mode = iv.mode.empty() ? ec.mode : parse_mode(iv.mode);
  const std::vector<double> taus = iv.tau_list.empty() ? ec.taus : parse_number_list(iv.tau_list);
  const std::vector<double> gammas =
      iv.gamma_list.empty() ? ec.gammas : parse_number_list(iv.gamma_list);
  std::vector<double> xi = iv.xi_list.empty() ? ec.xi_samples : parse_number_list(iv.xi_list);
  if (xi.empty()) xi = default_xi_samples();

  std::optional<double> tg = iv.tau_gamma;
  if (!tg && iv.tau_list.empty()) tg = ec.tau_gamma;
  if (tg) return sweep_fixed_product(scn, *tg, gammas, xi, o);
  if (taus.empty()) throw Error("no tau values: pass --tau or set [estimator] tau");
  return sweep(scn, taus, gammas, xi, o);
}

int cmd_check(const Invocation& iv, const ScenarioTemplate& tpl, const Scenario& scn) {
  const auto t0 = Clock::now();
  Verdict overall = Verdict::holds;
  Json rep = report_header(scn);
  rep["tolerances"] = tolerance_block(iv.common);
  rep["checks"] = run_checks(tpl, scn, iv.common, overall);
  rep["verdict"] = to_string(overall);
  if (iv.common.timing) rep["wall_seconds"] = seconds_since(t0);
  Output out(iv.common.out);
  out.stream() << dump(rep);
  return exit_for(overall);
}

int cmd_transmission(const Invocation& iv, const ScenarioTemplate& tpl, const Scenario& scn,
                     const Extras& ex) {
  const auto t0 = Clock::now();
  const TransmissionRun tr = run_transmission(scn, tpl, iv.common, iv.tau, ex.xi);
  Json rep = report_header(scn);
  rep["tolerances"] = tolerance_block(iv.common);
  rep["transmission"] = tr.json;
  rep["verdict"] = to_string(tr.verdict);
  if (iv.common.timing) rep["wall_seconds"] = seconds_since(t0);
  Output out(iv.common.out);
  out.stream() << dump(rep);
  return exit_for(tr.verdict);
}

int cmd_scan(const Invocation& iv, const ScenarioTemplate& tpl, const Extras& ex) {
  if (iv.axes.empty()) throw Error("scan needs at least one --param name=a:b:n");
  std::vector<ParamAxis> axes;
  for (const auto& a : iv.axes) {
    axes.push_back(parse_param_axis(a));
    if (!tpl.has_param(axes.back().name))
      throw Error("unknown parameter '" + axes.back().name + "' in --param");
  }
  const ParamMap base = ex.params;
  const ScenarioFactory factory = [&](const ParamMap& p) {
    ParamMap all = base;
    for (const auto& [k, v] : p) all[k] = v;
    return tpl.instantiate(all);
  };
  TransmissionSampler sampler;
  if (iv.common.samples) sampler.count = *iv.common.samples;
  sampler.seed = iv.common.seed.value_or(tpl.region().seed);
  const ScanResult scan =
      scan_weight_family(factory, axes, sampler, transmission_options(iv.common));
  Output out(iv.common.out);
  write_scan_csv(out.stream(), scan);
  for (const auto& b : scan.boundaries) {
    std::cerr << "boundary along " << b.axis << ": holds at " << format_number(b.last_holds)
              << ", not at " << format_number(b.first_other);
    for (const auto& [k, v] : b.fixed) std::cerr << " (" << k << " = " << format_number(v) << ")";
    std::cerr << "\n";
  }
  Verdict overall = Verdict::holds;
  for (const auto& c : scan.cells) overall = worst(overall, c.result.verdict);
  return exit_for(overall);
}

int cmd_estimate(const Invocation& iv, const ScenarioTemplate& tpl, const Scenario& scn) {
  const EstimateCurve curve = run_estimate(scn, tpl, iv);
  Output out(iv.common.out);
  write_estimate_csv(out.stream(), curve);
  return kExitHolds;
}

Json run_report(const ScenarioTemplate& tpl, const Scenario& scn, const Invocation& iv,
                Verdict& overall, bool with_estimate) {
  const auto t0 = Clock::now();
  Json rep = report_header(scn);
  rep["tolerances"] = tolerance_block(iv.common);
  rep["checks"] = run_checks(tpl, scn, iv.common, overall);
  const TransmissionRun tr = run_transmission(scn, tpl, iv.common, std::nullopt, {});
  overall = worst(overall, tr.verdict);
  rep["transmission"] = tr.json;
  if (with_estimate) {
    const EstimateCurve curve = run_estimate(scn, tpl, iv);
    Json e;
    e["mode"] = to_string(curve.mode);
    e["xi_samples"] = curve.xi_samples;
    Json pts = Json::array();
    for (const auto& p : curve.points) pts.push_back(to_json(p));
    e["points"] = pts;
    rep["estimate"] = e;
  }
  rep["verdict"] = to_string(overall);
  if (iv.common.timing) rep["wall_seconds"] = seconds_since(t0);
  return rep;
}

int cmd_report(const Invocation& iv, const ScenarioTemplate& tpl, const Scenario& scn) {
  Verdict overall = Verdict::holds;
  const Json rep = run_report(tpl, scn, iv, overall, false);
  Output out(iv.common.out);
  out.stream() << dump(rep);
  return exit_for(overall);
}

int cmd_demo(const Invocation& iv, const ScenarioTemplate& tpl, const Scenario& scn) {
  Verdict overall = Verdict::holds;
  const Json rep = run_report(tpl, scn, iv, overall, iv.demo_estimate);
  std::ostream& log = iv.common.out.empty() ? std::cerr : std::cout;
  log << "scenario " << scn.name << " (m = " << scn.m() << ")\n";
  for (const auto& c : rep["checks"])
    log << "  " << c["check"].get<std::string>() << " [" << c["side"].get<std::string>()
        << "]: " << c["verdict"].get<std::string>() << " (margin "
        << format_number(c["margin"].get<double>()) << ")\n";
  log << "  transmission: " << rep["transmission"]["verdict"].get<std::string>()
      << " (sigma ratio " << format_number(rep["transmission"]["sigma_ratio"].get<double>())
      << ")\n";
  if (rep.contains("estimate"))
    for (const auto& p : rep["estimate"]["points"])
      log << "  C(tau = " << format_number(p["tau"].get<double>())
          << ", gamma = " << format_number(p["gamma"].get<double>())
          << ") = " << format_number(p["C"].get<double>()) << "\n";
  if (!iv.common.out.empty()) {
    Output out(iv.common.out);
    out.stream() << dump(rep);
  } else {
    std::cout << dump(rep);
  }
  return exit_for(overall);
}

std::string builtin_list() {
  std::string s;
  for (const auto& n : builtin_names()) s += (s.empty() ? "" : ", ") + n;
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Carleman-estimate hypothesis verifier for elliptic transmission problems"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));

  Invocation iv;

  auto* check = app.add_subcommand("check", "ellipticity, sub-ellipticity and weight conditions");
  add_common(check, iv.common);

  auto* trans = app.add_subcommand("transmission", "transmission condition at the interface point");
  add_common(trans, iv.common);
  trans->add_option("--tau", iv.tau, "evaluate a single quadruple at this tau (with --xi<k>)");

  auto* scan = app.add_subcommand("scan", "admissibility over a grid of weight parameters");
  add_common(scan, iv.common);
  scan->add_option("--param", iv.axes, "axis name=a:b:n or name=value (repeatable)")
      ->take_all()
      ->allow_extra_args(false);

  auto* est = app.add_subcommand("estimate", "Carleman constants of the model problem");
  add_common(est, iv.common);
  est->add_option("--tau", iv.tau_list, "tau list, a:b:n or space separated");
  est->add_option("--gamma", iv.gamma_list, "gamma list (two-parameter weights)");
  est->add_option("--tau-gamma", iv.tau_gamma, "fix tau*gamma; tau = value / gamma");
  est->add_option("--xi", iv.xi_list, "relative xi' samples");
  est->add_option("--mode", iv.mode, "standard | two_parameter | simple_characteristic");
  est->add_option("--length", iv.length, "half-interval length L");

  auto* demo = app.add_subcommand("demo", "run a builtin scenario end to end (" + builtin_list() + ")");
  add_common(demo, iv.common, false);
  demo->add_option("name", iv.demo_name, "builtin scenario")->required();
  demo->add_flag("--estimate", iv.demo_estimate, "include the estimator sweep");

  auto* report = app.add_subcommand("report", "merged machine-readable report");
  add_common(report, iv.common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitInput;
  }

  CLI::App* sub = app.get_subcommands().front();
  try {
    set_thread_count(iv.common.threads);
    if (sub == demo) {
      if (!builtin_text(iv.demo_name))
        throw Error("unknown builtin '" + iv.demo_name + "' (available: " + builtin_list() + ")");
      iv.common.scenario = iv.demo_name;
    }
    const ScenarioTemplate tpl = resolve_scenario(iv.common.scenario);
    const Extras ex = parse_extras(sub->remaining(), tpl);
    if (sub != trans && !ex.xi.empty()) throw Error("--xi<k> is only valid for transmission");
    const Scenario scn = tpl.instantiate(ex.params);

    if (sub == check) return cmd_check(iv, tpl, scn);
    if (sub == trans) return cmd_transmission(iv, tpl, scn, ex);
    if (sub == scan) return cmd_scan(iv, tpl, ex);
    if (sub == est) return cmd_estimate(iv, tpl, scn);
    if (sub == demo) return cmd_demo(iv, tpl, scn);
    if (sub == report) return cmd_report(iv, tpl, scn);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::logic_error& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitInput;
}
