#include "nuh/commands.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "nuh/bounds.hpp"
#include "nuh/errors.hpp"
#include "nuh/estimator.hpp"
#include "nuh/segments.hpp"
#include "nuh/solenoid.hpp"

namespace nuh {
namespace {

template <class T>
T opt(const Json& c, const char* key, T fallback) {
  return c.contains(key) && !c.at(key).is_null() ? c.at(key).get<T>() : fallback;
}

Json vec_json(Vec2 v) { return Json::array({v.x, v.y}); }

Vec2 parse_point(const Json& j) {
  if (j.is_array() && j.size() == 2) return {j[0].get<double>(), j[1].get<double>()};
  if (j.is_string()) {
    std::istringstream in(j.get<std::string>());
    double x = 0.0, y = 0.0;
    char comma = 0;
    if (in >> x >> comma >> y && comma == ',' && in.eof()) return {x, y};
  }
  throw std::invalid_argument("point must be \"x,y\" or [x, y]");
}

std::vector<double> parse_list(const Json& j) {
  if (j.is_array()) return j.get<std::vector<double>>();
  if (j.is_number()) return {j.get<double>()};
  if (j.is_string()) {
    std::vector<double> out;
    std::istringstream in(j.get<std::string>());
    std::string item;
    while (std::getline(in, item, ',')) out.push_back(std::stod(item));
    return out;
  }
  throw std::invalid_argument("expected a list of numbers");
}

Json estimate_json(const ExponentEstimate& e) {
  return {{"value", e.value},
          {"std_error", e.std_error},
          {"ci95", {e.value - 1.96 * e.std_error, e.value + 1.96 * e.std_error}},
          {"n", e.n},
          {"samples", e.samples},
          {"seed", e.seed},
          {"unconverged", e.unconverged}};
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot write '" + path + "'");
  out << text;
}

Json cmd_snf(const Json& c) {
  if (!c.contains("matrix")) throw std::invalid_argument("snf needs --matrix a,b,c,d");
  const Json& m = c.at("matrix");
  IntMatrix2 e;
  if (m.is_array()) {
    const auto v = m.get<std::vector<Int>>();
    if (v.size() != 4) throw std::invalid_argument("matrix needs exactly four entries");
    e = IntMatrix2::from_row_major({v[0], v[1], v[2], v[3]});
  } else {
    e = parse_matrix(m.get<std::string>());
  }
  const SmithDecomposition snf = smith_normal_form(e);
  Json out;
  out["command"] = "snf";
  out["matrix"] = e.row_major();
  out["det"] = e.det();
  out["tau1"] = snf.tau1;
  out["tau2"] = snf.tau2;
  out["left"] = snf.left.row_major();
  out["right"] = snf.right.row_major();
  out["homothety"] = e.is_homothety();
  out["preconditions_ok"] = !e.is_homothety() && snf.tau2 >= 5;
  if (e.is_homothety()) {
    out["normal_position"] = nullptr;
  } else {
    const NormalPosition np = normalize_position(e);
    out["normal_position"] = {{"conjugator", np.conjugator.row_major()},
                              {"normal", np.normal.row_major()},
                              {"shear", np.shear}};
  }
  std::vector<Json> reps;
  for (const IntVec2& w : coset_representatives(e)) reps.push_back({w.x, w.y});
  out["coset_representatives"] = reps;
  return out;
}

Json cmd_threshold(const Json& c) {
  const std::string cond_name = opt<std::string>(c, "condition", "nuh");
  const Condition cond = condition_from_string(cond_name);
  const bool family = c.contains("k") && !c.contains("map");
  const MapSpec spec = family ? MapSpec::standard_family(c.at("k").get<int>(), opt<double>(c, "t", 0.0))
                              : map_from_config(c);
  const EndoMap f(spec);  // validates the preconditions
  const BoundInputs inp = BoundInputs::for_map(f);
  std::vector<double> checks = family ? quoted_thresholds(c.at("k").get<int>(), cond_name)
                                      : std::vector<double>{};
  if (c.contains("check")) checks = parse_list(c.at("check"));
  const double log_d = c_det(f);
  const ThresholdReport rep = solve_threshold(inp, cond, log_d, checks);
  Json out;
  out["command"] = "threshold";
  out["label"] = "certificate threshold (sufficient condition, not optimal)";
  out["condition"] = to_string(cond);
  out["tau2"] = rep.tau2;
  out["slope"] = rep.slope;
  out["rhs"] = rep.rhs;
  out["c_det"] = log_d;
  out["minimal_t"] = rep.minimal_t;
  out["constant_at_minimal_t"] = rep.constant_at_minimal;
  out["leading_order_t"] = rep.leading_order_t;
  out["inputs"] = {{"alpha", inp.alpha}, {"a", inp.a},     {"b", inp.b},
                   {"e_v", inp.e_v},     {"e_h", inp.e_h}, {"slack_epsilon", 0.0}};
  std::vector<Json> cj;
  for (const ThresholdCheck& ch : rep.checks) {
    cj.push_back({{"t", ch.t}, {"lhs", ch.lhs}, {"rhs", ch.rhs}, {"satisfied", ch.satisfied}});
  }
  out["checks"] = cj;
  out["satisfied_at"] = rep.satisfied_at;
  out["segment_threshold"] = segment_threshold(inp);
  return out;
}

Json cmd_preimages(const Json& c) {
  const EndoMap f(map_from_config(c));
  const Vec2 x = c.contains("point") ? parse_point(c.at("point")) : Vec2{0.594, 0.287};
  const int depth = opt<int>(c, "depth", 2);
  if (depth < 1) throw std::invalid_argument("depth must be at least 1");
  if (depth > 2) {
    std::uint64_t req = 1;
    for (int i = 0; i < depth; ++i) req *= f.degree();
    throw BudgetExceeded(req, static_cast<std::uint64_t>(f.degree() * f.degree()));
  }
  const PreimageConeReport rep = preimage_cone_report(f, x, depth);
  Json out;
  out["command"] = "preimages";
  out["point"] = vec_json(rep.x);
  out["t"] = f.t();
  out["degree"] = f.degree();
  out["depth"] = depth;
  out["invariant_count"] = rep.invariant_count;
  std::vector<Json> branches;
  std::ostringstream csv;
  csv.precision(17);
  csv << "level,parent,symbol,x,y,region,cone_invariant,blue_vertical,red_vertical\n";
  for (const auto& b : rep.branches) {
    Json bj = {{"symbol", b.symbol},
               {"point", vec_json(b.point)},
               {"region", to_string(b.region)},
               {"cone_invariant", b.cone_invariant}};
    csv << 1 << ",0," << b.symbol << ',' << b.point.x << ',' << b.point.y << ','
        << to_string(b.region) << ',' << b.cone_invariant << ",,\n";
    if (!b.children.empty()) {
      std::vector<Json> kids;
      for (const auto& k : b.children) {
        kids.push_back({{"symbol", k.symbol},
                        {"point", vec_json(k.point)},
                        {"blue_vertical", k.blue_vertical},
                        {"red_vertical", k.red_vertical}});
        csv << 2 << ',' << b.symbol << ',' << k.symbol << ',' << k.point.x << ',' << k.point.y
            << ",,," << k.blue_vertical << ',' << k.red_vertical << '\n';
      }
      bj["children"] = kids;
      bj["blue_count"] = b.blue_count;
      bj["red_count"] = b.red_count;
    }
    branches.push_back(bj);
  }
  out["branches"] = branches;
  if (c.contains("csv")) write_text(c.at("csv").get<std::string>(), csv.str());
  return out;
}

Json tree_json(const PreimageTreeStats& s) {
  return {{"n", s.depth}, {"g", s.g}, {"b", s.b}, {"a", s.a}, {"J", s.J}, {"I", s.I}};
}

Json cmd_cchi(const Json& c) {
  const EndoMap f(map_from_config(c));
  const int depth = opt<int>(c, "depth", 3);
  const GridSpec grid = GridSpec::parse(opt<std::string>(c, "grid", "8x8x8"));
  TreeOptions topt;
  topt.budget = opt<std::uint64_t>(c, "budget", kDefaultTreeBudget);
  const CChiEstimate est = estimate_c_chi(f, grid, depth, topt);
  Json out;
  out["command"] = "cchi";
  out["t"] = f.t();
  out["depth"] = depth;
  out["grid"] = {grid.nx, grid.ny, grid.directions};
  out["estimate"] = est.value;
  out["label"] = "grid minimum of I(x,v;f^n)/n (upper estimate of the infimum)";
  out["max_over_grid"] = est.max_value;
  out["argmin"] = {{"x", vec_json(est.argmin.x)}, {"v", vec_json(est.argmin.v)}};
  out["argmin_tree"] = tree_json(pullback_tree(f, est.argmin, depth, topt));
  out["c_det"] = c_det(f);
  return out;
}

ExponentConfig exponent_config(const Json& c) {
  ExponentConfig cfg;
  cfg.n = opt<int>(c, "n", 1000);
  cfg.samples = opt<std::size_t>(c, "samples", 10'000);
  cfg.seed = opt<std::uint64_t>(c, "seed", 1);
  cfg.budget = opt<std::uint64_t>(c, "budget", cfg.budget);
  return cfg;
}

Json cmd_lyap(const Json& c) {
  const EndoMap f(map_from_config(c));
  const ExponentConfig cfg = exponent_config(c);
  const ExponentPair e = estimate_exponents(f, cfg);
  Json out;
  out["command"] = "lyap";
  out["t"] = f.t();
  out["chi_plus"] = estimate_json(e.plus);
  out["chi_minus"] = estimate_json(e.minus);
  out["sum"] = e.plus.value + e.minus.value;
  out["sum_std_error"] = std::hypot(e.plus.std_error, e.minus.std_error);
  out["log_degree"] = c_det(f);
  return out;
}

Json cmd_solenoid_check(const Json& c) {
  const EndoMap f(map_from_config(c));
  SolenoidCheckConfig cfg;
  cfg.instances = opt<std::size_t>(c, "instances", cfg.instances);
  cfg.depth = opt<int>(c, "depth", cfg.depth);
  cfg.cylinder_depth = opt<int>(c, "cylinder_depth", cfg.cylinder_depth);
  cfg.draws = opt<std::size_t>(c, "draws", cfg.draws);
  cfg.seed = opt<std::uint64_t>(c, "seed", cfg.seed);
  std::uint64_t words = 1;
  for (int i = 0; i < cfg.cylinder_depth; ++i) words *= f.degree();
  const std::uint64_t budget = opt<std::uint64_t>(c, "budget", kDefaultTreeBudget);
  if (words > budget) throw BudgetExceeded(words, budget);
  const SolenoidCheckReport r = run_solenoid_checks(f, cfg);
  Json out;
  out["command"] = "solenoid-check";
  out["t"] = f.t();
  out["seed"] = cfg.seed;
  out["instances"] = cfg.instances;
  out["depth"] = cfg.depth;
  out["identity_failures"] = r.identity_failures;
  out["group_law_failures"] = r.group_law_failures;
  out["carry_failures"] = r.carry_failures;
  out["difference_failures"] = r.difference_failures;
  out["max_difference_error"] = r.max_difference_error;
  out["cylinder_sum_error"] = r.cylinder_sum_error;
  out["refinement_error"] = r.refinement_error;
  out["symbol_max_z"] = r.symbol_max_z;
  out["chi2"] = r.chi2;
  out["chi2_dof"] = r.chi2_dof;
  out["chi2_z"] = r.chi2_z;
  out["passed"] = r.passed;
  return out;
}

Json cmd_segments(const Json& c) {
  MapSpec base = map_from_config(c);
  const std::size_t trials = opt<std::size_t>(c, "trials", 100);
  const std::size_t curves = opt<std::size_t>(c, "curves", 20);
  const int steps = opt<int>(c, "steps", 50);
  const std::uint64_t seed = opt<std::uint64_t>(c, "seed", 1);
  std::vector<Composition> orders;
  const std::string which = opt<std::string>(c, "order", "both");
  if (which == "both") {
    orders = {Composition::EH, Composition::HE};
  } else {
    orders = {composition_from_string(which)};
  }
  Json out;
  out["command"] = "segments";
  out["t"] = base.t;
  out["seed"] = seed;
  std::vector<Json> runs;
  bool wrote_csv = false;
  for (Composition o : orders) {
    base.order = o;
    const EndoMap f(base);
    const BoundInputs inp = BoundInputs::for_map(f);
    const SegmentPullbackResult sp = random_segment_pullbacks(f, trials, seed);
    const GuidedResult gr = guided_backward_experiment(f, curves, steps, seed + 1);
    runs.push_back({{"order", to_string(o)},
                    {"segment_length", VSegmentSpec::for_map(f).length},
                    {"segment_threshold", segment_threshold(inp)},
                    {"above_threshold", f.t() > segment_threshold(inp)},
                    {"pullback_trials", sp.trials},
                    {"pullback_successes", sp.successes},
                    {"branches_with_subsegment", sp.branches_with_subsegment},
                    {"guided_curves", gr.curves},
                    {"guided_reached", gr.reached},
                    {"guided_steps", gr.steps}});
    if (c.contains("csv") && !wrote_csv) {
      // First trial's first successful branch, for plotting.
      CounterRng rng(seed, 0);
      const VSegmentSpec spec = VSegmentSpec::for_map(f);
      const Vec2 start{rng.uniform(), rng.uniform()};
      const double s = (2.0 * rng.uniform() - 1.0) / spec.alpha * (1.0 - 1e-9);
      const Polyline seg = straight_segment(start, {s, 1.0}, spec.length, 64);
      for (std::size_t i = 1; i <= f.degree(); ++i) {
        const Polyline p = pullback_curve(f, seg, i);
        if (find_v_subsegment(p, spec)) {
          std::ostringstream os;
          p.write_csv(os);
          write_text(c.at("csv").get<std::string>(), os.str());
          wrote_csv = true;
          break;
        }
      }
    }
  }
  out["runs"] = runs;
  return out;
}

Json cmd_continuity_scan(const Json& c) {
  Json with_t = c;
  if (!with_t.contains("t")) with_t["t"] = 10.02;  // replaced per scan point
  const MapSpec base = map_from_config(with_t);
  std::vector<double> ts = {10.02, 11, 12, 13, 14, 15, 16, 17, 18, 19, 20};
  if (c.contains("ts")) ts = parse_list(c.at("ts"));
  ExponentConfig cfg = exponent_config(c);
  if (!c.contains("samples")) cfg.samples = 2000;
  const ContinuityScan scan = continuity_scan(base, ts, cfg);
  Json out;
  out["command"] = "continuity-scan";
  out["label"] = "non-rigorous smoke test for continuity of the exponents in t";
  std::vector<Json> pts;
  for (const auto& p : scan.points) {
    pts.push_back({{"t", p.t},
                   {"chi_plus", estimate_json(p.estimate.plus)},
                   {"chi_minus", estimate_json(p.estimate.minus)}});
  }
  out["points"] = pts;
  out["fitted_slope"] = scan.fitted_slope;
  out["residual_scale"] = scan.residual_scale;
  std::vector<Json> inc;
  for (const auto& i : scan.increments) {
    inc.push_back({{"from", i.t_from},
                   {"to", i.t_to},
                   {"increment", i.increment},
                   {"envelope", i.envelope},
                   {"within", i.within}});
  }
  out["increments"] = inc;
  out["passed"] = scan.passed;
  return out;
}

using Handler = std::function<Json(const Json&)>;

const std::map<std::string, Handler>& handlers() {
  static const std::map<std::string, Handler> table = {
      {"snf", cmd_snf},
      {"threshold", cmd_threshold},
      {"preimages", cmd_preimages},
      {"cchi", cmd_cchi},
      {"lyap", cmd_lyap},
      {"solenoid-check", cmd_solenoid_check},
      {"segments", cmd_segments},
      {"continuity-scan", cmd_continuity_scan},
  };
  return table;
}

CommandResult failure(int code, const std::string& kind, const std::string& message) {
  return {code, {{"error", {{"kind", kind}, {"message", message}}}}};
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n;
    for (const auto& [k, v] : handlers()) n.push_back(k);
    return n;
  }();
  return names;
}

MapSpec map_from_config(const Json& c) {
  MapSpec spec;
  if (c.contains("map")) {
    const Json& m = c.at("map");
    spec = m.is_string() ? load_map_spec(m.get<std::string>()) : map_spec_from_json(m);
    if (c.contains("t")) spec.t = c.at("t").get<double>();
  } else if (c.contains("k")) {
    if (!c.contains("t")) throw std::invalid_argument("--k needs --t");
    spec = MapSpec::standard_family(c.at("k").get<int>(), c.at("t").get<double>());
  } else {
    throw std::invalid_argument("specify a map with --k and --t, or --map FILE");
  }
  if (c.contains("order") && c.at("order").get<std::string>() != "both") {
    spec.order = composition_from_string(c.at("order").get<std::string>());
  }
  if (!std::isfinite(spec.t) || spec.t < 0.0) throw std::invalid_argument("t must be finite and >= 0");
  return spec;
}

std::vector<double> quoted_thresholds(int k, const std::string& condition) {
  const bool nuh = condition == "nuh" || condition == "NUH";
  switch (k) {
    case 2: return nuh ? std::vector<double>{1042.0, 1043.0} : std::vector<double>{10.02};
    case 3: return nuh ? std::vector<double>{216.0} : std::vector<double>{6.29};
    case 5: return nuh ? std::vector<double>{151.0} : std::vector<double>{};
    default: return {};
  }
}

CommandResult run_command(const std::string& name, const Json& config) {
  const auto it = handlers().find(name);
  if (it == handlers().end()) return failure(kExitPrecondition, "usage", "unknown command '" + name + "'");
  try {
    return {kExitOk, it->second(config)};
  } catch (const BudgetExceeded& e) {
    return failure(kExitBudget, "budget", e.what());
  } catch (const NumericalFailure& e) {
    return failure(kExitNumerical, "numerical", e.what());
  } catch (const IntMatError& e) {
    return failure(kExitPrecondition, to_string(e.kind()), e.what());
  } catch (const MapError& e) {
    return failure(kExitPrecondition, "precondition", e.what());
  } catch (const Json::exception& e) {
    return failure(kExitPrecondition, "config", e.what());
  } catch (const std::invalid_argument& e) {
    return failure(kExitPrecondition, "precondition", e.what());
  } catch (const std::out_of_range& e) {
    return failure(kExitPrecondition, "precondition", e.what());
  } catch (const std::logic_error& e) {
    return failure(kExitNumerical, "numerical", e.what());
  }
}

}  // namespace nuh
