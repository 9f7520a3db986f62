#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include "nuh/commands.hpp"

namespace {

using nuh::Json;

// Options shared by the map-based subcommands.
struct MapFlags {
  int k = 2;
  double t = 0.0;
  std::string map;
  std::string order;
};

void add_map_flags(CLI::App* sub, MapFlags& m) {
  sub->add_option("--k", m.k, "standard family E_k = (2k+1)[[1,1],[0,1]]");
  sub->add_option("--t", m.t, "shear strength");
  sub->add_option("--map", m.map, "map specification (JSON file)");
  sub->add_option("--order", m.order, "composition order: EH or HE");
}

// Copies every flag the user actually passed into the config, so flags
// override values from --config.
void overlay(Json& cfg, const CLI::App* sub) {
  for (const CLI::Option* o : sub->get_options()) {
    if (o->count() == 0 || o->get_lnames().empty()) continue;
    const std::string name = o->get_lnames().front();
    if (name == "help" || name == "config") continue;
    const std::string raw = o->results().back();
    Json value;
    try {
      value = Json::parse(raw);
      if (value.is_object()) value = raw;
    } catch (const Json::parse_error&) {
      value = raw;
    }
    // Comma lists such as --matrix 5,5,0,5 stay strings.
    if (raw.find(',') != std::string::npos) value = raw;
    cfg[name] = value;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hyperbolicity certificates and exponent estimates for sheared torus endomorphisms"};
  app.require_subcommand(1);
  std::string config_path;
  std::string output_path;
  app.add_option("--config", config_path, "JSON config merged under the flags");
  app.add_option("-o,--output", output_path, "write JSON here instead of stdout");

  MapFlags mf;
  std::string matrix, condition, point, grid, csv, ts, check;
  int depth = 0, steps = 0;
  long long n = 0, samples = 0, seed = 0, budget = 0, trials = 0, curves = 0, instances = 0,
            draws = 0;

  auto* snf = app.add_subcommand("snf", "Smith normal form and normal position");
  snf->add_option("--matrix", matrix, "row-major entries a,b,c,d")->required();

  auto* thr = app.add_subcommand("threshold", "certificate thresholds in t");
  add_map_flags(thr, mf);
  thr->add_option("--condition", condition, "nuh or u1");
  thr->add_option("--check", check, "comma-separated t values to test");

  auto* pre = app.add_subcommand("preimages", "preimages with cone classification");
  add_map_flags(pre, mf);
  pre->add_option("--point", point, "x,y");
  pre->add_option("--depth", depth, "1 or 2");
  pre->add_option("--csv", csv, "CSV output path");

  auto* cchi = app.add_subcommand("cchi", "grid estimate of C_chi");
  add_map_flags(cchi, mf);
  cchi->add_option("--depth", depth, "tree depth");
  cchi->add_option("--grid", grid, "NXxNYxNDIR");
  cchi->add_option("--budget", budget, "max branches per tree");

  auto* lyap = app.add_subcommand("lyap", "Monte-Carlo Lyapunov exponents");
  add_map_flags(lyap, mf);
  lyap->add_option("--n", n, "orbit length");
  lyap->add_option("--samples", samples, "number of orbits");
  lyap->add_option("--seed", seed, "RNG seed");
  lyap->add_option("--budget", budget, "max n * samples");

  auto* sol = app.add_subcommand("solenoid-check", "coding and cylinder-measure checks");
  add_map_flags(sol, mf);
  sol->add_option("--instances", instances, "random instances");
  sol->add_option("--depth", depth, "word length");
  sol->add_option("--draws", draws, "sampled orbits for the frequency test");
  sol->add_option("--seed", seed, "RNG seed");
  sol->add_option("--budget", budget, "max cylinders enumerated");

  auto* seg = app.add_subcommand("segments", "v-segment pullback experiments");
  add_map_flags(seg, mf);
  seg->add_option("--trials", trials, "random v-segments");
  seg->add_option("--curves", curves, "curves for the guided experiment");
  seg->add_option("--steps", steps, "max guided backward steps");
  seg->add_option("--seed", seed, "RNG seed");
  seg->add_option("--csv", csv, "CSV dump of one pulled-back curve");

  auto* cont = app.add_subcommand("continuity-scan", "exponents over a range of t");
  add_map_flags(cont, mf);
  cont->add_option("--ts", ts, "comma-separated t values");
  cont->add_option("--n", n, "orbit length");
  cont->add_option("--samples", samples, "orbits per t");
  cont->add_option("--seed", seed, "RNG seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : nuh::kExitPrecondition;
  }

  const CLI::App* sub = app.get_subcommands().front();
  Json cfg = Json::object();
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) {
      std::cerr << "cannot open config '" << config_path << "'\n";
      return nuh::kExitPrecondition;
    }
    try {
      in >> cfg;
    } catch (const Json::parse_error& e) {
      std::cerr << "config is not valid JSON: " << e.what() << '\n';
      return nuh::kExitPrecondition;
    }
  }
  overlay(cfg, sub);

  const nuh::CommandResult res = nuh::run_command(sub->get_name(), cfg);
  const std::string text = res.output.dump(2) + "\n";
  if (output_path.empty()) {
    (res.exit_code == 0 ? std::cout : std::cerr) << text;
  } else {
    std::ofstream(output_path) << text;
  }
  return res.exit_code;
}
