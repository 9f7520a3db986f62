#include "nuh/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

namespace nuh {

IntMatrix2 parse_matrix(const std::string& text) {
  std::array<Int, 4> e{};
  std::istringstream in(text);
  std::string item;
  std::size_t n = 0;
  while (std::getline(in, item, ',')) {
    if (n == 4) throw std::invalid_argument("matrix needs exactly four entries");
    std::size_t used = 0;
    long long v = 0;
    try {
      v = std::stoll(item, &used);
    } catch (const std::exception&) {
      throw std::invalid_argument("matrix entry '" + item + "' is not an integer");
    }
    if (item.find_first_not_of(" \t", used) != std::string::npos) {
      throw std::invalid_argument("matrix entry '" + item + "' is not an integer");
    }
    e[n++] = v;
  }
  if (n != 4) throw std::invalid_argument("matrix needs exactly four entries");
  return IntMatrix2::from_row_major(e);
}

double default_alpha_for(const IntMatrix2& linear) {
  std::vector<double> grid;
  for (int i = 11; i <= 100; ++i) grid.push_back(i / 10.0);
  // The input itself when it is already in normal position.
  const SmithDecomposition snf = smith_normal_form(linear);
  const IntMatrix2 probe = has_normal_lattice(linear, snf.tau1, snf.tau2) && !fixes_vertical(linear)
                               ? linear
                               : normalize_position(linear).normal;
  if (auto a = search_alpha(probe, grid)) return *a;
  throw MapError(MapError::Kind::uncertified_alpha, "no alpha in [1.1, 10] certifies the cones");
}

MapSpec map_spec_from_json(const Json& j) {
  if (!j.is_object()) throw std::invalid_argument("map specification must be a JSON object");
  MapSpec spec;
  const auto& lin = j.at("linear");
  if (!lin.is_array() || lin.size() != 4) {
    throw std::invalid_argument("\"linear\" must be an array of four integers");
  }
  std::array<Int, 4> e{};
  for (std::size_t i = 0; i < 4; ++i) {
    if (!lin[i].is_number_integer()) throw std::invalid_argument("\"linear\" entries must be integers");
    e[i] = lin[i].get<Int>();
  }
  spec.linear = IntMatrix2::from_row_major(e);
  validate_linear_part(spec.linear);
  spec.t = j.value("t", 0.0);
  spec.order = composition_from_string(j.value("order", std::string("EH")));
  spec.alpha = j.contains("alpha") ? j.at("alpha").get<double>() : default_alpha_for(spec.linear);

  if (j.contains("profile")) {
    const auto& p = j.at("profile");
    ShearProfile prof;
    prof.s.cos_coef = p.value("cos", std::vector<double>{0.0});
    prof.s.sin_coef = p.value("sin", std::vector<double>{});
    prof.a = p.at("a").get<double>();
    prof.b = p.at("b").get<double>();
    const auto r = p.at("regions").get<std::vector<double>>();
    if (r.size() != 4) throw std::invalid_argument("\"regions\" needs four endpoints");
    std::copy(r.begin(), r.end(), prof.regions.endpoints.begin());
    spec.profile = prof;
  } else {
    spec.profile = ShearProfile::default_for(smith_normal_form(spec.linear).tau2);
  }
  return spec;
}

Json map_spec_to_json(const MapSpec& spec) {
  Json j;
  j["linear"] = spec.linear.row_major();
  j["t"] = spec.t;
  j["alpha"] = spec.alpha;
  j["order"] = to_string(spec.order);
  j["profile"] = {{"cos", spec.profile.s.cos_coef},
                  {"sin", spec.profile.s.sin_coef},
                  {"a", spec.profile.a},
                  {"b", spec.profile.b},
                  {"regions", spec.profile.regions.endpoints}};
  return j;
}

MapSpec load_map_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open map file '" + path + "'");
  Json j;
  try {
    in >> j;
  } catch (const Json::parse_error& e) {
    throw std::invalid_argument("map file '" + path + "' is not valid JSON: " + e.what());
  }
  return map_spec_from_json(j);
}

}  // namespace nuh
