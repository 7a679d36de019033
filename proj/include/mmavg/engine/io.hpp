#pragma once

#include "mmavg/engine/decomposition.hpp"
#include "mmavg/etp/io.hpp"

#include <fstream>
#include <string>

namespace mmavg {

inline constexpr const char* kDecompositionSchema = "mmavg.decomposition";
inline constexpr int kDecompositionVersion = 1;

inline json to_json(const EpsPoly& p) {
  json c = json::array();
  for (const auto& x : p.coeffs()) {
    json t = to_json(x);
    t.erase("freq");
    c.push_back(std::move(t));
  }
  return c;
}

inline EpsPoly eps_poly_from_json(const json& j, const FrequencyVector& f) {
  std::vector<ExpTrigPoly> c;
  for (const auto& x : j) c.push_back(poly_from_json(x, &f));
  return EpsPoly(std::move(c));
}

inline json to_json(const MicroMacroDecomposition& dec) {
  json phis = json::array();
  for (const auto& p : dec.phis) phis.push_back(to_json(p));
  json A = json::array();
  for (const auto& m : dec.A.coeffs) A.push_back(matrix_to_json(m));
  const auto& k = dec.constants;
  return json{{"schema", kDecompositionSchema},
              {"version", kDecompositionVersion},
              {"order", dec.order},
              {"freq", to_json(dec.phi().freq())},
              {"eps_n", dec.eps_n},
              {"constants",
               {{"c", k.c},
                {"N_c", k.N_c},
                {"L_c", k.L_c},
                {"c_I", k.c_I},
                {"mu", k.mu},
                {"mu_n", k.mu_n},
                {"M", k.M},
                {"mu_ladder", k.mu_ladder}}},
              {"phis", phis},
              {"A", A},
              {"delta", to_json(dec.delta)}};
}

inline MicroMacroDecomposition decomposition_from_json(const json& j) {
  if (j.value("schema", std::string()) != kDecompositionSchema) throw ValidationError("not a decomposition document");
  if (j.at("version").get<int>() != kDecompositionVersion)
    throw ValidationError("unsupported decomposition version " + j.at("version").dump());
  const FrequencyVector f = frequency_from_json(j.at("freq"));
  MicroMacroDecomposition dec;
  dec.order = j.at("order").get<int>();
  dec.eps_n = j.at("eps_n").get<double>();
  const auto& k = j.at("constants");
  dec.constants.c = k.at("c").get<double>();
  dec.constants.N_c = k.at("N_c").get<double>();
  dec.constants.L_c = k.at("L_c").get<double>();
  dec.constants.c_I = k.at("c_I").get<double>();
  dec.constants.mu = k.at("mu").get<double>();
  dec.constants.mu_n = k.at("mu_n").get<double>();
  dec.constants.M = k.at("M").get<double>();
  dec.constants.mu_ladder = k.at("mu_ladder").get<std::vector<double>>();
  for (const auto& p : j.at("phis")) dec.phis.push_back(eps_poly_from_json(p, f));
  for (const auto& m : j.at("A")) dec.A.coeffs.push_back(matrix_from_json(m));
  dec.delta = eps_poly_from_json(j.at("delta"), f);
  if (dec.phis.size() != static_cast<std::size_t>(dec.order) + 2)
    throw ValidationError("decomposition document has the wrong number of maps");
  return dec;
}

inline void save_decomposition(const MicroMacroDecomposition& dec, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path);
  out << to_json(dec).dump(1) << '\n';
  if (!out) throw Error("write failed: " + path);
}

inline MicroMacroDecomposition load_decomposition(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  return decomposition_from_json(json::parse(in));
}

}  // namespace mmavg
