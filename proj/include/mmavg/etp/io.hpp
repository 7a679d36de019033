#pragma once

#include "mmavg/etp/poly.hpp"

#include <nlohmann/json.hpp>

namespace mmavg {

using json = nlohmann::json;

inline json to_json(const FrequencyVector& f) {
  return json{{"omega", f.omega},
              {"c_D", f.c_D},
              {"nu", f.nu},
              {"resonance_tol", f.resonance_tol},
              {"max_order", f.max_order}};
}

inline FrequencyVector frequency_from_json(const json& j) {
  return FrequencyVector(j.at("omega").get<std::vector<double>>(), j.at("c_D").get<double>(),
                         j.at("nu").get<double>(), j.at("resonance_tol").get<double>(),
                         j.value("max_order", 64));
}

inline json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) rows.push_back({m(i, j).real(), m(i, j).imag()});
  return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", rows}};
}

inline Matrix matrix_from_json(const json& j) {
  const auto r = j.at("rows").get<Eigen::Index>();
  const auto c = j.at("cols").get<Eigen::Index>();
  const auto& data = j.at("data");
  if (data.size() != static_cast<std::size_t>(r * c)) throw ValidationError("matrix data length mismatch");
  Matrix m(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index k = 0; k < c; ++k) {
      const auto& z = data.at(static_cast<std::size_t>(i * c + k));
      m(i, k) = cplx(z.at(0).get<double>(), z.at(1).get<double>());
    }
  return m;
}

/// {freq, rows, cols, terms: [{alpha, lambda: [re, im], coeff: row-major [[re, im], ...]}]}
inline json to_json(const ExpTrigPoly& p) {
  json terms = json::array();
  for (const auto& t : p.terms()) {
    json coeff = json::array();
    for (Eigen::Index i = 0; i < t.coeff.rows(); ++i)
      for (Eigen::Index j = 0; j < t.coeff.cols(); ++j) coeff.push_back({t.coeff(i, j).real(), t.coeff(i, j).imag()});
    terms.push_back({{"alpha", t.mode.alpha}, {"lambda", {t.mode.lambda.real(), t.mode.lambda.imag()}}, {"coeff", coeff}});
  }
  return json{{"freq", to_json(p.freq())}, {"rows", p.rows()}, {"cols", p.cols()}, {"terms", terms}};
}

inline ExpTrigPoly poly_from_json(const json& j, const FrequencyVector* shared_freq = nullptr) {
  const FrequencyVector f = shared_freq ? *shared_freq : frequency_from_json(j.at("freq"));
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  std::vector<ExpTrigTerm> terms;
  for (const auto& t : j.at("terms")) {
    Mode m{t.at("alpha").get<MultiIndex>(), cplx(t.at("lambda").at(0).get<double>(), t.at("lambda").at(1).get<double>())};
    const auto& data = t.at("coeff");
    if (data.size() != static_cast<std::size_t>(rows * cols)) throw ValidationError("coefficient length mismatch");
    Matrix c(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
      for (Eigen::Index k = 0; k < cols; ++k) {
        const auto& z = data.at(static_cast<std::size_t>(i * cols + k));
        c(i, k) = cplx(z.at(0).get<double>(), z.at(1).get<double>());
      }
    terms.push_back({std::move(m), std::move(c)});
  }
  return ExpTrigPoly(f, rows, cols, std::move(terms));
}

}  // namespace mmavg
