// JSON wire formats: states, dice specs, correlation reports, CHSH results,
// classifications, and sampling estimates. Numbers are emitted at 15
// significant digits; inputs are validated strictly (unknown keys are
// errors).

#pragma once

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qcov/bellwitness.hpp"
#include "qcov/core.hpp"
#include "qcov/correlation.hpp"
#include "qcov/counterexamples.hpp"
#include "qcov/lhv.hpp"
#include "qcov/types.hpp"

namespace qcov {

using Json = nlohmann::json;

// ---------------------------------------------------------------------------
// Number and matrix encoding
// ---------------------------------------------------------------------------

/// Round to 15 significant digits (the wire precision).
inline double round15(double x) {
  if (!std::isfinite(x)) throw NumericError("round15: non-finite value on the wire");
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15g", x);
  return std::strtod(buf, nullptr);
}

inline Json number15(double x) { return Json(round15(x)); }

/// Row-major nested arrays of [re, im] pairs.
inline Json matrix_to_json(const CMatrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      row.push_back(Json::array({number15(m(i, j).real()), number15(m(i, j).imag())}));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline CMatrix matrix_from_json(const Json& j) {
  if (!j.is_array() || j.empty())
    throw InvalidInputError("matrix: expected a non-empty array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto& first = j.front();
  if (!first.is_array() || first.empty())
    throw InvalidInputError("matrix: each row must be a non-empty array");
  const auto cols = static_cast<Eigen::Index>(first.size());
  CMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto& row = j.at(static_cast<std::size_t>(i));
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
      throw InvalidInputError("matrix: ragged rows");
    for (Eigen::Index k = 0; k < cols; ++k) {
      const auto& entry = row.at(static_cast<std::size_t>(k));
      if (!entry.is_array() || entry.size() != 2 || !entry.at(0).is_number() ||
          !entry.at(1).is_number())
        throw InvalidInputError("matrix: entries must be [re, im] number pairs");
      m(i, k) = Complex(entry.at(0).get<double>(), entry.at(1).get<double>());
    }
  }
  return m;
}

// ---------------------------------------------------------------------------
// States
// ---------------------------------------------------------------------------

namespace detail {

inline void require_keys(const Json& j, std::initializer_list<const char*> allowed,
                         const char* what) {
  for (const auto& [key, value] : j.items()) {
    (void)value;
    bool ok = false;
    for (const char* k : allowed) ok |= key == k;
    if (!ok)
      throw InvalidInputError(std::string(what) + ": unknown key '" + key + "'");
  }
}

inline std::optional<Split> split_from_json(const Json& j) {
  if (!j.contains("split")) return std::nullopt;
  const Json& s = j.at("split");
  if (!s.is_array() || s.size() != 2 || !s.at(0).is_number_integer() ||
      !s.at(1).is_number_integer())
    throw InvalidInputError("state: 'split' must be an array of two integers");
  return Split{s.at(0).get<Eigen::Index>(), s.at(1).get<Eigen::Index>()};
}

inline void check_declared_split(const std::optional<Split>& declared, const Split& actual) {
  if (declared && !(*declared == actual))
    throw DimensionError("state: declared split " + to_string(*declared) +
                         " does not match content split " + to_string(actual));
}

}  // namespace detail

inline Json state_to_json(const StateSpec& spec) {
  Json out;
  const Split s = spec.split();
  out["split"] = Json::array({s.d1, s.d2});
  switch (spec.kind()) {
    case StateSpec::Kind::Product: {
      const auto& p = spec.as_product();
      out["spec"] = Json{{"product", Json::array({matrix_to_json(p.left.matrix()),
                                                  matrix_to_json(p.right.matrix())})}};
      break;
    }
    case StateSpec::Kind::Mixture: {
      Json terms = Json::array();
      for (const auto& t : spec.as_mixture().terms)
        terms.push_back(Json::array({number15(t.weight), matrix_to_json(t.left.matrix()),
                                     matrix_to_json(t.right.matrix())}));
      out["spec"] = Json{{"mixture", std::move(terms)}};
      break;
    }
    default:
      out["spec"] = Json{{"general", matrix_to_json(spec.as_general().rho.matrix())}};
  }
  return out;
}

inline StateSpec state_from_json(const Json& j) {
  if (!j.is_object()) throw InvalidInputError("state: expected a JSON object");
  detail::require_keys(j, {"split", "spec"}, "state");
  if (!j.contains("spec") || !j.at("spec").is_object())
    throw InvalidInputError("state: missing 'spec' object");
  const Json& spec = j.at("spec");
  if (spec.size() != 1)
    throw InvalidInputError("state: 'spec' must contain exactly one of "
                            "product/mixture/general/werner/bell");
  const std::optional<Split> declared = detail::split_from_json(j);

  if (spec.contains("product")) {
    const Json& p = spec.at("product");
    if (!p.is_array() || p.size() != 2)
      throw InvalidInputError("state: 'product' must be [M1, M2]");
    DensityOperator left{matrix_from_json(p.at(0))};
    DensityOperator right{matrix_from_json(p.at(1))};
    detail::check_declared_split(declared, Split{left.dim(), right.dim()});
    return StateSpec::product(std::move(left), std::move(right));
  }
  if (spec.contains("mixture")) {
    const Json& terms = spec.at("mixture");
    if (!terms.is_array() || terms.empty())
      throw InvalidInputError("state: 'mixture' must be a non-empty array of [p, M1, M2]");
    std::vector<MixtureTerm> parsed;
    parsed.reserve(terms.size());
    for (const auto& t : terms) {
      if (!t.is_array() || t.size() != 3 || !t.at(0).is_number())
        throw InvalidInputError("state: each mixture term must be [p, M1, M2]");
      parsed.push_back({t.at(0).get<double>(), DensityOperator(matrix_from_json(t.at(1))),
                        DensityOperator(matrix_from_json(t.at(2)))});
    }
    detail::check_declared_split(declared,
                                 Split{parsed.front().left.dim(), parsed.front().right.dim()});
    return StateSpec::mixture(std::move(parsed));
  }
  if (spec.contains("general")) {
    if (!declared)
      throw InvalidInputError("state: 'general' requires an explicit 'split'");
    return StateSpec::general(DensityOperator(matrix_from_json(spec.at("general")), *declared));
  }
  if (spec.contains("werner")) {
    if (!spec.at("werner").is_number())
      throw InvalidInputError("state: 'werner' must be a number");
    detail::check_declared_split(declared, Split{2, 2});
    return werner(spec.at("werner").get<double>());
  }
  if (spec.contains("bell")) {
    if (!spec.at("bell").is_string())
      throw InvalidInputError("state: 'bell' must be a string");
    detail::check_declared_split(declared, Split{2, 2});
    const std::string name = spec.at("bell").get<std::string>();
    return StateSpec::general(bell_state(bell_kind_from_string(name)));
  }
  throw InvalidInputError("state: 'spec' must contain one of product/mixture/general/werner/bell");
}

inline Json parse_json_text(const std::string& text, const char* what) {
  try {
    return Json::parse(text);
  } catch (const Json::exception& e) {
    throw InvalidInputError(std::string(what) + ": JSON parse failure: " + e.what());
  }
}

inline Json read_json_file(const std::string& path, const char* what) {
  std::ifstream in(path);
  if (!in) throw InvalidInputError(std::string(what) + ": cannot open '" + path + "'");
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_json_text(text, what);
}

/// Accepts the state keywords `bell:phi+|phi-|psi+|psi-`, `werner:<p>`,
/// `maxmixed:<d1>x<d2>`, or a path to a state JSON file.
inline StateSpec state_from_string(const std::string& text) {
  if (text.rfind("bell:", 0) == 0)
    return StateSpec::general(bell_state(bell_kind_from_string(text.substr(5))));
  if (text.rfind("werner:", 0) == 0) {
    try {
      std::size_t used = 0;
      const double p = std::stod(text.substr(7), &used);
      if (used != text.size() - 7) throw std::invalid_argument("trailing junk");
      return werner(p);
    } catch (const std::invalid_argument&) {
      throw InvalidInputError("state: cannot parse werner parameter in '" + text + "'");
    } catch (const std::out_of_range&) {
      throw InvalidInputError("state: werner parameter out of range in '" + text + "'");
    }
  }
  if (text.rfind("maxmixed:", 0) == 0) {
    const std::string dims = text.substr(9);
    const auto x = dims.find('x');
    if (x == std::string::npos)
      throw InvalidInputError("state: expected maxmixed:<d1>x<d2>, got '" + text + "'");
    try {
      const auto d1 = static_cast<Eigen::Index>(std::stoll(dims.substr(0, x)));
      const auto d2 = static_cast<Eigen::Index>(std::stoll(dims.substr(x + 1)));
      return maximally_mixed(Split{d1, d2});
    } catch (const std::logic_error&) {
      throw InvalidInputError("state: cannot parse dimensions in '" + text + "'");
    }
  }
  return state_from_json(read_json_file(text, "state"));
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

inline Json report_to_json(const CorrelationReport& r) {
  return Json{{"e_a", number15(r.e_a)},   {"e_b", number15(r.e_b)},
              {"e_ab", number15(r.e_ab)}, {"cov", number15(r.cov)},
              {"var_a", number15(r.var_a)}, {"var_b", number15(r.var_b)}};
}

inline Json vector3_to_json(const Vector3& v) {
  return Json::array({number15(v.x()), number15(v.y()), number15(v.z())});
}

inline Json settings_to_json(const ChshSettings& s) {
  return Json{{"a", vector3_to_json(s.a)},
              {"a_prime", vector3_to_json(s.a_prime)},
              {"b", vector3_to_json(s.b)},
              {"b_prime", vector3_to_json(s.b_prime)}};
}

inline Json chsh_result_to_json(const ChshResult& r) {
  return Json{{"value", number15(r.value)},
              {"settings", settings_to_json(r.settings)},
              {"correlators", Json{{"ab", number15(r.correlators.ab)},
                                   {"ab_prime", number15(r.correlators.ab_prime)},
                                   {"a_prime_b", number15(r.correlators.a_prime_b)},
                                   {"a_prime_b_prime",
                                    number15(r.correlators.a_prime_b_prime)}}},
              {"converged", r.converged}};
}

inline Json classification_to_json(const Classification& c) {
  Json out{{"verdict", to_string(c.verdict)},
           {"construction", c.construction},
           {"note", c.note}};
  if (c.min_pt_eigenvalue) out["min_pt_eigenvalue"] = number15(*c.min_pt_eigenvalue);
  if (c.chsh_bound) out["chsh_bound"] = number15(*c.chsh_bound);
  return out;
}

inline Json sample_estimate_to_json(const SampleEstimate& est, std::uint64_t seed) {
  return Json{{"n", est.counts.n},
              {"mean_a", number15(est.report.e_a)},
              {"mean_b", number15(est.report.e_b)},
              {"mean_ab", number15(est.report.e_ab)},
              {"cov_hat", number15(est.report.cov)},
              {"stderr_cov", number15(est.cov_stderr)},
              {"seed", seed}};
}

// ---------------------------------------------------------------------------
// Dice specs
// ---------------------------------------------------------------------------

namespace detail {

inline Prob prob_from_json(const Json& j, const char* what) {
  if (j.is_string()) return Prob(Rational::parse(j.get<std::string>()));
  if (j.is_number()) {
    Prob p(j.get<double>());
    p.exact = Rational::from_double(p.value);
    return p;
  }
  throw InvalidInputError(std::string(what) + ": entries must be numbers or fraction strings");
}

}  // namespace detail

inline DiceSpec dice_from_json(const Json& j) {
  if (!j.is_object()) throw InvalidInputError("dice: expected a JSON object");
  detail::require_keys(j, {"pairs"}, "dice");
  if (!j.contains("pairs") || !j.at("pairs").is_array() || j.at("pairs").empty())
    throw InvalidInputError("dice: missing non-empty 'pairs' array");
  DiceSpec spec;
  for (const auto& row : j.at("pairs")) {
    if (!row.is_array() || row.size() != 3)
      throw InvalidInputError("dice: each pair must be [mix_prob, p1, p2]");
    spec.pairs.push_back({detail::prob_from_json(row.at(0), "dice"),
                          detail::prob_from_json(row.at(1), "dice"),
                          detail::prob_from_json(row.at(2), "dice")});
  }
  spec.validate();
  return spec;
}

inline Json dice_to_json(const DiceSpec& spec) {
  Json pairs = Json::array();
  for (const auto& p : spec.pairs) {
    Json row = Json::array();
    for (const Prob* q : {&p.weight, &p.p1, &p.p2})
      row.push_back(q->exact ? Json(q->exact->str()) : number15(q->value));
    pairs.push_back(std::move(row));
  }
  return Json{{"pairs", std::move(pairs)}};
}

/// Exact-mode dice report: the numeric CorrelationReport plus an "exact"
/// object with fraction strings when every input has an exact form.
inline Json dice_exact_report_json(const DiceSpec& spec) {
  Json out = report_to_json(dice_exact(spec));
  if (const auto m = dice_exact_rational(spec)) {
    out["exact"] = Json{{"e_a", m->e_a.str()},   {"e_b", m->e_b.str()},
                        {"e_ab", m->e_ab.str()}, {"cov", m->cov.str()},
                        {"var_a", m->var_a.str()}, {"var_b", m->var_b.str()}};
  }
  return out;
}

// ---------------------------------------------------------------------------
// Demo reports
// ---------------------------------------------------------------------------

inline Json position_report_to_json(const PositionCovReport& r) {
  return Json{{"demo", "position"},
              {"cov_ab", number15(r.report.cov)},
              {"var_x1", number15(r.var_x1)},
              {"var_x2", number15(r.var_x2)},
              {"identity_residual", number15(r.identity_residual)},
              {"report", report_to_json(r.report)},
              {"classification", classification_to_json(r.classification)}};
}

inline Json spin_report_to_json(const SpinCovReport& r) {
  return Json{{"demo", "spin"},
              {"cov", number15(r.report.cov)},
              {"e_sz2", number15(r.report.e_a)},
              {"e_sx2", number15(r.report.e_b)},
              {"closed_form", number15(r.closed_form)},
              {"report", report_to_json(r.report)},
              {"classification", classification_to_json(r.classification)}};
}

// ---------------------------------------------------------------------------
// CLI argument plumbing
// ---------------------------------------------------------------------------

/// Twelve comma-separated reals: a, a', b, b' as Bloch 3-vectors. Each
/// vector is normalized, so near-unit input like 0.7071,0,0.7071 is exact
/// after parsing.
inline ChshSettings settings_from_string(const std::string& csv) {
  std::vector<double> values;
  std::size_t start = 0;
  while (start <= csv.size()) {
    const auto comma = csv.find(',', start);
    const std::string token =
        csv.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    try {
      std::size_t used = 0;
      values.push_back(std::stod(token, &used));
      if (used != token.size()) throw std::invalid_argument("trailing junk");
    } catch (const std::logic_error&) {
      throw InvalidInputError("settings: cannot parse '" + token + "' as a real number");
    }
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (values.size() != 12)
    throw InvalidInputError("settings: expected 12 comma-separated reals, got " +
                            std::to_string(values.size()));
  auto unit = [&](int k) {
    Vector3 v(values[static_cast<std::size_t>(3 * k)],
              values[static_cast<std::size_t>(3 * k + 1)],
              values[static_cast<std::size_t>(3 * k + 2)]);
    const double n = v.norm();
    if (n < 1e-12) throw InvalidInputError("settings: zero direction vector");
    return Vector3(v / n);
  };
  return ChshSettings(unit(0), unit(1), unit(2), unit(3));
}

/// Comma-separated 3-vector, normalized to a unit Bloch direction.
inline Vector3 bloch_from_string(const std::string& csv) {
  std::vector<double> values;
  std::size_t start = 0;
  while (start <= csv.size()) {
    const auto comma = csv.find(',', start);
    const std::string token =
        csv.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    try {
      std::size_t used = 0;
      values.push_back(std::stod(token, &used));
      if (used != token.size()) throw std::invalid_argument("trailing junk");
    } catch (const std::logic_error&) {
      throw InvalidInputError("bloch: cannot parse '" + token + "' as a real number");
    }
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (values.size() != 3)
    throw InvalidInputError("bloch: expected 3 comma-separated reals, got " +
                            std::to_string(values.size()));
  Vector3 v(values[0], values[1], values[2]);
  const double n = v.norm();
  if (n < 1e-12) throw InvalidInputError("bloch: zero vector");
  return Vector3(v / n);
}

}  // namespace qcov
