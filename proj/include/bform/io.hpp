#pragma once

// JSON for forms and results. Forms use {"degree", "coeffs", "field"} with
// complex scalars as [re, im]; everything is emitted with 17 significant
// digits so that doubles survive a round trip exactly.

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <variant>

#include "bform/eigenpairs.hpp"
#include "bform/experiments.hpp"
#include "bform/rank_k.hpp"
#include "bform/real_counts.hpp"
#include "bform/spectral.hpp"

namespace bform {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// Emitting

namespace detail {

inline void emit_number(std::string& out, double v) {
  if (!std::isfinite(v)) {
    out += "null";
    return;
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
}

inline void emit(std::string& out, const json& j, int indent, int depth) {
  const auto newline = [&](int level) {
    if (indent < 0) return;
    out += '\n';
    out.append(static_cast<std::size_t>(indent * level), ' ');
  };
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      bool first = true;
      for (const auto& [key, value] : j.items()) {
        if (!first) out += ',';
        first = false;
        newline(depth + 1);
        out += json(key).dump();
        out += indent < 0 ? ":" : ": ";
        emit(out, value, indent, depth + 1);
      }
      newline(depth);
      out += '}';
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      // Arrays of scalars stay on one line.
      const bool flat = std::none_of(j.begin(), j.end(), [](const json& e) { return e.is_structured(); }) ||
                        (j.size() == 2 && j[0].is_array() && j[0].size() == 2 && !j[0][0].is_structured());
      out += '[';
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ',';
        if (flat) {
          if (i && indent >= 0) out += ' ';
        } else {
          newline(depth + 1);
        }
        emit(out, j[i], flat ? -1 : indent, depth + 1);
      }
      if (!flat) newline(depth);
      out += ']';
      return;
    }
    case json::value_t::number_float: emit_number(out, j.get<double>()); return;
    default: out += j.dump(); return;
  }
}

}  // namespace detail

/// Serializes with 17 significant digits; indent < 0 gives one line.
inline std::string dump(const json& j, int indent = 2) {
  std::string out;
  detail::emit(out, j, indent, 0);
  return out;
}

inline json scalar_json(double v) { return v; }
inline json scalar_json(cplx v) { return json::array({v.real(), v.imag()}); }

template <Scalar T>
json linear_json(const LinearForm<T>& l) {
  return json::array({scalar_json(l.a), scalar_json(l.b)});
}

template <Scalar T>
json to_json(const BinaryForm<T>& f) {
  json c = json::array();
  for (const auto& x : f.coeffs()) c.push_back(scalar_json(x));
  return {{"degree", f.degree()}, {"coeffs", std::move(c)}, {"field", f.field() == Field::Real ? "real" : "complex"}};
}

namespace detail {

inline bool nearly_real(cplx v, double scale) { return std::abs(v.imag()) <= 1e-12 * std::max(1.0, scale); }

/// ComplexForm printed as a real form when its imaginary parts vanish.
inline json form_json(const ComplexForm& f) {
  if (imaginary_ratio(f) <= 1e-12) return to_json(real_part(f));
  return to_json(f);
}

}  // namespace detail

inline json to_json(const CriticalRank1& e) {
  json j;
  if (e.is_real) {
    j["v"] = json::array({e.v.a.real(), e.v.b.real()});
    j["lambda"] = e.lambda.real();
  } else {
    j["v"] = linear_json(e.v);
    j["lambda"] = scalar_json(e.lambda);
  }
  j["multiplicity"] = e.multiplicity;
  j["real"] = e.is_real;
  if (e.isotropic) j["isotropic"] = true;
  return j;
}

inline json to_json(const DegenerateCircle& c) {
  return {{"degenerate", "circle"},
          {"degree", c.degree},
          {"eigenvalue", c.eigenvalue.imag() == 0.0 ? json(c.eigenvalue.real()) : scalar_json(c.eigenvalue)},
          {"eigenvectors", "every unit vector"}};
}

inline json to_json(const EigenResult& r) {
  if (const auto* c = std::get_if<DegenerateCircle>(&r)) return to_json(*c);
  json list = json::array();
  for (const auto& e : std::get<std::vector<CriticalRank1>>(r)) list.push_back(to_json(e));
  return {{"eigenpairs", std::move(list)}};
}

inline json to_json(const CriticalRankK& p) {
  double scale = 0.0;
  bool real = true;
  for (const auto& s : p.summands) {
    scale = std::max({scale, std::abs(s.mu), std::abs(s.l.a), std::abs(s.l.b)});
  }
  for (const auto& s : p.summands)
    real = real && detail::nearly_real(s.mu, scale) && detail::nearly_real(s.l.a, 1.0) && detail::nearly_real(s.l.b, 1.0);
  if (p.tangent) real = real && detail::nearly_real(p.tangent->nu, scale);
  const auto value = [&](cplx v) { return real ? json(v.real()) : scalar_json(v); };
  const auto line = [&](const ComplexLinear& l) { return json::array({value(l.a), value(l.b)}); };

  json summands = json::array();
  for (const auto& s : p.summands) summands.push_back({{"mu", value(s.mu)}, {"l", line(s.l)}});
  json j{{"k", p.k},
         {"summands", std::move(summands)},
         {"distance", p.distance},
         {"grad_residual", p.grad_residual},
         {"cert_residual", p.cert_residual},
         {"boundary", p.boundary},
         {"real", p.is_real}};
  if (p.tangent) j["tangent"] = {{"nu", value(p.tangent->nu)}, {"l", line(p.tangent->l)}};
  j["tensor"] = detail::form_json(p.tensor);
  j["cofactor"] = detail::form_json(p.cofactor);
  j["hits"] = p.hits;
  return j;
}

inline json to_json(const RankKSearch& s) {
  json points = json::array();
  for (const auto& p : s.points) points.push_back(to_json(p));
  return {{"points", std::move(points)},
          {"honest", s.honest_count()},
          {"boundary", s.boundary_count()},
          {"budget_exhausted", s.budget_exhausted},
          {"starts", s.starts},
          {"converged", s.converged}};
}

inline json to_json(const SpectralDecomposition& s) {
  json eigen = json::array(), coeffs = json::array(), basis = json::array();
  for (const auto& e : s.eigen) eigen.push_back(to_json(e));
  for (const auto& c : s.coeffs) coeffs.push_back(detail::nearly_real(c, 1.0) ? json(c.real()) : scalar_json(c));
  for (const auto& b : s.basis) basis.push_back(detail::form_json(b));
  return {{"eigen", std::move(eigen)},   {"coeffs", std::move(coeffs)},        {"basis", std::move(basis)},
          {"residual", s.residual},      {"rank", s.rank},                     {"multiple_roots", s.multiple_roots},
          {"membership", s.membership}};
}

inline json to_json(const RezDecomposition& r) {
  json summands = json::array();
  for (const auto& l : r.summands) summands.push_back(linear_json(l));
  return {{"d", r.d}, {"phi", r.phi}, {"c_d", r.c_d}, {"summands", std::move(summands)}, {"residual", r.residual}};
}

inline json to_json(const RealCounts& c) {
  json j{{"real_roots", c.real_roots}, {"real_crit1", c.real_crit1}, {"simple", c.simple}};
  if (c.real_crit2) {
    j["real_crit2"] = *c.real_crit2;
    j["complete"] = c.complete;
  }
  return j;
}

inline json to_json(const RootBoundReport& r) {
  json hist = json::array(), violations = json::array();
  for (const auto& [key, n] : r.histogram) hist.push_back({{"real_roots", key.first}, {"real_crit1", key.second}, {"count", n}});
  for (const auto& v : r.violations)
    violations.push_back(
        {{"form", to_json(v.form)}, {"real_roots", v.real_roots}, {"real_crit1", v.real_crit1}, {"reason", v.reason}});
  return {{"degree", r.degree},
          {"samples", r.samples},
          {"simple", r.simple},
          {"histogram", std::move(hist)},
          {"violations", std::move(violations)}};
}

inline json to_json(const TableRow& row) {
  const auto count = [](int n) { return n < 0 ? json("*") : json(n); };
  json j{{"real_roots", count(row.real_roots)},
         {"real_crit1", count(row.real_crit1)},
         {"real_crit2", row.real_crit2},
         {"listed", row.listed},
         {"expected", row.expected},
         {"found", row.found},
         {"hits", row.hits}};
  if (row.witness) {
    j["witness"] = to_json(*row.witness);
    j["source"] = to_string(row.source);
  }
  return j;
}

inline json to_json(const TableReport& t) {
  json rows = json::array();
  for (const auto& r : t.rows) rows.push_back(to_json(r));
  return {{"rows", std::move(rows)},
          {"samples", t.samples},
          {"rejected", t.rejected},
          {"time_limited", t.time_limited},
          {"all_expected_found", t.all_expected_found()}};
}

// ---------------------------------------------------------------------------
// Parsing

/// A parsed form keeps the declared field; real forms also carry real
/// coefficients.
struct ParsedForm {
  ComplexForm form;
  Field field = Field::Real;

  RealForm real() const { return real_part(form); }
};

namespace detail {

inline cplx parse_scalar(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  throw Error(ErrorCode::Parse, "expected a number or an [re, im] pair, got " + j.dump());
}

inline ParsedForm parse_coeffs(const json& coeffs, Field field) {
  if (!coeffs.is_array() || coeffs.empty()) throw Error(ErrorCode::Parse, "coeffs must be a non-empty array");
  std::vector<cplx> c;
  bool any_complex = false;
  for (const auto& x : coeffs) {
    c.push_back(parse_scalar(x));
    any_complex = any_complex || x.is_array();
  }
  if (field == Field::Real && any_complex)
    throw Error(ErrorCode::Parse, "a real form cannot have [re, im] coefficients");
  return {ComplexForm(std::move(c)), field};
}

}  // namespace detail

/// {"degree": d, "coeffs": [...], "field": "real" | "complex"}. The field
/// defaults to real unless some coefficient is an [re, im] pair.
inline ParsedForm parse_form(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::Parse, "a form must be a JSON object");
  if (!j.contains("coeffs")) throw Error(ErrorCode::Parse, "missing \"coeffs\"");
  const auto& coeffs = j.at("coeffs");
  Field field = Field::Real;
  if (j.contains("field")) {
    const auto& f = j.at("field");
    if (f == "real") field = Field::Real;
    else if (f == "complex") field = Field::Complex;
    else throw Error(ErrorCode::Parse, "field must be \"real\" or \"complex\"");
  } else if (coeffs.is_array() && std::any_of(coeffs.begin(), coeffs.end(), [](const json& x) { return x.is_array(); })) {
    field = Field::Complex;
  }
  auto out = detail::parse_coeffs(coeffs, field);
  if (j.contains("degree")) {
    const auto& d = j.at("degree");
    if (!d.is_number_integer() || d.get<int>() < 0) throw Error(ErrorCode::Parse, "degree must be a non-negative integer");
    if (d.get<int>() != out.form.degree())
      throw Error(ErrorCode::Parse, "degree " + d.dump() + " does not match " + std::to_string(coeffs.size()) +
                                        " coefficients");
  }
  return out;
}

inline json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::Parse, e.what());
  }
}

/// Accepts a JSON form object, an inline coefficient array (checked against
/// `degree` when it is non-negative), or the path of a file holding either.
inline ParsedForm read_form(const std::string& source, int degree = -1) {
  std::string text = source;
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) throw Error(ErrorCode::Parse, "empty form");
  if (text[first] != '{' && text[first] != '[') {
    std::ifstream in(source);
    if (!in) throw Error(ErrorCode::Parse, "cannot read form file " + source);
    std::ostringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  }
  const json j = parse_json(text);
  ParsedForm out;
  if (j.is_array()) {
    const bool any_complex = std::any_of(j.begin(), j.end(), [](const json& x) { return x.is_array(); });
    out = detail::parse_coeffs(j, any_complex ? Field::Complex : Field::Real);
  } else {
    out = parse_form(j);
  }
  if (degree >= 0 && out.form.degree() != degree)
    throw Error(ErrorCode::Parse, "--degree " + std::to_string(degree) + " does not match " +
                                      std::to_string(out.form.degree() + 1) + " coefficients");
  return out;
}

}  // namespace bform
