#pragma once

// JSON model files, sweep specifications, and fixed-format number output.

#include <array>
#include <charconv>
#include <cmath>
#include <complex>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ptpoint/core.hpp"

namespace ptpoint {

using json = nlohmann::json;

/// Shortest text with 17 significant digits, '.' decimal point, independent of locale.
inline std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

namespace io_detail {

[[noreturn]] inline void fail(const std::string& field, const std::string& what) {
  throw Error(ErrorCode::ParseError, "field '" + field + "': " + what);
}

inline const json& member(const json& j, const std::string& field) {
  if (!j.is_object()) fail(field, "model must be a JSON object");
  const auto it = j.find(field);
  if (it == j.end()) fail(field, "missing");
  return *it;
}

inline double number(const json& j, const std::string& field) {
  const json& v = member(j, field);
  if (!v.is_number()) fail(field, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) fail(field, "not finite");
  return x;
}

inline double number_or(const json& j, const std::string& field, double fallback) {
  return j.contains(field) ? number(j, field) : fallback;
}

inline cplx complex_value(const json& v, const std::string& field) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
    fail(field, "expected a complex number as [re, im]");
  }
  return {v[0].get<double>(), v[1].get<double>()};
}

inline BoundaryMatrix2 matrix(const json& j, const std::string& field) {
  const json& v = member(j, field);
  if (!v.is_array() || v.size() != 2 || !v[0].is_array() || !v[1].is_array() || v[0].size() != 2 ||
      v[1].size() != 2) {
    fail(field, "expected a 2x2 array of [re, im] pairs");
  }
  return {complex_value(v[0][0], field + "[0][0]"), complex_value(v[0][1], field + "[0][1]"),
          complex_value(v[1][0], field + "[1][0]"), complex_value(v[1][1], field + "[1][1]")};
}

inline json to_json(cplx z) { return json::array({z.real(), z.imag()}); }

inline json to_json(const BoundaryMatrix2& B) {
  return json::array({json::array({to_json(B.alpha), to_json(B.beta)}),
                      json::array({to_json(B.gamma), to_json(B.delta)})});
}

}  // namespace io_detail

inline DeltaVariant parse_variant(const std::string& s) {
  if (s == "default") return DeltaVariant::Default;
  if (s == "textbook-delta") return DeltaVariant::TextbookDelta;
  throw Error(ErrorCode::ParseError, "field 'variant': expected \"default\" or \"textbook-delta\"");
}

inline const char* to_string(DeltaVariant v) {
  return v == DeltaVariant::TextbookDelta ? "textbook-delta" : "default";
}

/// Parses a model document; errors name the offending field.
inline InteractionSpec parse_model(const json& j) {
  using namespace io_detail;
  const json& t = member(j, "type");
  if (!t.is_string()) fail("type", "expected a string");
  const std::string type = t.get<std::string>();
  InteractionSpec spec;
  if (type == "connected_origin") {
    spec = ConnectedOrigin{matrix(j, "B")};
  } else if (type == "type_I") {
    const TypeIParams p{number_or(j, "theta", 0.0), number_or(j, "phi", 0.0), number(j, "b"), number(j, "c")};
    if (p.b < 0.0) fail("b", "must be >= 0");
    if (1.0 + p.b * p.c < 0.0) fail("c", "needs 1 + b c >= 0");
    spec = ConnectedOrigin{matrix_from_type_I(p)};
  } else if (type == "separated") {
    const double h0 = number(j, "h0"), h1 = number(j, "h1");
    if (h0 == 0.0 && h1 == 0.0) fail("h0", "h0 and h1 must not both vanish");
    spec = SeparatedOrigin{TypeIIParams::make(number_or(j, "theta", 0.0), h0, h1)};
  } else if (type == "two_point") {
    const double l = number(j, "l");
    if (!(l > 0.0)) fail("l", "must be positive");
    spec = TwoPoint{l, matrix(j, "B")};
  } else if (type == "delta_pair") {
    const double l = number_or(j, "l", 1.0);
    if (!(l > 0.0)) fail("l", "must be positive");
    DeltaVariant variant = DeltaVariant::Default;
    if (j.contains("variant")) {
      if (!j["variant"].is_string()) fail("variant", "expected a string");
      variant = parse_variant(j["variant"].get<std::string>());
    }
    spec = DeltaPair{number(j, "u"), number(j, "v"), l, variant};
  } else {
    fail("type", "unknown model type '" + type +
                     "' (expected connected_origin, type_I, separated, two_point or delta_pair)");
  }
  return spec;
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, "'" + path + "' is not valid JSON: " + e.what());
  }
}

inline InteractionSpec load_model(const std::string& path) { return parse_model(read_json_file(path)); }

/// Canonical document for a spec; parse_model(model_to_json(s)) == s.
inline json model_to_json(const InteractionSpec& spec) {
  using io_detail::to_json;
  if (const auto* s = std::get_if<ConnectedOrigin>(&spec)) return {{"type", "connected_origin"}, {"B", to_json(s->B)}};
  if (const auto* s = std::get_if<SeparatedOrigin>(&spec))
    return {{"type", "separated"}, {"theta", s->p.theta}, {"h0", s->p.h0}, {"h1", s->p.h1}};
  if (const auto* s = std::get_if<TwoPoint>(&spec)) return {{"type", "two_point"}, {"l", s->l}, {"B", to_json(s->B)}};
  const auto& d = std::get<DeltaPair>(spec);
  return {{"type", "delta_pair"}, {"u", d.u}, {"v", d.v}, {"l", d.l}, {"variant", to_string(d.variant)}};
}

// ---------------------------------------------------------------------------
// Sweeps

struct SweepParameter {
  std::string name;
  double min = 0.0;
  double max = 1.0;
  int steps = 2;

  double value(int i) const { return steps == 1 ? min : min + (max - min) * i / (steps - 1); }
};

struct SweepSpec {
  std::string model;
  std::vector<SweepParameter> parameters;
  json fixed = json::object();
  std::string output;
  std::optional<std::array<double, 4>> contour;

  std::size_t point_count() const {
    std::size_t n = 1;
    for (const auto& p : parameters) n *= static_cast<std::size_t>(p.steps);
    return n;
  }

  /// Parameter values of point i; the last parameter varies fastest.
  std::vector<double> point(std::size_t i) const {
    std::vector<double> v(parameters.size());
    for (std::size_t q = parameters.size(); q-- > 0;) {
      const auto steps = static_cast<std::size_t>(parameters[q].steps);
      v[q] = parameters[q].value(static_cast<int>(i % steps));
      i /= steps;
    }
    return v;
  }

  json model_at(std::size_t i) const {
    json m = fixed;
    m["type"] = model;
    const auto v = point(i);
    for (std::size_t q = 0; q < parameters.size(); ++q) m[parameters[q].name] = v[q];
    return m;
  }
};

inline SweepSpec parse_sweep(const json& j) {
  using namespace io_detail;
  SweepSpec s;
  const json& m = member(j, "model");
  if (!m.is_string()) fail("model", "expected a model type string");
  s.model = m.get<std::string>();
  const json& ps = member(j, "parameters");
  if (!ps.is_array() || ps.empty() || ps.size() > 2) fail("parameters", "expected 1 or 2 swept parameters");
  for (std::size_t q = 0; q < ps.size(); ++q) {
    const std::string f = "parameters[" + std::to_string(q) + "]";
    const json& p = ps[q];
    if (!p.is_object()) fail(f, "expected an object");
    SweepParameter sp;
    const json& name = member(p, "name");
    if (!name.is_string()) fail(f + ".name", "expected a string");
    sp.name = name.get<std::string>();
    sp.min = number(p, "min");
    sp.max = number(p, "max");
    const json& steps = member(p, "steps");
    if (!steps.is_number_integer() || steps.get<int>() < 1) fail(f + ".steps", "expected a positive integer");
    sp.steps = steps.get<int>();
    // a single step is allowed only for a degenerate range (one grid point)
    if (sp.steps == 1 && sp.min != sp.max) fail(f + ".steps", "must be >= 2 unless min == max");
    s.parameters.push_back(sp);
  }
  if (j.contains("fixed")) {
    if (!j["fixed"].is_object()) fail("fixed", "expected an object");
    s.fixed = j["fixed"];
  }
  if (j.contains("output")) {
    if (!j["output"].is_string()) fail("output", "expected a path string");
    s.output = j["output"].get<std::string>();
  }
  if (j.contains("contour")) {
    const json& c = j["contour"];
    if (!c.is_array() || c.size() != 4) fail("contour", "expected [re_min, re_max, im_min, im_max]");
    std::array<double, 4> a{};
    for (int i = 0; i < 4; ++i) {
      if (!c[i].is_number()) fail("contour", "expected numbers");
      a[i] = c[i].get<double>();
    }
    s.contour = a;
  }
  return s;
}

}  // namespace ptpoint
