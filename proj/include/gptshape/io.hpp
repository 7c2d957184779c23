#pragma once

// JSON interchange formats (schema 1) and CSV exports.

#include <complex>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <variant>

#include <json.hpp>

#include "gptshape/error.hpp"
#include "gptshape/geometry.hpp"
#include "gptshape/gpt.hpp"
#include "gptshape/polynomial.hpp"
#include "gptshape/recovery.hpp"
#include "gptshape/transform.hpp"

namespace gptshape {

using json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kToolVersion = "0.1.0";

// -- Poly2 -------------------------------------------------------------------

inline json to_json(const Poly2& p) {
  json c = json::array();
  for (int i = 0; i < p.coeffs().size(); ++i) c.push_back(p.coeffs()[i]);
  return {{"degree", p.degree()}, {"coeffs", c}};
}

inline Poly2 poly_from_json(const json& j) {
  try {
    const int d = j.at("degree").get<int>();
    const auto& c = j.at("coeffs");
    if (!c.is_array() || static_cast<int>(c.size()) != basis_size(d))
      throw Error(ErrorCode::ParseError, "coeffs must hold (d+1)(d+2)/2 = " + std::to_string(basis_size(d)) + " values");
    Eigen::VectorXd v(c.size());
    for (size_t i = 0; i < c.size(); ++i) v[static_cast<Eigen::Index>(i)] = c[i].get<double>();
    return Poly2(d, v);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("invalid polynomial JSON: ") + e.what());
  }
}

// -- GptMatrix ---------------------------------------------------------------

inline json index_list(const std::vector<MultiIndex>& v) {
  json out = json::array();
  for (const auto& a : v) out.push_back({a.a1, a.a2});
  return out;
}

template <class Scalar>
inline json to_json(const GptMatrix<Scalar>& m) {
  constexpr bool is_complex = !std::is_same_v<Scalar, double>;
  json entries = json::array();
  for (int r = 0; r < m.rows(); ++r)
    for (int c = 0; c < m.cols(); ++c) {
      if constexpr (is_complex)
        entries.push_back({std::real(m.entries(r, c)), std::imag(m.entries(r, c))});
      else
        entries.push_back(m.entries(r, c));
    }
  json j;
  j["schema"] = kSchemaVersion;
  if constexpr (is_complex)
    j["lambda"] = {std::real(m.lambda), std::imag(m.lambda)};
  else
    j["lambda"] = m.lambda;
  j["complex"] = is_complex;
  j["d"] = m.d;
  j["row_degree"] = m.row_degree;
  j["row_alphas"] = index_list(m.row_alphas);
  j["col_betas"] = index_list(m.col_betas);
  j["entries"] = entries;
  return j;
}

namespace detail {

inline std::vector<MultiIndex> parse_indices(const json& j) {
  std::vector<MultiIndex> out;
  for (const auto& a : j) out.push_back({a.at(0).get<int>(), a.at(1).get<int>()});
  return out;
}

template <class Scalar>
inline GptMatrix<Scalar> gpt_from_json_impl(const json& j) {
  GptMatrix<Scalar> m;
  m.d = j.at("d").get<int>();
  m.row_alphas = parse_indices(j.at("row_alphas"));
  m.col_betas = parse_indices(j.at("col_betas"));
  m.row_degree = j.contains("row_degree") ? j.at("row_degree").get<int>() : 2 * m.d;
  if (m.row_alphas != enumerate_multiindices(1, m.row_degree) || m.col_betas != enumerate_multiindices(0, m.d))
    throw Error(ErrorCode::ParseError, "row/column index lists are not the graded-lex enumerations");
  const auto& e = j.at("entries");
  if (static_cast<int>(e.size()) != m.rows() * m.cols()) throw Error(ErrorCode::ParseError, "entry count mismatch");
  m.entries.resize(m.rows(), m.cols());
  for (int r = 0; r < m.rows(); ++r)
    for (int c = 0; c < m.cols(); ++c) {
      const auto& v = e[static_cast<size_t>(r * m.cols() + c)];
      if constexpr (std::is_same_v<Scalar, double>)
        m.entries(r, c) = v.get<double>();
      else
        m.entries(r, c) = v.is_array() ? Scalar(v.at(0).get<double>(), v.at(1).get<double>()) : Scalar(v.get<double>());
    }
  if constexpr (std::is_same_v<Scalar, double>)
    m.lambda = j.at("lambda").get<double>();
  else
    m.lambda = j.at("lambda").is_array() ? Scalar(j["lambda"][0].get<double>(), j["lambda"][1].get<double>())
                                         : Scalar(j["lambda"].get<double>());
  return m;
}

} // namespace detail

inline bool gpt_json_is_complex(const json& j) { return j.value("complex", false); }

template <class Scalar = double>
inline GptMatrix<Scalar> gpt_from_json(const json& j) {
  try {
    if constexpr (std::is_same_v<Scalar, double>)
      if (gpt_json_is_complex(j)) throw Error(ErrorCode::ParseError, "complex GPT matrix read as real");
    return detail::gpt_from_json_impl<Scalar>(j);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("invalid GPT JSON: ") + e.what());
  }
}

// -- RecoveryResult / MatchResult -------------------------------------------

inline json to_json(const RecoveryResult& r) {
  json j;
  j["schema"] = kSchemaVersion;
  j["g"] = to_json(r.g);
  j["singular_values"] = r.singular_values;
  j["kernel_gap"] = r.kernel_gap;
  j["residual"] = r.residual;
  if (r.lambda.imag() == 0)
    j["lambda"] = r.lambda.real();
  else
    j["lambda"] = {r.lambda.real(), r.lambda.imag()};
  j["flags"] = r.flags;
  return j;
}

/// Accepts either a bare Poly2 document or anything with a "g" member.
inline Poly2 poly_from_any_json(const json& j) {
  if (j.contains("g")) return poly_from_json(j.at("g"));
  return poly_from_json(j);
}

inline json to_json(const MatchResult& m) {
  json alts = json::array();
  for (const auto& a : m.alternates) {
    json aj = {{"s", a.transform.s}, {"theta", a.transform.theta}, {"sign", a.sign}, {"eps", a.epsilon}};
    if (a.transform.reflected) aj["reflected"] = true;
    alts.push_back(aj);
  }
  json j;
  j["schema"] = kSchemaVersion;
  j["s"] = m.best.s;
  j["theta"] = m.best.theta;
  j["sign"] = m.sign;
  j["epsilon_match"] = m.epsilon_match;
  j["reflected"] = m.best.reflected;
  j["alternates"] = alts;
  j["boundedness"] = to_string(m.observed_boundedness);
  return j;
}

// -- ShapeSpec ---------------------------------------------------------------

inline json point_json(const Point& p) { return {p.x(), p.y()}; }
inline Point point_from(const json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }

inline json to_json(const Box& b) { return {b.xmin, b.xmax, b.ymin, b.ymax}; }
inline Box box_from_json(const json& j) {
  return {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>(), j.at(3).get<double>()};
}

inline json to_json(const ShapeSpec& spec) {
  return std::visit(
      [](const auto& s) -> json {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, EllipseShape>) {
          return {{"kind", s.a == s.b && s.tilt == 0 ? "disk" : "ellipse"},
                  {"a", s.a},
                  {"b", s.b},
                  {"center", point_json(s.center)},
                  {"tilt", s.tilt}};
        } else if constexpr (std::is_same_v<T, FlowerShape>) {
          return {{"kind", "flower"},           {"radius", s.radius},
                  {"amplitude", s.amplitude},   {"petals", s.petals},
                  {"missing_petal", s.missing_petal}, {"center", point_json(s.center)},
                  {"phase", s.phase}};
        } else if constexpr (std::is_same_v<T, LemniscateShape>) {
          json poles = json::array();
          for (const auto& p : s.poles) poles.push_back(point_json(p));
          return {{"kind", "lemniscate"}, {"poles", poles}, {"level", s.level}};
        } else if constexpr (std::is_same_v<T, PolygonShape>) {
          json v = json::array();
          for (const auto& p : s.vertices) v.push_back(point_json(p));
          return {{"kind", "polygon"}, {"vertices", v}};
        } else {
          return {{"kind", "implicit"}, {"poly", to_json(s.poly)}, {"box", to_json(s.box)}};
        }
      },
      spec);
}

inline ShapeSpec shape_from_json(const json& j) {
  try {
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "disk") {
      const double r = j.contains("radius") ? j["radius"].get<double>() : j.value("a", 1.0);
      return disk_shape(r, j.contains("center") ? point_from(j["center"]) : Point::Zero());
    }
    if (kind == "ellipse")
      return EllipseShape{j.at("a").get<double>(), j.at("b").get<double>(),
                          j.contains("center") ? point_from(j["center"]) : Point::Zero(), j.value("tilt", 0.0)};
    if (kind == "flower")
      return FlowerShape{j.value("radius", 1.0),
                         j.value("amplitude", 0.3),
                         j.value("petals", 5),
                         j.value("missing_petal", false),
                         j.contains("center") ? point_from(j["center"]) : Point::Zero(),
                         j.value("phase", 0.0)};
    if (kind == "lemniscate") {
      LemniscateShape s;
      for (const auto& p : j.at("poles")) s.poles.push_back(point_from(p));
      s.level = j.at("level").get<double>();
      return s;
    }
    if (kind == "polygon") {
      PolygonShape s;
      for (const auto& p : j.at("vertices")) s.vertices.push_back(point_from(p));
      return s;
    }
    if (kind == "implicit")
      return ImplicitShape{poly_from_json(j.at("poly")), j.contains("box") ? box_from_json(j["box"]) : Box{}};
    throw Error(ErrorCode::ParseError, "unknown shape kind '" + kind + "'");
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("invalid shape JSON: ") + e.what());
  }
}

namespace detail {

inline std::vector<double> parse_numbers(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw Error(ErrorCode::InvalidArgument, "not a number: '" + tok + "'");
    }
  }
  return out;
}

} // namespace detail

/// Compact shape syntax used on the command line:
///   disk[:r]  ellipse:a,b[,tilt]  flower[:R,A,m]  flower-missing[:R,A,m]
///   triangle[:side]  diamond[:half_diagonal]  square[:side]  lemniscate[:r[,pole_x]]
inline ShapeSpec shape_from_string(const std::string& text) {
  const auto colon = text.find(':');
  const std::string kind = text.substr(0, colon);
  const std::vector<double> v = colon == std::string::npos ? std::vector<double>{} : detail::parse_numbers(text.substr(colon + 1));
  auto arg = [&](std::size_t i, double def) { return i < v.size() ? v[i] : def; };
  auto at_most = [&](std::size_t n) {
    if (v.size() > n) throw Error(ErrorCode::InvalidArgument, "too many parameters for shape '" + kind + "'");
  };
  if (kind == "disk") {
    at_most(1);
    return disk_shape(arg(0, 1.0));
  }
  if (kind == "ellipse") {
    if (v.size() < 2) throw Error(ErrorCode::InvalidArgument, "ellipse needs a,b");
    at_most(3);
    return EllipseShape{v[0], v[1], Point::Zero(), arg(2, 0.0)};
  }
  if (kind == "flower" || kind == "flower-missing") {
    at_most(3);
    return FlowerShape{arg(0, 1.0), arg(1, 0.3), static_cast<int>(arg(2, 5)), kind == "flower-missing", Point::Zero(), 0.0};
  }
  if (kind == "triangle") {
    at_most(1);
    return triangle_shape(arg(0, 1.0));
  }
  if (kind == "diamond") {
    at_most(1);
    return diamond_shape(arg(0, 1.0));
  }
  if (kind == "square") {
    at_most(1);
    const double h = arg(0, 1.0) / 2;
    return PolygonShape{{Point(-h, -h), Point(h, -h), Point(h, h), Point(-h, h)}};
  }
  if (kind == "lemniscate") {
    at_most(2);
    const double px = arg(1, 1.0);
    return LemniscateShape{{Point(-px, 0), Point(px, 0)}, arg(0, 0.5)};
  }
  throw Error(ErrorCode::InvalidArgument, "unknown shape '" + kind + "'");
}

// -- CSV and files -------------------------------------------------------------

/// One row per node: x,y,nx,ny,w,kappa,component.
inline std::string boundary_csv(const DiscretizedBoundary& b) {
  std::ostringstream s;
  s << "x,y,nx,ny,w,kappa,component\n";
  char buf[256];
  for (int i = 0; i < b.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%d\n", b.nodes(0, i), b.nodes(1, i),
                  b.normals(0, i), b.normals(1, i), b.weights[i], b.curvatures[i], b.component[i]);
    s << buf;
  }
  return s.str();
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
  out << text;
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path);
}

inline void write_json(const std::string& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

inline json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, path + ": " + e.what());
  }
}

} // namespace gptshape
