#pragma once

// Text and JSON forms of ring elements, bundles and forms.
//
// Expressions use + - * / ^, parentheses, integers (reduced mod p), the
// coordinate `t` and the field generator `a` (extension fields only).
// Exponents are integers and may be negative for units.

#include <cctype>
#include <cstddef>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ptconn/chartring.hpp"
#include "ptconn/cover.hpp"
#include "ptconn/error.hpp"
#include "ptconn/forms.hpp"

namespace ptconn {

using Json = nlohmann::ordered_json;

namespace detail {

class ExprParser {
 public:
  ExprParser(const ChartRing& R, std::string text) : R_(R), s_(std::move(text)) {}

  RingElem parse() {
    RingElem v = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return v;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError(what + " at position " + std::to_string(pos_) + " in \"" + s_ + "\"");
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  RingElem expr() {
    RingElem v = term();
    for (;;) {
      if (eat('+'))
        v = v + term();
      else if (eat('-'))
        v = v - term();
      else
        return v;
    }
  }
  RingElem term() {
    RingElem v = unary();
    for (;;) {
      if (eat('*')) {
        v = v * unary();
      } else if (eat('/')) {
        RingElem d = unary();
        if (d.is_zero()) fail("division by zero");
        if (!d.is_unit()) fail("division by a non-unit " + d.to_string());
        v = v / d;
      } else {
        return v;
      }
    }
  }
  RingElem unary() {
    if (eat('-')) return -unary();
    if (eat('+')) return unary();
    return power();
  }
  RingElem power() {
    RingElem base = atom();
    if (!eat('^')) return base;
    skip();
    bool neg = false;
    if (eat('-')) neg = true;
    skip();
    long k = integer();
    if (neg && !base.is_unit()) fail("negative power of a non-unit " + base.to_string());
    return base.pow(neg ? -k : k);
  }
  long integer() {
    skip();
    std::size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (start == pos_) fail("expected an integer");
    if (pos_ - start > 9) fail("integer too large");
    return std::stol(s_.substr(start, pos_ - start));
  }
  RingElem atom() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      RingElem v = expr();
      if (!eat(')')) fail("expected ')'");
      return v;
    }
    if (c == 't') {
      ++pos_;
      return R_.t();
    }
    if (c == 'a') {
      ++pos_;
      if (R_.field().e() == 1) fail("the generator 'a' only exists in extension fields");
      return R_.constant(R_.field().generator());
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      long v = integer();
      return R_.from_int(v);
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  const ChartRing& R_;
  std::string s_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline RingElem parse_elem(const ChartRing& R, const std::string& text) { return detail::ExprParser(R, text).parse(); }

/// A polynomial in t (no inverted denominators allowed).
inline Poly parse_poly(const FqField& F, const std::string& text) {
  const ChartRing& R = ChartRing::make(F, {});
  return parse_elem(R, text).numerator();
}

inline Json elem_json(const RingElem& x) { return x.to_string(); }
inline Json vec_json(const Vec& v) {
  Json a = Json::array();
  for (const auto& x : v) a.push_back(x.to_string());
  return a;
}
inline Json poly_list_json(const std::vector<Poly>& ps) {
  Json a = Json::array();
  for (const auto& p : ps) a.push_back(p.to_string());
  return a;
}

inline std::string pair_key(std::size_t i, std::size_t j) { return "(" + std::to_string(i) + "," + std::to_string(j) + ")"; }

namespace detail {
template <class T>
T field_of(const Json& j, const char* key) {
  if (!j.contains(key)) throw InvalidInput(std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw InvalidInput(std::string("field '") + key + "' has the wrong type");
  }
}
}  // namespace detail

/// {"p", "e", "n", "charts": [{"inverted": [...]}], "g": {"(i,j)": ...}, "u": [...]}
inline TorsionBundle bundle_from_json(const Json& j) {
  if (!j.is_object()) throw InvalidInput("bundle must be a JSON object");
  unsigned p = detail::field_of<unsigned>(j, "p");
  unsigned e = j.contains("e") ? detail::field_of<unsigned>(j, "e") : 1;
  long n = detail::field_of<long>(j, "n");
  if (n < 1) throw InvalidInput("n must be a positive integer");
  const FqField& F = FqField::get(p, e);
  Json charts = detail::field_of<Json>(j, "charts");
  if (!charts.is_array() || charts.empty()) throw InvalidInput("'charts' must be a nonempty array");
  std::vector<const ChartRing*> rings;
  for (const auto& c : charts) {
    std::vector<Poly> inv;
    for (const auto& s : detail::field_of<Json>(c, "inverted")) {
      if (!s.is_string()) throw InvalidInput("inverted entries must be strings");
      inv.push_back(parse_poly(F, s.get<std::string>()));
    }
    rings.push_back(&ChartRing::make(F, std::move(inv)));
  }
  ChartedScheme X(F, rings);
  TorsionBundle b{X, static_cast<unsigned>(n), {}, {}};
  Json us = detail::field_of<Json>(j, "u");
  if (!us.is_array() || us.size() != rings.size()) throw InvalidInput("'u' must list one unit per chart");
  for (std::size_t a = 0; a < rings.size(); ++a) {
    if (!us[a].is_string()) throw InvalidInput("'u' entries must be strings");
    b.u.push_back(parse_elem(*rings[a], us[a].get<std::string>()));
  }
  Json gs = j.contains("g") ? j.at("g") : Json::object();
  if (!gs.is_object()) throw InvalidInput("'g' must be an object keyed by \"(i,j)\"");
  for (const auto& [key, val] : gs.items()) {
    std::size_t i = 0, k = 0;
    char c1 = 0, c2 = 0, c3 = 0;
    std::istringstream in(key);
    if (!(in >> c1 >> i >> c2 >> k >> c3) || c1 != '(' || c2 != ',' || c3 != ')' || i >= k || k >= rings.size())
      throw InvalidInput("bad transition key '" + key + "'");
    if (!val.is_string()) throw InvalidInput("transition functions must be strings");
    b.g.emplace(std::make_pair(i, k), parse_elem(X.overlap(i, k), val.get<std::string>()));
  }
  return b;
}

inline Json bundle_to_json(const TorsionBundle& b) {
  const auto& F = b.scheme.field();
  Json j;
  j["p"] = F.p();
  j["e"] = F.e();
  j["n"] = b.n;
  Json charts = Json::array();
  for (std::size_t a = 0; a < b.scheme.num_charts(); ++a) {
    Json inv = Json::array();
    for (const auto& pi : b.scheme.chart(a).inverted()) inv.push_back(pi.to_string());
    charts.push_back({{"inverted", inv}});
  }
  j["charts"] = charts;
  Json g = Json::object();
  for (const auto& [key, val] : b.g) g[pair_key(key.first, key.second)] = val.to_string();
  j["g"] = g;
  Json u = Json::array();
  for (const auto& x : b.u) u.push_back(x.to_string());
  j["u"] = u;
  return j;
}

inline Json form_json(const CoverRing& B, const CoverForm& w) {
  return {{"degree", w.degree}, {"text", render_form(B, w)}, {"coords", vec_json(w.coords)}};
}
inline Json chart_form_json(const ChartForm& w) { return {{"degree", w.degree}, {"text", w.to_string()}}; }

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidInput("malformed JSON in " + path + ": " + e.what());
  }
}

}  // namespace ptconn
