#pragma once

// Dense univariate polynomials over a small finite field, in the variable t.

#include <algorithm>
#include <cstddef>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "ptconn/exactfield.hpp"

namespace ptconn {

class Poly {
 public:
  explicit Poly(const FqField& f) : field_(&f) {}
  Poly(const FqField& f, std::vector<Code> coeffs) : field_(&f), c_(std::move(coeffs)) { trim(); }

  static Poly constant(const FqField& f, Code c) { return Poly(f, {c}); }
  static Poly monomial(const FqField& f, Code c, std::size_t k) {
    std::vector<Code> v(k + 1, 0);
    v[k] = c;
    return Poly(f, std::move(v));
  }
  static Poly t(const FqField& f) { return monomial(f, 1, 1); }

  const FqField& field() const { return *field_; }
  /// Degree; -1 for the zero polynomial.
  long degree() const { return static_cast<long>(c_.size()) - 1; }
  bool is_zero() const { return c_.empty(); }
  bool is_constant() const { return c_.size() <= 1; }
  bool is_one() const { return c_.size() == 1 && c_[0] == 1; }
  bool is_monic() const { return !c_.empty() && c_.back() == 1; }
  Code lead() const { return c_.empty() ? 0 : c_.back(); }
  Code coeff(std::size_t k) const { return k < c_.size() ? c_[k] : 0; }
  const std::vector<Code>& coeffs() const { return c_; }

  friend Poly operator+(const Poly& a, const Poly& b) {
    const auto& F = a.same(b);
    std::vector<Code> r(std::max(a.c_.size(), b.c_.size()), 0);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = F.add(a.coeff(i), b.coeff(i));
    return Poly(F, std::move(r));
  }
  friend Poly operator-(const Poly& a, const Poly& b) {
    const auto& F = a.same(b);
    std::vector<Code> r(std::max(a.c_.size(), b.c_.size()), 0);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = F.sub(a.coeff(i), b.coeff(i));
    return Poly(F, std::move(r));
  }
  Poly operator-() const {
    std::vector<Code> r(c_.size());
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = field_->neg(c_[i]);
    return Poly(*field_, std::move(r));
  }
  friend Poly operator*(const Poly& a, const Poly& b) {
    const auto& F = a.same(b);
    if (a.is_zero() || b.is_zero()) return Poly(F);
    std::vector<Code> r(a.c_.size() + b.c_.size() - 1, 0);
    for (std::size_t i = 0; i < a.c_.size(); ++i) {
      if (!a.c_[i]) continue;
      for (std::size_t j = 0; j < b.c_.size(); ++j) r[i + j] = F.add(r[i + j], F.mul(a.c_[i], b.c_[j]));
    }
    return Poly(F, std::move(r));
  }
  Poly scaled(Code s) const {
    std::vector<Code> r(c_.size());
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = field_->mul(c_[i], s);
    return Poly(*field_, std::move(r));
  }
  Poly& operator+=(const Poly& o) { return *this = *this + o; }
  Poly& operator-=(const Poly& o) { return *this = *this - o; }
  Poly& operator*=(const Poly& o) { return *this = *this * o; }

  /// Euclidean division: *this = quot * d + rem, deg rem < deg d.
  std::pair<Poly, Poly> divmod(const Poly& d) const {
    const auto& F = same(d);
    if (d.is_zero()) throw DivisionByZero();
    if (degree() < d.degree()) return {Poly(F), *this};
    std::vector<Code> rem = c_;
    std::vector<Code> quot(c_.size() - d.c_.size() + 1, 0);
    Code lead_inv = F.inv(d.lead());
    for (std::size_t k = quot.size(); k-- > 0;) {
      Code c = F.mul(rem[k + d.c_.size() - 1], lead_inv);
      quot[k] = c;
      if (!c) continue;
      for (std::size_t j = 0; j < d.c_.size(); ++j) rem[k + j] = F.sub(rem[k + j], F.mul(c, d.c_[j]));
    }
    return {Poly(F, std::move(quot)), Poly(F, std::move(rem))};
  }
  Poly operator%(const Poly& d) const { return divmod(d).second; }
  Poly operator/(const Poly& d) const { return divmod(d).first; }
  bool divisible_by(const Poly& d) const { return (*this % d).is_zero(); }

  Poly monic() const { return is_zero() ? *this : scaled(field_->inv(lead())); }

  Poly derivative() const {
    if (c_.size() <= 1) return Poly(*field_);
    std::vector<Code> r(c_.size() - 1);
    for (std::size_t i = 1; i < c_.size(); ++i) r[i - 1] = field_->mul(c_[i], field_->from_int(static_cast<long long>(i)));
    return Poly(*field_, std::move(r));
  }

  Poly pow(unsigned long long k) const {
    Poly r = constant(*field_, 1), b = *this;
    while (k) {
      if (k & 1) r *= b;
      b *= b;
      k >>= 1;
    }
    return r;
  }

  Code eval(Code x) const {
    Code r = 0;
    for (std::size_t i = c_.size(); i-- > 0;) r = field_->add(field_->mul(r, x), c_[i]);
    return r;
  }

  friend bool operator==(const Poly& a, const Poly& b) { return a.field_ == b.field_ && a.c_ == b.c_; }

  /// Total order used for deterministic tie-breaking: degree, then
  /// coefficients from the top down.
  friend bool operator<(const Poly& a, const Poly& b) {
    if (a.degree() != b.degree()) return a.degree() < b.degree();
    for (std::size_t i = a.c_.size(); i-- > 0;)
      if (a.c_[i] != b.c_[i]) return a.c_[i] < b.c_[i];
    return false;
  }

  /// `c_k*t^k+...+c_0`; extension-field coefficients are parenthesised when
  /// they have more than one term.
  std::string to_string() const {
    if (c_.empty()) return "0";
    std::string out;
    for (std::size_t i = c_.size(); i-- > 0;) {
      if (!c_[i]) continue;
      std::string coef = field_->format(c_[i]);
      if (coef.find('+') != std::string::npos) coef = "(" + coef + ")";
      if (!out.empty()) out += "+";
      if (i == 0) {
        out += coef;
        continue;
      }
      if (c_[i] != 1) out += coef + "*";
      out += "t";
      if (i > 1) out += "^" + std::to_string(i);
    }
    return out;
  }

 private:
  void trim() {
    while (!c_.empty() && c_.back() == 0) c_.pop_back();
  }
  const FqField& same(const Poly& o) const {
    if (field_ != o.field_) throw FieldMismatch();
    return *field_;
  }

  const FqField* field_;
  std::vector<Code> c_;  // low to high, no trailing zeros
};

inline Poly gcd(Poly a, Poly b) {
  while (!b.is_zero()) {
    Poly r = a % b;
    a = std::move(b);
    b = std::move(r);
  }
  return a.monic();
}

/// Extended Euclid: returns (g, x, y) with x*a + y*b = g monic.
inline std::tuple<Poly, Poly, Poly> xgcd(const Poly& a, const Poly& b) {
  const auto& F = a.field();
  Poly r0 = a, r1 = b, s0 = Poly::constant(F, 1), s1(F), t0(F), t1 = Poly::constant(F, 1);
  while (!r1.is_zero()) {
    auto [q, r] = r0.divmod(r1);
    r0 = std::move(r1);
    r1 = std::move(r);
    Poly s2 = s0 - q * s1, t2 = t0 - q * t1;
    s0 = std::move(s1);
    s1 = std::move(s2);
    t0 = std::move(t1);
    t1 = std::move(t2);
  }
  if (r0.is_zero()) return {r0, s0, t0};
  Code li = F.inv(r0.lead());
  return {r0.scaled(li), s0.scaled(li), t0.scaled(li)};
}

/// Inverse of a modulo m (requires gcd(a, m) = 1).
inline Poly invmod(const Poly& a, const Poly& m) {
  auto [g, x, y] = xgcd(a % m, m);
  if (!g.is_one()) throw DivisionByZero();
  return x % m;
}

inline Poly powmod(Poly b, unsigned long long k, const Poly& m) {
  Poly r = Poly::constant(b.field(), 1) % m;
  b = b % m;
  while (k) {
    if (k & 1) r = (r * b) % m;
    b = (b * b) % m;
    k >>= 1;
  }
  return r;
}

/// Ben-Or irreducibility test: f of degree d is irreducible iff
/// gcd(t^(q^i) - t, f) = 1 for every 1 <= i <= d/2.
inline bool is_irreducible(const Poly& f) {
  if (f.degree() < 1) return false;
  if (f.degree() == 1) return true;
  const auto& F = f.field();
  Poly t = Poly::t(F);
  Poly x = t;
  for (long i = 1; i <= f.degree() / 2; ++i) {
    x = powmod(x, F.q(), f);
    if (!gcd(x - t, f).is_one()) return false;
  }
  return true;
}

}  // namespace ptconn
