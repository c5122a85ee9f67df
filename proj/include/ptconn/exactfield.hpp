#pragma once

// Small finite fields F_q, q = p^e <= 256, with table-driven arithmetic.
//
// Elements are encoded as integers in [0, q): the code of
// c_0 + c_1 a + ... + c_{e-1} a^{e-1} is sum c_i p^i, where a is a root of
// the field's modulus. Fields are interned: FqField::get returns a reference
// that stays valid for the lifetime of the process.

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ptconn/error.hpp"

namespace ptconn {

using Code = std::uint16_t;

inline bool is_small_prime(unsigned p) {
  if (p < 2) return false;
  for (unsigned d = 2; d * d <= p; ++d)
    if (p % d == 0) return false;
  return true;
}

class FqField {
 public:
  static constexpr unsigned kMaxPrime = 97;
  static constexpr unsigned kMaxOrder = 256;

  /// Interned field of order p^e. Throws UnsupportedField outside the table.
  static const FqField& get(unsigned p, unsigned e = 1) {
    static std::mutex mu;
    static std::map<std::pair<unsigned, unsigned>, std::unique_ptr<FqField>> registry;
    std::lock_guard lock(mu);
    auto& slot = registry[{p, e}];
    if (!slot) slot.reset(new FqField(p, e));
    return *slot;
  }

  unsigned p() const { return p_; }
  unsigned e() const { return e_; }
  unsigned q() const { return q_; }
  /// Monic modulus, coefficients low to high (size e+1).
  const std::vector<unsigned>& modulus() const { return modulus_; }

  Code zero() const { return 0; }
  Code one() const { return 1; }
  /// The generator symbol `a` (root of the modulus). Only meaningful for e > 1.
  Code generator() const { return e_ > 1 ? static_cast<Code>(p_) : static_cast<Code>(modulus_root_); }

  Code from_int(long long v) const {
    long long r = v % static_cast<long long>(p_);
    if (r < 0) r += p_;
    return static_cast<Code>(r);
  }

  Code add(Code a, Code b) const { return add_[a * q_ + b]; }
  Code neg(Code a) const { return neg_[a]; }
  Code sub(Code a, Code b) const { return add(a, neg(b)); }
  Code mul(Code a, Code b) const { return mul_[a * q_ + b]; }
  Code inv(Code a) const {
    if (a == 0) throw DivisionByZero();
    return inv_[a];
  }
  Code div(Code a, Code b) const { return mul(a, inv(b)); }
  Code pow(Code a, unsigned long long k) const {
    Code r = 1;
    while (k) {
      if (k & 1) r = mul(r, a);
      a = mul(a, a);
      k >>= 1;
    }
    return r;
  }
  Code frobenius(Code a) const { return frob_[a]; }
  Code frobenius_inverse(Code a) const { return frob_inv_[a]; }

  /// Coordinates of a code in the power basis of the modulus.
  std::vector<unsigned> digits(Code a) const {
    std::vector<unsigned> d(e_);
    for (unsigned i = 0; i < e_; ++i) {
      d[i] = a % p_;
      a = static_cast<Code>(a / p_);
    }
    return d;
  }
  Code from_digits(std::span<const unsigned> d) const {
    Code r = 0;
    for (std::size_t i = d.size(); i-- > 0;) r = static_cast<Code>(r * p_ + d[i] % p_);
    return r;
  }
  bool in_prime_field(Code a) const { return a < p_; }

  /// Text form: decimal digits for prime-field elements, otherwise a
  /// polynomial in `a`, highest power first, e.g. `a+1`, `2*a^2+a`.
  std::string format(Code a) const {
    if (a < p_) return std::to_string(a);
    auto d = digits(a);
    std::string out;
    for (std::size_t i = e_; i-- > 0;) {
      if (d[i] == 0) continue;
      if (!out.empty()) out += "+";
      if (i == 0) {
        out += std::to_string(d[i]);
        continue;
      }
      if (d[i] != 1) out += std::to_string(d[i]) + "*";
      out += "a";
      if (i > 1) out += "^" + std::to_string(i);
    }
    return out;
  }

  bool operator==(const FqField& o) const { return this == &o; }

 private:
  FqField(unsigned p, unsigned e) : p_(p), e_(e) {
    if (!is_small_prime(p) || p > kMaxPrime)
      throw UnsupportedField("characteristic must be a prime <= 97, got " + std::to_string(p));
    if (e < 1) throw UnsupportedField("extension degree must be >= 1");
    unsigned long long q = 1;
    for (unsigned i = 0; i < e; ++i) {
      q *= p;
      if (q > kMaxOrder) throw UnsupportedField("field order exceeds 256");
    }
    q_ = static_cast<unsigned>(q);
    choose_modulus();
    build_tables();
  }

  // Digit-vector multiplication modulo the current modulus.
  std::vector<unsigned> mulmod(const std::vector<unsigned>& x, const std::vector<unsigned>& y) const {
    std::vector<unsigned> prod(2 * e_ - 1, 0);
    for (unsigned i = 0; i < e_; ++i)
      for (unsigned j = 0; j < e_; ++j) prod[i + j] = (prod[i + j] + x[i] * y[j]) % p_;
    for (std::size_t k = prod.size(); k-- > e_;) {
      unsigned c = prod[k];
      if (!c) continue;
      for (unsigned i = 0; i < e_; ++i)
        prod[k - e_ + i] = (prod[k - e_ + i] + (p_ - c) * modulus_[i]) % p_;
      prod[k] = 0;
    }
    prod.resize(e_);
    return prod;
  }

  // Lexicographically first primitive monic polynomial of degree e, ordered by
  // (c_{e-1}, ..., c_0). Primitivity implies irreducibility.
  void choose_modulus() {
    if (e_ == 1) {
      for (unsigned g = 1; g < p_; ++g) {
        unsigned x = g, ord = 1;
        while (x != 1) {
          x = x * g % p_;
          ++ord;
        }
        if (ord == p_ - 1) {
          modulus_root_ = g;
          modulus_ = {(p_ - g) % p_, 1};
          return;
        }
      }
    }
    std::vector<unsigned> coeffs(e_, 0);
    for (unsigned idx = 0; idx < q_; ++idx) {
      unsigned rest = idx;
      for (unsigned i = 0; i < e_; ++i) {
        coeffs[e_ - 1 - i] = rest % p_;
        rest /= p_;
      }
      if (coeffs[0] == 0) continue;
      modulus_.assign(coeffs.begin(), coeffs.end());
      modulus_.push_back(1);
      std::vector<unsigned> x(e_, 0), acc(e_, 0);
      x[1] = 1;
      acc[0] = 1;
      unsigned order = 0;
      do {
        acc = mulmod(acc, x);
        ++order;
      } while (!(acc[0] == 1 && std::all_of(acc.begin() + 1, acc.end(), [](unsigned c) { return c == 0; })) &&
               order <= q_);
      if (order == q_ - 1) return;
    }
    throw UnsupportedField("no primitive modulus found");
  }

  void build_tables() {
    add_.assign(q_ * q_, 0);
    mul_.assign(q_ * q_, 0);
    neg_.assign(q_, 0);
    inv_.assign(q_, 0);
    frob_.assign(q_, 0);
    frob_inv_.assign(q_, 0);
    std::vector<std::vector<unsigned>> dig(q_);
    for (unsigned a = 0; a < q_; ++a) dig[a] = digits(static_cast<Code>(a));
    for (unsigned a = 0; a < q_; ++a) {
      std::vector<unsigned> n(e_);
      for (unsigned i = 0; i < e_; ++i) n[i] = (p_ - dig[a][i]) % p_;
      neg_[a] = from_digits(n);
      for (unsigned b = 0; b < q_; ++b) {
        std::vector<unsigned> s(e_);
        for (unsigned i = 0; i < e_; ++i) s[i] = (dig[a][i] + dig[b][i]) % p_;
        add_[a * q_ + b] = from_digits(s);
        if (e_ == 1)
          mul_[a * q_ + b] = static_cast<Code>(a * b % p_);
        else
          mul_[a * q_ + b] = from_digits(mulmod(dig[a], dig[b]));
      }
    }
    for (unsigned a = 1; a < q_; ++a)
      for (unsigned b = 1; b < q_; ++b)
        if (mul_[a * q_ + b] == 1) {
          inv_[a] = static_cast<Code>(b);
          break;
        }
    for (unsigned a = 0; a < q_; ++a) {
      Code f = pow(static_cast<Code>(a), p_);
      frob_[a] = f;
      frob_inv_[f] = static_cast<Code>(a);
    }
  }

  unsigned p_ = 0, e_ = 0, q_ = 0;
  unsigned modulus_root_ = 0;
  std::vector<unsigned> modulus_;
  std::vector<Code> add_, mul_, neg_, inv_, frob_, frob_inv_;
};

/// A field element bound to its owning field.
class FqElem {
 public:
  FqElem(const FqField& f, Code c) : field_(&f), code_(c) {}
  static FqElem from_int(const FqField& f, long long v) { return {f, f.from_int(v)}; }

  const FqField& field() const { return *field_; }
  Code code() const { return code_; }
  bool is_zero() const { return code_ == 0; }
  std::vector<unsigned> coeffs() const { return field_->digits(code_); }

  friend FqElem operator+(const FqElem& a, const FqElem& b) { return {a.same(b), a.field_->add(a.code_, b.code_)}; }
  friend FqElem operator-(const FqElem& a, const FqElem& b) { return {a.same(b), a.field_->sub(a.code_, b.code_)}; }
  friend FqElem operator*(const FqElem& a, const FqElem& b) { return {a.same(b), a.field_->mul(a.code_, b.code_)}; }
  friend FqElem operator/(const FqElem& a, const FqElem& b) { return {a.same(b), a.field_->div(a.code_, b.code_)}; }
  FqElem operator-() const { return {*field_, field_->neg(code_)}; }
  FqElem inv() const { return {*field_, field_->inv(code_)}; }
  FqElem pow(unsigned long long k) const { return {*field_, field_->pow(code_, k)}; }
  FqElem frobenius() const { return {*field_, field_->frobenius(code_)}; }
  /// The unique p-th root; equals c^(p^(e-1)).
  FqElem frobenius_inverse() const { return {*field_, field_->frobenius_inverse(code_)}; }

  friend bool operator==(const FqElem& a, const FqElem& b) { return a.field_ == b.field_ && a.code_ == b.code_; }

  std::string to_string() const { return field_->format(code_); }

 private:
  const FqField& same(const FqElem& o) const {
    if (field_ != o.field_) throw FieldMismatch();
    return *field_;
  }
  const FqField* field_;
  Code code_;
};

}  // namespace ptconn
