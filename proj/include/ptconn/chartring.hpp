#pragma once

// Coordinate rings of affine curve charts: A = F_q[t][S^-1], where S is
// generated by finitely many distinct monic irreducibles pi_1, ..., pi_s.
//
// An element is stored as N / prod pi_j^{d_j} with d_j >= 0, reduced so that
// pi_j does not divide N whenever d_j > 0. This form is unique, so equality
// is structural. A is a PID; every nonzero element is a unit times its
// "core", the monic part of N coprime to S, and deg(core) is a Euclidean norm.

#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ptconn/error.hpp"
#include "ptconn/exactfield.hpp"
#include "ptconn/poly.hpp"

namespace ptconn {

class RingElem;

class ChartRing {
 public:
  /// Interned ring. Throws InvalidInput if an entry is not monic irreducible
  /// or entries repeat.
  static const ChartRing& make(const FqField& F, std::vector<Poly> inverted) {
    for (std::size_t i = 0; i < inverted.size(); ++i) {
      const Poly& pi = inverted[i];
      if (&pi.field() != &F) throw FieldMismatch();
      if (!pi.is_monic() || !is_irreducible(pi))
        throw InvalidInput("inverted polynomial is not monic irreducible: " + pi.to_string());
      for (std::size_t j = 0; j < i; ++j)
        if (inverted[j] == pi) throw InvalidInput("inverted polynomial listed twice: " + pi.to_string());
    }
    static std::mutex mu;
    static std::map<std::pair<const FqField*, std::vector<std::vector<Code>>>, std::unique_ptr<ChartRing>> registry;
    std::vector<std::vector<Code>> key;
    for (const auto& pi : inverted) key.push_back(pi.coeffs());
    std::lock_guard lock(mu);
    auto& slot = registry[{&F, key}];
    if (!slot) slot.reset(new ChartRing(F, std::move(inverted)));
    return *slot;
  }

  const FqField& field() const { return *field_; }
  const std::vector<Poly>& inverted() const { return inverted_; }
  std::size_t num_inverted() const { return inverted_.size(); }

  std::optional<std::size_t> index_of(const Poly& pi) const {
    for (std::size_t j = 0; j < inverted_.size(); ++j)
      if (inverted_[j] == pi) return j;
    return std::nullopt;
  }
  /// True if every polynomial inverted in `sub` is inverted here.
  bool localizes(const ChartRing& sub) const {
    if (sub.field_ != field_) return false;
    for (const auto& pi : sub.inverted_)
      if (!index_of(pi)) return false;
    return true;
  }

  /// Ring whose inverted set is this ring's followed by the new entries of
  /// `other`.
  const ChartRing& join(const ChartRing& other) const {
    if (other.field_ != field_) throw FieldMismatch();
    auto inv = inverted_;
    for (const auto& pi : other.inverted_)
      if (!index_of(pi)) inv.push_back(pi);
    return make(*field_, std::move(inv));
  }

  inline RingElem zero() const;
  inline RingElem one() const;
  inline RingElem t() const;
  inline RingElem constant(Code c) const;
  inline RingElem from_int(long long v) const;
  inline RingElem from_poly(Poly p) const;
  /// num * prod pi_j^{-den_j}; den may contain negative entries.
  inline RingElem fraction(Poly num, const std::vector<long>& den) const;

  std::string to_string() const {
    std::string s = "F_" + std::to_string(field_->q()) + "[t]";
    if (!inverted_.empty()) {
      s += "_{";
      for (std::size_t j = 0; j < inverted_.size(); ++j) s += (j ? "," : "") + inverted_[j].to_string();
      s += "}";
    }
    return s;
  }

 private:
  ChartRing(const FqField& F, std::vector<Poly> inverted) : field_(&F), inverted_(std::move(inverted)) {}

  const FqField* field_;
  std::vector<Poly> inverted_;
};

/// Unit-group coordinates: u = constant * prod pi_j^{exponents_j}.
struct UnitLog {
  FqElem constant;
  std::vector<long> exponents;
};

class RingElem {
 public:
  RingElem(const ChartRing& R, Poly num, std::vector<unsigned> den) : ring_(&R), num_(std::move(num)), den_(std::move(den)) {
    den_.resize(R.num_inverted(), 0);
    normalize();
  }

  const ChartRing& ring() const { return *ring_; }
  const FqField& field() const { return ring_->field(); }
  const Poly& numerator() const { return num_; }
  const std::vector<unsigned>& denominator_exponents() const { return den_; }
  Poly denominator() const {
    Poly d = Poly::constant(field(), 1);
    for (std::size_t j = 0; j < den_.size(); ++j)
      if (den_[j]) d *= ring_->inverted()[j].pow(den_[j]);
    return d;
  }

  bool is_zero() const { return num_.is_zero(); }
  bool is_one() const {
    if (!num_.is_one()) return false;
    for (auto d : den_)
      if (d) return false;
    return true;
  }

  /// Numerator split as constant * prod pi_j^{m_j} * core, core monic and
  /// coprime to S. Zero yields an empty core of degree -1.
  struct Factored {
    Code constant;
    std::vector<long> exponents;  // of the whole element, denominators included
    Poly core;
  };
  Factored factor() const {
    const auto& F = field();
    Factored out{0, std::vector<long>(den_.size(), 0), Poly(F)};
    if (is_zero()) return out;
    Poly n = num_;
    for (std::size_t j = 0; j < den_.size(); ++j) {
      const Poly& pi = ring_->inverted()[j];
      long m = 0;
      for (;;) {
        auto [q, r] = n.divmod(pi);
        if (!r.is_zero()) break;
        n = std::move(q);
        ++m;
      }
      out.exponents[j] = m - static_cast<long>(den_[j]);
    }
    out.constant = n.lead();
    out.core = n.monic();
    return out;
  }

  Poly core() const { return factor().core; }
  /// Euclidean norm: degree of the core; -1 for zero.
  long norm() const { return is_zero() ? -1 : core().degree(); }
  bool is_unit() const { return !is_zero() && norm() == 0; }

  /// Unit part: this = unit_part() * core().
  RingElem unit_part() const {
    if (is_zero()) throw NotAUnit("0");
    Poly c = core();
    return RingElem(*ring_, num_ / c, den_);
  }

  std::optional<UnitLog> try_unit_log() const {
    if (is_zero()) return std::nullopt;
    auto f = factor();
    if (f.core.degree() != 0) return std::nullopt;
    return UnitLog{FqElem(field(), f.constant), f.exponents};
  }

  RingElem inverse() const {
    auto ul = try_unit_log();
    if (!ul) throw NotAUnit(to_string());
    std::vector<long> den(ul->exponents);
    Poly c = Poly::constant(field(), field().inv(ul->constant.code()));
    return ring_->fraction(c, den);
  }

  friend RingElem operator+(const RingElem& a, const RingElem& b) { return a.combine(b, false); }
  friend RingElem operator-(const RingElem& a, const RingElem& b) { return a.combine(b, true); }
  RingElem operator-() const { return RingElem(*ring_, -num_, den_); }
  friend RingElem operator*(const RingElem& a, const RingElem& b) {
    a.same(b);
    std::vector<unsigned> d(a.den_.size());
    for (std::size_t j = 0; j < d.size(); ++j) d[j] = a.den_[j] + b.den_[j];
    return RingElem(*a.ring_, a.num_ * b.num_, std::move(d));
  }
  /// Division by a unit. Throws NotAUnit otherwise.
  friend RingElem operator/(const RingElem& a, const RingElem& b) {
    a.same(b);
    return a * b.inverse();
  }
  RingElem& operator+=(const RingElem& o) { return *this = *this + o; }
  RingElem& operator-=(const RingElem& o) { return *this = *this - o; }
  RingElem& operator*=(const RingElem& o) { return *this = *this * o; }

  RingElem scaled(Code c) const { return RingElem(*ring_, num_.scaled(c), den_); }

  RingElem pow(long k) const {
    if (k < 0) return inverse().pow(-k);
    RingElem r = ring_->one(), b = *this;
    unsigned long long e = static_cast<unsigned long long>(k);
    while (e) {
      if (e & 1) r *= b;
      b *= b;
      e >>= 1;
    }
    return r;
  }

  /// Euclidean division in A: *this = q*b + r with r = 0 or norm(r) < norm(b).
  std::pair<RingElem, RingElem> divmod(const RingElem& b) const {
    same(b);
    if (b.is_zero()) throw DivisionByZero();
    Poly beta = b.core();
    RingElem eps = b.unit_part();
    auto [qn, rn] = num_.divmod(beta);
    RingElem q = RingElem(*ring_, qn, den_) / eps;
    RingElem r = RingElem(*ring_, rn, den_);
    return {q, r};
  }
  /// True if *this divides b in A.
  bool divides(const RingElem& b) const {
    same(b);
    if (is_zero()) return b.is_zero();
    if (b.is_zero()) return true;
    return b.core().divisible_by(core());
  }
  /// b / *this, assuming divisibility.
  RingElem divide_into(const RingElem& b) const {
    auto [q, r] = b.divmod(*this);
    if (!r.is_zero()) throw NotAUnit("inexact division of " + b.to_string() + " by " + to_string());
    return q;
  }

  /// Image in a ring that inverts a superset of this ring's set.
  RingElem restrict_to(const ChartRing& target) const {
    if (!target.localizes(*ring_)) throw RingMismatch();
    std::vector<unsigned> d(target.num_inverted(), 0);
    for (std::size_t j = 0; j < den_.size(); ++j) d[*target.index_of(ring_->inverted()[j])] = den_[j];
    return RingElem(target, num_, std::move(d));
  }

  friend bool operator==(const RingElem& a, const RingElem& b) {
    return a.ring_ == b.ring_ && a.num_ == b.num_ && a.den_ == b.den_;
  }

  /// `N` or `(N)/(D)` with D written as a product of inverted powers.
  std::string to_string() const {
    std::string n = num_.to_string();
    std::string d;
    for (std::size_t j = 0; j < den_.size(); ++j) {
      if (!den_[j]) continue;
      std::string pi = ring_->inverted()[j].to_string();
      if (ring_->inverted()[j].degree() > 1 || pi.find('+') != std::string::npos) pi = "(" + pi + ")";
      if (den_[j] > 1) pi += "^" + std::to_string(den_[j]);
      d += (d.empty() ? "" : "*") + pi;
    }
    if (d.empty()) return n;
    bool n_simple = num_.degree() <= 0 || n == "t";
    bool d_simple = d.find('*') == std::string::npos;
    return (n_simple ? n : "(" + n + ")") + "/" + (d_simple ? d : "(" + d + ")");
  }

 private:
  void normalize() {
    if (num_.is_zero()) {
      std::fill(den_.begin(), den_.end(), 0u);
      return;
    }
    for (std::size_t j = 0; j < den_.size(); ++j) {
      const Poly& pi = ring_->inverted()[j];
      while (den_[j] > 0) {
        auto [q, r] = num_.divmod(pi);
        if (!r.is_zero()) break;
        num_ = std::move(q);
        --den_[j];
      }
    }
  }
  void same(const RingElem& o) const {
    if (ring_ != o.ring_) throw RingMismatch();
  }
  RingElem combine(const RingElem& b, bool subtract) const {
    same(b);
    std::vector<unsigned> d(den_.size());
    Poly na = num_, nb = b.num_;
    for (std::size_t j = 0; j < d.size(); ++j) {
      d[j] = std::max(den_[j], b.den_[j]);
      const Poly& pi = ring_->inverted()[j];
      if (d[j] > den_[j]) na *= pi.pow(d[j] - den_[j]);
      if (d[j] > b.den_[j]) nb *= pi.pow(d[j] - b.den_[j]);
    }
    return RingElem(*ring_, subtract ? na - nb : na + nb, std::move(d));
  }

  const ChartRing* ring_;
  Poly num_;
  std::vector<unsigned> den_;
};

inline RingElem ChartRing::zero() const { return RingElem(*this, Poly(*field_), {}); }
inline RingElem ChartRing::one() const { return constant(1); }
inline RingElem ChartRing::t() const { return RingElem(*this, Poly::t(*field_), {}); }
inline RingElem ChartRing::constant(Code c) const { return RingElem(*this, Poly::constant(*field_, c), {}); }
inline RingElem ChartRing::from_int(long long v) const { return constant(field_->from_int(v)); }
inline RingElem ChartRing::from_poly(Poly p) const { return RingElem(*this, std::move(p), {}); }
inline RingElem ChartRing::fraction(Poly num, const std::vector<long>& den) const {
  std::vector<unsigned> d(inverted_.size(), 0);
  for (std::size_t j = 0; j < den.size() && j < inverted_.size(); ++j) {
    if (den[j] >= 0)
      d[j] = static_cast<unsigned>(den[j]);
    else
      num *= inverted_[j].pow(static_cast<unsigned long long>(-den[j]));
  }
  return RingElem(*this, std::move(num), std::move(d));
}

/// Exponentiates a unit log back to the unit.
inline RingElem exp_unit_log(const ChartRing& R, const UnitLog& ul) {
  std::vector<long> den(ul.exponents.size());
  for (std::size_t j = 0; j < den.size(); ++j) den[j] = -ul.exponents[j];
  return R.fraction(Poly::constant(R.field(), ul.constant.code()), den);
}

/// Throws NotAUnit if `a` is not invertible in its chart ring.
inline UnitLog unit_log(const RingElem& a) {
  auto ul = a.try_unit_log();
  if (!ul) throw NotAUnit(a.to_string());
  return *ul;
}

/// d/dt, by the quotient rule on N / D.
inline RingElem derive(const RingElem& a) {
  if (a.is_zero()) return a;
  const auto& R = a.ring();
  Poly n = a.numerator();
  Poly D = a.denominator();
  Poly top = n.derivative() * D - n * D.derivative();
  std::vector<unsigned> d2(a.denominator_exponents());
  for (auto& x : d2) x *= 2;
  return RingElem(R, top, std::move(d2));
}

/// Logarithmic derivative u'/u of a unit.
inline RingElem dlog(const RingElem& u) {
  if (!u.is_unit()) throw NotAUnit(u.to_string());
  return derive(u) / u;
}

}  // namespace ptconn
