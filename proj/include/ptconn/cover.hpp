#pragma once

// Torsion line bundles given by explicit cocycles on charted curves, and the
// mu_n cover Y = Spec A[v]/(v^n - u) over each chart.

#include <algorithm>
#include <cstddef>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ptconn/chartring.hpp"
#include "ptconn/error.hpp"
#include "ptconn/pidmod.hpp"

namespace ptconn {

/// Charts over one field sharing the coordinate t; overlaps are the common
/// localizations.
class ChartedScheme {
 public:
  /// Empty placeholder; only meaningful after assignment.
  ChartedScheme() = default;
  ChartedScheme(const FqField& F, std::vector<const ChartRing*> charts) : field_(&F), charts_(std::move(charts)) {
    if (charts_.empty()) throw InvalidInput("a scheme needs at least one chart");
    for (const auto* c : charts_)
      if (&c->field() != field_) throw FieldMismatch();
  }

  const FqField& field() const { return *field_; }
  std::size_t num_charts() const { return charts_.size(); }
  const ChartRing& chart(std::size_t i) const { return *charts_.at(i); }
  const ChartRing& overlap(std::size_t i, std::size_t j) const {
    if (i == j) return chart(i);
    return i < j ? chart(i).join(chart(j)) : chart(j).join(chart(i));
  }
  const ChartRing& triple(std::size_t i, std::size_t j, std::size_t k) const {
    std::size_t a[3] = {i, j, k};
    std::sort(a, a + 3);
    return chart(a[0]).join(chart(a[1])).join(chart(a[2]));
  }

 private:
  const FqField* field_ = nullptr;
  std::vector<const ChartRing*> charts_;
};

/// L with local generators e_alpha, e_beta = g_{alpha beta} e_alpha, and
/// theta(e_alpha^n) = u_alpha, so g^n = u_beta / u_alpha.
struct TorsionBundle {
  ChartedScheme scheme;
  unsigned n = 1;
  std::map<std::pair<std::size_t, std::size_t>, RingElem> g;  // keys i < j, values in the overlap ring
  std::vector<RingElem> u;

  unsigned p() const { return scheme.field().p(); }
  bool coprime() const { return n % p() != 0; }

  /// g_{ij} in the ring `target` (which must localize the overlap).
  RingElem transition(std::size_t i, std::size_t j, const ChartRing& target) const {
    if (i == j) return target.one();
    if (i < j) return g.at({i, j}).restrict_to(target);
    return g.at({j, i}).restrict_to(target).inverse();
  }
  RingElem transition(std::size_t i, std::size_t j) const { return transition(i, j, scheme.overlap(i, j)); }
};

/// Replace each local basis e_alpha by w_alpha e_alpha.
inline TorsionBundle rescale_basis(const TorsionBundle& b, const std::vector<RingElem>& w) {
  TorsionBundle out = b;
  for (std::size_t a = 0; a < b.u.size(); ++a) out.u[a] = b.u[a] * w[a].pow(b.n);
  for (auto& [key, gij] : out.g) {
    const ChartRing& R = b.scheme.overlap(key.first, key.second);
    gij = gij * w[key.second].restrict_to(R) / w[key.first].restrict_to(R);
  }
  return out;
}

/// B = A[v]/(v^k - u) as a free A-module on 1, v, ..., v^{k-1}.
class CoverRing {
 public:
  CoverRing(const ChartRing& A, unsigned degree, RingElem u) : base_(&A), k_(degree), u_(std::move(u)) {
    if (k_ < 1) throw InvalidInput("cover degree must be >= 1");
    if (&u_.ring() != base_) throw RingMismatch();
  }

  const ChartRing& base() const { return *base_; }
  unsigned degree() const { return k_; }
  const RingElem& u() const { return u_; }

  Vec zero() const { return zero_vec(*base_, k_); }
  Vec from_base(const RingElem& a) const {
    Vec x = zero();
    x[0] = a;
    return x;
  }
  Vec one() const { return from_base(base_->one()); }
  /// v^j reduced by v^k = u.
  Vec v_power(unsigned long long j) const {
    Vec x = zero();
    x[j % k_] = u_.pow(static_cast<long>(j / k_));
    return x;
  }
  Vec v() const { return v_power(1); }
  /// v^{-1} = v^{k-1} / u.
  Vec v_inverse() const {
    Vec x = zero();
    x[k_ - 1] = u_.inverse();
    return x;
  }

  Vec mul(const Vec& a, const Vec& b) const {
    Vec r = zero();
    for (unsigned i = 0; i < k_; ++i) {
      if (a[i].is_zero()) continue;
      for (unsigned j = 0; j < k_; ++j) {
        if (b[j].is_zero()) continue;
        RingElem c = a[i] * b[j];
        if (i + j >= k_)
          r[i + j - k_] += u_ * c;
        else
          r[i + j] += c;
      }
    }
    return r;
  }
  Vec pow(Vec a, unsigned long long e) const {
    Vec r = one();
    while (e) {
      if (e & 1) r = mul(r, a);
      a = mul(a, a);
      e >>= 1;
    }
    return r;
  }
  /// Restriction of the base ring to a further localization.
  CoverRing restrict_to(const ChartRing& target) const { return CoverRing(target, k_, u_.restrict_to(target)); }
  Vec restrict_elem(const Vec& x, const ChartRing& target) const {
    Vec r;
    for (const auto& c : x) r.push_back(c.restrict_to(target));
    return r;
  }

  /// Matrix of multiplication by a on the basis v^j.
  Matrix multiplication_matrix(const Vec& a) const {
    std::vector<Vec> cols;
    for (unsigned j = 0; j < k_; ++j) cols.push_back(mul(a, v_power(j)));
    return Matrix::from_columns(*base_, k_, cols);
  }
  /// a is a unit iff its multiplication matrix is invertible over A.
  bool is_unit(const Vec& a) const {
    SmithForm S = smith_normal_form(multiplication_matrix(a));
    if (S.rank != k_) return false;
    for (const auto& d : S.diagonal)
      if (!d.is_unit()) return false;
    return true;
  }

  friend bool operator==(const CoverRing& a, const CoverRing& b) {
    return a.base_ == b.base_ && a.k_ == b.k_ && a.u_ == b.u_;
  }

 private:
  const ChartRing* base_;
  unsigned k_;
  RingElem u_;
};

/// A-algebra isomorphism CoverRing(src) -> CoverRing(dst) sending
/// v_src to c * v_dst, valid when c^k * u_dst = u_src.
struct CoverIso {
  const CoverRing* src;
  const CoverRing* dst;
  RingElem c;

  bool certified() const { return c.is_unit() && c.pow(src->degree()) * dst->u() == src->u(); }
  Vec operator()(const Vec& x) const {
    Vec r = dst->zero();
    RingElem cj = dst->base().one();
    for (unsigned j = 0; j < src->degree(); ++j) {
      if (!x[j].is_zero()) r = r + dst->mul(dst->from_base(x[j] * cj), dst->v_power(j));
      cj *= c;
    }
    return r;
  }
};

struct Check {
  std::string name;
  bool passed = true;
  std::string detail;
};

struct ValidationReport {
  bool valid = true;
  bool degenerate = false;
  std::vector<std::size_t> degenerate_charts;
  std::vector<Check> checks;
  std::string error_kind;  // "", "NotAUnit", "InvalidCocycle"
};

inline ValidationReport validate_bundle(const TorsionBundle& b) {
  ValidationReport rep;
  const auto& X = b.scheme;
  auto record = [&](std::string name, bool ok, std::string detail, const char* kind) {
    rep.checks.push_back({std::move(name), ok, std::move(detail)});
    if (!ok) {
      rep.valid = false;
      if (rep.error_kind.empty()) rep.error_kind = kind;
    }
  };
  if (b.n < 1) record("n >= 1", false, "torsion order must be positive", "InvalidCocycle");
  if (b.u.size() != X.num_charts()) {
    record("u per chart", false, "expected one u per chart", "InvalidCocycle");
    return rep;
  }
  for (std::size_t a = 0; a < X.num_charts(); ++a) {
    bool ok = &b.u[a].ring() == &X.chart(a) && b.u[a].is_unit();
    record("u_" + std::to_string(a) + " is a unit", ok, b.u[a].to_string(), "NotAUnit");
  }
  bool have_all_g = true;
  for (std::size_t i = 0; i < X.num_charts(); ++i)
    for (std::size_t j = i + 1; j < X.num_charts(); ++j) {
      auto it = b.g.find({i, j});
      if (it == b.g.end()) {
        record("g_" + std::to_string(i) + std::to_string(j) + " given", false, "missing transition function", "InvalidCocycle");
        have_all_g = false;
        continue;
      }
      const ChartRing& R = X.overlap(i, j);
      bool unit = &it->second.ring() == &R && it->second.is_unit();
      record("g_" + std::to_string(i) + std::to_string(j) + " is a unit", unit, it->second.to_string(), "NotAUnit");
      if (!unit) {
        have_all_g = false;
        continue;
      }
      if (!rep.valid) continue;
      RingElem lhs = it->second.pow(b.n);
      RingElem rhs = b.u[j].restrict_to(R) / b.u[i].restrict_to(R);
      record("g_" + std::to_string(i) + std::to_string(j) + "^n = u_" + std::to_string(j) + "/u_" + std::to_string(i), lhs == rhs,
             lhs == rhs ? "" : "g^n = " + lhs.to_string() + " but u_beta/u_alpha = " + rhs.to_string(), "InvalidCocycle");
    }
  if (have_all_g && rep.valid)
    for (std::size_t i = 0; i < X.num_charts(); ++i)
      for (std::size_t j = i + 1; j < X.num_charts(); ++j)
        for (std::size_t k = j + 1; k < X.num_charts(); ++k) {
          const ChartRing& T = X.triple(i, j, k);
          RingElem lhs = b.transition(i, j, T) * b.transition(j, k, T);
          RingElem rhs = b.transition(i, k, T);
          record("cocycle on (" + std::to_string(i) + "," + std::to_string(j) + "," + std::to_string(k) + ")", lhs == rhs,
                 lhs == rhs ? "" : lhs.to_string() + " != " + rhs.to_string(), "InvalidCocycle");
        }
  if (rep.valid)
    for (std::size_t a = 0; a < X.num_charts(); ++a)
      if (dlog(b.u[a]).is_zero()) rep.degenerate_charts.push_back(a);
  rep.degenerate = !rep.degenerate_charts.empty();
  return rep;
}

inline void require_valid(const TorsionBundle& b) {
  auto rep = validate_bundle(b);
  if (rep.valid) return;
  std::string msg;
  for (const auto& c : rep.checks)
    if (!c.passed) {
      msg = c.name + (c.detail.empty() ? "" : ": " + c.detail);
      break;
    }
  if (rep.error_kind == "NotAUnit") throw NotAUnit(msg);
  throw InvalidCocycle(msg);
}

/// Per-chart cover data plus certified overlap identifications.
struct CoverData {
  struct Chart {
    CoverRing ring;
    Vec v;           // the unit v_alpha
    Vec v_inverse;   // v^{n-1} / u_alpha
    RingElem du;     // u_alpha'
    Vec pullback_e;  // sigma^*(e_alpha) = v_alpha^{-1}, the trivialization of sigma^* L
  };
  struct OverlapCert {
    std::size_t alpha, beta;
    bool iso_certified = false;     // g^n u_alpha = u_beta, so v_beta -> g v_alpha is an isomorphism
    bool transition_matches = false;  // v_beta * v_alpha^{-1} = g_{alpha beta}
  };
  std::vector<Chart> charts;
  std::vector<OverlapCert> overlaps;
  bool degenerate = false;
};

inline CoverData build_cover(const TorsionBundle& b) {
  require_valid(b);
  CoverData cd;
  const auto& X = b.scheme;
  for (std::size_t a = 0; a < X.num_charts(); ++a) {
    CoverRing B(X.chart(a), b.n, b.u[a]);
    Vec v = B.v();
    Vec vinv = B.v_inverse();
    if (!(B.mul(v, vinv) == B.one())) throw std::logic_error("v is not a unit in the cover ring");
    cd.charts.push_back({B, v, vinv, derive(b.u[a]), vinv});
  }
  for (std::size_t i = 0; i < X.num_charts(); ++i)
    for (std::size_t j = i + 1; j < X.num_charts(); ++j) {
      const ChartRing& R = X.overlap(i, j);
      CoverRing Bi = cd.charts[i].ring.restrict_to(R);
      CoverRing Bj = cd.charts[j].ring.restrict_to(R);
      RingElem gij = b.transition(i, j, R);
      CoverIso phi{&Bj, &Bi, gij};
      CoverData::OverlapCert cert{i, j};
      cert.iso_certified = phi.certified();
      Vec vj = phi(Bj.v());
      Vec ratio = Bi.mul(vj, Bi.v_inverse());
      cert.transition_matches = ratio == Bi.from_base(gij) && Bi.pow(vj, b.n) == Bi.from_base(b.u[j].restrict_to(R));
      cd.overlaps.push_back(cert);
    }
  cd.degenerate = validate_bundle(b).degenerate;
  return cd;
}

/// Free-rank certificate: present B as A[v]_{<2n} modulo v^j (v^n - u).
inline Module cover_as_module(const CoverRing& B) {
  const auto& A = B.base();
  const std::size_t n = B.degree();
  std::vector<Vec> rels;
  for (std::size_t j = 0; j < n; ++j) {
    Vec r = zero_vec(A, 2 * n);
    r[j + n] = A.one();
    r[j] = -B.u();
    rels.push_back(std::move(r));
  }
  return Module(A, 2 * n, Matrix::from_columns(A, 2 * n, rels));
}

/// Y = Spec_Z O_Z[v]/(v^{p^r} - w) over Z = Spec A[w]/(w^m - u), with
/// n = m p^r and gcd(m, p) = 1.
struct CoverFactorization {
  unsigned m = 1, r = 0, pr = 1;
  std::vector<CoverRing> etale_stage;  // Z per chart

  /// Elements of the two-stage ring: pr coefficients in Z, in powers of v.
  using Element = std::vector<Vec>;

  Element mul(std::size_t chart, const Element& x, const Element& y) const {
    const CoverRing& Z = etale_stage[chart];
    Element out(pr, Z.zero());
    Vec w = Z.v();
    for (unsigned i = 0; i < pr; ++i)
      for (unsigned j = 0; j < pr; ++j) {
        Vec c = Z.mul(x[i], y[j]);
        if (i + j >= pr)
          out[i + j - pr] = out[i + j - pr] + Z.mul(w, c);
        else
          out[i + j] = out[i + j] + c;
      }
    return out;
  }
  /// The composite's isomorphism onto build_cover's ring: w -> v^{p^r}.
  Vec to_cover(std::size_t chart, const CoverRing& B, const Element& x) const {
    Vec out = B.zero();
    for (unsigned j = 0; j < pr; ++j)
      for (unsigned i = 0; i < m; ++i) {
        const RingElem& c = x[j][i];
        if (c.is_zero()) continue;
        out = out + B.mul(B.from_base(c), B.v_power(static_cast<unsigned long long>(i) * pr + j));
      }
    (void)chart;
    return out;
  }
  /// Certificate: every basis element w^i v^j lands on a distinct v^k and the
  /// defining relations hold in the image.
  bool certify(std::size_t chart, const CoverRing& B) const {
    std::vector<bool> hit(B.degree(), false);
    const CoverRing& Z = etale_stage[chart];
    for (unsigned j = 0; j < pr; ++j)
      for (unsigned i = 0; i < m; ++i) {
        Element e(pr, Z.zero());
        e[j] = Z.v_power(i);
        Vec img = to_cover(chart, B, e);
        std::size_t k = static_cast<std::size_t>(i) * pr + j;
        if (k >= B.degree() || !(img == B.v_power(k)) || hit[k]) return false;
        hit[k] = true;
      }
    Vec w_img = B.v_power(pr);
    return B.pow(B.v(), pr) == w_img && B.pow(w_img, m) == B.from_base(B.u());
  }
};

inline CoverFactorization factor_cover(const TorsionBundle& b) {
  require_valid(b);
  CoverFactorization f;
  unsigned p = b.p(), n = b.n;
  f.m = n;
  while (f.m % p == 0) {
    f.m /= p;
    ++f.r;
    f.pr *= p;
  }
  for (std::size_t a = 0; a < b.scheme.num_charts(); ++a) f.etale_stage.emplace_back(b.scheme.chart(a), f.m, b.u[a]);
  return f;
}

/// k v^{k-1} is a unit in A[v]/(v^k - u).
inline bool is_etale(const CoverRing& stage) {
  const auto& A = stage.base();
  Vec dv = stage.mul(stage.from_base(A.from_int(stage.degree())), stage.v_power(stage.degree() - 1));
  return stage.is_unit(dv);
}

/// The inseparable stage O_Z[v]/(v^{p^r} - w): its derivative p^r v^{p^r-1}
/// vanishes for r >= 1 and is 1 for r = 0.
inline bool inseparable_stage_is_etale(const CoverFactorization& f) { return f.r == 0; }

/// M = L^{p^r} with M^m = O via the same u: the bundle of the etale stage.
inline TorsionBundle etale_part(const TorsionBundle& b) {
  auto f = factor_cover(b);
  TorsionBundle M = b;
  M.n = f.m;
  for (auto& [key, gij] : M.g) gij = gij.pow(f.pr);
  return M;
}

}  // namespace ptconn
