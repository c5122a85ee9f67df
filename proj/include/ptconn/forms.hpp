#pragma once

// Kaehler forms on a chart (free on dt) and on its cover B = A[v]/(v^n - u).
//
// On the cover, Omega^1 is generated by v^j dt (index j) and v^j dv
// (index n + j) modulo B * (n v^{n-1} dv - u' dt); Omega^2 is generated by
// v^j dt^dv modulo the ideal generated by u' and n v^{n-1}.

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ptconn/chartring.hpp"
#include "ptconn/cover.hpp"
#include "ptconn/error.hpp"
#include "ptconn/pidmod.hpp"

namespace ptconn {

/// A form on a chart: a function (degree 0) or coeff * dt (degree 1).
/// Degree 2 forms on a curve vanish; they carry a zero coefficient.
struct ChartForm {
  unsigned degree = 0;
  RingElem coeff;

  static ChartForm function(RingElem f) { return {0, std::move(f)}; }
  static ChartForm one_form(RingElem f) { return {1, std::move(f)}; }
  bool is_zero() const { return degree >= 2 || coeff.is_zero(); }
  friend bool operator==(const ChartForm& a, const ChartForm& b) {
    if (a.degree != b.degree) return false;
    return a.is_zero() ? b.is_zero() : a.coeff == b.coeff;
  }
  std::string to_string() const {
    if (is_zero()) return "0";
    if (degree == 0) return coeff.to_string();
    if (coeff.is_one()) return "dt";
    std::string c = coeff.to_string();
    return (c.find_first_of("+-/") != std::string::npos ? "(" + c + ")" : c) + "*dt";
  }
};

inline ChartForm d(const ChartForm& w) {
  const auto& A = w.coeff.ring();
  if (w.degree == 0) return ChartForm::one_form(derive(w.coeff));
  return {w.degree + 1, A.zero()};
}

inline ChartForm wedge(const ChartForm& a, const ChartForm& b) {
  if (a.degree + b.degree > 2) throw DegreeOverflow("wedge degree exceeds 2");
  const auto& A = a.coeff.ring();
  if (a.degree + b.degree == 2) return {2, A.zero()};
  return {a.degree + b.degree, a.coeff * b.coeff};
}

struct CoverForm {
  unsigned degree = 0;
  Vec coords;  // n, 2n or n entries for degrees 0, 1, 2
};

inline std::size_t cover_form_size(const CoverRing& B, unsigned degree) {
  const std::size_t n = B.degree();
  switch (degree) {
    case 0: return n;
    case 1: return 2 * n;
    case 2: return n;
    default: return 0;
  }
}

inline std::string v_power_label(std::size_t j) {
  if (j == 0) return "";
  if (j == 1) return "v*";
  return "v^" + std::to_string(j) + "*";
}

/// Omega^i of the cover as a presented A-module.
inline Module omega_cover(const CoverRing& B, unsigned degree) {
  const auto& A = B.base();
  const std::size_t n = B.degree();
  std::vector<std::string> labels;
  std::vector<Vec> rels;
  RingElem du = derive(B.u());
  RingElem nA = A.from_int(static_cast<long long>(n));
  // v^j * (n v^{n-1}) reduced: lands on index (n-1+j) mod n with factor u for j >= 1.
  auto b_coeff = [&](std::size_t j) { return j == 0 ? nA : nA * B.u(); };
  switch (degree) {
    case 0:
      for (std::size_t j = 0; j < n; ++j) labels.push_back(j == 0 ? "1" : j == 1 ? "v" : "v^" + std::to_string(j));
      return Module::free(A, n, labels);
    case 1:
      for (std::size_t j = 0; j < n; ++j) labels.push_back(v_power_label(j) + "dt");
      for (std::size_t j = 0; j < n; ++j) labels.push_back(v_power_label(j) + "dv");
      for (std::size_t j = 0; j < n; ++j) {
        Vec r = zero_vec(A, 2 * n);
        r[j] = -du;
        r[n + (n - 1 + j) % n] += b_coeff(j);
        rels.push_back(std::move(r));
      }
      return Module(A, 2 * n, Matrix::from_columns(A, 2 * n, rels), labels);
    case 2:
      for (std::size_t j = 0; j < n; ++j) labels.push_back(v_power_label(j) + "dt^dv");
      for (std::size_t j = 0; j < n; ++j) {
        Vec r = zero_vec(A, n);
        r[j] = -du;
        rels.push_back(std::move(r));
      }
      for (std::size_t j = 0; j < n; ++j) {
        Vec r = zero_vec(A, n);
        r[(n - 1 + j) % n] = b_coeff(j);
        rels.push_back(std::move(r));
      }
      return Module(A, n, Matrix::from_columns(A, n, rels), labels);
    default:
      return Module::zero(A);
  }
}

inline CoverForm zero_form(const CoverRing& B, unsigned degree) {
  return {degree, zero_vec(B.base(), cover_form_size(B, degree))};
}

inline CoverForm cover_function(const CoverRing& B, Vec f) {
  if (f.size() != B.degree()) throw std::invalid_argument("function has wrong size");
  return {0, std::move(f)};
}

/// Basic one-forms f*dt and f*dv for f in B.
inline CoverForm times_dt(const CoverRing& B, const Vec& f) {
  CoverForm w = zero_form(B, 1);
  for (std::size_t j = 0; j < B.degree(); ++j) w.coords[j] = f[j];
  return w;
}
inline CoverForm times_dv(const CoverRing& B, const Vec& f) {
  CoverForm w = zero_form(B, 1);
  for (std::size_t j = 0; j < B.degree(); ++j) w.coords[B.degree() + j] = f[j];
  return w;
}

/// dt and dv components of a one-form, as elements of B.
inline std::pair<Vec, Vec> split_one_form(const CoverRing& B, const CoverForm& w) {
  const std::size_t n = B.degree();
  Vec F(w.coords.begin(), w.coords.begin() + static_cast<long>(n));
  Vec H(w.coords.begin() + static_cast<long>(n), w.coords.end());
  return {F, H};
}

inline CoverForm operator+(const CoverForm& a, const CoverForm& b) {
  if (a.degree != b.degree) throw std::invalid_argument("adding forms of different degree");
  return {a.degree, a.coords + b.coords};
}
inline CoverForm operator-(const CoverForm& a, const CoverForm& b) {
  if (a.degree != b.degree) throw std::invalid_argument("subtracting forms of different degree");
  return {a.degree, a.coords - b.coords};
}

/// f * w for f in B.
inline CoverForm scale(const CoverRing& B, const Vec& f, const CoverForm& w) {
  const std::size_t n = B.degree();
  CoverForm out = zero_form(B, w.degree);
  for (std::size_t block = 0; block * n < w.coords.size(); ++block) {
    Vec c(w.coords.begin() + static_cast<long>(block * n), w.coords.begin() + static_cast<long>((block + 1) * n));
    Vec p = B.mul(f, c);
    for (std::size_t j = 0; j < n; ++j) out.coords[block * n + j] = p[j];
  }
  return out;
}
inline CoverForm scale(const CoverRing& B, const RingElem& a, const CoverForm& w) { return scale(B, B.from_base(a), w); }

/// d/dv on B = A[v]/(v^n - u), coordinatewise: v^j -> j v^{j-1}.
inline Vec partial_v(const CoverRing& B, const Vec& f) {
  const auto& A = B.base();
  Vec r = B.zero();
  for (std::size_t j = 1; j < B.degree(); ++j) r[j - 1] = A.from_int(static_cast<long long>(j)) * f[j];
  return r;
}
/// d/dt on coefficients (v held fixed).
inline Vec partial_t(const CoverRing& B, const Vec& f) {
  Vec r = B.zero();
  for (std::size_t j = 0; j < B.degree(); ++j) r[j] = derive(f[j]);
  return r;
}

/// Exterior derivative on the cover, computed on the standard lift.
inline CoverForm d(const CoverRing& B, const CoverForm& w) {
  switch (w.degree) {
    case 0: return times_dt(B, partial_t(B, w.coords)) + times_dv(B, partial_v(B, w.coords));
    case 1: {
      auto [F, H] = split_one_form(B, w);
      return {2, partial_t(B, H) - partial_v(B, F)};
    }
    default: return {w.degree + 1, {}};
  }
}

inline CoverForm wedge(const CoverRing& B, const CoverForm& a, const CoverForm& b) {
  if (a.degree + b.degree > 2) throw DegreeOverflow("wedge degree exceeds 2");
  if (a.degree == 0) return scale(B, a.coords, b);
  if (b.degree == 0) return scale(B, b.coords, a);
  auto [F1, H1] = split_one_form(B, a);
  auto [F2, H2] = split_one_form(B, b);
  return {2, B.mul(F1, H2) - B.mul(H1, F2)};
}

/// dv/v = v^{-1} dv.
inline CoverForm dv_over_v(const CoverRing& B) { return times_dv(B, B.v_inverse()); }

/// Pullback of a chart form along the cover map.
inline CoverForm sigma_star(const CoverRing& B, const ChartForm& w) {
  if (w.degree == 0) return cover_function(B, B.from_base(w.coeff));
  if (w.degree == 1) return times_dt(B, B.from_base(w.coeff));
  return zero_form(B, w.degree);
}

inline bool forms_equal(const CoverRing& B, const CoverForm& a, const CoverForm& b) {
  if (a.degree != b.degree) return false;
  if (a.degree > 2) return true;
  return omega_cover(B, a.degree).equal(a.coords, b.coords);
}
inline bool form_is_zero(const CoverRing& B, const CoverForm& a) {
  if (a.degree > 2) return true;
  return omega_cover(B, a.degree).is_zero(a.coords);
}

inline CoverForm restrict_form(const CoverRing& B, const CoverForm& w, const ChartRing& target) {
  return {w.degree, B.restrict_elem(w.coords, target)};
}

/// Transport of forms along an isomorphism v_src -> c v_dst:
/// dv_src -> c' v_dst dt + c dv_dst.
inline CoverForm transport(const CoverIso& phi, const CoverForm& w) {
  const CoverRing& D = *phi.dst;
  const std::size_t n = phi.src->degree();
  switch (w.degree) {
    case 0: return cover_function(D, phi(w.coords));
    case 1: {
      Vec F(w.coords.begin(), w.coords.begin() + static_cast<long>(n));
      Vec H(w.coords.begin() + static_cast<long>(n), w.coords.end());
      Vec pF = phi(F), pH = phi(H);
      Vec dvt = D.mul(D.from_base(derive(phi.c)), D.v());
      return times_dt(D, pF + D.mul(pH, dvt)) + times_dv(D, D.mul(pH, D.from_base(phi.c)));
    }
    case 2: return {2, D.mul(phi(w.coords), D.from_base(phi.c))};
    default: return {w.degree, {}};
  }
}

inline std::string render_form(const CoverRing& B, const CoverForm& w) {
  if (w.degree > 2) return "0";
  return omega_cover(B, w.degree).render(w.coords);
}

/// The global one-form omega_L, locally dlog u_alpha * dt. Throws
/// GluingFailure if the local forms disagree on an overlap.
struct OmegaLForm {
  std::vector<ChartForm> local;
  bool degenerate = false;  // omega_L vanishes identically on some chart
  std::vector<std::size_t> vanishing_charts;
};

inline OmegaLForm omega_l_form(const TorsionBundle& b) {
  require_valid(b);
  OmegaLForm out;
  const auto& X = b.scheme;
  for (std::size_t a = 0; a < X.num_charts(); ++a) {
    out.local.push_back(ChartForm::one_form(dlog(b.u[a])));
    if (out.local.back().coeff.is_zero()) out.vanishing_charts.push_back(a);
  }
  out.degenerate = !out.vanishing_charts.empty();
  for (std::size_t i = 0; i < X.num_charts(); ++i)
    for (std::size_t j = i + 1; j < X.num_charts(); ++j) {
      const ChartRing& R = X.overlap(i, j);
      RingElem wi = out.local[i].coeff.restrict_to(R), wj = out.local[j].coeff.restrict_to(R);
      if (!(wi == wj))
        throw GluingFailure("dlog u differs on overlap (" + std::to_string(i) + "," + std::to_string(j) + "): " +
                            wi.to_string() + " vs " + wj.to_string());
    }
  return out;
}

/// Cartier operator on one-forms. Writing f = N/Q^p with
/// N = sum_i N_i(t^p) t^i, C(f dt) = N_{p-1}^{1/p}(t) / Q dt, coefficients
/// of N_{p-1} taken through the inverse Frobenius.
inline ChartForm cartier(const ChartForm& w) {
  if (w.degree != 1) throw std::invalid_argument("the Cartier operator acts on one-forms");
  const auto& A = w.coeff.ring();
  const auto& F = A.field();
  const unsigned p = F.p();
  if (w.coeff.is_zero()) return ChartForm::one_form(A.zero());
  const auto& den = w.coeff.denominator_exponents();
  std::vector<unsigned> qexp(den.size());
  Poly N = w.coeff.numerator();
  for (std::size_t j = 0; j < den.size(); ++j) {
    qexp[j] = (den[j] + p - 1) / p;
    unsigned pad = qexp[j] * p - den[j];
    if (pad) N *= A.inverted()[j].pow(pad);
  }
  std::vector<Code> out;
  for (std::size_t k = 0; k * p + (p - 1) < N.coeffs().size(); ++k) out.push_back(F.frobenius_inverse(N.coeff(k * p + p - 1)));
  return ChartForm::one_form(RingElem(A, Poly(F, out), qexp));
}

}  // namespace ptconn
