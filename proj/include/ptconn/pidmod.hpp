#pragma once

// Finitely presented modules over a chart ring, all routed through Smith
// normal form. A module is A^g / (column span of its relation matrix).

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ptconn/chartring.hpp"
#include "ptconn/error.hpp"

namespace ptconn {

using Vec = std::vector<RingElem>;

inline Vec zero_vec(const ChartRing& R, std::size_t n) { return Vec(n, R.zero()); }
inline Vec unit_vec(const ChartRing& R, std::size_t n, std::size_t i) {
  Vec v = zero_vec(R, n);
  v[i] = R.one();
  return v;
}
inline bool is_zero_vec(const Vec& v) {
  for (const auto& x : v)
    if (!x.is_zero()) return false;
  return true;
}
inline Vec operator+(const Vec& a, const Vec& b) {
  Vec r = a;
  for (std::size_t i = 0; i < r.size(); ++i) r[i] += b[i];
  return r;
}
inline Vec operator-(const Vec& a, const Vec& b) {
  Vec r = a;
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= b[i];
  return r;
}
inline Vec operator*(const RingElem& c, const Vec& a) {
  Vec r = a;
  for (auto& x : r) x = c * x;
  return r;
}

/// Divides v by the largest unit dividing every entry, normalized so the first
/// nonzero entry has leading coefficient 1. Keeps relations free of stray
/// unit factors such as t on a chart where t is inverted.
inline Vec strip_unit_content(const Vec& v) {
  const RingElem* first = nullptr;
  std::vector<long> low;
  for (const auto& x : v) {
    if (x.is_zero()) continue;
    auto f = x.factor();
    if (!first) {
      first = &x;
      low = f.exponents;
    } else {
      for (std::size_t j = 0; j < low.size(); ++j) low[j] = std::min(low[j], f.exponents[j]);
    }
  }
  if (!first) return v;
  const ChartRing& R = first->ring();
  RingElem unit = R.constant(first->factor().constant);
  for (std::size_t j = 0; j < low.size(); ++j) unit = unit * R.from_poly(R.inverted()[j]).pow(low[j]);
  Vec out;
  for (const auto& x : v) out.push_back(x / unit);
  return out;
}

class Matrix {
 public:
  Matrix(const ChartRing& R, std::size_t rows, std::size_t cols) : ring_(&R), rows_(rows), cols_(cols), e_(rows * cols, R.zero()) {}

  static Matrix identity(const ChartRing& R, std::size_t n) {
    Matrix m(R, n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = R.one();
    return m;
  }
  static Matrix from_columns(const ChartRing& R, std::size_t rows, const std::vector<Vec>& cols) {
    Matrix m(R, rows, cols.size());
    for (std::size_t j = 0; j < cols.size(); ++j)
      for (std::size_t i = 0; i < rows; ++i) m(i, j) = cols[j][i];
    return m;
  }

  const ChartRing& ring() const { return *ring_; }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  RingElem& operator()(std::size_t i, std::size_t j) { return e_[i * cols_ + j]; }
  const RingElem& operator()(std::size_t i, std::size_t j) const { return e_[i * cols_ + j]; }

  Vec column(std::size_t j) const {
    Vec v;
    v.reserve(rows_);
    for (std::size_t i = 0; i < rows_; ++i) v.push_back((*this)(i, j));
    return v;
  }
  std::vector<Vec> columns() const {
    std::vector<Vec> out;
    for (std::size_t j = 0; j < cols_; ++j) out.push_back(column(j));
    return out;
  }

  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols_ != b.rows_) throw std::invalid_argument("matrix dimension mismatch");
    Matrix r(*a.ring_, a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        if (a(i, k).is_zero()) continue;
        for (std::size_t j = 0; j < b.cols_; ++j)
          if (!b(k, j).is_zero()) r(i, j) += a(i, k) * b(k, j);
      }
    return r;
  }
  Vec apply(const Vec& x) const {
    if (x.size() != cols_) throw std::invalid_argument("vector dimension mismatch");
    Vec r = zero_vec(*ring_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j)
        if (!(*this)(i, j).is_zero() && !x[j].is_zero()) r[i] += (*this)(i, j) * x[j];
    return r;
  }
  /// [this | other]
  Matrix hcat(const Matrix& o) const {
    if (rows_ != o.rows_) throw std::invalid_argument("hcat row mismatch");
    Matrix r(*ring_, rows_, cols_ + o.cols_);
    for (std::size_t i = 0; i < rows_; ++i) {
      for (std::size_t j = 0; j < cols_; ++j) r(i, j) = (*this)(i, j);
      for (std::size_t j = 0; j < o.cols_; ++j) r(i, cols_ + j) = o(i, j);
    }
    return r;
  }

  friend bool operator==(const Matrix& a, const Matrix& b) {
    return a.ring_ == b.ring_ && a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.e_ == b.e_;
  }

  // Elementary operations used by the Smith reduction.
  void add_row_multiple(std::size_t dst, std::size_t src, const RingElem& c) {
    if (c.is_zero()) return;
    for (std::size_t j = 0; j < cols_; ++j)
      if (!(*this)(src, j).is_zero()) (*this)(dst, j) += c * (*this)(src, j);
  }
  void add_col_multiple(std::size_t dst, std::size_t src, const RingElem& c) {
    if (c.is_zero()) return;
    for (std::size_t i = 0; i < rows_; ++i)
      if (!(*this)(i, src).is_zero()) (*this)(i, dst) += c * (*this)(i, src);
  }
  void swap_rows(std::size_t a, std::size_t b) {
    if (a == b) return;
    for (std::size_t j = 0; j < cols_; ++j) std::swap((*this)(a, j), (*this)(b, j));
  }
  void swap_cols(std::size_t a, std::size_t b) {
    if (a == b) return;
    for (std::size_t i = 0; i < rows_; ++i) std::swap((*this)(i, a), (*this)(i, b));
  }
  void scale_row(std::size_t r, const RingElem& c) {
    for (std::size_t j = 0; j < cols_; ++j) (*this)(r, j) = c * (*this)(r, j);
  }
  void scale_col(std::size_t c, const RingElem& s) {
    for (std::size_t i = 0; i < rows_; ++i) (*this)(i, c) = s * (*this)(i, c);
  }

 private:
  const ChartRing* ring_;
  std::size_t rows_, cols_;
  std::vector<RingElem> e_;
};

/// U * M * V = D with U, V invertible (inverses tracked) and D diagonal,
/// d_0 | d_1 | ... , each nonzero d_i a monic polynomial coprime to S.
struct SmithForm {
  Matrix U, D, V, U_inv, V_inv;
  std::size_t rank = 0;
  std::vector<RingElem> diagonal;  // the `rank` nonzero diagonal entries
};

namespace detail {
inline std::atomic<bool>& snf_self_check_flag() {
#ifdef PTCONN_SNF_SELF_CHECK
  static std::atomic<bool> flag{true};
#else
  static std::atomic<bool> flag{false};
#endif
  return flag;
}
inline std::atomic<unsigned long long>& snf_verified_count() {
  static std::atomic<unsigned long long> n{0};
  return n;
}
}  // namespace detail

/// Re-verify every SNF postcondition by multiplication (on in test builds).
inline void set_snf_self_check(bool on) { detail::snf_self_check_flag() = on; }
inline bool snf_self_check() { return detail::snf_self_check_flag(); }
inline unsigned long long snf_verified_calls() { return detail::snf_verified_count(); }

/// Checks every SNF postcondition; returns an empty string on success.
inline std::string check_smith_form(const Matrix& M, const SmithForm& S) {
  const auto& R = M.ring();
  if (!(S.U * M * S.V == S.D)) return "U*M*V != D";
  if (!(S.U * S.U_inv == Matrix::identity(R, M.rows()))) return "U not invertible";
  if (!(S.V * S.V_inv == Matrix::identity(R, M.cols()))) return "V not invertible";
  for (std::size_t i = 0; i < S.D.rows(); ++i)
    for (std::size_t j = 0; j < S.D.cols(); ++j) {
      bool diag_nonzero = (i == j && i < S.rank);
      if (!diag_nonzero && !S.D(i, j).is_zero()) return "D not diagonal";
      if (diag_nonzero) {
        const auto& d = S.D(i, i);
        if (d.is_zero()) return "zero inside rank block";
        if (!d.denominator_exponents().empty() && d.denominator().degree() > 0) return "diagonal entry not normalized";
        if (!d.numerator().is_monic() || d.core() != d.numerator()) return "diagonal entry not normalized";
        if (i > 0 && !S.D(i - 1, i - 1).divides(d)) return "divisibility chain broken";
      }
    }
  return {};
}

inline SmithForm smith_normal_form(const Matrix& M) {
  const auto& R = M.ring();
  const std::size_t m = M.rows(), n = M.cols();
  SmithForm S{Matrix::identity(R, m), M, Matrix::identity(R, n), Matrix::identity(R, m), Matrix::identity(R, n), 0, {}};
  Matrix& A = S.D;

  auto row_add = [&](std::size_t dst, std::size_t src, const RingElem& c) {
    A.add_row_multiple(dst, src, c);
    S.U.add_row_multiple(dst, src, c);
    S.U_inv.add_col_multiple(src, dst, -c);
  };
  auto col_add = [&](std::size_t dst, std::size_t src, const RingElem& c) {
    A.add_col_multiple(dst, src, c);
    S.V.add_col_multiple(dst, src, c);
    S.V_inv.add_row_multiple(src, dst, -c);
  };
  auto row_swap = [&](std::size_t a, std::size_t b) {
    A.swap_rows(a, b);
    S.U.swap_rows(a, b);
    S.U_inv.swap_cols(a, b);
  };
  auto col_swap = [&](std::size_t a, std::size_t b) {
    A.swap_cols(a, b);
    S.V.swap_cols(a, b);
    S.V_inv.swap_rows(a, b);
  };

  std::size_t k = 0;
  for (; k < std::min(m, n); ++k) {
    for (;;) {
      // Pivot: minimal Euclidean norm, first in row-major order on ties.
      long best = -1;
      std::size_t bi = 0, bj = 0;
      for (std::size_t i = k; i < m; ++i)
        for (std::size_t j = k; j < n; ++j) {
          if (A(i, j).is_zero()) continue;
          long nm = A(i, j).norm();
          if (best < 0 || nm < best) {
            best = nm;
            bi = i;
            bj = j;
          }
        }
      if (best < 0) break;
      row_swap(k, bi);
      col_swap(k, bj);

      bool clean = true;
      for (std::size_t i = k + 1; i < m; ++i) {
        if (A(i, k).is_zero()) continue;
        auto [q, r] = A(i, k).divmod(A(k, k));
        row_add(i, k, -q);
        if (!A(i, k).is_zero()) clean = false;
      }
      for (std::size_t j = k + 1; j < n; ++j) {
        if (A(k, j).is_zero()) continue;
        auto [q, r] = A(k, j).divmod(A(k, k));
        col_add(j, k, -q);
        if (!A(k, j).is_zero()) clean = false;
      }
      if (!clean) continue;

      bool chain_ok = true;
      for (std::size_t i = k + 1; i < m && chain_ok; ++i)
        for (std::size_t j = k + 1; j < n; ++j)
          if (!A(k, k).divides(A(i, j))) {
            row_add(k, i, R.one());
            chain_ok = false;
            break;
          }
      if (!chain_ok) continue;

      RingElem eps_inv = A(k, k).unit_part().inverse();
      A.scale_row(k, eps_inv);
      S.U.scale_row(k, eps_inv);
      S.U_inv.scale_col(k, eps_inv.inverse());
      break;
    }
    if (k >= std::min(m, n) || A(k, k).is_zero()) break;
  }
  S.rank = 0;
  for (std::size_t i = 0; i < std::min(m, n); ++i) {
    if (A(i, i).is_zero()) break;
    S.diagonal.push_back(A(i, i));
    ++S.rank;
  }
  if (snf_self_check()) {
    auto err = check_smith_form(M, S);
    if (!err.empty()) throw std::logic_error("Smith normal form self-check failed: " + err);
    ++detail::snf_verified_count();
  }
  return S;
}

/// Determinantal rank via SNF.
inline std::size_t rank(const Matrix& M) { return smith_normal_form(M).rank; }

/// Some c with G*c = x, if one exists.
inline std::optional<Vec> solve(const Matrix& G, const Vec& x) {
  const auto& R = G.ring();
  if (G.cols() == 0) {
    if (is_zero_vec(x)) return Vec{};
    return std::nullopt;
  }
  SmithForm S = smith_normal_form(G);
  Vec y = S.U.apply(x);
  Vec z = zero_vec(R, G.cols());
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (i < S.rank) {
      if (!S.diagonal[i].divides(y[i])) return std::nullopt;
      z[i] = S.diagonal[i].divide_into(y[i]);
    } else if (!y[i].is_zero()) {
      return std::nullopt;
    }
  }
  return S.V.apply(z);
}

/// Basis of {c : G*c = 0} (a free module over the PID).
inline std::vector<Vec> kernel_basis(const Matrix& G) {
  const auto& R = G.ring();
  std::vector<Vec> out;
  if (G.rows() == 0) {
    for (std::size_t j = 0; j < G.cols(); ++j) out.push_back(unit_vec(R, G.cols(), j));
    return out;
  }
  SmithForm S = smith_normal_form(G);
  for (std::size_t j = S.rank; j < G.cols(); ++j) out.push_back(S.V.column(j));
  return out;
}

/// SNF-derived structure of a presented module.
struct ModuleInvariants {
  std::size_t tf_rank = 0;
  std::vector<Poly> torsion;  // nonunit invariant factors, divisibility chain
};

class Module {
 public:
  Module(const ChartRing& R, std::size_t gens, Matrix relations, std::vector<std::string> labels = {})
      : ring_(&R), gens_(gens), rel_(std::move(relations)), labels_(std::move(labels)), cache_(std::make_shared<Cache>()) {
    if (rel_.rows() != gens_) throw std::invalid_argument("relation matrix must have one row per generator");
    if (labels_.empty())
      for (std::size_t i = 0; i < gens_; ++i) labels_.push_back("g" + std::to_string(i));
  }
  static Module free(const ChartRing& R, std::size_t n, std::vector<std::string> labels = {}) {
    return Module(R, n, Matrix(R, n, 0), std::move(labels));
  }
  static Module zero(const ChartRing& R) { return Module(R, 0, Matrix(R, 0, 0)); }

  const ChartRing& ring() const { return *ring_; }
  std::size_t num_gens() const { return gens_; }
  const Matrix& relations() const { return rel_; }
  const std::vector<std::string>& labels() const { return labels_; }

  const ModuleInvariants& invariants() const {
    std::call_once(cache_->once, [&] {
      ModuleInvariants inv;
      std::size_t r = 0;
      if (rel_.cols() > 0 && gens_ > 0) {
        const SmithForm& S = relation_smith_form();
        r = S.rank;
        for (const auto& d : S.diagonal)
          if (!d.is_unit()) inv.torsion.push_back(d.core());
      }
      inv.tf_rank = gens_ - r;
      cache_->inv = std::move(inv);
    });
    return cache_->inv;
  }
  std::size_t tf_rank() const { return invariants().tf_rank; }
  bool is_zero_module() const { return tf_rank() == 0 && invariants().torsion.empty(); }

  /// Smith form of the relation matrix, computed once.
  const SmithForm& relation_smith_form() const {
    std::call_once(cache_->snf_once, [&] { cache_->snf.emplace(smith_normal_form(rel_)); });
    return *cache_->snf;
  }

  bool is_zero(const Vec& x) const {
    if (x.size() != gens_) throw std::invalid_argument("element has wrong size");
    if (rel_.cols() == 0) return is_zero_vec(x);
    const SmithForm& S = relation_smith_form();
    Vec y = S.U.apply(x);
    for (std::size_t i = 0; i < y.size(); ++i) {
      if (y[i].is_zero()) continue;
      if (i >= S.rank || !S.diagonal[i].divides(y[i])) return false;
    }
    return true;
  }
  bool equal(const Vec& a, const Vec& b) const { return is_zero(a - b); }

  /// Coefficients c with x = sum c_k gens_k in this module.
  std::optional<Vec> express(const std::vector<Vec>& gens, const Vec& x) const {
    Matrix G = Matrix::from_columns(*ring_, gens_, gens).hcat(rel_);
    auto sol = solve(G, x);
    if (!sol) return std::nullopt;
    sol->resize(gens.size(), ring_->zero());
    return sol;
  }
  bool in_span(const std::vector<Vec>& gens, const Vec& x) const { return !!express(gens, x); }

  /// Relations among `gens` viewed in this module: {c : sum c_k gens_k = 0}.
  std::vector<Vec> syzygies(const std::vector<Vec>& gens) const {
    Matrix G = Matrix::from_columns(*ring_, gens_, gens).hcat(rel_);
    std::vector<Vec> out;
    for (auto& v : kernel_basis(G)) {
      v.resize(gens.size(), ring_->zero());
      if (!is_zero_vec(v)) out.push_back(std::move(v));
    }
    return out;
  }
  /// Abstract presentation of the submodule spanned by `gens`.
  Module submodule(const std::vector<Vec>& gens, std::vector<std::string> labels = {}) const {
    auto syz = syzygies(gens);
    for (auto& c : syz) c = strip_unit_content(c);
    return Module(*ring_, gens.size(), Matrix::from_columns(*ring_, gens.size(), syz), std::move(labels));
  }
  /// this / span(gens), on the same generators.
  Module quotient(const std::vector<Vec>& gens) const {
    return Module(*ring_, gens_, rel_.hcat(Matrix::from_columns(*ring_, gens_, gens)), labels_);
  }

  /// Torsion submodule as a direct sum of cyclic modules A/(d_i), together
  /// with the generators of each summand in this module's coordinates.
  std::pair<Module, std::vector<Vec>> torsion_submodule() const {
    std::vector<Vec> gens;
    std::vector<RingElem> ds;
    if (rel_.cols() > 0 && gens_ > 0) {
      const SmithForm& S = relation_smith_form();
      for (std::size_t i = 0; i < S.rank; ++i)
        if (!S.diagonal[i].is_unit()) {
          gens.push_back(S.U_inv.column(i));
          ds.push_back(S.diagonal[i]);
        }
    }
    Matrix rel(*ring_, ds.size(), ds.size());
    for (std::size_t i = 0; i < ds.size(); ++i) rel(i, i) = ds[i];
    return {Module(*ring_, ds.size(), std::move(rel)), gens};
  }

  std::string render(const Vec& x) const {
    std::string out;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (x[i].is_zero()) continue;
      std::string c = x[i].to_string();
      std::string term;
      if (x[i].is_one())
        term = labels_[i];
      else
        term = (c.find_first_of("+-/") != std::string::npos ? "(" + c + ")" : c) + "*" + labels_[i];
      out += (out.empty() ? "" : " + ") + term;
    }
    return out.empty() ? "0" : out;
  }

 private:
  struct Cache {
    std::once_flag once;
    ModuleInvariants inv;
    std::once_flag snf_once;
    std::optional<SmithForm> snf;
  };
  const ChartRing* ring_;
  std::size_t gens_;
  Matrix rel_;
  std::vector<std::string> labels_;
  std::shared_ptr<Cache> cache_;
};

inline Module torsion_submodule(const Module& M) { return M.torsion_submodule().first; }
inline std::size_t tf_rank(const Module& M) { return M.tf_rank(); }

/// A-linear map given on generators; column j is the image of source gen j.
struct ModuleMap {
  Module source;
  Module target;
  Matrix matrix;

  ModuleMap(Module s, Module t, Matrix m) : source(std::move(s)), target(std::move(t)), matrix(std::move(m)) {
    if (matrix.rows() != target.num_gens() || matrix.cols() != source.num_gens())
      throw std::invalid_argument("map matrix does not match module sizes");
  }
  static ModuleMap zero(Module s, Module t) {
    const auto& R = s.ring();
    Matrix m(R, t.num_gens(), s.num_gens());
    return ModuleMap(std::move(s), std::move(t), std::move(m));
  }

  Vec operator()(const Vec& x) const { return matrix.apply(x); }

  /// Index of a source relation whose image is nonzero in the target, if any.
  std::optional<std::size_t> ill_defined_relation() const {
    for (std::size_t j = 0; j < source.relations().cols(); ++j)
      if (!target.is_zero(matrix.apply(source.relations().column(j)))) return j;
    return std::nullopt;
  }
  bool well_defined() const { return !ill_defined_relation(); }
};

/// Generators (in source coordinates) of ker f. Throws IllDefinedMap.
inline std::vector<Vec> kernel_gens(const ModuleMap& f) {
  const auto& R = f.source.ring();
  Matrix G = f.matrix.hcat(f.target.relations());
  std::vector<Vec> out;
  for (auto& v : kernel_basis(G)) {
    v.resize(f.source.num_gens(), R.zero());
    if (!is_zero_vec(v) && !f.source.is_zero(v)) out.push_back(std::move(v));
  }
  return out;
}
inline Module kernel(const ModuleMap& f) {
  if (!f.well_defined()) throw IllDefinedMap("kernel of an ill-defined map");
  return f.source.submodule(kernel_gens(f));
}
inline Module image(const ModuleMap& f) {
  if (!f.well_defined()) throw IllDefinedMap("image of an ill-defined map");
  return f.target.submodule(f.matrix.columns());
}
inline bool membership(const Vec& x, const Module& ambient, const std::vector<Vec>& submodule_gens) {
  return ambient.in_span(submodule_gens, x);
}

struct Junction {
  std::size_t index = 0;
  std::string module;
  bool exact = true;
  std::string failure;  // "", "ill-defined", "im-not-in-ker", "ker-not-in-im"
  std::optional<Vec> witness;
  std::string witness_text;
};

struct ExactnessReport {
  std::vector<Junction> junctions;
  bool exact() const {
    for (const auto& j : junctions)
      if (!j.exact) return false;
    return true;
  }
  std::vector<bool> pattern() const {
    std::vector<bool> out;
    for (const auto& j : junctions) out.push_back(j.exact);
    return out;
  }
};

/// Checks ker = im at every interior module of a chain of maps. A map that is
/// not well defined fails the junction at its target, with the image of the
/// offending relation as witness.
inline ExactnessReport is_exact(const std::vector<ModuleMap>& seq, const std::vector<std::string>& names = {}) {
  ExactnessReport rep;
  for (std::size_t k = 0; k + 1 < seq.size(); ++k) {
    const ModuleMap& f = seq[k];
    const ModuleMap& g = seq[k + 1];
    if (f.target.num_gens() != g.source.num_gens()) throw std::invalid_argument("maps are not composable");
    const Module& M = f.target;
    Junction J;
    J.index = k;
    J.module = k < names.size() ? names[k] : "M" + std::to_string(k + 1);
    auto fail = [&](std::string why, Vec w) {
      J.exact = false;
      J.failure = std::move(why);
      J.witness_text = M.render(w);
      J.witness = std::move(w);
    };
    if (auto bad = f.ill_defined_relation()) {
      fail("ill-defined", f(f.source.relations().column(*bad)));
      rep.junctions.push_back(std::move(J));
      continue;
    }
    auto im = f.matrix.columns();
    for (const auto& y : im)
      if (!g.target.is_zero(g(y))) {
        fail("im-not-in-ker", y);
        break;
      }
    if (J.exact)
      for (const auto& x : kernel_gens(g))
        if (!M.in_span(im, x)) {
          fail("ker-not-in-im", x);
          break;
        }
    rep.junctions.push_back(std::move(J));
  }
  return rep;
}

}  // namespace ptconn
