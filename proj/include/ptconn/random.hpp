#pragma once

// Seeded random elements for self-checks and property tests.

#include <random>
#include <vector>

#include "ptconn/chartring.hpp"

namespace ptconn {

using Rng = std::mt19937_64;

inline Code random_code(const FqField& F, Rng& rng, bool nonzero = false) {
  std::uniform_int_distribution<unsigned> dist(nonzero ? 1u : 0u, F.q() - 1);
  return static_cast<Code>(dist(rng));
}

inline Poly random_poly(const FqField& F, Rng& rng, unsigned max_degree) {
  std::uniform_int_distribution<unsigned> deg(0, max_degree);
  unsigned d = deg(rng);
  std::vector<Code> c(d + 1);
  for (auto& x : c) x = random_code(F, rng);
  return Poly(F, std::move(c));
}

/// N / prod pi_j^{d_j} with deg N <= max_degree and d_j <= max_pole.
inline RingElem random_elem(const ChartRing& A, Rng& rng, unsigned max_degree = 3, unsigned max_pole = 2) {
  std::uniform_int_distribution<unsigned> pole(0, max_pole);
  std::vector<unsigned> den(A.num_inverted());
  for (auto& d : den) d = pole(rng);
  return RingElem(A, random_poly(A.field(), rng, max_degree), std::move(den));
}

/// c * prod pi_j^{k_j} with c != 0 and |k_j| <= max_exp.
inline RingElem random_unit(const ChartRing& A, Rng& rng, long max_exp = 2) {
  std::uniform_int_distribution<long> ex(-max_exp, max_exp);
  std::vector<long> den(A.num_inverted());
  for (auto& d : den) d = ex(rng);
  return A.fraction(Poly::constant(A.field(), random_code(A.field(), rng, true)), den);
}

}  // namespace ptconn
