#pragma once

#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "ptconn/chartring.hpp"
#include "ptconn/fixtures.hpp"
#include "ptconn/io.hpp"

namespace testing_support {

using namespace ptconn;

/// F_{p^e}[t] with the given polynomials (written in t) inverted.
inline const ChartRing& ring(unsigned p, unsigned e, const std::vector<std::string>& inverted) {
  const FqField& F = FqField::get(p, e);
  std::vector<Poly> inv;
  for (const auto& s : inverted) inv.push_back(parse_poly(F, s));
  return ChartRing::make(F, inv);
}

inline RingElem el(const ChartRing& A, const std::string& s) { return parse_elem(A, s); }

inline const std::vector<std::string>& fixture_names() {
  static const std::vector<std::string> names{"COPRIME", "DEGENERATE", "GM_P2", "GM_P3", "MIXED", "TWOCHART", "ZEROTORSION"};
  return names;
}

inline const Fixture& fixture(const std::string& name) {
  static std::map<std::string, Fixture> cache;
  static std::mutex mu;
  std::lock_guard lock(mu);
  auto it = cache.find(name);
  if (it == cache.end()) it = cache.emplace(name, load_fixture(name)).first;
  return it->second;
}

}  // namespace testing_support
