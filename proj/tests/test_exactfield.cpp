#include <gtest/gtest.h>

#include <vector>

#include "ptconn/exactfield.hpp"
#include "ptconn/poly.hpp"

using namespace ptconn;

namespace {

struct FieldSize {
  unsigned p, e;
};

std::vector<FieldSize> small_fields() {
  std::vector<FieldSize> out;
  for (unsigned p = 2; p <= 61; ++p) {
    if (!is_small_prime(p)) continue;
    unsigned q = p;
    for (unsigned e = 1; q <= 64; ++e, q *= p) out.push_back({p, e});
  }
  return out;
}

// Schoolbook product of coefficient vectors reduced by the monic modulus.
std::vector<unsigned> naive_mul(const FqField& F, std::vector<unsigned> x, std::vector<unsigned> y) {
  unsigned p = F.p(), e = F.e();
  std::vector<unsigned> prod(2 * e, 0);
  for (unsigned i = 0; i < e; ++i)
    for (unsigned j = 0; j < e; ++j) prod[i + j] = (prod[i + j] + x[i] * y[j]) % p;
  const auto& m = F.modulus();
  for (unsigned k = 2 * e - 1; k >= e; --k) {
    unsigned c = prod[k];
    if (!c) continue;
    for (unsigned i = 0; i <= e; ++i) prod[k - e + i] = (prod[k - e + i] + p * p - c * m[i] % p) % p;
  }
  prod.resize(e);
  return prod;
}

}  // namespace

TEST(ExactField, CharacteristicTwoAddition) {
  const auto& F = FqField::get(2);
  FqElem one(F, 1);
  EXPECT_TRUE((one + one).is_zero());
}

TEST(ExactField, InverseOfTwoInF3) {
  const auto& F = FqField::get(3);
  EXPECT_EQ(FqElem(F, 2).inv(), FqElem(F, 2));
}

TEST(ExactField, F4GeneratorSquared) {
  const auto& F = FqField::get(2, 2);
  EXPECT_EQ(F.modulus(), (std::vector<unsigned>{1, 1, 1}));
  FqElem a(F, F.generator());
  EXPECT_EQ((a * a).to_string(), "a+1");
  EXPECT_EQ(a * a, a + FqElem(F, 1));
}

TEST(ExactField, FrobeniusInverseExamples) {
  EXPECT_EQ(FqElem(FqField::get(2), 1).frobenius_inverse(), FqElem(FqField::get(2), 1));
  EXPECT_EQ(FqElem(FqField::get(5), 3).frobenius_inverse(), FqElem(FqField::get(5), 3));
  const auto& F4 = FqField::get(2, 2);
  FqElem a(F4, F4.generator());
  EXPECT_EQ(a.frobenius_inverse(), a * a);
  EXPECT_EQ(a.frobenius_inverse().to_string(), "a+1");
}

TEST(ExactField, ModulusIsIrreducible) {
  for (auto [p, e] : small_fields()) {
    const auto& F = FqField::get(p, e);
    if (e == 1) continue;
    const auto& P = FqField::get(p);
    std::vector<Code> c(F.modulus().begin(), F.modulus().end());
    EXPECT_TRUE(is_irreducible(Poly(P, c))) << "p=" << p << " e=" << e;
  }
}

TEST(ExactField, TablesMatchSchoolbookArithmetic) {
  for (auto [p, e] : small_fields()) {
    const auto& F = FqField::get(p, e);
    for (unsigned x = 0; x < F.q(); ++x)
      for (unsigned y = 0; y < F.q(); ++y) {
        auto dx = F.digits(x), dy = F.digits(y);
        std::vector<unsigned> sum(e);
        for (unsigned i = 0; i < e; ++i) sum[i] = (dx[i] + dy[i]) % p;
        ASSERT_EQ(F.add(x, y), F.from_digits(sum));
        ASSERT_EQ(F.mul(x, y), F.from_digits(naive_mul(F, dx, dy))) << "q=" << F.q() << " " << x << "*" << y;
      }
  }
}

TEST(ExactField, InversesAndPowers) {
  for (auto [p, e] : small_fields()) {
    const auto& F = FqField::get(p, e);
    for (Code x = 1; x < F.q(); ++x) {
      ASSERT_EQ(F.mul(x, F.inv(x)), 1);
      ASSERT_EQ(F.pow(x, F.q() - 1), 1);
    }
    EXPECT_THROW(F.inv(0), DivisionByZero);
  }
}

TEST(ExactField, FrobeniusInverseIsAutomorphism) {
  for (auto [p, e] : small_fields()) {
    const auto& F = FqField::get(p, e);
    for (Code x = 0; x < F.q(); ++x) {
      ASSERT_EQ(F.pow(F.frobenius_inverse(x), p), x);
      ASSERT_EQ(F.frobenius(F.frobenius_inverse(x)), x);
      for (Code y = 0; y < F.q(); ++y) {
        ASSERT_EQ(F.frobenius_inverse(F.add(x, y)), F.add(F.frobenius_inverse(x), F.frobenius_inverse(y)));
        ASSERT_EQ(F.frobenius_inverse(F.mul(x, y)), F.mul(F.frobenius_inverse(x), F.frobenius_inverse(y)));
      }
    }
  }
}

TEST(ExactField, GeneratorIsPrimitive) {
  for (auto [p, e] : small_fields()) {
    const auto& F = FqField::get(p, e);
    if (F.q() == 2) continue;
    Code g = F.generator();
    Code x = g;
    unsigned ord = 1;
    while (x != 1) {
      x = F.mul(x, g);
      ++ord;
    }
    EXPECT_EQ(ord, F.q() - 1) << "q=" << F.q();
  }
}

TEST(ExactField, UnsupportedOrders) {
  EXPECT_THROW(FqField::get(4), UnsupportedField);
  EXPECT_THROW(FqField::get(101), UnsupportedField);
  EXPECT_THROW(FqField::get(2, 9), UnsupportedField);
  EXPECT_NO_THROW(FqField::get(2, 8));
}

TEST(ExactField, MixingFieldsThrows) {
  FqElem x(FqField::get(2), 1), y(FqField::get(3), 1);
  EXPECT_THROW(x + y, FieldMismatch);
}

TEST(ExactField, Interned) { EXPECT_EQ(&FqField::get(3, 2), &FqField::get(3, 2)); }
