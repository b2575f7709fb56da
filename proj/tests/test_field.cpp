#include <gtest/gtest.h>

#include "produkt/field.hpp"

using produkt::ErrorCode;
using produkt::Field;

namespace {

ErrorCode code_of(unsigned q) {
  try {
    Field f(q);
  } catch (const produkt::Error& e) {
    return e.code();
  }
  return ErrorCode::BadParameter;
}

class FieldAxioms : public ::testing::TestWithParam<unsigned> {};

TEST_P(FieldAxioms, RingLawsAndInverses) {
  const Field f(GetParam());
  const unsigned q = f.order();
  for (unsigned a = 0; a < q; ++a) {
    EXPECT_EQ(f.add(a, 0), a);
    EXPECT_EQ(f.mul(a, 1), a);
    EXPECT_EQ(f.add(a, f.neg(a)), 0);
    if (a) EXPECT_EQ(f.mul(a, f.inv(a)), 1);
    for (unsigned b = 0; b < q; ++b) {
      EXPECT_EQ(f.add(a, b), f.add(b, a));
      EXPECT_EQ(f.mul(a, b), f.mul(b, a));
      EXPECT_EQ(f.sub(f.add(a, b), b), a);
      for (unsigned c = 0; c < q; c += 1 + q / 8) {
        ASSERT_EQ(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
        ASSERT_EQ(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
      }
    }
  }
}

TEST_P(FieldAxioms, MultiplicativeGroupIsCyclic) {
  const Field f(GetParam());
  const unsigned q = f.order();
  bool found = false;
  for (unsigned g = 1; g < q && !found; ++g) {
    unsigned x = g, ord = 1;
    while (x != 1) {
      x = f.mul(x, g);
      ++ord;
    }
    found = ord == q - 1;
  }
  EXPECT_TRUE(found);
}

TEST_P(FieldAxioms, CharacteristicAnnihilates) {
  const Field f(GetParam());
  for (unsigned a = 0; a < f.order(); ++a) {
    unsigned s = 0;
    for (unsigned i = 0; i < f.characteristic(); ++i) s = f.add(s, a);
    EXPECT_EQ(s, 0u);
  }
}

INSTANTIATE_TEST_SUITE_P(SmallFields, FieldAxioms,
                         ::testing::Values(2u, 3u, 4u, 5u, 7u, 8u, 9u, 11u, 13u, 16u, 25u, 27u, 49u, 64u));

TEST(Field, RejectsNonPrimePowers) {
  EXPECT_EQ(code_of(6), ErrorCode::NotPrimePower);
  EXPECT_EQ(code_of(12), ErrorCode::NotPrimePower);
  EXPECT_EQ(code_of(1), ErrorCode::NotPrimePower);
  EXPECT_EQ(code_of(257), ErrorCode::TooLarge);
}

TEST(Field, FrobeniusIsAnAutomorphism) {
  const Field f(9);
  for (unsigned a = 0; a < 9; ++a)
    for (unsigned b = 0; b < 9; ++b) EXPECT_EQ(f.pow(f.add(a, b), 3), f.add(f.pow(a, 3), f.pow(b, 3)));
}

}  // namespace
