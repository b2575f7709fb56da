#include <gtest/gtest.h>

#include <set>

#include "oracle.hpp"
#include "produkt/subset.hpp"

using namespace produkt;

namespace {

std::set<Elem> as_set(const Subset& s) {
  const auto m = s.members();
  return {m.begin(), m.end()};
}

GroupPtr group(const char* spec) { return shared_context(GroupSpec::parse(spec)); }

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::IoError;  // sentinel: nothing thrown
}

TEST(Subset, MembershipAndCounts) {
  auto G = group("A:5");
  Subset s = Subset::of(G, {3, 7, 7, 59});
  EXPECT_EQ(s.size(), 3u);
  EXPECT_TRUE(s.contains(59));
  EXPECT_FALSE(s.contains(0));
  EXPECT_EQ(s.least(), 3u);
  EXPECT_EQ(Subset::full(G).size(), 60u);
  EXPECT_TRUE(Subset::full(G).is_full());
  EXPECT_EQ(code_of([&] { s.insert(60); }), ErrorCode::IndexOutOfRange);
}

TEST(Subset, ContextMismatch) {
  auto a = Subset::of(group("A:5"), {1});
  auto b = Subset::of(group("PSL:2:5"), {1});
  EXPECT_EQ(code_of([&] { (void)subset_product(a, b); }), ErrorCode::ContextMismatch);
}

TEST(Product, MatchesDefinition) {
  for (const char* spec : {"A:5", "A:6", "PSL:2:7", "PSL:3:2"}) {
    auto G = group(spec);
    for (std::uint32_t sa : {1u, 2u, 5u, 17u})
      for (std::uint32_t sb : {1u, 3u, 11u, 40u}) {
        const Subset A = random_subset(G, sa, sa * 31 + sb);
        const Subset B = random_subset(G, sb, sb * 17 + sa);
        const auto expected =
            oracle::product(A.members(), B.members(), [&](Elem x, Elem y) { return G->mul(x, y); });
        EXPECT_EQ(as_set(subset_product(A, B)), expected) << spec;
      }
  }
}

TEST(Product, PermutationProductsAgainstArrays) {
  auto G = group("A:7");
  const oracle::PermIndex ref(*G);
  const Subset A = random_subset(G, 40, 1), B = random_subset(G, 60, 2);
  const auto expected = oracle::product(A.members(), B.members(), [&](Elem x, Elem y) { return ref.mul(x, y); });
  EXPECT_EQ(as_set(subset_product(A, B)), expected);
}

TEST(Product, LargeProductUsesFullSpace) {
  auto G = group("A:8");
  const Subset A = random_subset(G, 3000, 5);
  const Subset P = subset_product(A, A);
  EXPECT_TRUE(P.is_full());
}

TEST(Conjugation, ConjugateInverseTranslate) {
  auto G = group("PSL:2:11");
  const Subset A = random_subset(G, 30, 9);
  const Elem g = 123;
  std::set<Elem> conj, inv, trans;
  for (Elem a : A.members()) {
    conj.insert(G->mul(G->mul(G->inv(g), a), g));
    inv.insert(G->inv(a));
    trans.insert(G->mul(g, a));
  }
  EXPECT_EQ(as_set(subset_conjugate(A, g)), conj);
  EXPECT_EQ(as_set(subset_inverse(A)), inv);
  EXPECT_EQ(as_set(left_translate(g, A)), trans);
}

TEST(Power, RepeatedSquaringMatchesIteration) {
  auto G = group("A:6");
  const Subset A = Subset::of(G, {kIdentity, G->parse_element("(1 2 3)"), G->parse_element("(1 2)(3 4)")});
  Subset iter = A;
  for (unsigned k = 1; k <= 7; ++k) {
    EXPECT_EQ(subset_power(A, k), iter) << k;
    iter = subset_product(iter, A);
  }
}

TEST(Normalize, ShiftAndSymmetrize) {
  auto G = group("A:5");
  const Subset A = Subset::of(G, {5, 17, 33});
  const auto [B, a] = normalize_to_identity(A);
  EXPECT_EQ(a, 5u);
  EXPECT_TRUE(B.contains(kIdentity));
  EXPECT_EQ(left_translate(a, B), A);

  const auto sym = symmetrize(B);
  EXPECT_TRUE(sym.set.contains(kIdentity));
  EXPECT_TRUE(sym.set.contains(sym.x));
  EXPECT_TRUE(sym.set.contains(G->inv(sym.x)));
  EXPECT_EQ(left_translate(sym.x, sym.set), subset_product(B, B));
  EXPECT_EQ(code_of([&] { (void)symmetrize(A); }), ErrorCode::IdentityMissing);
  EXPECT_EQ(code_of([&] { (void)symmetrize(Subset::of(G, {kIdentity})); }), ErrorCode::TooSmall);
}

/// The product A^{g_1} ... A^{g_N} by the definition.
std::set<Elem> conjugate_product(const GroupContext& G, const std::vector<Elem>& A, const std::vector<Elem>& gs) {
  std::set<Elem> P{kIdentity};
  for (Elem g : gs) {
    std::vector<Elem> conj;
    for (Elem a : A) conj.push_back(G.mul(G.mul(G.inv(g), a), g));
    P = oracle::product(std::vector<Elem>(P.begin(), P.end()), conj, [&](Elem x, Elem y) { return G.mul(x, y); });
  }
  return P;
}

TEST(Translate, TranslatedConjugatorsGiveTheSameProduct) {
  auto G = group("A:5");
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const Subset B = [&] {
      Subset s = random_subset(G, 4, 100 + trial);
      s.insert(kIdentity);
      return s;
    }();
    const Elem a = static_cast<Elem>(rng.below(60));
    std::vector<Elem> ks;
    for (int i = 0; i < 4; ++i) ks.push_back(static_cast<Elem>(rng.below(60)));
    const auto hs = translate_conjugators(*G, a, ks);
    const auto A = left_translate(a, B);
    // prod (aB)^{h_i} = (a^{h_1} ... a^{h_N}) ... is a left translate of prod B^{k_i}
    const auto lhs = conjugate_product(*G, A.members(), hs);
    const auto rhs = conjugate_product(*G, B.members(), ks);
    EXPECT_EQ(lhs.size(), rhs.size());
    Elem shift = kIdentity;
    for (Elem h : hs) shift = G->mul(shift, G->mul(G->mul(G->inv(h), a), h));
    std::set<Elem> shifted;
    for (Elem r : rhs) shifted.insert(G->mul(shift, r));
    EXPECT_EQ(lhs, shifted);
  }
}

TEST(Translate, DoubledConjugators) {
  auto G = group("PSL:2:7");
  const Subset B = Subset::of(G, {kIdentity, 10, 20});
  const std::vector<Elem> ks{0, 5, 9};
  const auto doubled = double_conjugators(ks);
  EXPECT_EQ(doubled.size(), 6u);
  const auto square = subset_product(B, B);
  EXPECT_EQ(conjugate_product(*G, B.members(), doubled), conjugate_product(*G, square.members(), ks));
}

TEST(Closure, GeneratedSubgroups) {
  auto G = group("A:5");
  EXPECT_EQ(generated_subgroup(Subset::of(G, {G->parse_element("(1 2 3)")})).size(), 3u);
  EXPECT_EQ(generated_subgroup(Subset::of(G, {G->parse_element("(1 2 3)"), G->parse_element("(1 2)(4 5)")})).size(),
            6u);
  EXPECT_EQ(generated_subgroup(Subset::of(G, {G->parse_element("(1 2 3)"), G->parse_element("(3 4 5)")})).size(),
            60u);
  EXPECT_TRUE(closure_generates(Subset::of(G, {G->parse_element("(1 2 3 4 5)"), G->parse_element("(1 2 3)")})));
  const Subset V4 = generated_subgroup(Subset::of(G, {G->parse_element("(1 2)(3 4)"), G->parse_element("(1 3)(2 4)")}));
  EXPECT_EQ(V4.size(), 4u);
  EXPECT_TRUE(is_subgroup(V4));
  EXPECT_FALSE(is_subgroup(Subset::of(G, {kIdentity, G->parse_element("(1 2 3)")})));
  EXPECT_EQ(normalizer(V4).size(), 12u);
  EXPECT_EQ(centralizer(G, G->parse_element("(1 2 3 4 5)")).size(), 5u);
}

TEST(Classes, PartitionTheGroup) {
  for (const char* spec : {"A:6", "PSL:2:8", "PSL:3:2"}) {
    auto G = group(spec);
    const auto classes = conjugacy_classes(G);
    std::size_t total = 0;
    for (const auto& c : classes) {
      total += c.size();
      EXPECT_EQ(c.representative, c.members.least());
      EXPECT_TRUE(is_normal_subset(c.members));
      EXPECT_EQ(G->order() % c.size(), 0u);
      EXPECT_EQ(centralizer(G, c.representative).size() * c.size(), G->order());
    }
    EXPECT_EQ(total, G->order());
  }
  EXPECT_EQ(conjugacy_classes(group("A:6")).size(), 7u);
  EXPECT_EQ(conjugacy_classes(group("PSL:2:8")).size(), 9u);
}

TEST(Random, SeededSubsetsAreReproducible) {
  auto G = group("A:7");
  EXPECT_EQ(random_subset(G, 100, 42), random_subset(G, 100, 42));
  EXPECT_NE(random_subset(G, 100, 42), random_subset(G, 100, 43));
  EXPECT_EQ(random_subset(G, 2000, 1).size(), 2000u);
  EXPECT_EQ(code_of([&] { (void)random_subset(G, 0, 1); }), ErrorCode::BadParameter);
}

}  // namespace
