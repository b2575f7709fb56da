#include <gtest/gtest.h>

#include <set>

#include "oracle.hpp"
#include "produkt/constructive.hpp"

using namespace produkt;

namespace {

GroupPtr group(const std::string& spec) { return shared_context(GroupSpec::parse(spec)); }

template <class F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::IoError;
}

std::vector<Elem> nontrivial_representatives(const GroupPtr& G) {
  std::vector<Elem> reps;
  for (const auto& c : conjugacy_classes(G))
    if (c.representative != kIdentity) reps.push_back(c.representative);
  return reps;
}

TEST(Commutator, SmallSupportForEveryClassOfA7) {
  auto G = group("A:7");
  for (Elem x : nontrivial_representatives(G)) {
    const auto [y, c] = find_small_support_commutator(G, x);
    EXPECT_EQ(G->cycle_type(y), (std::vector<unsigned>{3, 1, 1, 1, 1}));
    EXPECT_EQ(c, G->commutator(x, y));
    EXPECT_NE(c, kIdentity);
    EXPECT_LE(G->support(c).size(), 5u);
  }
}

TEST(DoubleTransposition, WitnessesEvaluate) {
  for (unsigned n : {5u, 6u, 7u, 8u}) {
    auto G = group("A:" + std::to_string(n));
    for (Elem x : nontrivial_representatives(G)) {
      const auto w = double_transposition_witness(G, x);
      EXPECT_TRUE(is_double_transposition(*G, w.t)) << G->format(x);
      EXPECT_EQ(evaluate_factors(*G, x, w.expression), w.t) << G->format(x);
      EXPECT_LE(w.expression.size(), 4u);
    }
  }
  EXPECT_EQ(code_of([] { (void)double_transposition_witness(group("A:6"), kIdentity); }), ErrorCode::IdentityElement);
  EXPECT_EQ(code_of([] { (void)double_transposition_witness(group("PSL:2:7"), 1); }), ErrorCode::WrongFamily);
}

/// {1, s_1} ... {1, s_k} in S_m by the definition.
std::set<oracle::Perm> cover_product(const CoverSequence& cover) {
  oracle::Perm id(cover.m);
  std::iota(id.begin(), id.end(), std::uint8_t{0});
  std::set<oracle::Perm> P{id};
  for (const auto& [a, b] : cover.transpositions) {
    oracle::Perm s = id;
    std::swap(s[a - 1], s[b - 1]);
    auto next = P;
    for (const auto& p : P) next.insert(oracle::compose(p, s));
    P = std::move(next);
  }
  return P;
}

TEST(Cover, SortingNetworkCoversSymmetricGroup) {
  std::size_t factorial = 1;
  for (unsigned m = 2; m <= 8; ++m) {
    factorial *= m;
    const auto cover = sorting_network_cover(m);
    EXPECT_EQ(cover.length(), m * (m - 1) / 2);
    EXPECT_EQ(cover_product(cover).size(), factorial) << m;
    const auto table = symmetric_cover_product(cover);
    EXPECT_EQ(std::count(table.begin(), table.end(), true), static_cast<long>(factorial));
  }
  EXPECT_EQ(sorting_network_cover(6).length(), 15u);
  EXPECT_EQ(code_of([] { (void)sorting_network_cover(1); }), ErrorCode::OutOfRange);
}

TEST(Cover, ParityCancellation) {
  oracle::Perm id(8);
  std::iota(id.begin(), id.end(), std::uint8_t{0});
  auto transposition = [&](unsigned a, unsigned b) {
    auto p = id;
    std::swap(p[a], p[b]);
    return p;
  };
  const auto sigma = transposition(6, 7);
  for (unsigned a = 0; a < 6; ++a)
    for (unsigned b = a + 1; b < 6; ++b)
      for (unsigned c = 0; c < 6; ++c)
        for (unsigned d = c + 1; d < 6; ++d) {
          const auto t1 = transposition(a, b), t2 = transposition(c, d);
          EXPECT_EQ(oracle::compose(oracle::compose(t1, sigma), oracle::compose(t2, sigma)), oracle::compose(t1, t2));
        }
}

TEST(Cover, LiftedCoverContainsEmbeddedA5) {
  auto G = group("A:7");
  const Elem t = G->parse_element("(1 2)(3 4)");
  const auto lifted = lift_cover_to_double_transpositions(G, sorting_network_cover(5), t);
  ASSERT_EQ(lifted.length(), 10u);
  for (std::size_t i = 0; i < lifted.length(); ++i) {
    EXPECT_EQ(G->conjugate(t, lifted.conjugators[i]), lifted.elements[i]);
    const auto supp = G->support(lifted.elements[i]);
    EXPECT_EQ(supp.size(), 4u);
    EXPECT_EQ(supp[2], 6u);
    EXPECT_EQ(supp[3], 7u);
  }
  const Subset P = lifted_product(G, lifted);
  const Subset A5 = pointwise_stabilizer(G, {6, 7});
  EXPECT_EQ(A5.size(), 60u);
  EXPECT_TRUE(A5.is_subset_of(P));
  // odd permutations of {1..5} only appear with the (6 7) factor attached
  EXPECT_TRUE(P.contains(G->parse_element("(1 2)(6 7)")));
  P.for_each([&](Elem e) {
    const auto c = G->code(e);
    if (c[5] == 5) EXPECT_TRUE(A5.contains(e));
  });
  EXPECT_EQ(code_of([&] { (void)lift_cover_to_double_transpositions(G, sorting_network_cover(5), 1); }),
            ErrorCode::NotDoubleTransposition);
  EXPECT_EQ(code_of([&] { (void)lift_cover_to_double_transpositions(G, sorting_network_cover(4), t); }),
            ErrorCode::CoverMismatch);
}

TEST(StepDown, ThreeConjugatesGiveAn) {
  for (unsigned n : {6u, 7u, 8u}) {
    auto G = group("A:" + std::to_string(n));
    const auto sd = step_down_composition(G);
    EXPECT_TRUE(sd.verified);
    const Subset top = pointwise_stabilizer(G, {n});
    EXPECT_TRUE(replay_product(top, sd.three).is_full());
    const Subset bottom = pointwise_stabilizer(G, {n - 1, n});
    EXPECT_TRUE(replay_product(bottom, sd.nine).is_full());
    // one conjugate is never enough
    EXPECT_LT(top.size(), G->order());
  }
  EXPECT_EQ(code_of([] { (void)step_down_composition(group("PSL:2:7")); }), ErrorCode::WrongFamily);
}

TEST(Alternating, PipelineForEveryClassOfA7) {
  auto G = group("A:7");
  for (Elem x : nontrivial_representatives(G)) {
    const Subset A = Subset::of(G, {kIdentity, x});
    const auto r = alternating_pipeline(A);
    EXPECT_TRUE(replay_chain(*G, r.chain));
    EXPECT_EQ(r.decomposition.N(), 360u);
    EXPECT_EQ(r.chain.total(), 360u);
    EXPECT_TRUE(r.decomposition.complete) << G->format(x);
    EXPECT_TRUE(r.original.complete) << G->format(x);
    EXPECT_GE(r.decomposition.ratio(), 1.0);
    EXPECT_TRUE(replay_matches(r.original));
  }
  EXPECT_EQ(alternating_pipeline_length(7), 360u);
  EXPECT_EQ(alternating_pipeline(Subset::full(G)).decomposition.N(), 1u);
}

/// Projective element is a transvection: some representative lambda M with
/// det 1 has (lambda M - I) of rank 1 and square zero.
bool brute_transvection(const GroupContext& G, Elem e, unsigned d, unsigned p) {
  const auto c = G.code(e);
  for (unsigned l = 1; l < p; ++l) {
    oracle::Matrix m(c.begin(), c.end());
    for (auto& v : m) v = v * l % p;
    if (oracle::det(m, d, p) != 1) continue;
    for (unsigned i = 0; i < d; ++i) m[i * d + i] = (m[i * d + i] + p - 1) % p;
    bool zero = std::all_of(m.begin(), m.end(), [](unsigned v) { return v == 0; });
    const auto sq = oracle::mat_mul(m, m, d, p);
    bool sq_zero = std::all_of(sq.begin(), sq.end(), [](unsigned v) { return v == 0; });
    // rank 1: nonzero and every 2x2 minor vanishes
    bool rank_one = !zero;
    for (unsigned r1 = 0; r1 < d; ++r1)
      for (unsigned r2 = r1 + 1; r2 < d; ++r2)
        for (unsigned c1 = 0; c1 < d; ++c1)
          for (unsigned c2 = c1 + 1; c2 < d; ++c2)
            rank_one &= (m[r1 * d + c1] * m[r2 * d + c2] + p * p - m[r1 * d + c2] * m[r2 * d + c1]) % p == 0;
    if (rank_one && sq_zero) return true;
  }
  return false;
}

TEST(Transvection, DetectionAgreesWithDefinition) {
  for (auto [d, p, expected] : std::vector<std::tuple<unsigned, unsigned, std::size_t>>{
           {3, 2, 21}, {2, 7, 48}, {2, 11, 120}, {3, 3, 104}}) {
    auto G = group("PSL:" + std::to_string(d) + ":" + std::to_string(p));
    std::size_t count = 0;
    for (Elem e = 0; e < G->order(); ++e) {
      const bool t = is_transvection(*G, e);
      ASSERT_EQ(t, brute_transvection(*G, e, d, p)) << G->format(e);
      count += t;
    }
    EXPECT_EQ(count, expected);
  }
}

TEST(Transvection, ChainsInPsl32) {
  auto G = group("PSL:3:2");
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    for (Elem x = 1; x < G->order(); x += 17) {
      const auto chain = transvection_chain(G, x, 100'000, seed);
      EXPECT_LE(chain.k(), 3u);
      EXPECT_EQ(chain.expression.size(), std::size_t(1) << chain.k());
      EXPECT_TRUE(is_transvection(*G, chain.u));
      EXPECT_EQ(evaluate_factors(*G, x, chain.expression), chain.u);
      Elem u = x;
      for (Elem y : chain.partners) u = G->commutator(u, y);
      EXPECT_EQ(u, chain.u);
    }
  }
  const Elem t = G->parse_element("[[1,1,0],[0,1,0],[0,0,1]]");
  EXPECT_EQ(transvection_chain(G, t, 10, 1).k(), 0u);
  EXPECT_EQ(code_of([&] { (void)transvection_chain(G, kIdentity, 10, 1); }), ErrorCode::IdentityElement);
}

TEST(RootSl2, SubgroupOrdersAndReplay) {
  for (auto [spec, order] : std::vector<std::pair<std::string, std::size_t>>{
           {"PSL:3:2", 6}, {"PSL:3:3", 24}, {"PSL:2:7", 168}, {"PSL:3:4", 60}}) {
    auto G = group(spec);
    Elem u = kIdentity;
    for (Elem e = 1; e < G->order() && u == kIdentity; ++e)
      if (is_transvection(*G, e)) u = e;
    const auto r = root_sl2_decompose(G, u, 256);
    EXPECT_EQ(r.H.size(), order) << spec;
    EXPECT_TRUE(is_subgroup(r.H));
    EXPECT_TRUE(r.H.contains(u));
    EXPECT_TRUE(r.decomposition.complete);
    EXPECT_EQ(replay_product(Subset::of(G, {kIdentity, u}), r.decomposition.conjugators), r.H);
    EXPECT_TRUE(is_transvection(*G, r.opposite));
  }
  auto G = group("PSL:3:2");
  EXPECT_EQ(code_of([&] { (void)root_sl2_decompose(G, kIdentity, 16); }), ErrorCode::NotTransvection);
}

TEST(Classical, PipelineOnPsl32) {
  auto G = group("PSL:3:2");
  Rng rng(1);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Elem x = 1 + static_cast<Elem>(rng.below(G->order() - 1));
    const auto r = classical_pipeline(Subset::of(G, {kIdentity, x}), seed);
    EXPECT_TRUE(replay_chain(*G, r.chain));
    EXPECT_TRUE(r.decomposition.complete);
    EXPECT_TRUE(r.original.complete);
    EXPECT_EQ(r.chain.total(), r.decomposition.N());
    EXPECT_GE(r.decomposition.ratio(), 1.0);
  }
  EXPECT_EQ(classical_pipeline(Subset::full(G), 0).decomposition.N(), 1u);
}

TEST(Classical, PipelineOnPsl27AndPsl33) {
  for (const char* spec : {"PSL:2:7", "PSL:2:8", "PSL:3:3"}) {
    auto G = group(spec);
    const auto r = classical_pipeline(Subset::of(G, {kIdentity, G->order() / 3}), 5);
    EXPECT_TRUE(r.decomposition.complete) << spec;
    EXPECT_TRUE(r.original.complete) << spec;
  }
}

}  // namespace
