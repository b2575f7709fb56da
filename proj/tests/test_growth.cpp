#include <gtest/gtest.h>

#include <cmath>

#include "produkt/growth.hpp"

using namespace produkt;

namespace {

GroupPtr group(const char* spec) { return shared_context(GroupSpec::parse(spec)); }

template <class F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::IoError;
}

TEST(Delta, MinimalDegrees) {
  const std::vector<std::pair<const char*, unsigned>> known{
      {"A:5", 3}, {"A:6", 5}, {"A:7", 6}, {"A:8", 7}, {"PSL:2:7", 3}, {"PSL:2:8", 7}, {"PSL:2:9", 5},
      {"PSL:2:11", 5}, {"PSL:2:13", 7}, {"PSL:3:2", 3}, {"PSL:3:3", 12}};
  for (const auto& [spec, degree] : known) {
    const auto s = GroupSpec::parse(spec);
    EXPECT_EQ(minimal_degree(s), degree) << spec;
    EXPECT_NEAR(default_delta(s), std::log(double(degree)) / std::log(double(expected_order(s))), 1e-12);
  }
}

TEST(Tripling, StrictlyIncreasingUntilFull) {
  for (const char* spec : {"PSL:2:7", "PSL:2:11", "A:6"}) {
    auto G = group(spec);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const Subset X = symmetric_generating_pair(G, seed);
      EXPECT_TRUE(closure_generates(X));
      const auto trace = tripling_iteration(X, GrowthParams{});
      ASSERT_TRUE(trace.reached_full);
      EXPECT_EQ(trace.sizes.front().second, X.size());
      for (std::size_t k = 1; k < trace.sizes.size(); ++k) EXPECT_GT(trace.sizes[k].second, trace.sizes[k - 1].second);
      if (!trace.epsilons.empty()) EXPECT_GT(epsilon_estimate(trace), 0.0);
    }
  }
}

TEST(Tripling, Errors) {
  auto G = group("A:8");
  const Subset sub = Subset::of(G, {kIdentity, G->parse_element("(1 2 3)")});
  EXPECT_EQ(code_of([&] { (void)tripling_iteration(sub, {}); }), ErrorCode::NotGenerating);
  const Subset X = symmetric_generating_pair(G, 1);
  GrowthParams one;
  one.max_steps = 1;
  try {
    (void)tripling_iteration(X, one);
    FAIL() << "expected StepLimitExceeded";
  } catch (const StepLimitExceeded& e) {
    EXPECT_EQ(e.partial().sizes.size(), 2u);
    EXPECT_FALSE(e.partial().reached_full);
  }
  const auto full = tripling_iteration(Subset::full(G), {});
  EXPECT_EQ(code_of([&] { (void)epsilon_estimate(full); }), ErrorCode::NoNonSaturatedSteps);
  GrowthParams bad;
  bad.delta = 1.5;
  EXPECT_EQ(code_of([&] { (void)tripling_iteration(X, bad); }), ErrorCode::BadParameter);
}

TEST(Threshold, DensitySizes) {
  EXPECT_EQ(density_size(168, 1.0), 168u);
  EXPECT_EQ(density_size(168, 0.5), 13u);  // sqrt(168) = 12.96
  EXPECT_EQ(density_size(100, 0.5), 10u);
}

TEST(Threshold, ScanShapeAndFullDensity) {
  auto G = group("PSL:2:7");
  const auto rows = np_threshold_scan(G, {0.3, 0.5, 0.9, 1.0}, 40, 5);
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[0].successes, 0u);  // |A|^3 < |G|
  EXPECT_EQ(rows[3].success_fraction(), 1.0);
  EXPECT_TRUE(nondecreasing_after_majority(rows));
  const auto again = np_threshold_scan(G, {0.3, 0.5, 0.9, 1.0}, 40, 5);
  for (std::size_t i = 0; i < rows.size(); ++i) EXPECT_EQ(rows[i].successes, again[i].successes);
  EXPECT_EQ(code_of([&] { (void)np_threshold_scan(G, {0.0}, 1, 1); }), ErrorCode::BadDensity);
  EXPECT_EQ(code_of([&] { (void)np_threshold_scan(G, {1.2}, 1, 1); }), ErrorCode::BadDensity);
}

TEST(Threshold, MajoritySmoothing) {
  auto row = [](double d, unsigned s) { return ThresholdRow{d, 1, 10, s}; };
  EXPECT_TRUE(nondecreasing_after_majority({row(0.1, 0), row(0.2, 4), row(0.3, 5), row(0.4, 10)}));
  EXPECT_TRUE(nondecreasing_after_majority({row(0.1, 6), row(0.2, 9)}));  // both round to 1
  EXPECT_FALSE(nondecreasing_after_majority({row(0.1, 9), row(0.2, 3)}));
  EXPECT_FALSE(nondecreasing_after_majority({row(0.1, 5), row(0.2, 2)}));
}

TEST(Generation, ConjugatesGenerate) {
  for (const char* spec : {"A:7", "PSL:2:11", "PSL:3:3"}) {
    auto G = group(spec);
    for (Elem x : {Elem{1}, Elem{G->order() / 2}, Elem{G->order() - 1}}) {
      const auto cert = generating_conjugates(G, x, 10'000, x);
      EXPECT_TRUE(replay_generation(G, cert));
      // each kept conjugate strictly enlarges the span
      Subset gens(G);
      std::size_t last = 1;
      for (Elem g : cert.conjugators) {
        gens.insert(G->conjugate(x, g));
        const auto span = generated_subgroup(gens).size();
        EXPECT_GT(span, last);
        last = span;
      }
      EXPECT_EQ(last, G->order());
    }
  }
  EXPECT_EQ(generation_bound(GroupSpec::parse("PSL:3:2")), 40u);
  EXPECT_EQ(code_of([&] { (void)generating_conjugates(group("A:5"), kIdentity, 10, 1); }), ErrorCode::IdentityElement);
}

}  // namespace
