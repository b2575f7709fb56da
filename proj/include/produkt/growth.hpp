#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

#include "produkt/error.hpp"
#include "produkt/group.hpp"
#include "produkt/random.hpp"
#include "produkt/subset.hpp"

namespace produkt {

/// Smallest degree of a nontrivial complex representation, for the groups
/// we can enumerate (standard character-table values).
inline unsigned minimal_degree(const GroupSpec& spec) {
  const unsigned p = spec.parameter;
  switch (spec.family) {
    case Family::Alternating:
      if (p == 5) return 3;
      if (p == 6) return 5;
      return p - 1;
    case Family::PSL2:
      if (p % 2 == 0) return p - 1;
      return p % 4 == 1 ? (p + 1) / 2 : (p - 1) / 2;
    case Family::PSL3:
      if (p == 2) return 3;  // PSL3(2) = PSL2(7)
      return p * p + p;
  }
  return 1;
}

/// Default exponent delta with minimal_degree = |G|^delta.
inline double default_delta(const GroupSpec& spec) {
  return std::log(static_cast<double>(minimal_degree(spec))) /
         std::log(static_cast<double>(expected_order(spec)));
}

struct GrowthParams {
  double delta = 0.2;
  double epsilon_floor = 1e-9;
  unsigned max_steps = 16;

  void validate() const {
    if (!(delta > 0.0 && delta < 1.0)) fail(ErrorCode::BadParameter, "delta must lie in (0, 1)");
    if (!(epsilon_floor > 0.0)) fail(ErrorCode::BadParameter, "epsilon_floor must be positive");
    if (max_steps == 0) fail(ErrorCode::BadParameter, "max_steps must be positive");
  }
};

struct GrowthTrace {
  /// (k, |X^(3^k)|)
  std::vector<std::pair<unsigned, std::size_t>> sizes;
  bool reached_full = false;
  /// log|Y^3| / log|Y| - 1 for each cube that stayed below |G|.
  std::vector<double> epsilons;

  static GrowthTrace from_sizes(const std::vector<std::size_t>& sizes, std::size_t group_order) {
    GrowthTrace t;
    for (std::size_t k = 0; k < sizes.size(); ++k) {
      t.sizes.emplace_back(static_cast<unsigned>(k), sizes[k]);
      if (k > 0 && sizes[k] < group_order && sizes[k - 1] > 1)
        t.epsilons.push_back(std::log(double(sizes[k])) / std::log(double(sizes[k - 1])) - 1.0);
    }
    t.reached_full = !sizes.empty() && sizes.back() == group_order;
    return t;
  }
};

class StepLimitExceeded : public Error {
 public:
  StepLimitExceeded(GrowthTrace partial, const std::string& what)
      : Error(ErrorCode::StepLimitExceeded, what), partial_(std::move(partial)) {}
  const GrowthTrace& partial() const { return partial_; }

 private:
  GrowthTrace partial_;
};

/// X, X^3, X^9, ... until the whole group or max_steps cubes.
inline GrowthTrace tripling_iteration(const Subset& X, const GrowthParams& params) {
  params.validate();
  detail::require_nonempty(X, "X");
  if (!closure_generates(X)) fail(ErrorCode::NotGenerating, "X does not generate the group");
  const std::size_t order = X.group().order();
  std::vector<std::size_t> sizes{X.size()};
  Subset Y = X;
  for (unsigned step = 0; !Y.is_full(); ++step) {
    if (step == params.max_steps)
      throw StepLimitExceeded(GrowthTrace::from_sizes(sizes, order),
                              "no saturation after " + std::to_string(step) + " cubes");
    Y = subset_product(subset_product(Y, Y), Y);
    sizes.push_back(Y.size());
  }
  return GrowthTrace::from_sizes(sizes, order);
}

inline double epsilon_estimate(const GrowthTrace& trace) {
  if (trace.epsilons.empty()) fail(ErrorCode::NoNonSaturatedSteps, "trace has no step below |G|");
  double eps = std::numeric_limits<double>::infinity();
  for (double e : trace.epsilons) eps = std::min(eps, e);
  return eps;
}

/// {1, a, a^-1, b, b^-1} for a uniformly drawn generating pair (a, b).
inline Subset symmetric_generating_pair(const GroupPtr& group, std::uint64_t seed, unsigned budget = 10'000) {
  const auto& G = *group;
  Rng rng(seed);
  for (unsigned attempt = 0; attempt < budget; ++attempt) {
    const Elem a = static_cast<Elem>(rng.below(G.order()));
    const Elem b = static_cast<Elem>(rng.below(G.order()));
    Subset X = Subset::of(group, {kIdentity, a, G.inv(a), b, G.inv(b)});
    if (closure_generates(X)) return X;
  }
  fail(ErrorCode::BudgetExhausted, "no generating pair found");
}

struct ThresholdRow {
  double density;
  std::size_t size;
  unsigned trials;
  unsigned successes;
  double success_fraction() const { return trials ? double(successes) / trials : 0.0; }
};

inline std::size_t density_size(std::size_t order, double density) {
  const double raw = std::ceil(std::pow(static_cast<double>(order), density) - 1e-9);
  return std::clamp<std::size_t>(static_cast<std::size_t>(raw), 1, order);
}

/// For each density d, the fraction of uniform random subsets of size
/// ceil(|G|^d) whose cube is all of G.
inline std::vector<ThresholdRow> np_threshold_scan(const GroupPtr& group, const std::vector<double>& densities,
                                                   unsigned trials, std::uint64_t seed) {
  if (trials == 0) fail(ErrorCode::BadParameter, "trials must be positive");
  for (double d : densities)
    if (!(d > 0.0 && d <= 1.0)) fail(ErrorCode::BadDensity, "density " + std::to_string(d) + " outside (0, 1]");
  const std::size_t order = group->order();
  std::vector<ThresholdRow> rows;
  for (std::size_t di = 0; di < densities.size(); ++di) {
    const std::size_t size = density_size(order, densities[di]);
    ThresholdRow row{densities[di], size, trials, 0};
    for (unsigned t = 0; t < trials; ++t) {
      if (size * size * size < order) continue;  // |A^3| <= |A|^3
      const Subset A = random_subset(group, static_cast<std::uint32_t>(size),
                                     derive_seed(seed, "np-scan", (std::uint64_t(di) << 32) | t));
      if (subset_product(subset_product(A, A), A).is_full()) ++row.successes;
    }
    rows.push_back(row);
  }
  return rows;
}

/// Rounds each fraction to 0, 1/2 or 1 by majority and checks the result is
/// non-decreasing along the rows (rows must be sorted by density).
inline bool nondecreasing_after_majority(const std::vector<ThresholdRow>& rows) {
  auto smooth = [](double f) { return f > 0.5 ? 1.0 : (f < 0.5 ? 0.0 : 0.5); };
  for (std::size_t i = 1; i < rows.size(); ++i)
    if (smooth(rows[i].success_fraction()) < smooth(rows[i - 1].success_fraction())) return false;
  return true;
}

struct GenerationCertificate {
  Elem base;
  std::vector<Elem> conjugators;
  std::size_t count() const { return conjugators.size(); }
  /// 8(2r + 1)
  std::size_t bound;
};

inline std::size_t generation_bound(const GroupSpec& spec) { return 8 * (2 * spec.rank() + 1); }

/// Random conjugates of x, each kept only if it enlarges the subgroup
/// generated so far, until they generate G.
inline GenerationCertificate generating_conjugates(const GroupPtr& group, Elem x, unsigned budget, std::uint64_t seed) {
  const auto& G = *group;
  if (x >= G.order()) fail(ErrorCode::IndexOutOfRange, "element index outside the group");
  if (x == kIdentity) fail(ErrorCode::IdentityElement, "the identity has no generating conjugates");
  Rng rng(seed);
  GenerationCertificate cert{x, {}, generation_bound(G.spec())};
  Subset span = Subset::of(group, {kIdentity});
  Subset gens(group);
  for (unsigned draw = 0; draw < budget; ++draw) {
    const Elem g = static_cast<Elem>(rng.below(G.order()));
    const Elem c = G.conjugate(x, g);
    if (span.contains(c)) continue;
    cert.conjugators.push_back(g);
    gens.insert(c);
    span = generated_subgroup(gens);
    if (span.is_full()) return cert;
  }
  fail(ErrorCode::BudgetExhausted, "conjugates of x did not generate within the draw budget");
}

inline bool replay_generation(const GroupPtr& group, const GenerationCertificate& cert) {
  Subset gens(group);
  for (Elem g : cert.conjugators) gens.insert(group->conjugate(cert.base, g));
  return !gens.empty() && closure_generates(gens);
}

}  // namespace produkt
