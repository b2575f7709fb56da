#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "produkt/decompose.hpp"
#include "produkt/error.hpp"
#include "produkt/group.hpp"
#include "produkt/matrix.hpp"
#include "produkt/random.hpp"
#include "produkt/subset.hpp"

namespace produkt {

/// (x^sign)^conjugator, with sign = +1 or -1.
struct Factor {
  int sign;
  Elem conjugator;
  friend bool operator==(const Factor&, const Factor&) = default;
};

inline Elem evaluate_factors(const GroupContext& G, Elem x, std::span<const Factor> factors) {
  const Elem xi = G.inv(x);
  Elem r = kIdentity;
  for (const auto& f : factors) r = G.mul(r, G.conjugate(f.sign > 0 ? x : xi, f.conjugator));
  return r;
}

/// Expression for [u, y] = u^-1 u^y given one for u.
inline std::vector<Factor> commutator_factors(const GroupContext& G, std::span<const Factor> u, Elem y) {
  std::vector<Factor> out;
  out.reserve(2 * u.size());
  for (std::size_t i = u.size(); i-- > 0;) out.push_back({-u[i].sign, u[i].conjugator});
  for (const auto& f : u) out.push_back({f.sign, G.mul(f.conjugator, y)});
  return out;
}

/// One step of a constructive proof. `count` is the number of conjugates of
/// the working set consumed so far; it is the product of the `multiplier`s
/// of this and all earlier stages.
struct WitnessStage {
  std::string label;
  std::optional<Elem> element;
  std::vector<Elem> partners;
  std::vector<Factor> expression;  // element = product of (x^sign)^g
  std::vector<Elem> conjugators;
  std::size_t multiplier = 1;
  std::size_t count = 1;
};

struct WitnessChain {
  Elem x = kIdentity;
  std::vector<WitnessStage> stages;

  std::size_t total() const { return stages.empty() ? 1 : stages.back().count; }

  void push(WitnessStage stage) {
    stage.count = (stages.empty() ? 1 : stages.back().count) * stage.multiplier;
    stages.push_back(std::move(stage));
  }
};

/// Every stage expression evaluates to its element and the counts multiply
/// out consistently.
inline bool replay_chain(const GroupContext& G, const WitnessChain& chain) {
  std::size_t running = 1;
  for (const auto& s : chain.stages) {
    running *= s.multiplier;
    if (s.count != running) return false;
    if (s.element && !s.expression.empty() && evaluate_factors(G, chain.x, s.expression) != *s.element) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Alternating groups
// ---------------------------------------------------------------------------

namespace detail {

inline void require_alternating(const GroupContext& G) {
  if (!G.is_permutation_group()) fail(ErrorCode::WrongFamily, "an alternating-group context is required");
}

inline bool has_cycle_type(const GroupContext& G, Elem e, std::initializer_list<unsigned> nontrivial) {
  auto type = G.cycle_type(e);
  std::erase(type, 1u);
  return std::equal(type.begin(), type.end(), nontrivial.begin(), nontrivial.end());
}

}  // namespace detail

inline bool is_double_transposition(const GroupContext& G, Elem e) { return detail::has_cycle_type(G, e, {2, 2}); }

/// The 3-cycle (a b c), 1-based points.
inline Elem three_cycle(const GroupContext& G, unsigned a, unsigned b, unsigned c) {
  std::vector<unsigned> images(G.degree());
  std::iota(images.begin(), images.end(), 1u);
  images[a - 1] = b;
  images[b - 1] = c;
  images[c - 1] = a;
  return *G.from_images(images);
}

struct SmallSupportCommutator {
  Elem y;
  Elem commutator;  // [x, y]
};

/// First 3-cycle y (in lexicographic order of its cycle written from the
/// least point) meeting the support of x with [x, y] != 1 and
/// |supp [x, y]| <= 5.
inline SmallSupportCommutator find_small_support_commutator(const GroupPtr& group, Elem x) {
  const auto& G = *group;
  detail::require_alternating(G);
  if (x == kIdentity) fail(ErrorCode::IdentityElement, "x must be nontrivial");
  const unsigned n = G.degree();
  const auto moved = G.support(x);
  auto meets = [&](unsigned p) { return std::find(moved.begin(), moved.end(), p) != moved.end(); };
  for (unsigned a = 1; a <= n; ++a)
    for (unsigned b = a + 1; b <= n; ++b)
      for (unsigned c = a + 1; c <= n; ++c) {
        if (c == b) continue;
        if (!meets(a) && !meets(b) && !meets(c)) continue;
        const Elem y = three_cycle(G, a, b, c);
        const Elem comm = G.commutator(x, y);
        if (comm != kIdentity && G.support(comm).size() <= 5) return {y, comm};
      }
  fail(ErrorCode::NotFound, "no 3-cycle gives a small-support commutator with " + G.format(x));
}

struct DoubleTranspositionWitness {
  Elem y;
  Elem commutator;
  Elem t;
  /// t = product of (x^sign)^g; either x^-1 x^y (length 2) or
  /// x^-1 x^y (x^-1)^h x^{yh} (length 4).
  std::vector<Factor> expression;
};

/// Even permutations supported on `points` (1-based), in index order.
inline std::vector<Elem> permutations_on(const GroupContext& G, std::vector<unsigned> points) {
  std::sort(points.begin(), points.end());
  std::vector<unsigned> arrangement = points;
  std::vector<Elem> out;
  std::vector<unsigned> images(G.degree());
  do {
    std::iota(images.begin(), images.end(), 1u);
    for (std::size_t i = 0; i < points.size(); ++i) images[points[i] - 1] = arrangement[i];
    if (auto e = G.from_images(images)) out.push_back(*e);
  } while (std::next_permutation(arrangement.begin(), arrangement.end()));
  std::sort(out.begin(), out.end());
  return out;
}

inline DoubleTranspositionWitness double_transposition_witness(const GroupPtr& group, Elem x) {
  const auto& G = *group;
  detail::require_alternating(G);
  if (x == kIdentity) fail(ErrorCode::IdentityElement, "x must be nontrivial");
  const auto [y, c] = find_small_support_commutator(group, x);
  if (is_double_transposition(G, c)) return {y, c, c, {{-1, kIdentity}, {+1, y}}};

  // c is a 3-cycle or a 5-cycle: look for c * c^h a double transposition,
  // with h moving only the support of c and up to two more points
  auto closure = G.support(c);
  for (unsigned p = 1; p <= G.degree() && closure.size() < 7; ++p)
    if (std::find(closure.begin(), closure.end(), p) == closure.end()) closure.push_back(p);
  for (Elem h : permutations_on(G, closure)) {
    const Elem t = G.mul(c, G.conjugate(c, h));
    if (is_double_transposition(G, t))
      return {y, c, t, {{-1, kIdentity}, {+1, y}, {-1, h}, {+1, G.mul(y, h)}}};
  }
  fail(ErrorCode::NotFound, "no conjugate pair of " + G.format(c) + " multiplies to a double transposition");
}

/// Sequence of transpositions (i j) of S_m whose subset product
/// {1, s_1} ... {1, s_k} contains S_m.
struct CoverSequence {
  unsigned m = 0;
  std::vector<std::pair<unsigned, unsigned>> transpositions;  // 1-based points
  std::size_t length() const { return transpositions.size(); }
};

/// Bubble-sort network: passes s_1..s_{m-1}, s_1..s_{m-2}, ..., s_1 with
/// s_i = (i i+1); m(m-1)/2 transpositions. Any permutation is sorted by
/// some subsequence, so the subset product is all of S_m.
inline CoverSequence sorting_network_cover(unsigned m) {
  if (m < 2 || m > 10) fail(ErrorCode::OutOfRange, "sorting network cover supports 2 <= m <= 10");
  CoverSequence cover{m, {}};
  for (unsigned pass = m - 1; pass >= 1; --pass)
    for (unsigned i = 1; i <= pass; ++i) cover.transpositions.emplace_back(i, i + 1);
  return cover;
}

/// The subset product {1, s_1}...{1, s_k} inside S_m, as a membership table
/// over lexicographic ranks of S_m.
inline std::vector<bool> symmetric_cover_product(const CoverSequence& cover) {
  const unsigned m = cover.m;
  std::vector<std::uint64_t> fact(m + 1, 1);
  for (unsigned i = 1; i <= m; ++i) fact[i] = fact[i - 1] * i;
  auto rank = [&](const std::vector<std::uint8_t>& p) {
    std::uint64_t r = 0;
    for (unsigned i = 0; i < m; ++i) {
      unsigned smaller = 0;
      for (unsigned j = i + 1; j < m; ++j) smaller += p[j] < p[i];
      r += smaller * fact[m - 1 - i];
    }
    return r;
  };
  auto unrank = [&](std::uint64_t r) {
    std::vector<std::uint8_t> pool(m), p(m);
    std::iota(pool.begin(), pool.end(), std::uint8_t{0});
    for (unsigned i = 0; i < m; ++i) {
      const auto k = r / fact[m - 1 - i];
      r %= fact[m - 1 - i];
      p[i] = pool[k];
      pool.erase(pool.begin() + static_cast<long>(k));
    }
    return p;
  };
  std::vector<bool> in(fact[m], false);
  in[0] = true;  // identity
  std::vector<std::uint64_t> members{0};
  for (const auto& [a, b] : cover.transpositions) {
    const auto current = members;
    for (auto r : current) {
      auto p = unrank(r);
      // right multiplication by (a b): apply p, then swap a and b
      for (auto& v : p) {
        if (v == a - 1) v = static_cast<std::uint8_t>(b - 1);
        else if (v == b - 1) v = static_cast<std::uint8_t>(a - 1);
      }
      const auto s = rank(p);
      if (!in[s]) {
        in[s] = true;
        members.push_back(s);
      }
    }
  }
  return in;
}

/// Pairs {1, t_i} with t_i = s_i (n-1 n), each a conjugate t^{h_i} of the
/// given double transposition.
struct LiftedCover {
  unsigned n = 0;
  std::vector<Elem> elements;     // t_i
  std::vector<Elem> conjugators;  // h_i with t^{h_i} = t_i
  std::size_t length() const { return elements.size(); }
};

/// A conjugator h in A_n with t^h = (a b)(c d) for a double transposition t.
inline Elem conjugator_to(const GroupContext& G, Elem t, std::array<unsigned, 4> target) {
  const unsigned n = G.degree();
  const auto code = G.code(t);
  std::array<unsigned, 4> source{};
  unsigned k = 0;
  std::vector<bool> used(n + 1, false);
  for (unsigned i = 0; i < n; ++i)
    if (code[i] != i && !used[i + 1]) {
      source[k++] = i + 1;
      source[k++] = code[i] + 1;
      used[i + 1] = used[code[i] + 1] = true;
    }
  std::vector<unsigned> images(n, 0);
  std::vector<bool> taken(n + 1, false);
  for (unsigned i = 0; i < 4; ++i) {
    images[source[i] - 1] = target[i];
    taken[target[i]] = true;
  }
  unsigned next = 1;
  for (unsigned i = 0; i < n; ++i) {
    if (images[i]) continue;
    while (taken[next]) ++next;
    images[i] = next;
    taken[next] = true;
  }
  auto h = G.from_images(images);
  if (!h) {  // odd: swapping the images of c and d keeps t^h
    std::swap(images[source[2] - 1], images[source[3] - 1]);
    h = G.from_images(images);
  }
  return *h;
}

inline LiftedCover lift_cover_to_double_transpositions(const GroupPtr& group, const CoverSequence& cover, Elem t) {
  const auto& G = *group;
  detail::require_alternating(G);
  const unsigned n = G.degree();
  if (!is_double_transposition(G, t)) fail(ErrorCode::NotDoubleTransposition, G.format(t) + " is not a double transposition");
  if (cover.m + 2 != n) fail(ErrorCode::CoverMismatch, "cover must act on the first n-2 points");
  LiftedCover lifted{n, {}, {}};
  for (const auto& [a, b] : cover.transpositions) {
    if (a < 1 || b > n - 2 || a == b) fail(ErrorCode::CoverMismatch, "cover transposition outside 1..n-2");
    const Elem h = conjugator_to(G, t, {a, b, n - 1, n});
    const Elem ti = G.conjugate(t, h);
    lifted.elements.push_back(ti);
    lifted.conjugators.push_back(h);
  }
  return lifted;
}

/// {1, t_1} ... {1, t_k}.
inline Subset lifted_product(const GroupPtr& group, const LiftedCover& lifted) {
  Subset P = Subset::of(group, {kIdentity});
  for (Elem t : lifted.elements) P = subset_product(P, Subset::of(group, {kIdentity, t}));
  return P;
}

/// Elements fixing every listed point (1-based).
inline Subset pointwise_stabilizer(const GroupPtr& group, std::initializer_list<unsigned> points) {
  const auto& G = *group;
  Subset S(group);
  for (Elem e = 0; e < G.order(); ++e) {
    const auto c = G.code(e);
    if (std::all_of(points.begin(), points.end(), [&](unsigned p) { return c[p - 1] == p - 1; })) S.insert(e);
  }
  return S;
}

struct StepDown {
  unsigned n = 0;
  /// A_n = prod_i A_{n-1}^{three[i]}, A_{n-1} = stabilizer of n.
  std::array<Elem, 3> three{};
  /// A_n = prod_j A_{n-2}^{nine[j]}, A_{n-2} = stabilizer of n-1 and n.
  std::array<Elem, 9> nine{};
  bool verified = false;
};

/// Conjugators 1, c, c^2 with c = (n-1 n 1): the stabilizers of n, 1 and
/// n-1. Applied once inside A_{n-1} (with (n-2 n-1 1)) and once in A_n this
/// gives nine conjugates of A_{n-2}. Replay verification runs when
/// |A_n| <= verify_limit.
inline StepDown step_down_composition(const GroupPtr& group, std::size_t verify_limit = 20'160) {
  const auto& G = *group;
  detail::require_alternating(G);
  const unsigned n = G.degree();
  if (n < 5 || n > 10) fail(ErrorCode::OutOfRange, "step-down supports 5 <= n <= 10");
  StepDown sd;
  sd.n = n;
  const Elem c = three_cycle(G, n - 1, n, 1);
  const Elem d = three_cycle(G, n - 2, n - 1, 1);
  sd.three = {kIdentity, c, G.mul(c, c)};
  const std::array<Elem, 3> inner{kIdentity, d, G.mul(d, d)};
  for (unsigned i = 0; i < 3; ++i)
    for (unsigned j = 0; j < 3; ++j) sd.nine[3 * i + j] = G.mul(inner[j], sd.three[i]);
  if (G.order() <= verify_limit) {
    const Subset top = pointwise_stabilizer(group, {n});
    const Subset bottom = pointwise_stabilizer(group, {n - 1, n});
    sd.verified = replay_product(top, sd.three).is_full() && replay_product(bottom, sd.nine).is_full();
    if (!sd.verified) fail(ErrorCode::NotFound, "step-down conjugators do not cover A_" + std::to_string(n));
  }
  return sd;
}

/// Reduction of A to a working set W containing 1, x, x^-1: W = a^-1 A when
/// that already contains x^-1, otherwise x^-1 (a^-1 A)^2.
struct WorkingSet {
  Subset set;
  Elem shift;    // a
  Elem x;
  bool squared;  // W was symmetrized
};

inline WorkingSet reduce_to_working_set(const Subset& A) {
  if (A.size() < 2) fail(ErrorCode::TooSmall, "|A| must be at least 2");
  auto [B, a] = normalize_to_identity(A);
  Elem x = kIdentity;
  B.for_each([&](Elem e) {
    if (x == kIdentity && e != kIdentity) x = e;
  });
  if (B.contains(B.group().inv(x))) return {std::move(B), a, x, false};
  auto sym = symmetrize(B);
  return {std::move(sym.set), a, sym.x, true};
}

/// Conjugators for A from conjugators for the working set.
inline std::vector<Elem> lift_to_original(const GroupContext& G, const WorkingSet& w, std::span<const Elem> ks) {
  std::vector<Elem> out(ks.begin(), ks.end());
  if (w.squared) out = double_conjugators(translate_conjugators(G, w.x, out));
  return translate_conjugators(G, w.shift, out);
}

struct PipelineResult {
  WitnessChain chain;
  WorkingSet working;
  /// Decomposition of G by conjugates of the working set.
  ConjugateDecomposition decomposition;
  /// The same decomposition carried back to the input set.
  ConjugateDecomposition original;
};

namespace detail {

inline std::vector<Elem> pad_block(std::vector<Elem> block, std::size_t width) {
  block.resize(width, kIdentity);
  return block;
}

inline PipelineResult short_circuit(const Subset& A) {
  WorkingSet w{A, kIdentity, kIdentity, false};
  auto dec = make_decomposition(A, {kIdentity});
  WitnessChain chain;
  chain.push({"whole-group", std::nullopt, {}, {}, {kIdentity}, 1, 1});
  return {std::move(chain), std::move(w), dec, dec};
}

}  // namespace detail

/// Alternating-group construction: {1, t} inside 4 conjugates of W, a lifted
/// sorting-network cover giving A_{n-2} from (n-2)(n-3)/2 conjugates of
/// {1, t}, and nine conjugates of A_{n-2} giving A_n.
/// N = 9 * 4 * (n-2)(n-3)/2.
inline PipelineResult alternating_pipeline(const Subset& A) {
  const GroupPtr& group = A.group_ptr();
  const auto& G = *group;
  detail::require_alternating(G);
  if (A.size() < 2) fail(ErrorCode::TooSmall, "|A| must be at least 2");
  if (A.is_full()) return detail::short_circuit(A);
  const unsigned n = G.degree();

  WorkingSet w = reduce_to_working_set(A);
  const Elem x = w.x;
  const auto dtw = double_transposition_witness(group, x);

  WitnessChain chain;
  chain.x = x;
  chain.push({"commutator", dtw.commutator, {dtw.y}, {{-1, kIdentity}, {+1, dtw.y}}, {}, 2, 0});
  std::vector<Elem> block;
  for (const auto& f : dtw.expression) block.push_back(f.conjugator);
  block = detail::pad_block(std::move(block), 4);
  chain.push({"double-transposition", dtw.t, {}, dtw.expression, block, 2, 0});

  const Subset four = replay_product(w.set, block);
  if (!four.contains(kIdentity) || !four.contains(dtw.t))
    throw std::logic_error("{1, t} is not inside the four conjugates");

  const auto cover = sorting_network_cover(n - 2);
  const auto lifted = lift_cover_to_double_transpositions(group, cover, dtw.t);
  chain.push({"lifted-cover", std::nullopt, {}, {}, lifted.conjugators, lifted.length(), 0});

  const auto sd = step_down_composition(group);
  chain.push({"step-down", std::nullopt, {}, {}, {sd.nine.begin(), sd.nine.end()}, 9, 0});

  std::vector<Elem> conjugators;
  conjugators.reserve(9 * lifted.length() * 4);
  for (Elem e : sd.nine)
    for (Elem h : lifted.conjugators)
      for (Elem g : block) conjugators.push_back(G.mul(G.mul(g, h), e));

  auto dec = make_decomposition(w.set, conjugators);
  auto original = make_decomposition(A, lift_to_original(G, w, conjugators));
  return {std::move(chain), std::move(w), std::move(dec), std::move(original)};
}

// ---------------------------------------------------------------------------
// Classical groups
// ---------------------------------------------------------------------------

namespace detail {

inline void require_linear(const GroupContext& G) {
  if (G.is_permutation_group()) fail(ErrorCode::WrongFamily, "a PSL context is required");
}

inline std::uint8_t trace_of(const Field& f, const Mat& m) {
  std::uint8_t t = 0;
  for (unsigned i = 0; i < m.dim; ++i) t = f.add(t, m.at(i, i));
  return t;
}

/// lambda M - I for the scalar lambda making it rank one and traceless.
inline std::optional<Mat> transvection_part(const GroupContext& G, Elem e) {
  const auto& f = G.field();
  const Mat m = G.matrix(e);
  const Mat id = Mat::identity(m.dim);
  for (unsigned l = 1; l < f.order(); ++l) {
    const Mat E = mat::sub(f, mat::scale(f, m, static_cast<std::uint8_t>(l)), id);
    if (mat::rank(f, E) == 1 && trace_of(f, E) == 0) return E;
  }
  return std::nullopt;
}

/// min over scalars of rank(lambda M - I); 1 for transvections.
inline unsigned scalar_defect(const GroupContext& G, Elem e) {
  const auto& f = G.field();
  const Mat m = G.matrix(e);
  const Mat id = Mat::identity(m.dim);
  unsigned best = m.dim;
  for (unsigned l = 1; l < f.order(); ++l)
    best = std::min(best, mat::rank(f, mat::sub(f, mat::scale(f, m, static_cast<std::uint8_t>(l)), id)));
  return best;
}

}  // namespace detail

/// Projective image of 1 + E with E of rank one and E^2 = 0. A rank-one E is
/// nilpotent exactly when its trace vanishes, which is what is tested.
inline bool is_transvection(const GroupContext& G, Elem e) {
  detail::require_linear(G);
  return detail::transvection_part(G, e).has_value();
}

struct TransvectionChain {
  Elem u;
  std::vector<Elem> partners;      // y_1..y_k
  std::vector<Factor> expression;  // u as 2^k conjugates of x^{+-1}
  std::size_t k() const { return partners.size(); }
};

namespace detail {

class TransvectionSearch {
 public:
  TransvectionSearch(const GroupContext& G, unsigned budget, std::uint64_t seed)
      : G_(G), budget_(budget), seed_(seed) {}

  std::optional<TransvectionChain> run(Elem u, std::vector<Factor> expr, std::vector<Elem> partners) {
    if (is_transvection(G_, u)) return TransvectionChain{u, std::move(partners), std::move(expr)};
    if (partners.size() == kMaxLevels) return std::nullopt;
    const unsigned level = static_cast<unsigned>(partners.size());
    Rng rng(derive_seed(seed_, "transvection", (std::uint64_t(level) << 32) ^ (calls_++)));
    const auto draws = std::min<std::uint64_t>(budget_, G_.order());
    std::vector<Elem> ys;
    if (draws == G_.order()) {
      ys = sample_without_replacement(rng, G_.order(), G_.order());
    } else {
      for (std::uint64_t i = 0; i < draws; ++i) ys.push_back(static_cast<Elem>(rng.below(G_.order())));
    }
    struct Candidate {
      unsigned defect;
      Elem y;
      Elem v;
    };
    std::vector<Candidate> candidates;
    std::vector<Elem> seen;
    for (Elem y : ys) {
      const Elem v = G_.commutator(u, y);
      if (v == kIdentity) continue;
      if (is_transvection(G_, v)) {
        partners.push_back(y);
        return TransvectionChain{v, std::move(partners), commutator_factors(G_, expr, y)};
      }
      if (std::find(seen.begin(), seen.end(), v) != seen.end()) continue;
      seen.push_back(v);
      candidates.push_back({scalar_defect(G_, v), y, v});
      if (seen.size() > 4096) break;
    }
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const Candidate& a, const Candidate& b) { return a.defect < b.defect; });
    const std::size_t branch = std::min<std::size_t>(candidates.size(), 3);
    for (std::size_t i = 0; i < branch; ++i) {
      auto next_partners = partners;
      next_partners.push_back(candidates[i].y);
      if (auto found = run(candidates[i].v, commutator_factors(G_, expr, candidates[i].y), std::move(next_partners)))
        return found;
    }
    return std::nullopt;
  }

  static constexpr std::size_t kMaxLevels = 3;

 private:
  const GroupContext& G_;
  unsigned budget_;
  std::uint64_t seed_;
  std::uint64_t calls_ = 0;
};

}  // namespace detail

/// Iterated commutators u_{i+1} = [u_i, y_{i+1}] from u_0 = x with seeded
/// random partners, stopping at the first nontrivial transvection (k <= 3).
inline TransvectionChain transvection_chain(const GroupPtr& group, Elem x, unsigned budget, std::uint64_t seed) {
  const auto& G = *group;
  detail::require_linear(G);
  if (x >= G.order()) fail(ErrorCode::IndexOutOfRange, "element index outside the group");
  if (x == kIdentity) fail(ErrorCode::IdentityElement, "x must be nontrivial");
  if (budget == 0) fail(ErrorCode::BadParameter, "budget must be positive");
  detail::TransvectionSearch search(G, budget, seed);
  auto found = search.run(x, {{+1, kIdentity}}, {});
  if (!found) fail(ErrorCode::BudgetExhausted, "no transvection within three commutator levels");
  return *found;
}

struct RootSl2 {
  Elem u;
  Elem opposite;  // a transvection from the opposite root subgroup
  Subset H;       // <u_{+-alpha}(s)>, isomorphic to SL_2(q)
  Subset normalizer;
  /// H as a product of conjugates of {1, u} by elements of N(H).
  ConjugateDecomposition decomposition;
  /// k_H / ln q
  double measured_c1() const {
    return double(decomposition.N()) / std::log(double(H.group().field().order()));
  }
};

/// Order of SL_2(q) as it embeds in PSL_d(q).
inline std::size_t root_sl2_order(const GroupContext& G) {
  const std::size_t q = G.field().order();
  const std::size_t sl2 = q * (q * q - 1);
  return G.dimension() == 2 ? sl2 / std::gcd<std::size_t>(2, q - 1) : sl2;
}

inline RootSl2 root_sl2_decompose(const GroupPtr& group, Elem u, std::size_t cap, std::uint64_t seed = 0) {
  const auto& G = *group;
  detail::require_linear(G);
  const auto& f = G.field();
  const auto E = detail::transvection_part(G, u);
  if (!E) fail(ErrorCode::NotTransvection, G.format(u) + " is not a transvection");
  const unsigned d = G.dimension();

  // E = v w^T with w v = 0
  unsigned col = 0;
  while ([&] {
    for (unsigned r = 0; r < d; ++r)
      if (E->at(r, col) != 0) return false;
    return true;
  }())
    ++col;
  std::array<std::uint8_t, 3> v{}, w{};
  unsigned pivot = 0;
  for (unsigned r = 0; r < d; ++r) v[r] = E->at(r, col);
  while (v[pivot] == 0) ++pivot;
  const auto vinv = f.inv(v[pivot]);
  for (unsigned c = 0; c < d; ++c) w[c] = f.mul(E->at(pivot, c), vinv);

  // basis b1 = v, b2 = e_col (w(b2) != 0), b3 completing ker w
  Mat basis{d, {}};
  for (unsigned r = 0; r < d; ++r) {
    basis.at(r, 0) = v[r];
    basis.at(r, 1) = r == col ? 1 : 0;
  }
  if (d == 3) {
    bool placed = false;
    for (unsigned j = 0; j < 3 && !placed; ++j) {
      std::array<std::uint8_t, 3> cand{};
      cand[j] = w[col];
      cand[col] = f.sub(cand[col], w[j]);  // w_col e_j - w_j e_col lies in ker w
      for (unsigned r = 0; r < 3; ++r) basis.at(r, 2) = cand[r];
      placed = mat::rank(f, basis) == 3;
    }
  }
  const auto basis_inv = mat::inverse(f, basis);
  if (!basis_inv) throw std::logic_error("adapted basis is singular");
  Mat lower{d, {}};
  lower.at(1, 0) = 1;  // e2 e1^T in the adapted basis
  const Mat F = mat::multiply(f, mat::multiply(f, basis, lower), *basis_inv);

  Subset gens(group);
  const Mat id = Mat::identity(d);
  Elem opposite = kIdentity;
  for (unsigned s = 1; s < f.order(); ++s) {
    const auto ss = static_cast<std::uint8_t>(s);
    gens.insert(*G.find_matrix(mat::add(f, id, mat::scale(f, *E, ss))));
    const Elem o = *G.find_matrix(mat::add(f, id, mat::scale(f, F, ss)));
    gens.insert(o);
    if (s == 1) opposite = o;
  }
  Subset H = generated_subgroup(gens);
  if (H.size() != root_sl2_order(G)) throw std::logic_error("root subgroups did not generate SL_2(q)");
  Subset N = normalizer(H);
  auto dec = greedy_decompose_into(Subset::of(group, {kIdentity, u}), H, Pool::explicit_list(N.members()), cap, seed);
  if (!dec.complete) fail(ErrorCode::CapExceeded, "{1, u} conjugates did not reach H within the cap");
  return {u, opposite, std::move(H), std::move(N), std::move(dec)};
}

/// Classical-group construction: u within 2^k conjugates of W, H from k_H
/// conjugates of {1, u}, then a greedy cover of G by f conjugates of H.
/// N = 2^k * k_H * f.
inline PipelineResult classical_pipeline(const Subset& A, std::uint64_t seed, unsigned budget = 100'000,
                                         std::size_t cap = 256) {
  const GroupPtr& group = A.group_ptr();
  const auto& G = *group;
  detail::require_linear(G);
  if (A.size() < 2) fail(ErrorCode::TooSmall, "|A| must be at least 2");
  if (A.is_full()) return detail::short_circuit(A);

  WorkingSet w = reduce_to_working_set(A);
  const Elem x = w.x;
  const auto tc = transvection_chain(group, x, budget, seed);
  std::vector<Elem> block;
  for (const auto& fct : tc.expression) block.push_back(fct.conjugator);

  WitnessChain chain;
  chain.x = x;
  chain.push({"transvection", tc.u, tc.partners, tc.expression, block, block.size(), 0});
  const Subset around_u = replay_product(w.set, block);
  if (!around_u.contains(kIdentity) || !around_u.contains(tc.u))
    throw std::logic_error("{1, u} is not inside the transvection block");

  const auto sl2 = root_sl2_decompose(group, tc.u, cap, derive_seed(seed, "root-sl2"));
  chain.push({"root-sl2", std::nullopt, {sl2.opposite}, {}, sl2.decomposition.conjugators, sl2.decomposition.N(), 0});

  const auto cover = subgroup_cover(sl2.H, Pool::default_for(G.order()), cap, derive_seed(seed, "cover"));
  if (!cover.complete) fail(ErrorCode::CapExceeded, "conjugates of H did not cover G within the cap");
  chain.push({"subgroup-cover", std::nullopt, {}, {}, cover.conjugators, cover.N(), 0});

  std::vector<Elem> conjugators;
  for (Elem m : cover.conjugators)
    for (Elem h : sl2.decomposition.conjugators)
      for (Elem g : block) conjugators.push_back(G.mul(G.mul(g, h), m));
  auto dec = make_decomposition(w.set, conjugators);
  auto original = make_decomposition(A, lift_to_original(G, w, conjugators));
  return {std::move(chain), std::move(w), std::move(dec), std::move(original)};
}

/// Reference bounds (constants as stated for the asymptotic results).
inline double alternating_reference_bound(unsigned n) { return 11520.0 * n * std::log(double(n)); }
inline std::size_t alternating_pipeline_length(unsigned n) { return 9 * 4 * std::size_t(n - 2) * (n - 3) / 2; }
/// n^2 log q; the constant in front is not specified, so the measured
/// coefficient N / (n^2 log q) is what gets reported.
inline double classical_reference_shape(unsigned d, unsigned q) { return double(d) * d * std::log(double(q)); }

}  // namespace produkt
