#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <unordered_map>
#include <vector>

#include "produkt/error.hpp"
#include "produkt/random.hpp"
#include "produkt/subset.hpp"

namespace produkt {

/// A tuple of conjugators g_1..g_N with the product set A^{g_1}...A^{g_N}.
/// `complete` means the product equals the target (all of G unless a
/// subgroup target is set).
struct ConjugateDecomposition {
  Subset base;
  std::vector<Elem> conjugators;
  bool complete = false;
  /// |P| after each factor.
  std::vector<std::size_t> trace;
  std::optional<Subset> target;

  std::size_t N() const { return conjugators.size(); }
  std::size_t target_size() const { return target ? target->size() : base.group().order(); }

  /// N log|A| / log|target|.
  double ratio() const {
    const double order = static_cast<double>(target_size());
    if (order <= 1.0) return 1.0;
    return static_cast<double>(N()) * std::log(static_cast<double>(base.size())) / std::log(order);
  }
};

/// Multiplies out A^{g_1}...A^{g_N}; the result stays G once it reaches G.
inline Subset replay_product(const Subset& base, std::span<const Elem> conjugators,
                             std::vector<std::size_t>* trace = nullptr) {
  detail::require_nonempty(base, "base set");
  if (conjugators.empty()) fail(ErrorCode::BadParameter, "no conjugators to replay");
  Subset P = subset_conjugate(base, conjugators[0]);
  if (trace) trace->assign(1, P.size());
  for (std::size_t i = 1; i < conjugators.size(); ++i) {
    if (!P.is_full()) P = subset_product(P, subset_conjugate(base, conjugators[i]));
    if (trace) trace->push_back(P.size());
  }
  return P;
}

inline bool reaches(const Subset& product, const std::optional<Subset>& target) {
  return target ? product == *target : product.is_full();
}

inline ConjugateDecomposition make_decomposition(const Subset& base, std::vector<Elem> conjugators,
                                                 std::optional<Subset> target = std::nullopt) {
  ConjugateDecomposition dec{base, std::move(conjugators), false, {}, std::move(target)};
  dec.complete = reaches(replay_product(base, dec.conjugators, &dec.trace), dec.target);
  return dec;
}

/// True when a replay reproduces `complete` and the recorded trace.
inline bool replay_matches(const ConjugateDecomposition& dec) {
  if (dec.conjugators.empty()) return false;
  std::vector<std::size_t> trace;
  const bool complete = reaches(replay_product(dec.base, dec.conjugators, &trace), dec.target);
  return complete == dec.complete && trace == dec.trace;
}

/// Smallest N with |A|^N >= |G|.
inline std::size_t counting_lower_bound(std::size_t set_size, std::size_t order) {
  if (set_size < 2) fail(ErrorCode::TooSmall, "|A| must be at least 2");
  std::size_t n = 0;
  long double reach = 1;
  while (reach < static_cast<long double>(order)) {
    reach *= static_cast<long double>(set_size);
    ++n;
  }
  return std::max<std::size_t>(n, 1);
}

inline double conjecture_ratio(const ConjugateDecomposition& dec) {
  if (!dec.complete) fail(ErrorCode::Incomplete, "ratio is defined for complete decompositions");
  return dec.ratio();
}

/// Candidate conjugators for a greedy step.
struct Pool {
  enum class Kind { Full, Sample, Explicit };
  Kind kind = Kind::Full;
  unsigned sample = 256;
  std::vector<Elem> candidates;  // Explicit only

  static Pool full() { return {}; }
  static Pool sampled(unsigned m) { return {Kind::Sample, m, {}}; }
  static Pool explicit_list(std::vector<Elem> c) {
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end()), c.end());
    return {Kind::Explicit, 0, std::move(c)};
  }
  /// `full` below 10^4 elements, else `sample:256`.
  static Pool default_for(std::size_t order) { return order <= 10'000 ? full() : sampled(256); }

  /// "full" | "sample:<m>"
  static Pool parse(std::string_view text) {
    if (text == "full") return full();
    if (text.starts_with("sample:")) {
      unsigned m = 0;
      const auto body = text.substr(7);
      auto [ptr, ec] = std::from_chars(body.data(), body.data() + body.size(), m);
      if (ec == std::errc() && ptr == body.data() + body.size() && m > 0) return sampled(m);
    }
    fail(ErrorCode::ParseError, "pool must be 'full' or 'sample:<m>', got '" + std::string(text) + "'");
  }

  std::string to_string() const {
    switch (kind) {
      case Kind::Full: return "full";
      case Kind::Sample: return "sample:" + std::to_string(sample);
      case Kind::Explicit: return "explicit:" + std::to_string(candidates.size());
    }
    return "?";
  }

  bool is_randomized() const { return kind == Kind::Sample; }
};

namespace detail {

struct Scored {
  std::size_t size = 0;
  Elem conjugator = 0;
};

/// Best |P * A^g| over candidates[begin, end) in index order; stops early when
/// `ceiling` (the largest possible size) is reached.
inline Scored score_range(const GroupContext& G, std::span<const Elem> pm, std::span<const Elem> am,
                          std::span<const Elem> candidates, std::size_t ceiling) {
  ProductScratch scratch(G.order());
  Scored best{0, 0};
  std::vector<Elem> conj(am.size());
  for (Elem g : candidates) {
    const Elem gi = G.inv(g);
    for (std::size_t j = 0; j < am.size(); ++j) conj[j] = G.mul_unchecked(G.mul_unchecked(gi, am[j]), g);
    scratch.clear();
    std::size_t size = 0;
    bool beaten = false;
    for (std::size_t j = 0; j < conj.size(); ++j) {
      // even if every remaining translate were disjoint we could not win
      if (size + (conj.size() - j) * pm.size() <= best.size) {
        beaten = true;
        break;
      }
      size += scratch.add_translate(G, pm, conj[j]);
    }
    if (beaten) continue;
    if (size > best.size) best = {size, g};
    if (best.size >= ceiling) break;
  }
  return best;
}

inline Scored best_candidate(const GroupContext& G, const Subset& P, const Subset& A, std::span<const Elem> candidates,
                             std::size_t goal) {
  const auto pm = P.members();
  const auto am = A.members();
  const std::size_t ceiling = std::min<std::size_t>(goal, pm.size() * am.size());
  const unsigned workers = std::min<std::size_t>(
      candidates.size(), worker_count(candidates.size() * pm.size() * am.size()));
  if (workers <= 1) return score_range(G, pm, am, candidates, ceiling);
  std::vector<Scored> partial(workers);
  std::vector<std::thread> threads;
  const std::size_t chunk = (candidates.size() + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    const std::size_t b = std::min(candidates.size(), w * chunk);
    const std::size_t e = std::min(candidates.size(), b + chunk);
    threads.emplace_back([&, b, e, w] { partial[w] = score_range(G, pm, am, candidates.subspan(b, e - b), ceiling); });
  }
  for (auto& t : threads) t.join();
  Scored best{0, 0};
  for (const auto& s : partial)  // chunks are in index order, so ties keep the least index
    if (s.size > best.size) best = s;
  return best;
}

inline ConjugateDecomposition greedy_run(const Subset& A, std::optional<Subset> target, const Pool& pool,
                                         std::size_t cap, std::uint64_t seed) {
  if (A.size() < 2) fail(ErrorCode::TooSmall, "|A| must be at least 2");
  if (cap == 0) fail(ErrorCode::BadParameter, "cap must be positive");
  const auto& G = A.group();
  const std::size_t goal = target ? target->size() : G.order();
  ConjugateDecomposition dec{A, {kIdentity}, false, {A.size()}, std::move(target)};
  Subset P = A;

  std::vector<Elem> all;
  if (pool.kind == Pool::Kind::Full) {
    all.resize(G.order());
    for (Elem g = 0; g < G.order(); ++g) all[g] = g;
  }
  const std::span<const Elem> fixed = pool.kind == Pool::Kind::Full ? std::span<const Elem>(all)
                                                                     : std::span<const Elem>(pool.candidates);
  if (pool.kind == Pool::Kind::Explicit && fixed.empty()) fail(ErrorCode::BadParameter, "empty candidate pool");

  std::uint64_t draw = 0;
  unsigned stalls = 0;
  while (P.size() < goal && dec.N() < cap) {
    std::vector<Elem> sampled;
    std::span<const Elem> candidates = fixed;
    if (pool.kind == Pool::Kind::Sample) {
      Rng rng(derive_seed(seed, "greedy", draw++));
      sampled.reserve(pool.sample);
      for (unsigned i = 0; i < pool.sample; ++i) sampled.push_back(static_cast<Elem>(rng.below(G.order())));
      std::sort(sampled.begin(), sampled.end());
      sampled.erase(std::unique(sampled.begin(), sampled.end()), sampled.end());
      candidates = sampled;
    }
    const auto best = best_candidate(G, P, A, candidates, goal);
    if (best.size <= P.size()) {
      // a full pool cannot stall below G when A generates; a sample can
      if (pool.kind != Pool::Kind::Sample || ++stalls > 64) break;
      continue;
    }
    stalls = 0;
    P = subset_product(P, subset_conjugate(A, best.conjugator));
    if (P.size() != best.size) throw std::logic_error("greedy score disagrees with product size");
    dec.conjugators.push_back(best.conjugator);
    dec.trace.push_back(P.size());
  }
  dec.complete = reaches(P, dec.target);
  return dec;
}

}  // namespace detail

/// Greedy search: P = A (g_1 = 1), then repeatedly append the conjugator g
/// from the pool maximizing |P A^g| (least index on ties) until P = G or
/// `cap` factors. An incomplete result is returned with complete = false.
inline ConjugateDecomposition greedy_decompose(const Subset& A, const Pool& pool, std::size_t cap, std::uint64_t seed) {
  return detail::greedy_run(A, std::nullopt, pool, cap, seed);
}

/// Greedy search for a product of conjugates equal to `target`. The pool
/// must keep products inside the target (e.g. conjugators normalizing it).
inline ConjugateDecomposition greedy_decompose_into(const Subset& A, const Subset& target, const Pool& pool,
                                                    std::size_t cap, std::uint64_t seed) {
  if (!A.is_subset_of(target)) fail(ErrorCode::BadParameter, "base set is not inside the target");
  return detail::greedy_run(A, target, pool, cap, seed);
}

struct OracleOptions {
  std::size_t max_order = 10'000;
  unsigned max_depth = 8;
};

namespace detail {

struct WordsHash {
  std::size_t operator()(const std::vector<std::uint64_t>& w) const {
    std::uint64_t h = 0x2545f4914f6cdd1dULL;
    for (auto x : w) h = mix64(h ^ x);
    return static_cast<std::size_t>(h);
  }
};

/// Depth-first search over product sets P = A^{g_1}...A^{g_k}. P and uPh have
/// the same completions (uPhQ = G iff P Q^{h^-1} = G), so states are stored
/// once per two-sided orbit: a class-count invariant picks the bucket and an
/// explicit u, h match settles equality.
class OracleSearch {
 public:
  OracleSearch(const Subset& A) : A_(A), G_(A.group()), class_of_(G_.order(), 0) {
    std::unordered_map<std::vector<std::uint64_t>, Elem, WordsHash> seen;
    for (Elem g = 0; g < G_.order(); ++g) {
      Subset c = subset_conjugate(A, g);
      std::vector<std::uint64_t> key(c.words().begin(), c.words().end());
      if (seen.emplace(std::move(key), g).second) conjugates_.push_back({g, c.members()});
    }
    std::uint32_t id = 0;
    for (const auto& cls : conjugacy_classes(A.group_ptr())) {
      cls.members.for_each([&](Elem e) { class_of_[e] = id; });
      ++id;
    }
    classes_ = id;
  }

  /// Conjugators of a decomposition with exactly `n` factors, if one exists.
  std::optional<std::vector<Elem>> search(unsigned n) {
    path_.assign(1, kIdentity);
    if (dfs(A_.members(), n - 1)) return path_;
    return std::nullopt;
  }

  std::size_t states() const { return states_.size(); }

 private:
  struct Conj {
    Elem g;
    std::vector<Elem> members;
  };

  struct State {
    std::vector<std::uint64_t> words;
    std::vector<Elem> members;
    std::vector<std::uint64_t> rows;
    unsigned failed = 0;  // no completion with this many factors or fewer
  };

  bool reachable(std::size_t size, unsigned remaining) const {
    long double reach = static_cast<long double>(size);
    for (unsigned i = 0; i < remaining && reach < G_.order(); ++i) reach *= A_.size();
    return reach >= G_.order();
  }

  struct Signature {
    std::uint64_t key;
    std::vector<std::uint64_t> rows;  // per member p: class counts of p^-1 q over q
  };

  static std::uint64_t hash_counts(const std::vector<std::uint32_t>& counts) {
    std::uint64_t h = 0x9e3779b97f4a7c15ULL;
    for (auto c : counts) h = mix64(h ^ c);
    return h;
  }

  /// Orbit invariant: the multisets of per-member class counts of p^-1 q and
  /// of q p^-1.
  Signature signature(std::span<const Elem> pm) const {
    Signature sig{mix64(pm.size()), {}};
    std::vector<std::uint64_t> right_rows;
    std::vector<std::uint32_t> left(classes_), right(classes_);
    for (Elem p : pm) {
      const Elem pi = G_.inv(p);
      std::fill(left.begin(), left.end(), 0);
      std::fill(right.begin(), right.end(), 0);
      for (Elem q : pm) {
        ++left[class_of_[G_.mul_unchecked(pi, q)]];
        ++right[class_of_[G_.mul_unchecked(q, pi)]];
      }
      sig.rows.push_back(hash_counts(left));
      right_rows.push_back(hash_counts(right));
    }
    auto sorted = sig.rows;
    std::sort(sorted.begin(), sorted.end());
    std::sort(right_rows.begin(), right_rows.end());
    for (auto r : sorted) sig.key = mix64(sig.key ^ r);
    for (auto r : right_rows) sig.key = mix64(sig.key + r);
    return sig;
  }

  static bool has(const std::vector<std::uint64_t>& words, Elem e) { return (words[e >> 6] >> (e & 63)) & 1; }

  /// Whether Q = uPh for some u, h.
  bool same_orbit(std::span<const Elem> pm, const Signature& sig, const State& q) const {
    if (pm.size() != q.members.size()) return false;
    const Elem q0 = q.members.front();
    std::vector<Elem> starts;  // p0 with u p0 h = q0 must share its row
    for (std::size_t i = 0; i < pm.size(); ++i)
      if (sig.rows[i] == q.rows.front()) starts.push_back(pm[i]);
    for (Elem h = 0; h < G_.order(); ++h) {
      const Elem hi = G_.inv(h);
      for (Elem p0 : starts) {
        const Elem u = G_.mul_unchecked(G_.mul_unchecked(q0, hi), G_.inv(p0));
        bool all = true;
        for (Elem p : pm)
          if (!has(q.words, G_.mul_unchecked(G_.mul_unchecked(u, p), h))) {
            all = false;
            break;
          }
        if (all) return true;
      }
    }
    return false;
  }

  /// Index of the stored state of P's orbit, inserted when new.
  std::size_t lookup(std::span<const Elem> pm, const std::vector<std::uint64_t>& words) {
    auto sig = signature(pm);
    auto& bucket = buckets_[sig.key];
    for (auto i : bucket)
      if (same_orbit(pm, sig, states_[i])) return i;
    bucket.push_back(states_.size());
    states_.push_back({words, {pm.begin(), pm.end()}, std::move(sig.rows), 0});
    return states_.size() - 1;
  }

  bool dfs(const std::vector<Elem>& pm, unsigned remaining) {
    if (pm.size() == G_.order()) return true;
    if (remaining == 0 || !reachable(pm.size(), remaining)) return false;

    struct Child {
      std::vector<Elem> members;
      std::size_t state;
      Elem g;
    };
    std::vector<Child> children;
    std::vector<std::size_t> taken;
    ProductScratch scratch(G_.order());
    for (const auto& c : conjugates_) {
      scratch.clear();
      std::size_t size = 0;
      for (Elem b : c.members) size += scratch.add_translate(G_, pm, b);
      if (size == G_.order()) {
        path_.push_back(c.g);
        return true;
      }
      if (!reachable(size, remaining - 1)) continue;
      std::vector<Elem> cm;
      cm.reserve(size);
      Subset::from_words(A_.group_ptr(), scratch.words()).for_each([&](Elem e) { cm.push_back(e); });
      const std::size_t index = lookup(cm, scratch.words());
      if (states_[index].failed >= remaining - 1) continue;
      if (std::find(taken.begin(), taken.end(), index) != taken.end()) continue;
      taken.push_back(index);
      children.push_back({std::move(cm), index, c.g});
    }
    std::stable_sort(children.begin(), children.end(),
                     [](const Child& a, const Child& b) { return a.members.size() > b.members.size(); });
    for (const auto& child : children) {
      if (states_[child.state].failed >= remaining - 1) continue;
      path_.push_back(child.g);
      if (dfs(child.members, remaining - 1)) return true;
      path_.pop_back();
      states_[child.state].failed = std::max(states_[child.state].failed, remaining - 1);
    }
    return false;
  }

  const Subset& A_;
  const GroupContext& G_;
  std::vector<Conj> conjugates_;
  std::vector<std::uint32_t> class_of_;
  std::uint32_t classes_ = 0;
  std::vector<Elem> path_;
  std::vector<State> states_;
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> buckets_;
};

}  // namespace detail

/// Exact minimum N <= n_max by exhaustive depth-first search over product-set
/// states (g_1 = 1 without loss), or nothing when no tuple of length <= n_max
/// reaches G.
inline std::optional<ConjugateDecomposition> minimal_decomposition(const Subset& A, unsigned n_max,
                                                                   const OracleOptions& options = {}) {
  const auto& G = A.group();
  if (G.order() > options.max_order)
    fail(ErrorCode::InstanceTooLarge, "oracle limited to |G| <= " + std::to_string(options.max_order));
  if (n_max > options.max_depth)
    fail(ErrorCode::InstanceTooLarge, "oracle limited to n_max <= " + std::to_string(options.max_depth));
  if (A.size() < 2) fail(ErrorCode::TooSmall, "|A| must be at least 2");
  if (A.is_full()) return make_decomposition(A, {kIdentity});
  const auto lower = counting_lower_bound(A.size(), G.order());
  if (lower > n_max) return std::nullopt;
  detail::OracleSearch search(A);
  for (unsigned n = static_cast<unsigned>(lower); n <= n_max; ++n)
    if (auto path = search.search(n)) return make_decomposition(A, std::move(*path));
  return std::nullopt;
}

inline std::optional<unsigned> minimal_n_oracle(const Subset& A, unsigned n_max, const OracleOptions& options = {}) {
  auto dec = minimal_decomposition(A, n_max, options);
  if (!dec) return std::nullopt;
  return static_cast<unsigned>(dec->N());
}

/// Least k with C^k = G for a normal subset C.
inline unsigned normal_subset_decompose(const Subset& C, unsigned max_power = 64) {
  detail::require_nonempty(C, "C");
  if (C.size() == 1 && C.contains(kIdentity)) fail(ErrorCode::TrivialSet, "C is {1}");
  if (!is_normal_subset(C)) fail(ErrorCode::NotNormal, "C is not closed under conjugation");
  Subset power = C;
  for (unsigned k = 1; k <= max_power; ++k) {
    if (power.is_full()) return k;
    power = subset_product(power, C);
  }
  fail(ErrorCode::CapExceeded, "C^k did not reach G for k <= " + std::to_string(max_power));
}

/// Greedy cover of G by conjugates of a nontrivial subgroup H.
inline ConjugateDecomposition subgroup_cover(const Subset& H, const Pool& pool, std::size_t cap, std::uint64_t seed) {
  if (!is_subgroup(H)) fail(ErrorCode::NotSubgroup, "H is not closed under products and inverses");
  if (H.size() < 2) fail(ErrorCode::TrivialSubgroup, "H is trivial");
  return greedy_decompose(H, pool, cap, seed);
}

}  // namespace produkt
