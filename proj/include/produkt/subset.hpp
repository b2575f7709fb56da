#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <memory>
#include <span>
#include <thread>
#include <utility>
#include <vector>

#include "produkt/error.hpp"
#include "produkt/group.hpp"
#include "produkt/random.hpp"

namespace produkt {

using GroupPtr = std::shared_ptr<const GroupContext>;

/// Dense subset of a group: one bit per element index, cached cardinality.
class Subset {
 public:
  explicit Subset(GroupPtr group)
      : group_(std::move(group)), words_((group_->order() + 63) / 64, 0) {}

  static Subset of(GroupPtr group, std::span<const Elem> members) {
    Subset s(std::move(group));
    for (Elem e : members) s.insert(e);
    return s;
  }
  static Subset of(GroupPtr group, std::initializer_list<Elem> members) {
    return of(std::move(group), std::span<const Elem>(members.begin(), members.size()));
  }
  static Subset full(GroupPtr group) {
    Subset s(std::move(group));
    const Elem n = s.group_->order();
    for (Elem i = 0; i < n / 64; ++i) s.words_[i] = ~0ULL;
    if (n % 64) s.words_[n / 64] = (1ULL << (n % 64)) - 1;
    s.count_ = n;
    return s;
  }

  const GroupContext& group() const { return *group_; }
  const GroupPtr& group_ptr() const { return group_; }
  std::size_t size() const { return count_; }
  bool empty() const { return count_ == 0; }
  bool is_full() const { return count_ == group_->order(); }

  bool contains(Elem e) const {
    if (e >= group_->order()) return false;
    return (words_[e >> 6] >> (e & 63)) & 1;
  }

  void insert(Elem e) {
    if (e >= group_->order())
      fail(ErrorCode::IndexOutOfRange, "element index " + std::to_string(e) + " outside the group");
    auto& w = words_[e >> 6];
    const auto bit = 1ULL << (e & 63);
    if (!(w & bit)) {
      w |= bit;
      ++count_;
    }
  }

  /// Members in increasing index order.
  std::vector<Elem> members() const {
    std::vector<Elem> out;
    out.reserve(count_);
    for_each([&](Elem e) { out.push_back(e); });
    return out;
  }

  Elem least() const {
    for (std::size_t w = 0; w < words_.size(); ++w)
      if (words_[w]) return static_cast<Elem>(w * 64 + std::countr_zero(words_[w]));
    fail(ErrorCode::EmptySet, "empty subset has no least member");
  }

  template <class F>
  void for_each(F&& f) const {
    for (std::size_t w = 0; w < words_.size(); ++w) {
      std::uint64_t bits = words_[w];
      while (bits) {
        f(static_cast<Elem>(w * 64 + std::countr_zero(bits)));
        bits &= bits - 1;
      }
    }
  }

  bool is_subset_of(const Subset& other) const {
    same_group(other);
    for (std::size_t w = 0; w < words_.size(); ++w)
      if (words_[w] & ~other.words_[w]) return false;
    return true;
  }

  std::span<const std::uint64_t> words() const { return words_; }

  /// Rebuilds the cached count after bulk word edits.
  static Subset from_words(GroupPtr group, std::vector<std::uint64_t> words) {
    Subset s(std::move(group));
    if (words.size() != s.words_.size()) fail(ErrorCode::ContextMismatch, "word count mismatch");
    s.words_ = std::move(words);
    s.count_ = 0;
    for (auto w : s.words_) s.count_ += std::popcount(w);
    return s;
  }

  void same_group(const Subset& other) const {
    if (group_ != other.group_ && !(group_->spec() == other.group_->spec()))
      fail(ErrorCode::ContextMismatch, "subsets belong to different groups");
  }

  friend bool operator==(const Subset& a, const Subset& b) {
    return a.group_->spec() == b.group_->spec() && a.count_ == b.count_ && a.words_ == b.words_;
  }

 private:
  GroupPtr group_;
  std::vector<std::uint64_t> words_;
  std::size_t count_ = 0;
};

namespace detail {

inline void require_nonempty(const Subset& s, const char* what) {
  if (s.empty()) fail(ErrorCode::EmptySet, std::string(what) + " is empty");
}

inline unsigned worker_count(std::size_t work) {
  if (work < (1u << 22)) return 1;
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace detail

/// Reusable bitset for hot loops that need |P*Q| without building a Subset.
class ProductScratch {
 public:
  explicit ProductScratch(Elem order) : words_((order + 63) / 64, 0) {}

  /// Marks all of {p * q}; returns the number of newly set bits.
  std::size_t add_translate(const GroupContext& g, std::span<const Elem> left, Elem right) {
    std::size_t added = 0;
    for (Elem p : left) {
      const Elem e = g.mul_unchecked(p, right);
      auto& w = words_[e >> 6];
      const auto bit = 1ULL << (e & 63);
      added += !(w & bit);
      w |= bit;
    }
    return added;
  }

  void clear() { std::fill(words_.begin(), words_.end(), 0); }
  std::vector<std::uint64_t>& words() { return words_; }

 private:
  std::vector<std::uint64_t> words_;
};

/// P * Q = {pq}. The outer loop runs over the smaller operand; large products
/// are split across workers whose partial bitsets are OR-merged.
inline Subset subset_product(const Subset& P, const Subset& Q) {
  P.same_group(Q);
  detail::require_nonempty(P, "left operand");
  detail::require_nonempty(Q, "right operand");
  const auto& g = P.group();
  const auto pm = P.members();
  const auto qm = Q.members();
  const bool outer_left = pm.size() <= qm.size();
  const auto& outer = outer_left ? pm : qm;
  const auto& inner = outer_left ? qm : pm;
  const std::size_t nwords = (g.order() + 63) / 64;

  auto run = [&](std::size_t begin, std::size_t end, std::vector<std::uint64_t>& out) {
    for (std::size_t i = begin; i < end; ++i) {
      const Elem o = outer[i];
      for (Elem x : inner) {
        const Elem e = outer_left ? g.mul_unchecked(o, x) : g.mul_unchecked(x, o);
        out[e >> 6] |= 1ULL << (e & 63);
      }
    }
  };

  const unsigned workers = std::min<std::size_t>(detail::worker_count(pm.size() * qm.size()), outer.size());
  std::vector<std::uint64_t> words(nwords, 0);
  if (workers <= 1) {
    run(0, outer.size(), words);
  } else {
    std::vector<std::vector<std::uint64_t>> partial(workers, std::vector<std::uint64_t>(nwords, 0));
    std::vector<std::thread> threads;
    const std::size_t chunk = (outer.size() + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
      const std::size_t b = std::min(outer.size(), w * chunk);
      const std::size_t e = std::min(outer.size(), b + chunk);
      threads.emplace_back([&, b, e, w] { run(b, e, partial[w]); });
    }
    for (auto& t : threads) t.join();
    for (const auto& part : partial)
      for (std::size_t i = 0; i < nwords; ++i) words[i] |= part[i];
  }
  return Subset::from_words(P.group_ptr(), std::move(words));
}

/// g^-1 A g.
inline Subset subset_conjugate(const Subset& A, Elem g) {
  const auto& G = A.group();
  if (g >= G.order()) fail(ErrorCode::IndexOutOfRange, "conjugator outside the group");
  Subset out(A.group_ptr());
  const Elem gi = G.inv(g);
  A.for_each([&](Elem a) { out.insert(G.mul_unchecked(G.mul_unchecked(gi, a), g)); });
  return out;
}

/// g * A (left translate).
inline Subset left_translate(Elem g, const Subset& A) {
  const auto& G = A.group();
  Subset out(A.group_ptr());
  A.for_each([&](Elem a) { out.insert(G.mul(g, a)); });
  return out;
}

inline Subset subset_inverse(const Subset& A) {
  Subset out(A.group_ptr());
  A.for_each([&](Elem a) { out.insert(A.group().inv(a)); });
  return out;
}

/// A^k by repeated squaring of product sets.
inline Subset subset_power(const Subset& A, unsigned k) {
  detail::require_nonempty(A, "base set");
  if (k == 0) fail(ErrorCode::BadParameter, "power must be positive");
  std::optional<Subset> result;
  Subset base = A;
  while (true) {
    if (k & 1) result = result ? subset_product(*result, base) : base;
    k >>= 1;
    if (!k) break;
    base = subset_product(base, base);
  }
  return *result;
}

struct Normalized {
  Subset set;   // a^-1 A
  Elem shift;   // a
};

/// B = a^-1 A for the least-index member a; 1 is in B.
inline Normalized normalize_to_identity(const Subset& A) {
  detail::require_nonempty(A, "subset");
  const Elem a = A.least();
  return {left_translate(A.group().inv(a), A), a};
}

struct Symmetrized {
  Subset set;  // x^-1 A^2
  Elem x;
};

/// S = x^-1 (A A) for the least non-identity member x of A; S contains
/// x^-1, 1 and x.
inline Symmetrized symmetrize(const Subset& A) {
  if (!A.contains(kIdentity)) fail(ErrorCode::IdentityMissing, "symmetrize needs 1 in A");
  if (A.size() < 2) fail(ErrorCode::TooSmall, "symmetrize needs |A| >= 2");
  Elem x = kIdentity;
  A.for_each([&](Elem e) {
    if (x == kIdentity && e != kIdentity) x = e;
  });
  const Subset square = subset_product(A, A);
  return {left_translate(A.group().inv(x), square), x};
}

/// Conjugators for A = a B from conjugators for B: if G = prod B^{k_i} then
/// G = prod A^{h_i} with h_i = k_i (a^{h_{i+1}} ... a^{h_N})^-1.
inline std::vector<Elem> translate_conjugators(const GroupContext& G, Elem a, std::span<const Elem> ks) {
  std::vector<Elem> hs(ks.size());
  Elem suffix = kIdentity;  // a^{h_{i+1}} ... a^{h_N}
  for (std::size_t i = ks.size(); i-- > 0;) {
    hs[i] = G.mul(ks[i], G.inv(suffix));
    suffix = G.mul(G.conjugate(a, hs[i]), suffix);
  }
  return hs;
}

/// Conjugators for A from conjugators for A^2: every A^2 conjugate is two
/// consecutive A conjugates.
inline std::vector<Elem> double_conjugators(std::span<const Elem> ks) {
  std::vector<Elem> out;
  out.reserve(2 * ks.size());
  for (Elem k : ks) {
    out.push_back(k);
    out.push_back(k);
  }
  return out;
}

/// The subgroup generated by A. Members of A are added one at a time and
/// skipped when already inside; each accepted generator at least doubles
/// the subgroup, so at most log2|G| of them are ever multiplied through.
/// In a finite group closure under right multiplication is a subgroup.
inline Subset generated_subgroup(const Subset& A) {
  detail::require_nonempty(A, "generating set");
  const auto& G = A.group();
  Subset H(A.group_ptr());
  H.insert(kIdentity);
  std::vector<Elem> chosen;
  std::vector<Elem> elems{kIdentity};
  A.for_each([&](Elem a) {
    if (H.contains(a) || H.is_full()) return;
    chosen.push_back(a);
    std::vector<Elem> frontier = elems;
    while (!frontier.empty()) {
      std::vector<Elem> next;
      for (Elem e : frontier)
        for (Elem s : chosen) {
          const Elem f = G.mul_unchecked(e, s);
          if (!H.contains(f)) {
            H.insert(f);
            next.push_back(f);
          }
        }
      elems.insert(elems.end(), next.begin(), next.end());
      frontier = std::move(next);
    }
  });
  return H;
}

inline bool closure_generates(const Subset& A) {
  return generated_subgroup(A).is_full();
}

inline bool is_subgroup(const Subset& H) {
  if (H.empty() || !H.contains(kIdentity)) return false;
  const auto& G = H.group();
  bool ok = true;
  const auto members = H.members();
  for (Elem a : members) {
    if (!H.contains(G.inv(a))) return false;
    for (Elem b : members)
      if (!H.contains(G.mul_unchecked(a, b))) {
        ok = false;
        break;
      }
    if (!ok) return false;
  }
  return true;
}

/// C^g = C for every g in G.
inline bool is_normal_subset(const Subset& C) {
  const auto& G = C.group();
  const auto members = C.members();
  for (Elem g = 0; g < G.order(); ++g) {
    const Elem gi = G.inv(g);
    for (Elem c : members)
      if (!C.contains(G.mul_unchecked(G.mul_unchecked(gi, c), g))) return false;
  }
  return true;
}

struct ConjClass {
  Elem representative;
  Subset members;
  std::size_t size() const { return members.size(); }
};

inline ConjClass conjugacy_class(const GroupPtr& group, Elem x) {
  const auto& G = *group;
  if (x >= G.order()) fail(ErrorCode::IndexOutOfRange, "element index outside the group");
  Subset members(group);
  for (Elem g = 0; g < G.order(); ++g) members.insert(G.mul_unchecked(G.mul_unchecked(G.inv(g), x), g));
  return {x, std::move(members)};
}

/// All classes, each represented by its least-index member, in increasing
/// representative order.
inline std::vector<ConjClass> conjugacy_classes(const GroupPtr& group) {
  Subset covered(group);
  std::vector<ConjClass> classes;
  for (Elem x = 0; x < group->order(); ++x) {
    if (covered.contains(x)) continue;
    auto cls = conjugacy_class(group, x);
    cls.members.for_each([&](Elem e) { covered.insert(e); });
    classes.push_back(std::move(cls));
  }
  return classes;
}

inline Subset centralizer(const GroupPtr& group, Elem x) {
  Subset out(group);
  const auto& G = *group;
  for (Elem g = 0; g < G.order(); ++g)
    if (G.mul_unchecked(g, x) == G.mul_unchecked(x, g)) out.insert(g);
  return out;
}

/// N_G(H) by direct conjugation of H.
inline Subset normalizer(const Subset& H) {
  const auto& G = H.group();
  const auto members = H.members();
  Subset out(H.group_ptr());
  for (Elem g = 0; g < G.order(); ++g) {
    const Elem gi = G.inv(g);
    bool keeps = true;
    for (Elem h : members)
      if (!H.contains(G.mul_unchecked(G.mul_unchecked(gi, h), g))) {
        keeps = false;
        break;
      }
    if (keeps) out.insert(g);
  }
  return out;
}

/// Uniform random subset of the given size (seeded, without replacement).
inline Subset random_subset(const GroupPtr& group, std::uint32_t size, std::uint64_t seed) {
  if (size == 0 || size > group->order())
    fail(ErrorCode::BadParameter, "random subset size must lie in [1, |G|]");
  Rng rng(seed);
  Subset s(group);
  if (std::uint64_t(size) * 4 < group->order()) {
    while (s.size() < size) s.insert(static_cast<Elem>(rng.below(group->order())));
  } else {
    for (Elem e : sample_without_replacement(rng, group->order(), size)) s.insert(e);
  }
  return s;
}

}  // namespace produkt
