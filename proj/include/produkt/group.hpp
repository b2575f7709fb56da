#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "produkt/error.hpp"
#include "produkt/field.hpp"
#include "produkt/matrix.hpp"

namespace produkt {

/// Index of an element inside a GroupContext; 0 is always the identity.
using Elem = std::uint32_t;
inline constexpr Elem kIdentity = 0;

enum class Family { Alternating, PSL2, PSL3 };

struct GroupSpec {
  Family family = Family::Alternating;
  unsigned parameter = 5;  // n for A_n, q for PSL_d(q)

  friend bool operator==(const GroupSpec&, const GroupSpec&) = default;

  bool is_alternating() const { return family == Family::Alternating; }
  unsigned dimension() const { return family == Family::PSL3 ? 3 : 2; }

  /// Lie rank for the linear families. For A_n we use n - 1, which only
  /// feeds informational bounds.
  unsigned rank() const {
    switch (family) {
      case Family::PSL2: return 1;
      case Family::PSL3: return 2;
      case Family::Alternating: return parameter - 1;
    }
    return 0;
  }

  std::string family_name() const {
    switch (family) {
      case Family::Alternating: return "A";
      case Family::PSL2: return "PSL2";
      case Family::PSL3: return "PSL3";
    }
    return "?";
  }

  /// `A:<n>`, `PSL:2:<q>`, `PSL:3:<q>`.
  std::string to_string() const {
    if (is_alternating()) return "A:" + std::to_string(parameter);
    return "PSL:" + std::to_string(dimension()) + ":" + std::to_string(parameter);
  }

  static GroupSpec parse(std::string_view text) {
    auto number = [&](std::string_view s) {
      unsigned v = 0;
      auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
        fail(ErrorCode::ParseError, "bad number in group spec '" + std::string(text) + "'");
      return v;
    };
    if (text.starts_with("A:")) return {Family::Alternating, number(text.substr(2))};
    if (text.starts_with("PSL:2:")) return {Family::PSL2, number(text.substr(6))};
    if (text.starts_with("PSL:3:")) return {Family::PSL3, number(text.substr(6))};
    fail(ErrorCode::ParseError, "unknown group spec '" + std::string(text) + "'");
  }
};

/// Checks the family/parameter invariants and returns |G| from the order
/// formula (saturating at UINT64_MAX).
inline std::uint64_t expected_order(const GroupSpec& spec) {
  auto sat_mul = [](std::uint64_t a, std::uint64_t b) {
    if (a != 0 && b > UINT64_MAX / a) return UINT64_MAX;
    return a * b;
  };
  if (spec.is_alternating()) {
    if (spec.parameter < 5)
      fail(ErrorCode::NotSimpleParameters, "A_" + std::to_string(spec.parameter) + " is not simple");
    if (spec.parameter > 10) fail(ErrorCode::TooLarge, "A_n is supported for n <= 10");
    std::uint64_t f = 1;
    for (unsigned i = 3; i <= spec.parameter; ++i) f = sat_mul(f, i);
    return f;
  }
  const unsigned q = spec.parameter;
  if (!factor_prime_power(q)) fail(ErrorCode::NotPrimePower, std::to_string(q) + " is not a prime power");
  const unsigned d = spec.dimension();
  if (d == 2 && q < 4)
    fail(ErrorCode::NotSimpleParameters, "PSL2(" + std::to_string(q) + ") is not simple");
  // |SL_d(q)| = q^(d(d-1)/2) prod_{i=2..d} (q^i - 1), divided by gcd(d, q-1)
  std::uint64_t order = 1;
  for (unsigned i = 0; i < d * (d - 1) / 2; ++i) order = sat_mul(order, q);
  std::uint64_t qi = q;
  for (unsigned i = 2; i <= d; ++i) {
    qi = sat_mul(qi, q);
    order = sat_mul(order, qi - 1);
  }
  if (order == UINT64_MAX) return order;
  return order / std::gcd<std::uint64_t>(d, q - 1);
}

struct BuildOptions {
  /// Largest |G| that will be enumerated.
  std::uint64_t max_order = 20'000'000;
  /// The memoized multiplication table is built only for |G| <= table_max_order
  /// and when order^2 * 2 bytes fits in table_bytes.
  std::uint64_t table_max_order = 10'000;
  std::uint64_t table_bytes = 256ull << 20;

  /// Defaults, with PRODUKT_MAX_ORDER overriding the order cap.
  static BuildOptions from_environment() {
    BuildOptions opts;
    if (const char* env = std::getenv("PRODUKT_MAX_ORDER")) {
      std::uint64_t v = 0;
      std::string_view s(env);
      auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      if (ec != std::errc() || ptr != s.data() + s.size() || v == 0)
        fail(ErrorCode::ParseError, "PRODUKT_MAX_ORDER must be a positive integer");
      opts.max_order = v;
    }
    return opts;
  }
};

class GroupContext;
std::shared_ptr<const GroupContext> build_context(const GroupSpec& spec,
                                                  const BuildOptions& options = {});

/// A fully enumerated simple group. Immutable after construction.
///
/// Elements are stored by canonical code: the 0-based image array of a
/// permutation of {0..n-1}, or a d x d matrix over F_q scaled so that its
/// first nonzero entry (row-major) is 1. Indices follow the lexicographic
/// order of the codes, except that the identity is swapped into index 0.
///
/// Products compose left to right: (p*q)(i) = q(p(i)) for permutations and
/// the ordinary matrix product for matrices.
class GroupContext {
 public:
  const GroupSpec& spec() const { return spec_; }
  Elem order() const { return order_; }
  bool is_permutation_group() const { return spec_.is_alternating(); }
  /// n for A_n.
  unsigned degree() const { return spec_.is_alternating() ? spec_.parameter : 0; }
  /// d for PSL_d(q).
  unsigned dimension() const { return spec_.is_alternating() ? 0 : spec_.dimension(); }
  const Field& field() const {
    if (!field_) fail(ErrorCode::WrongFamily, "permutation groups have no field");
    return *field_;
  }
  bool has_table() const { return !table_.empty(); }
  unsigned code_width() const { return width_; }

  std::span<const std::uint8_t> code(Elem a) const {
    check(a);
    return {codes_.data() + std::size_t(a) * width_, width_};
  }

  Elem mul(Elem a, Elem b) const {
    check(a);
    check(b);
    return mul_unchecked(a, b);
  }

  Elem mul_unchecked(Elem a, Elem b) const {
    if (!table_.empty()) return table_[std::size_t(b) * order_ + a];
    return compute_product(a, b);
  }

  Elem inv(Elem a) const {
    check(a);
    return inverse_[a];
  }

  /// g^-1 a g.
  Elem conjugate(Elem a, Elem g) const {
    check(a);
    check(g);
    return mul_unchecked(mul_unchecked(inverse_[g], a), g);
  }

  /// [x, y] = x^-1 y^-1 x y.
  Elem commutator(Elem x, Elem y) const {
    check(x);
    check(y);
    return mul_unchecked(mul_unchecked(inverse_[x], inverse_[y]), mul_unchecked(x, y));
  }

  Elem power(Elem a, std::uint64_t k) const {
    check(a);
    Elem r = kIdentity;
    Elem base = a;
    while (k) {
      if (k & 1) r = mul_unchecked(r, base);
      base = mul_unchecked(base, base);
      k >>= 1;
    }
    return r;
  }

  std::uint64_t element_order(Elem a) const {
    check(a);
    std::uint64_t k = 1;
    for (Elem x = a; x != kIdentity; x = mul_unchecked(x, a)) ++k;
    return k;
  }

  /// Index of the element with the given canonical code, if it belongs to G.
  std::optional<Elem> find(std::span<const std::uint8_t> code) const {
    if (code.size() != width_) return std::nullopt;
    if (is_permutation_group()) {
      std::array<bool, 16> seen{};
      for (auto v : code) {
        if (v >= width_ || seen[v]) return std::nullopt;
        seen[v] = true;
      }
      if (!is_even(code)) return std::nullopt;
      return permutation_index(code);
    }
    const auto key = pack(code);
    auto it = std::lower_bound(sorted_keys_.begin(), sorted_keys_.end(), key);
    if (it == sorted_keys_.end() || *it != key) return std::nullopt;
    return remap(static_cast<Elem>(it - sorted_keys_.begin()));
  }

  /// Index of an arbitrary matrix (any scalar multiple); nothing when the
  /// projective class is outside PSL.
  std::optional<Elem> find_matrix(const Mat& m) const {
    if (is_permutation_group()) fail(ErrorCode::WrongFamily, "not a matrix group");
    if (mat::determinant(*field_, m) == 0) return std::nullopt;
    const Mat c = mat::canonical(*field_, m);
    return find(c.entries());
  }

  Mat matrix(Elem a) const {
    if (is_permutation_group()) fail(ErrorCode::WrongFamily, "not a matrix group");
    return Mat::from(code(a), dimension());
  }

  /// Points moved by a permutation, 1-based.
  std::vector<unsigned> support(Elem x) const {
    if (!is_permutation_group()) fail(ErrorCode::WrongFamily, "support is defined for permutation groups only");
    const auto c = code(x);
    std::vector<unsigned> moved;
    for (unsigned i = 0; i < width_; ++i)
      if (c[i] != i) moved.push_back(i + 1);
    return moved;
  }

  /// Cycle lengths (including fixed points), sorted descending.
  std::vector<unsigned> cycle_type(Elem x) const {
    if (!is_permutation_group()) fail(ErrorCode::WrongFamily, "cycle type is defined for permutation groups only");
    const auto c = code(x);
    std::vector<unsigned> lengths;
    std::array<bool, 16> seen{};
    for (unsigned i = 0; i < width_; ++i) {
      if (seen[i]) continue;
      unsigned len = 0;
      for (unsigned j = i; !seen[j]; j = c[j]) {
        seen[j] = true;
        ++len;
      }
      lengths.push_back(len);
    }
    std::sort(lengths.rbegin(), lengths.rend());
    return lengths;
  }

  /// Permutation from 1-based images; nothing when odd or malformed.
  std::optional<Elem> from_images(std::span<const unsigned> images) const {
    if (!is_permutation_group() || images.size() != width_) return std::nullopt;
    std::array<std::uint8_t, 16> c{};
    for (unsigned i = 0; i < width_; ++i) {
      if (images[i] < 1 || images[i] > width_) return std::nullopt;
      c[i] = static_cast<std::uint8_t>(images[i] - 1);
    }
    return find({c.data(), width_});
  }

  /// Cycle notation for permutations ("()" for the identity, cycles led by
  /// their least point) and "[[a,b],[c,d]]" for matrices.
  std::string format(Elem a) const {
    const auto c = code(a);
    std::string out;
    if (is_permutation_group()) {
      std::array<bool, 16> seen{};
      for (unsigned i = 0; i < width_; ++i) {
        if (seen[i] || c[i] == i) continue;
        out += '(';
        for (unsigned j = i; !seen[j]; j = c[j]) {
          seen[j] = true;
          if (j != i) out += ' ';
          out += std::to_string(j + 1);
        }
        out += ')';
      }
      return out.empty() ? "()" : out;
    }
    const unsigned d = dimension();
    out += '[';
    for (unsigned r = 0; r < d; ++r) {
      if (r) out += ',';
      out += '[';
      for (unsigned k = 0; k < d; ++k) {
        if (k) out += ',';
        out += std::to_string(c[r * d + k]);
      }
      out += ']';
    }
    out += ']';
    return out;
  }

  /// Inverse of `format`; also accepts "1" for the identity, non-disjoint
  /// cycle products (composed left to right) and non-canonical matrices.
  Elem parse_element(std::string_view text) const {
    const std::string original(text);
    auto trim = [](std::string_view s) {
      while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
      while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
      return s;
    };
    text = trim(text);
    if (text == "1") return kIdentity;
    if (is_permutation_group()) return parse_cycles(text, original);
    return parse_matrix(text, original);
  }

 private:
  friend std::shared_ptr<const GroupContext> build_context(const GroupSpec&, const BuildOptions&);

  GroupContext() = default;

  void check(Elem a) const {
    if (a >= order_)
      fail(ErrorCode::IndexOutOfRange, "element index " + std::to_string(a) + " >= " + std::to_string(order_));
  }

  static bool is_even(std::span<const std::uint8_t> perm) {
    std::array<bool, 16> seen{};
    unsigned transpositions = 0;
    for (unsigned i = 0; i < perm.size(); ++i) {
      if (seen[i]) continue;
      unsigned len = 0;
      for (unsigned j = i; !seen[j]; j = perm[j]) {
        seen[j] = true;
        ++len;
      }
      transpositions += len - 1;
    }
    return transpositions % 2 == 0;
  }

  /// Lexicographic rank among S_n halved: in lex order the permutations come
  /// in consecutive pairs differing in the last two entries, and exactly one
  /// member of each pair is even.
  static Elem permutation_index(std::span<const std::uint8_t> perm) {
    static constexpr std::array<std::uint64_t, 16> fact = [] {
      std::array<std::uint64_t, 16> f{};
      f[0] = 1;
      for (unsigned i = 1; i < 16; ++i) f[i] = f[i - 1] * i;
      return f;
    }();
    const unsigned n = static_cast<unsigned>(perm.size());
    std::uint64_t rank = 0;
    for (unsigned i = 0; i < n; ++i) {
      unsigned smaller = 0;
      for (unsigned j = i + 1; j < n; ++j) smaller += perm[j] < perm[i];
      rank += smaller * fact[n - 1 - i];
    }
    return static_cast<Elem>(rank / 2);
  }

  std::uint64_t pack(std::span<const std::uint8_t> code) const {
    std::uint64_t key = 0;
    for (auto v : code) key = (key << bits_) | v;
    return key;
  }

  Elem remap(Elem sorted_position) const {
    if (sorted_position == identity_position_) return kIdentity;
    if (sorted_position == kIdentity) return identity_position_;
    return sorted_position;
  }

  Elem compute_product(Elem a, Elem b) const {
    const std::uint8_t* ca = codes_.data() + std::size_t(a) * width_;
    const std::uint8_t* cb = codes_.data() + std::size_t(b) * width_;
    if (is_permutation_group()) {
      std::array<std::uint8_t, 16> out;
      for (unsigned i = 0; i < width_; ++i) out[i] = cb[ca[i]];
      return permutation_index({out.data(), width_});
    }
    const unsigned d = dimension();
    const Mat prod = mat::canonical(*field_, mat::multiply(*field_, Mat::from({ca, width_}, d), Mat::from({cb, width_}, d)));
    const auto key = pack(prod.entries());
    auto it = std::lower_bound(sorted_keys_.begin(), sorted_keys_.end(), key);
    return remap(static_cast<Elem>(it - sorted_keys_.begin()));
  }

  Elem parse_cycles(std::string_view text, const std::string& original) const {
    const unsigned n = width_;
    std::array<std::uint8_t, 16> perm{};
    for (unsigned i = 0; i < n; ++i) perm[i] = static_cast<std::uint8_t>(i);
    std::size_t pos = 0;
    bool any = false;
    while (pos < text.size()) {
      if (text[pos] == ' ') {
        ++pos;
        continue;
      }
      if (text[pos] != '(') fail(ErrorCode::ParseError, "expected '(' in '" + original + "'");
      const auto close = text.find(')', pos);
      if (close == std::string_view::npos) fail(ErrorCode::ParseError, "unclosed cycle in '" + original + "'");
      std::vector<unsigned> points;
      std::string_view body = text.substr(pos + 1, close - pos - 1);
      std::size_t i = 0;
      while (i < body.size()) {
        if (body[i] == ' ' || body[i] == ',') {
          ++i;
          continue;
        }
        unsigned v = 0;
        auto [ptr, ec] = std::from_chars(body.data() + i, body.data() + body.size(), v);
        if (ec != std::errc()) fail(ErrorCode::ParseError, "bad point in '" + original + "'");
        if (v < 1 || v > n) fail(ErrorCode::ParseError, "point " + std::to_string(v) + " out of range in '" + original + "'");
        points.push_back(v - 1);
        i = static_cast<std::size_t>(ptr - body.data());
      }
      std::array<bool, 16> dup{};
      for (auto p : points) {
        if (dup[p]) fail(ErrorCode::ParseError, "repeated point in cycle in '" + original + "'");
        dup[p] = true;
      }
      // apply the cycle after what we have so far
      std::array<std::uint8_t, 16> cyc{};
      for (unsigned k = 0; k < n; ++k) cyc[k] = static_cast<std::uint8_t>(k);
      for (std::size_t k = 0; k < points.size(); ++k)
        cyc[points[k]] = static_cast<std::uint8_t>(points[(k + 1) % points.size()]);
      for (unsigned k = 0; k < n; ++k) perm[k] = cyc[perm[k]];
      pos = close + 1;
      any = true;
    }
    if (!any) fail(ErrorCode::ParseError, "empty permutation literal");
    const auto idx = find({perm.data(), n});
    if (!idx) fail(ErrorCode::ParseError, "'" + original + "' is not an even permutation of degree " + std::to_string(n));
    return *idx;
  }

  Elem parse_matrix(std::string_view text, const std::string& original) const {
    std::vector<unsigned> values;
    std::size_t i = 0;
    while (i < text.size()) {
      const char ch = text[i];
      if (ch == '[' || ch == ']' || ch == ',' || ch == ' ') {
        ++i;
        continue;
      }
      unsigned v = 0;
      auto [ptr, ec] = std::from_chars(text.data() + i, text.data() + text.size(), v);
      if (ec != std::errc()) fail(ErrorCode::ParseError, "bad matrix entry in '" + original + "'");
      if (v >= field_->order()) fail(ErrorCode::ParseError, "entry out of field range in '" + original + "'");
      values.push_back(v);
      i = static_cast<std::size_t>(ptr - text.data());
    }
    const unsigned d = dimension();
    if (values.size() != d * d) fail(ErrorCode::ParseError, "expected a " + std::to_string(d) + "x" + std::to_string(d) + " matrix: '" + original + "'");
    Mat m{d, {}};
    for (unsigned k = 0; k < d * d; ++k) m.a[k] = static_cast<std::uint8_t>(values[k]);
    const auto idx = find_matrix(m);
    if (!idx) fail(ErrorCode::ParseError, "'" + original + "' is not in " + spec_.to_string());
    return *idx;
  }

  void enumerate_permutations() {
    const unsigned n = spec_.parameter;
    width_ = n;
    bits_ = 4;
    std::vector<std::uint8_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::uint8_t{0});
    codes_.reserve(std::size_t(order_) * n);
    do {
      if (is_even(perm)) codes_.insert(codes_.end(), perm.begin(), perm.end());
    } while (std::next_permutation(perm.begin(), perm.end()));
    identity_position_ = 0;
  }

  void enumerate_matrices() {
    const unsigned d = spec_.dimension();
    const unsigned q = field_->order();
    width_ = d * d;
    bits_ = std::max(1u, static_cast<unsigned>(std::bit_width(q - 1)));
    // det of a canonical representative must be a d-th power
    std::vector<bool> admissible(q, false);
    for (unsigned x = 1; x < q; ++x) admissible[field_->pow(static_cast<std::uint8_t>(x), d)] = true;

    codes_.reserve(std::size_t(order_) * width_);
    std::vector<std::uint8_t> row(d, 0);
    const unsigned rest = width_ - d;
    auto next = [q](std::span<std::uint8_t> digits) {
      for (std::size_t i = digits.size(); i-- > 0;) {
        if (++digits[i] < q) return true;
        digits[i] = 0;
      }
      return false;
    };
    do {
      auto lead = std::find_if(row.begin(), row.end(), [](auto v) { return v != 0; });
      if (lead == row.end() || *lead != 1) continue;
      std::vector<std::uint8_t> tail(rest, 0);
      Mat m{d, {}};
      for (unsigned k = 0; k < d; ++k) m.a[k] = row[k];
      do {
        for (unsigned k = 0; k < rest; ++k) m.a[d + k] = tail[k];
        const auto det = mat::determinant(*field_, m);
        if (det != 0 && admissible[det]) codes_.insert(codes_.end(), m.a.begin(), m.a.begin() + width_);
      } while (next(tail));
    } while (next(row));

    const std::size_t count = codes_.size() / width_;
    sorted_keys_.resize(count);
    for (std::size_t i = 0; i < count; ++i) sorted_keys_[i] = pack({codes_.data() + i * width_, width_});
    const Mat id = Mat::identity(d);
    const auto id_key = pack(id.entries());
    identity_position_ = static_cast<Elem>(std::lower_bound(sorted_keys_.begin(), sorted_keys_.end(), id_key) - sorted_keys_.begin());
    std::swap_ranges(codes_.begin(), codes_.begin() + width_, codes_.begin() + std::size_t(identity_position_) * width_);
  }

  void build_inverses() {
    inverse_.resize(order_);
    for (Elem a = 0; a < order_; ++a) {
      const auto c = code(a);
      if (is_permutation_group()) {
        std::array<std::uint8_t, 16> inv{};
        for (unsigned i = 0; i < width_; ++i) inv[c[i]] = static_cast<std::uint8_t>(i);
        inverse_[a] = permutation_index({inv.data(), width_});
      } else {
        const auto m = mat::inverse(*field_, Mat::from(c, dimension()));
        inverse_[a] = *find(mat::canonical(*field_, *m).entries());
      }
    }
  }

  void build_table() {
    table_.resize(std::size_t(order_) * order_);
    for (Elem b = 0; b < order_; ++b)
      for (Elem a = 0; a < order_; ++a) table_[std::size_t(b) * order_ + a] = static_cast<std::uint16_t>(compute_product(a, b));
  }

  GroupSpec spec_;
  Elem order_ = 0;
  unsigned width_ = 0;
  unsigned bits_ = 0;
  std::optional<Field> field_;
  std::vector<std::uint8_t> codes_;
  std::vector<std::uint64_t> sorted_keys_;
  Elem identity_position_ = 0;
  std::vector<Elem> inverse_;
  // table_[b * order + a] = a * b, so right translation by b reads one row
  std::vector<std::uint16_t> table_;
};

inline std::shared_ptr<const GroupContext> build_context(const GroupSpec& spec, const BuildOptions& options) {
  const std::uint64_t order = expected_order(spec);
  if (order > options.max_order)
    fail(ErrorCode::TooLarge, spec.to_string() + " has order " + (order == UINT64_MAX ? std::string("> 2^64") : std::to_string(order)) +
                                  " above the cap " + std::to_string(options.max_order));
  if (spec.is_alternating() && spec.parameter > 15)
    fail(ErrorCode::TooLarge, "degree above 15 is not supported");

  std::shared_ptr<GroupContext> ctx(new GroupContext());
  ctx->spec_ = spec;
  ctx->order_ = static_cast<Elem>(order);
  if (spec.is_alternating()) {
    ctx->enumerate_permutations();
  } else {
    ctx->field_.emplace(spec.parameter);
    ctx->enumerate_matrices();
  }
  if (ctx->codes_.size() != std::size_t(order) * ctx->width_)
    throw std::logic_error("enumeration of " + spec.to_string() + " produced the wrong number of elements");
  ctx->build_inverses();
  if (order <= options.table_max_order && order * order * 2 <= options.table_bytes) ctx->build_table();
  return ctx;
}

/// Process-wide cache of contexts built with default options.
inline std::shared_ptr<const GroupContext> shared_context(const GroupSpec& spec) {
  static std::mutex mutex;
  static std::map<std::string, std::shared_ptr<const GroupContext>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[spec.to_string()];
  if (!slot) slot = build_context(spec, BuildOptions::from_environment());
  return slot;
}

}  // namespace produkt
