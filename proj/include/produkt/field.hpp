#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "produkt/error.hpp"

namespace produkt {

struct PrimePower {
  unsigned prime;
  unsigned exponent;
};

/// Returns p, k with q = p^k, or nothing when q is not a prime power.
inline std::optional<PrimePower> factor_prime_power(unsigned q) {
  if (q < 2) return std::nullopt;
  unsigned p = 0;
  for (unsigned d = 2; d * d <= q; ++d) {
    if (q % d == 0) {
      p = d;
      break;
    }
  }
  if (p == 0) return PrimePower{q, 1};
  unsigned k = 0;
  while (q % p == 0) {
    q /= p;
    ++k;
  }
  if (q != 1) return std::nullopt;
  return PrimePower{p, k};
}

/// Conway polynomials for the non-prime fields we support. Coefficients are
/// listed from x^0 up to x^(k-1); the polynomial is monic of degree k.
struct ConwayEntry {
  unsigned prime;
  unsigned degree;
  std::array<std::uint8_t, 8> low;
};

inline constexpr std::array<ConwayEntry, 16> kConwayPolynomials{{
    {2, 2, {1, 1}},                    // x^2 + x + 1
    {2, 3, {1, 1, 0}},                 // x^3 + x + 1
    {2, 4, {1, 1, 0, 0}},              // x^4 + x + 1
    {2, 5, {1, 0, 1, 0, 0}},           // x^5 + x^2 + 1
    {2, 6, {1, 1, 0, 1, 1, 0}},        // x^6 + x^4 + x^3 + x + 1
    {2, 7, {1, 1, 0, 0, 0, 0, 0}},     // x^7 + x + 1
    {2, 8, {1, 0, 1, 1, 1, 0, 0, 0}},  // x^8 + x^4 + x^3 + x^2 + 1
    {3, 2, {2, 2}},                    // x^2 + 2x + 2
    {3, 3, {1, 2, 0}},                 // x^3 + 2x + 1
    {3, 4, {2, 0, 0, 2}},              // x^4 + 2x^3 + 2
    {3, 5, {1, 2, 0, 0, 0}},           // x^5 + 2x + 1
    {5, 2, {2, 4}},                    // x^2 + 4x + 2
    {5, 3, {3, 3, 0}},                 // x^3 + 3x + 3
    {7, 2, {3, 6}},                    // x^2 + 6x + 3
    {11, 2, {2, 7}},                   // x^2 + 7x + 2
    {13, 2, {2, 12}},                  // x^2 + 12x + 2
}};

/// Finite field F_q, q < 256. Elements are the integers 0..q-1 read as
/// base-p coefficient vectors (least significant digit = constant term).
/// All arithmetic goes through precomputed q x q tables.
class Field {
 public:
  explicit Field(unsigned q) : q_(q) {
    const auto pp = factor_prime_power(q);
    if (!pp) fail(ErrorCode::NotPrimePower, std::to_string(q) + " is not a prime power");
    if (q > 255) fail(ErrorCode::TooLarge, "field order " + std::to_string(q) + " exceeds 255");
    p_ = pp->prime;
    k_ = pp->exponent;
    if (k_ > 1) {
      const ConwayEntry* entry = nullptr;
      for (const auto& e : kConwayPolynomials)
        if (e.prime == p_ && e.degree == k_) entry = &e;
      if (entry == nullptr)
        fail(ErrorCode::NotPrimePower, "no field polynomial tabulated for q = " + std::to_string(q));
      modulus_.assign(entry->low.begin(), entry->low.begin() + k_);
    }
    build_tables();
  }

  unsigned order() const { return q_; }
  unsigned characteristic() const { return p_; }
  unsigned degree() const { return k_; }
  /// Low coefficients of the defining polynomial (empty for prime fields).
  const std::vector<std::uint8_t>& modulus() const { return modulus_; }

  std::uint8_t add(std::uint8_t a, std::uint8_t b) const { return add_[a * q_ + b]; }
  std::uint8_t sub(std::uint8_t a, std::uint8_t b) const { return add_[a * q_ + neg_[b]]; }
  std::uint8_t mul(std::uint8_t a, std::uint8_t b) const { return mul_[a * q_ + b]; }
  std::uint8_t neg(std::uint8_t a) const { return neg_[a]; }
  std::uint8_t inv(std::uint8_t a) const {
    if (a == 0) fail(ErrorCode::BadParameter, "inverse of zero");
    return inv_[a];
  }
  std::uint8_t pow(std::uint8_t a, unsigned e) const {
    std::uint8_t r = 1;
    while (e--) r = mul(r, a);
    return r;
  }

 private:
  std::vector<unsigned> digits(unsigned a) const {
    std::vector<unsigned> d(k_, 0);
    for (unsigned i = 0; i < k_; ++i) {
      d[i] = a % p_;
      a /= p_;
    }
    return d;
  }
  unsigned from_digits(const std::vector<unsigned>& d) const {
    unsigned a = 0;
    for (unsigned i = k_; i-- > 0;) a = a * p_ + d[i];
    return a;
  }

  unsigned poly_mul(unsigned a, unsigned b) const {
    const auto da = digits(a);
    const auto db = digits(b);
    std::vector<unsigned> prod(2 * k_, 0);
    for (unsigned i = 0; i < k_; ++i)
      for (unsigned j = 0; j < k_; ++j) prod[i + j] = (prod[i + j] + da[i] * db[j]) % p_;
    // reduce using x^k = -(low coefficients)
    for (unsigned deg = 2 * k_ - 1; deg >= k_; --deg) {
      const unsigned c = prod[deg];
      if (c == 0) continue;
      prod[deg] = 0;
      for (unsigned i = 0; i < k_; ++i) {
        const unsigned sub = (c * modulus_[i]) % p_;
        prod[deg - k_ + i] = (prod[deg - k_ + i] + p_ - sub) % p_;
      }
    }
    prod.resize(k_);
    return from_digits(prod);
  }

  void build_tables() {
    add_.assign(q_ * q_, 0);
    mul_.assign(q_ * q_, 0);
    neg_.assign(q_, 0);
    inv_.assign(q_, 0);
    for (unsigned a = 0; a < q_; ++a) {
      const auto da = digits(a);
      for (unsigned b = 0; b < q_; ++b) {
        const auto db = digits(b);
        std::vector<unsigned> s(k_);
        for (unsigned i = 0; i < k_; ++i) s[i] = (da[i] + db[i]) % p_;
        add_[a * q_ + b] = static_cast<std::uint8_t>(from_digits(s));
        mul_[a * q_ + b] = static_cast<std::uint8_t>(k_ == 1 ? (a * b) % p_ : poly_mul(a, b));
      }
    }
    for (unsigned a = 0; a < q_; ++a)
      for (unsigned b = 0; b < q_; ++b) {
        if (add_[a * q_ + b] == 0) neg_[a] = static_cast<std::uint8_t>(b);
        if (mul_[a * q_ + b] == 1) inv_[a] = static_cast<std::uint8_t>(b);
      }
    // a reducible modulus shows up as a nonzero element without inverse
    for (unsigned a = 1; a < q_; ++a)
      if (mul_[a * q_ + inv_[a]] != 1)
        fail(ErrorCode::NotPrimePower, "tabulated polynomial for q = " + std::to_string(q_) + " is reducible");
  }

  unsigned q_;
  unsigned p_ = 0;
  unsigned k_ = 0;
  std::vector<std::uint8_t> modulus_;
  std::vector<std::uint8_t> add_, mul_, neg_, inv_;
};

}  // namespace produkt
