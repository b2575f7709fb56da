#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>

#include "produkt/field.hpp"

namespace produkt {

/// Square matrix of dimension d <= 3 over a small field, row-major.
struct Mat {
  unsigned dim = 0;
  std::array<std::uint8_t, 9> a{};

  std::uint8_t& at(unsigned r, unsigned c) { return a[r * dim + c]; }
  std::uint8_t at(unsigned r, unsigned c) const { return a[r * dim + c]; }
  std::span<const std::uint8_t> entries() const { return {a.data(), dim * dim}; }

  static Mat identity(unsigned d) {
    Mat m{d, {}};
    for (unsigned i = 0; i < d; ++i) m.at(i, i) = 1;
    return m;
  }
  static Mat from(std::span<const std::uint8_t> code, unsigned d) {
    Mat m{d, {}};
    for (unsigned i = 0; i < d * d; ++i) m.a[i] = code[i];
    return m;
  }
  friend bool operator==(const Mat& x, const Mat& y) {
    return x.dim == y.dim && x.a == y.a;
  }
};

namespace mat {

inline Mat multiply(const Field& f, const Mat& x, const Mat& y) {
  Mat out{x.dim, {}};
  const unsigned d = x.dim;
  for (unsigned r = 0; r < d; ++r)
    for (unsigned c = 0; c < d; ++c) {
      std::uint8_t s = 0;
      for (unsigned k = 0; k < d; ++k) s = f.add(s, f.mul(x.at(r, k), y.at(k, c)));
      out.at(r, c) = s;
    }
  return out;
}

inline Mat scale(const Field& f, const Mat& x, std::uint8_t lambda) {
  Mat out = x;
  for (unsigned i = 0; i < x.dim * x.dim; ++i) out.a[i] = f.mul(lambda, x.a[i]);
  return out;
}

inline Mat add(const Field& f, const Mat& x, const Mat& y) {
  Mat out = x;
  for (unsigned i = 0; i < x.dim * x.dim; ++i) out.a[i] = f.add(x.a[i], y.a[i]);
  return out;
}

inline Mat sub(const Field& f, const Mat& x, const Mat& y) {
  Mat out = x;
  for (unsigned i = 0; i < x.dim * x.dim; ++i) out.a[i] = f.sub(x.a[i], y.a[i]);
  return out;
}

inline bool is_zero(const Mat& x) {
  for (unsigned i = 0; i < x.dim * x.dim; ++i)
    if (x.a[i] != 0) return false;
  return true;
}

inline std::uint8_t determinant(const Field& f, const Mat& m) {
  if (m.dim == 1) return m.a[0];
  if (m.dim == 2) return f.sub(f.mul(m.at(0, 0), m.at(1, 1)), f.mul(m.at(0, 1), m.at(1, 0)));
  std::uint8_t det = 0;
  for (unsigned c = 0; c < 3; ++c) {
    const unsigned c1 = (c + 1) % 3, c2 = (c + 2) % 3;
    const auto minor = f.sub(f.mul(m.at(1, c1), m.at(2, c2)), f.mul(m.at(1, c2), m.at(2, c1)));
    det = f.add(det, f.mul(m.at(0, c), minor));
  }
  return det;
}

inline unsigned rank(const Field& f, Mat m) {
  const unsigned d = m.dim;
  unsigned r = 0;
  for (unsigned c = 0; c < d && r < d; ++c) {
    unsigned pivot = r;
    while (pivot < d && m.at(pivot, c) == 0) ++pivot;
    if (pivot == d) continue;
    for (unsigned k = 0; k < d; ++k) std::swap(m.at(r, k), m.at(pivot, k));
    const auto inv = f.inv(m.at(r, c));
    for (unsigned k = 0; k < d; ++k) m.at(r, k) = f.mul(m.at(r, k), inv);
    for (unsigned i = 0; i < d; ++i) {
      if (i == r || m.at(i, c) == 0) continue;
      const auto factor = m.at(i, c);
      for (unsigned k = 0; k < d; ++k) m.at(i, k) = f.sub(m.at(i, k), f.mul(factor, m.at(r, k)));
    }
    ++r;
  }
  return r;
}

/// Gauss-Jordan inverse; nothing when singular.
inline std::optional<Mat> inverse(const Field& f, const Mat& m) {
  const unsigned d = m.dim;
  Mat left = m;
  Mat right = Mat::identity(d);
  for (unsigned c = 0; c < d; ++c) {
    unsigned pivot = c;
    while (pivot < d && left.at(pivot, c) == 0) ++pivot;
    if (pivot == d) return std::nullopt;
    for (unsigned k = 0; k < d; ++k) {
      std::swap(left.at(c, k), left.at(pivot, k));
      std::swap(right.at(c, k), right.at(pivot, k));
    }
    const auto inv = f.inv(left.at(c, c));
    for (unsigned k = 0; k < d; ++k) {
      left.at(c, k) = f.mul(left.at(c, k), inv);
      right.at(c, k) = f.mul(right.at(c, k), inv);
    }
    for (unsigned i = 0; i < d; ++i) {
      if (i == c || left.at(i, c) == 0) continue;
      const auto factor = left.at(i, c);
      for (unsigned k = 0; k < d; ++k) {
        left.at(i, k) = f.sub(left.at(i, k), f.mul(factor, left.at(c, k)));
        right.at(i, k) = f.sub(right.at(i, k), f.mul(factor, right.at(c, k)));
      }
    }
  }
  return right;
}

/// Scales so that the first nonzero entry in row-major order is 1.
inline Mat canonical(const Field& f, const Mat& m) {
  for (unsigned i = 0; i < m.dim * m.dim; ++i)
    if (m.a[i] != 0) return scale(f, m, f.inv(m.a[i]));
  return m;
}

}  // namespace mat
}  // namespace produkt
