// Shared scalar/point types and small numeric utilities used across the library.
#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <cstring>
#include <limits>
#include <string_view>
#include <vector>

namespace ppt {

inline constexpr const char* kVersion = "0.1.0";

using Complex = std::complex<double>;
using Point = std::vector<Complex>;  // one coordinate per dimension

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();
inline constexpr double kPosInf = std::numeric_limits<double>::infinity();

inline Point real_point(std::initializer_list<double> xs) {
  Point p;
  p.reserve(xs.size());
  for (double x : xs) p.emplace_back(x, 0.0);
  return p;
}

inline bool point_is_real(const Point& p) {
  for (const auto& c : p)
    if (c.imag() != 0.0) return false;
  return true;
}

// Streaming log-sum-exp: value() = log(sum_k exp(x_k)) without overflow.
class LogSumExp {
 public:
  void add(double x) {
    if (x == kNegInf) return;
    if (x > max_) {
      if (max_ != kNegInf) sum_ = sum_ * std::exp(max_ - x);
      sum_ += 1.0;
      max_ = x;
    } else {
      sum_ += std::exp(x - max_);
    }
  }
  double value() const {
    if (max_ == kNegInf) return kNegInf;
    return max_ + std::log(sum_);
  }

 private:
  double max_ = kNegInf;
  double sum_ = 0.0;
};

// FNV-1a, 64-bit. Used for cache keys and output config hashes.
class Fnv1a {
 public:
  void bytes(const void* data, std::size_t len) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
      h_ ^= p[i];
      h_ *= 1099511628211ull;
    }
  }
  void u64(std::uint64_t v) { bytes(&v, sizeof v); }
  void i64(std::int64_t v) { bytes(&v, sizeof v); }
  void f64(double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    u64(bits);
  }
  void str(std::string_view s) { bytes(s.data(), s.size()); }
  std::uint64_t value() const { return h_; }

 private:
  std::uint64_t h_ = 14695981039346656037ull;
};

}  // namespace ppt
