#pragma once

// Small integer helpers shared by every module.

#include <cstdint>
#include <numeric>
#include <vector>

namespace charlab {

using u32 = std::uint32_t;
using u64 = std::uint64_t;
using i64 = std::int64_t;

bool is_prime(u64 n);

// Distinct prime divisors in increasing order.
std::vector<u64> prime_factors(u64 n);

std::vector<u64> divisors(u64 n);

u64 ipow(u64 base, unsigned exp);

// Returns 0 when base^exp exceeds `limit`; otherwise base^exp.
u64 ipow_capped(u64 base, unsigned exp, u64 limit);

u64 mulmod(u64 a, u64 b, u64 m);
u64 powmod(u64 base, u64 exp, u64 m);

inline u64 lcm_u64(u64 a, u64 b) { return a / std::gcd(a, b) * b; }

// Exact nonnegative rational with reduced numerator/denominator.
struct Rational {
  u64 num = 0;
  u64 den = 1;

  static Rational make(u64 n, u64 d) {
    const u64 g = std::gcd(n, d);
    return g == 0 ? Rational{0, 1} : Rational{n / g, d / g};
  }
  double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }
  friend bool operator==(const Rational&, const Rational&) = default;
};

}  // namespace charlab
