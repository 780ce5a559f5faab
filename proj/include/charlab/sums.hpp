#pragma once

// Character sums over F_{q^n}: the standard additive character, Gauss,
// Jacobi, Kloosterman and hypergeometric sums, and the normalizations that
// bring each family to modulus one generically.

#include <string>
#include <vector>

#include "charlab/transform.hpp"

namespace charlab {

// psi(x) = exp(2 pi i Tr_{F_{q^n}/F_p}(x) / p) as a character of Ga(k_n).
Character standard_additive_character(const TowerPtr& tower, unsigned base_degree, unsigned level);

// psi on every element code of a field.
std::vector<cplx> psi_table(const Field& f);

// sum_{x != 0} chi(x) psi(x), chi a character of Gm(k_n).
cplx gauss_sum(const Character& chi);

// sum_{x != 0, 1} chi1(x) chi2(1 - x)
cplx jacobi_sum(const Character& chi1, const Character& chi2);

// Kl_2(a) = sum_{x != 0} psi(x + a/x) with a given as a field code.
cplx kloosterman2(const Field& f, u32 a);
// Kl_2(a; p) for a = 0..p-1 over a prime field (index 0 unused).
std::vector<cplx> kloosterman2_prime(u32 p);
// Kl_r on all of Gm(k_n) by iterated multiplicative convolution.
TraceFunction kloosterman_table(const GroupModel& gm, unsigned level, unsigned r);

// Hyp(a) = sum_{x_1...x_r = a} prod chi_i(x_i) psi(x_1 + ... + x_r), for every a.
TraceFunction hypergeometric_direct(const std::vector<Character>& chis);
// Same function as an iterated pushforward of chi_i psi along multiplication.
TraceFunction hypergeometric_convolution(const std::vector<Character>& chis);

enum class FamilyKind { Gauss, Kloosterman, Hypergeometric, SeparableAdditive, Custom };

struct SumFamily {
  std::string name;
  FamilyKind kind = FamilyKind::Custom;
  unsigned variables = 1;
  std::vector<Character> chis;  // hypergeometric parameters
  int weight = 0;
  // values are scaled by sign * q^{-norm_coeff * n}
  Rational norm_coeff{0, 1};
  int sign = 1;
  bool normalizable = false;
  std::string note;

  static SumFamily gauss();
  static SumFamily kloosterman(unsigned r = 2);
  static SumFamily hypergeometric(std::vector<Character> chis);
  static SumFamily separable_additive(unsigned d);
  static SumFamily custom(std::string name, int weight);
};

// Raw values of a family on its natural domain at level n: Gm(k_n) for the
// Gauss, Kloosterman and hypergeometric families, Ga^d(k_n) for the separable one.
TraceFunction family_values(const SumFamily& fam, const TowerPtr& tower, unsigned base_degree, unsigned level);

// Throws UnknownWeight when the family has no normalization rule.
TraceFunction normalize(const TraceFunction& raw, const SumFamily& fam);

}  // namespace charlab
