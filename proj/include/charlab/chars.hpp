#pragma once

// Characters of G(k_n) with exact phases, the dual group, functoriality,
// the Frobenius action, compatible systems along traces and cosets of
// pullback subgroups (with densities and Frobenius descent).

#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "charlab/abelian.hpp"

namespace charlab {

// chi(x) = exp(2 pi i sum b_i a_i / d_i) for x with exponents a.
class Character {
 public:
  Character(StructurePtr structure, std::vector<u64> exps);
  static Character trivial(StructurePtr structure);
  static Character from_code(StructurePtr structure, u64 code);

  const StructurePtr& structure() const { return structure_; }
  const std::vector<u64>& exps() const { return exps_; }
  unsigned level() const { return structure_->level(); }
  u64 code() const { return structure_->code(exps_); }

  // Numerator of the phase over structure()->exponent().
  u64 phase_units(std::span<const u64> point_exps) const;
  u64 phase_units_at(const Point& x) const;
  Rational phase(const Point& x) const;
  std::complex<double> value(const Point& x) const;

  u64 order() const;
  bool is_trivial() const;
  Character inverse() const;
  friend Character operator*(const Character& a, const Character& b);
  friend bool operator==(const Character& a, const Character& b);

 private:
  StructurePtr structure_;
  std::vector<u64> exps_;
};

// Every character, ordered by code (lexicographic exponents).
std::vector<Character> dual_group(const StructurePtr& structure);

// Linear map on duals chi' -> chi' o phi induced by a point homomorphism
// phi: G -> G'. Evaluated on generators of G only.
class DualMap {
 public:
  DualMap(StructurePtr source, StructurePtr target, const std::function<Point(const Point&)>& phi);

  // exps on G' -> exps on G
  std::vector<u64> apply(std::span<const u64> target_exps) const;
  u64 apply_code(u64 target_code) const;
  Character operator()(const Character& chi) const;

  const StructurePtr& source() const { return source_; }
  const StructurePtr& target() const { return target_; }

 private:
  StructurePtr source_;
  StructurePtr target_;
  std::vector<u64> images_;  // dlog of phi(g_i), rank(source) x rank(target)
};

// (f* chi)(x) = chi(f(x)); chi lives on the target of f.
Character pullback(const Character& chi, const GroupHom& f);

// (Fr* chi)(x) = chi(Fr_k(x)).
Character frobenius_on_char(const Character& chi);
std::vector<Character> fixed_characters(const StructurePtr& structure);

// chi(Tr_{m -> n}(g)) for chi at level n, g at level m.
Rational char_sheaf_trace(const Character& chi, const Point& g);

class CharacterSystem {
 public:
  // chi_m = chi o Tr_{m -> n} for every requested level m (multiples of n).
  static CharacterSystem from_base(const Character& chi, std::vector<unsigned> levels);
  CharacterSystem(std::vector<unsigned> levels, std::vector<Character> chars);

  const std::vector<unsigned>& levels() const { return levels_; }
  const Character& at(unsigned level) const;
  // chi_m == chi_n o Tr at every stored pair n | m.
  bool compatible() const;

 private:
  std::vector<unsigned> levels_;
  std::vector<Character> chars_;
};

// Sum over G(k_n) of chi as an exact multiset of phases; zero test is exact.
struct OrthogonalityCheck {
  u64 characters = 0;
  u64 nontrivial_zero = 0;
  bool trivial_sum_is_order = false;
  bool all_zero() const { return nontrivial_zero + 1 == characters; }
};
OrthogonalityCheck check_orthogonality(const StructurePtr& structure);

// Whether sum_j hist[j] zeta_L^j vanishes (L = hist.size()), exactly.
bool root_sum_is_zero(const std::vector<i64>& hist);

// base * f*(dual of G'(k_n)) inside the dual of G(k_n).
class CharCoset {
 public:
  static CharCoset make(const Character& base, const GroupHom& f);
  // Coset given by an explicit subgroup of codes; `codim` is declared.
  static CharCoset from_subgroup(const Character& base, std::vector<u64> subgroup, unsigned codim,
                                 std::string descriptor);
  static CharCoset full(const StructurePtr& structure);
  static CharCoset point(const Character& chi);

  unsigned level() const { return base_.level(); }
  const Character& base() const { return base_; }
  const StructurePtr& structure() const { return base_.structure(); }
  unsigned declared_codim() const { return codim_; }
  const std::string& descriptor() const { return descriptor_; }
  // Sorted codes of the subgroup.
  const std::vector<u64>& subgroup() const { return subgroup_; }
  u64 size() const { return subgroup_.size(); }

  bool contains(const Character& chi) const;
  bool contains_code(u64 code) const;
  // Sorted codes of the coset itself.
  std::vector<u64> members() const;
  Rational density() const;
  bool frobenius_stable() const;

 private:
  CharCoset(Character base, std::vector<u64> subgroup, unsigned codim, std::string descriptor);

  Character base_;
  std::vector<u64> subgroup_;
  unsigned codim_ = 0;
  std::string descriptor_;
};

// Empty when the cosets are disjoint. The declared codim is the larger one.
std::optional<CharCoset> coset_intersect(const CharCoset& a, const CharCoset& b);

struct DescentResult {
  std::optional<Character> witness;
  // Fr* base / base, and its class modulo (Fr* - 1)(subgroup), as codes.
  u64 cocycle = 0;
  std::vector<u64> cocycle_class;
  u64 coboundaries = 0;
};

// Throws NotStable unless Fr*(coset) = coset.
DescentResult descend_coset(const CharCoset& coset);

// Dual of the Lang sequence at levels n | m:
// 0 -> dual G(k_n) -Tr*-> dual G(k_m) -(Fr^n - 1)*-> dual G(k_m) -res-> dual G(k_n) -> 0
struct DualLangCheck {
  bool trace_injective = false;
  bool image_is_kernel = false;       // im Tr* = ker (Fr^n - 1)*
  bool lang_image_is_kernel = false;  // im (Fr^n - 1)* = ker res
  bool restriction_surjective = false;
  bool exact() const { return trace_injective && image_is_kernel && lang_image_is_kernel && restriction_surjective; }
};
DualLangCheck check_dual_lang_sequence(const GroupModel& g, unsigned n, unsigned m);

}  // namespace charlab
