#pragma once

// Finite fields F_{p^n} in polynomial basis, with a deterministic modulus,
// Frobenius, relative trace/norm and a tower object holding compatible
// embeddings between all subfields of a fixed top field.
//
// Elements are addressed by their code: the base-p integer whose digits are
// the polynomial-basis coefficients (constant term least significant). The
// prime subfield is exactly the codes 0..p-1.

#include <memory>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "charlab/arith.hpp"

namespace charlab {

inline constexpr u64 kFieldSizeCap = u64{1} << 24;

// Effective cap, adjustable downward only.
u64 field_size_cap();
void set_field_size_cap(u64 cap);

class Field;
using FieldPtr = std::shared_ptr<const Field>;

// Monic irreducibility test over F_p; `poly` is low-to-high with a leading 1.
bool is_irreducible(std::span<const u32> poly, u32 p);

// First monic irreducible of degree n, ordering candidates by the integer
// sum_{i<n} c_i p^i of their non-leading coefficients.
std::vector<u32> smallest_irreducible(u32 p, unsigned n);

class Field {
 public:
  // Prefer make_field(); this constructor trusts `modulus`.
  Field(u32 p, unsigned n, std::vector<u32> modulus);

  u32 p() const { return p_; }
  unsigned degree() const { return n_; }
  u32 size() const { return size_; }
  const std::vector<u32>& modulus() const { return modulus_; }

  u32 add(u32 a, u32 b) const;
  u32 neg(u32 a) const;
  u32 sub(u32 a, u32 b) const { return add(a, neg(b)); }
  u32 mul(u32 a, u32 b) const;
  u32 inv(u32 a) const;  // a != 0
  u32 div(u32 a, u32 b) const { return mul(a, inv(b)); }
  u32 pow(u32 a, u64 e) const;

  // a^{p^m}
  u32 frobenius(u32 a, unsigned m) const;
  // Sum / product of the orbit of Fr_{p^m}; m | degree().
  u32 trace(u32 a, unsigned m) const;
  u32 norm(u32 a, unsigned m) const;
  // True when a lies in the subfield with p^m elements.
  bool in_subfield(u32 a, unsigned m) const;

  // Image of an integer under Z -> F_p -> F.
  u32 from_int(i64 v) const;
  std::vector<u32> coeffs(u32 code) const;
  u32 from_coeffs(std::span<const u32> c) const;

  // Smallest-code generator of the multiplicative group.
  u32 generator() const { return generator_; }

  bool has_log_tables() const { return !exp_.empty(); }

 private:
  u32 poly_mul(u32 a, u32 b) const;
  void build_tables();
  u32 find_generator() const;

  u32 p_;
  unsigned n_;
  u32 size_;
  std::vector<u32> modulus_;
  std::vector<u32> digit_pow_;
  // Log/antilog/Zech tables, present when size() <= 2^16 and degree() > 1.
  std::vector<u32> log_;
  std::vector<u32> exp_;
  std::vector<i64> zech_;
  u32 generator_ = 1;
};

// Cached, deterministic field of order p^n. Throws NonPrime or SizeCap.
FieldPtr make_field(u32 p, unsigned n);

// Field with a caller-supplied modulus, not checked for irreducibility.
// Only used to inject faults in self-tests.
FieldPtr make_field_unchecked(u32 p, std::vector<u32> modulus);

// Value handle bundling an element code with its field.
class FieldElem {
 public:
  FieldElem(FieldPtr field, u32 code) : field_(std::move(field)), code_(code) {}

  const FieldPtr& field() const { return field_; }
  u32 code() const { return code_; }
  std::vector<u32> coeffs() const { return field_->coeffs(code_); }

  friend FieldElem operator+(const FieldElem& a, const FieldElem& b) {
    return {a.field_, a.field_->add(a.code_, b.code_)};
  }
  friend FieldElem operator-(const FieldElem& a, const FieldElem& b) {
    return {a.field_, a.field_->sub(a.code_, b.code_)};
  }
  friend FieldElem operator*(const FieldElem& a, const FieldElem& b) {
    return {a.field_, a.field_->mul(a.code_, b.code_)};
  }
  friend FieldElem operator/(const FieldElem& a, const FieldElem& b) {
    return {a.field_, a.field_->div(a.code_, b.code_)};
  }
  friend bool operator==(const FieldElem& a, const FieldElem& b) {
    return a.code_ == b.code_ && a.field_->size() == b.field_->size();
  }

 private:
  FieldPtr field_;
  u32 code_;
};

// Fr_{k_m}: x -> x^{p^m}; throws NonDivisor unless m | degree.
FieldElem frobenius(const FieldElem& x, unsigned m);
FieldElem abs_trace(const FieldElem& x, unsigned m);
FieldElem abs_norm(const FieldElem& x, unsigned m);

// All subfields of F_{p^top} with explicit embeddings. Embeddings are routed
// through the top field, so embed(r->n) o embed(m->r) == embed(m->n) holds by
// construction for every m | r | n.
class Tower {
 public:
  Tower(u32 p, unsigned top_degree);

  u32 p() const { return p_; }
  unsigned top_degree() const { return top_; }
  bool has_degree(unsigned d) const { return d > 0 && top_ % d == 0; }

  const FieldPtr& field(unsigned degree) const;

  // Embeds x in F_{p^from} into F_{p^to}; from | to.
  u32 embed(u32 x, unsigned from, unsigned to) const;
  // Inverse of embed: y in F_{p^from} viewed in F_{p^to} (to | from), or
  // nullopt when y is outside that subfield.
  std::optional<u32> restrict_to(u32 y, unsigned from, unsigned to) const;

 private:
  struct Level {
    FieldPtr field;
    std::vector<u32> to_top;                   // empty for the top level
    std::unordered_map<u32, u32> from_top;     // empty for the top level
  };
  const Level& level(unsigned d) const;
  u32 to_top(u32 x, unsigned d) const;

  u32 p_;
  unsigned top_;
  std::unordered_map<unsigned, Level> levels_;
};

using TowerPtr = std::shared_ptr<const Tower>;

// Cached tower; throws NonPrime, SizeCap.
TowerPtr make_tower(u32 p, unsigned top_degree);

}  // namespace charlab
