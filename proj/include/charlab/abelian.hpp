#pragma once

// Coordinatization of a finite abelian point group G(k_n) as a product of
// cyclic groups Z/d_1 x ... x Z/d_k, with a discrete-log table.
//
// Exponent vectors are encoded in mixed radix with the first exponent most
// significant; this code is also the canonical order of the dual group.

#include <memory>
#include <span>
#include <vector>

#include "charlab/group.hpp"

namespace charlab {

inline constexpr u64 kAnalyzeCap = 100'000;

class AbelianStructure;
using StructurePtr = std::shared_ptr<const AbelianStructure>;

class AbelianStructure {
 public:
  // Invariant factors by repeated extraction of a maximal-order element.
  // Throws NotClosed when the law leaves the set, SizeCap above `cap`.
  static StructurePtr analyze(std::shared_ptr<const PointGroup> group, u64 cap = kAnalyzeCap);
  // Kunneth: a model whose points split as consecutive coordinate blocks,
  // one block per part. Exponents concatenate.
  static StructurePtr product(GroupModel model, unsigned level, std::vector<StructurePtr> parts);

  const GroupModel& model() const { return model_; }
  unsigned level() const { return level_; }
  u64 order() const { return order_; }
  // Cyclic orders d_i; a divisibility chain unless built by product().
  const std::vector<u64>& factors() const { return factors_; }
  std::size_t rank() const { return factors_.size(); }
  // lcm of the d_i
  u64 exponent() const { return exponent_; }
  const std::vector<Point>& generators() const { return generators_; }
  bool is_product() const { return !parts_.empty(); }
  const std::vector<StructurePtr>& parts() const { return parts_; }

  // Invariant factors d_1 | d_2 | ... of the underlying group.
  std::vector<u64> invariant_factors() const;

  // Canonical (sorted) point order.
  Point point(u64 index) const;
  u64 index_of(const Point& x) const;
  void exps_of_index(u64 index, std::span<u64> out) const;
  std::vector<u64> dlog(const Point& x) const;
  Point element(std::span<const u64> exps) const;

  u64 code(std::span<const u64> exps) const;
  void decode(u64 code, std::span<u64> out) const;
  std::vector<u64> decode(u64 code) const;
  u64 code_of_index(u64 index) const;
  u64 index_of_code(u64 code) const;

  // dlog(x g_j) = dlog(x) + e_j for every point and generator, and dlog is
  // a bijection onto the exponent box.
  bool verify() const;

 private:
  AbelianStructure(GroupModel model, unsigned level) : model_(std::move(model)), level_(level) {}
  void finish();

  GroupModel model_;
  unsigned level_;
  u64 order_ = 1;
  u64 exponent_ = 1;
  std::vector<u64> factors_;
  std::vector<Point> generators_;

  // leaf
  std::shared_ptr<const PointGroup> group_;
  std::vector<u32> dlog_;  // order_ x rank, row per point index
  std::vector<u64> code_of_index_;
  std::vector<u64> index_of_code_;

  // product
  std::vector<StructurePtr> parts_;
  std::vector<std::size_t> coord_offsets_;
  std::vector<std::size_t> exp_offsets_;
};

// Cached structure of G(k_n); products and the d-fold models Ga^d, Gm^d are
// split into their factors.
StructurePtr group_structure(const GroupModel& g, unsigned level);

}  // namespace charlab
