#pragma once

// Stratifications of the dual of G(k_n) by unions of character cosets, and
// the sup and density bookkeeping attached to them.

#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "charlab/transform.hpp"

namespace charlab {

inline constexpr unsigned kInfiniteCodim = std::numeric_limits<unsigned>::max();

struct Stratum {
  std::string label;
  std::vector<CharCoset> cosets;

  // Smallest declared codim among the cosets; kInfiniteCodim when empty.
  unsigned codim() const;
  // Membership flags over all character codes of `dual`.
  std::vector<char> mask(const StructurePtr& dual) const;
};

// Delta_0 = full dual, ..., Delta_r = empty, each contained in the previous.
class StratChain {
 public:
  // Throws CoverageGap when Delta_0 misses a character or Delta_r is nonempty,
  // NotNested when some Delta_{i+1} is not inside Delta_i.
  StratChain(StructurePtr dual, std::vector<Stratum> strata);

  const StructurePtr& dual() const { return dual_; }
  unsigned level() const { return dual_->level(); }
  std::size_t size() const { return strata_.size(); }
  const Stratum& stratum(std::size_t i) const { return strata_[i]; }
  // Largest i with chi in Delta_i, per character code.
  const std::vector<unsigned>& depth() const { return depth_; }
  u64 count(std::size_t i) const;

 private:
  StructurePtr dual_;
  std::vector<Stratum> strata_;
  std::vector<unsigned> depth_;
};

struct StratLevel {
  unsigned i = 0;
  std::string descriptor;
  unsigned codim = 0;
  u64 count = 0;              // |Delta_i|
  Rational density{0, 1};
  double bucket_sup = 0;      // over Delta_i minus Delta_{i+1}
  double sup_outside = 0;     // over characters not in Delta_{i+1}
  double bound = 0;           // C q^{n (i + offset) / 2}
  double ratio = 0;
  bool ok = true;
};

struct StratReport {
  unsigned level = 1;
  u64 q = 0;
  double constant = 4;
  int offset = 0;
  std::vector<StratLevel> rows;  // i = 0 .. r-1
  // sup_outside never decreases as i grows
  bool monotone = true;

  bool all_ok() const;
};

StratReport strat_report(const Spectrum& values, const StratChain& chain, double constant = 4, int offset = 0);

struct DensityPoint {
  unsigned n = 0;
  u64 count = 0;
  u64 total = 0;
  Rational density{0, 1};
  double predicted = 0;  // q^{-n codim}
};

struct DensitySeries {
  unsigned i = 0;
  unsigned codim = 0;
  std::vector<DensityPoint> points;
  double slope = 0;          // least-squares slope of log density against n
  double tail_slope = 0;     // log(d_N / d_{N-1})
  double expected_slope = 0;  // -codim log q
  double relative_error = 0;  // |slope - expected| / |expected|, or |slope| when expected is 0
};

struct DensityReport {
  u64 q = 0;
  std::vector<DensitySeries> series;
};

// `build(n)` gives the chain at level n; every level must have the same number of strata.
DensityReport density_report(const std::function<StratChain(unsigned)>& build, unsigned n_min, unsigned n_max);

}  // namespace charlab
