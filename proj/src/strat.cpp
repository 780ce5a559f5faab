#include "charlab/strat.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "charlab/error.hpp"

namespace charlab {

unsigned Stratum::codim() const {
  unsigned c = kInfiniteCodim;
  for (const auto& s : cosets) c = std::min(c, s.declared_codim());
  return c;
}

std::vector<char> Stratum::mask(const StructurePtr& dual) const {
  std::vector<char> out(dual->order(), 0);
  for (const auto& c : cosets) {
    if (c.structure() != dual) throw Error(ErrorKind::LevelMismatch, "stratum " + label + " lives on another dual");
    for (u64 code : c.members()) out[code] = 1;
  }
  return out;
}

StratChain::StratChain(StructurePtr dual, std::vector<Stratum> strata)
    : dual_(std::move(dual)), strata_(std::move(strata)) {
  if (strata_.size() < 2) throw Error(ErrorKind::CoverageGap, "a chain needs the full dual and a final empty stratum");
  const u64 n = dual_->order();
  depth_.assign(n, 0);
  std::vector<char> prev;
  for (std::size_t i = 0; i < strata_.size(); ++i) {
    auto m = strata_[i].mask(dual_);
    if (i == 0) {
      const auto missing = std::count(m.begin(), m.end(), 0);
      if (missing) throw Error(ErrorKind::CoverageGap, std::to_string(missing) + " characters lie in no stratum");
    } else {
      for (u64 c = 0; c < n; ++c) {
        if (m[c] && !prev[c]) {
          throw Error(ErrorKind::NotNested, "character " + std::to_string(c) + " is in stratum " + std::to_string(i) +
                                                " but not in stratum " + std::to_string(i - 1));
        }
        if (m[c]) depth_[c] = static_cast<unsigned>(i);
      }
    }
    prev = std::move(m);
  }
  if (std::count(prev.begin(), prev.end(), 1)) throw Error(ErrorKind::CoverageGap, "the last stratum is not empty");
}

u64 StratChain::count(std::size_t i) const {
  return static_cast<u64>(std::count_if(depth_.begin(), depth_.end(), [i](unsigned d) { return d >= i; }));
}

bool StratReport::all_ok() const {
  return monotone && std::all_of(rows.begin(), rows.end(), [](const StratLevel& r) { return r.ok; });
}

StratReport strat_report(const Spectrum& values, const StratChain& chain, double constant, int offset) {
  if (values.domain != chain.dual() || values.values.size() != chain.dual()->order()) {
    throw Error(ErrorKind::CoverageGap, "values must cover the whole dual of the chain");
  }
  StratReport out;
  out.level = chain.level();
  out.q = chain.dual()->model().q();
  out.constant = constant;
  out.offset = offset;
  const auto& depth = chain.depth();
  const double qn = std::pow(static_cast<double>(out.q), static_cast<double>(out.level));
  for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
    StratLevel row;
    row.i = static_cast<unsigned>(i);
    row.descriptor = chain.stratum(i).label;
    row.codim = chain.stratum(i).codim();
    row.count = chain.count(i);
    row.density = Rational::make(row.count, chain.dual()->order());
    for (u64 c = 0; c < depth.size(); ++c) {
      const double v = std::abs(values.values[c]);
      if (depth[c] <= i) row.sup_outside = std::max(row.sup_outside, v);
      if (depth[c] == i) row.bucket_sup = std::max(row.bucket_sup, v);
    }
    row.bound = constant * std::pow(qn, (static_cast<double>(i) + offset) / 2);
    row.ratio = row.sup_outside / row.bound;
    row.ok = row.sup_outside <= row.bound;
    if (!out.rows.empty() && row.sup_outside < out.rows.back().sup_outside) out.monotone = false;
    out.rows.push_back(std::move(row));
  }
  return out;
}

DensityReport density_report(const std::function<StratChain(unsigned)>& build, unsigned n_min, unsigned n_max) {
  if (n_min == 0 || n_max < n_min) throw Error(ErrorKind::ConfigError, "density report needs 1 <= n_min <= n_max");
  std::vector<StratChain> chains;
  for (unsigned n = n_min; n <= n_max; ++n) {
    chains.push_back(build(n));
    if (chains.back().size() != chains.front().size()) {
      throw Error(ErrorKind::ConfigError, "chains at different levels have different lengths");
    }
  }
  DensityReport out;
  out.q = chains.front().dual()->model().q();
  const double logq = std::log(static_cast<double>(out.q));
  for (std::size_t i = 0; i + 1 < chains.front().size(); ++i) {
    DensitySeries s;
    s.i = static_cast<unsigned>(i);
    s.codim = chains.front().stratum(i).codim();
    std::vector<double> xs, ys;
    for (const auto& ch : chains) {
      DensityPoint pt;
      pt.n = ch.level();
      pt.count = ch.count(i);
      pt.total = ch.dual()->order();
      pt.density = Rational::make(pt.count, pt.total);
      pt.predicted = std::pow(static_cast<double>(out.q), -static_cast<double>(pt.n) * s.codim);
      if (pt.count) {
        xs.push_back(pt.n);
        ys.push_back(std::log(pt.density.to_double()));
      }
      s.points.push_back(pt);
    }
    s.expected_slope = -static_cast<double>(s.codim) * logq;
    if (xs.size() >= 2) {
      const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
      const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / ys.size();
      double sxy = 0, sxx = 0;
      for (std::size_t j = 0; j < xs.size(); ++j) {
        sxy += (xs[j] - mx) * (ys[j] - my);
        sxx += (xs[j] - mx) * (xs[j] - mx);
      }
      s.slope = sxy / sxx;
      s.tail_slope = (ys.back() - ys[ys.size() - 2]) / (xs.back() - xs[xs.size() - 2]);
    } else {
      s.slope = s.tail_slope = std::nan("");
    }
    s.relative_error = s.expected_slope == 0 ? std::abs(s.slope) : std::abs(s.slope - s.expected_slope) / std::abs(s.expected_slope);
    out.series.push_back(std::move(s));
  }
  return out;
}

}  // namespace charlab
