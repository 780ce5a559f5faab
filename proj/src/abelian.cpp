#include "charlab/abelian.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <tuple>

#include "charlab/error.hpp"

namespace charlab {

namespace {

std::size_t pow_index(const PointGroup& g, std::size_t x, u64 e) {
  std::size_t acc = g.identity();
  while (e) {
    if (e & 1) acc = g.op(acc, x);
    e >>= 1;
    if (e) x = g.op(x, x);
  }
  return acc;
}

unsigned valuation(u64 n, u64 p) {
  unsigned v = 0;
  while (n % p == 0) {
    n /= p;
    ++v;
  }
  return v;
}

// Order of x modulo the subgroup marked in `in_h`; `bound` is a multiple of it.
u64 order_mod(const PointGroup& g, std::size_t x, u64 bound, const std::vector<i64>& hpos) {
  u64 t = bound;
  for (u64 p : prime_factors(bound)) {
    while (t % p == 0 && hpos[pow_index(g, x, t / p)] >= 0) t /= p;
  }
  return t;
}

}  // namespace

StructurePtr AbelianStructure::analyze(std::shared_ptr<const PointGroup> group, u64 cap) {
  const PointGroup& g = *group;
  const std::size_t n = g.size();
  if (n > cap) throw Error(ErrorKind::SizeCap, "analyze_group: " + std::to_string(n) + " points");

  // H = <g_1> x ... x <g_j>, extracted so far; hpos maps an element to its
  // slot in H, hexp holds the H-exponents per slot.
  std::vector<i64> hpos(n, -1);
  std::vector<std::size_t> helems{g.identity()};
  std::vector<std::vector<u32>> hexp{{}};
  hpos[g.identity()] = 0;
  std::vector<std::size_t> gens;
  std::vector<u64> orders;

  while (helems.size() < n) {
    const u64 quotient = n / helems.size();
    std::size_t best = g.identity();
    u64 best_ord = 1;
    for (std::size_t x = 0; x < n && best_ord < quotient; ++x) {
      if (hpos[x] >= 0 || hpos[pow_index(g, x, best_ord)] >= 0) continue;
      const u64 o = order_mod(g, x, quotient, hpos);
      u64 a_part = 1, b_part = 1;
      for (u64 p : prime_factors(lcm_u64(best_ord, o))) {
        const unsigned va = valuation(best_ord, p), vb = valuation(o, p);
        if (va >= vb) {
          a_part *= ipow(p, va);
        } else {
          b_part *= ipow(p, vb);
        }
      }
      best = g.op(pow_index(g, best, best_ord / a_part), pow_index(g, x, o / b_part));
      best_ord = a_part * b_part;
    }

    // Lift so that <best> meets H trivially.
    const std::size_t y = pow_index(g, best, best_ord);
    const auto& t = hexp[static_cast<std::size_t>(hpos[y])];
    for (std::size_t i = 0; i < gens.size(); ++i) {
      if (t[i] % best_ord != 0) throw Error(ErrorKind::NotClosed, "analyze_group: set is not an abelian group");
      const u64 c = (orders[i] - (t[i] / best_ord) % orders[i]) % orders[i];
      best = g.op(best, pow_index(g, gens[i], c));
    }
    if (pow_index(g, best, best_ord) != g.identity()) {
      throw Error(ErrorKind::NotClosed, "analyze_group: set is not an abelian group");
    }

    const std::size_t hsize = helems.size();
    for (auto& e : hexp) e.push_back(0);
    std::size_t step = best;
    for (u64 j = 1; j < best_ord; ++j) {
      for (std::size_t s = 0; s < hsize; ++s) {
        const std::size_t z = g.op(helems[s], step);
        if (hpos[z] >= 0) throw Error(ErrorKind::NotClosed, "analyze_group: set is not an abelian group");
        hpos[z] = static_cast<i64>(helems.size());
        helems.push_back(z);
        auto e = hexp[s];
        e.back() = static_cast<u32>(j);
        hexp.push_back(std::move(e));
      }
      step = g.op(step, best);
    }
    gens.push_back(best);
    orders.push_back(best_ord);
  }

  auto out = std::shared_ptr<AbelianStructure>(new AbelianStructure(group->model(), group->level()));
  const std::size_t k = gens.size();
  // extraction order is e_1 >= e_2 >= ...; store d_1 | d_2 | ...
  for (std::size_t i = 0; i < k; ++i) {
    out->factors_.push_back(orders[k - 1 - i]);
    out->generators_.push_back(g.point(gens[k - 1 - i]));
  }
  out->dlog_.resize(n * k);
  for (std::size_t x = 0; x < n; ++x) {
    const auto& e = hexp[static_cast<std::size_t>(hpos[x])];
    for (std::size_t i = 0; i < k; ++i) out->dlog_[x * k + i] = e[k - 1 - i];
  }
  out->group_ = std::move(group);
  out->finish();
  if (!out->verify()) throw Error(ErrorKind::NotClosed, "analyze_group: dlog is not a homomorphism");
  return out;
}

StructurePtr AbelianStructure::product(GroupModel model, unsigned level, std::vector<StructurePtr> parts) {
  auto out = std::shared_ptr<AbelianStructure>(new AbelianStructure(std::move(model), level));
  std::size_t coord = 0, exp = 0;
  const Point e = out->model_.identity(level);
  for (std::size_t i = 0; i < parts.size(); ++i) {
    const auto& part = *parts[i];
    out->coord_offsets_.push_back(coord);
    out->exp_offsets_.push_back(exp);
    out->factors_.insert(out->factors_.end(), part.factors().begin(), part.factors().end());
    for (const auto& gen : part.generators()) {
      Point full = e;
      std::copy(gen.coords.begin(), gen.coords.end(), full.coords.begin() + static_cast<std::ptrdiff_t>(coord));
      out->generators_.push_back(std::move(full));
    }
    coord += part.model().width();
    exp += part.rank();
  }
  if (coord != out->model_.width()) throw Error(ErrorKind::ModelMismatch, "product structure: widths disagree");
  out->parts_ = std::move(parts);
  out->finish();
  return out;
}

void AbelianStructure::finish() {
  order_ = 1;
  exponent_ = 1;
  for (u64 d : factors_) {
    order_ *= d;
    exponent_ = lcm_u64(exponent_, d);
  }
  if (group_) {
    code_of_index_.resize(order_);
    index_of_code_.assign(order_, 0);
    for (u64 i = 0; i < order_; ++i) {
      u64 c = 0;
      for (std::size_t j = 0; j < rank(); ++j) c = c * factors_[j] + dlog_[i * rank() + j];
      code_of_index_[i] = c;
      index_of_code_[c] = i;
    }
  }
}

std::vector<u64> AbelianStructure::invariant_factors() const {
  // Collect prime-power parts and reassemble the divisibility chain.
  std::map<u64, std::vector<u64>> powers;
  for (u64 d : factors_) {
    for (u64 p : prime_factors(d)) powers[p].push_back(ipow(p, valuation(d, p)));
  }
  std::size_t len = 0;
  for (auto& [p, v] : powers) {
    std::sort(v.begin(), v.end());
    len = std::max(len, v.size());
  }
  std::vector<u64> out(len, 1);
  for (auto& [p, v] : powers) {
    for (std::size_t i = 0; i < v.size(); ++i) out[len - v.size() + i] *= v[i];
  }
  return out;
}

Point AbelianStructure::point(u64 index) const {
  if (group_) return group_->point(index);
  Point out{level_, std::vector<u32>(model_.width())};
  for (std::size_t i = parts_.size(); i-- > 0;) {
    const auto& part = *parts_[i];
    const Point sub = part.point(index % part.order());
    index /= part.order();
    std::copy(sub.coords.begin(), sub.coords.end(), out.coords.begin() + static_cast<std::ptrdiff_t>(coord_offsets_[i]));
  }
  return out;
}

u64 AbelianStructure::index_of(const Point& x) const {
  if (group_) return group_->index_of(x.coords);
  u64 idx = 0;
  for (std::size_t i = 0; i < parts_.size(); ++i) {
    const auto& part = *parts_[i];
    const auto first = x.coords.begin() + static_cast<std::ptrdiff_t>(coord_offsets_[i]);
    Point sub{level_, {first, first + static_cast<std::ptrdiff_t>(part.model().width())}};
    idx = idx * part.order() + part.index_of(sub);
  }
  return idx;
}

void AbelianStructure::exps_of_index(u64 index, std::span<u64> out) const {
  decode(code_of_index(index), out);
}

std::vector<u64> AbelianStructure::dlog(const Point& x) const {
  std::vector<u64> out(rank());
  exps_of_index(index_of(x), out);
  return out;
}

Point AbelianStructure::element(std::span<const u64> exps) const { return point(index_of_code(code(exps))); }

u64 AbelianStructure::code(std::span<const u64> exps) const {
  u64 c = 0;
  for (std::size_t j = 0; j < rank(); ++j) c = c * factors_[j] + exps[j] % factors_[j];
  return c;
}

void AbelianStructure::decode(u64 code, std::span<u64> out) const {
  for (std::size_t j = rank(); j-- > 0;) {
    out[j] = code % factors_[j];
    code /= factors_[j];
  }
}

std::vector<u64> AbelianStructure::decode(u64 code) const {
  std::vector<u64> out(rank());
  decode(code, out);
  return out;
}

u64 AbelianStructure::code_of_index(u64 index) const {
  if (group_) return code_of_index_[index];
  // both index and code are part-major mixed radix with part orders as weights
  u64 c = 0;
  std::vector<u64> sub(parts_.size());
  for (std::size_t i = parts_.size(); i-- > 0;) {
    sub[i] = index % parts_[i]->order();
    index /= parts_[i]->order();
  }
  for (std::size_t i = 0; i < parts_.size(); ++i) c = c * parts_[i]->order() + parts_[i]->code_of_index(sub[i]);
  return c;
}

u64 AbelianStructure::index_of_code(u64 code) const {
  if (group_) return index_of_code_[code];
  u64 idx = 0;
  std::vector<u64> sub(parts_.size());
  for (std::size_t i = parts_.size(); i-- > 0;) {
    sub[i] = code % parts_[i]->order();
    code /= parts_[i]->order();
  }
  for (std::size_t i = 0; i < parts_.size(); ++i) idx = idx * parts_[i]->order() + parts_[i]->index_of_code(sub[i]);
  return idx;
}

bool AbelianStructure::verify() const {
  if (!group_) {
    for (const auto& part : parts_) {
      if (!part->verify()) return false;
    }
    return true;
  }
  const PointGroup& g = *group_;
  const std::size_t k = rank();
  std::vector<char> seen(order_, 0);
  for (u64 i = 0; i < order_; ++i) {
    if (seen[code_of_index_[i]]) return false;
    seen[code_of_index_[i]] = 1;
  }
  for (std::size_t j = 0; j < k; ++j) {
    const std::size_t gj = g.index_of(generators_[j].coords);
    for (std::size_t x = 0; x < g.size(); ++x) {
      const std::size_t y = g.op(x, gj);
      for (std::size_t i = 0; i < k; ++i) {
        const u64 expect = (dlog_[x * k + i] + (i == j ? 1 : 0)) % factors_[i];
        if (dlog_[y * k + i] != expect) return false;
      }
    }
  }
  return true;
}

StructurePtr group_structure(const GroupModel& g, unsigned level) {
  using Key = std::tuple<std::string, const Tower*, unsigned, unsigned>;
  static std::mutex mu;
  static std::map<Key, StructurePtr> cache;
  const Key key{g.name(), g.tower().get(), g.base_degree(), level};
  {
    std::lock_guard lock(mu);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  StructurePtr out;
  if (g.kind() == GroupKind::Product && !g.factors().empty()) {
    std::vector<StructurePtr> parts;
    for (const auto& f : g.factors()) parts.push_back(group_structure(f, level));
    out = AbelianStructure::product(g, level, std::move(parts));
  } else if ((g.kind() == GroupKind::Ga || g.kind() == GroupKind::Gm) && g.width() > 1) {
    const GroupModel one = g.kind() == GroupKind::Ga ? GroupModel::ga(g.tower(), g.base_degree())
                                                     : GroupModel::gm(g.tower(), g.base_degree());
    std::vector<StructurePtr> parts(g.width(), group_structure(one, level));
    out = AbelianStructure::product(g, level, std::move(parts));
  } else {
    out = AbelianStructure::analyze(std::make_shared<const PointGroup>(g, level));
  }
  std::lock_guard lock(mu);
  return cache.emplace(key, out).first->second;
}

}  // namespace charlab
