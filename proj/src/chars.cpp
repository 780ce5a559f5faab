#include "charlab/chars.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "charlab/error.hpp"

namespace charlab {

namespace {

void require_same(const StructurePtr& a, const StructurePtr& b, const char* what) {
  if (a != b && !(a->model() == b->model() && a->level() == b->level())) {
    throw Error(a->level() == b->level() ? ErrorKind::ModelMismatch : ErrorKind::LevelMismatch,
                std::string(what) + ": characters live on different groups");
  }
}

}  // namespace

Character::Character(StructurePtr structure, std::vector<u64> exps)
    : structure_(std::move(structure)), exps_(std::move(exps)) {
  if (exps_.size() != structure_->rank()) throw Error(ErrorKind::ModelMismatch, "character: wrong number of exponents");
  for (std::size_t i = 0; i < exps_.size(); ++i) exps_[i] %= structure_->factors()[i];
}

Character Character::trivial(StructurePtr structure) {
  const std::size_t k = structure->rank();
  return Character(std::move(structure), std::vector<u64>(k, 0));
}

Character Character::from_code(StructurePtr structure, u64 code) {
  auto exps = structure->decode(code);
  return Character(std::move(structure), std::move(exps));
}

u64 Character::phase_units(std::span<const u64> a) const {
  const u64 L = structure_->exponent();
  const auto& d = structure_->factors();
  u64 acc = 0;
  for (std::size_t i = 0; i < exps_.size(); ++i) {
    acc = (acc + mulmod(mulmod(exps_[i], a[i], L), L / d[i], L)) % L;
  }
  return acc;
}

u64 Character::phase_units_at(const Point& x) const { return phase_units(structure_->dlog(x)); }

Rational Character::phase(const Point& x) const { return Rational::make(phase_units_at(x), structure_->exponent()); }

std::complex<double> Character::value(const Point& x) const {
  const Rational r = phase(x);
  return std::polar(1.0, 2 * std::numbers::pi * r.to_double());
}

u64 Character::order() const {
  u64 o = 1;
  for (std::size_t i = 0; i < exps_.size(); ++i) {
    const u64 d = structure_->factors()[i];
    o = lcm_u64(o, d / std::gcd(exps_[i], d));
  }
  return o;
}

bool Character::is_trivial() const {
  return std::all_of(exps_.begin(), exps_.end(), [](u64 b) { return b == 0; });
}

Character Character::inverse() const {
  std::vector<u64> e(exps_.size());
  for (std::size_t i = 0; i < e.size(); ++i) e[i] = (structure_->factors()[i] - exps_[i]) % structure_->factors()[i];
  return Character(structure_, std::move(e));
}

Character operator*(const Character& a, const Character& b) {
  require_same(a.structure_, b.structure_, "character product");
  std::vector<u64> e(a.exps_.size());
  for (std::size_t i = 0; i < e.size(); ++i) e[i] = a.exps_[i] + b.exps_[i];
  return Character(a.structure_, std::move(e));
}

bool operator==(const Character& a, const Character& b) {
  return (a.structure_ == b.structure_ || (a.structure_->model() == b.structure_->model() &&
                                           a.structure_->level() == b.structure_->level())) &&
         a.exps_ == b.exps_;
}

std::vector<Character> dual_group(const StructurePtr& structure) {
  std::vector<Character> out;
  out.reserve(structure->order());
  for (u64 c = 0; c < structure->order(); ++c) out.push_back(Character::from_code(structure, c));
  return out;
}

DualMap::DualMap(StructurePtr source, StructurePtr target, const std::function<Point(const Point&)>& phi)
    : source_(std::move(source)), target_(std::move(target)) {
  for (const auto& gen : source_->generators()) {
    const auto e = target_->dlog(phi(gen));
    images_.insert(images_.end(), e.begin(), e.end());
  }
}

std::vector<u64> DualMap::apply(std::span<const u64> target_exps) const {
  const Character chi(target_, {target_exps.begin(), target_exps.end()});
  const std::size_t kt = target_->rank();
  const u64 L = target_->exponent();
  std::vector<u64> out(source_->rank());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const u64 units = chi.phase_units(std::span<const u64>(images_.data() + i * kt, kt));
    const u64 d = source_->factors()[i];
    const unsigned __int128 scaled = static_cast<unsigned __int128>(units) * d;
    if (scaled % L != 0) throw Error(ErrorKind::NotClosed, "dual map: point map is not a homomorphism");
    out[i] = static_cast<u64>(scaled / L) % d;
  }
  return out;
}

u64 DualMap::apply_code(u64 target_code) const {
  return source_->code(apply(target_->decode(target_code)));
}

Character DualMap::operator()(const Character& chi) const {
  require_same(chi.structure(), target_, "dual map");
  return Character(source_, apply(chi.exps()));
}

Character pullback(const Character& chi, const GroupHom& f) {
  const unsigned n = chi.level();
  if (!(chi.structure()->model() == f.target())) throw Error(ErrorKind::ModelMismatch, "pullback: " + f.name());
  if (!f.defined_at(n)) throw Error(ErrorKind::LevelMismatch, "pullback: " + f.name() + " undefined at this level");
  const DualMap map(group_structure(f.source(), n), chi.structure(), [&](const Point& x) { return f.apply(x); });
  return map(chi);
}

namespace {

DualMap frobenius_map(const StructurePtr& s) {
  const GroupModel& g = s->model();
  return DualMap(s, s, [&](const Point& x) { return g.frobenius(x, 1); });
}

}  // namespace

Character frobenius_on_char(const Character& chi) { return frobenius_map(chi.structure())(chi); }

std::vector<Character> fixed_characters(const StructurePtr& structure) {
  const DualMap fr = frobenius_map(structure);
  std::vector<Character> out;
  for (u64 c = 0; c < structure->order(); ++c) {
    if (fr.apply_code(c) == c) out.push_back(Character::from_code(structure, c));
  }
  return out;
}

Rational char_sheaf_trace(const Character& chi, const Point& g) {
  const unsigned n = chi.level();
  if (g.level % n != 0) throw Error(ErrorKind::NonDivisor, "char_sheaf_trace: level of chi must divide level of g");
  return chi.phase(trace_map(chi.structure()->model(), g, n));
}

CharacterSystem CharacterSystem::from_base(const Character& chi, std::vector<unsigned> levels) {
  const unsigned n0 = chi.level();
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  if (!std::binary_search(levels.begin(), levels.end(), n0)) levels.insert(levels.begin(), n0);
  const GroupModel& g = chi.structure()->model();
  std::vector<Character> chars;
  for (unsigned m : levels) {
    if (m % n0 != 0) throw Error(ErrorKind::NonDivisor, "character system: levels must be multiples of the base");
    const DualMap map(group_structure(g, m), chi.structure(), [&](const Point& x) { return trace_map(g, x, n0); });
    chars.push_back(map(chi));
  }
  return CharacterSystem(std::move(levels), std::move(chars));
}

CharacterSystem::CharacterSystem(std::vector<unsigned> levels, std::vector<Character> chars)
    : levels_(std::move(levels)), chars_(std::move(chars)) {
  if (levels_.size() != chars_.size() || levels_.empty()) {
    throw Error(ErrorKind::LevelMismatch, "character system: one character per level");
  }
  const unsigned n0 = *std::min_element(levels_.begin(), levels_.end());
  for (unsigned m : levels_) {
    for (u64 d : divisors(m)) {
      if (d % n0 == 0 && std::find(levels_.begin(), levels_.end(), d) == levels_.end()) {
        throw Error(ErrorKind::NonDivisor, "character system: levels are not divisibility-closed");
      }
    }
  }
  for (std::size_t i = 0; i < levels_.size(); ++i) {
    if (chars_[i].level() != levels_[i]) throw Error(ErrorKind::LevelMismatch, "character system: level mismatch");
  }
}

const Character& CharacterSystem::at(unsigned level) const {
  for (std::size_t i = 0; i < levels_.size(); ++i) {
    if (levels_[i] == level) return chars_[i];
  }
  throw Error(ErrorKind::LevelMismatch, "character system: no level " + std::to_string(level));
}

bool CharacterSystem::compatible() const {
  constexpr u64 kExhaustive = 20'000;
  for (std::size_t i = 0; i < levels_.size(); ++i) {
    for (std::size_t j = 0; j < levels_.size(); ++j) {
      const unsigned n = levels_[i], m = levels_[j];
      if (n == m || m % n != 0) continue;
      const auto& sm = chars_[j].structure();
      const GroupModel& g = sm->model();
      auto check = [&](const Point& x) { return chars_[j].phase(x) == chars_[i].phase(trace_map(g, x, n)); };
      if (sm->order() <= kExhaustive) {
        for (u64 k = 0; k < sm->order(); ++k) {
          if (!check(sm->point(k))) return false;
        }
      } else {
        for (const auto& gen : sm->generators()) {
          if (!check(gen)) return false;
        }
      }
    }
  }
  return true;
}

namespace {

// Coefficients of the L-th cyclotomic polynomial, low to high.
std::vector<i64> cyclotomic(u64 L) {
  std::vector<i64> poly{1};
  std::vector<u64> up, down;
  for (u64 d : divisors(L)) {
    u64 r = L / d;
    int mu = 1;
    for (u64 p : prime_factors(r)) {
      if ((r / p) % p == 0) mu = 0;
      mu = -mu;
    }
    if (mu == 1) up.push_back(d);
    if (mu == -1) down.push_back(d);
  }
  for (u64 d : up) {  // multiply by t^d - 1
    std::vector<i64> next(poly.size() + d, 0);
    for (std::size_t i = 0; i < poly.size(); ++i) {
      next[i + d] += poly[i];
      next[i] -= poly[i];
    }
    poly = std::move(next);
  }
  for (u64 d : down) {  // exact division by t^d - 1
    const std::size_t deg = poly.size() - 1;
    std::vector<i64> q(deg - d + 1, 0);
    std::vector<i64> rem = poly;
    for (std::size_t i = deg; i + 1 > d; --i) {
      const i64 c = rem[i];
      q[i - d] = c;
      rem[i] -= c;
      rem[i - d] += c;
      if (i == d) break;
    }
    poly = std::move(q);
  }
  return poly;
}

}  // namespace

bool root_sum_is_zero(const std::vector<i64>& hist) {
  const u64 L = hist.size();
  if (L == 0) return true;
  const auto phi = cyclotomic(L);
  std::vector<i64> rem = hist;
  const std::size_t deg = phi.size() - 1;
  for (std::size_t i = rem.size(); i-- > deg;) {
    const i64 c = rem[i];
    if (c == 0) continue;
    for (std::size_t j = 0; j <= deg; ++j) {
      i64 prod = 0;
      if (__builtin_mul_overflow(c, phi[j], &prod) || __builtin_sub_overflow(rem[i - deg + j], prod, &rem[i - deg + j])) {
        throw Error(ErrorKind::SizeCap, "root_sum_is_zero: coefficient overflow");
      }
    }
  }
  return std::all_of(rem.begin(), rem.end(), [](i64 c) { return c == 0; });
}

OrthogonalityCheck check_orthogonality(const StructurePtr& s) {
  const u64 n = s->order();
  const u64 L = s->exponent();
  const std::size_t k = s->rank();
  std::vector<u64> table(n * k);
  for (u64 i = 0; i < n; ++i) s->exps_of_index(i, std::span<u64>(table.data() + i * k, k));

  OrthogonalityCheck out;
  std::vector<i64> hist(L, 0);
  for (u64 c = 0; c < n; ++c) {
    const Character chi = Character::from_code(s, c);
    std::fill(hist.begin(), hist.end(), 0);
    for (u64 i = 0; i < n; ++i) ++hist[chi.phase_units(std::span<const u64>(table.data() + i * k, k))];
    ++out.characters;
    if (chi.is_trivial()) {
      out.trivial_sum_is_order = hist[0] == static_cast<i64>(n);
      continue;
    }
    // A uniform multiset on the o-th roots of unity, o > 1, sums to zero.
    const u64 o = chi.order();
    const i64 each = static_cast<i64>(n / o);
    bool uniform = o > 1;
    for (u64 j = 0; j < L && uniform; ++j) uniform = hist[j] == ((j % (L / o)) == 0 ? each : 0);
    if (uniform || root_sum_is_zero(hist)) ++out.nontrivial_zero;
  }
  return out;
}

CharCoset::CharCoset(Character base, std::vector<u64> subgroup, unsigned codim, std::string descriptor)
    : base_(std::move(base)), subgroup_(std::move(subgroup)), codim_(codim), descriptor_(std::move(descriptor)) {}

CharCoset CharCoset::make(const Character& base, const GroupHom& f) {
  const unsigned n = base.level();
  if (!(base.structure()->model() == f.source())) throw Error(ErrorKind::ModelMismatch, "coset: " + f.name());
  if (!f.defined_at(n)) throw Error(ErrorKind::LevelMismatch, "coset: " + f.name() + " undefined at this level");
  const auto target = group_structure(f.target(), n);
  const DualMap map(base.structure(), target, [&](const Point& x) { return f.apply(x); });
  std::vector<u64> sub;
  sub.reserve(target->order());
  for (u64 c = 0; c < target->order(); ++c) sub.push_back(map.apply_code(c));
  std::sort(sub.begin(), sub.end());
  sub.erase(std::unique(sub.begin(), sub.end()), sub.end());
  return CharCoset(base, std::move(sub), f.kernel_dims().character_dim(), f.name());
}

CharCoset CharCoset::from_subgroup(const Character& base, std::vector<u64> subgroup, unsigned codim,
                                   std::string descriptor) {
  std::sort(subgroup.begin(), subgroup.end());
  subgroup.erase(std::unique(subgroup.begin(), subgroup.end()), subgroup.end());
  const auto& s = base.structure();
  if (subgroup.empty() || subgroup.front() != 0) throw Error(ErrorKind::NotClosed, "coset: subgroup lacks the identity");
  std::vector<u64> a(s->rank()), b(s->rank());
  for (u64 x : subgroup) {
    s->decode(x, a);
    for (u64 y : subgroup) {
      s->decode(y, b);
      for (std::size_t i = 0; i < a.size(); ++i) b[i] += a[i];
      if (!std::binary_search(subgroup.begin(), subgroup.end(), s->code(b))) {
        throw Error(ErrorKind::NotClosed, "coset: subgroup is not closed");
      }
    }
  }
  return CharCoset(base, std::move(subgroup), codim, std::move(descriptor));
}

CharCoset CharCoset::full(const StructurePtr& structure) {
  return make(Character::trivial(structure), GroupHom::identity(structure->model()));
}

CharCoset CharCoset::point(const Character& chi) {
  return make(chi, GroupHom::to_trivial(chi.structure()->model()));
}

bool CharCoset::contains_code(u64 code) const {
  const auto& s = structure();
  auto e = s->decode(code);
  for (std::size_t i = 0; i < e.size(); ++i) e[i] += s->factors()[i] - base_.exps()[i];
  return std::binary_search(subgroup_.begin(), subgroup_.end(), s->code(e));
}

bool CharCoset::contains(const Character& chi) const {
  require_same(chi.structure(), structure(), "coset membership");
  return contains_code(chi.code());
}

std::vector<u64> CharCoset::members() const {
  const auto& s = structure();
  std::vector<u64> out;
  out.reserve(subgroup_.size());
  std::vector<u64> e(s->rank());
  for (u64 c : subgroup_) {
    s->decode(c, e);
    for (std::size_t i = 0; i < e.size(); ++i) e[i] += base_.exps()[i];
    out.push_back(s->code(e));
  }
  std::sort(out.begin(), out.end());
  return out;
}

Rational CharCoset::density() const { return Rational::make(subgroup_.size(), structure()->order()); }

bool CharCoset::frobenius_stable() const {
  const DualMap fr = frobenius_map(structure());
  for (u64 c : members()) {
    if (!contains_code(fr.apply_code(c))) return false;
  }
  return true;
}

std::optional<CharCoset> coset_intersect(const CharCoset& a, const CharCoset& b) {
  require_same(a.structure(), b.structure(), "coset_intersect");
  std::vector<u64> common;
  for (u64 c : a.members()) {
    if (b.contains_code(c)) common.push_back(c);
  }
  if (common.empty()) return std::nullopt;
  std::vector<u64> sub;
  std::set_intersection(a.subgroup().begin(), a.subgroup().end(), b.subgroup().begin(), b.subgroup().end(),
                        std::back_inserter(sub));
  return CharCoset::from_subgroup(Character::from_code(a.structure(), common.front()), std::move(sub),
                                  std::max(a.declared_codim(), b.declared_codim()),
                                  "(" + a.descriptor() + ") & (" + b.descriptor() + ")");
}

DescentResult descend_coset(const CharCoset& coset) {
  if (!coset.frobenius_stable()) throw Error(ErrorKind::NotStable, "descend_coset: coset is not Frobenius-stable");
  const auto& s = coset.structure();
  const DualMap fr = frobenius_map(s);
  DescentResult out;
  for (u64 c : coset.members()) {
    if (fr.apply_code(c) == c) {
      out.witness = Character::from_code(s, c);
      break;
    }
  }
  const Character& base = coset.base();
  out.cocycle = (fr(base) * base.inverse()).code();
  std::vector<u64> boundaries;
  for (u64 c : coset.subgroup()) {
    const Character x = Character::from_code(s, c);
    boundaries.push_back((fr(x) * x.inverse()).code());
  }
  std::sort(boundaries.begin(), boundaries.end());
  boundaries.erase(std::unique(boundaries.begin(), boundaries.end()), boundaries.end());
  out.coboundaries = boundaries.size();
  const Character cocycle = Character::from_code(s, out.cocycle);
  for (u64 c : boundaries) out.cocycle_class.push_back((cocycle * Character::from_code(s, c)).code());
  std::sort(out.cocycle_class.begin(), out.cocycle_class.end());
  return out;
}

DualLangCheck check_dual_lang_sequence(const GroupModel& g, unsigned n, unsigned m) {
  if (m % n != 0) throw Error(ErrorKind::NonDivisor, "dual lang sequence: n must divide m");
  const auto an = group_structure(g, n);
  const auto am = group_structure(g, m);
  const DualMap tr(am, an, [&](const Point& x) { return trace_map(g, x, n); });
  const DualMap lang(am, am, [&](const Point& x) { return lang_map(g, x, n); });
  const DualMap res(an, am, [&](const Point& x) { return g.embed(x, m); });

  std::vector<u64> tr_image, lang_kernel, lang_image, res_kernel, res_image;
  for (u64 c = 0; c < an->order(); ++c) tr_image.push_back(tr.apply_code(c));
  for (u64 c = 0; c < am->order(); ++c) {
    const u64 l = lang.apply_code(c);
    if (l == 0) lang_kernel.push_back(c);
    lang_image.push_back(l);
    const u64 r = res.apply_code(c);
    if (r == 0) res_kernel.push_back(c);
    res_image.push_back(r);
  }
  auto normalize = [](std::vector<u64>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  };
  normalize(tr_image);
  normalize(lang_image);
  normalize(res_image);

  DualLangCheck out;
  out.trace_injective = tr_image.size() == an->order();
  out.image_is_kernel = tr_image == lang_kernel;
  out.lang_image_is_kernel = lang_image == res_kernel;
  out.restriction_surjective = res_image.size() == an->order();
  return out;
}

}  // namespace charlab
