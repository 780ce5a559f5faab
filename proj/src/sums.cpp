#include "charlab/sums.hpp"

#include <cmath>

#include "charlab/error.hpp"

namespace charlab {

namespace {

void require_gm(const Character& chi, const char* what) {
  const auto& g = chi.structure()->model();
  if (g.kind() != GroupKind::Gm || g.width() != 1) {
    throw Error(ErrorKind::ModelMismatch, std::string(what) + ": expects a character of Gm, got " + g.name());
  }
}

// chi at every point index, through one root table.
std::vector<cplx> character_values(const Character& chi) {
  const auto& s = *chi.structure();
  const auto roots = roots_of_unity(s.exponent());
  std::vector<cplx> out(s.order());
  std::vector<u64> a(s.rank());
  for (u64 i = 0; i < s.order(); ++i) {
    s.exps_of_index(i, a);
    out[i] = roots[chi.phase_units(a)];
  }
  return out;
}

// point index of every nonzero field code on Gm(k_n)
std::vector<u64> gm_index_of_code(const AbelianStructure& s) {
  std::vector<u64> out(s.order() + 1, 0);
  for (u64 i = 0; i < s.order(); ++i) out[s.point(i).coords[0]] = i;
  return out;
}

}  // namespace

Character standard_additive_character(const TowerPtr& tower, unsigned base_degree, unsigned level) {
  const auto ga = GroupModel::ga(tower, base_degree);
  const auto s = group_structure(ga, level);
  const auto& f = *ga.field(level);
  std::vector<u64> exps;
  for (const auto& gen : s->generators()) exps.push_back(f.trace(gen.coords[0], 1));
  return Character(s, std::move(exps));
}

std::vector<cplx> psi_table(const Field& f) {
  const auto roots = roots_of_unity(f.p());
  std::vector<cplx> out(f.size());
  for (u32 x = 0; x < f.size(); ++x) out[x] = roots[f.trace(x, 1)];
  return out;
}

cplx gauss_sum(const Character& chi) {
  require_gm(chi, "gauss_sum");
  const auto& s = *chi.structure();
  const auto psi = psi_table(*s.model().field(s.level()));
  const auto vals = character_values(chi);
  KahanSum acc;
  for (u64 i = 0; i < s.order(); ++i) acc.add(vals[i] * psi[s.point(i).coords[0]]);
  return acc.value();
}

cplx jacobi_sum(const Character& chi1, const Character& chi2) {
  require_gm(chi1, "jacobi_sum");
  require_gm(chi2, "jacobi_sum");
  if (chi1.structure() != chi2.structure()) throw Error(ErrorKind::LevelMismatch, "jacobi_sum: characters differ in level");
  const auto& s = *chi1.structure();
  const auto& f = *s.model().field(s.level());
  const auto v1 = character_values(chi1), v2 = character_values(chi2);
  const auto idx = gm_index_of_code(s);
  KahanSum acc;
  for (u32 x = 2; x < f.size(); ++x) {
    const u32 y = f.sub(1, x);
    if (y == 0) continue;
    acc.add(v1[idx[x]] * v2[idx[y]]);
  }
  return acc.value();
}

cplx kloosterman2(const Field& f, u32 a) {
  const auto psi = psi_table(f);
  KahanSum acc;
  for (u32 x = 1; x < f.size(); ++x) acc.add(psi[f.add(x, f.div(a, x))]);
  return acc.value();
}

std::vector<cplx> kloosterman2_prime(u32 p) {
  std::vector<u64> inv(p, 0);
  inv[1] = 1;
  for (u64 i = 2; i < p; ++i) inv[i] = (p - (p / i) * inv[p % i] % p) % p;
  const auto roots = roots_of_unity(p);
  std::vector<cplx> out(p, 0);
  for (u64 a = 1; a < p; ++a) {
    KahanSum acc;
    for (u64 x = 1; x < p; ++x) acc.add(roots[(x + a * inv[x]) % p]);
    out[a] = acc.value();
  }
  return out;
}

TraceFunction kloosterman_table(const GroupModel& gm, unsigned level, unsigned r) {
  if (r < 1) throw Error(ErrorKind::ConfigError, "kloosterman: rank must be at least 1");
  const auto s = group_structure(gm, level);
  const auto& f = *gm.field(level);
  const auto psi = psi_table(f);
  TraceFunction base = TraceFunction::from(s, [&](const Point& x) { return psi[x.coords[0]]; });
  if (r == 1) return base;
  TraceFunction out = TraceFunction::zeros(s);
  if (r == 2) {
    for (u64 i = 0; i < s->order(); ++i) {
      const u32 a = s->point(i).coords[0];
      KahanSum acc;
      for (u32 x = 1; x < f.size(); ++x) acc.add(psi[f.add(x, f.div(a, x))]);
      out.values[i] = acc.value();
    }
  } else {
    out = base;
    for (unsigned j = 1; j < r; ++j) out = convolve(out, base);
  }
  out.weight = static_cast<int>(r) - 1;
  return out;
}

TraceFunction hypergeometric_direct(const std::vector<Character>& chis) {
  if (chis.empty()) throw Error(ErrorKind::ConfigError, "hypergeometric: needs at least one character");
  for (const auto& c : chis) {
    require_gm(c, "hypergeometric");
    if (c.structure() != chis.front().structure()) {
      throw Error(ErrorKind::LevelMismatch, "hypergeometric: characters at different levels");
    }
  }
  const auto s = chis.front().structure();
  const auto& f = *s->model().field(s->level());
  const auto psi = psi_table(f);
  const auto idx = gm_index_of_code(*s);
  std::vector<std::vector<cplx>> vals;
  for (const auto& c : chis) vals.push_back(character_values(c));
  const u64 n = s->order();
  const std::size_t r = chis.size();

  std::vector<KahanSum> acc(n);
  std::vector<u64> tuple(r, 0);  // point indices
  while (true) {
    u32 prod = 1, sum = 0;
    cplx term = 1;
    for (std::size_t i = 0; i < r; ++i) {
      const u32 x = s->point(tuple[i]).coords[0];
      prod = f.mul(prod, x);
      sum = f.add(sum, x);
      term *= vals[i][tuple[i]];
    }
    acc[idx[prod]].add(term * psi[sum]);
    std::size_t pos = r;
    while (pos > 0 && ++tuple[pos - 1] == n) tuple[--pos] = 0;
    if (pos == 0) break;
  }
  TraceFunction out = TraceFunction::zeros(s);
  for (u64 i = 0; i < n; ++i) out.values[i] = acc[i].value();
  out.weight = static_cast<int>(r) - 1;
  return out;
}

TraceFunction hypergeometric_convolution(const std::vector<Character>& chis) {
  if (chis.empty()) throw Error(ErrorKind::ConfigError, "hypergeometric: needs at least one character");
  const auto s = chis.front().structure();
  const GroupModel& gm = s->model();
  const auto& f = *gm.field(s->level());
  const auto psi = psi_table(f);
  const TraceFunction psi_fn = TraceFunction::from(s, [&](const Point& x) { return psi[x.coords[0]]; });
  TraceFunction acc = twist(psi_fn, chis.front());
  const auto gm2 = GroupModel::product({gm, gm});
  const auto s2 = group_structure(gm2, s->level());
  const auto mult = GroupHom::multiplication(gm2);
  const u64 n = s->order();
  for (std::size_t i = 1; i < chis.size(); ++i) {
    if (chis[i].structure() != s) throw Error(ErrorKind::LevelMismatch, "hypergeometric: characters at different levels");
    const TraceFunction next = twist(psi_fn, chis[i]);
    TraceFunction outer = TraceFunction::zeros(s2);
    for (u64 x = 0; x < n; ++x) {
      for (u64 y = 0; y < n; ++y) outer.values[x * n + y] = acc.values[x] * next.values[y];
    }
    acc = pushforward(outer, mult);
  }
  acc.weight = static_cast<int>(chis.size()) - 1;
  return acc;
}

SumFamily SumFamily::gauss() {
  SumFamily f;
  f.name = "gauss";
  f.kind = FamilyKind::Gauss;
  f.weight = 1;
  f.norm_coeff = {1, 2};
  f.sign = -1;
  f.normalizable = true;
  f.note = "psi on Gm; its Mellin transform at chi is the Gauss sum g(chi)";
  return f;
}

SumFamily SumFamily::kloosterman(unsigned r) {
  SumFamily f;
  f.name = "kloosterman" + std::to_string(r);
  f.kind = FamilyKind::Kloosterman;
  f.variables = r;
  f.weight = static_cast<int>(r) - 1;
  f.norm_coeff = Rational::make(r, 2);
  f.sign = -1;
  f.normalizable = true;
  f.note = "Kl_r on Gm; Mellin transform g(chi)^r";
  return f;
}

SumFamily SumFamily::hypergeometric(std::vector<Character> chis) {
  SumFamily f;
  f.name = "hypergeometric";
  f.kind = FamilyKind::Hypergeometric;
  f.variables = static_cast<unsigned>(chis.size());
  f.chis = std::move(chis);
  f.weight = static_cast<int>(f.variables) - 1;
  f.norm_coeff = Rational::make(f.variables, 2);
  f.sign = -1;
  f.normalizable = true;
  f.note = "Mellin transform prod_i g(chi chi_i)";
  return f;
}

SumFamily SumFamily::separable_additive(unsigned d) {
  SumFamily f;
  f.name = "separable" + std::to_string(d);
  f.kind = FamilyKind::SeparableAdditive;
  f.variables = d;
  f.weight = 0;
  f.norm_coeff = {d, 1};
  f.sign = 1;
  f.normalizable = true;
  f.note = "psi(x_1) ... psi(x_d) on Ga^d; Fourier transform is a single spike of height q^{dn}";
  return f;
}

SumFamily SumFamily::custom(std::string name, int weight) {
  SumFamily f;
  f.name = std::move(name);
  f.weight = weight;
  return f;
}

TraceFunction family_values(const SumFamily& fam, const TowerPtr& tower, unsigned base_degree, unsigned level) {
  const auto gm = GroupModel::gm(tower, base_degree);
  switch (fam.kind) {
    case FamilyKind::Gauss: {
      const auto s = group_structure(gm, level);
      const auto psi = psi_table(*gm.field(level));
      auto out = TraceFunction::from(s, [&](const Point& x) { return psi[x.coords[0]]; });
      out.weight = fam.weight;
      return out;
    }
    case FamilyKind::Kloosterman:
      return kloosterman_table(gm, level, fam.variables);
    case FamilyKind::Hypergeometric:
      return hypergeometric_direct(fam.chis);
    case FamilyKind::SeparableAdditive: {
      const auto ga = GroupModel::ga(tower, base_degree, fam.variables);
      const auto s = group_structure(ga, level);
      const auto psi = psi_table(*ga.field(level));
      auto out = TraceFunction::from(s, [&](const Point& x) {
        cplx v = 1;
        for (u32 c : x.coords) v *= psi[c];
        return v;
      });
      out.weight = fam.weight;
      return out;
    }
    case FamilyKind::Custom:
      break;
  }
  throw Error(ErrorKind::UnknownWeight, "family " + fam.name + " has no built-in values");
}

TraceFunction normalize(const TraceFunction& raw, const SumFamily& fam) {
  if (!fam.normalizable) throw Error(ErrorKind::UnknownWeight, "family " + fam.name + " has no normalization rule");
  const double q = static_cast<double>(raw.model().q());
  const unsigned n = raw.level();
  const double e = static_cast<double>(fam.norm_coeff.num * n) / static_cast<double>(fam.norm_coeff.den);
  const double scale = fam.sign * std::pow(q, -e);
  TraceFunction out = raw;
  for (auto& v : out.values) v *= scale;
  out.weight = 0;
  out.norm_exp = Rational::make(fam.norm_coeff.num * n, fam.norm_coeff.den);
  return out;
}

}  // namespace charlab
