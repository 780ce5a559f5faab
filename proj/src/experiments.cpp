#include "charlab/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "charlab/equi.hpp"
#include "charlab/error.hpp"
#include "charlab/strat.hpp"
#include "charlab/sums.hpp"

namespace charlab {

using nlohmann::json;

namespace {

const std::vector<std::pair<ExperimentKind, std::string>> kKindNames = {
    {ExperimentKind::GroupInfo, "group-info"},         {ExperimentKind::CharTable, "char-table"},
    {ExperimentKind::LangCheck, "lang-check"},         {ExperimentKind::DftCheck, "dft-check"},
    {ExperimentKind::GaussEqui, "gauss-equi"},         {ExperimentKind::Kloosterman, "kloosterman"},
    {ExperimentKind::Hyp, "hyp"},                      {ExperimentKind::StratReport, "strat-report"},
    {ExperimentKind::DensityReport, "density-report"}, {ExperimentKind::DescendCoset, "descend-coset"},
};

const std::set<std::string> kFieldKeys = {"field.p", "field.base_degree", "field.n"};
const std::set<std::string> kGroupKeys = {"group.kind", "group.d", "group.r", "group.a", "group.b", "group.factors"};

std::set<std::string> keys(std::initializer_list<const std::set<std::string>*> sets,
                           std::initializer_list<const char*> extra) {
  std::set<std::string> out;
  for (const auto* s : sets) out.insert(s->begin(), s->end());
  out.insert(extra.begin(), extra.end());
  return out;
}

json cj(cplx z) { return json::array({z.real(), z.imag()}); }
std::string rat(const Rational& r) { return std::to_string(r.num) + "/" + std::to_string(r.den); }

json point_json(const Point& x) { return json(x.coords); }

std::string join(const std::vector<u64>& v, const char* sep) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? sep : "") + std::to_string(v[i]);
  return s;
}

// Context shared by every kind: base field, levels, tower.
struct Setup {
  u32 p = 0;
  unsigned e = 1;
  std::vector<unsigned> levels;
  TowerPtr tower;
  u64 q = 0;
};

Setup field_setup(const Config& cfg, std::vector<unsigned> levels, unsigned extra_level = 0) {
  Setup s;
  const u64 p = cfg.u("field.p");
  if (!is_prime(p) || p > 0xffffffffULL) throw Error(ErrorKind::ConfigError, "field.p must be a prime, got " + std::to_string(p));
  s.p = static_cast<u32>(p);
  s.e = static_cast<unsigned>(cfg.u("field.base_degree", 1));
  if (s.e == 0) throw Error(ErrorKind::ConfigError, "field.base_degree must be positive");
  s.levels = std::move(levels);
  u64 top = 1;
  for (unsigned n : s.levels) top = lcm_u64(top, n);
  if (extra_level) top = lcm_u64(top, extra_level);
  const u64 deg = top * s.e;
  if (deg > 64 || ipow_capped(p, static_cast<unsigned>(deg), field_size_cap()) == 0) {
    throw Error(ErrorKind::ConfigError, "tower F_" + std::to_string(p) + "^" + std::to_string(deg) +
                                            " exceeds the field size cap");
  }
  s.q = ipow(p, s.e);
  s.tower = make_tower(s.p, static_cast<unsigned>(deg));
  return s;
}

GroupModel simple_model(const std::string& kind, const Config& cfg, const Setup& s, bool top) {
  const unsigned d = top ? static_cast<unsigned>(cfg.u("group.d", 1)) : 1;
  if (kind == "ga") return GroupModel::ga(s.tower, s.e, d);
  if (kind == "gm") return GroupModel::gm(s.tower, s.e, d);
  if (kind == "mu") return GroupModel::mu(s.tower, s.e, cfg.u("group.r"));
  if (kind == "torus") return GroupModel::norm_one_torus(s.tower, s.e);
  if (kind == "elliptic") {
    return GroupModel::elliptic_curve(s.tower, s.e, static_cast<u32>(cfg.u("group.a")), static_cast<u32>(cfg.u("group.b")));
  }
  throw Error(ErrorKind::ConfigError, "unknown group kind '" + kind + "'");
}

GroupModel group_model(const Config& cfg, const Setup& s, const std::string& fallback) {
  const auto kind = cfg.str("group.kind", fallback);
  if (kind != "product") {
    if (cfg.has("group.factors")) throw Error(ErrorKind::ConfigError, "group.factors only applies to group.kind = product");
    return simple_model(kind, cfg, s, true);
  }
  std::vector<GroupModel> factors;
  std::stringstream ss(cfg.str("group.factors", "gm,gm"));
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(std::remove(item.begin(), item.end(), ' '), item.end());
    factors.push_back(simple_model(item, cfg, s, false));
  }
  return GroupModel::product(std::move(factors));
}

void require_levels(const GroupModel& g, const std::vector<unsigned>& levels) {
  for (unsigned n : levels) {
    if (g.estimated_order(n) > kPointCountCap) {
      throw Error(ErrorKind::ConfigError, g.name() + " at level " + std::to_string(n) + " is above the point cap");
    }
  }
}

unsigned single_level(const Config& cfg, unsigned fallback) {
  const auto lv = cfg.levels("field.n", fallback);
  if (lv.size() != 1) throw Error(ErrorKind::ConfigError, "field.n must be a single level for this experiment");
  return lv.front();
}

void add_check(Report& r, std::string name, const std::string& module, bool pass, std::string detail = {}) {
  r.checks.push_back({std::move(name), module, pass, false, std::move(detail)});
}

std::string sci(double v) {
  std::ostringstream o;
  o.precision(3);
  o << std::scientific << v;
  return o.str();
}

json dims_json(const GroupDims& d) {
  return {{"dim", d.dim}, {"toric", d.toric}, {"abelian", d.abelian}, {"unipotent", d.unipotent}};
}

// ---------------------------------------------------------------- group-info

void run_group_info(const Config& cfg, Report& r) {
  cfg.require_known(keys({&kFieldKeys, &kGroupKeys}, {}));
  const auto levels = cfg.levels("field.n", 1);
  const auto s = field_setup(cfg, levels);
  const auto g = group_model(cfg, s, "gm");
  require_levels(g, levels);
  r.payload["model"] = g.name();
  r.payload["q"] = s.q;
  r.payload["dims"] = dims_json(g.dims());
  r.payload["pi0"] = g.pi0();
  Table t{"structure", {"n", "order", "structure", "exponent", "pi0"}, {}};
  for (unsigned n : levels) {
    const auto a = group_structure(g, n);
    const auto inv = a->invariant_factors();
    json gens = json::array();
    for (const auto& x : a->generators()) gens.push_back(point_json(x));
    r.payload["levels"].push_back({{"n", n},
                                   {"order", a->order()},
                                   {"structure", inv},
                                   {"cyclic_orders", a->factors()},
                                   {"exponent", a->exponent()},
                                   {"rank", inv.size()},
                                   {"generators", gens},
                                   {"pi0", g.pi0()},
                                   {"connected", g.connected()}});
    t.rows.push_back({n, a->order(), join(inv, "x"), a->exponent(), g.pi0()});
    u64 prod = 1;
    for (u64 d : inv) prod *= d;
    add_check(r, "n=" + std::to_string(n) + ": discrete log coordinates are a bijection", "chars", a->verify());
    add_check(r, "n=" + std::to_string(n) + ": invariant factors multiply to the order", "chars", prod == a->order(),
              join(inv, "x") + " vs " + std::to_string(a->order()));
    bool chain = true;
    for (std::size_t i = 1; i < inv.size(); ++i) chain = chain && inv[i] % inv[i - 1] == 0;
    add_check(r, "n=" + std::to_string(n) + ": invariant factors form a divisibility chain", "chars", chain);
  }
  r.tables.push_back(std::move(t));
}

// ---------------------------------------------------------------- char-table

void run_char_table(const Config& cfg, Report& r) {
  cfg.require_known(keys({&kFieldKeys, &kGroupKeys}, {"table.max_points"}));
  const unsigned n = single_level(cfg, 1);
  const auto s = field_setup(cfg, {n});
  const auto g = group_model(cfg, s, "gm");
  const u64 cap = cfg.u("table.max_points", 256);
  require_levels(g, {n});
  const auto a = group_structure(g, n);
  if (a->order() > cap) {
    throw Error(ErrorKind::SizeCap, "character table of order " + std::to_string(a->order()) + " above table.max_points");
  }
  const auto dual = dual_group(a);
  r.payload["model"] = g.name();
  r.payload["n"] = n;
  r.payload["order"] = a->order();
  r.payload["exponent"] = a->exponent();
  r.payload["cyclic_orders"] = a->factors();
  for (u64 i = 0; i < a->order(); ++i) r.payload["points"].push_back(point_json(a->point(i)));
  Table t{"char_table", {"char_code", "point_index", "phase_num", "phase_den"}, {}};
  // dual orthogonality: sum over chi of chi(x) vanishes for x != identity
  std::vector<std::vector<i64>> column_hist(a->order(), std::vector<i64>(a->exponent(), 0));
  std::vector<u64> exps(a->rank());
  for (const auto& chi : dual) {
    json row = {{"code", chi.code()}, {"exps", chi.exps()}, {"order", chi.order()}};
    json phases = json::array();
    for (u64 i = 0; i < a->order(); ++i) {
      a->exps_of_index(i, exps);
      const u64 k = chi.phase_units(exps);
      const auto ph = Rational::make(k, a->exponent());
      phases.push_back(k);
      ++column_hist[i][k];
      t.rows.push_back({chi.code(), i, ph.num, ph.den});
    }
    row["phase_units"] = std::move(phases);
    r.payload["characters"].push_back(std::move(row));
  }
  const auto orth = check_orthogonality(a);
  add_check(r, "dual has |G| characters", "chars", dual.size() == a->order());
  add_check(r, "row orthogonality (exact)", "chars", orth.all_zero() && orth.trivial_sum_is_order,
            std::to_string(orth.nontrivial_zero) + " of " + std::to_string(orth.characters - 1) + " vanish");
  const u64 id = a->index_of(g.identity(n));
  bool cols = true;
  for (u64 i = 0; i < a->order(); ++i) {
    if (i != id) cols = cols && root_sum_is_zero(column_hist[i]);
  }
  add_check(r, "column orthogonality (exact)", "chars", cols);
  r.tables.push_back(std::move(t));
}

// ---------------------------------------------------------------- lang-check

void run_lang_check(const Config& cfg, Report& r) {
  cfg.require_known(keys({&kFieldKeys, &kGroupKeys}, {"lang.m", "lang.dual"}));
  const auto levels = cfg.levels("field.n", 1);
  const unsigned m = static_cast<unsigned>(cfg.u("lang.m"));
  for (unsigned n : levels) {
    if (m == 0 || m % n != 0) throw Error(ErrorKind::ConfigError, "lang.m must be a multiple of every level in field.n");
  }
  const auto s = field_setup(cfg, levels, m);
  const auto g = group_model(cfg, s, "gm");
  require_levels(g, {m});
  const bool dual = cfg.flag("lang.dual", true);
  r.payload["model"] = g.name();
  r.payload["connected"] = g.connected();
  Table t{"lang", {"n", "m", "order_n", "order_m", "lang_kernel", "lang_image", "trace_kernel", "trace_image",
                   "coinvariants", "order_1", "exact"}, {}};
  for (unsigned n : levels) {
    const auto c = check_lang_sequence(g, n, m);
    const std::string tag = "n=" + std::to_string(n) + ", m=" + std::to_string(m) + ": ";
    json row = {{"n", n},
                {"m", m},
                {"order_n", c.order_n},
                {"order_m", c.order_m},
                {"lang_kernel", c.lang_kernel},
                {"lang_image", c.lang_image},
                {"trace_kernel", c.trace_kernel},
                {"trace_image", c.trace_image},
                {"coinvariants", c.coinvariants},
                {"order_1", c.order_1},
                {"exact", c.exact()}};
    add_check(r, tag + "ker(Fr^n - 1) = G(k_n)", "groups", c.kernel_is_g_n);
    add_check(r, tag + "im(Fr^n - 1) = ker(Tr)", "groups", c.image_is_trace_kernel);
    add_check(r, tag + "Tr surjective", "groups", c.trace_surjective);
    add_check(r, tag + "coinvariants = |G(k)|", "groups", c.coinvariants == c.order_1,
              std::to_string(c.coinvariants) + " vs " + std::to_string(c.order_1));
    if (dual) {
      const auto d = check_dual_lang_sequence(g, n, m);
      row["dual"] = {{"trace_injective", d.trace_injective},
                     {"image_is_kernel", d.image_is_kernel},
                     {"lang_image_is_kernel", d.lang_image_is_kernel},
                     {"restriction_surjective", d.restriction_surjective}};
      add_check(r, tag + "dual sequence exact", "chars", d.exact());
    }
    t.rows.push_back({n, m, c.order_n, c.order_m, c.lang_kernel, c.lang_image, c.trace_kernel, c.trace_image,
                      c.coinvariants, c.order_1, c.exact()});
    r.payload["checks"].push_back(std::move(row));
  }
  r.tables.push_back(std::move(t));
}

// ---------------------------------------------------------------- dft-check

DftMethod parse_method(const std::string& m) {
  if (m == "auto") return DftMethod::Auto;
  if (m == "reference") return DftMethod::Reference;
  if (m == "fast") return DftMethod::Fast;
  throw Error(ErrorKind::ConfigError, "dft.method must be auto, reference or fast");
}

double sumsq(std::span<const cplx> v) {
  double acc = 0;
  for (auto x : v) acc += std::norm(x);
  return acc;
}

void run_dft_check(const Config& cfg, Report& r, const RunOptions& opt) {
  cfg.require_known(keys({&kFieldKeys, &kGroupKeys}, {"dft.samples", "dft.method", "dft.tolerance"}));
  const unsigned n = single_level(cfg, 1);
  const auto s = field_setup(cfg, {n});
  const auto g = group_model(cfg, s, "ga");
  const u64 samples = cfg.u("dft.samples", 10);
  const auto method = parse_method(cfg.str("dft.method", "auto"));
  const double tol = cfg.real("dft.tolerance", 1e-9);
  require_levels(g, {n});
  const auto a = group_structure(g, n);
  if (a->order() > kTransformCap) throw Error(ErrorKind::SizeCap, "group above the transform cap");
  const Executor ex(opt.workers);
  std::mt19937_64 rng(opt.seed);
  std::normal_distribution<double> nd;
  auto random_fn = [&] {
    TraceFunction f = TraceFunction::zeros(a);
    for (auto& v : f.values) v = {nd(rng), nd(rng)};
    return f;
  };
  const double N = static_cast<double>(a->order());
  Table t{"errors", {"sample", "roundtrip", "plancherel", "convolution", "twist", "fast_vs_reference"}, {}};
  double worst[5] = {0, 0, 0, 0, 0};
  for (u64 k = 0; k < samples; ++k) {
    const auto f = random_fn();
    const auto h = random_fn();
    const u64 twist_code = std::uniform_int_distribution<u64>(0, a->order() - 1)(rng);
    const auto F = dft(f, method, ex);
    const auto back = inverse_dft(F, method, ex);
    const double e_round = max_relative_error(back.values, f.values);
    const double e_planch = std::abs(sumsq(F.values) - N * sumsq(f.values)) / (N * sumsq(f.values));
    const auto H = dft(h, method, ex);
    const auto FH = dft(convolve(f, h, ex), method, ex);
    std::vector<cplx> prod(F.values.size());
    for (std::size_t i = 0; i < prod.size(); ++i) prod[i] = F.values[i] * H.values[i];
    const double e_conv = max_relative_error(FH.values, prod);
    const auto chi = Character::from_code(a, twist_code);
    const auto T = dft(twist(f, chi), method, ex);
    std::vector<cplx> shifted(F.values.size());
    for (u64 c = 0; c < shifted.size(); ++c) shifted[c] = F.values[(Character::from_code(a, c) * chi).code()];
    const double e_twist = max_relative_error(T.values, shifted);
    const auto ref = dft(f, DftMethod::Reference, ex);
    const auto fast = dft(f, DftMethod::Fast, ex);
    const double e_fast = max_relative_error(fast.values, ref.values);
    const double errs[5] = {e_round, e_planch, e_conv, e_twist, e_fast};
    for (int j = 0; j < 5; ++j) worst[j] = std::max(worst[j], errs[j]);
    t.rows.push_back({k, e_round, e_planch, e_conv, e_twist, e_fast});
    r.payload["samples"].push_back(
        {{"roundtrip", e_round}, {"plancherel", e_planch}, {"convolution", e_conv}, {"twist", e_twist}, {"fast", e_fast}});
  }
  r.payload["model"] = g.name();
  r.payload["n"] = n;
  r.payload["order"] = a->order();
  const char* names[5] = {"round trip", "Plancherel", "convolution theorem", "twist shift", "fast path vs reference"};
  for (int j = 0; j < 5; ++j) {
    add_check(r, std::string(names[j]) + " <= " + sci(tol), "transform", worst[j] <= tol, "max " + sci(worst[j]));
  }
  r.tables.push_back(std::move(t));
}

// ---------------------------------------------------------------- gauss-equi

Table histogram_table(const std::string& name, const std::vector<u64>& h, double lo, double hi) {
  Table t{name, {"center", "count"}, {}};
  const double w = (hi - lo) / h.size();
  for (std::size_t i = 0; i < h.size(); ++i) t.rows.push_back({lo + (i + 0.5) * w, h[i]});
  return t;
}

json moments_json(const std::vector<MomentRow>& rows) {
  json out = json::array();
  for (const auto& m : rows) {
    out.push_back({{"k", m.k}, {"empirical", cj(m.empirical)}, {"haar", cj(m.haar)}, {"deviation", m.deviation}});
  }
  return out;
}

void run_gauss_equi(const Config& cfg, Report& r, const RunOptions& opt) {
  cfg.require_known(keys({&kFieldKeys}, {"equi.max_k", "equi.bins"}));
  const auto levels = cfg.levels("field.n", 1);
  const auto s = field_setup(cfg, levels);
  const auto gm = GroupModel::gm(s.tower, s.e);
  require_levels(gm, levels);
  const unsigned max_k = static_cast<unsigned>(cfg.u("equi.max_k", 4));
  const unsigned bins = static_cast<unsigned>(cfg.u("equi.bins", 32));
  if (max_k == 0 || bins == 0) throw Error(ErrorKind::ConfigError, "equi.max_k and equi.bins must be positive");
  const Executor ex(opt.workers);
  const auto u1 = ReferenceGroup::u1();
  std::vector<EmpiricalFamily> fams;
  Table t{"moments", {"n", "k", "re", "im", "deviation", "bound"}, {}};
  std::vector<double> max_bound(max_k, 0);
  for (unsigned n : levels) {
    const auto a = group_structure(gm, n);
    fams.push_back(family_from_sums(gm, SumFamily::gauss(), n, {CharCoset::point(Character::trivial(a))}, ex));
    const auto w = weyl_report(fams.back(), u1, max_k);
    const double qn = std::pow(static_cast<double>(s.q), n);
    json level = {{"n", n}, {"size", w.size}, {"moments", moments_json(w.moments)}};
    double unit = 0;
    for (const auto& e : fams.back().entries) unit = std::max(unit, std::abs(std::abs(e.value) - 1));
    level["max_unit_deviation"] = unit;
    add_check(r, "n=" + std::to_string(n) + ": entries on the unit circle", "equi", unit <= 1e-9, sci(unit));
    for (const auto& m : w.moments) {
      const double bound = (m.k + 2) / std::sqrt(qn);
      max_bound[m.k - 1] = std::max(max_bound[m.k - 1], bound);
      t.rows.push_back({n, m.k, m.empirical.real(), m.empirical.imag(), m.deviation, bound});
      add_check(r, "n=" + std::to_string(n) + ", k=" + std::to_string(m.k) + ": |W_k| <= (k+2)/sqrt(q^n)", "equi",
                m.deviation <= bound, sci(m.deviation) + " vs " + sci(bound));
    }
    const auto h = angle_histogram(fams.back(), bins);
    level["histogram"] = h;
    r.tables.push_back(histogram_table("angles_n" + std::to_string(n), h, -std::numbers::pi, std::numbers::pi));
    r.payload["levels"].push_back(std::move(level));
  }
  r.tables.insert(r.tables.begin(), std::move(t));
  if (levels.size() > 1) {
    const auto avg = on_average_report(fams, u1, max_k);
    r.payload["average"] = moments_json(avg.averaged);
    Table at{"average", {"k", "re", "im", "deviation", "bound"}, {}};
    for (const auto& m : avg.averaged) {
      at.rows.push_back({m.k, m.empirical.real(), m.empirical.imag(), m.deviation, max_bound[m.k - 1]});
      add_check(r, "average over n, k=" + std::to_string(m.k) + ": within the largest per-n bound", "equi",
                m.deviation <= max_bound[m.k - 1], sci(m.deviation) + " vs " + sci(max_bound[m.k - 1]));
    }
    r.tables.push_back(std::move(at));
  }
  r.payload["q"] = s.q;
  r.payload["reference"] = u1.name();
}

// ---------------------------------------------------------------- kloosterman

void run_kloosterman(const Config& cfg, Report& r) {
  cfg.require_known(keys({&kFieldKeys}, {"kloosterman.rank", "kloosterman.mellin", "equi.max_k", "equi.bins"}));
  const unsigned n = single_level(cfg, 1);
  const auto s = field_setup(cfg, {n});
  const unsigned rank = static_cast<unsigned>(cfg.u("kloosterman.rank", 2));
  const auto gm = GroupModel::gm(s.tower, s.e);
  const double Q = std::pow(static_cast<double>(s.q), n);
  if (rank < 2) throw Error(ErrorKind::ConfigError, "kloosterman.rank must be at least 2");
  if (rank > 2 && Q > 4096) throw Error(ErrorKind::ConfigError, "ranks above 2 are limited to q^n <= 4096");
  require_levels(gm, {n});
  const bool mellin = cfg.flag("kloosterman.mellin", Q <= 4096);
  const unsigned max_k = static_cast<unsigned>(cfg.u("equi.max_k", 4));
  const unsigned bins = static_cast<unsigned>(cfg.u("equi.bins", 20));
  if (bins == 0) throw Error(ErrorKind::ConfigError, "equi.bins must be positive");

  const auto kl = kloosterman_table(gm, n, rank);
  const auto& a = kl.domain;
  Table t{"kloosterman", {"a", "re", "im"}, {}};
  double worst_imag = 0, worst_ratio = 0;
  KahanSum moment;
  const double weil = rank * std::pow(Q, (rank - 1) / 2.0);
  for (u64 i = 0; i < a->order(); ++i) {
    const cplx v = kl.values[i];
    const u32 code = a->point(i).coords[0];
    t.rows.push_back({code, v.real(), v.imag()});
    r.payload["values"].push_back({code, cj(v)});
    worst_imag = std::max(worst_imag, std::abs(v.imag()));
    worst_ratio = std::max(worst_ratio, std::abs(v) / weil);
    moment.add(std::norm(v));
  }
  r.payload["model"] = gm.name();
  r.payload["n"] = n;
  r.payload["rank"] = rank;
  r.payload["kl_at_1"] = cj(kl.values[a->index_of(gm.identity(n))]);
  r.payload["second_moment"] = moment.value().real();
  add_check(r, "Weil bound |Kl| <= r q^{n(r-1)/2}", "sums", worst_ratio <= 1 + 1e-12, "max ratio " + sci(worst_ratio));
  if (rank == 2) {
    const double expected = Q * Q - Q - 1;
    r.payload["second_moment_expected"] = expected;
    add_check(r, "Kl_2 is real", "sums", worst_imag <= 1e-9 * std::sqrt(Q), sci(worst_imag));
    add_check(r, "sum |Kl_2|^2 = q^2 - q - 1", "sums", std::abs(moment.value().real() - expected) <= 1e-6 * Q * Q,
              std::to_string(moment.value().real()) + " vs " + std::to_string(expected));

    EmpiricalFamily st;
    st.label = "kloosterman-trace";
    st.level = n;
    for (u64 i = 0; i < a->order(); ++i) {
      st.entries.push_back({"point", i, cplx(-kl.values[i].real() / std::sqrt(Q), 0)});
    }
    const auto w = weyl_report(st, ReferenceGroup::su2(), max_k);
    r.payload["sato_tate"] = moments_json(w.moments);
    std::vector<u64> h(bins, 0);
    for (const auto& e : st.entries) {
      const double x = (e.value.real() + 2) / 4 * bins;
      ++h[static_cast<std::size_t>(std::clamp(x, 0.0, bins - 1.0))];
    }
    r.payload["sato_tate_histogram"] = h;
    r.tables.push_back(histogram_table("sato_tate", h, -2, 2));
    add_check(r, "SU2 Haar moments agree with numerical integration", "equi", check_reference_moments());
  }
  if (mellin) {
    const auto M = dft(kl);
    double err = 0, scale = 0;
    for (const auto& chi : dual_group(a)) {
      const cplx expected = std::pow(gauss_sum(chi), static_cast<int>(rank));
      err = std::max(err, std::abs(M.at(chi) - expected));
      scale = std::max(scale, std::abs(expected));
    }
    add_check(r, "Mellin transform equals g(chi)^r", "sums", err <= 1e-9 * std::max(1.0, scale), sci(err));
  }
  r.tables.insert(r.tables.begin(), std::move(t));
}

// ---------------------------------------------------------------- hyp

void run_hyp(const Config& cfg, Report& r) {
  cfg.require_known(keys({&kFieldKeys}, {"hyp.chars"}));
  const unsigned n = single_level(cfg, 1);
  const auto s = field_setup(cfg, {n});
  const auto gm = GroupModel::gm(s.tower, s.e);
  require_levels(gm, {n});
  const auto codes = cfg.list("hyp.chars");
  const double Q = std::pow(static_cast<double>(s.q), n);
  if (std::pow(Q, static_cast<double>(codes.size())) > 5e7) {
    throw Error(ErrorKind::ConfigError, "hypergeometric sum too large: (q^n)^r above 5e7");
  }
  const auto a = group_structure(gm, n);
  std::vector<Character> chis;
  for (u64 c : codes) {
    if (c >= a->order()) throw Error(ErrorKind::ConfigError, "hyp.chars: code " + std::to_string(c) + " out of range");
    chis.push_back(Character::from_code(a, c));
  }
  const auto direct = hypergeometric_direct(chis);
  const auto conv = hypergeometric_convolution(chis);
  const double e_conv = max_relative_error(conv.values, direct.values);
  add_check(r, "direct sum equals iterated convolution", "sums", e_conv <= 1e-9, sci(e_conv));

  Table t{"hyp", {"a", "re", "im"}, {}};
  for (u64 i = 0; i < a->order(); ++i) {
    const u32 code = a->point(i).coords[0];
    t.rows.push_back({code, direct.values[i].real(), direct.values[i].imag()});
    r.payload["values"].push_back({code, cj(direct.values[i])});
  }
  const auto M = dft(direct);
  const auto fam = SumFamily::hypergeometric(chis);
  const auto Mn = dft(normalize(direct, fam));
  Table mt{"mellin", {"char", "re", "im", "expected_re", "expected_im", "normalized_abs"}, {}};
  double err = 0, scale = 1, unit = 0;
  for (const auto& chi : dual_group(a)) {
    cplx expected = 1;
    bool generic = true;
    for (const auto& ci : chis) {
      expected *= gauss_sum(chi * ci);
      generic = generic && !(chi * ci).is_trivial();
    }
    err = std::max(err, std::abs(M.at(chi) - expected));
    scale = std::max(scale, std::abs(expected));
    if (generic) unit = std::max(unit, std::abs(std::abs(Mn.at(chi)) - 1));
    mt.rows.push_back({chi.code(), M.at(chi).real(), M.at(chi).imag(), expected.real(), expected.imag(),
                       std::abs(Mn.at(chi))});
  }
  add_check(r, "Mellin transform equals prod g(chi chi_i)", "sums", err <= 1e-9 * scale, sci(err / scale));
  add_check(r, "normalized Mellin has modulus 1 where every chi chi_i is nontrivial", "sums", unit <= 1e-9, sci(unit));
  r.payload["model"] = gm.name();
  r.payload["n"] = n;
  r.payload["chars"] = codes;
  r.tables.push_back(std::move(t));
  r.tables.push_back(std::move(mt));
}

// ---------------------------------------------------------------- strat-report

json strat_json(const StratReport& sr) {
  json rows = json::array();
  for (const auto& row : sr.rows) {
    rows.push_back({{"i", row.i},
                    {"stratum", row.descriptor},
                    {"codim", row.codim},
                    {"count", row.count},
                    {"density", rat(row.density)},
                    {"bucket_sup", row.bucket_sup},
                    {"sup_outside_next", row.sup_outside},
                    {"bound", row.bound},
                    {"ratio", row.ratio},
                    {"ok", row.ok}});
  }
  return {{"level", sr.level}, {"q", sr.q}, {"constant", sr.constant}, {"offset", sr.offset},
          {"monotone", sr.monotone}, {"rows", rows}};
}

void run_strat_report(const Config& cfg, Report& r) {
  cfg.require_known(keys({&kFieldKeys}, {"strat.family", "strat.d", "strat.constant", "strat.offset"}));
  const unsigned n = single_level(cfg, 1);
  const auto s = field_setup(cfg, {n});
  const auto name = cfg.str("strat.family", "gauss");
  const double constant = cfg.real("strat.constant", 4);
  const int offset = static_cast<int>(cfg.i("strat.offset", 0));
  SumFamily fam;
  if (name == "gauss") {
    fam = SumFamily::gauss();
  } else if (name == "kloosterman") {
    fam = SumFamily::kloosterman();
  } else if (name == "separable") {
    fam = SumFamily::separable_additive(static_cast<unsigned>(cfg.u("strat.d", 2)));
  } else {
    throw Error(ErrorKind::ConfigError, "strat.family must be gauss, kloosterman or separable");
  }
  if (name != "separable" && cfg.has("strat.d")) throw Error(ErrorKind::ConfigError, "strat.d only applies to separable");
  const auto model = name == "separable" ? GroupModel::ga(s.tower, s.e, fam.variables) : GroupModel::gm(s.tower, s.e);
  require_levels(model, {n});

  const auto spec = dft(normalize(family_values(fam, s.tower, s.e, n), fam));
  const auto& dual = spec.domain;
  std::vector<Stratum> strata = {{"full", {CharCoset::full(dual)}}};
  if (name == "separable") {
    // Fourier transform of psi x ... x psi is supported at the inverse of that character
    const auto psi = standard_additive_character(s.tower, s.e, n);
    std::vector<u64> exps;
    for (unsigned j = 0; j < fam.variables; ++j) exps.insert(exps.end(), psi.exps().begin(), psi.exps().end());
    strata.push_back({"spike", {CharCoset::point(Character(dual, exps).inverse())}});
  } else {
    strata.push_back({"trivial", {CharCoset::point(Character::trivial(dual))}});
  }
  strata.push_back({"empty", {}});
  const StratChain chain(dual, strata);
  const auto sr = strat_report(spec, chain, constant, offset);
  r.payload = strat_json(sr);
  r.payload["family"] = fam.name;
  r.payload["model"] = model.name();

  Table t{"strata", {"i", "stratum", "codim", "count", "density", "bucket_sup", "sup_outside_next", "bound", "ratio", "ok"}, {}};
  for (const auto& row : sr.rows) {
    t.rows.push_back({row.i, row.descriptor, row.codim, row.count, rat(row.density), row.bucket_sup, row.sup_outside,
                      row.bound, row.ratio, row.ok});
    add_check(r, "level " + std::to_string(row.i) + ": sup off the next stratum within C q^{n(i+offset)/2}", "strat",
              row.ok, sci(row.sup_outside) + " vs " + sci(row.bound));
  }
  add_check(r, "sup off Delta_{i+1} is nondecreasing in i", "strat", sr.monotone);
  if (name != "separable") {
    const double generic = sr.rows[0].sup_outside;
    add_check(r, "generic sup equals 1", "strat", std::abs(generic - 1) <= 1e-9, sci(std::abs(generic - 1)));
  } else {
    add_check(r, "spike of height 1", "strat", std::abs(sr.rows[1].bucket_sup - 1) <= 1e-9 && sr.rows[0].sup_outside <= 1e-9);
  }
  r.tables.push_back(std::move(t));
}

// ---------------------------------------------------------------- density-report

void run_density_report(const Config& cfg, Report& r) {
  cfg.require_known(keys({&kFieldKeys, &kGroupKeys}, {"density.stratum", "density.tolerance"}));
  const auto levels = cfg.levels("field.n", 1);
  if (levels.size() < 2) throw Error(ErrorKind::ConfigError, "density-report needs at least two levels in field.n");
  for (std::size_t i = 1; i < levels.size(); ++i) {
    if (levels[i] != levels[i - 1] + 1) throw Error(ErrorKind::ConfigError, "density-report needs a range a..b");
  }
  const auto kind = cfg.str("density.stratum", "mult");
  const double tol = cfg.real("density.tolerance", 0.05);
  const auto s = field_setup(cfg, levels);
  const auto g = group_model(cfg, s, kind == "mult" ? "product" : "gm");
  require_levels(g, levels);

  u64 power = 0;
  if (kind.rfind("power:", 0) == 0) {
    power = std::stoull(kind.substr(6));
    if (power == 0) throw Error(ErrorKind::ConfigError, "density.stratum power must be positive");
  } else if (kind == "mult") {
    if (g.kind() != GroupKind::Product || g.factors().size() != 2 || !(g.factors()[0] == g.factors()[1])) {
      throw Error(ErrorKind::ConfigError, "density.stratum = mult needs a product of two equal factors");
    }
  } else if (kind != "trivial" && kind != "full") {
    throw Error(ErrorKind::ConfigError, "density.stratum must be mult, trivial, full or power:r");
  }
  auto build = [&](unsigned n) {
    const auto a = group_structure(g, n);
    const auto triv = Character::trivial(a);
    std::vector<Stratum> strata = {{"full", {CharCoset::full(a)}}};
    if (kind == "mult") strata.push_back({"mult", {CharCoset::make(triv, GroupHom::multiplication(g))}});
    if (kind == "trivial") strata.push_back({"trivial", {CharCoset::point(triv)}});
    if (power) strata.push_back({kind, {CharCoset::make(triv, GroupHom::power(g, power))}});
    strata.push_back({"empty", {}});
    return StratChain(a, strata);
  };
  const auto dr = density_report(build, levels.front(), levels.back());
  Table t{"density", {"i", "n", "count", "total", "density", "density_value", "predicted"}, {}};
  Table st{"slopes", {"i", "codim", "slope", "tail_slope", "expected_slope", "relative_error"}, {}};
  const bool gm_based = (kind == "mult" || kind == "trivial") &&
                        (g.kind() == GroupKind::Gm || (g.kind() == GroupKind::Product && g.factors()[0].kind() == GroupKind::Gm));
  for (const auto& ser : dr.series) {
    json pts = json::array();
    bool exact = true;
    for (const auto& pt : ser.points) {
      pts.push_back({{"n", pt.n}, {"count", pt.count}, {"total", pt.total}, {"density", rat(pt.density)},
                     {"predicted", pt.predicted}});
      t.rows.push_back({ser.i, pt.n, pt.count, pt.total, rat(pt.density), pt.density.to_double(), pt.predicted});
      if (ser.i == 1 && gm_based && g.dims().dim <= 2) {
        exact = exact && pt.density == Rational::make(1, ipow(s.q, pt.n) - 1);
      }
    }
    r.payload["series"].push_back({{"i", ser.i},
                                   {"codim", ser.codim},
                                   {"points", pts},
                                   {"slope", ser.slope},
                                   {"tail_slope", ser.tail_slope},
                                   {"expected_slope", ser.expected_slope},
                                   {"relative_error", ser.relative_error}});
    st.rows.push_back({ser.i, ser.codim, ser.slope, ser.tail_slope, ser.expected_slope, ser.relative_error});
    const std::string tag = "stratum " + std::to_string(ser.i) + ": ";
    if (ser.i == 1 && gm_based && (kind == "mult" || g.dims().dim == 1)) {
      add_check(r, tag + "densities are exactly 1/(q^n - 1)", "strat", exact);
    }
    add_check(r, tag + "least-squares log-slope within " + sci(tol) + " of -codim log q", "strat",
              ser.relative_error <= tol,
              "slope " + std::to_string(ser.slope) + " vs " + std::to_string(ser.expected_slope) + ", relative error " +
                  std::to_string(ser.relative_error) + ", tail slope " + std::to_string(ser.tail_slope));
  }
  r.payload["model"] = g.name();
  r.payload["q"] = dr.q;
  r.payload["stratum"] = kind;
  r.tables.push_back(std::move(t));
  r.tables.push_back(std::move(st));
}

// ---------------------------------------------------------------- descend-coset

GroupHom parse_hom(const std::string& spec, const GroupModel& g) {
  if (spec == "identity") return GroupHom::identity(g);
  if (spec == "trivial") return GroupHom::to_trivial(g);
  if (spec == "mult") return GroupHom::multiplication(g);
  if (spec.rfind("power:", 0) == 0) return GroupHom::power(g, std::stoull(spec.substr(6)));
  if (spec.rfind("projection:", 0) == 0) {
    std::vector<std::size_t> idx;
    std::stringstream ss(spec.substr(11));
    std::string item;
    while (std::getline(ss, item, '+')) idx.push_back(std::stoull(item));
    return GroupHom::projection(g, idx);
  }
  throw Error(ErrorKind::ConfigError, "coset.hom must be identity, trivial, mult, power:r or projection:i+j");
}

void run_descend_coset(const Config& cfg, Report& r) {
  cfg.require_known(keys({&kFieldKeys, &kGroupKeys}, {"coset.base", "coset.hom"}));
  const unsigned n = single_level(cfg, 2);
  const auto s = field_setup(cfg, {n});
  const auto g = group_model(cfg, s, "product");
  require_levels(g, {n});
  const auto a = group_structure(g, n);
  const auto base_exps = cfg.list("coset.base");
  if (base_exps.size() != a->rank()) {
    throw Error(ErrorKind::ConfigError, "coset.base needs " + std::to_string(a->rank()) + " exponents");
  }
  const auto hom = parse_hom(cfg.str("coset.hom", "mult"), g);
  const CharCoset coset = CharCoset::make(Character(a, base_exps), hom);
  const bool stable = coset.frobenius_stable();
  r.payload["model"] = g.name();
  r.payload["n"] = n;
  r.payload["cyclic_orders"] = a->factors();
  r.payload["coset"] = {{"descriptor", coset.descriptor()},
                        {"base", coset.base().code()},
                        {"size", coset.size()},
                        {"codim", coset.declared_codim()},
                        {"density", rat(coset.density())},
                        {"members", coset.members()}};
  r.payload["frobenius_stable"] = stable;
  Table t{"descent", {"stable", "witness", "cocycle", "class_size", "coboundaries"}, {}};
  if (!stable) {
    r.payload["descent"] = nullptr;
    t.rows.push_back({false, -1, -1, 0, 0});
    add_check(r, "coset is Frobenius-stable", "chars", false, "descent needs a stable coset");
    r.tables.push_back(std::move(t));
    return;
  }
  add_check(r, "coset is Frobenius-stable", "chars", true);
  const auto d = descend_coset(coset);
  const bool bounds = std::binary_search(d.cocycle_class.begin(), d.cocycle_class.end(), u64{0});
  json desc = {{"cocycle", d.cocycle}, {"cocycle_class", d.cocycle_class}, {"coboundaries", d.coboundaries}};
  if (d.witness) {
    desc["witness"] = {{"code", d.witness->code()}, {"exps", d.witness->exps()}};
    add_check(r, "witness lies in the coset and is Frobenius-fixed", "chars",
              coset.contains(*d.witness) && frobenius_on_char(*d.witness) == *d.witness);
  } else {
    desc["witness"] = nullptr;
  }
  add_check(r, "a fixed point exists iff the cocycle is a coboundary", "chars", d.witness.has_value() == bounds);
  r.payload["descent"] = std::move(desc);
  t.rows.push_back({true, d.witness ? static_cast<i64>(d.witness->code()) : -1, d.cocycle, d.cocycle_class.size(),
                    d.coboundaries});
  r.tables.push_back(std::move(t));
}

std::string csv_cell(const json& v) {
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
  }
  return v.dump();
}

std::string dat_cell(const json& v) {
  std::string s = v.is_string() ? v.get<std::string>() : v.dump();
  std::replace_if(s.begin(), s.end(), [](char c) { return c == ' ' || c == '\t'; }, '_');
  return s.empty() ? "-" : s;
}

}  // namespace

std::optional<ExperimentKind> parse_kind(std::string_view name) {
  for (const auto& [k, s] : kKindNames) {
    if (s == name) return k;
  }
  return std::nullopt;
}

std::string to_string(ExperimentKind kind) {
  for (const auto& [k, s] : kKindNames) {
    if (k == kind) return s;
  }
  return "?";
}

const std::vector<ExperimentKind>& all_kinds() {
  static const std::vector<ExperimentKind> kinds = [] {
    std::vector<ExperimentKind> out;
    for (const auto& [k, s] : kKindNames) out.push_back(k);
    return out;
  }();
  return kinds;
}

std::string Table::csv() const {
  std::string out;
  for (std::size_t i = 0; i < columns.size(); ++i) out += (i ? "," : "") + columns[i];
  out += "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + csv_cell(row[i]);
    out += "\n";
  }
  return out;
}

std::string Table::dat() const {
  std::string out = "#";
  for (const auto& c : columns) out += " " + c;
  out += "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? " " : "") + dat_cell(row[i]);
    out += "\n";
  }
  return out;
}

bool Report::ok() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass && !c.skipped; });
}

json Report::to_json() const {
  json checks_json = json::array();
  for (const auto& c : checks) {
    checks_json.push_back({{"name", c.name},
                           {"module", c.module},
                           {"status", c.skipped ? "skipped" : (c.pass ? "pass" : "fail")},
                           {"detail", c.detail}});
  }
  return {{"tool", "charlab"},      {"version", kVersion},   {"kind", kind},        {"config", config},
          {"timing", {{"seconds", seconds}}}, {"payload", payload}, {"checks", checks_json}, {"ok", ok()}};
}

Report run_experiment(ExperimentKind kind, const Config& cfg, const RunOptions& opt) {
  Report r;
  r.kind = to_string(kind);
  r.config = json::object();
  for (const auto& [k, v] : cfg.entries()) r.config[k] = v;
  r.config["workers"] = opt.workers;
  r.config["seed"] = opt.seed;
  r.payload = json::object();
  const auto t0 = std::chrono::steady_clock::now();
  switch (kind) {
    case ExperimentKind::GroupInfo: run_group_info(cfg, r); break;
    case ExperimentKind::CharTable: run_char_table(cfg, r); break;
    case ExperimentKind::LangCheck: run_lang_check(cfg, r); break;
    case ExperimentKind::DftCheck: run_dft_check(cfg, r, opt); break;
    case ExperimentKind::GaussEqui: run_gauss_equi(cfg, r, opt); break;
    case ExperimentKind::Kloosterman: run_kloosterman(cfg, r); break;
    case ExperimentKind::Hyp: run_hyp(cfg, r); break;
    case ExperimentKind::StratReport: run_strat_report(cfg, r); break;
    case ExperimentKind::DensityReport: run_density_report(cfg, r); break;
    case ExperimentKind::DescendCoset: run_descend_coset(cfg, r); break;
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

void write_outputs(const Report& report, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto write = [&](const std::string& name, const std::string& text) {
    std::ofstream out(dir / name);
    if (!out) throw Error(ErrorKind::ConfigError, "cannot write " + (dir / name).string());
    out << text;
  };
  write("report.json", report.to_json().dump(2) + "\n");
  for (const auto& t : report.tables) {
    write(t.name + ".csv", t.csv());
    write(t.name + ".dat", t.dat());
  }
}

Config selftest_config(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::GroupInfo: return Config::parse("field.p = 7\ngroup.kind = gm\n");
    case ExperimentKind::CharTable: return Config::parse("field.p = 5\nfield.n = 2\ngroup.kind = torus\n");
    case ExperimentKind::LangCheck:
      return Config::parse("field.p = 5\nfield.n = 1\nlang.m = 2\ngroup.kind = elliptic\ngroup.a = 1\ngroup.b = 0\n");
    case ExperimentKind::DftCheck: return Config::parse("field.p = 3\nfield.n = 2\ngroup.kind = ga\ndft.samples = 4\n");
    case ExperimentKind::GaussEqui: return Config::parse("field.p = 5\nfield.n = 1..3\n");
    case ExperimentKind::Kloosterman: return Config::parse("field.p = 5\n");
    case ExperimentKind::Hyp: return Config::parse("field.p = 7\nhyp.chars = 1, 2\n");
    case ExperimentKind::StratReport: return Config::parse("field.p = 7\nstrat.family = gauss\n");
    case ExperimentKind::DensityReport: return Config::parse("field.p = 7\nfield.n = 1..3\ndensity.stratum = mult\n");
    case ExperimentKind::DescendCoset:
      return Config::parse("field.p = 3\nfield.n = 2\ngroup.kind = product\ngroup.factors = gm, gm\ncoset.base = 4, 0\n"
                           "coset.hom = mult\n");
  }
  return {};
}

// ---------------------------------------------------------------- selftest

namespace {

using CheckList = std::vector<std::pair<std::string, std::function<bool()>>>;

bool field_axioms(const Field& f) {
  const u32 q = f.size();
  for (u32 a = 1; a < q; ++a) {
    if (f.mul(a, f.inv(a)) != 1 || f.pow(a, q - 1) != 1) return false;
  }
  for (u32 a = 0; a < q; ++a) {
    for (u32 b = 0; b < q; b += 1 + q / 16) {
      if (f.frobenius(f.add(a, b), 1) != f.add(f.frobenius(a, 1), f.frobenius(b, 1))) return false;
      if (f.frobenius(f.mul(a, b), 1) != f.mul(f.frobenius(a, 1), f.frobenius(b, 1))) return false;
    }
    if (f.trace(a, 1) >= f.p()) return false;
  }
  return true;
}

CheckList fields_checks(bool corrupt) {
  std::vector<FieldPtr> fields = {make_field(2, 3), make_field(5, 2), make_field(7, 1)};
  fields.push_back(corrupt ? make_field_unchecked(3, {2, 0, 1}) : make_field(3, 2));
  CheckList out;
  for (const auto& f : fields) {
    const std::string tag = "F_" + std::to_string(f->size());
    out.push_back({tag + " modulus irreducible", [f] { return is_irreducible(f->modulus(), f->p()); }});
    out.push_back({tag + " field axioms and Frobenius", [f] { return field_axioms(*f); }});
  }
  out.push_back({"tower embeddings compose", [] {
                   const auto t = make_tower(2, 6);
                   for (u32 x = 0; x < 4; ++x) {
                     if (t->embed(t->embed(x, 2, 6), 6, 6) != t->embed(x, 2, 6)) return false;
                   }
                   const auto f2 = t->field(2);
                   for (u32 x = 0; x < 4; ++x) {
                     for (u32 y = 0; y < 4; ++y) {
                       if (t->embed(f2->mul(x, y), 2, 6) != t->field(6)->mul(t->embed(x, 2, 6), t->embed(y, 2, 6))) {
                         return false;
                       }
                     }
                   }
                   return true;
                 }});
  return out;
}

CheckList groups_checks() {
  return {
      {"|Gm(F_7)| = 6", [] { return enumerate_points(GroupModel::gm(make_tower(7, 1), 1), 1).size() == 6; }},
      {"|T(F_5)| = 6 and |T(F_25)| = 24",
       [] {
         const auto t = GroupModel::norm_one_torus(make_tower(5, 2), 1);
         return enumerate_points(t, 1).size() == 6 && enumerate_points(t, 2).size() == 24;
       }},
      {"|E(F_5)| = 4 for y^2 = x^3 + x",
       [] { return enumerate_points(GroupModel::elliptic_curve(make_tower(5, 1), 1, 1, 0), 1).size() == 4; }},
      {"Lang sequence exact for Gm, torus and E at 1 | 2",
       [] {
         const auto t = make_tower(5, 2);
         for (const auto& g : {GroupModel::gm(t, 1), GroupModel::norm_one_torus(t, 1), GroupModel::elliptic_curve(t, 1, 1, 0)}) {
           const auto c = check_lang_sequence(g, 1, 2);
           if (!c.exact() || c.coinvariants != c.order_1) return false;
         }
         return true;
       }},
      {"squaring on Gm is a homomorphism",
       [] { return verify_hom(GroupHom::power(GroupModel::gm(make_tower(7, 1), 1), 2), 1); }},
  };
}

CheckList chars_checks() {
  return {
      {"orthogonality on Gm(F_7), Ga(F_9), E(F_25)",
       [] {
         const auto t5 = make_tower(5, 2);
         for (const auto& s : {group_structure(GroupModel::gm(make_tower(7, 1), 1), 1),
                               group_structure(GroupModel::ga(make_tower(3, 2), 1), 2),
                               group_structure(GroupModel::elliptic_curve(t5, 1, 1, 0), 2)}) {
           const auto o = check_orthogonality(s);
           if (!o.all_zero() || !o.trivial_sum_is_order) return false;
         }
         return true;
       }},
      {"pullback along squaring on Gm(F_7) has kernel 2",
       [] {
         const auto gm = GroupModel::gm(make_tower(7, 1), 1);
         const auto s = group_structure(gm, 1);
         const auto sq = GroupHom::power(gm, 2);
         u64 kernel = 0;
         for (const auto& chi : dual_group(s)) kernel += pullback(chi, sq).is_trivial();
         return kernel == 2;
       }},
      {"dual Lang sequence exact for Gm over F_3 at 1 | 2",
       [] { return check_dual_lang_sequence(GroupModel::gm(make_tower(3, 2), 1), 1, 2).exact(); }},
  };
}

CheckList transform_checks() {
  return {{"round trip and Plancherel on Ga(F_9)", [] {
             const auto s = group_structure(GroupModel::ga(make_tower(3, 2), 1), 2);
             std::mt19937_64 rng(1);
             std::normal_distribution<double> nd;
             TraceFunction f = TraceFunction::zeros(s);
             for (auto& v : f.values) v = {nd(rng), nd(rng)};
             const auto F = dft(f);
             const double planch = std::abs(sumsq(F.values) - 9 * sumsq(f.values)) / (9 * sumsq(f.values));
             return max_relative_error(inverse_dft(F).values, f.values) <= 1e-9 && planch <= 1e-9;
           }}};
}

CheckList sums_checks() {
  return {
      {"Kl_2(1; 5) = (3 - sqrt 5)/2",
       [] { return std::abs(kloosterman2_prime(5)[1] - cplx((3 - std::sqrt(5.0)) / 2, 0)) <= 1e-12; }},
      {"sum Kl_2^2 = 41 at q = 7",
       [] {
         const auto k = kloosterman2_prime(7);
         double m = 0;
         for (u32 a = 1; a < 7; ++a) m += std::norm(k[a]);
         return std::abs(m - 41) <= 1e-9;
       }},
      {"|g(chi)|^2 = 7 for nontrivial chi on F_7",
       [] {
         const auto s = group_structure(GroupModel::gm(make_tower(7, 1), 1), 1);
         for (const auto& chi : dual_group(s)) {
           if (!chi.is_trivial() && std::abs(std::norm(gauss_sum(chi)) - 7) > 1e-9) return false;
         }
         return true;
       }},
  };
}

CheckList equi_checks() {
  return {
      {"SU2 moments match numerical integration", [] { return check_reference_moments(); }},
      {"Gauss family at q = 101 within (k+2)/sqrt(q)",
       [] {
         const auto gm = GroupModel::gm(make_tower(101, 1), 1);
         const auto s = group_structure(gm, 1);
         const auto fam = family_from_sums(gm, SumFamily::gauss(), 1, {CharCoset::point(Character::trivial(s))});
         for (const auto& m : weyl_report(fam, ReferenceGroup::u1(), 4).moments) {
           if (m.deviation > (m.k + 2) / std::sqrt(101.0)) return false;
         }
         return true;
       }},
  };
}

CheckList strat_checks() {
  return {{"generic sup is 1 for the Gauss and Kloosterman families at q = 7", [] {
             const auto t = make_tower(7, 1);
             for (const auto& fam : {SumFamily::gauss(), SumFamily::kloosterman()}) {
               const auto spec = dft(normalize(family_values(fam, t, 1, 1), fam));
               const StratChain chain(spec.domain, {{"full", {CharCoset::full(spec.domain)}},
                                                    {"trivial", {CharCoset::point(Character::trivial(spec.domain))}},
                                                    {"empty", {}}});
               if (std::abs(strat_report(spec, chain).rows[0].sup_outside - 1) > 1e-9) return false;
             }
             return true;
           }}};
}

CheckList cli_checks(unsigned workers) {
  CheckList out;
  for (auto kind : all_kinds()) {
    out.push_back({to_string(kind) + ": identical payload at 1 and " + std::to_string(workers) + " workers", [kind, workers] {
                     const auto cfg = selftest_config(kind);
                     const auto a = run_experiment(kind, cfg, {1, 7});
                     const auto b = run_experiment(kind, cfg, {workers, 7});
                     return a.payload_bytes() == b.payload_bytes();
                   }});
  }
  out.push_back({"report JSON round-trips", [] {
                   const auto r = run_experiment(ExperimentKind::Kloosterman, selftest_config(ExperimentKind::Kloosterman), {});
                   const auto text = r.to_json().dump();
                   return json::parse(text).dump() == text && json::parse(text) == r.to_json();
                 }});
  return out;
}

}  // namespace

Report selftest(const SelftestOptions& opt) {
  Report r;
  r.kind = "selftest";
  r.config = {{"workers", opt.workers}, {"corrupt_modulus", opt.corrupt_modulus}};
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<std::pair<std::string, std::function<CheckList()>>> modules = {
      {"fields", [&] { return fields_checks(opt.corrupt_modulus); }},
      {"groups", groups_checks},
      {"chars", chars_checks},
      {"transform", transform_checks},
      {"sums", sums_checks},
      {"equi", equi_checks},
      {"strat", strat_checks},
      {"cli", [&] { return cli_checks(opt.workers); }},
  };
  bool failed = false;
  json summary = json::object();
  for (const auto& [module, make] : modules) {
    bool module_ok = true;
    for (auto& [name, fn] : make()) {
      Check c{name, module, false, failed, {}};
      if (!failed) {
        try {
          c.pass = fn();
        } catch (const std::exception& e) {
          c.detail = e.what();
        }
      }
      module_ok = module_ok && c.pass;
      r.checks.push_back(std::move(c));
    }
    summary[module] = failed ? "skipped" : (module_ok ? "pass" : "fail");
    failed = failed || !module_ok;
  }
  r.payload = {{"modules", summary}};
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

}  // namespace charlab
