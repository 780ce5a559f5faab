#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "charlab/error.hpp"
#include "charlab/strat.hpp"
#include "charlab/sums.hpp"

using namespace charlab;

namespace {

Stratum full(const StructurePtr& s) { return {"full", {CharCoset::full(s)}}; }
Stratum trivial_point(const StructurePtr& s) { return {"trivial", {CharCoset::point(Character::trivial(s))}}; }
Stratum empty() { return {"empty", {}}; }

StratChain generic_chain(const StructurePtr& s) { return StratChain(s, {full(s), trivial_point(s), empty()}); }

Spectrum normalized_mellin(const SumFamily& fam, u32 p) {
  auto t = make_tower(p, 1);
  return dft(normalize(family_values(fam, t, 1, 1), fam));
}

}  // namespace

TEST_CASE("stratum codims") {
  auto s = group_structure(GroupModel::gm(make_tower(5, 1), 1), 1);
  CHECK(full(s).codim() == 0);
  CHECK(trivial_point(s).codim() == 1);
  CHECK(empty().codim() == kInfiniteCodim);
  Stratum both{"both", {CharCoset::full(s), CharCoset::point(Character::trivial(s))}};
  CHECK(both.codim() == 0);
}

TEST_CASE("chain validation") {
  auto gm = GroupModel::gm(make_tower(13, 1), 1);
  auto s = group_structure(gm, 1);
  const auto dual = dual_group(s);
  auto kind_of = [](auto&& f) {
    try {
      f();
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::ConfigError;
  };
  CHECK(kind_of([&] { StratChain(s, {trivial_point(s), empty()}); }) == ErrorKind::CoverageGap);
  CHECK(kind_of([&] { StratChain(s, {full(s), trivial_point(s)}); }) == ErrorKind::CoverageGap);
  CHECK(kind_of([&] { StratChain(s, {full(s)}); }) == ErrorKind::CoverageGap);
  const Stratum other{"chi1", {CharCoset::point(dual[1])}};
  CHECK(kind_of([&] { StratChain(s, {full(s), trivial_point(s), other, empty()}); }) == ErrorKind::NotNested);

  const auto c = generic_chain(s);
  CHECK(c.count(0) == 12);
  CHECK(c.count(1) == 1);
  CHECK(c.count(2) == 0);
  CHECK(c.depth()[0] == 1);
  CHECK(std::count(c.depth().begin(), c.depth().end(), 0u) == 11);
}

TEST_CASE("generic strata of the built-in families") {
  for (u32 p : {5u, 7u, 11u, 101u}) {
    const double q = p;
    SUBCASE("Gauss") {
      const auto spec = normalized_mellin(SumFamily::gauss(), p);
      const auto r = strat_report(spec, generic_chain(spec.domain));
      REQUIRE(r.rows.size() == 2);
      CHECK(std::abs(r.rows[0].sup_outside - 1) < 1e-9);
      CHECK(std::abs(r.rows[0].bucket_sup - 1) < 1e-9);
      CHECK(std::abs(r.rows[1].bucket_sup - 1 / std::sqrt(q)) < 1e-12);
      CHECK(r.rows[1].bucket_sup <= std::sqrt(q));
      CHECK(r.rows[0].bound == 4);
      CHECK(std::abs(r.rows[1].bound - 4 * std::sqrt(q)) < 1e-9);
      CHECK(r.monotone);
      CHECK(r.all_ok());
    }
    SUBCASE("Kloosterman") {
      const auto spec = normalized_mellin(SumFamily::kloosterman(), p);
      const auto r = strat_report(spec, generic_chain(spec.domain));
      CHECK(std::abs(r.rows[0].sup_outside - 1) < 1e-9);
      CHECK(std::abs(r.rows[1].bucket_sup - 1 / q) < 1e-12);
      CHECK(r.all_ok());
    }
  }
}

TEST_CASE("separable spike on Ga^2") {
  const u32 p = 5;
  auto t = make_tower(p, 1);
  const auto fam = SumFamily::separable_additive(2);
  const auto spec = dft(normalize(family_values(fam, t, 1, 1), fam));
  const auto& s = spec.domain;
  // the spike sits at the character inverse to psi x psi
  std::optional<Character> spike;
  const auto psi = psi_table(*t->field(1));
  for (const auto& chi : dual_group(s)) {
    bool inverse = true;
    for (u64 i = 0; i < s->order() && inverse; ++i) {
      const auto x = s->point(i);
      inverse = std::abs(chi.value(x) * psi[x.coords[0]] * psi[x.coords[1]] - cplx(1, 0)) < 1e-9;
    }
    if (inverse) spike = chi;
  }
  REQUIRE(spike);
  Stratum top{"spike", {CharCoset::point(*spike)}};
  CHECK(top.codim() == 2);
  const auto r = strat_report(spec, StratChain(s, {full(s), top, empty()}));
  CHECK(r.rows[0].sup_outside < 1e-12);
  CHECK(std::abs(r.rows[1].bucket_sup - 1) < 1e-12);
  CHECK(r.rows[1].count == 1);
  CHECK(r.rows[1].density == Rational{1, 25});
  CHECK(r.all_ok());
}

TEST_CASE("sup bookkeeping against brute force") {
  auto gm = GroupModel::gm(make_tower(13, 1), 1);
  auto s = group_structure(gm, 1);
  const auto squares = CharCoset::make(Character::trivial(s), GroupHom::power(gm, 2));
  CHECK(squares.size() == 6);
  const StratChain chain(s, {full(s), {"squares", {squares}}, trivial_point(s), empty()});
  std::mt19937_64 rng(7);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 20; ++trial) {
    Spectrum spec{s, std::vector<cplx>(s->order())};
    for (auto& v : spec.values) v = {nd(rng), nd(rng)};
    const auto r = strat_report(spec, chain, 1.5, -1);
    CHECK(r.monotone);
    for (const auto& row : r.rows) {
      double outside = 0;
      for (u64 c = 0; c < s->order(); ++c) {
        const bool in_next = row.i == 0 ? squares.contains_code(c) : (row.i == 1 ? c == 0 : false);
        if (!in_next) outside = std::max(outside, std::abs(spec.values[c]));
      }
      CHECK(row.sup_outside == outside);
      CHECK(row.bound == doctest::Approx(1.5 * std::pow(13.0, (row.i - 1.0) / 2)));
      CHECK(row.ok == (outside <= row.bound));
    }
  }
  Spectrum wrong{group_structure(gm, 1), {}};
  CHECK_THROWS_AS(strat_report(wrong, chain), Error);
}

TEST_CASE("density reports") {
  SUBCASE("multiplication pullback on Gm^2") {
    for (u32 p : {5u, 7u}) {
      auto t = make_tower(p, 6);
      const auto prod = GroupModel::product({GroupModel::gm(t, 1), GroupModel::gm(t, 1)});
      const auto r = density_report(
          [&](unsigned n) {
            auto s = group_structure(prod, n);
            Stratum st{"mult", {CharCoset::make(Character::trivial(s), GroupHom::multiplication(prod))}};
            return StratChain(s, {full(s), st, empty()});
          },
          1, 3);
      REQUIRE(r.series.size() == 2);
      const auto& ser = r.series[1];
      CHECK(ser.codim == 1);
      std::vector<double> logs;
      for (const auto& pt : ser.points) {
        const u64 qn = static_cast<u64>(std::pow(double(p), pt.n));
        CHECK(pt.density == Rational::make(1, qn - 1));
        logs.push_back(-std::log(double(qn - 1)));
      }
      CHECK(ser.slope == doctest::Approx((logs[2] - logs[0]) / 2));
      CHECK(ser.tail_slope == doctest::Approx(logs[2] - logs[1]));
      CHECK(ser.expected_slope == doctest::Approx(-std::log(double(p))));
      CHECK(r.series[0].slope == doctest::Approx(0));
      CHECK(r.series[0].relative_error < 1e-12);
    }
  }
  SUBCASE("trivial point on Gm") {
    auto t = make_tower(3, 12);
    const auto gm = GroupModel::gm(t, 1);
    const auto r = density_report([&](unsigned n) { return generic_chain(group_structure(gm, n)); }, 1, 4);
    for (const auto& pt : r.series[1].points) {
      CHECK(pt.density == Rational::make(1, static_cast<u64>(std::pow(3.0, pt.n)) - 1));
      CHECK(pt.predicted == doctest::Approx(std::pow(3.0, -double(pt.n))));
    }
    CHECK(r.series[1].slope < 0);
  }
  CHECK_THROWS_AS(density_report([](unsigned) -> StratChain { throw Error(ErrorKind::SizeCap, "x"); }, 2, 1), Error);
}
