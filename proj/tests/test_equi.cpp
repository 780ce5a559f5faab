#include "doctest.h"

#include <cmath>
#include <numbers>

#include "charlab/equi.hpp"
#include "charlab/error.hpp"

using namespace charlab;

namespace {

constexpr double kPi = std::numbers::pi;

cplx e_p(u64 t, u64 p) { return std::polar(1.0, 2 * kPi * static_cast<double>(t) / static_cast<double>(p)); }

EmpiricalFamily from_values(const std::vector<cplx>& vals) {
  EmpiricalFamily f;
  f.label = "test";
  for (std::size_t i = 0; i < vals.size(); ++i) f.entries.push_back({"point", i, vals[i]});
  return f;
}

EmpiricalFamily roots_family(unsigned n) {
  std::vector<cplx> v;
  for (unsigned j = 0; j < n; ++j) v.push_back(std::polar(1.0, 2 * kPi * j / n));
  return from_values(v);
}

// sum over x_1 ... x_k = 1 in F_p^* of psi(x_1 + ... + x_k), by brute force
cplx kl_at_one(unsigned k, u64 p) {
  if (k == 1) return e_p(1, p);
  cplx acc = 0;
  std::vector<u64> xs(k - 1, 1);
  while (true) {
    u64 prod = 1, sum = 0;
    for (u64 x : xs) {
      prod = prod * x % p;
      sum += x;
    }
    // last variable is 1 / prod
    u64 inv = 1;
    for (u64 b = prod, e = p - 2; e; e >>= 1, b = b * b % p) {
      if (e & 1) inv = inv * b % p;
    }
    acc += e_p((sum + inv) % p, p);
    std::size_t pos = xs.size();
    while (pos > 0 && ++xs[pos - 1] == p) xs[--pos] = 1;
    if (pos == 0) break;
  }
  return acc;
}

EmpiricalFamily gauss_family(u32 p, unsigned n) {
  auto gm = GroupModel::gm(make_tower(p, n), 1);
  auto s = group_structure(gm, n);
  return family_from_sums(gm, SumFamily::gauss(), n, {CharCoset::point(Character::trivial(s))});
}

}  // namespace

TEST_CASE("reference groups") {
  const auto su2 = ReferenceGroup::su2();
  const double catalan[] = {1, 1, 2, 5};
  for (unsigned m = 0; m < 4; ++m) {
    CHECK(su2.haar_moment(2 * m).real() == catalan[m]);
    CHECK(su2.haar_moment(2 * m + 1).real() == 0);
    CHECK(std::abs(su2_moment_numeric(2 * m) - catalan[m]) < 1e-6);
    CHECK(std::abs(su2_moment_numeric(2 * m + 1)) < 1e-6);
  }
  CHECK(check_reference_moments());
  CHECK(ReferenceGroup::u1().haar_moment(0) == cplx(1, 0));
  CHECK(ReferenceGroup::u1().haar_moment(3) == cplx(0, 0));
  const auto c4 = ReferenceGroup::cyclic(4);
  CHECK(c4.haar_moment(8) == cplx(1, 0));
  CHECK(c4.haar_moment(6) == cplx(0, 0));
  CHECK(c4.name() == "C4");
  CHECK_THROWS_AS(ReferenceGroup::cyclic(0), Error);
}

TEST_CASE("Weyl sums of explicit families") {
  SUBCASE("roots of unity are U1-uniform below N") {
    const auto r = weyl_report(roots_family(7), ReferenceGroup::u1(), 7);
    for (const auto& row : r.moments) {
      if (row.k < 7) {
        CHECK(row.deviation < 1e-12);
      } else {
        CHECK(std::abs(row.deviation - 1) < 1e-12);
      }
    }
  }
  SUBCASE("roots of unity match the cyclic reference exactly") {
    const auto r = weyl_report(roots_family(5), ReferenceGroup::cyclic(5), 12);
    CHECK(r.max_deviation() < 1e-12);
  }
  SUBCASE("a constant family is reported, not rejected") {
    const auto r = weyl_report(from_values({0.6, 0.6, 0.6}), ReferenceGroup::u1(), 2);
    CHECK(std::abs(r.moments[0].deviation - 0.6) < 1e-15);
    CHECK(std::abs(r.moments[1].deviation - 0.36) < 1e-15);
  }
  SUBCASE("empty") {
    try {
      weyl_report(EmpiricalFamily{}, ReferenceGroup::u1(), 2);
      FAIL("expected EmptyFamily");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::EmptyFamily);
    }
  }
}

TEST_CASE("family_from_sums") {
  SUBCASE("Gauss family over F_7") {
    auto gm = GroupModel::gm(make_tower(7, 1), 1);
    auto s = group_structure(gm, 1);
    const auto triv = CharCoset::point(Character::trivial(s));
    const auto fam = family_from_sums(gm, SumFamily::gauss(), 1, {triv});
    CHECK(fam.entries.size() == 5);
    for (const auto& e : fam.entries) {
      CHECK(e.key_kind == "char");
      CHECK_FALSE(triv.contains_code(e.key));
      CHECK(std::abs(std::abs(e.value) - 1) < 1e-9);
      const auto chi = Character::from_code(s, e.key);
      CHECK(std::abs(e.value + gauss_sum(chi) / std::sqrt(7.0)) < 1e-9);
    }
  }
  SUBCASE("Kloosterman Mellin family over F_11") {
    auto gm = GroupModel::gm(make_tower(11, 1), 1);
    auto s = group_structure(gm, 1);
    const auto fam = family_from_sums(gm, SumFamily::kloosterman(), 1, {CharCoset::point(Character::trivial(s))});
    CHECK(fam.entries.size() == 9);
    for (const auto& e : fam.entries) {
      const cplx g = gauss_sum(Character::from_code(s, e.key));
      CHECK(std::abs(e.value + g * g / 11.0) < 1e-9);
      CHECK(std::abs(std::abs(e.value) - 1) < 1e-9);
    }
  }
  SUBCASE("excluding everything") {
    auto gm = GroupModel::gm(make_tower(5, 1), 1);
    auto s = group_structure(gm, 1);
    try {
      family_from_sums(gm, SumFamily::gauss(), 1, {CharCoset::full(s)});
      FAIL("expected EmptyFamily");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::EmptyFamily);
    }
  }
  SUBCASE("model mismatch") {
    auto ga = GroupModel::ga(make_tower(5, 1), 1);
    CHECK_THROWS_AS(family_from_sums(ga, SumFamily::gauss(), 1, {}), Error);
  }
}

TEST_CASE("Gauss family Weyl sums against the Kloosterman reduction") {
  for (u32 p : {5u, 7u, 11u, 13u, 31u}) {
    const auto r = weyl_report(gauss_family(p, 1), ReferenceGroup::u1(), 4);
    const double q = p;
    for (const auto& row : r.moments) {
      const unsigned k = row.k;
      const double sign = k % 2 ? -1.0 : 1.0;
      const cplx total = std::pow(-1 / std::sqrt(q), static_cast<int>(k)) * ((q - 1) * kl_at_one(k, p) - sign);
      CHECK(std::abs(row.empirical - total / (q - 2)) < 1e-9);
    }
  }
}

TEST_CASE("Gauss family Weyl decay") {
  for (u32 p : {101u, 257u}) {
    const auto r = weyl_report(gauss_family(p, 1), ReferenceGroup::u1(), 4);
    CHECK(r.size == p - 2);
    for (const auto& row : r.moments) CHECK(row.deviation <= (row.k + 2) / std::sqrt(double(p)));
  }
}

TEST_CASE("on-average reports") {
  SUBCASE("uniform families average to zero") {
    const std::vector<EmpiricalFamily> fams = {roots_family(8), roots_family(9), roots_family(10)};
    const auto r = on_average_report(fams, ReferenceGroup::u1(), 5);
    for (const auto& row : r.averaged) CHECK(row.deviation < 1e-12);
  }
  SUBCASE("one family is the plain report") {
    const std::vector<EmpiricalFamily> fams = {gauss_family(13, 1)};
    const auto avg = on_average_report(fams, ReferenceGroup::u1(), 3);
    const auto one = weyl_report(fams[0], ReferenceGroup::u1(), 3);
    for (std::size_t j = 0; j < 3; ++j) CHECK(avg.averaged[j].empirical == one.moments[j].empirical);
  }
  SUBCASE("Gauss families over F_5, F_25, F_125") {
    std::vector<EmpiricalFamily> fams;
    for (unsigned n = 1; n <= 3; ++n) fams.push_back(gauss_family(5, n));
    const auto r = on_average_report(fams, ReferenceGroup::u1(), 4);
    CHECK(r.per_n.size() == 3);
    for (const auto& row : r.averaged) {
      double bound = 0;
      for (unsigned n = 1; n <= 3; ++n) bound = std::max(bound, (row.k + 2) / std::pow(5.0, n / 2.0));
      CHECK(row.deviation <= bound);
    }
  }
  CHECK_THROWS_AS(on_average_report({}, ReferenceGroup::u1(), 2), Error);
}

TEST_CASE("Kloosterman traces against SU2") {
  const u32 p = 1009;
  const double q = p;
  const auto r = weyl_report(kloosterman_trace_family(p), ReferenceGroup::su2(), 4);
  // sum_a Kl = 1 and sum_a Kl^2 = q^2 - q - 1
  CHECK(std::abs(r.moments[0].empirical.real() + 1 / (std::sqrt(q) * (q - 1))) < 1e-12);
  CHECK(std::abs(r.moments[1].empirical.real() - 1 + 1 / (q * (q - 1))) < 1e-12);
  CHECK(r.max_deviation() < 0.2);
}

TEST_CASE("angle histogram") {
  CHECK(principal_angle(cplx(-1, 0)) == doctest::Approx(kPi));
  CHECK(principal_angle(cplx(-1, -0.0)) == doctest::Approx(kPi));
  std::vector<cplx> vals;
  for (double a : {0.1, 1.7, 2.0, -3.0, -1.0}) vals.push_back(std::polar(1.0, a));
  // slices (-pi, -pi/2], (-pi/2, 0], (0, pi/2], (pi/2, pi]
  CHECK(angle_histogram(from_values(vals), 4) == std::vector<u64>{1, 1, 1, 2});
  const auto h2 = angle_histogram(from_values({cplx(-1, -0.0)}), 3);
  CHECK(h2 == std::vector<u64>{0, 0, 1});
}
