#include "doctest.h"

#include <cmath>
#include <random>
#include <set>

#include "charlab/error.hpp"
#include "charlab/group.hpp"

using namespace charlab;

namespace {

GroupModel curve_y2_x3_x(u32 p, unsigned top) {
  return GroupModel::elliptic_curve(make_tower(p, top), 1, 1, 0);
}

std::vector<GroupModel> connected_models(u32 p, unsigned e, unsigned top) {
  auto t = make_tower(p, top);
  std::vector<GroupModel> out{GroupModel::ga(t, e), GroupModel::gm(t, e), GroupModel::gm(t, e, 2),
                              GroupModel::norm_one_torus(t, e),
                              GroupModel::product({GroupModel::gm(t, e), GroupModel::ga(t, e)})};
  if (p > 3) out.push_back(GroupModel::elliptic_curve(t, e, 1, 0));
  return out;
}

}  // namespace

TEST_CASE("enumerate_points examples") {
  CHECK(enumerate_points(GroupModel::gm(make_tower(2, 2), 1), 2).size() == 3);

  // NormOneTorus over F_3: oracle counts x in F_9^* with x^4 = 1.
  const auto f9 = make_field(3, 2);
  u64 oracle = 0;
  for (u32 x = 1; x < 9; ++x) oracle += f9->pow(x, 4) == 1;
  CHECK(oracle == 4);
  CHECK(enumerate_points(GroupModel::norm_one_torus(make_tower(3, 1), 1), 1).size() == oracle);

  // y^2 = x^3 + x over F_5: brute force over all (x, y).
  const auto pts = enumerate_points(curve_y2_x3_x(5, 1), 1);
  std::vector<Point> brute{{1, {0, 0, 0}}};
  for (u32 x = 0; x < 5; ++x) {
    for (u32 y = 0; y < 5; ++y) {
      if ((y * y) % 5 == (x * x * x + x) % 5) brute.push_back({1, {1, x, y}});
    }
  }
  CHECK(pts == brute);
  CHECK(pts.size() == 4);
  CHECK(pts[1].coords == std::vector<u32>{1, 0, 0});
  CHECK(pts[2].coords == std::vector<u32>{1, 2, 0});
  CHECK(pts[3].coords == std::vector<u32>{1, 3, 0});
}

TEST_CASE("torus orders are q^n - (-1)^n") {
  for (u32 p : {2u, 3u, 5u}) {
    auto t = make_tower(p, 4);
    const auto torus = GroupModel::norm_one_torus(t, 1);
    for (unsigned n : {1u, 2u, 4u}) {
      const i64 qn = static_cast<i64>(ipow(p, n));
      const i64 expected = qn - (n % 2 ? -1 : 1);
      const auto pts = enumerate_points(torus, n);
      CHECK(static_cast<i64>(pts.size()) == expected);
      for (const auto& x : pts) CHECK(torus.contains(x));
    }
  }
}

TEST_CASE("enumeration is sorted, duplicate free, and respects the cap") {
  const auto g = GroupModel::product({GroupModel::gm(make_tower(5, 2), 1), GroupModel::ga(make_tower(5, 2), 1)});
  const auto pts = enumerate_points(g, 2);
  CHECK(std::is_sorted(pts.begin(), pts.end()));
  CHECK(std::set<Point>(pts.begin(), pts.end()).size() == pts.size());
  CHECK(pts.size() == 24 * 25);
  // Cartesian product in order
  const auto a = enumerate_points(g.factors()[0], 2);
  const auto b = enumerate_points(g.factors()[1], 2);
  std::size_t i = 0;
  for (const auto& x : a) {
    for (const auto& y : b) {
      Point c = x;
      c.coords.insert(c.coords.end(), y.coords.begin(), y.coords.end());
      CHECK(pts[i++] == c);
    }
  }
  try {
    enumerate_points(GroupModel::ga(make_tower(7, 4), 1, 4), 4);
    FAIL("expected SizeCap");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::SizeCap);
  }
}

TEST_CASE("model validation") {
  CHECK_THROWS_AS(GroupModel::elliptic_curve(make_tower(3, 1), 1, 1, 0), Error);
  CHECK_THROWS_AS(GroupModel::elliptic_curve(make_tower(5, 1), 1, 0, 0), Error);  // singular
  CHECK_THROWS_AS(GroupModel::mu(make_tower(3, 1), 1, 3), Error);
  const auto g = GroupModel::gm(make_tower(7, 1), 1);
  CHECK_THROWS_AS(g.make_point(1, {0}), Error);
  CHECK(g.make_point(1, {3}).coords[0] == 3);
  CHECK(GroupModel::mu(make_tower(7, 1), 1, 3).pi0() == 3);
  CHECK(curve_y2_x3_x(5, 1).dims().abelian == 1);
}

TEST_CASE("group law properties on random triples") {
  std::mt19937_64 rng(7);
  for (const auto& g : connected_models(7, 1, 2)) {
    const auto pts = enumerate_points(g, 2);
    std::uniform_int_distribution<std::size_t> pick(0, pts.size() - 1);
    const Point e = g.identity(2);
    for (int t = 0; t < 200; ++t) {
      const auto& a = pts[pick(rng)];
      const auto& b = pts[pick(rng)];
      const auto& c = pts[pick(rng)];
      REQUIRE(g.contains(g.mul(a, b)));
      CHECK(g.mul(a, b) == g.mul(b, a));
      CHECK(g.mul(g.mul(a, b), c) == g.mul(a, g.mul(b, c)));
      CHECK(g.mul(a, g.inv(a)) == e);
      CHECK(g.mul(a, e) == a);
    }
  }
}

TEST_CASE("trace_map examples") {
  auto t4 = make_tower(2, 2);
  const auto ga = GroupModel::ga(t4, 1);
  const Point omega{2, {2}};
  CHECK(trace_map(ga, omega, 1).coords == std::vector<u32>{1});
  CHECK(trace_map(ga, omega, 2) == omega);
  CHECK_THROWS_AS(trace_map(ga, omega, 3), Error);

  auto t9 = make_tower(3, 2);
  const auto gm = GroupModel::gm(t9, 1);
  const auto f9 = t9->field(2);
  std::set<u32> image;
  for (const auto& x : enumerate_points(gm, 2)) {
    const Point tr = trace_map(gm, x, 1);
    CHECK(t9->embed(tr.coords[0], 1, 2) == f9->pow(x.coords[0], 4));
    image.insert(tr.coords[0]);
  }
  CHECK(image == std::set<u32>{1, 2});
}

TEST_CASE("trace transitivity") {
  for (const auto& g : connected_models(5, 1, 4)) {
    for (const auto& x : enumerate_points(g, 4)) {
      if (x.coords.size() > 1 && (x.coords[0] + x.coords.back()) % 5 != 0) continue;
      CHECK(trace_map(g, x, 1) == trace_map(g, trace_map(g, x, 2), 1));
    }
  }
}

TEST_CASE("lang_map examples") {
  auto t9 = make_tower(3, 2);
  const auto gm = GroupModel::gm(t9, 1);
  const auto f9 = t9->field(2);
  for (const auto& x : enumerate_points(gm, 1)) CHECK(lang_map(gm, gm.embed(x, 2), 1) == gm.identity(2));
  std::set<u32> kernel;
  for (const auto& x : enumerate_points(gm, 2)) {
    const Point l = lang_map(gm, x, 1);
    CHECK(l.coords[0] == f9->mul(x.coords[0], x.coords[0]));
    if (l == gm.identity(2)) kernel.insert(x.coords[0]);
  }
  CHECK(kernel == std::set<u32>{1, 2});
  CHECK_THROWS_AS(lang_map(gm, Point{1, {1}}, 2), Error);
}

TEST_CASE("lang image has index |G(k_n)| for connected models") {
  for (auto [p, top] : {std::pair{3u, 4u}, {5u, 2u}, {7u, 2u}, {2u, 6u}}) {
    for (const auto& g : connected_models(p, 1, top)) {
      for (u64 n : divisors(top)) {
        if (g.estimated_order(top) > 10'000) continue;
        const auto chk = check_lang_sequence(g, static_cast<unsigned>(n), top);
        CHECK(chk.lang_image * chk.order_n == chk.order_m);
        CHECK(chk.exact());
        CHECK(chk.coinvariants == chk.order_1);
      }
    }
  }
}

TEST_CASE("lang sequence fails for a disconnected model") {
  // mu_3 over F_7: Fr acts trivially and Tr_{k_3/k} is x -> x^3 = 1.
  auto t = make_tower(7, 3);
  const auto mu3 = GroupModel::mu(t, 1, 3);
  const auto chk = check_lang_sequence(mu3, 1, 3);
  CHECK(chk.kernel_is_g_n);
  CHECK(chk.lang_image == 1);
  CHECK(chk.trace_image == 1);
  CHECK_FALSE(chk.trace_surjective);
  CHECK_FALSE(chk.image_is_trace_kernel);
  // at degree 2 squaring on mu_3 is bijective and the sequence is exact
  CHECK(check_lang_sequence(GroupModel::mu(make_tower(7, 2), 1, 3), 1, 2).exact());
}

TEST_CASE("pushforward_count examples") {
  auto t7 = make_tower(7, 1);
  const auto gm7 = GroupModel::gm(t7, 1);
  const auto sq = pushforward_count(GroupHom::power(gm7, 2), 1);
  CHECK(sq.kernel == 2);
  CHECK(sq.image == 3);
  CHECK(sq.cokernel == 2);

  const auto cube = pushforward_count(GroupHom::power(GroupModel::gm(make_tower(5, 1), 1), 3), 1);
  CHECK(cube.kernel == 1);
  CHECK(cube.cokernel == 1);

  auto t5 = make_tower(5, 2);
  const auto gm2 = GroupModel::product({GroupModel::gm(t5, 1), GroupModel::gm(t5, 1)});
  for (unsigned n : {1u, 2u}) {
    CHECK(pushforward_count(GroupHom::projection(gm2, {0}), n).cokernel == 1);
    CHECK(pushforward_count(GroupHom::multiplication(gm2), n).cokernel == 1);
  }
}

TEST_CASE("component_trace_image") {
  auto t = make_tower(7, 6);
  const auto mu3 = GroupModel::mu(t, 1, 3);
  const auto a = component_trace_image(mu3, 3, 1);
  CHECK(a.image == std::vector<Point>{mu3.identity(1)});
  CHECK(a.equals_identity_component);
  CHECK(a.index_divisible);
  const auto b = component_trace_image(mu3, 2, 1);
  CHECK(b.image.size() == 3);
  CHECK_FALSE(b.contained_in_identity_component);
  for (const auto& g : connected_models(7, 1, 2)) {
    const auto c = component_trace_image(g, 2, 1);
    CHECK(c.image == enumerate_points(g, 1));
  }
  // disconnected product Gm x mu_3 at n/m = 3
  const auto prod = GroupModel::product({GroupModel::gm(t, 1), mu3});
  const auto d = component_trace_image(prod, 3, 1);
  CHECK(d.equals_identity_component);
  CHECK(d.image.size() == 6);
}

TEST_CASE("Hasse bound") {
  for (u32 p : {5u, 7u, 11u, 13u}) {
    auto t = make_tower(p, 3);
    for (auto [a, b] : {std::pair{1u, 0u}, {1u, 1u}, {2u, 3u}}) {
      GroupModel e = [&] {
        try {
          return GroupModel::elliptic_curve(t, 1, a, b);
        } catch (const Error&) {
          return GroupModel::elliptic_curve(t, 1, 1, 0);
        }
      }();
      for (unsigned n : {1u, 3u}) {
        const double qn = std::pow(double(p), n);
        const double count = double(enumerate_points(e, n).size());
        CHECK(std::abs(count - qn - 1) <= 2 * std::sqrt(qn));
      }
    }
  }
}

TEST_CASE("homomorphisms: property and frobenius equivariance") {
  auto t = make_tower(5, 2);
  const auto gm = GroupModel::gm(t, 1);
  const auto gm2 = GroupModel::product({gm, gm});
  const auto e = GroupModel::elliptic_curve(t, 1, 1, 0);
  const auto mixed = GroupModel::product({gm, GroupModel::ga(t, 1)});
  std::vector<GroupHom> homs{GroupHom::power(gm, 2),          GroupHom::power(e, 3),
                             GroupHom::projection(gm2, {1}),  GroupHom::multiplication(gm2),
                             GroupHom::projection(mixed, {1}), GroupHom::to_trivial(mixed),
                             GroupHom::identity(e)};
  for (const auto& f : homs) {
    CHECK(verify_hom(f, 1));
    CHECK(verify_hom(f, 1, 0, 200));  // sampled path
    for (unsigned n : {1u, 2u}) CHECK(verify_frobenius_equivariance(f, n));
  }
  CHECK(GroupHom::multiplication(gm2).kernel_dims().toric == 1);
  CHECK(GroupHom::to_trivial(mixed).kernel_dims().character_dim() == 2);
  CHECK(GroupHom::power(gm, 2).kernel_dims().character_dim() == 0);
  CHECK_THROWS_AS(GroupHom::multiplication(mixed), Error);
  CHECK_THROWS_AS(GroupHom::projection(gm, {0}), Error);
}

TEST_CASE("norm inclusion into Gm over the quadratic extension") {
  for (u32 p : {2u, 3u, 5u}) {
    auto t = make_tower(p, 6);
    const auto torus = GroupModel::norm_one_torus(t, 1);
    const auto f = GroupHom::norm_inclusion(torus);
    CHECK(verify_hom(f, 3));
    CHECK_FALSE(f.defined_at(2));
    for (unsigned n : {1u, 3u}) {
      const auto counts = pushforward_count(f, n);
      CHECK(counts.kernel == 1);
      CHECK(counts.image == ipow(p, n) + 1);
      // image is the norm-one subgroup: y^{q^n + 1} = 1
      const auto big = f.target().field(n);
      for (const auto& x : enumerate_points(torus, n)) {
        CHECK(big->pow(f.apply(x).coords[0], ipow(p, n) + 1) == 1);
      }
    }
  }
}
