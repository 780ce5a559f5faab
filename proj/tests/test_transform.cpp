#include "doctest.h"

#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "charlab/error.hpp"
#include "charlab/transform.hpp"

using namespace charlab;

namespace {

// exp(2 pi i Tr(x) / p) on a coordinate of F_{q^n}
cplx psi_of(const FieldPtr& f, u32 x) {
  const u32 t = f->trace(x, 1);
  return std::polar(1.0, 2 * std::numbers::pi * t / f->p());
}

TraceFunction random_function(const StructurePtr& s, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  TraceFunction f = TraceFunction::zeros(s);
  for (auto& v : f.values) v = {nd(rng), nd(rng)};
  return f;
}

// Independent O(N^2) transform straight from character values at points.
std::vector<cplx> oracle_dft(const TraceFunction& f) {
  const auto& s = f.domain;
  std::vector<cplx> out;
  for (const auto& chi : dual_group(s)) {
    cplx acc = 0;
    for (u64 i = 0; i < s->order(); ++i) acc += chi.value(s->point(i)) * f.values[i];
    out.push_back(acc);
  }
  return out;
}

double l2(std::span<const cplx> v) {
  double acc = 0;
  for (auto x : v) acc += std::norm(x);
  return acc;
}

std::vector<StructurePtr> small_structures() {
  auto t5 = make_tower(5, 2);
  auto t3 = make_tower(3, 2);
  return {group_structure(GroupModel::gm(make_tower(7, 1), 1), 1),
          group_structure(GroupModel::ga(t3, 1), 2),
          group_structure(GroupModel::norm_one_torus(t5, 1), 2),
          group_structure(GroupModel::elliptic_curve(t5, 1, 1, 0), 2),
          group_structure(GroupModel::product({GroupModel::gm(t5, 1), GroupModel::ga(t5, 1)}), 1),
          group_structure(GroupModel::gm(make_tower(67, 1), 1), 1),
          group_structure(GroupModel::gm(t5, 1, 2), 1)};
}

}  // namespace

TEST_CASE("dft matches the direct character sum") {
  std::mt19937_64 rng(1);
  for (const auto& s : small_structures()) {
    CAPTURE(s->model().name());
    const auto f = random_function(s, rng);
    const auto ref = dft(f, DftMethod::Reference);
    CHECK(max_relative_error(ref.values, oracle_dft(f)) < 1e-12);
    CHECK(max_relative_error(dft(f, DftMethod::Fast).values, ref.values) < 1e-9);
  }
}

TEST_CASE("dft examples") {
  const auto s = group_structure(GroupModel::gm(make_tower(5, 1), 1), 1);
  const auto e = s->model().identity(1);
  for (auto v : dft(TraceFunction::delta(s, e)).values) CHECK(std::abs(v - cplx(1)) < 1e-15);
  const auto one = dft(TraceFunction::from(s, [](const Point&) { return cplx(1); }));
  for (u64 c = 0; c < s->order(); ++c) CHECK(std::abs(one.values[c] - cplx(c == 0 ? 4.0 : 0.0)) < 1e-12);

  Character legendre = Character::trivial(s);
  for (const auto& chi : dual_group(s)) {
    if (chi.order() == 2) legendre = chi;
  }
  const auto spec = dft(TraceFunction::character(legendre));
  CHECK(std::abs(spec.at(legendre) - cplx(4)) < 1e-12);
}

TEST_CASE("round trip, Plancherel and the double transform") {
  std::mt19937_64 rng(2);
  const auto s = group_structure(GroupModel::gm(make_tower(7, 1), 1), 1);
  for (int t = 0; t < 100; ++t) {
    const auto f = random_function(s, rng);
    const auto F = dft(f);
    CHECK(max_relative_error(inverse_dft(F).values, f.values) < 1e-9);
    CHECK(std::abs(l2(f.values) - l2(F.values) / s->order()) < 1e-9 * l2(f.values));
    const auto back = dual_dft(F);
    const auto inv = inversion_permutation(*s);
    std::vector<cplx> expect(s->order());
    for (u64 i = 0; i < s->order(); ++i) expect[i] = static_cast<double>(s->order()) * f.values[inv[i]];
    CHECK(max_relative_error(back.values, expect) < 1e-9);
  }
  for (const auto& s2 : small_structures()) {
    for (u64 i = 0; i < std::min<u64>(s2->order(), 20); ++i) {
      const Point a = s2->point(i);
      const auto dd = dual_dft(dft(TraceFunction::delta(s2, a)));
      const u64 ai = s2->index_of(s2->model().inv(a));
      for (u64 x = 0; x < s2->order(); ++x) {
        CHECK(std::abs(dd.values[x] - cplx(x == ai ? double(s2->order()) : 0.0)) < 1e-9 * s2->order());
      }
    }
  }
}

TEST_CASE("convolution") {
  std::mt19937_64 rng(3);
  for (const auto& s : small_structures()) {
    CAPTURE(s->model().name());
    const auto& g = s->model();
    const auto f = random_function(s, rng), h = random_function(s, rng), k = random_function(s, rng);
    const auto fh = convolve(f, h);
    // direct oracle through the group law
    std::vector<cplx> direct(s->order(), 0);
    for (u64 x = 0; x < s->order(); ++x) {
      for (u64 y = 0; y < s->order(); ++y) {
        direct[s->index_of(g.mul(s->point(x), s->point(y)))] += f.values[x] * h.values[y];
      }
    }
    CHECK(max_relative_error(fh.values, direct) < 1e-12);
    const auto F = dft(f), H = dft(h), FH = dft(fh);
    std::vector<cplx> prod(s->order());
    for (u64 c = 0; c < s->order(); ++c) prod[c] = F.values[c] * H.values[c];
    CHECK(max_relative_error(FH.values, prod) < 1e-9);
    CHECK(max_relative_error(convolve(h, f).values, fh.values) < 1e-12);
    CHECK(max_relative_error(convolve(fh, k).values, convolve(f, convolve(h, k)).values) < 1e-9);
    CHECK(max_relative_error(convolve(f, TraceFunction::delta(s, g.identity(s->level()))).values, f.values) < 1e-15);
    const Point a = s->point(s->order() / 3), b = s->point(s->order() / 2);
    const auto dab = convolve(TraceFunction::delta(s, a), TraceFunction::delta(s, b));
    CHECK(dab.values == TraceFunction::delta(s, g.mul(a, b)).values);
  }
}

TEST_CASE("Kloosterman value by convolution on Gm(F_5)") {
  auto t = make_tower(5, 1);
  const auto gm = GroupModel::gm(t, 1);
  const auto s = group_structure(gm, 1);
  const auto f = t->field(1);
  const auto psi = TraceFunction::from(s, [&](const Point& x) { return psi_of(f, x.coords[0]); });
  const auto kl = convolve(psi, psi);
  // double-sum oracle: sum over x y = 1 of psi(x + y)
  cplx oracle = 0;
  for (u32 x = 1; x < 5; ++x) {
    for (u32 y = 1; y < 5; ++y) {
      if (x * y % 5 == 1) oracle += psi_of(f, (x + y) % 5);
    }
  }
  const cplx v = kl.at(Point{1, {1}});
  CHECK(std::abs(v - oracle) < 1e-12);
  CHECK(std::abs(v - cplx((3 - std::sqrt(5.0)) / 2)) < 1e-12);

  const auto gm2 = GroupModel::product({gm, gm});
  const auto s2 = group_structure(gm2, 1);
  const auto psi2 = TraceFunction::from(
      s2, [&](const Point& x) { return psi_of(f, x.coords[0]) * psi_of(f, x.coords[1]); });
  const auto pushed = pushforward(psi2, GroupHom::multiplication(gm2));
  CHECK(max_relative_error(pushed.values, kl.values) < 1e-12);
}

TEST_CASE("twist shift identity") {
  const auto s = group_structure(GroupModel::gm(make_tower(7, 1), 1), 1);
  std::mt19937_64 rng(4);
  const auto f = random_function(s, rng);
  const auto F = dft(f);
  int pairs = 0;
  for (const auto& chi : dual_group(s)) {
    const auto G = dft(twist(f, chi));
    for (const auto& eta : dual_group(s)) {
      CHECK(std::abs(G.at(eta) - F.at(chi * eta)) < 1e-12);
      ++pairs;
    }
    for (auto v : dft(twist(TraceFunction::delta(s, s->model().identity(1)), chi)).values) {
      CHECK(std::abs(v - cplx(1)) < 1e-15);
    }
  }
  CHECK(pairs == 36);
  CHECK(twist(f, Character::trivial(s)).values == f.values);
}

TEST_CASE("pushforward and the projection formula") {
  std::mt19937_64 rng(5);
  auto t = make_tower(7, 1);
  const auto gm = GroupModel::gm(t, 1);
  const auto s = group_structure(gm, 1);
  const auto f0 = random_function(s, rng);
  CHECK(pushforward(f0, GroupHom::identity(gm)).values == f0.values);

  const auto gm2 = GroupModel::product({gm, gm});
  const auto s2 = group_structure(gm2, 1);
  const std::vector<GroupHom> homs{GroupHom::power(gm, 2), GroupHom::power(gm, 3), GroupHom::multiplication(gm2),
                                   GroupHom::projection(gm2, {1})};
  for (const auto& h : homs) {
    const auto src = group_structure(h.source(), 1);
    const auto tgt = group_structure(h.target(), 1);
    std::uniform_int_distribution<u64> pick(0, tgt->order() - 1);
    for (int k = 0; k < 50; ++k) {
      const auto f = random_function(src, rng);
      const auto chi = Character::from_code(tgt, pick(rng));
      const auto lhs = pushforward(twist(f, pullback(chi, h)), h);
      const auto rhs = twist(pushforward(f, h), chi);
      CHECK(max_relative_error(lhs.values, rhs.values) < 1e-12);
      // fibre enumeration order does not matter, bit for bit
      std::vector<u64> order(src->order());
      std::iota(order.begin(), order.end(), 0);
      std::shuffle(order.begin(), order.end(), rng);
      CHECK(pushforward(f, h, order).values == pushforward(f, h).values);
    }
  }
}

TEST_CASE("Fourier-Mellin on Gm x Ga over F_5") {
  auto t = make_tower(5, 1);
  const auto gm = GroupModel::gm(t, 1), ga = GroupModel::ga(t, 1);
  const auto prod = GroupModel::product({gm, ga});
  const auto s = group_structure(prod, 1);
  const auto ss = group_structure(gm, 1), us = group_structure(ga, 1);

  const auto one = TraceFunction::from(s, [](const Point&) { return cplx(1); });
  for (const auto& chi : dual_group(ss)) {
    const auto fm = fourier_mellin(one, chi);
    for (u64 c = 0; c < us->order(); ++c) {
      const double expect = chi.is_trivial() && c == 0 ? 20.0 : 0.0;
      CHECK(std::abs(fm.values[c] - cplx(expect)) < 1e-12);
    }
  }

  const auto chi0 = Character::from_code(ss, 1), psi0 = Character::from_code(us, 2);
  const auto sep = TraceFunction::from(s, [&](const Point& x) {
    return chi0.value(Point{1, {x.coords[0]}}) * psi0.value(Point{1, {x.coords[1]}});
  });
  for (const auto& chi : dual_group(ss)) {
    const auto fm = fourier_mellin(sep, chi);
    for (const auto& psi : dual_group(us)) {
      const bool spike = chi == chi0.inverse() && psi == psi0.inverse();
      CHECK(std::abs(fm.at(psi) - cplx(spike ? 20.0 : 0.0)) < 1e-12);
    }
  }

  // agrees with the joint transform and shifts under twists in each factor
  std::mt19937_64 rng(6);
  const auto f = random_function(s, rng), g = random_function(s, rng);
  const auto joint = dft(f);
  const auto proj_s = GroupHom::projection(prod, {0});
  const auto proj_u = GroupHom::projection(prod, {1});
  for (const auto& chi : dual_group(ss)) {
    const auto fm = fourier_mellin(f, chi);
    for (const auto& psi : dual_group(us)) {
      CHECK(std::abs(fm.at(psi) - joint.at(pullback(chi, proj_s) * pullback(psi, proj_u))) < 1e-12);
    }
    TraceFunction sum = f;
    for (u64 i = 0; i < sum.values.size(); ++i) sum.values[i] = 2.0 * f.values[i] - g.values[i];
    const auto lin = fourier_mellin(sum, chi), fg = fourier_mellin(g, chi);
    for (u64 c = 0; c < us->order(); ++c) CHECK(std::abs(lin.values[c] - (2.0 * fm.values[c] - fg.values[c])) < 1e-12);
    const auto eta = Character::from_code(ss, 3);
    const auto shifted = fourier_mellin(twist(f, pullback(eta, proj_s)), chi);
    const auto base = fourier_mellin(f, chi * eta);
    CHECK(max_relative_error(shifted.values, base.values) < 1e-12);
    const auto tau = Character::from_code(us, 4);
    const auto shifted_u = fourier_mellin(twist(f, pullback(tau, proj_u)), chi);
    for (const auto& psi : dual_group(us)) CHECK(std::abs(shifted_u.at(psi) - fm.at(psi * tau)) < 1e-12);
  }

  CHECK_THROWS_AS(fourier_mellin(TraceFunction::zeros(ss), Character::trivial(ss)), Error);
}

TEST_CASE("fast path and parallel determinism") {
  std::mt19937_64 rng(7);
  const std::vector<StructurePtr> big{
      group_structure(GroupModel::gm(make_tower(257, 1), 1), 1),
      group_structure(GroupModel::gm(make_tower(4099, 1), 1), 1),
      group_structure(GroupModel::product({GroupModel::gm(make_tower(67, 1), 1), GroupModel::gm(make_tower(67, 1), 1)}), 1),
      group_structure(GroupModel::ga(make_tower(2, 12), 1), 12)};
  const Executor four(4);
  for (const auto& s : big) {
    CAPTURE(s->model().name());
    const auto f = random_function(s, rng);
    const auto ref = dft(f, DftMethod::Reference);
    const auto fast = dft(f, DftMethod::Fast);
    CHECK(max_relative_error(fast.values, ref.values) < 1e-9);
    CHECK(dft(f, DftMethod::Reference, four).values == ref.values);
    CHECK(dft(f, DftMethod::Fast, four).values == fast.values);
    CHECK(max_relative_error(inverse_dft(fast, DftMethod::Fast).values, f.values) < 1e-9);
  }
}

TEST_CASE("domain mismatches") {
  const auto a = group_structure(GroupModel::gm(make_tower(7, 1), 1), 1);
  const auto b = group_structure(GroupModel::ga(make_tower(7, 1), 1), 1);
  CHECK_THROWS_AS(convolve(TraceFunction::zeros(a), TraceFunction::zeros(b)), Error);
  CHECK_THROWS_AS(twist(TraceFunction::zeros(a), Character::trivial(b)), Error);
}
