#include "doctest.h"

#include <set>

#include "charlab/error.hpp"
#include "charlab/field.hpp"

using namespace charlab;

TEST_CASE("make_field basic sizes and errors") {
  CHECK(make_field(2, 1)->size() == 2);
  CHECK(make_field(3, 2)->size() == 9);
  CHECK(make_field(5, 3)->size() == 125);
  CHECK_THROWS_AS(make_field(4, 1), Error);
  try {
    make_field(9, 2);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NonPrime);
  }
  try {
    make_field(2, 25);
    FAIL("expected SizeCap");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::SizeCap);
  }
}

TEST_CASE("modulus is the smallest irreducible and deterministic") {
  CHECK(make_field(2, 2)->modulus() == std::vector<u32>{1, 1, 1});
  CHECK(make_field(3, 2)->modulus() == std::vector<u32>{1, 0, 1});
  CHECK(make_field(2, 3)->modulus() == std::vector<u32>{1, 1, 0, 1});
  // Brute-force oracle: a degree-2/3 polynomial is irreducible iff rootless.
  for (u32 p : {2u, 3u, 5u, 7u}) {
    for (unsigned n : {2u, 3u}) {
      const auto f = make_field(p, n)->modulus();
      auto rootless = [&](const std::vector<u32>& poly) {
        for (u32 x = 0; x < p; ++x) {
          u64 v = 0;
          for (std::size_t i = poly.size(); i-- > 0;) v = (v * x + poly[i]) % p;
          if (v == 0) return false;
        }
        return true;
      };
      CHECK(rootless(f));
      // every smaller candidate has a root
      const u64 code = [&] {
        u64 c = 0;
        for (unsigned i = n; i-- > 0;) c = c * p + f[i];
        return c;
      }();
      for (u64 k = 0; k < code; ++k) {
        std::vector<u32> cand(n + 1, 0);
        cand[n] = 1;
        u64 r = k;
        for (unsigned i = 0; i < n; ++i) {
          cand[i] = static_cast<u32>(r % p);
          r /= p;
        }
        CHECK_FALSE(rootless(cand));
      }
    }
  }
  CHECK(make_field(5, 3).get() == make_field(5, 3).get());
}

TEST_CASE("multiplicative group of F_125 is cyclic of order 124") {
  const auto f = make_field(5, 3);
  std::set<u32> seen;
  u32 x = 1;
  for (int i = 0; i < 124; ++i) {
    seen.insert(x);
    x = f->mul(x, f->generator());
  }
  CHECK(x == 1);
  CHECK(seen.size() == 124);
}

TEST_CASE("field axioms on small fields, table and schoolbook paths agree") {
  for (auto [p, n] : {std::pair{2u, 4u}, {3u, 3u}, {5u, 2u}, {7u, 1u}, {2u, 17u}, {3u, 11u}}) {
    const auto f = make_field(p, n);
    const u32 step = std::max<u32>(1, f->size() / 61);
    for (u32 a = 0; a < f->size(); a += step) {
      for (u32 b = 0; b < f->size(); b += step) {
        CHECK(f->add(a, f->neg(a)) == 0);
        CHECK(f->add(a, b) == f->add(b, a));
        CHECK(f->mul(a, b) == f->mul(b, a));
        if (a != 0) CHECK(f->mul(a, f->inv(a)) == 1);
        const u32 c = (a + b + 1) % f->size();
        CHECK(f->mul(a, f->add(b, c)) == f->add(f->mul(a, b), f->mul(a, c)));
      }
    }
  }
}

TEST_CASE("frobenius on F_4") {
  const auto f4 = make_field(2, 2);
  const FieldElem omega(f4, 2);  // the class of x, a root of x^2 + x + 1
  CHECK((omega * omega).code() == 3);
  CHECK(frobenius(omega, 1).code() == (omega * omega).code());
  CHECK(frobenius(FieldElem(f4, 1), 1).code() == 1);
  CHECK(frobenius(FieldElem(f4, 0), 1).code() == 0);
  CHECK_THROWS_AS(frobenius(omega, 3), Error);
  // Fr^n is the identity
  const auto f = make_field(3, 4);
  for (u32 x = 0; x < f->size(); ++x) {
    u32 y = x;
    for (int i = 0; i < 4; ++i) y = f->frobenius(y, 1);
    CHECK(y == x);
  }
}

TEST_CASE("trace and norm examples") {
  const auto f4 = make_field(2, 2);
  CHECK(abs_trace(FieldElem(f4, 2), 1).code() == 1);
  CHECK(abs_trace(FieldElem(f4, 0), 1).code() == 0);
  CHECK(abs_norm(FieldElem(f4, 1), 1).code() == 1);
  const auto f9 = make_field(3, 2);
  for (u32 x = 0; x < 9; ++x) CHECK(f9->norm(x, 1) == f9->pow(x, 4));
  const u32 g = f9->generator();
  const u32 ng = f9->norm(g, 1);
  CHECK(ng == 2);  // generator of F_3^*
  CHECK_THROWS_AS(abs_norm(FieldElem(f9, 1), 3), Error);
}

TEST_CASE("frobenius fixed field has p^m elements") {
  for (auto [p, n] : {std::pair{2u, 6u}, {3u, 4u}, {5u, 2u}, {2u, 12u}}) {
    const auto f = make_field(p, n);
    for (u64 m : divisors(n)) {
      u64 fixed = 0;
      for (u32 x = 0; x < f->size(); ++x) fixed += f->in_subfield(x, static_cast<unsigned>(m));
      CHECK(fixed == ipow(p, static_cast<unsigned>(m)));
    }
  }
}

TEST_CASE("tower embeddings are compatible ring homomorphisms") {
  for (auto [p, top] : {std::pair{2u, 12u}, {3u, 6u}, {5u, 4u}, {7u, 4u}, {2u, 8u}}) {
    const auto tower = make_tower(p, top);
    const auto ds = divisors(top);
    for (u64 m : ds) {
      for (u64 r : ds) {
        if (r % m) continue;
        for (u64 n : ds) {
          if (n % r) continue;
          const auto& fm = *tower->field(static_cast<unsigned>(m));
          const auto& fn = *tower->field(static_cast<unsigned>(n));
          for (u32 x = 0; x < fm.size(); ++x) {
            const u32 direct = tower->embed(x, m, n);
            const u32 chained = tower->embed(tower->embed(x, m, r), r, n);
            REQUIRE(direct == chained);
            REQUIRE(tower->restrict_to(direct, n, m) == x);
            REQUIRE(fn.in_subfield(direct, static_cast<unsigned>(m)));
          }
          // ring homomorphism fixing F_p, checked on a grid
          const u32 step = std::max<u32>(1, fm.size() / 23);
          for (u32 a = 0; a < fm.size(); a += step) {
            for (u32 b = 0; b < fm.size(); b += step) {
              CHECK(tower->embed(fm.mul(a, b), m, n) == fn.mul(tower->embed(a, m, n), tower->embed(b, m, n)));
              CHECK(tower->embed(fm.add(a, b), m, n) == fn.add(tower->embed(a, m, n), tower->embed(b, m, n)));
            }
            if (a < p) CHECK(tower->embed(a, m, n) == a);
          }
        }
      }
    }
  }
}

TEST_CASE("trace and norm are transitive through a tower") {
  const auto tower = make_tower(2, 12);
  for (auto [m, r, n] : {std::tuple{1u, 2u, 4u}, {1u, 3u, 6u}, {2u, 4u, 12u}, {1u, 6u, 12u}}) {
    const auto& fn = *tower->field(n);
    const auto& fr = *tower->field(r);
    for (u32 x = 0; x < fn.size(); x += (fn.size() > 4096 ? 7 : 1)) {
      const u32 direct = fn.trace(x, m);
      const u32 inner = *tower->restrict_to(fn.trace(x, r), n, r);
      const u32 chained = tower->embed(fr.trace(inner, m), r, n);
      REQUIRE(direct == chained);
      const u32 ninner = *tower->restrict_to(fn.norm(x, r), n, r);
      REQUIRE(fn.norm(x, m) == tower->embed(fr.norm(ninner, m), r, n));
    }
  }
}

TEST_CASE("size cap can be lowered but not raised") {
  set_field_size_cap(1000);
  CHECK_THROWS_AS(make_field(2, 10), Error);
  set_field_size_cap(u64{1} << 30);
  CHECK(field_size_cap() == kFieldSizeCap);
  CHECK(make_field(2, 10)->size() == 1024);
}
