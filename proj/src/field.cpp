#include "charlab/field.hpp"

#include <algorithm>
#include <atomic>
#include <map>
#include <mutex>
#include <string>

#include "charlab/error.hpp"

namespace charlab {

namespace {

std::atomic<u64> g_size_cap{kFieldSizeCap};

// Dense polynomials over F_p, low-to-high.
using Poly = std::vector<u64>;

void trim(Poly& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

Poly poly_mod(Poly a, const Poly& f, u64 p) {
  trim(a);
  const std::size_t n = f.size() - 1;
  const u64 lead_inv = powmod(f.back(), p - 2, p);
  while (a.size() > n) {
    const u64 c = mulmod(a.back(), lead_inv, p);
    const std::size_t shift = a.size() - 1 - n;
    for (std::size_t i = 0; i <= n; ++i) {
      a[shift + i] = (a[shift + i] + p - mulmod(c, f[i], p)) % p;
    }
    trim(a);
  }
  return a;
}

Poly poly_mulmod(const Poly& a, const Poly& b, const Poly& f, u64 p) {
  if (a.empty() || b.empty()) return {};
  Poly r(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    for (std::size_t j = 0; j < b.size(); ++j) {
      r[i + j] = (r[i + j] + mulmod(a[i], b[j], p)) % p;
    }
  }
  return poly_mod(std::move(r), f, p);
}

Poly poly_powmod(Poly base, u64 e, const Poly& f, u64 p) {
  Poly r{1};
  base = poly_mod(std::move(base), f, p);
  while (e > 0) {
    if (e & 1) r = poly_mulmod(r, base, f, p);
    base = poly_mulmod(base, base, f, p);
    e >>= 1;
  }
  return r;
}

Poly poly_gcd(Poly a, Poly b, u64 p) {
  trim(a);
  trim(b);
  while (!b.empty()) {
    a = poly_mod(std::move(a), b, p);
    std::swap(a, b);
  }
  return a;
}

// x^{p^k} mod f
Poly frobenius_power_of_x(const Poly& f, u64 p, unsigned k) {
  Poly h{0, 1};
  h = poly_mod(h, f, p);
  for (unsigned i = 0; i < k; ++i) h = poly_powmod(h, p, f, p);
  return h;
}

Poly sub_x(Poly h, u64 p) {
  if (h.size() < 2) h.resize(2, 0);
  h[1] = (h[1] + p - 1) % p;
  trim(h);
  return h;
}

void check_prime_and_cap(u32 p, unsigned n) {
  if (!is_prime(p)) throw Error(ErrorKind::NonPrime, "p = " + std::to_string(p) + " is not prime");
  if (n == 0) throw Error(ErrorKind::SizeCap, "extension degree must be >= 1");
  if (ipow_capped(p, n, field_size_cap()) == 0) {
    throw Error(ErrorKind::SizeCap, std::to_string(p) + "^" + std::to_string(n) + " exceeds the field size cap");
  }
}

}  // namespace

u64 field_size_cap() { return g_size_cap.load(); }

void set_field_size_cap(u64 cap) { g_size_cap.store(std::min(cap, kFieldSizeCap)); }

bool is_irreducible(std::span<const u32> poly, u32 p) {
  if (poly.size() < 2 || poly.back() != 1) return false;
  const unsigned n = static_cast<unsigned>(poly.size() - 1);
  if (n == 1) return true;
  const Poly f(poly.begin(), poly.end());
  if (f[0] == 0) return false;
  if (!sub_x(frobenius_power_of_x(f, p, n), p).empty()) return false;
  for (u64 r : prime_factors(n)) {
    const Poly g = poly_gcd(f, sub_x(frobenius_power_of_x(f, p, n / static_cast<unsigned>(r)), p), p);
    if (g.size() != 1) return false;
  }
  return true;
}

std::vector<u32> smallest_irreducible(u32 p, unsigned n) {
  const u64 count = ipow(p, n);
  std::vector<u32> poly(n + 1, 0);
  poly[n] = 1;
  for (u64 k = 0; k < count; ++k) {
    u64 rest = k;
    for (unsigned i = 0; i < n; ++i) {
      poly[i] = static_cast<u32>(rest % p);
      rest /= p;
    }
    if (is_irreducible(poly, p)) return poly;
  }
  throw Error(ErrorKind::InvalidModel, "no irreducible polynomial found");
}

Field::Field(u32 p, unsigned n, std::vector<u32> modulus)
    : p_(p), n_(n), size_(static_cast<u32>(ipow(p, n))), modulus_(std::move(modulus)) {
  digit_pow_.resize(n_ + 1);
  digit_pow_[0] = 1;
  for (unsigned i = 1; i <= n_; ++i) digit_pow_[i] = digit_pow_[i - 1] * p_;
  generator_ = find_generator();
  if (n_ > 1 && size_ <= (1u << 16) && generator_ != 0) build_tables();
}

std::vector<u32> Field::coeffs(u32 code) const {
  std::vector<u32> c(n_);
  for (unsigned i = 0; i < n_; ++i) {
    c[i] = code % p_;
    code /= p_;
  }
  return c;
}

u32 Field::from_coeffs(std::span<const u32> c) const {
  u32 code = 0;
  for (std::size_t i = c.size(); i-- > 0;) code = code * p_ + c[i] % p_;
  return code;
}

u32 Field::from_int(i64 v) const {
  const i64 r = v % static_cast<i64>(p_);
  return static_cast<u32>(r < 0 ? r + p_ : r);
}

u32 Field::neg(u32 a) const {
  if (p_ == 2 || a == 0) return a;
  if (n_ == 1) return p_ - a;
  u32 out = 0;
  for (unsigned i = 0; i < n_; ++i) {
    const u32 d = a % p_;
    a /= p_;
    out += (d == 0 ? 0 : p_ - d) * digit_pow_[i];
  }
  return out;
}

u32 Field::add(u32 a, u32 b) const {
  if (p_ == 2) return a ^ b;
  if (n_ == 1) {
    const u32 s = a + b;
    return s >= p_ ? s - p_ : s;
  }
  if (!zech_.empty()) {
    if (a == 0) return b;
    if (b == 0) return a;
    const u32 q1 = size_ - 1;
    const u32 la = log_[a];
    const u32 d = (log_[b] + q1 - la) % q1;
    const i64 z = zech_[d];
    if (z < 0) return 0;
    return exp_[(la + static_cast<u32>(z)) % q1];
  }
  u32 out = 0;
  for (unsigned i = 0; i < n_; ++i) {
    u32 d = a % p_ + b % p_;
    if (d >= p_) d -= p_;
    a /= p_;
    b /= p_;
    out += d * digit_pow_[i];
  }
  return out;
}

u32 Field::poly_mul(u32 a, u32 b) const {
  // Schoolbook product then reduction by the monic modulus.
  u64 prod[64] = {};
  u32 da[32], db[32];
  for (unsigned i = 0; i < n_; ++i) {
    da[i] = a % p_;
    a /= p_;
    db[i] = b % p_;
    b /= p_;
  }
  for (unsigned i = 0; i < n_; ++i) {
    if (da[i] == 0) continue;
    for (unsigned j = 0; j < n_; ++j) prod[i + j] = (prod[i + j] + u64{da[i]} * db[j]) % p_;
  }
  for (unsigned k = 2 * n_ - 1; k-- > n_;) {
    const u64 c = prod[k];
    if (c == 0) continue;
    prod[k] = 0;
    for (unsigned i = 0; i < n_; ++i) {
      prod[k - n_ + i] = (prod[k - n_ + i] + (p_ - c) * modulus_[i]) % p_;
    }
  }
  u32 out = 0;
  for (unsigned i = n_; i-- > 0;) out = out * p_ + static_cast<u32>(prod[i]);
  return out;
}

u32 Field::mul(u32 a, u32 b) const {
  if (a == 0 || b == 0) return 0;
  if (n_ == 1) return static_cast<u32>(u64{a} * b % p_);
  if (!exp_.empty()) {
    const u32 q1 = size_ - 1;
    u32 s = log_[a] + log_[b];
    if (s >= q1) s -= q1;
    return exp_[s];
  }
  return poly_mul(a, b);
}

u32 Field::pow(u32 a, u64 e) const {
  if (e == 0) return 1;
  if (a == 0) return 0;
  if (!exp_.empty()) {
    const u64 q1 = size_ - 1;
    return exp_[mulmod(log_[a], e % q1, q1)];
  }
  u32 r = 1;
  while (e > 0) {
    if (e & 1) r = mul(r, a);
    a = mul(a, a);
    e >>= 1;
  }
  return r;
}

u32 Field::inv(u32 a) const {
  if (!exp_.empty()) {
    const u32 q1 = size_ - 1;
    return exp_[(q1 - log_[a]) % q1];
  }
  return pow(a, size_ - 2);
}

u32 Field::frobenius(u32 a, unsigned m) const {
  m %= n_;
  if (m == 0 || a < p_) return a;
  return pow(a, ipow(p_, m));
}

u32 Field::trace(u32 a, unsigned m) const {
  u32 acc = 0;
  u32 y = a;
  for (unsigned j = 0; j < n_ / m; ++j) {
    acc = add(acc, y);
    y = frobenius(y, m);
  }
  return acc;
}

u32 Field::norm(u32 a, unsigned m) const {
  u32 acc = 1;
  u32 y = a;
  for (unsigned j = 0; j < n_ / m; ++j) {
    acc = mul(acc, y);
    y = frobenius(y, m);
  }
  return acc;
}

bool Field::in_subfield(u32 a, unsigned m) const { return frobenius(a, m) == a; }

void Field::build_tables() {
  const u32 g = generator_;
  const u32 q1 = size_ - 1;
  exp_.resize(q1);
  log_.assign(size_, 0);
  u32 x = 1;
  for (u32 k = 0; k < q1; ++k) {
    exp_[k] = x;
    log_[x] = k;
    x = poly_mul(x, g);
  }
  zech_.assign(q1, -1);
  for (u32 k = 0; k < q1; ++k) {
    // 1 + g^k: bump the constant digit
    u32 v = exp_[k];
    const u32 c0 = v % p_;
    v = v - c0 + (c0 + 1) % p_;
    zech_[k] = v == 0 ? -1 : static_cast<i64>(log_[v]);
  }
}

u32 Field::find_generator() const {
  if (size_ == 2) return 1;
  const u64 q1 = size_ - 1;
  const auto primes = prime_factors(q1);
  auto slow_pow = [&](u32 a, u64 e) {
    u32 r = 1;
    while (e > 0) {
      if (e & 1) r = n_ == 1 ? static_cast<u32>(u64{r} * a % p_) : poly_mul(r, a);
      a = n_ == 1 ? static_cast<u32>(u64{a} * a % p_) : poly_mul(a, a);
      e >>= 1;
    }
    return r;
  };
  for (u32 g = 1; g < size_; ++g) {
    bool ok = true;
    for (u64 r : primes) {
      if (slow_pow(g, q1 / r) == 1) {
        ok = false;
        break;
      }
    }
    if (ok) return g;
  }
  // Reducible modulus (fault injection): no generator exists.
  return 0;
}

FieldPtr make_field(u32 p, unsigned n) {
  check_prime_and_cap(p, n);
  static std::mutex mu;
  static std::map<std::pair<u32, unsigned>, FieldPtr> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find({p, n});
  if (it != cache.end()) return it->second;
  auto field = std::make_shared<const Field>(p, n, smallest_irreducible(p, n));
  cache.emplace(std::make_pair(p, n), field);
  return field;
}

FieldPtr make_field_unchecked(u32 p, std::vector<u32> modulus) {
  const unsigned n = static_cast<unsigned>(modulus.size() - 1);
  return std::make_shared<const Field>(p, n, std::move(modulus));
}

namespace {
void require_divides(unsigned m, unsigned n) {
  if (m == 0 || n % m != 0) {
    throw Error(ErrorKind::NonDivisor, std::to_string(m) + " does not divide " + std::to_string(n));
  }
}
}  // namespace

FieldElem frobenius(const FieldElem& x, unsigned m) {
  require_divides(m, x.field()->degree());
  return {x.field(), x.field()->frobenius(x.code(), m)};
}

FieldElem abs_trace(const FieldElem& x, unsigned m) {
  require_divides(m, x.field()->degree());
  return {x.field(), x.field()->trace(x.code(), m)};
}

FieldElem abs_norm(const FieldElem& x, unsigned m) {
  require_divides(m, x.field()->degree());
  return {x.field(), x.field()->norm(x.code(), m)};
}

Tower::Tower(u32 p, unsigned top_degree) : p_(p), top_(top_degree) {
  const FieldPtr top = make_field(p, top_degree);
  for (u64 dd : divisors(top_degree)) {
    const auto d = static_cast<unsigned>(dd);
    Level lvl;
    lvl.field = make_field(p, d);
    if (d != top_degree) {
      // Smallest-code root of the subfield modulus inside the top field. All
      // roots lie in the unique subfield of order p^d.
      const auto& f = lvl.field->modulus();
      const u64 step = (u64{top->size()} - 1) / (u64{lvl.field->size()} - 1);
      const u32 h = top->pow(top->generator(), step);
      u32 root = 0;
      bool found = f[0] == 0;  // x itself: the root is 0
      u32 y = 1;
      for (u32 k = 0; k + 1 < lvl.field->size(); ++k, y = top->mul(y, h)) {
        u32 v = 0;
        for (std::size_t i = f.size(); i-- > 0;) v = top->add(top->mul(v, y), f[i]);
        if (v == 0 && (!found || y < root)) {
          root = y;
          found = true;
        }
      }
      if (!found) throw Error(ErrorKind::InvalidModel, "subfield modulus has no root in the top field");
      const u32 sz = lvl.field->size();
      lvl.to_top.resize(sz);
      lvl.from_top.reserve(sz);
      for (u32 x = 0; x < sz; ++x) {
        const auto c = lvl.field->coeffs(x);
        u32 v = 0;
        for (std::size_t i = c.size(); i-- > 0;) v = top->add(top->mul(v, root), c[i]);
        lvl.to_top[x] = v;
        lvl.from_top.emplace(v, x);
      }
    }
    levels_.emplace(d, std::move(lvl));
  }
}

const Tower::Level& Tower::level(unsigned d) const {
  auto it = levels_.find(d);
  if (it == levels_.end()) {
    throw Error(ErrorKind::NonDivisor,
                "degree " + std::to_string(d) + " does not divide tower top " + std::to_string(top_));
  }
  return it->second;
}

const FieldPtr& Tower::field(unsigned degree) const { return level(degree).field; }

u32 Tower::to_top(u32 x, unsigned d) const {
  const Level& l = level(d);
  return l.to_top.empty() ? x : l.to_top[x];
}

u32 Tower::embed(u32 x, unsigned from, unsigned to) const {
  require_divides(from, to);
  if (from == to) return x;
  const u32 t = to_top(x, from);
  const Level& target = level(to);
  if (target.to_top.empty()) return t;
  return target.from_top.at(t);
}

std::optional<u32> Tower::restrict_to(u32 y, unsigned from, unsigned to) const {
  require_divides(to, from);
  if (from == to) return y;
  const u32 t = to_top(y, from);
  const Level& target = level(to);
  auto it = target.from_top.find(t);
  if (it == target.from_top.end()) return std::nullopt;
  return it->second;
}

TowerPtr make_tower(u32 p, unsigned top_degree) {
  check_prime_and_cap(p, top_degree);
  static std::mutex mu;
  static std::map<std::pair<u32, unsigned>, TowerPtr> cache;
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find({p, top_degree});
    if (it != cache.end()) return it->second;
  }
  auto tower = std::make_shared<const Tower>(p, top_degree);
  std::lock_guard<std::mutex> lock(mu);
  return cache.emplace(std::make_pair(p, top_degree), tower).first->second;
}

}  // namespace charlab
