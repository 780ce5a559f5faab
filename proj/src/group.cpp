#include "charlab/group.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <string>

#include "charlab/error.hpp"

namespace charlab {

namespace {

constexpr u32 kNoRoot = 0xffffffffu;

u64 sat_mul(u64 a, u64 b) {
  if (a != 0 && b > ~u64{0} / a) return ~u64{0};
  return a * b;
}

void require_divides(unsigned m, unsigned n, const char* what) {
  if (m == 0 || n % m != 0) {
    throw Error(ErrorKind::NonDivisor,
                std::string(what) + ": " + std::to_string(m) + " does not divide " + std::to_string(n));
  }
}

// Smallest square root of every square in F, kNoRoot otherwise.
std::vector<u32> sqrt_table(const Field& f) {
  std::vector<u32> root(f.size(), kNoRoot);
  for (u32 y = 0; y < f.size(); ++y) {
    const u32 v = f.mul(y, y);
    if (root[v] == kNoRoot) root[v] = y;
  }
  return root;
}

}  // namespace

std::string_view to_string(GroupKind kind) {
  switch (kind) {
    case GroupKind::Ga: return "Ga";
    case GroupKind::Gm: return "Gm";
    case GroupKind::MuR: return "MuR";
    case GroupKind::NormOneTorus: return "NormOneTorus";
    case GroupKind::EllipticCurve: return "EllipticCurve";
    case GroupKind::Product: return "Product";
  }
  return "?";
}

std::shared_ptr<GroupModel::Impl> GroupModel::base_impl(GroupKind kind, TowerPtr tower, unsigned base_degree) {
  if (!tower || !tower->has_degree(base_degree)) {
    throw Error(ErrorKind::InvalidModel, "base field degree does not divide the tower top");
  }
  auto impl = std::make_shared<Impl>();
  impl->kind = kind;
  impl->tower = std::move(tower);
  impl->base_degree = base_degree;
  return impl;
}

void GroupModel::fill_level_params(Impl& impl) {
  const unsigned levels = impl.tower->top_degree() / impl.base_degree;
  impl.level_params.assign(levels + 1, {0, 0});
  for (unsigned n = 1; n <= levels; ++n) {
    if (levels % n != 0) continue;
    for (int i = 0; i < 2; ++i) {
      impl.level_params[n][i] = impl.tower->embed(impl.params[i], impl.base_degree, impl.base_degree * n);
    }
  }
}

GroupModel GroupModel::ga(TowerPtr tower, unsigned base_degree, unsigned d) {
  auto impl = base_impl(GroupKind::Ga, std::move(tower), base_degree);
  impl->d = d;
  impl->width = d;
  return GroupModel(impl);
}

GroupModel GroupModel::gm(TowerPtr tower, unsigned base_degree, unsigned d) {
  auto impl = base_impl(GroupKind::Gm, std::move(tower), base_degree);
  impl->d = d;
  impl->width = d;
  return GroupModel(impl);
}

GroupModel GroupModel::mu(TowerPtr tower, unsigned base_degree, u64 r) {
  auto impl = base_impl(GroupKind::MuR, std::move(tower), base_degree);
  if (r == 0 || std::gcd(r, u64{impl->tower->p()}) != 1) {
    throw Error(ErrorKind::InvalidModel, "mu_r requires gcd(r, p) = 1");
  }
  impl->r = r;
  impl->width = 1;
  return GroupModel(impl);
}

GroupModel GroupModel::norm_one_torus(TowerPtr tower, unsigned base_degree) {
  auto impl = base_impl(GroupKind::NormOneTorus, std::move(tower), base_degree);
  const Field& k = *impl->tower->field(base_degree);
  // Smallest (s, c) with t^2 + s t + c rootless over k.
  bool found = false;
  for (u32 s = 0; s < k.size() && !found; ++s) {
    for (u32 c = 1; c < k.size() && !found; ++c) {
      bool has_root = false;
      for (u32 t = 0; t < k.size() && !has_root; ++t) {
        has_root = k.add(k.add(k.mul(t, t), k.mul(s, t)), c) == 0;
      }
      if (!has_root) {
        impl->params = {s, c};
        found = true;
      }
    }
  }
  impl->width = 2;
  fill_level_params(*impl);
  return GroupModel(impl);
}

GroupModel GroupModel::elliptic_curve(TowerPtr tower, unsigned base_degree, u32 a, u32 b) {
  auto impl = base_impl(GroupKind::EllipticCurve, std::move(tower), base_degree);
  if (impl->tower->p() <= 3) throw Error(ErrorKind::InvalidModel, "elliptic curves require p > 3");
  const Field& k = *impl->tower->field(base_degree);
  if (a >= k.size() || b >= k.size()) throw Error(ErrorKind::InvalidModel, "curve coefficients outside k");
  const u32 disc = k.add(k.mul(k.from_int(4), k.pow(a, 3)), k.mul(k.from_int(27), k.mul(b, b)));
  if (disc == 0) throw Error(ErrorKind::InvalidModel, "singular curve: 4a^3 + 27b^2 = 0");
  impl->params = {a, b};
  impl->width = 3;
  fill_level_params(*impl);
  return GroupModel(impl);
}

GroupModel GroupModel::product(std::vector<GroupModel> factors) {
  if (factors.empty()) throw Error(ErrorKind::InvalidModel, "use GroupModel::trivial for the empty product");
  auto impl = base_impl(GroupKind::Product, factors.front().tower(), factors.front().base_degree());
  std::size_t off = 0;
  for (const auto& f : factors) {
    if (f.tower() != impl->tower || f.base_degree() != impl->base_degree) {
      throw Error(ErrorKind::ModelMismatch, "product factors must share the base field");
    }
    impl->offsets.push_back(off);
    off += f.width();
  }
  impl->width = off;
  impl->factors = std::move(factors);
  return GroupModel(impl);
}

GroupModel GroupModel::trivial(TowerPtr tower, unsigned base_degree) {
  auto impl = base_impl(GroupKind::Product, std::move(tower), base_degree);
  impl->width = 0;
  return GroupModel(impl);
}

u64 GroupModel::q() const { return ipow(p(), base_degree()); }

GroupDims GroupModel::dims() const {
  const auto& im = *impl_;
  switch (im.kind) {
    case GroupKind::Ga: return {im.d, 0, 0, im.d};
    case GroupKind::Gm: return {im.d, im.d, 0, 0};
    case GroupKind::MuR: return {};
    case GroupKind::NormOneTorus: return {1, 1, 0, 0};
    case GroupKind::EllipticCurve: return {1, 0, 1, 0};
    case GroupKind::Product: {
      GroupDims out;
      for (const auto& f : im.factors) {
        const auto d = f.dims();
        out.dim += d.dim;
        out.toric += d.toric;
        out.abelian += d.abelian;
        out.unipotent += d.unipotent;
      }
      return out;
    }
  }
  return {};
}

u64 GroupModel::pi0() const {
  if (kind() == GroupKind::MuR) return impl_->r;
  u64 out = 1;
  for (const auto& f : impl_->factors) out *= f.pi0();
  return out;
}

bool GroupModel::has_level(unsigned n) const {
  return n >= 1 && tower()->has_degree(base_degree() * n);
}

void GroupModel::require_level(unsigned n) const {
  if (!has_level(n)) {
    throw Error(ErrorKind::LevelMismatch, "level " + std::to_string(n) + " is not available on the tower of " + name());
  }
}

const FieldPtr& GroupModel::field(unsigned level) const {
  require_level(level);
  return tower()->field(base_degree() * level);
}

Point GroupModel::identity(unsigned level) const {
  require_level(level);
  Point out{level, std::vector<u32>(width(), 0)};
  switch (kind()) {
    case GroupKind::Ga:
    case GroupKind::EllipticCurve: break;
    case GroupKind::Gm:
    case GroupKind::MuR: std::fill(out.coords.begin(), out.coords.end(), 1u); break;
    case GroupKind::NormOneTorus: out.coords[0] = 1; break;
    case GroupKind::Product:
      for (std::size_t i = 0; i < factors().size(); ++i) {
        const auto sub = factors()[i].identity(level);
        std::copy(sub.coords.begin(), sub.coords.end(), out.coords.begin() + impl_->offsets[i]);
      }
      break;
  }
  return out;
}

void GroupModel::mul_into(unsigned level, std::span<const u32> a, std::span<const u32> b, std::span<u32> out) const {
  const Field& f = *field(level);
  switch (kind()) {
    case GroupKind::Ga:
      for (std::size_t i = 0; i < width(); ++i) out[i] = f.add(a[i], b[i]);
      return;
    case GroupKind::Gm:
    case GroupKind::MuR:
      for (std::size_t i = 0; i < width(); ++i) out[i] = f.mul(a[i], b[i]);
      return;
    case GroupKind::NormOneTorus: {
      const auto [s, c] = impl_->level_params[level];
      const u32 bb = f.mul(a[1], b[1]);
      const u32 x = f.sub(f.mul(a[0], b[0]), f.mul(c, bb));
      const u32 y = f.sub(f.add(f.mul(a[0], b[1]), f.mul(b[0], a[1])), f.mul(s, bb));
      out[0] = x;
      out[1] = y;
      return;
    }
    case GroupKind::EllipticCurve: {
      if (a[0] == 0) {
        std::copy(b.begin(), b.begin() + 3, out.begin());
        return;
      }
      if (b[0] == 0) {
        std::copy(a.begin(), a.begin() + 3, out.begin());
        return;
      }
      const u32 x1 = a[1], y1 = a[2], x2 = b[1], y2 = b[2];
      u32 lambda;
      if (x1 == x2) {
        if (f.add(y1, y2) == 0) {
          out[0] = out[1] = out[2] = 0;
          return;
        }
        const u32 ca = impl_->level_params[level][0];
        const u32 num = f.add(f.mul(f.from_int(3), f.mul(x1, x1)), ca);
        lambda = f.div(num, f.add(y1, y1));
      } else {
        lambda = f.div(f.sub(y2, y1), f.sub(x2, x1));
      }
      const u32 x3 = f.sub(f.sub(f.mul(lambda, lambda), x1), x2);
      const u32 y3 = f.sub(f.mul(lambda, f.sub(x1, x3)), y1);
      out[0] = 1;
      out[1] = x3;
      out[2] = y3;
      return;
    }
    case GroupKind::Product:
      for (std::size_t i = 0; i < factors().size(); ++i) {
        const std::size_t off = impl_->offsets[i];
        const std::size_t w = factors()[i].width();
        factors()[i].mul_into(level, a.subspan(off, w), b.subspan(off, w), out.subspan(off, w));
      }
      return;
  }
}

void GroupModel::inv_into(unsigned level, std::span<const u32> a, std::span<u32> out) const {
  const Field& f = *field(level);
  switch (kind()) {
    case GroupKind::Ga:
      for (std::size_t i = 0; i < width(); ++i) out[i] = f.neg(a[i]);
      return;
    case GroupKind::Gm:
    case GroupKind::MuR:
      for (std::size_t i = 0; i < width(); ++i) out[i] = f.inv(a[i]);
      return;
    case GroupKind::NormOneTorus: {
      // conjugate: a + b t -> (a - s b) - b t
      const u32 s = impl_->level_params[level][0];
      const u32 x = f.sub(a[0], f.mul(s, a[1]));
      out[1] = f.neg(a[1]);
      out[0] = x;
      return;
    }
    case GroupKind::EllipticCurve:
      out[0] = a[0];
      out[1] = a[1];
      out[2] = f.neg(a[2]);
      return;
    case GroupKind::Product:
      for (std::size_t i = 0; i < factors().size(); ++i) {
        const std::size_t off = impl_->offsets[i];
        const std::size_t w = factors()[i].width();
        factors()[i].inv_into(level, a.subspan(off, w), out.subspan(off, w));
      }
      return;
  }
}

void GroupModel::frobenius_into(unsigned level, unsigned power, std::span<const u32> a, std::span<u32> out) const {
  const Field& f = *field(level);
  const unsigned m = base_degree() * power;
  if (kind() == GroupKind::EllipticCurve) {
    out[0] = a[0];
    out[1] = f.frobenius(a[1], m);
    out[2] = f.frobenius(a[2], m);
    return;
  }
  if (kind() == GroupKind::Product) {
    for (std::size_t i = 0; i < factors().size(); ++i) {
      const std::size_t off = impl_->offsets[i];
      const std::size_t w = factors()[i].width();
      factors()[i].frobenius_into(level, power, a.subspan(off, w), out.subspan(off, w));
    }
    return;
  }
  for (std::size_t i = 0; i < width(); ++i) out[i] = f.frobenius(a[i], m);
}

Point GroupModel::mul(const Point& a, const Point& b) const {
  if (a.level != b.level) throw Error(ErrorKind::LevelMismatch, "points at different levels");
  Point out{a.level, std::vector<u32>(width())};
  mul_into(a.level, a.coords, b.coords, out.coords);
  return out;
}

Point GroupModel::inv(const Point& a) const {
  Point out{a.level, std::vector<u32>(width())};
  inv_into(a.level, a.coords, out.coords);
  return out;
}

Point GroupModel::pow(const Point& a, u64 e) const {
  Point r = identity(a.level);
  Point base = a;
  while (e > 0) {
    if (e & 1) r = mul(r, base);
    base = mul(base, base);
    e >>= 1;
  }
  return r;
}

Point GroupModel::frobenius(const Point& a, unsigned power) const {
  Point out{a.level, std::vector<u32>(width())};
  frobenius_into(a.level, power, a.coords, out.coords);
  return out;
}

bool GroupModel::contains(const Point& a) const {
  if (!has_level(a.level) || a.coords.size() != width()) return false;
  const Field& f = *field(a.level);
  for (u32 c : a.coords) {
    if (c >= f.size()) return false;
  }
  switch (kind()) {
    case GroupKind::Ga: return true;
    case GroupKind::Gm:
      return std::all_of(a.coords.begin(), a.coords.end(), [](u32 c) { return c != 0; });
    case GroupKind::MuR: return a.coords[0] != 0 && f.pow(a.coords[0], impl_->r) == 1;
    case GroupKind::NormOneTorus: {
      const auto [s, c] = impl_->level_params[a.level];
      const u32 x = a.coords[0], y = a.coords[1];
      const u32 nrm = f.add(f.sub(f.mul(x, x), f.mul(s, f.mul(x, y))), f.mul(c, f.mul(y, y)));
      return nrm == 1;
    }
    case GroupKind::EllipticCurve: {
      if (a.coords[0] == 0) return a.coords[1] == 0 && a.coords[2] == 0;
      if (a.coords[0] != 1) return false;
      const auto [ca, cb] = impl_->level_params[a.level];
      const u32 x = a.coords[1], y = a.coords[2];
      const u32 rhs = f.add(f.add(f.mul(x, f.mul(x, x)), f.mul(ca, x)), cb);
      return f.mul(y, y) == rhs;
    }
    case GroupKind::Product:
      for (std::size_t i = 0; i < factors().size(); ++i) {
        const std::size_t off = impl_->offsets[i];
        Point sub{a.level, {a.coords.begin() + off, a.coords.begin() + off + factors()[i].width()}};
        if (!factors()[i].contains(sub)) return false;
      }
      return true;
  }
  return false;
}

Point GroupModel::make_point(unsigned level, std::vector<u32> coords) const {
  Point pt{level, std::move(coords)};
  if (!contains(pt)) throw Error(ErrorKind::InvalidPoint, "coordinates do not satisfy the equations of " + name());
  return pt;
}

namespace {
bool is_flag_coord(const GroupModel& g, std::size_t i, std::vector<bool>& flags) {
  (void)g;
  return flags[i];
}

void collect_flags(const GroupModel& g, std::vector<bool>& flags) {
  if (g.kind() == GroupKind::EllipticCurve) {
    flags.insert(flags.end(), {true, false, false});
  } else if (g.kind() == GroupKind::Product) {
    for (const auto& f : g.factors()) collect_flags(f, flags);
  } else {
    flags.insert(flags.end(), g.width(), false);
  }
}
}  // namespace

Point GroupModel::embed(const Point& a, unsigned to_level) const {
  require_divides(a.level, to_level, "embed");
  require_level(to_level);
  std::vector<bool> flags;
  collect_flags(*this, flags);
  Point out{to_level, a.coords};
  for (std::size_t i = 0; i < width(); ++i) {
    if (is_flag_coord(*this, i, flags)) continue;
    out.coords[i] = tower()->embed(a.coords[i], base_degree() * a.level, base_degree() * to_level);
  }
  return out;
}

std::optional<Point> GroupModel::restrict_to(const Point& a, unsigned to_level) const {
  require_divides(to_level, a.level, "restrict");
  std::vector<bool> flags;
  collect_flags(*this, flags);
  Point out{to_level, a.coords};
  for (std::size_t i = 0; i < width(); ++i) {
    if (flags[i]) continue;
    auto r = tower()->restrict_to(a.coords[i], base_degree() * a.level, base_degree() * to_level);
    if (!r) return std::nullopt;
    out.coords[i] = *r;
  }
  return out;
}

u64 GroupModel::estimated_order(unsigned level) const {
  const u64 big = ipow_capped(q(), level, u64{1} << 62);
  const u64 qn = big == 0 ? u64{1} << 62 : big;
  switch (kind()) {
    case GroupKind::Ga: {
      u64 out = 1;
      for (unsigned i = 0; i < impl_->d; ++i) out = sat_mul(out, qn);
      return out;
    }
    case GroupKind::Gm: {
      u64 out = 1;
      for (unsigned i = 0; i < impl_->d; ++i) out = sat_mul(out, qn - 1);
      return out;
    }
    case GroupKind::MuR: return std::min<u64>(impl_->r, qn - 1);
    case GroupKind::NormOneTorus: return qn + 1;
    case GroupKind::EllipticCurve:
      return qn + 2 + 2 * static_cast<u64>(std::ceil(std::sqrt(static_cast<double>(qn))));
    case GroupKind::Product: {
      u64 out = 1;
      for (const auto& f : factors()) out = sat_mul(out, f.estimated_order(level));
      return out;
    }
  }
  return 0;
}

std::string GroupModel::name() const {
  const std::string base = "F_" + std::to_string(q());
  switch (kind()) {
    case GroupKind::Ga: return impl_->d == 1 ? "Ga/" + base : "Ga^" + std::to_string(impl_->d) + "/" + base;
    case GroupKind::Gm: return impl_->d == 1 ? "Gm/" + base : "Gm^" + std::to_string(impl_->d) + "/" + base;
    case GroupKind::MuR: return "mu_" + std::to_string(impl_->r) + "/" + base;
    case GroupKind::NormOneTorus: return "T1/" + base;
    case GroupKind::EllipticCurve:
      return "E(" + std::to_string(impl_->params[0]) + "," + std::to_string(impl_->params[1]) + ")/" + base;
    case GroupKind::Product: {
      if (factors().empty()) return "1/" + base;
      std::string s = "(";
      for (std::size_t i = 0; i < factors().size(); ++i) {
        if (i) s += " x ";
        s += factors()[i].name();
      }
      return s + ")";
    }
  }
  return "?";
}

bool operator==(const GroupModel& a, const GroupModel& b) {
  if (a.impl_ == b.impl_) return true;
  const auto& x = *a.impl_;
  const auto& y = *b.impl_;
  return x.kind == y.kind && x.tower == y.tower && x.base_degree == y.base_degree && x.d == y.d && x.r == y.r &&
         x.params == y.params && x.factors == y.factors && x.width == y.width;
}

namespace {

void enumerate_into(const GroupModel& g, unsigned level, std::vector<std::vector<u32>>& out) {
  const Field& f = *g.field(level);
  const u32 Q = f.size();
  switch (g.kind()) {
    case GroupKind::Ga:
    case GroupKind::Gm: {
      const u32 lo = g.kind() == GroupKind::Ga ? 0 : 1;
      const std::size_t d = g.width();
      std::vector<u32> cur(d, lo);
      if (d == 0) {
        out.push_back({});
        return;
      }
      while (true) {
        out.push_back(cur);
        std::size_t i = d;
        while (i-- > 0) {
          if (++cur[i] < Q) break;
          cur[i] = lo;
          if (i == 0) return;
        }
      }
    }
    case GroupKind::MuR: {
      const u64 k = std::gcd(g.mu_order(), u64{Q} - 1);
      const u32 h = f.pow(f.generator(), (u64{Q} - 1) / k);
      u32 y = 1;
      for (u64 i = 0; i < k; ++i, y = f.mul(y, h)) out.push_back({y});
      return;
    }
    case GroupKind::NormOneTorus: {
      const auto params = g.base_params();
      const u32 s = g.tower()->embed(params[0], g.base_degree(), g.base_degree() * level);
      const u32 c = g.tower()->embed(params[1], g.base_degree(), g.base_degree() * level);
      if (f.p() == 2) {
        // a = s b z with z^2 + z = (1 + c b^2) / (s b)^2
        std::vector<u32> as_root(Q, kNoRoot);
        for (u32 z = 0; z < Q; ++z) {
          const u32 v = f.add(f.mul(z, z), z);
          if (as_root[v] == kNoRoot) as_root[v] = z;
        }
        out.push_back({1, 0});
        for (u32 b = 1; b < Q; ++b) {
          const u32 sb = f.mul(s, b);
          const u32 rhs = f.div(f.add(1, f.mul(c, f.mul(b, b))), f.mul(sb, sb));
          const u32 z = as_root[rhs];
          if (z == kNoRoot) continue;
          out.push_back({f.mul(sb, z), b});
          out.push_back({f.mul(sb, z ^ 1u), b});
        }
        return;
      }
      const auto root = sqrt_table(f);
      const u32 inv2 = f.inv(f.from_int(2));
      const u32 four = f.from_int(4);
      for (u32 b = 0; b < Q; ++b) {
        const u32 sb = f.mul(s, b);
        const u32 disc = f.sub(f.mul(sb, sb), f.mul(four, f.sub(f.mul(c, f.mul(b, b)), 1)));
        const u32 r = root[disc];
        if (r == kNoRoot) continue;
        out.push_back({f.mul(f.add(sb, r), inv2), b});
        if (r != 0) out.push_back({f.mul(f.sub(sb, r), inv2), b});
      }
      return;
    }
    case GroupKind::EllipticCurve: {
      const auto root = sqrt_table(f);
      const auto params = g.base_params();
      const u32 a = g.tower()->embed(params[0], g.base_degree(), g.base_degree() * level);
      const u32 b = g.tower()->embed(params[1], g.base_degree(), g.base_degree() * level);
      out.push_back({0, 0, 0});
      for (u32 x = 0; x < Q; ++x) {
        const u32 rhs = f.add(f.add(f.mul(x, f.mul(x, x)), f.mul(a, x)), b);
        const u32 y = root[rhs];
        if (y == kNoRoot) continue;
        out.push_back({1, x, y});
        if (y != 0) out.push_back({1, x, f.neg(y)});
      }
      return;
    }
    case GroupKind::Product: {
      std::vector<std::vector<std::vector<u32>>> parts;
      for (const auto& fac : g.factors()) {
        std::vector<std::vector<u32>> part;
        enumerate_into(fac, level, part);
        std::sort(part.begin(), part.end());
        parts.push_back(std::move(part));
      }
      std::vector<std::size_t> idx(parts.size(), 0);
      if (parts.empty()) {
        out.push_back({});
        return;
      }
      for (const auto& part : parts) {
        if (part.empty()) return;
      }
      while (true) {
        std::vector<u32> cur;
        cur.reserve(g.width());
        for (std::size_t i = 0; i < parts.size(); ++i) cur.insert(cur.end(), parts[i][idx[i]].begin(), parts[i][idx[i]].end());
        out.push_back(std::move(cur));
        std::size_t i = parts.size();
        while (i-- > 0) {
          if (++idx[i] < parts[i].size()) break;
          idx[i] = 0;
          if (i == 0) return;
        }
      }
    }
  }
}

}  // namespace

std::vector<Point> enumerate_points(const GroupModel& g, unsigned level, u64 cap) {
  if (!g.has_level(level)) {
    throw Error(ErrorKind::LevelMismatch, "level " + std::to_string(level) + " unavailable for " + g.name());
  }
  if (g.estimated_order(level) > cap) {
    throw Error(ErrorKind::SizeCap, g.name() + " at level " + std::to_string(level) + " exceeds the point cap");
  }
  std::vector<std::vector<u32>> raw;
  enumerate_into(g, level, raw);
  std::sort(raw.begin(), raw.end());
  std::vector<Point> out;
  out.reserve(raw.size());
  for (auto& c : raw) out.push_back({level, std::move(c)});
  return out;
}

Point trace_map(const GroupModel& g, const Point& x, unsigned m) {
  require_divides(m, x.level, "trace");
  Point acc = g.identity(x.level);
  Point y = x;
  for (unsigned j = 0; j < x.level / m; ++j) {
    acc = g.mul(acc, y);
    y = g.frobenius(y, m);
  }
  auto r = g.restrict_to(acc, m);
  if (!r) throw Error(ErrorKind::InvalidPoint, "trace did not land in the subfield points");
  return *r;
}

Point lang_map(const GroupModel& g, const Point& x, unsigned n) {
  require_divides(n, x.level, "lang");
  return g.mul(g.inv(x), g.frobenius(x, n));
}

std::size_t PointGroup::SpanHash::operator()(const std::vector<u32>& v) const noexcept {
  u64 h = 1469598103934665603ull;
  for (u32 c : v) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return static_cast<std::size_t>(h);
}

PointGroup::PointGroup(GroupModel model, unsigned level, u64 cap)
    : PointGroup(model, level, enumerate_points(model, level, cap)) {}

PointGroup::PointGroup(GroupModel model, unsigned level, std::vector<Point> points)
    : model_(std::move(model)), level_(level), width_(model_.width()), count_(points.size()) {
  flat_.reserve(count_ * width_);
  for (const auto& pt : points) flat_.insert(flat_.end(), pt.coords.begin(), pt.coords.end());
  build_index();
}

void PointGroup::build_index() {
  index_.reserve(count_ * 2);
  for (std::size_t i = 0; i < count_; ++i) {
    auto c = coords(i);
    index_.emplace(std::vector<u32>(c.begin(), c.end()), i);
  }
  identity_ = index_of(model_.identity(level_).coords);
}

Point PointGroup::point(std::size_t i) const {
  auto c = coords(i);
  return {level_, {c.begin(), c.end()}};
}

std::optional<std::size_t> PointGroup::find(std::span<const u32> c) const {
  thread_local std::vector<u32> key;
  key.assign(c.begin(), c.end());
  auto it = index_.find(key);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t PointGroup::index_of(std::span<const u32> c) const {
  auto r = find(c);
  if (!r) throw Error(ErrorKind::NotClosed, "point not in the enumerated set of " + model_.name());
  return *r;
}

std::size_t PointGroup::op(std::size_t i, std::size_t j) const {
  thread_local std::vector<u32> buf;
  buf.resize(width_);
  model_.mul_into(level_, coords(i), coords(j), buf);
  return index_of(buf);
}

std::size_t PointGroup::inverse(std::size_t i) const {
  thread_local std::vector<u32> buf;
  buf.resize(width_);
  model_.inv_into(level_, coords(i), buf);
  return index_of(buf);
}

std::string_view to_string(HomRule rule) {
  switch (rule) {
    case HomRule::Identity: return "identity";
    case HomRule::Power: return "power";
    case HomRule::Projection: return "projection";
    case HomRule::Multiplication: return "multiplication";
    case HomRule::NormInclusion: return "norm_inclusion";
    case HomRule::ToTrivial: return "to_trivial";
  }
  return "?";
}

GroupHom GroupHom::identity(const GroupModel& g) { return GroupHom(g, g, HomRule::Identity); }

GroupHom GroupHom::power(const GroupModel& g, u64 r) {
  GroupHom h(g, g, HomRule::Power);
  h.r_ = r;
  return h;
}

GroupHom GroupHom::projection(const GroupModel& g, std::vector<std::size_t> factor_indices) {
  if (g.kind() != GroupKind::Product) throw Error(ErrorKind::NotProduct, "projection needs a product model");
  if (factor_indices.empty()) throw Error(ErrorKind::InvalidModel, "projection onto no factors; use to_trivial");
  std::vector<GroupModel> picked;
  for (std::size_t i : factor_indices) {
    if (i >= g.factors().size()) throw Error(ErrorKind::InvalidModel, "projection index out of range");
    picked.push_back(g.factors()[i]);
  }
  GroupModel target = picked.size() == 1 ? picked.front() : GroupModel::product(picked);
  GroupHom h(g, target, HomRule::Projection);
  h.selected_ = std::move(factor_indices);
  return h;
}

GroupHom GroupHom::multiplication(const GroupModel& g_times_g) {
  if (g_times_g.kind() != GroupKind::Product || g_times_g.factors().size() != 2 ||
      !(g_times_g.factors()[0] == g_times_g.factors()[1])) {
    throw Error(ErrorKind::NotProduct, "multiplication map needs a model of the form G x G");
  }
  return GroupHom(g_times_g, g_times_g.factors()[0], HomRule::Multiplication);
}

GroupHom GroupHom::norm_inclusion(const GroupModel& torus) {
  if (torus.kind() != GroupKind::NormOneTorus) throw Error(ErrorKind::InvalidModel, "norm inclusion needs the torus");
  const unsigned e2 = 2 * torus.base_degree();
  if (!torus.tower()->has_degree(e2)) throw Error(ErrorKind::LevelMismatch, "tower lacks the quadratic extension");
  GroupHom h(torus, GroupModel::gm(torus.tower(), e2), HomRule::NormInclusion);
  h.roots_.assign(h.target_.max_level() + 1, kNoRoot);
  const auto params = torus.base_params();
  for (unsigned n = 1; n <= h.target_.max_level(); n += 2) {
    if (!h.target_.has_level(n)) continue;
    const Field& big = *h.target_.field(n);
    const unsigned to = e2 * n;
    const u32 s = torus.tower()->embed(params[0], torus.base_degree(), to);
    const u32 c = torus.tower()->embed(params[1], torus.base_degree(), to);
    for (u32 y = 0; y < big.size(); ++y) {
      if (big.add(big.add(big.mul(y, y), big.mul(s, y)), c) == 0) {
        h.roots_[n] = y;
        break;
      }
    }
  }
  return h;
}

GroupHom GroupHom::to_trivial(const GroupModel& g) {
  return GroupHom(g, GroupModel::trivial(g.tower(), g.base_degree()), HomRule::ToTrivial);
}

bool GroupHom::defined_at(unsigned level) const {
  if (!source_.has_level(level) || !target_.has_level(level)) return false;
  if (rule_ == HomRule::NormInclusion) return level % 2 == 1;
  return true;
}

Point GroupHom::apply(const Point& x) const {
  if (!defined_at(x.level)) {
    throw Error(ErrorKind::LevelMismatch, name() + " is not defined at level " + std::to_string(x.level));
  }
  switch (rule_) {
    case HomRule::Identity: return x;
    case HomRule::Power: return source_.pow(x, r_);
    case HomRule::Projection: {
      Point out{x.level, {}};
      std::size_t off = 0;
      std::vector<std::size_t> offsets;
      for (const auto& f : source_.factors()) {
        offsets.push_back(off);
        off += f.width();
      }
      for (std::size_t i : selected_) {
        const auto& f = source_.factors()[i];
        out.coords.insert(out.coords.end(), x.coords.begin() + offsets[i], x.coords.begin() + offsets[i] + f.width());
      }
      return out;
    }
    case HomRule::Multiplication: {
      const std::size_t w = target_.width();
      Point a{x.level, {x.coords.begin(), x.coords.begin() + w}};
      Point b{x.level, {x.coords.begin() + w, x.coords.end()}};
      return target_.mul(a, b);
    }
    case HomRule::NormInclusion: {
      // (a, b) -> a + b t
      const Field& big = *target_.field(x.level);
      const unsigned from = source_.base_degree() * x.level;
      const unsigned to = target_.base_degree() * x.level;
      const u32 a = source_.tower()->embed(x.coords[0], from, to);
      const u32 b = source_.tower()->embed(x.coords[1], from, to);
      return {x.level, {big.add(a, big.mul(b, roots_.at(x.level)))}};
    }
    case HomRule::ToTrivial: return {x.level, {}};
  }
  return x;
}

GroupDims GroupHom::kernel_dims() const {
  switch (rule_) {
    case HomRule::Identity:
    case HomRule::NormInclusion: return {};
    case HomRule::Power: {
      if (r_ == 0) return source_.dims();
      const auto d = source_.dims();
      if (r_ % source_.p() == 0) return {d.unipotent, 0, 0, d.unipotent};
      return {};
    }
    case HomRule::Projection: {
      GroupDims out;
      for (std::size_t i = 0; i < source_.factors().size(); ++i) {
        if (std::find(selected_.begin(), selected_.end(), i) != selected_.end()) continue;
        const auto d = source_.factors()[i].dims();
        out.dim += d.dim;
        out.toric += d.toric;
        out.abelian += d.abelian;
        out.unipotent += d.unipotent;
      }
      return out;
    }
    case HomRule::Multiplication: return target_.dims();
    case HomRule::ToTrivial: return source_.dims();
  }
  return {};
}

std::string GroupHom::name() const {
  std::string s(to_string(rule_));
  if (rule_ == HomRule::Power) s += "(" + std::to_string(r_) + ")";
  if (rule_ == HomRule::Projection) {
    s += "[";
    for (std::size_t i = 0; i < selected_.size(); ++i) s += (i ? "," : "") + std::to_string(selected_[i]);
    s += "]";
  }
  return s + ": " + source_.name() + " -> " + target_.name();
}

namespace {

// Greedy generating set of an enumerated group, in canonical order.
std::vector<std::size_t> generating_set(const PointGroup& g) {
  std::vector<char> in_sub(g.size(), 0);
  std::vector<std::size_t> members{g.identity()};
  in_sub[g.identity()] = 1;
  std::vector<std::size_t> gens;
  for (std::size_t x = 0; x < g.size(); ++x) {
    if (in_sub[x]) continue;
    gens.push_back(x);
    // H <- H <x>: multiply the current subgroup by powers of x until back in H.
    std::vector<std::size_t> fresh;
    std::size_t power = x;
    while (!in_sub[power]) {
      for (std::size_t h : members) {
        const std::size_t y = g.op(h, power);
        if (!in_sub[y]) {
          in_sub[y] = 1;
          fresh.push_back(y);
        }
      }
      power = g.op(power, x);
    }
    members.insert(members.end(), fresh.begin(), fresh.end());
  }
  return gens;
}

}  // namespace

bool verify_hom(const GroupHom& f, u64 seed, u64 threshold, std::size_t samples) {
  const PointGroup src(f.source(), 1);
  const GroupModel& tgt = f.target();
  std::vector<Point> images(src.size());
  for (std::size_t i = 0; i < src.size(); ++i) images[i] = f.apply(src.point(i));
  auto check = [&](std::size_t i, std::size_t j) {
    const Point lhs = images[src.op(i, j)];
    return lhs == tgt.mul(images[i], images[j]);
  };
  if (src.size() <= threshold) {
    // Agreement on (generator, x) for every x implies agreement on all pairs.
    for (std::size_t gidx : generating_set(src)) {
      for (std::size_t x = 0; x < src.size(); ++x) {
        if (!check(gidx, x)) return false;
      }
    }
    return true;
  }
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, src.size() - 1);
  for (std::size_t s = 0; s < samples; ++s) {
    if (!check(pick(rng), pick(rng))) return false;
  }
  return true;
}

bool verify_frobenius_equivariance(const GroupHom& f, unsigned level) {
  if (!f.same_base()) return false;
  for (const auto& x : enumerate_points(f.source(), level)) {
    if (f.apply(f.source().frobenius(x)) != f.target().frobenius(f.apply(x))) return false;
  }
  return true;
}

FiberCounts pushforward_count(const GroupHom& f, unsigned level) {
  if (!f.defined_at(level)) throw Error(ErrorKind::LevelMismatch, f.name() + " undefined at this level");
  const auto src = enumerate_points(f.source(), level);
  const auto tgt_order = enumerate_points(f.target(), level).size();
  const Point e = f.target().identity(level);
  std::set<Point> image;
  u64 kernel = 0;
  for (const auto& x : src) {
    Point y = f.apply(x);
    if (y == e) ++kernel;
    image.insert(std::move(y));
  }
  FiberCounts out;
  out.source_order = src.size();
  out.target_order = tgt_order;
  out.kernel = kernel;
  out.image = image.size();
  out.cokernel = tgt_order / image.size();
  return out;
}

std::vector<Point> identity_component_points(const GroupModel& g, unsigned level) {
  if (g.kind() == GroupKind::MuR) return {g.identity(level)};
  if (g.kind() != GroupKind::Product || g.connected()) return enumerate_points(g, level);
  std::vector<std::vector<Point>> parts;
  for (const auto& f : g.factors()) parts.push_back(identity_component_points(f, level));
  std::vector<Point> out{Point{level, {}}};
  for (const auto& part : parts) {
    std::vector<Point> next;
    for (const auto& a : out) {
      for (const auto& b : part) {
        Point c = a;
        c.coords.insert(c.coords.end(), b.coords.begin(), b.coords.end());
        next.push_back(std::move(c));
      }
    }
    out = std::move(next);
  }
  std::sort(out.begin(), out.end());
  return out;
}

ComponentTraceImage component_trace_image(const GroupModel& g, unsigned n, unsigned m) {
  require_divides(m, n, "component_trace_image");
  std::set<Point> image;
  for (const auto& x : enumerate_points(g, n)) image.insert(trace_map(g, x, m));
  ComponentTraceImage out;
  out.image.assign(image.begin(), image.end());
  out.identity_component = identity_component_points(g, m);
  out.equals_identity_component = out.image == out.identity_component;
  out.contained_in_identity_component =
      std::includes(out.identity_component.begin(), out.identity_component.end(), out.image.begin(), out.image.end());
  out.index_divisible = (n / m) % g.pi0() == 0;
  return out;
}

LangSequenceCheck check_lang_sequence(const GroupModel& g, unsigned n, unsigned m) {
  require_divides(n, m, "lang sequence");
  const PointGroup gm(g, m);
  const auto gn = enumerate_points(g, n);
  LangSequenceCheck out;
  out.n = n;
  out.m = m;
  out.order_m = gm.size();
  out.order_n = gn.size();

  std::vector<char> lang_image(gm.size(), 0), frob1_image(gm.size(), 0);
  std::vector<std::size_t> lang_kernel;
  std::vector<char> trace_kernel(gm.size(), 0);
  std::set<Point> trace_image;
  const Point e_n = g.identity(n);
  for (std::size_t i = 0; i < gm.size(); ++i) {
    const Point x = gm.point(i);
    const std::size_t l = gm.index_of(lang_map(g, x, n).coords);
    lang_image[l] = 1;
    if (l == gm.identity()) lang_kernel.push_back(i);
    frob1_image[gm.index_of(lang_map(g, x, 1).coords)] = 1;
    Point t = trace_map(g, x, n);
    if (t == e_n) trace_kernel[i] = 1;
    trace_image.insert(std::move(t));
  }
  out.lang_kernel = lang_kernel.size();
  out.lang_image = static_cast<u64>(std::count(lang_image.begin(), lang_image.end(), 1));
  out.trace_kernel = static_cast<u64>(std::count(trace_kernel.begin(), trace_kernel.end(), 1));
  out.trace_image = trace_image.size();

  std::vector<std::size_t> embedded;
  for (const auto& x : gn) embedded.push_back(gm.index_of(g.embed(x, m).coords));
  std::sort(embedded.begin(), embedded.end());
  out.kernel_is_g_n = embedded == lang_kernel;
  out.image_is_trace_kernel = lang_image == trace_kernel;
  out.trace_surjective = trace_image.size() == gn.size();

  const u64 frob1 = static_cast<u64>(std::count(frob1_image.begin(), frob1_image.end(), 1));
  out.coinvariants = gm.size() / frob1;
  out.order_1 = enumerate_points(g, 1).size();
  return out;
}

}  // namespace charlab
