#include "charlab/transform.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "charlab/error.hpp"

namespace charlab {

namespace {

constexpr u64 kReferenceLimit = 1024;
constexpr u64 kDirectAxis = 64;

void check_size(const AbelianStructure& s) {
  if (s.order() > kTransformCap) throw Error(ErrorKind::SizeCap, "transform: group has more than 2^20 points");
}

void require_same_domain(const StructurePtr& a, const StructurePtr& b, const char* what) {
  if (a == b) return;
  if (a->level() != b->level()) throw Error(ErrorKind::LevelMismatch, std::string(what) + ": levels differ");
  if (!(a->model() == b->model())) throw Error(ErrorKind::ModelMismatch, std::string(what) + ": models differ");
}

// Exponent table, one row of rank() entries per point index.
std::vector<u64> exps_table(const AbelianStructure& s) {
  const std::size_t k = s.rank();
  std::vector<u64> out(s.order() * k);
  for (u64 i = 0; i < s.order(); ++i) s.exps_of_index(i, std::span<u64>(out.data() + i * k, k));
  return out;
}

std::vector<u64> scales(const AbelianStructure& s) {
  std::vector<u64> out;
  for (u64 d : s.factors()) out.push_back(s.exponent() / d);
  return out;
}

// out[r] = sum_c in[c] exp(sign 2 pi i <r, c>) with r, c both running over
// the exponent box, summed in increasing c. Indices are codes.
std::vector<cplx> reference_kernel(const AbelianStructure& s, const std::vector<cplx>& in, int sign,
                                   const Executor& ex) {
  const u64 n = s.order(), L = s.exponent();
  const std::size_t k = s.rank();
  const auto roots = roots_of_unity(L);
  const auto sc = scales(s);
  std::vector<u64> box(n * k);
  for (u64 c = 0; c < n; ++c) s.decode(c, std::span<u64>(box.data() + c * k, k));
  std::vector<cplx> out(n);
  ex.parallel_for(n, [&](std::size_t lo, std::size_t hi) {
    std::vector<u64> br(k);
    for (std::size_t r = lo; r < hi; ++r) {
      for (std::size_t j = 0; j < k; ++j) br[j] = box[r * k + j] * sc[j] % L;
      KahanSum acc;
      for (u64 c = 0; c < n; ++c) {
        // L <= 2^20 and a_j < L, so the sum stays far below 2^64
        const u64* a = box.data() + c * k;
        u64 u = 0;
        for (std::size_t j = 0; j < k; ++j) u += br[j] * a[j];
        u %= L;
        if (sign < 0) u = (L - u) % L;
        acc.add(roots[u] * in[c]);
      }
      out[r] = acc.value();
    }
  });
  return out;
}

void fft_pow2(std::vector<cplx>& a, bool invert) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = 2 * std::numbers::pi / static_cast<double>(len) * (invert ? -1 : 1);
    for (std::size_t i = 0; i < n; i += len) {
      for (std::size_t j = 0; j < len / 2; ++j) {
        const cplx w = std::polar(1.0, ang * static_cast<double>(j));
        const cplx u = a[i + j], v = a[i + j + len / 2] * w;
        a[i + j] = u + v;
        a[i + j + len / 2] = u - v;
      }
    }
  }
  if (invert) {
    for (auto& x : a) x /= static_cast<double>(n);
  }
}

// Length-d transform X_b = sum_a x_a exp(sign 2 pi i a b / d).
class AxisPlan {
 public:
  AxisPlan(u64 d, int sign) : d_(d), sign_(sign) {
    if (d_ < kDirectAxis) {
      roots_ = roots_of_unity(d_);
      return;
    }
    m_ = 1;
    while (m_ < 2 * d_ - 1) m_ <<= 1;
    chirp_.resize(d_);
    for (u64 j = 0; j < d_; ++j) {
      const u64 r = j * j % (2 * d_);
      chirp_[j] = std::polar(1.0, sign_ * std::numbers::pi * static_cast<double>(r) / static_cast<double>(d_));
    }
    kernel_.assign(m_, 0);
    kernel_[0] = std::conj(chirp_[0]);
    for (u64 j = 1; j < d_; ++j) kernel_[j] = kernel_[m_ - j] = std::conj(chirp_[j]);
    fft_pow2(kernel_, false);
  }

  void run(std::vector<cplx>& x) const {
    if (d_ < kDirectAxis) {
      std::vector<cplx> out(d_);
      for (u64 b = 0; b < d_; ++b) {
        cplx acc = 0;
        for (u64 a = 0; a < d_; ++a) {
          u64 e = a * b % d_;
          if (sign_ < 0) e = (d_ - e) % d_;
          acc += x[a] * roots_[e];
        }
        out[b] = acc;
      }
      x = std::move(out);
      return;
    }
    std::vector<cplx> buf(m_, 0);
    for (u64 j = 0; j < d_; ++j) buf[j] = x[j] * chirp_[j];
    fft_pow2(buf, false);
    for (u64 j = 0; j < m_; ++j) buf[j] *= kernel_[j];
    fft_pow2(buf, true);
    for (u64 j = 0; j < d_; ++j) x[j] = buf[j] * chirp_[j];
  }

 private:
  u64 d_;
  int sign_;
  u64 m_ = 0;
  std::vector<cplx> roots_, chirp_, kernel_;
};

// Same map as reference_kernel via per-axis transforms.
std::vector<cplx> fast_kernel(const AbelianStructure& s, std::vector<cplx> data, int sign, const Executor& ex) {
  const auto& d = s.factors();
  u64 stride = s.order();
  for (std::size_t axis = 0; axis < d.size(); ++axis) {
    const u64 len = d[axis];
    stride /= len;
    const AxisPlan plan(len, sign);
    const u64 lines = s.order() / len;
    ex.parallel_for(lines, [&](std::size_t lo, std::size_t hi) {
      std::vector<cplx> line(len);
      for (std::size_t l = lo; l < hi; ++l) {
        const u64 base = (l / stride) * stride * len + l % stride;
        for (u64 j = 0; j < len; ++j) line[j] = data[base + j * stride];
        plan.run(line);
        for (u64 j = 0; j < len; ++j) data[base + j * stride] = line[j];
      }
    });
  }
  return data;
}

bool use_fast(const AbelianStructure& s, DftMethod method) {
  return method == DftMethod::Fast || (method == DftMethod::Auto && s.order() > kReferenceLimit);
}

std::vector<cplx> by_code(const AbelianStructure& s, const std::vector<cplx>& by_index) {
  std::vector<cplx> out(s.order());
  for (u64 i = 0; i < s.order(); ++i) out[s.code_of_index(i)] = by_index[i];
  return out;
}

std::vector<cplx> by_index(const AbelianStructure& s, const std::vector<cplx>& by_code) {
  std::vector<cplx> out(s.order());
  for (u64 i = 0; i < s.order(); ++i) out[i] = by_code[s.code_of_index(i)];
  return out;
}

}  // namespace

void KahanSum::add(cplx v) {
  double y = v.real() - cre_;
  double t = re_ + y;
  cre_ = (t - re_) - y;
  re_ = t;
  y = v.imag() - cim_;
  t = im_ + y;
  cim_ = (t - im_) - y;
  im_ = t;
}

std::vector<cplx> roots_of_unity(u64 L) {
  std::vector<cplx> out(L);
  for (u64 k = 0; k < L; ++k) {
    // exact values on the axes keep symmetric sums exactly real or imaginary
    if (4 * k % L == 0) {
      const u64 quarter = 4 * k / L;
      out[k] = quarter == 0 ? cplx(1, 0) : quarter == 1 ? cplx(0, 1) : quarter == 2 ? cplx(-1, 0) : cplx(0, -1);
      continue;
    }
    out[k] = std::polar(1.0, 2 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(L));
  }
  return out;
}

TraceFunction TraceFunction::zeros(StructurePtr domain) {
  TraceFunction f;
  f.values.assign(domain->order(), 0);
  f.domain = std::move(domain);
  return f;
}

TraceFunction TraceFunction::from(StructurePtr domain, const std::function<cplx(const Point&)>& fn) {
  TraceFunction f = zeros(std::move(domain));
  for (u64 i = 0; i < f.domain->order(); ++i) f.values[i] = fn(f.domain->point(i));
  return f;
}

TraceFunction TraceFunction::delta(StructurePtr domain, const Point& a) {
  TraceFunction f = zeros(std::move(domain));
  f.values[f.domain->index_of(a)] = 1;
  return f;
}

TraceFunction TraceFunction::character(const Character& chi) {
  return twist(TraceFunction::from(chi.structure(), [](const Point&) { return cplx(1); }), chi);
}

Spectrum dft(const TraceFunction& f, DftMethod method, const Executor& ex) {
  const auto& s = *f.domain;
  check_size(s);
  auto data = by_code(s, f.values);
  return {f.domain, use_fast(s, method) ? fast_kernel(s, std::move(data), +1, ex) : reference_kernel(s, data, +1, ex)};
}

TraceFunction inverse_dft(const Spectrum& F, DftMethod method, const Executor& ex) {
  const auto& s = *F.domain;
  check_size(s);
  auto out = use_fast(s, method) ? fast_kernel(s, F.values, -1, ex) : reference_kernel(s, F.values, -1, ex);
  for (auto& v : out) v /= static_cast<double>(s.order());
  TraceFunction f;
  f.domain = F.domain;
  f.values = by_index(s, out);
  return f;
}

TraceFunction dual_dft(const Spectrum& F, DftMethod method, const Executor& ex) {
  const auto& s = *F.domain;
  check_size(s);
  auto out = use_fast(s, method) ? fast_kernel(s, F.values, +1, ex) : reference_kernel(s, F.values, +1, ex);
  TraceFunction f;
  f.domain = F.domain;
  f.values = by_index(s, out);
  return f;
}

TraceFunction convolve(const TraceFunction& f, const TraceFunction& g, const Executor& ex) {
  require_same_domain(f.domain, g.domain, "convolve");
  const auto& s = *f.domain;
  const u64 n = s.order();
  const std::size_t k = s.rank();
  const auto table = exps_table(s);
  std::vector<u64> index_of_code(n);
  for (u64 i = 0; i < n; ++i) index_of_code[s.code_of_index(i)] = i;
  TraceFunction out = TraceFunction::zeros(f.domain);
  out.weight = f.weight + g.weight;
  ex.parallel_for(n, [&](std::size_t lo, std::size_t hi) {
    std::vector<u64> diff(k);
    for (std::size_t z = lo; z < hi; ++z) {
      KahanSum acc;
      for (u64 x = 0; x < n; ++x) {
        for (std::size_t j = 0; j < k; ++j) {
          const u64 a = table[z * k + j], b = table[x * k + j];
          diff[j] = a >= b ? a - b : a + s.factors()[j] - b;
        }
        acc.add(f.values[x] * g.values[index_of_code[s.code(diff)]]);
      }
      out.values[z] = acc.value();
    }
  });
  return out;
}

TraceFunction twist(const TraceFunction& f, const Character& chi) {
  require_same_domain(f.domain, chi.structure(), "twist");
  const auto& s = *f.domain;
  const auto roots = roots_of_unity(s.exponent());
  const std::size_t k = s.rank();
  std::vector<u64> a(k);
  TraceFunction out = f;
  for (u64 i = 0; i < s.order(); ++i) {
    s.exps_of_index(i, a);
    out.values[i] = f.values[i] * roots[chi.phase_units(a)];
  }
  return out;
}

TraceFunction pushforward(const TraceFunction& f, const GroupHom& h, std::span<const u64> visit_order) {
  const unsigned n = f.level();
  if (!(f.model() == h.source())) throw Error(ErrorKind::ModelMismatch, "pushforward: " + h.name());
  if (!h.defined_at(n)) throw Error(ErrorKind::LevelMismatch, "pushforward: " + h.name() + " undefined here");
  const auto& s = *f.domain;
  const auto target = group_structure(h.target(), n);
  std::vector<std::pair<u64, u64>> fibers;  // (y, x)
  fibers.reserve(s.order());
  auto visit = [&](u64 x) { fibers.emplace_back(target->index_of(h.apply(s.point(x))), x); };
  if (visit_order.empty()) {
    for (u64 x = 0; x < s.order(); ++x) visit(x);
  } else {
    for (u64 x : visit_order) visit(x);
  }
  std::sort(fibers.begin(), fibers.end());
  TraceFunction out = TraceFunction::zeros(target);
  out.weight = f.weight;
  out.norm_exp = f.norm_exp;
  for (std::size_t i = 0; i < fibers.size();) {
    KahanSum acc;
    const u64 y = fibers[i].first;
    for (; i < fibers.size() && fibers[i].first == y; ++i) acc.add(f.values[fibers[i].second]);
    out.values[y] = acc.value();
  }
  return out;
}

std::pair<GroupModel, GroupModel> split_product(const GroupModel& g, std::size_t s_factors) {
  if (g.kind() != GroupKind::Product || g.factors().size() < 2) {
    throw Error(ErrorKind::NotProduct, "fourier_mellin: " + g.name() + " is not a product");
  }
  const auto& fs = g.factors();
  if (s_factors == 0 || s_factors >= fs.size()) throw Error(ErrorKind::NotProduct, "fourier_mellin: bad split");
  auto side = [&](std::size_t lo, std::size_t hi) {
    if (hi - lo == 1) return fs[lo];
    return GroupModel::product({fs.begin() + static_cast<std::ptrdiff_t>(lo), fs.begin() + static_cast<std::ptrdiff_t>(hi)});
  };
  return {side(0, s_factors), side(s_factors, fs.size())};
}

Spectrum fourier_mellin(const TraceFunction& f, const Character& chi_s, std::size_t s_factors, const Executor& ex) {
  const unsigned n = f.level();
  const auto [sm, um] = split_product(f.model(), s_factors);
  const auto ss = group_structure(sm, n);
  const auto us = group_structure(um, n);
  require_same_domain(chi_s.structure(), ss, "fourier_mellin");
  const auto roots = roots_of_unity(ss->exponent());
  std::vector<u64> a(ss->rank());
  std::vector<cplx> weights(ss->order());
  for (u64 i = 0; i < ss->order(); ++i) {
    ss->exps_of_index(i, a);
    weights[i] = roots[chi_s.phase_units(a)];
  }
  TraceFunction partial = TraceFunction::zeros(us);
  const u64 nu = us->order();
  for (u64 u = 0; u < nu; ++u) {
    KahanSum acc;
    for (u64 si = 0; si < ss->order(); ++si) acc.add(weights[si] * f.values[si * nu + u]);
    partial.values[u] = acc.value();
  }
  return dft(partial, DftMethod::Auto, ex);
}

double max_relative_error(std::span<const cplx> a, std::span<const cplx> b) {
  double diff = 0, scale = 0, scale_a = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff = std::max(diff, std::abs(a[i] - b[i]));
    scale = std::max(scale, std::abs(b[i]));
    scale_a = std::max(scale_a, std::abs(a[i]));
  }
  if (scale == 0) return scale_a;
  return diff / scale;
}

std::vector<u64> inversion_permutation(const AbelianStructure& s) {
  std::vector<u64> out(s.order());
  std::vector<u64> e(s.rank());
  for (u64 i = 0; i < s.order(); ++i) {
    s.exps_of_index(i, e);
    for (std::size_t j = 0; j < e.size(); ++j) e[j] = (s.factors()[j] - e[j]) % s.factors()[j];
    out[i] = s.index_of_code(s.code(e));
  }
  return out;
}

}  // namespace charlab
