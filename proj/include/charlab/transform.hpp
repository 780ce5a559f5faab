#pragma once

// Fourier analysis on G(k_n): functions indexed by canonical point order,
// spectra indexed by character code.

#include <complex>
#include <functional>
#include <span>
#include <vector>

#include "charlab/chars.hpp"
#include "charlab/parallel.hpp"

namespace charlab {

using cplx = std::complex<double>;

inline constexpr u64 kTransformCap = u64{1} << 20;

struct TraceFunction {
  StructurePtr domain;
  std::vector<cplx> values;  // by point index
  int weight = 0;
  Rational norm_exp{0, 1};   // values carry a factor q^{-norm_exp}

  unsigned level() const { return domain->level(); }
  const GroupModel& model() const { return domain->model(); }
  cplx at(const Point& x) const { return values[domain->index_of(x)]; }

  static TraceFunction zeros(StructurePtr domain);
  static TraceFunction from(StructurePtr domain, const std::function<cplx(const Point&)>& f);
  static TraceFunction delta(StructurePtr domain, const Point& a);
  static TraceFunction character(const Character& chi);
};

struct Spectrum {
  StructurePtr domain;       // the group whose dual indexes the values
  std::vector<cplx> values;  // by character code

  cplx at(const Character& chi) const { return values[chi.code()]; }
};

// Compensated summation; the order of add() calls fixes the result.
class KahanSum {
 public:
  void add(cplx v);
  cplx value() const { return {re_, im_}; }

 private:
  double re_ = 0, im_ = 0, cre_ = 0, cim_ = 0;
};

// exp(2 pi i k / L) for k < L.
std::vector<cplx> roots_of_unity(u64 L);

enum class DftMethod { Auto, Reference, Fast };

// f^(chi) = sum_x chi(x) f(x). Auto picks the reference sum up to 1024 points.
Spectrum dft(const TraceFunction& f, DftMethod method = DftMethod::Auto, const Executor& ex = Executor::serial());
// f(x) = |A|^{-1} sum_chi conj(chi(x)) F(chi)
TraceFunction inverse_dft(const Spectrum& F, DftMethod method = DftMethod::Auto,
                          const Executor& ex = Executor::serial());
// Transform of a spectrum back onto G: x -> sum_chi chi(x) F(chi), equal to |A| f(x^{-1}) when F = dft(f).
TraceFunction dual_dft(const Spectrum& F, DftMethod method = DftMethod::Auto, const Executor& ex = Executor::serial());

// (f * g)(z) = sum_{xy = z} f(x) g(y)
TraceFunction convolve(const TraceFunction& f, const TraceFunction& g, const Executor& ex = Executor::serial());
TraceFunction twist(const TraceFunction& f, const Character& chi);
// (h_! f)(y) = sum_{h(x) = y} f(x). `visit_order` permutes the enumeration of
// the source; the result does not depend on it.
TraceFunction pushforward(const TraceFunction& f, const GroupHom& h, std::span<const u64> visit_order = {});

// On a product S x U (first `s_factors` factors form S):
// FM(psi) = sum_{(s,u)} chi_S(s) psi(u) f(s,u), a spectrum over the dual of U.
Spectrum fourier_mellin(const TraceFunction& f, const Character& chi_s, std::size_t s_factors = 1,
                        const Executor& ex = Executor::serial());
// The two sides of a product split after `s_factors` factors.
std::pair<GroupModel, GroupModel> split_product(const GroupModel& g, std::size_t s_factors);

// max |a - b| / max |b| (or max |a| when b vanishes)
double max_relative_error(std::span<const cplx> a, std::span<const cplx> b);

// Point-index permutation x -> x^{-1}.
std::vector<u64> inversion_permutation(const AbelianStructure& s);

}  // namespace charlab
