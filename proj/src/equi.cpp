#include "charlab/equi.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "charlab/error.hpp"

namespace charlab {

namespace {

double catalan(unsigned m) {
  double c = 1;
  for (unsigned i = 0; i < m; ++i) c = c * 2 * (2 * i + 1) / (i + 2);
  return c;
}

cplx ipow(cplx z, unsigned k) {
  cplx r = 1;
  for (; k; k >>= 1, z *= z) {
    if (k & 1) r *= z;
  }
  return r;
}

}  // namespace

ReferenceGroup ReferenceGroup::cyclic(u64 m) {
  if (m == 0) throw Error(ErrorKind::ConfigError, "cyclic reference group needs m >= 1");
  return {ReferenceKind::FiniteCyclic, m};
}

cplx ReferenceGroup::functional(cplx value, unsigned k) const {
  if (kind == ReferenceKind::SU2) return std::pow(value.real(), static_cast<int>(k));
  return ipow(value, k);
}

cplx ReferenceGroup::haar_moment(unsigned k) const {
  switch (kind) {
    case ReferenceKind::U1: return k == 0 ? 1.0 : 0.0;
    case ReferenceKind::SU2: return k % 2 == 0 ? catalan(k / 2) : 0.0;
    case ReferenceKind::FiniteCyclic: return k % m == 0 ? 1.0 : 0.0;
  }
  return 0.0;
}

std::string ReferenceGroup::name() const {
  switch (kind) {
    case ReferenceKind::U1: return "U1";
    case ReferenceKind::SU2: return "SU2";
    case ReferenceKind::FiniteCyclic: return "C" + std::to_string(m);
  }
  return "?";
}

double su2_moment_numeric(unsigned k, unsigned panels) {
  const double pi = std::numbers::pi;
  const unsigned n = 2 * panels;
  const double h = pi / n;
  auto f = [k](double t) { return std::pow(2 * std::cos(t), static_cast<int>(k)) * std::sin(t) * std::sin(t); };
  double acc = f(0) + f(pi);
  for (unsigned i = 1; i < n; ++i) acc += (i % 2 ? 4 : 2) * f(i * h);
  return 2 / pi * acc * h / 3;
}

bool check_reference_moments(unsigned max_k, double tol) {
  const auto su2 = ReferenceGroup::su2();
  for (unsigned k = 0; k <= max_k; ++k) {
    if (std::abs(su2_moment_numeric(k) - su2.haar_moment(k).real()) > tol) return false;
  }
  return true;
}

double principal_angle(cplx z) {
  const double a = std::arg(z);
  return a <= -std::numbers::pi ? std::numbers::pi : a;
}

double WeylReport::max_deviation() const {
  double m = 0;
  for (const auto& r : moments) m = std::max(m, r.deviation);
  return m;
}

WeylReport weyl_report(const EmpiricalFamily& fam, const ReferenceGroup& k, unsigned max_k) {
  if (fam.entries.empty()) throw Error(ErrorKind::EmptyFamily, "family " + fam.label + " has no entries");
  WeylReport out;
  out.family = fam.label;
  out.reference = k.name();
  out.size = fam.entries.size();
  const double n = static_cast<double>(fam.entries.size());
  for (unsigned j = 1; j <= max_k; ++j) {
    KahanSum acc;
    for (const auto& e : fam.entries) acc.add(k.functional(e.value, j));
    MomentRow row;
    row.k = j;
    row.empirical = acc.value() / n;
    row.haar = k.haar_moment(j);
    row.deviation = std::abs(row.empirical - row.haar);
    out.moments.push_back(row);
  }
  return out;
}

AverageReport on_average_report(std::span<const EmpiricalFamily> families, const ReferenceGroup& k, unsigned max_k) {
  if (families.empty()) throw Error(ErrorKind::EmptyFamily, "on-average report needs at least one family");
  AverageReport out;
  out.reference = k.name();
  for (const auto& f : families) out.per_n.push_back(weyl_report(f, k, max_k));
  const double n = static_cast<double>(families.size());
  for (unsigned j = 0; j < max_k; ++j) {
    KahanSum emp, dev;
    for (const auto& r : out.per_n) {
      emp.add(r.moments[j].empirical);
      dev.add(r.moments[j].empirical - r.moments[j].haar);
    }
    MomentRow row;
    row.k = j + 1;
    row.empirical = emp.value() / n;
    row.haar = k.haar_moment(j + 1);
    row.deviation = std::abs(dev.value() / n);
    out.averaged.push_back(row);
  }
  return out;
}

EmpiricalFamily family_from_sums(const GroupModel& model, const SumFamily& fam, unsigned n,
                                 const std::vector<CharCoset>& excluded, const Executor& ex) {
  if (model.estimated_order(n) > kTransformCap) {
    throw Error(ErrorKind::SizeCap, model.name() + " at level " + std::to_string(n) + " exceeds the transform cap");
  }
  const auto raw = family_values(fam, model.tower(), model.base_degree(), n);
  if (!(raw.model() == model)) {
    throw Error(ErrorKind::ModelMismatch, "family " + fam.name + " lives on " + raw.model().name());
  }
  const auto spec = dft(normalize(raw, fam), DftMethod::Auto, ex);
  for (const auto& c : excluded) {
    if (c.structure() != raw.domain) throw Error(ErrorKind::LevelMismatch, "excluded coset on a different dual");
  }
  std::vector<char> out_of_family(spec.values.size(), 0);
  for (const auto& c : excluded) {
    for (u64 code : c.members()) out_of_family[code] = 1;
  }
  EmpiricalFamily out;
  out.label = fam.name + "@" + model.name() + "/n=" + std::to_string(n);
  out.level = n;
  out.excluded = excluded;
  for (u64 code = 0; code < spec.values.size(); ++code) {
    if (!out_of_family[code]) out.entries.push_back({"char", code, spec.values[code]});
  }
  if (out.entries.empty()) throw Error(ErrorKind::EmptyFamily, out.label + ": every character is excluded");
  return out;
}

EmpiricalFamily kloosterman_trace_family(u32 p) {
  const auto kl = kloosterman2_prime(p);
  EmpiricalFamily out;
  out.label = "kloosterman-trace/p=" + std::to_string(p);
  const double s = std::sqrt(static_cast<double>(p));
  for (u32 a = 1; a < p; ++a) out.entries.push_back({"point", a, cplx(-kl[a].real() / s, 0)});
  return out;
}

std::vector<u64> angle_histogram(const EmpiricalFamily& fam, unsigned bins) {
  if (bins == 0) throw Error(ErrorKind::ConfigError, "histogram needs at least one bin");
  std::vector<u64> out(bins, 0);
  const double two_pi = 2 * std::numbers::pi;
  for (const auto& e : fam.entries) {
    const double t = (e.angle() + std::numbers::pi) / two_pi * bins;
    const auto j = static_cast<i64>(std::ceil(t)) - 1;
    ++out[static_cast<std::size_t>(std::clamp<i64>(j, 0, bins - 1))];
  }
  return out;
}

}  // namespace charlab
