#pragma once

// Weyl-sum tests of normalized sum families against the Haar moments of a
// reference compact group.

#include <span>
#include <string>
#include <vector>

#include "charlab/sums.hpp"

namespace charlab {

enum class ReferenceKind { U1, SU2, FiniteCyclic };

struct ReferenceGroup {
  ReferenceKind kind = ReferenceKind::U1;
  u64 m = 1;  // FiniteCyclic only

  static ReferenceGroup u1() { return {ReferenceKind::U1, 1}; }
  static ReferenceGroup su2() { return {ReferenceKind::SU2, 1}; }
  static ReferenceGroup cyclic(u64 m);

  // U1 and FiniteCyclic use z^k; SU2 uses t^k on the real trace t = Re(z).
  cplx functional(cplx value, unsigned k) const;
  cplx haar_moment(unsigned k) const;
  std::string name() const;
};

// (2/pi) int_0^pi (2 cos t)^k sin^2 t dt by composite Simpson.
double su2_moment_numeric(unsigned k, unsigned panels = 2000);
// Compares su2_moment_numeric with the closed form for k <= max_k.
bool check_reference_moments(unsigned max_k = 6, double tol = 1e-6);

// Principal argument in (-pi, pi], with -pi sent to +pi.
double principal_angle(cplx z);

struct FamilyEntry {
  std::string key_kind;  // "char" (a character code) or "point" (a point index)
  u64 key = 0;
  cplx value;
  double angle() const { return principal_angle(value); }
};

struct EmpiricalFamily {
  std::string label;
  unsigned level = 1;
  std::vector<FamilyEntry> entries;
  std::vector<CharCoset> excluded;
};

struct MomentRow {
  unsigned k = 0;
  cplx empirical;
  cplx haar;
  double deviation = 0;  // |empirical - haar|
};

struct WeylReport {
  std::string family;
  std::string reference;
  std::size_t size = 0;
  std::vector<MomentRow> moments;  // k = 1..max_k

  double max_deviation() const;
};

WeylReport weyl_report(const EmpiricalFamily& fam, const ReferenceGroup& k, unsigned max_k);

struct AverageReport {
  std::string reference;
  std::vector<MomentRow> averaged;  // (1/N) sum_n of the per-n W_k
  std::vector<WeylReport> per_n;
};

AverageReport on_average_report(std::span<const EmpiricalFamily> families, const ReferenceGroup& k, unsigned max_k);

// Normalized Mellin/Fourier transform of a sum family at every character of
// G(k_n) outside the excluded cosets.
EmpiricalFamily family_from_sums(const GroupModel& model, const SumFamily& fam, unsigned n,
                                 const std::vector<CharCoset>& excluded, const Executor& ex = Executor::serial());

// -Kl_2(a; p) / sqrt(p) for a = 1..p-1, real traces in [-2, 2].
EmpiricalFamily kloosterman_trace_family(u32 p);

// Counts of entry angles in `bins` equal slices of (-pi, pi].
std::vector<u64> angle_histogram(const EmpiricalFamily& fam, unsigned bins);

}  // namespace charlab
