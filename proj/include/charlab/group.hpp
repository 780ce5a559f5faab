#pragma once

// Commutative algebraic groups over k = F_q presented through their finite
// point groups G(k_n). A model lives on a field tower; level n means points
// with coordinates in F_{q^n}, which must be a subfield of the tower top.

#include <array>
#include <compare>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "charlab/field.hpp"

namespace charlab {

enum class GroupKind { Ga, Gm, MuR, NormOneTorus, EllipticCurve, Product };

std::string_view to_string(GroupKind kind);

struct GroupDims {
  unsigned dim = 0;
  unsigned toric = 0;      // d_t
  unsigned abelian = 0;    // d_a
  unsigned unipotent = 0;  // d_u

  // 2 d_a + d_t + d_u, the codimension convention used for cosets.
  unsigned character_dim() const { return 2 * abelian + toric + unipotent; }
  friend bool operator==(const GroupDims&, const GroupDims&) = default;
};

struct Point {
  unsigned level = 1;
  std::vector<u32> coords;

  friend auto operator<=>(const Point&, const Point&) = default;
};

// Default cap on |G(k_n)| for enumeration.
inline constexpr u64 kPointCountCap = 1'000'000;

class GroupModel {
 public:
  static GroupModel ga(TowerPtr tower, unsigned base_degree, unsigned d = 1);
  static GroupModel gm(TowerPtr tower, unsigned base_degree, unsigned d = 1);
  static GroupModel mu(TowerPtr tower, unsigned base_degree, u64 r);
  static GroupModel norm_one_torus(TowerPtr tower, unsigned base_degree);
  // y^2 = x^3 + a x + b with a, b given as codes of the base field; p > 3.
  static GroupModel elliptic_curve(TowerPtr tower, unsigned base_degree, u32 a, u32 b);
  // Factors must share the tower and base degree; an empty list is the trivial group.
  static GroupModel product(std::vector<GroupModel> factors);
  static GroupModel trivial(TowerPtr tower, unsigned base_degree);

  GroupKind kind() const { return impl_->kind; }
  const TowerPtr& tower() const { return impl_->tower; }
  unsigned base_degree() const { return impl_->base_degree; }
  // |k|
  u64 q() const;
  u32 p() const { return impl_->tower->p(); }

  GroupDims dims() const;
  bool connected() const { return pi0() == 1; }
  // Number of geometric components.
  u64 pi0() const;

  std::size_t width() const { return impl_->width; }
  const std::vector<GroupModel>& factors() const { return impl_->factors; }
  u64 mu_order() const { return impl_->r; }
  // (a, b) for curves, (s, c) of the quadratic t^2 + s t + c for the torus.
  std::array<u32, 2> base_params() const { return impl_->params; }

  bool has_level(unsigned n) const;
  // Largest level supported by the tower.
  unsigned max_level() const { return impl_->tower->top_degree() / impl_->base_degree; }
  const FieldPtr& field(unsigned level) const;

  Point identity(unsigned level) const;
  Point mul(const Point& a, const Point& b) const;
  Point inv(const Point& a) const;
  Point pow(const Point& a, u64 e) const;
  // Coordinatewise x -> x^{q^power}.
  Point frobenius(const Point& a, unsigned power = 1) const;
  bool contains(const Point& a) const;
  // Throws InvalidPoint unless coords satisfy the model's equations.
  Point make_point(unsigned level, std::vector<u32> coords) const;

  // Inclusion G(k_m) -> G(k_n), m | n.
  Point embed(const Point& a, unsigned to_level) const;
  // Inverse of embed; nullopt when a is not defined over k_{to_level}.
  std::optional<Point> restrict_to(const Point& a, unsigned to_level) const;

  // Upper estimate of |G(k_n)| from the kind alone.
  u64 estimated_order(unsigned level) const;
  std::string name() const;

  // Raw span-level law used by enumeration and structure code.
  void mul_into(unsigned level, std::span<const u32> a, std::span<const u32> b, std::span<u32> out) const;
  void inv_into(unsigned level, std::span<const u32> a, std::span<u32> out) const;
  void frobenius_into(unsigned level, unsigned power, std::span<const u32> a, std::span<u32> out) const;

  friend bool operator==(const GroupModel& a, const GroupModel& b);

 private:
  struct Impl {
    GroupKind kind = GroupKind::Ga;
    TowerPtr tower;
    unsigned base_degree = 1;
    unsigned d = 1;
    u64 r = 1;
    std::array<u32, 2> params{0, 0};
    std::vector<GroupModel> factors;
    std::vector<std::size_t> offsets;
    std::size_t width = 1;
    // params embedded at each level; index = level
    std::vector<std::array<u32, 2>> level_params;
  };
  explicit GroupModel(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  static std::shared_ptr<Impl> base_impl(GroupKind kind, TowerPtr tower, unsigned base_degree);
  static void fill_level_params(Impl& impl);
  void require_level(unsigned n) const;

  std::shared_ptr<const Impl> impl_;
};

bool operator==(const GroupModel& a, const GroupModel& b);

// Complete, duplicate-free, lexicographically sorted list of G(k_n).
std::vector<Point> enumerate_points(const GroupModel& g, unsigned level, u64 cap = kPointCountCap);

// Tr_{k_n/k_m}: sum over j < n/m of Fr_{k_m}^j(x), landing in G(k_m).
Point trace_map(const GroupModel& g, const Point& x, unsigned m);

// x^{-1} Fr_{k_n}(x) for x in G(k_m), n | m.
Point lang_map(const GroupModel& g, const Point& x, unsigned n);

// Enumerated G(k_n) with index lookup; law available on indices.
class PointGroup {
 public:
  PointGroup(GroupModel model, unsigned level, u64 cap = kPointCountCap);
  // Adopts an externally supplied, already sorted point list.
  PointGroup(GroupModel model, unsigned level, std::vector<Point> points);

  const GroupModel& model() const { return model_; }
  unsigned level() const { return level_; }
  std::size_t size() const { return count_; }
  std::size_t width() const { return width_; }

  std::span<const u32> coords(std::size_t i) const { return {flat_.data() + i * width_, width_}; }
  Point point(std::size_t i) const;
  std::optional<std::size_t> find(std::span<const u32> coords) const;
  std::optional<std::size_t> find(const Point& p) const { return find(std::span<const u32>(p.coords)); }
  // Throws NotClosed when the coordinates are not in the set.
  std::size_t index_of(std::span<const u32> coords) const;

  std::size_t identity() const { return identity_; }
  std::size_t op(std::size_t i, std::size_t j) const;
  std::size_t inverse(std::size_t i) const;

 private:
  struct SpanHash {
    std::size_t operator()(const std::vector<u32>& v) const noexcept;
  };
  void build_index();

  GroupModel model_;
  unsigned level_;
  std::size_t width_;
  std::size_t count_ = 0;
  std::vector<u32> flat_;
  std::unordered_map<std::vector<u32>, std::size_t, SpanHash> index_;
  std::size_t identity_ = 0;
};

enum class HomRule { Identity, Power, Projection, Multiplication, NormInclusion, ToTrivial };

std::string_view to_string(HomRule rule);

class GroupHom {
 public:
  static GroupHom identity(const GroupModel& g);
  // x -> x^r in the group law (multiplication-by-r on additive/elliptic models).
  static GroupHom power(const GroupModel& g, u64 r);
  // Product -> product of the selected factors (a single factor is returned bare).
  static GroupHom projection(const GroupModel& g, std::vector<std::size_t> factor_indices);
  // G x G -> G, (x, y) -> x y.
  static GroupHom multiplication(const GroupModel& g_times_g);
  // Norm-one torus over k into G_m over the quadratic extension; odd levels only.
  static GroupHom norm_inclusion(const GroupModel& torus);
  static GroupHom to_trivial(const GroupModel& g);

  const GroupModel& source() const { return source_; }
  const GroupModel& target() const { return target_; }
  HomRule rule() const { return rule_; }
  u64 exponent() const { return r_; }
  const std::vector<std::size_t>& selected() const { return selected_; }

  bool defined_at(unsigned level) const;
  Point apply(const Point& x) const;
  // Dimensions of the kernel as an algebraic group.
  GroupDims kernel_dims() const;
  // Whether f o Fr = Fr o f is meaningful (same base field on both sides).
  bool same_base() const { return source_.base_degree() == target_.base_degree(); }
  std::string name() const;

 private:
  GroupHom(GroupModel s, GroupModel t, HomRule rule) : source_(std::move(s)), target_(std::move(t)), rule_(rule) {}

  GroupModel source_;
  GroupModel target_;
  HomRule rule_;
  u64 r_ = 1;
  std::vector<std::size_t> selected_;
  // Root of t^2 + s t + c in F_{q^{2n}}, indexed by level n.
  std::vector<u32> roots_;
};

// Homomorphism property at level 1: exhaustive when |G(k)| <= threshold,
// otherwise `samples` random pairs drawn from `seed`.
bool verify_hom(const GroupHom& f, u64 seed, u64 threshold = 10'000, std::size_t samples = 1000);

// f o Fr == Fr o f on every point of the given level.
bool verify_frobenius_equivariance(const GroupHom& f, unsigned level);

struct FiberCounts {
  u64 source_order = 0;
  u64 target_order = 0;
  u64 kernel = 0;
  u64 image = 0;
  u64 cokernel = 0;
};

FiberCounts pushforward_count(const GroupHom& f, unsigned level);

struct ComponentTraceImage {
  std::vector<Point> image;                 // Tr(G(k_n)) inside G(k_m)
  std::vector<Point> identity_component;    // G^0(k_m)
  bool equals_identity_component = false;
  bool contained_in_identity_component = false;
  bool index_divisible = false;             // pi0 | n/m
};

ComponentTraceImage component_trace_image(const GroupModel& g, unsigned n, unsigned m);

// Identity-component points at a level, sorted.
std::vector<Point> identity_component_points(const GroupModel& g, unsigned level);

// Exhaustive check of 0 -> G(k_n) -> G(k_m) -(Fr^n - 1)-> G(k_m) -Tr-> G(k_n) -> 0.
struct LangSequenceCheck {
  unsigned n = 1;
  unsigned m = 1;
  u64 order_n = 0;
  u64 order_m = 0;
  u64 lang_kernel = 0;
  u64 lang_image = 0;
  u64 trace_kernel = 0;
  u64 trace_image = 0;
  bool kernel_is_g_n = false;
  bool image_is_trace_kernel = false;
  bool trace_surjective = false;
  // |G(k_m) / im(Fr_k - 1)| and |G(k)|
  u64 coinvariants = 0;
  u64 order_1 = 0;

  bool exact() const { return kernel_is_g_n && image_is_trace_kernel && trace_surjective; }
};

LangSequenceCheck check_lang_sequence(const GroupModel& g, unsigned n, unsigned m);

}  // namespace charlab
