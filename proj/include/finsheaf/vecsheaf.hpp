#pragma once

// Sheaves of modules over a structure sheaf A on a finite space.
//
// Every module sheaf handled here has free stalks: E_x = A_x^{r_x}, with the
// specialization map E_x -> E_y (y in U_x) given by v |-> M_xy * rho_xy(v),
// M_xy an r_y x r_x matrix over A_y and rho_xy: A_x -> A_y the structure map.
// Free sheaves (M = 1), sheaves glued from transition cocycles and the targets
// of the weight embedding all have this form. Sections over U are compatible
// stalk families, as for any sheaf on a finite space.
//
// Partitions of unity do not exist on connected finite spaces. The embedding
// into a free module takes instead a WeightFamily: global sections alpha_i of
// A whose germ vanishes off U_i, and such that at every point some alpha_i has
// a unit germ. That is exactly what the injectivity argument uses.

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "finsheaf/presheaf.hpp"

namespace finsheaf {

inline constexpr std::size_t kDefaultBudget = 5'000'000;

/// A complete ring-tagged presheaf: the structure sheaf A.
class AlgebraSheaf {
 public:
  /// Throws InvalidPresheaf when p is not a complete presheaf of rings.
  explicit AlgebraSheaf(Presheaf p);

  static std::shared_ptr<const AlgebraSheaf> constant(const SpacePtr& space, const RingPtr& ring);

  const Presheaf& presheaf() const { return p_; }
  const FinSpace& space() const { return p_.space(); }
  const SpacePtr& space_ptr() const { return p_.space_ptr(); }

  /// A(U).
  const RingPtr& ring(OpenSet u) const { return p_.carrier(u).ring; }
  /// A_x = A(U_x).
  const RingPtr& stalk(Point x) const { return ring(space().min_open(x)); }
  Element germ(OpenSet u, Element a, Point x) const { return p_.restrict(u, space().min_open(x), a); }
  const RingMorphism& specialization(Point x, Point y) const;
  Element restrict(OpenSet from, OpenSet to, Element a) const { return p_.restrict(from, to, a); }

  /// The element of A(U) with the given germs (points of U ascending), if any.
  std::optional<Element> glue(OpenSet u, const Section& germs) const;
  Section germs(OpenSet u, Element a) const;

  bool has_field_stalks() const;

 private:
  Presheaf p_;
  std::map<std::pair<Point, Point>, RingMorphism> rho_;
  std::vector<std::map<Section, Element>> glue_;
};

using AlgebraPtr = std::shared_ptr<const AlgebraSheaf>;

/// Germ at x of a matrix over A(U).
Matrix germ_matrix(const AlgebraSheaf& a, OpenSet u, const Matrix& m, Point x);

class ModuleSheaf;
using ModuleSheafPtr = std::shared_ptr<const ModuleSheaf>;

/// Elements of E(U) for a module sheaf E, with the A(U)-module operations.
class SectionModule {
 public:
  SectionModule(ModuleSheafPtr sheaf, OpenSet u, std::vector<Section> elements);

  OpenSet domain() const { return u_; }
  std::size_t size() const { return elements_.size(); }
  const std::vector<Section>& elements() const { return elements_; }
  const Section& operator[](std::size_t i) const { return elements_[i]; }
  std::optional<std::size_t> index_of(const Section& s) const;
  bool contains(const Section& s) const { return index_of(s).has_value(); }

  Section zero() const;
  Section add(const Section& a, const Section& b) const;
  /// a in A(U) acting through its germs.
  Section act(Element a, const Section& s) const;

 private:
  ModuleSheafPtr sheaf_;
  OpenSet u_;
  std::vector<Section> elements_;
};

class ModuleSheaf : public std::enable_shared_from_this<ModuleSheaf> {
 public:
  /// `maps` holds M_xy for y in U_x, y != x (missing pairs mean the identity,
  /// which requires r_x == r_y). Throws InvalidArgument on functor-law failure.
  static ModuleSheafPtr make(AlgebraPtr base, std::vector<int> ranks,
                             std::map<std::pair<Point, Point>, Matrix> maps);

  const AlgebraSheaf& base() const { return *base_; }
  const AlgebraPtr& base_ptr() const { return base_; }
  const FinSpace& space() const { return base_->space(); }
  int rank(Point x) const { return ranks_[static_cast<std::size_t>(x)]; }
  const std::vector<int>& ranks() const { return ranks_; }
  /// M_xy; the identity when x == y.
  const Matrix& transition(Point x, Point y) const;

  VecCodec codec(Point x) const { return VecCodec(base_->stalk(x)->size(), rank(x)); }
  Vec restrict_germ(Point x, Point y, const Vec& v) const;
  Element restrict_code(Point x, Point y, Element code) const;

  /// Stalks as plain sets of vector codes.
  StalkSystem stalk_system() const;
  SectionModule sections(OpenSet u, SearchBudget& budget) const;
  SectionModule sections(OpenSet u, std::size_t budget = kDefaultBudget) const {
    SearchBudget b(budget);
    return sections(u, b);
  }

  /// Module-tagged view: carrier(U) = E(U) with restriction maps. Sets only; the
  /// scalar ring varies with U so the A(U)-action is read through SectionModule.
  Presheaf as_presheaf(std::size_t budget = kDefaultBudget) const;

 private:
  ModuleSheaf() = default;
  AlgebraPtr base_;
  std::vector<int> ranks_;
  std::map<std::pair<Point, Point>, Matrix> maps_;
};

/// A^n: rank n at every point, identity transition matrices.
ModuleSheafPtr free_sheaf(const AlgebraPtr& a, int n);

/// Restriction additive and semi-linear over A: r(a s) = r(a) r(s) on every pair of opens.
std::vector<std::string> check_semilinearity(const ModuleSheafPtr& e, std::size_t budget = kDefaultBudget);

// ---------------------------------------------------------------------------

/// Stalk matrices phi_x: source_x -> target_x over A_x for x in `domain`.
class ModuleMorphism {
 public:
  ModuleMorphism(ModuleSheafPtr source, ModuleSheafPtr target, OpenSet domain, std::map<Point, Matrix> components);

  const ModuleSheafPtr& source() const { return source_; }
  const ModuleSheafPtr& target() const { return target_; }
  OpenSet domain() const { return domain_; }
  const Matrix& component(Point x) const;
  /// The per-open component E(U) -> F(U), U inside the domain.
  Section apply(OpenSet u, const Section& s) const;

 private:
  ModuleSheafPtr source_, target_;
  OpenSet domain_;
  std::map<Point, Matrix> components_;
};

ModuleMorphism identity_morphism(const ModuleSheafPtr& e);
std::vector<std::string> check_naturality(const ModuleMorphism& m);
/// Every stalk component is injective.
bool is_monomorphism(const ModuleMorphism& m);
/// Every stalk component is bijective.
bool is_isomorphism(const ModuleMorphism& m);

/// Exhaustive search over invertible stalk matrices with naturality pruning.
std::optional<ModuleMorphism> find_module_isomorphism(const ModuleSheafPtr& e, const ModuleSheafPtr& f,
                                                      std::size_t budget = kDefaultBudget);

// ---------------------------------------------------------------------------

/// A family of stalk submodules S_x of E_x, x in `domain`, closed under
/// specialization. Sections over U are the compatible families with germs in S.
class VectorSubsheaf {
 public:
  /// `stalks` is indexed by point; entries outside the domain are ignored.
  VectorSubsheaf(ModuleSheafPtr ambient, OpenSet domain, std::vector<Submodule> stalks);

  const ModuleSheafPtr& ambient() const { return ambient_; }
  OpenSet domain() const { return domain_; }
  const Submodule& stalk(Point x) const;
  VectorSubsheaf restricted(OpenSet v) const;
  /// The same subsheaf inside `bigger` (= A^{n+extra}) via the coordinate inclusion.
  VectorSubsheaf padded(const ModuleSheafPtr& bigger) const;

  friend bool operator==(const VectorSubsheaf& a, const VectorSubsheaf& b) {
    return a.domain_ == b.domain_ && a.stalks_ == b.stalks_;
  }
  friend bool operator<(const VectorSubsheaf& a, const VectorSubsheaf& b) {
    if (a.domain_.bits() != b.domain_.bits()) return a.domain_.bits() < b.domain_.bits();
    return a.stalks_ < b.stalks_;
  }

 private:
  ModuleSheafPtr ambient_;
  OpenSet domain_;
  std::vector<Submodule> stalks_;
};

VectorSubsheaf full_subsheaf(const ModuleSheafPtr& ambient, OpenSet domain);
VectorSubsheaf zero_subsheaf(const ModuleSheafPtr& ambient, OpenSet domain);

/// Empty iff each stalk is a submodule of the ambient stalk and r_xy(S_x) lies in S_y.
std::vector<std::string> validate_subsheaf(const VectorSubsheaf& s);

SectionModule subsheaf_sections(const VectorSubsheaf& s, OpenSet u, SearchBudget& budget);
SectionModule subsheaf_sections(const VectorSubsheaf& s, OpenSet u, std::size_t budget = kDefaultBudget);

struct FreenessResult {
  bool free = false;
  /// k sections over U whose germs are a basis of every stalk.
  std::vector<Section> witness;
  std::size_t tuples_checked = 0;
};

FreenessResult is_free_of_rank(const VectorSubsheaf& s, OpenSet u, int k, SearchBudget& budget);
FreenessResult is_free_of_rank(const VectorSubsheaf& s, OpenSet u, int k, std::size_t budget = kDefaultBudget);

/// Free of rank k on U_x for every x in U.
bool is_locally_free(const VectorSubsheaf& s, OpenSet u, int k, SearchBudget& budget);
bool is_locally_free(const VectorSubsheaf& s, OpenSet u, int k, std::size_t budget = kDefaultBudget);

/// Stalkwise image of a morphism defined on the whole space.
VectorSubsheaf image_subsheaf(const ModuleMorphism& m);

// ---------------------------------------------------------------------------

struct TransitionCocycle {
  AlgebraPtr base;
  std::vector<OpenSet> cover;
  int rank = 0;
  /// g_ij over A(U_i n U_j), mapping j-coordinates to i-coordinates. Missing
  /// (i,i) entries are the identity; a missing (j,i) is the inverse of (i,j).
  std::map<std::pair<int, int>, Matrix> transitions;
};

std::vector<std::string> validate_cocycle(const TransitionCocycle& c);

struct CocycleSheaf {
  ModuleSheafPtr sheaf;
  std::vector<OpenSet> cover;
  /// psi_i: E|U_i -> A^k|U_i.
  std::vector<ModuleMorphism> trivializations;
};

/// Glues A^k|U_i along the transitions. Throws CocycleConditionViolated.
CocycleSheaf sheaf_from_cocycle(const TransitionCocycle& c);

// ---------------------------------------------------------------------------

struct WeightFamily {
  AlgebraPtr base;
  std::vector<OpenSet> cover;
  /// alpha_i in A(X), one per cover member.
  std::vector<Element> weights;
};

/// Support: the germ of alpha_i vanishes at every point outside U_i.
/// Covering: at each point some alpha_i has a unit germ.
std::vector<std::string> validate_weights(const WeightFamily& w);

struct WeightSearch {
  std::size_t candidates = 0;
  std::vector<WeightFamily> valid;
};

/// Tries every tuple of global sections of A.
WeightSearch search_weight_families(const AlgebraPtr& a, const std::vector<OpenSet>& cover,
                                    std::size_t budget = kDefaultBudget);

/// u |-> (alpha_1 psi_1(u), ..., alpha_m psi_m(u)) into A^{k m}, the i-th
/// block being zero off U_i. Throws InvalidWeights or TrivializationMismatch.
ModuleMorphism embed_via_weights(const ModuleSheafPtr& e, const std::vector<OpenSet>& cover,
                                 const std::vector<ModuleMorphism>& trivializations, const WeightFamily& w);

}  // namespace finsheaf
