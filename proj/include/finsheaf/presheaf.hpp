#pragma once

// Presheaves of finite carriers on a finite space, their stalks and their
// sheafification.
//
// Stalks collapse to values on minimal opens: the neighbourhood filter of x
// has U_x as its least element, so the direct limit defining the stalk is
// attained there and the germ of s in F(U) at x is just F(U -> U_x)(s). A sheaf
// on a finite space is therefore the same thing as its stalk system
// (F(U_x), F(U_x -> U_y) for y in U_x), and sections over U are the
// compatible germ families over the points of U. Sheafification and pullback
// are both computed that way.
//
// Separation and gluing are checked on nonempty opens only. A presheaf built
// by a literal formula (constant presheaf, two-algebra presheaf) is allowed
// an arbitrary value on the empty set; the sheafification puts a one-point
// carrier there.

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "finsheaf/finalg.hpp"
#include "finsheaf/finspace.hpp"

namespace finsheaf {

enum class CarrierKind { Set, Ring, Module };

std::string_view to_string(CarrierKind kind);

/// A finite carrier, optionally equipped with ring or module structure.
struct Carrier {
  CarrierKind kind = CarrierKind::Set;
  int size = 1;
  RingPtr ring;
  ModulePtr module;

  static Carrier set(int size) { return Carrier{CarrierKind::Set, size, nullptr, nullptr}; }
  static Carrier of(RingPtr r) {
    const int n = r->size();
    return Carrier{CarrierKind::Ring, n, std::move(r), nullptr};
  }
  static Carrier of(ModulePtr m) {
    const int n = m->size();
    return Carrier{CarrierKind::Module, n, nullptr, std::move(m)};
  }
};

using ElementMap = std::vector<Element>;
/// Germs of a compatible family, one per point of the open in increasing point order.
using Section = std::vector<Element>;

class Presheaf {
 public:
  using RestrictionFn = std::function<ElementMap(OpenSet from, OpenSet to)>;

  /// `carriers` is indexed like space->opens(). `restrict` is queried for every
  /// pair V subset-of U; missing identity pairs are not assumed.
  Presheaf(SpacePtr space, std::vector<Carrier> carriers, const RestrictionFn& restrict);

  const FinSpace& space() const { return *data_->space; }
  const SpacePtr& space_ptr() const { return data_->space; }
  const Carrier& carrier(OpenSet u) const { return data_->carriers[static_cast<std::size_t>(space().open_index(u))]; }
  const std::vector<Carrier>& carriers() const { return data_->carriers; }
  const ElementMap& restriction(OpenSet from, OpenSet to) const;
  Element restrict(OpenSet from, OpenSet to, Element a) const {
    return restriction(from, to)[static_cast<std::size_t>(a)];
  }
  /// Common tag of all carriers on nonempty opens, Set when mixed.
  CarrierKind uniform_kind() const;

 private:
  struct Data {
    SpacePtr space;
    std::vector<Carrier> carriers;
    std::map<std::pair<int, int>, ElementMap> restrictions;
  };
  std::shared_ptr<const Data> data_;
};

/// Functor-law and structure violations; empty means valid.
std::vector<std::string> validate(const Presheaf& p);

/// The stalk of p at x, carried by p(U_x).
class Stalk {
 public:
  Stalk(Presheaf p, Point x) : p_(std::move(p)), x_(x) {}

  Point point() const { return x_; }
  OpenSet neighbourhood() const { return p_.space().min_open(x_); }
  const Carrier& carrier() const { return p_.carrier(neighbourhood()); }
  /// Germ at x of a in p(U), x in U.
  Element germ(OpenSet u, Element a) const;

 private:
  Presheaf p_;
  Point x_;
};

Stalk stalk(const Presheaf& p, Point x);

/// Stalk carriers with the specialization maps F(U_x) -> F(U_y), y in U_x.
class StalkSystem {
 public:
  static StalkSystem of(const Presheaf& p);
  StalkSystem(SpacePtr space, std::vector<Carrier> stalks, std::map<std::pair<Point, Point>, ElementMap> maps);

  /// Stalks of the pullback along f: Y -> X, stalk at y is the stalk at f(y).
  StalkSystem pulled_back(const ContinuousMap& f) const;

  const FinSpace& space() const { return *space_; }
  const SpacePtr& space_ptr() const { return space_; }
  const Carrier& carrier(Point x) const { return stalks_[static_cast<std::size_t>(x)]; }
  Element restrict(Point x, Point y, Element a) const;
  const ElementMap& map(Point x, Point y) const;

 private:
  SpacePtr space_;
  std::vector<Carrier> stalks_;
  std::map<std::pair<Point, Point>, ElementMap> maps_;
};

using GermRestriction = std::function<Element(Point x, Point y, Element germ)>;

/// Families (g_x in candidates[x])_{x in U} with restrict(x, y, g_x) = g_y for
/// y in U_x, lexicographically sorted. Candidate lists must be sorted.
std::vector<Section> compatible_families(const FinSpace& space, OpenSet u,
                                         const std::vector<std::vector<Element>>& candidates,
                                         const GermRestriction& restrict, SearchBudget& budget);

/// Compatible germ families over u, lexicographically sorted.
std::vector<Section> compatible_families(const StalkSystem& stalks, OpenSet u, SearchBudget& budget);

/// The complete presheaf of compatible germ families, with pointwise ring or
/// module structure when every stalk carries one.
Presheaf sections_presheaf(const StalkSystem& stalks, SearchBudget& budget);

/// Sheafification of a presheaf together with its unit.
class SheafSpace {
 public:
  SheafSpace(Presheaf source, std::size_t budget = 1'000'000);

  const Presheaf& source() const { return source_; }
  const StalkSystem& stalks() const { return stalks_; }
  /// The section sets as a (complete) presheaf.
  const Presheaf& sections() const { return sections_; }
  const std::vector<Section>& families(OpenSet u) const {
    return families_[static_cast<std::size_t>(source_.space().open_index(u))];
  }
  /// Unit p(U) -> sections(U) as an element map into family indices.
  const ElementMap& unit(OpenSet u) const {
    return unit_[static_cast<std::size_t>(source_.space().open_index(u))];
  }
  bool unit_injective(OpenSet u) const;
  bool unit_bijective(OpenSet u) const;
  /// Index of a germ family over u, if it is one.
  std::optional<Element> family_index(OpenSet u, const Section& s) const;

 private:
  Presheaf source_;
  StalkSystem stalks_;
  std::vector<std::vector<Section>> families_;
  std::vector<ElementMap> unit_;
  Presheaf sections_;
};

SheafSpace sheafify(const Presheaf& p, std::size_t budget = 1'000'000);

/// Sections are determined by their germs: p(U) -> prod_{x in U} p(U_x) is
/// injective for every nonempty U. Every open cover of U refines the cover by
/// the minimal opens of its points, so this is separation for every cover.
bool is_monopresheaf(const Presheaf& p);

/// The sheafification unit is bijective on every nonempty open.
bool is_complete(const Presheaf& p, std::size_t budget = 1'000'000);

/// The pullback f*(p) on the domain of f, stalk at y equal to the stalk of p at f(y).
Presheaf pullback(const Presheaf& p, const ContinuousMap& f, std::size_t budget = 1'000'000);

/// A natural family of maps between presheaves on the same space.
class PresheafMorphism {
 public:
  PresheafMorphism(Presheaf source, Presheaf target, std::vector<ElementMap> components);

  const Presheaf& source() const { return source_; }
  const Presheaf& target() const { return target_; }
  const ElementMap& component(OpenSet u) const {
    return components_[static_cast<std::size_t>(source_.space().open_index(u))];
  }

 private:
  Presheaf source_, target_;
  std::vector<ElementMap> components_;
};

/// Naturality violations; empty means the components commute with restriction.
std::vector<std::string> check_naturality(const PresheafMorphism& m);

/// The unit p -> sections presheaf of its sheafification.
PresheafMorphism unit_morphism(const SheafSpace& s);

// ---------------------------------------------------------------------------
// Constructors.

/// Same carrier on every open, identity restrictions.
Presheaf constant_presheaf(const SpacePtr& space, const Carrier& value);

/// Sheafified constant presheaf of a ring: locally constant ring-valued functions.
Presheaf constant_sheaf(const SpacePtr& space, const RingPtr& ring);

/// p(U) = A0 when x0 in U, else A1, with restrictions id, rho, id according
/// to whether x0 lies in V, in U but not V, or not in U.
Presheaf two_algebra_presheaf(const SpacePtr& space, Point x0, const RingMorphism& rho);

/// Checks that `rho` is a unital morphism A0 -> A1 first; throws InvalidMorphism.
Presheaf two_algebra_presheaf(const SpacePtr& space, Point x0, const RingPtr& a0, const RingPtr& a1,
                              const std::vector<Element>& rho);

}  // namespace finsheaf
