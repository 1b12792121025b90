#include "finsheaf/presheaf.hpp"

#include <algorithm>
#include <numeric>

namespace finsheaf {

std::string_view to_string(CarrierKind kind) {
  switch (kind) {
    case CarrierKind::Set: return "set";
    case CarrierKind::Ring: return "ring";
    case CarrierKind::Module: return "module";
  }
  return "set";
}

namespace {

ElementMap identity_map(int n) {
  ElementMap id(static_cast<std::size_t>(n));
  std::iota(id.begin(), id.end(), 0);
  return id;
}

std::vector<Point> points_by_neighbourhood(const FinSpace& space, OpenSet u) {
  auto pts = u.points();
  std::stable_sort(pts.begin(), pts.end(), [&](Point a, Point b) {
    return space.min_open(a).size() > space.min_open(b).size();
  });
  return pts;
}

std::string describe(const FinSpace& s, OpenSet u) { return "{" + s.key(u) + "}"; }

Element lookup(const std::vector<Section>& sorted, const Section& s) {
  auto it = std::lower_bound(sorted.begin(), sorted.end(), s);
  if (it == sorted.end() || *it != s) return -1;
  return static_cast<Element>(it - sorted.begin());
}

Section project(const Section& s, OpenSet from, OpenSet to) {
  Section out;
  out.reserve(static_cast<std::size_t>(to.size()));
  std::size_t i = 0;
  for (Point x : from.points()) {
    if (to.contains(x)) out.push_back(s[i]);
    ++i;
  }
  return out;
}

// Pointwise structure on the families over u.
Carrier pointwise_carrier(const StalkSystem& stalks, OpenSet u, const std::vector<Section>& fams) {
  const auto pts = u.points();
  const int n = static_cast<int>(fams.size());
  bool all_rings = true, all_modules = true;
  RingPtr scalars;
  for (Point x : pts) {
    const Carrier& c = stalks.carrier(x);
    all_rings = all_rings && c.kind == CarrierKind::Ring;
    if (c.kind == CarrierKind::Module) {
      if (!scalars) scalars = c.module->scalars();
      all_modules = all_modules && c.module->scalars() == scalars;
    } else {
      all_modules = false;
    }
  }
  if (pts.empty()) {
    // The empty family. Keep the tag of the stalks when it is uniform.
    for (Point x = 0; x < stalks.space().size(); ++x) {
      const Carrier& c = stalks.carrier(x);
      if (c.kind == CarrierKind::Ring) return Carrier::of(make_zero_ring());
      if (c.kind == CarrierKind::Module) {
        return Carrier::of(FinModule::from_tables(c.module->scalars(), 1, {0},
                                                  std::vector<Element>(static_cast<std::size_t>(c.module->scalars()->size()), 0), 0));
      }
      break;
    }
    return Carrier::set(1);
  }
  if (!all_rings && !all_modules) return Carrier::set(n);
  if (n > kMaxTableElements) {
    throw Error(ErrorKind::SpaceTooLarge, "section set of size " + std::to_string(n) + " too large for pointwise tables");
  }
  auto combine = [&](const Section& a, const Section& b, auto op) {
    Section out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = op(pts[i], a[i], b[i]);
    return lookup(fams, out);
  };
  std::vector<Element> add(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      add[static_cast<std::size_t>(a * n + b)] = combine(fams[static_cast<std::size_t>(a)], fams[static_cast<std::size_t>(b)], [&](Point x, Element g, Element h) {
        const Carrier& c = stalks.carrier(x);
        return c.kind == CarrierKind::Ring ? c.ring->add(g, h) : c.module->add(g, h);
      });
    }
  }
  if (std::find(add.begin(), add.end(), -1) != add.end()) {
    throw Error(ErrorKind::InvalidPresheaf, "restrictions are not additive; sections not closed under addition");
  }
  if (all_rings) {
    std::vector<Element> mul(add.size());
    std::vector<std::string> names;
    for (int a = 0; a < n; ++a) {
      std::string name = "(";
      for (std::size_t i = 0; i < pts.size(); ++i) {
        if (i) name += ",";
        name += stalks.carrier(pts[i]).ring->element_name(fams[static_cast<std::size_t>(a)][i]);
      }
      names.push_back(name + ")");
      for (int b = 0; b < n; ++b) {
        mul[static_cast<std::size_t>(a * n + b)] = combine(fams[static_cast<std::size_t>(a)], fams[static_cast<std::size_t>(b)], [&](Point x, Element g, Element h) {
          return stalks.carrier(x).ring->mul(g, h);
        });
      }
    }
    Section zero, one;
    for (Point x : pts) {
      zero.push_back(stalks.carrier(x).ring->zero());
      one.push_back(stalks.carrier(x).ring->one());
    }
    const Element z = lookup(fams, zero), o = lookup(fams, one);
    if (z < 0 || o < 0 || std::find(mul.begin(), mul.end(), -1) != mul.end()) {
      throw Error(ErrorKind::InvalidPresheaf, "restrictions are not ring morphisms");
    }
    return Carrier::of(FinRing::from_tables("sections", n, std::move(add), std::move(mul), z, o,
                                            std::move(names), n <= 32));
  }
  std::vector<Element> act(static_cast<std::size_t>(scalars->size()) * static_cast<std::size_t>(n));
  for (Element r = 0; r < scalars->size(); ++r) {
    for (int a = 0; a < n; ++a) {
      Section out;
      for (std::size_t i = 0; i < pts.size(); ++i) out.push_back(stalks.carrier(pts[i]).module->act(r, fams[static_cast<std::size_t>(a)][i]));
      act[static_cast<std::size_t>(r * n + a)] = lookup(fams, out);
    }
  }
  Section zero;
  for (Point x : pts) zero.push_back(stalks.carrier(x).module->zero());
  const Element z = lookup(fams, zero);
  if (z < 0 || std::find(act.begin(), act.end(), -1) != act.end()) {
    throw Error(ErrorKind::InvalidPresheaf, "restrictions are not linear");
  }
  return Carrier::of(FinModule::from_tables(scalars, n, std::move(add), std::move(act), z, false));
}

Presheaf build_sections_presheaf(const StalkSystem& stalks, const std::vector<std::vector<Section>>& families) {
  const FinSpace& space = stalks.space();
  std::vector<Carrier> carriers;
  for (int i = 0; i < space.open_count(); ++i) {
    carriers.push_back(pointwise_carrier(stalks, space.opens()[static_cast<std::size_t>(i)], families[static_cast<std::size_t>(i)]));
  }
  return Presheaf(stalks.space_ptr(), std::move(carriers), [&](OpenSet from, OpenSet to) {
    const auto& src = families[static_cast<std::size_t>(space.open_index(from))];
    const auto& dst = families[static_cast<std::size_t>(space.open_index(to))];
    ElementMap m;
    m.reserve(src.size());
    for (const auto& s : src) m.push_back(lookup(dst, project(s, from, to)));
    return m;
  });
}

}  // namespace

// ---------------------------------------------------------------------------

Presheaf::Presheaf(SpacePtr space, std::vector<Carrier> carriers, const RestrictionFn& restrict) {
  auto data = std::make_shared<Data>();
  data->space = std::move(space);
  data->carriers = std::move(carriers);
  const auto& opens = data->space->opens();
  if (data->carriers.size() != opens.size()) {
    throw Error(ErrorKind::InvalidPresheaf, "need one carrier per open set");
  }
  for (std::size_t u = 0; u < opens.size(); ++u) {
    for (std::size_t v = 0; v < opens.size(); ++v) {
      if (!opens[v].subset_of(opens[u])) continue;
      ElementMap m = restrict(opens[u], opens[v]);
      if (m.size() != static_cast<std::size_t>(data->carriers[u].size)) {
        throw Error(ErrorKind::InvalidPresheaf, "restriction " + describe(*data->space, opens[u]) + " -> " +
                                                    describe(*data->space, opens[v]) + " is not total");
      }
      for (Element e : m) {
        if (e < 0 || e >= data->carriers[v].size) {
          throw Error(ErrorKind::InvalidPresheaf, "restriction " + describe(*data->space, opens[u]) + " -> " +
                                                      describe(*data->space, opens[v]) + " leaves its target");
        }
      }
      data->restrictions.emplace(std::pair{static_cast<int>(u), static_cast<int>(v)}, std::move(m));
    }
  }
  data_ = std::move(data);
}

const ElementMap& Presheaf::restriction(OpenSet from, OpenSet to) const {
  auto it = data_->restrictions.find({space().open_index(from), space().open_index(to)});
  if (it == data_->restrictions.end()) {
    throw Error(ErrorKind::InvalidArgument, describe(space(), to) + " is not inside " + describe(space(), from));
  }
  return it->second;
}

CarrierKind Presheaf::uniform_kind() const {
  std::optional<CarrierKind> kind;
  for (std::size_t i = 1; i < data_->carriers.size(); ++i) {
    const auto k = data_->carriers[i].kind;
    if (kind && *kind != k) return CarrierKind::Set;
    kind = k;
  }
  return kind.value_or(CarrierKind::Set);
}

std::vector<std::string> validate(const Presheaf& p) {
  std::vector<std::string> report;
  const FinSpace& s = p.space();
  const auto& opens = s.opens();
  for (OpenSet u : opens) {
    if (p.restriction(u, u) != identity_map(p.carrier(u).size)) {
      report.push_back("restriction " + describe(s, u) + " -> " + describe(s, u) + " is not the identity");
    }
  }
  for (OpenSet u : opens) {
    for (OpenSet v : opens) {
      if (!v.subset_of(u) || v == u) continue;
      const ElementMap& uv = p.restriction(u, v);
      for (OpenSet w : opens) {
        if (!w.subset_of(v) || w == v) continue;
        const ElementMap& vw = p.restriction(v, w);
        const ElementMap& uw = p.restriction(u, w);
        for (std::size_t a = 0; a < uv.size(); ++a) {
          if (vw[static_cast<std::size_t>(uv[a])] != uw[a]) {
            report.push_back("restrictions " + describe(s, u) + " -> " + describe(s, v) + " -> " +
                             describe(s, w) + " do not compose");
            break;
          }
        }
      }
      const Carrier& cu = p.carrier(u);
      const Carrier& cv = p.carrier(v);
      if (cu.kind == CarrierKind::Ring && cv.kind == CarrierKind::Ring) {
        if (auto why = RingMorphism::check(*cu.ring, *cv.ring, uv)) {
          report.push_back("restriction " + describe(s, u) + " -> " + describe(s, v) + " is not a ring morphism: " + *why);
        }
      } else if (cu.kind == CarrierKind::Module && cv.kind == CarrierKind::Module) {
        const FinModule& mu = *cu.module;
        const FinModule& mv = *cv.module;
        bool ok = mu.scalars() == mv.scalars();
        for (Element a = 0; ok && a < mu.size(); ++a) {
          for (Element b = 0; ok && b < mu.size(); ++b) {
            ok = uv[static_cast<std::size_t>(mu.add(a, b))] == mv.add(uv[static_cast<std::size_t>(a)], uv[static_cast<std::size_t>(b)]);
          }
          for (Element r = 0; ok && r < mu.scalars()->size(); ++r) {
            ok = uv[static_cast<std::size_t>(mu.act(r, a))] == mv.act(r, uv[static_cast<std::size_t>(a)]);
          }
        }
        if (!ok) report.push_back("restriction " + describe(s, u) + " -> " + describe(s, v) + " is not linear");
      }
    }
  }
  return report;
}

Element Stalk::germ(OpenSet u, Element a) const {
  if (!u.contains(x_)) throw Error(ErrorKind::InvalidArgument, "germ taken outside the open set");
  return p_.restrict(u, neighbourhood(), a);
}

Stalk stalk(const Presheaf& p, Point x) {
  if (x < 0 || x >= p.space().size()) throw Error(ErrorKind::UnknownPoint, "stalk at unknown point");
  return Stalk(p, x);
}

// ---------------------------------------------------------------------------

StalkSystem::StalkSystem(SpacePtr space, std::vector<Carrier> stalks,
                         std::map<std::pair<Point, Point>, ElementMap> maps)
    : space_(std::move(space)), stalks_(std::move(stalks)), maps_(std::move(maps)) {}

StalkSystem StalkSystem::of(const Presheaf& p) {
  const FinSpace& s = p.space();
  std::vector<Carrier> stalks;
  std::map<std::pair<Point, Point>, ElementMap> maps;
  for (Point x = 0; x < s.size(); ++x) {
    stalks.push_back(p.carrier(s.min_open(x)));
    for (Point y : s.min_open(x).points()) maps.emplace(std::pair{x, y}, p.restriction(s.min_open(x), s.min_open(y)));
  }
  return StalkSystem(p.space_ptr(), std::move(stalks), std::move(maps));
}

StalkSystem StalkSystem::pulled_back(const ContinuousMap& f) const {
  if (f.codomain_ptr() != space_ && f.codomain().names() != space_->names()) {
    throw Error(ErrorKind::InvalidArgument, "map codomain is not the base space");
  }
  if (!validate_map(f)) throw Error(ErrorKind::InvalidArgument, "pullback along a discontinuous map");
  const FinSpace& y = f.domain();
  std::vector<Carrier> stalks;
  std::map<std::pair<Point, Point>, ElementMap> maps;
  for (Point a = 0; a < y.size(); ++a) {
    stalks.push_back(carrier(f(a)));
    for (Point b : y.min_open(a).points()) maps.emplace(std::pair{a, b}, map(f(a), f(b)));
  }
  return StalkSystem(f.domain_ptr(), std::move(stalks), std::move(maps));
}

const ElementMap& StalkSystem::map(Point x, Point y) const {
  auto it = maps_.find({x, y});
  if (it == maps_.end()) throw Error(ErrorKind::InvalidArgument, "no specialization from " + space_->name(x) + " to " + space_->name(y));
  return it->second;
}

Element StalkSystem::restrict(Point x, Point y, Element a) const { return map(x, y)[static_cast<std::size_t>(a)]; }

std::vector<Section> compatible_families(const FinSpace& space, OpenSet u,
                                         const std::vector<std::vector<Element>>& candidates,
                                         const GermRestriction& restrict, SearchBudget& budget) {
  const auto pts = u.points();
  const auto order = points_by_neighbourhood(space, u);
  std::vector<int> slot(static_cast<std::size_t>(space.size()), -1);
  for (std::size_t i = 0; i < pts.size(); ++i) slot[static_cast<std::size_t>(pts[i])] = static_cast<int>(i);
  auto germ_of = [&](Point z, const Section& cur) { return cur[static_cast<std::size_t>(slot[static_cast<std::size_t>(z)])]; };

  std::vector<Section> out;
  Section current(pts.size(), -1);
  std::vector<char> assigned(static_cast<std::size_t>(space.size()), 0);

  auto consistent = [&](Point x, Element g) {
    for (Point y : space.min_open(x).points()) {
      if (y != x && assigned[static_cast<std::size_t>(y)] && restrict(x, y, g) != germ_of(y, current)) return false;
    }
    return true;
  };

  auto recurse = [&](auto&& self, std::size_t depth) -> void {
    if (depth == order.size()) {
      out.push_back(current);
      return;
    }
    const Point x = order[depth];
    const auto& cands = candidates[static_cast<std::size_t>(x)];
    std::optional<Element> forced;
    for (Point z : pts) {
      if (z == x || !assigned[static_cast<std::size_t>(z)] || !space.min_open(z).contains(x)) continue;
      const Element g = restrict(z, x, germ_of(z, current));
      if (forced && *forced != g) return;
      forced = g;
    }
    auto attempt = [&](Element g) {
      budget.charge();
      if (!consistent(x, g)) return;
      current[static_cast<std::size_t>(slot[static_cast<std::size_t>(x)])] = g;
      assigned[static_cast<std::size_t>(x)] = 1;
      self(self, depth + 1);
      assigned[static_cast<std::size_t>(x)] = 0;
    };
    if (forced) {
      if (std::binary_search(cands.begin(), cands.end(), *forced)) attempt(*forced);
    } else {
      for (Element g : cands) attempt(g);
    }
  };
  recurse(recurse, 0);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Section> compatible_families(const StalkSystem& stalks, OpenSet u, SearchBudget& budget) {
  std::vector<std::vector<Element>> candidates;
  for (Point x = 0; x < stalks.space().size(); ++x) {
    candidates.push_back(u.contains(x) ? identity_map(stalks.carrier(x).size) : ElementMap{});
  }
  return compatible_families(stalks.space(), u, candidates,
                             [&](Point x, Point y, Element g) { return stalks.restrict(x, y, g); }, budget);
}

Presheaf sections_presheaf(const StalkSystem& stalks, SearchBudget& budget) {
  std::vector<std::vector<Section>> families;
  for (OpenSet u : stalks.space().opens()) families.push_back(compatible_families(stalks, u, budget));
  return build_sections_presheaf(stalks, families);
}

// ---------------------------------------------------------------------------

SheafSpace::SheafSpace(Presheaf source, std::size_t budget)
    : source_(std::move(source)), stalks_(StalkSystem::of(source_)), sections_(source_) {
  SearchBudget b(budget);
  const FinSpace& s = source_.space();
  for (OpenSet u : s.opens()) {
    families_.push_back(compatible_families(stalks_, u, b));
    const auto& fams = families_.back();
    ElementMap unit;
    for (Element a = 0; a < source_.carrier(u).size; ++a) {
      Section germs;
      for (Point x : u.points()) germs.push_back(source_.restrict(u, s.min_open(x), a));
      const Element idx = lookup(fams, germs);
      if (idx < 0) throw Error(ErrorKind::InvalidPresheaf, "germs of a section over " + describe(s, u) + " are incompatible");
      unit.push_back(idx);
    }
    unit_.push_back(std::move(unit));
  }
  sections_ = build_sections_presheaf(stalks_, families_);
}

bool SheafSpace::unit_injective(OpenSet u) const {
  ElementMap m = unit(u);
  std::sort(m.begin(), m.end());
  return std::adjacent_find(m.begin(), m.end()) == m.end();
}

bool SheafSpace::unit_bijective(OpenSet u) const {
  return unit_injective(u) && unit(u).size() == families(u).size();
}

std::optional<Element> SheafSpace::family_index(OpenSet u, const Section& s) const {
  const Element i = lookup(families(u), s);
  return i < 0 ? std::nullopt : std::optional<Element>(i);
}

SheafSpace sheafify(const Presheaf& p, std::size_t budget) { return SheafSpace(p, budget); }

bool is_monopresheaf(const Presheaf& p) {
  const FinSpace& s = p.space();
  for (OpenSet u : s.opens()) {
    if (u.empty()) continue;
    std::vector<Section> germs;
    for (Element a = 0; a < p.carrier(u).size; ++a) {
      Section g;
      for (Point x : u.points()) g.push_back(p.restrict(u, s.min_open(x), a));
      germs.push_back(std::move(g));
    }
    std::sort(germs.begin(), germs.end());
    if (std::adjacent_find(germs.begin(), germs.end()) != germs.end()) return false;
  }
  return true;
}

bool is_complete(const Presheaf& p, std::size_t budget) {
  if (!is_monopresheaf(p)) return false;
  SheafSpace sh(p, budget);
  for (OpenSet u : p.space().opens()) {
    if (!u.empty() && !sh.unit_bijective(u)) return false;
  }
  return true;
}

Presheaf pullback(const Presheaf& p, const ContinuousMap& f, std::size_t budget) {
  SearchBudget b(budget);
  return sections_presheaf(StalkSystem::of(p).pulled_back(f), b);
}

// ---------------------------------------------------------------------------

PresheafMorphism::PresheafMorphism(Presheaf source, Presheaf target, std::vector<ElementMap> components)
    : source_(std::move(source)), target_(std::move(target)), components_(std::move(components)) {
  if (source_.space_ptr() != target_.space_ptr()) {
    throw Error(ErrorKind::InvalidArgument, "morphism between presheaves on different spaces");
  }
  if (components_.size() != static_cast<std::size_t>(source_.space().open_count())) {
    throw Error(ErrorKind::InvalidArgument, "need one component per open set");
  }
  for (std::size_t i = 0; i < components_.size(); ++i) {
    if (components_[i].size() != static_cast<std::size_t>(source_.carriers()[i].size)) {
      throw Error(ErrorKind::InvalidArgument, "component is not total");
    }
  }
}

std::vector<std::string> check_naturality(const PresheafMorphism& m) {
  std::vector<std::string> report;
  const FinSpace& s = m.source().space();
  for (OpenSet u : s.opens()) {
    for (OpenSet v : s.opens()) {
      if (!v.subset_of(u)) continue;
      const auto& fu = m.component(u);
      const auto& fv = m.component(v);
      const auto& su = m.source().restriction(u, v);
      const auto& tu = m.target().restriction(u, v);
      for (std::size_t a = 0; a < fu.size(); ++a) {
        if (tu[static_cast<std::size_t>(fu[a])] != fv[static_cast<std::size_t>(su[a])]) {
          report.push_back("square " + describe(s, u) + " -> " + describe(s, v) + " does not commute");
          break;
        }
      }
    }
  }
  return report;
}

PresheafMorphism unit_morphism(const SheafSpace& sh) {
  std::vector<ElementMap> comps;
  for (OpenSet u : sh.source().space().opens()) comps.push_back(sh.unit(u));
  return PresheafMorphism(sh.source(), sh.sections(), std::move(comps));
}

// ---------------------------------------------------------------------------

Presheaf constant_presheaf(const SpacePtr& space, const Carrier& value) {
  std::vector<Carrier> carriers(space->opens().size(), value);
  return Presheaf(space, std::move(carriers), [&](OpenSet, OpenSet) { return identity_map(value.size); });
}

Presheaf constant_sheaf(const SpacePtr& space, const RingPtr& ring) {
  return SheafSpace(constant_presheaf(space, Carrier::of(ring))).sections();
}

Presheaf two_algebra_presheaf(const SpacePtr& space, Point x0, const RingMorphism& rho) {
  if (x0 < 0 || x0 >= space->size()) throw Error(ErrorKind::UnknownPoint, "x0 is not a point of the space");
  const RingPtr& a0 = rho.domain();
  const RingPtr& a1 = rho.codomain();
  std::vector<Carrier> carriers;
  for (OpenSet u : space->opens()) carriers.push_back(Carrier::of(u.contains(x0) ? a0 : a1));
  return Presheaf(space, std::move(carriers), [&](OpenSet from, OpenSet to) {
    if (to.contains(x0)) return identity_map(a0->size());
    if (from.contains(x0)) return rho.assignment();
    return identity_map(a1->size());
  });
}

Presheaf two_algebra_presheaf(const SpacePtr& space, Point x0, const RingPtr& a0, const RingPtr& a1,
                              const std::vector<Element>& rho) {
  return two_algebra_presheaf(space, x0, RingMorphism(a0, a1, rho));
}

}  // namespace finsheaf
