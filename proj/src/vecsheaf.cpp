#include "finsheaf/vecsheaf.hpp"

#include <algorithm>
#include <numeric>
#include <set>

namespace finsheaf {

namespace {

std::string describe(const FinSpace& s, OpenSet u) { return "{" + s.key(u) + "}"; }

Section project(const Section& s, OpenSet from, OpenSet to) {
  Section out;
  std::size_t i = 0;
  for (Point x : from.points()) {
    if (to.contains(x)) out.push_back(s[i]);
    ++i;
  }
  return out;
}

std::vector<Element> all_codes(std::uint64_t count) {
  if (count > (std::uint64_t{1} << 24)) throw Error(ErrorKind::SpaceTooLarge, "stalk too large to enumerate");
  std::vector<Element> codes(static_cast<std::size_t>(count));
  std::iota(codes.begin(), codes.end(), 0);
  return codes;
}

bool is_identity(const Matrix& m) { return m == Matrix::identity(m.ring(), m.rows()); }

}  // namespace

// ---------------------------------------------------------------------------

AlgebraSheaf::AlgebraSheaf(Presheaf p) : p_(std::move(p)) {
  for (const Carrier& c : p_.carriers()) {
    if (c.kind != CarrierKind::Ring) throw Error(ErrorKind::InvalidPresheaf, "structure sheaf must be ring-valued");
  }
  if (auto report = validate(p_); !report.empty()) throw Error(ErrorKind::InvalidPresheaf, report.front());
  if (!is_complete(p_)) throw Error(ErrorKind::InvalidPresheaf, "structure sheaf must be complete");
  const FinSpace& s = space();
  for (Point x = 0; x < s.size(); ++x) {
    for (Point y : s.min_open(x).points()) {
      rho_.emplace(std::pair{x, y}, RingMorphism(stalk(x), stalk(y), p_.restriction(s.min_open(x), s.min_open(y))));
    }
  }
  for (OpenSet u : s.opens()) {
    std::map<Section, Element> table;
    for (Element a = 0; a < ring(u)->size(); ++a) table.emplace(germs(u, a), a);
    glue_.push_back(std::move(table));
  }
}

std::shared_ptr<const AlgebraSheaf> AlgebraSheaf::constant(const SpacePtr& space, const RingPtr& ring) {
  return std::make_shared<const AlgebraSheaf>(constant_sheaf(space, ring));
}

const RingMorphism& AlgebraSheaf::specialization(Point x, Point y) const {
  auto it = rho_.find({x, y});
  if (it == rho_.end()) throw Error(ErrorKind::InvalidArgument, space().name(y) + " does not specialize " + space().name(x));
  return it->second;
}

Section AlgebraSheaf::germs(OpenSet u, Element a) const {
  Section g;
  for (Point x : u.points()) g.push_back(germ(u, a, x));
  return g;
}

std::optional<Element> AlgebraSheaf::glue(OpenSet u, const Section& germs) const {
  const auto& table = glue_[static_cast<std::size_t>(space().open_index(u))];
  auto it = table.find(germs);
  return it == table.end() ? std::nullopt : std::optional<Element>(it->second);
}

bool AlgebraSheaf::has_field_stalks() const {
  for (Point x = 0; x < space().size(); ++x) {
    if (!stalk(x)->is_field()) return false;
  }
  return true;
}

Matrix germ_matrix(const AlgebraSheaf& a, OpenSet u, const Matrix& m, Point x) {
  if (m.ring() != a.ring(u)) throw Error(ErrorKind::InvalidArgument, "matrix is not over A" + describe(a.space(), u));
  std::vector<Element> e;
  for (Element v : m.entries()) e.push_back(a.germ(u, v, x));
  return Matrix(a.stalk(x), m.rows(), m.cols(), std::move(e));
}

// ---------------------------------------------------------------------------

SectionModule::SectionModule(ModuleSheafPtr sheaf, OpenSet u, std::vector<Section> elements)
    : sheaf_(std::move(sheaf)), u_(u), elements_(std::move(elements)) {
  std::sort(elements_.begin(), elements_.end());
}

std::optional<std::size_t> SectionModule::index_of(const Section& s) const {
  auto it = std::lower_bound(elements_.begin(), elements_.end(), s);
  if (it == elements_.end() || *it != s) return std::nullopt;
  return static_cast<std::size_t>(it - elements_.begin());
}

Section SectionModule::zero() const {
  Section out;
  for (Point x : u_.points()) {
    const RingPtr& r = sheaf_->base().stalk(x);
    out.push_back(static_cast<Element>(sheaf_->codec(x).encode(Vec(static_cast<std::size_t>(sheaf_->rank(x)), r->zero()))));
  }
  return out;
}

Section SectionModule::add(const Section& a, const Section& b) const {
  Section out;
  std::size_t i = 0;
  for (Point x : u_.points()) {
    const auto codec = sheaf_->codec(x);
    out.push_back(static_cast<Element>(codec.encode(vec_add(*sheaf_->base().stalk(x), codec.decode(static_cast<std::uint64_t>(a[i])),
                                                            codec.decode(static_cast<std::uint64_t>(b[i]))))));
    ++i;
  }
  return out;
}

Section SectionModule::act(Element a, const Section& s) const {
  Section out;
  std::size_t i = 0;
  for (Point x : u_.points()) {
    const auto codec = sheaf_->codec(x);
    const Element g = sheaf_->base().germ(u_, a, x);
    out.push_back(static_cast<Element>(codec.encode(vec_scale(*sheaf_->base().stalk(x), g, codec.decode(static_cast<std::uint64_t>(s[i]))))));
    ++i;
  }
  return out;
}

// ---------------------------------------------------------------------------

ModuleSheafPtr ModuleSheaf::make(AlgebraPtr base, std::vector<int> ranks,
                                 std::map<std::pair<Point, Point>, Matrix> maps) {
  const FinSpace& s = base->space();
  if (ranks.size() != static_cast<std::size_t>(s.size())) throw Error(ErrorKind::InvalidArgument, "need one rank per point");
  for (int r : ranks) {
    if (r < 0) throw Error(ErrorKind::InvalidArgument, "ranks must be nonnegative");
  }
  auto e = std::shared_ptr<ModuleSheaf>(new ModuleSheaf());
  e->base_ = base;
  e->ranks_ = ranks;
  for (Point x = 0; x < s.size(); ++x) {
    for (Point y : s.min_open(x).points()) {
      const int rx = ranks[static_cast<std::size_t>(x)], ry = ranks[static_cast<std::size_t>(y)];
      auto it = maps.find({x, y});
      if (x == y || it == maps.end()) {
        if (rx != ry) {
          throw Error(ErrorKind::InvalidArgument, "missing specialization matrix " + s.name(x) + " -> " + s.name(y));
        }
        e->maps_.emplace(std::pair{x, y}, Matrix::identity(base->stalk(y), ry));
        continue;
      }
      const Matrix& m = it->second;
      if (m.ring() != base->stalk(y) || m.rows() != ry || m.cols() != rx) {
        throw Error(ErrorKind::InvalidArgument, "specialization matrix " + s.name(x) + " -> " + s.name(y) + " has the wrong shape or ring");
      }
      e->maps_.emplace(std::pair{x, y}, m);
    }
  }
  // r_yz o r_xy = r_xz  <=>  M_yz rho_yz(M_xy) = M_xz
  for (Point x = 0; x < s.size(); ++x) {
    for (Point y : s.min_open(x).points()) {
      for (Point z : s.min_open(y).points()) {
        const Matrix lhs = e->transition(y, z) * e->transition(x, y).mapped(base->specialization(y, z));
        if (!(lhs == e->transition(x, z))) {
          throw Error(ErrorKind::InvalidArgument, "specialization matrices do not compose along " + s.name(x) + " -> " +
                                                      s.name(y) + " -> " + s.name(z));
        }
      }
    }
  }
  return e;
}

const Matrix& ModuleSheaf::transition(Point x, Point y) const {
  auto it = maps_.find({x, y});
  if (it == maps_.end()) throw Error(ErrorKind::InvalidArgument, "no specialization " + space().name(x) + " -> " + space().name(y));
  return it->second;
}

Vec ModuleSheaf::restrict_germ(Point x, Point y, const Vec& v) const {
  return transition(x, y).apply(vec_map(base_->specialization(x, y), v));
}

Element ModuleSheaf::restrict_code(Point x, Point y, Element code) const {
  if (x == y) return code;
  return static_cast<Element>(codec(y).encode(restrict_germ(x, y, codec(x).decode(static_cast<std::uint64_t>(code)))));
}

StalkSystem ModuleSheaf::stalk_system() const {
  const FinSpace& s = space();
  std::vector<Carrier> stalks;
  std::map<std::pair<Point, Point>, ElementMap> maps;
  for (Point x = 0; x < s.size(); ++x) {
    const auto codes = all_codes(codec(x).count());
    stalks.push_back(Carrier::set(static_cast<int>(codes.size())));
    for (Point y : s.min_open(x).points()) {
      ElementMap m;
      for (Element c : codes) m.push_back(restrict_code(x, y, c));
      maps.emplace(std::pair{x, y}, std::move(m));
    }
  }
  return StalkSystem(base_->space_ptr(), std::move(stalks), std::move(maps));
}

SectionModule ModuleSheaf::sections(OpenSet u, SearchBudget& budget) const {
  const FinSpace& s = space();
  std::vector<std::vector<Element>> candidates(static_cast<std::size_t>(s.size()));
  for (Point x : u.points()) candidates[static_cast<std::size_t>(x)] = all_codes(codec(x).count());
  auto fams = compatible_families(s, u, candidates,
                                  [this](Point x, Point y, Element g) { return restrict_code(x, y, g); }, budget);
  return SectionModule(shared_from_this(), u, std::move(fams));
}

Presheaf ModuleSheaf::as_presheaf(std::size_t budget) const {
  SearchBudget b(budget);
  std::vector<SectionModule> mods;
  std::vector<Carrier> carriers;
  for (OpenSet u : space().opens()) {
    mods.push_back(sections(u, b));
    carriers.push_back(Carrier::set(static_cast<int>(mods.back().size())));
  }
  return Presheaf(base_->space_ptr(), std::move(carriers), [&](OpenSet from, OpenSet to) {
    const auto& src = mods[static_cast<std::size_t>(space().open_index(from))];
    const auto& dst = mods[static_cast<std::size_t>(space().open_index(to))];
    ElementMap m;
    for (const auto& sec : src.elements()) m.push_back(static_cast<Element>(dst.index_of(project(sec, from, to)).value()));
    return m;
  });
}

ModuleSheafPtr free_sheaf(const AlgebraPtr& a, int n) {
  if (n < 0) throw Error(ErrorKind::InvalidArgument, "rank must be nonnegative");
  return ModuleSheaf::make(a, std::vector<int>(static_cast<std::size_t>(a->space().size()), n), {});
}

std::vector<std::string> check_semilinearity(const ModuleSheafPtr& e, std::size_t budget) {
  std::vector<std::string> report;
  const FinSpace& s = e->space();
  SearchBudget b(budget);
  std::vector<SectionModule> mods;
  for (OpenSet u : s.opens()) mods.push_back(e->sections(u, b));
  for (OpenSet u : s.opens()) {
    const auto& mu = mods[static_cast<std::size_t>(s.open_index(u))];
    for (OpenSet v : s.opens()) {
      if (!v.subset_of(u) || v == u) continue;
      const auto& mv = mods[static_cast<std::size_t>(s.open_index(v))];
      bool ok = true;
      for (const auto& x : mu.elements()) {
        b.charge(mu.size() + static_cast<std::size_t>(e->base().ring(u)->size()));
        for (const auto& y : mu.elements()) {
          ok = ok && project(mu.add(x, y), u, v) == mv.add(project(x, u, v), project(y, u, v));
        }
        for (Element a = 0; a < e->base().ring(u)->size(); ++a) {
          ok = ok && project(mu.act(a, x), u, v) == mv.act(e->base().restrict(u, v, a), project(x, u, v));
        }
        if (!ok) break;
      }
      if (!ok) report.push_back("restriction " + describe(s, u) + " -> " + describe(s, v) + " is not semi-linear");
    }
  }
  return report;
}

// ---------------------------------------------------------------------------

ModuleMorphism::ModuleMorphism(ModuleSheafPtr source, ModuleSheafPtr target, OpenSet domain,
                               std::map<Point, Matrix> components)
    : source_(std::move(source)), target_(std::move(target)), domain_(domain), components_(std::move(components)) {
  if (source_->base_ptr() != target_->base_ptr()) throw Error(ErrorKind::InvalidArgument, "morphism across different structure sheaves");
  const AlgebraSheaf& a = source_->base();
  if (!a.space().is_open(domain.bits())) throw Error(ErrorKind::InvalidArgument, "morphism domain is not open");
  for (Point x : domain.points()) {
    auto it = components_.find(x);
    if (it == components_.end()) throw Error(ErrorKind::InvalidArgument, "missing component at " + a.space().name(x));
    const Matrix& m = it->second;
    if (m.ring() != a.stalk(x) || m.rows() != target_->rank(x) || m.cols() != source_->rank(x)) {
      throw Error(ErrorKind::InvalidArgument, "component at " + a.space().name(x) + " has the wrong shape or ring");
    }
  }
  for (auto it = components_.begin(); it != components_.end();) {
    it = domain.contains(it->first) ? std::next(it) : components_.erase(it);
  }
}

const Matrix& ModuleMorphism::component(Point x) const {
  auto it = components_.find(x);
  if (it == components_.end()) throw Error(ErrorKind::InvalidArgument, "point outside the morphism domain");
  return it->second;
}

Section ModuleMorphism::apply(OpenSet u, const Section& s) const {
  if (!u.subset_of(domain_)) throw Error(ErrorKind::InvalidArgument, "open set outside the morphism domain");
  Section out;
  std::size_t i = 0;
  for (Point x : u.points()) {
    const Vec v = source_->codec(x).decode(static_cast<std::uint64_t>(s[i++]));
    out.push_back(static_cast<Element>(target_->codec(x).encode(component(x).apply(v))));
  }
  return out;
}

ModuleMorphism identity_morphism(const ModuleSheafPtr& e) {
  std::map<Point, Matrix> comps;
  for (Point x = 0; x < e->space().size(); ++x) comps.emplace(x, Matrix::identity(e->base().stalk(x), e->rank(x)));
  return ModuleMorphism(e, e, e->space().whole(), std::move(comps));
}

std::vector<std::string> check_naturality(const ModuleMorphism& m) {
  std::vector<std::string> report;
  const AlgebraSheaf& a = m.source()->base();
  const FinSpace& s = a.space();
  for (Point x : m.domain().points()) {
    for (Point y : s.min_open(x).points()) {
      if (y == x) continue;
      const Matrix lhs = m.target()->transition(x, y) * m.component(x).mapped(a.specialization(x, y));
      const Matrix rhs = m.component(y) * m.source()->transition(x, y);
      if (!(lhs == rhs)) report.push_back("component square " + s.name(x) + " -> " + s.name(y) + " does not commute");
    }
  }
  return report;
}

namespace {

bool stalk_injective(const ModuleMorphism& m, Point x) {
  const auto src = m.source()->codec(x);
  const auto tgt = m.target()->codec(x);
  if (src.count() > (std::uint64_t{1} << 22)) throw Error(ErrorKind::SpaceTooLarge, "stalk too large to scan");
  std::set<std::uint64_t> seen;
  for (std::uint64_t c = 0; c < src.count(); ++c) {
    if (!seen.insert(tgt.encode(m.component(x).apply(src.decode(c)))).second) return false;
  }
  return true;
}

}  // namespace

bool is_monomorphism(const ModuleMorphism& m) {
  for (Point x : m.domain().points()) {
    if (!stalk_injective(m, x)) return false;
  }
  return true;
}

bool is_isomorphism(const ModuleMorphism& m) {
  for (Point x : m.domain().points()) {
    if (m.source()->codec(x).count() != m.target()->codec(x).count() || !stalk_injective(m, x)) return false;
  }
  return true;
}

std::optional<ModuleMorphism> find_module_isomorphism(const ModuleSheafPtr& e, const ModuleSheafPtr& f,
                                                      std::size_t budget) {
  if (e->base_ptr() != f->base_ptr()) throw Error(ErrorKind::InvalidArgument, "module sheaves over different structure sheaves");
  if (e->ranks() != f->ranks()) return std::nullopt;
  const AlgebraSheaf& a = e->base();
  const FinSpace& s = a.space();
  SearchBudget b(budget);

  std::vector<std::vector<Matrix>> candidates;
  for (Point x = 0; x < s.size(); ++x) {
    std::vector<Matrix> inv;
    for (auto& m : all_matrices(a.stalk(x), e->rank(x), e->rank(x), b)) {
      if (is_invertible(m)) inv.push_back(std::move(m));
    }
    candidates.push_back(std::move(inv));
  }
  auto order = s.whole().points();
  std::stable_sort(order.begin(), order.end(), [&](Point p, Point q) { return s.min_open(p).size() > s.min_open(q).size(); });

  std::vector<const Matrix*> chosen(static_cast<std::size_t>(s.size()), nullptr);
  auto square_ok = [&](Point x, Point y) {
    const Matrix lhs = f->transition(x, y) * chosen[static_cast<std::size_t>(x)]->mapped(a.specialization(x, y));
    return lhs == *chosen[static_cast<std::size_t>(y)] * e->transition(x, y);
  };
  auto recurse = [&](auto&& self, std::size_t depth) -> bool {
    if (depth == order.size()) return true;
    const Point x = order[depth];
    for (const Matrix& m : candidates[static_cast<std::size_t>(x)]) {
      b.charge();
      chosen[static_cast<std::size_t>(x)] = &m;
      bool ok = true;
      for (Point z = 0; z < s.size() && ok; ++z) {
        if (z == x || !chosen[static_cast<std::size_t>(z)]) continue;
        if (s.min_open(x).contains(z)) ok = square_ok(x, z);
        if (ok && s.min_open(z).contains(x)) ok = square_ok(z, x);
      }
      if (ok && self(self, depth + 1)) return true;
      chosen[static_cast<std::size_t>(x)] = nullptr;
    }
    return false;
  };
  if (!recurse(recurse, 0)) return std::nullopt;
  std::map<Point, Matrix> comps;
  for (Point x = 0; x < s.size(); ++x) comps.emplace(x, *chosen[static_cast<std::size_t>(x)]);
  return ModuleMorphism(e, f, s.whole(), std::move(comps));
}

// ---------------------------------------------------------------------------

VectorSubsheaf::VectorSubsheaf(ModuleSheafPtr ambient, OpenSet domain, std::vector<Submodule> stalks)
    : ambient_(std::move(ambient)), domain_(domain), stalks_(std::move(stalks)) {
  const FinSpace& s = ambient_->space();
  if (!s.is_open(domain.bits())) throw Error(ErrorKind::InvalidArgument, "subsheaf domain is not open");
  if (stalks_.size() != static_cast<std::size_t>(s.size())) throw Error(ErrorKind::InvalidArgument, "need one stalk entry per point");
  for (Point x = 0; x < s.size(); ++x) {
    auto& st = stalks_[static_cast<std::size_t>(x)];
    if (!domain.contains(x)) {
      st = Submodule();
      continue;
    }
    if (st.ring() != ambient_->base().stalk(x) || st.rank() != ambient_->rank(x)) {
      throw Error(ErrorKind::InvalidArgument, "stalk at " + s.name(x) + " is not inside the ambient stalk");
    }
  }
}

const Submodule& VectorSubsheaf::stalk(Point x) const {
  if (!domain_.contains(x)) throw Error(ErrorKind::InvalidArgument, "point outside the subsheaf domain");
  return stalks_[static_cast<std::size_t>(x)];
}

VectorSubsheaf VectorSubsheaf::restricted(OpenSet v) const {
  if (!v.subset_of(domain_)) throw Error(ErrorKind::InvalidArgument, "restriction to a larger open set");
  return VectorSubsheaf(ambient_, v, stalks_);
}

VectorSubsheaf VectorSubsheaf::padded(const ModuleSheafPtr& bigger) const {
  if (bigger->base_ptr() != ambient_->base_ptr()) throw Error(ErrorKind::InvalidArgument, "padding into a different base");
  std::vector<Submodule> st = stalks_;
  for (Point x : domain_.points()) {
    const int extra = bigger->rank(x) - ambient_->rank(x);
    if (extra < 0) throw Error(ErrorKind::InvalidArgument, "padding into a smaller module");
    st[static_cast<std::size_t>(x)] = stalks_[static_cast<std::size_t>(x)].padded(extra);
  }
  return VectorSubsheaf(bigger, domain_, std::move(st));
}

VectorSubsheaf full_subsheaf(const ModuleSheafPtr& ambient, OpenSet domain) {
  std::vector<Submodule> st;
  for (Point x = 0; x < ambient->space().size(); ++x) st.push_back(Submodule::full(ambient->base().stalk(x), ambient->rank(x)));
  return VectorSubsheaf(ambient, domain, std::move(st));
}

VectorSubsheaf zero_subsheaf(const ModuleSheafPtr& ambient, OpenSet domain) {
  std::vector<Submodule> st;
  for (Point x = 0; x < ambient->space().size(); ++x) st.push_back(Submodule::zero(ambient->base().stalk(x), ambient->rank(x)));
  return VectorSubsheaf(ambient, domain, std::move(st));
}

std::vector<std::string> validate_subsheaf(const VectorSubsheaf& sub) {
  std::vector<std::string> report;
  const ModuleSheaf& e = *sub.ambient();
  const FinSpace& s = e.space();
  for (Point x : sub.domain().points()) {
    const Submodule& sx = sub.stalk(x);
    if (!Submodule::is_closed(*sx.ring(), sx.rank(), sx.codes())) {
      report.push_back("stalk at " + s.name(x) + " is not a submodule");
      continue;
    }
    const auto cx = e.codec(x);
    for (Point y : s.min_open(x).points()) {
      if (y == x) continue;
      const Submodule& sy = sub.stalk(y);
      for (auto code : sx.codes()) {
        if (!sy.contains(e.restrict_germ(x, y, cx.decode(code)))) {
          report.push_back("restriction " + s.name(x) + " -> " + s.name(y) + " leaves the subsheaf");
          break;
        }
      }
    }
  }
  return report;
}

SectionModule subsheaf_sections(const VectorSubsheaf& sub, OpenSet u, SearchBudget& budget) {
  if (!u.subset_of(sub.domain())) throw Error(ErrorKind::InvalidArgument, "sections outside the subsheaf domain");
  const ModuleSheaf& e = *sub.ambient();
  std::vector<std::vector<Element>> candidates(static_cast<std::size_t>(e.space().size()));
  for (Point x : u.points()) {
    for (auto c : sub.stalk(x).codes()) candidates[static_cast<std::size_t>(x)].push_back(static_cast<Element>(c));
  }
  auto fams = compatible_families(e.space(), u, candidates,
                                  [&e](Point x, Point y, Element g) { return e.restrict_code(x, y, g); }, budget);
  return SectionModule(sub.ambient(), u, std::move(fams));
}

SectionModule subsheaf_sections(const VectorSubsheaf& s, OpenSet u, std::size_t budget) {
  SearchBudget b(budget);
  return subsheaf_sections(s, u, b);
}

FreenessResult is_free_of_rank(const VectorSubsheaf& sub, OpenSet u, int k, SearchBudget& budget) {
  FreenessResult result;
  if (k < 0) return result;
  if (u.empty()) {
    result.free = true;
    result.witness.assign(static_cast<std::size_t>(k), Section{});
    return result;
  }
  const ModuleSheaf& e = *sub.ambient();
  const auto pts = u.points();
  // A basis of k germs makes S_x a copy of A_x^k.
  for (Point x : pts) {
    std::uint64_t expect = 1;
    for (int i = 0; i < k; ++i) expect *= static_cast<std::uint64_t>(e.base().stalk(x)->size());
    if (sub.stalk(x).size() != expect) return result;
  }
  const SectionModule secs = subsheaf_sections(sub, u, budget);
  const Section zero = secs.zero();
  std::vector<std::size_t> usable;
  for (std::size_t i = 0; i < secs.size(); ++i) {
    bool nowhere_zero = true;
    for (std::size_t j = 0; j < pts.size(); ++j) nowhere_zero = nowhere_zero && secs[i][j] != zero[j];
    if (nowhere_zero) usable.push_back(i);
  }

  auto is_basis = [&](const std::vector<std::size_t>& pick) {
    for (std::size_t j = 0; j < pts.size(); ++j) {
      const Point x = pts[j];
      const RingPtr& r = e.base().stalk(x);
      const auto codec = e.codec(x);
      const VecCodec coeffs(r->size(), k);
      std::vector<Vec> gens;
      for (auto i : pick) gens.push_back(codec.decode(static_cast<std::uint64_t>(secs[i][j])));
      std::vector<std::uint64_t> image;
      for (std::uint64_t c = 0; c < coeffs.count(); ++c) {
        const Vec cv = coeffs.decode(c);
        Vec acc(static_cast<std::size_t>(e.rank(x)), r->zero());
        for (int l = 0; l < k; ++l) acc = vec_add(*r, acc, vec_scale(*r, cv[static_cast<std::size_t>(l)], gens[static_cast<std::size_t>(l)]));
        image.push_back(codec.encode(acc));
      }
      std::sort(image.begin(), image.end());
      if (std::adjacent_find(image.begin(), image.end()) != image.end()) return false;
    }
    return true;
  };

  std::vector<std::size_t> pick(static_cast<std::size_t>(k));
  auto recurse = [&](auto&& self, std::size_t depth, std::size_t from) -> bool {
    if (depth == static_cast<std::size_t>(k)) {
      budget.charge();
      ++result.tuples_checked;
      return is_basis(pick);
    }
    for (std::size_t i = from; i < usable.size(); ++i) {
      pick[depth] = usable[i];
      if (self(self, depth + 1, i + 1)) return true;
    }
    return false;
  };
  if (recurse(recurse, 0, 0)) {
    result.free = true;
    for (auto i : pick) result.witness.push_back(secs[i]);
  }
  return result;
}

FreenessResult is_free_of_rank(const VectorSubsheaf& s, OpenSet u, int k, std::size_t budget) {
  SearchBudget b(budget);
  return is_free_of_rank(s, u, k, b);
}

bool is_locally_free(const VectorSubsheaf& s, OpenSet u, int k, SearchBudget& budget) {
  for (Point x : u.points()) {
    if (!is_free_of_rank(s, s.ambient()->space().min_open(x), k, budget).free) return false;
  }
  return true;
}

bool is_locally_free(const VectorSubsheaf& s, OpenSet u, int k, std::size_t budget) {
  SearchBudget b(budget);
  return is_locally_free(s, u, k, b);
}

VectorSubsheaf image_subsheaf(const ModuleMorphism& m) {
  const FinSpace& s = m.source()->space();
  if (m.domain() != s.whole()) throw Error(ErrorKind::InvalidArgument, "image of a partially defined morphism");
  std::vector<Submodule> st;
  for (Point x = 0; x < s.size(); ++x) {
    const Matrix& phi = m.component(x);
    std::vector<Vec> cols;
    for (int j = 0; j < phi.cols(); ++j) {
      Vec c;
      for (int i = 0; i < phi.rows(); ++i) c.push_back(phi.at(i, j));
      cols.push_back(std::move(c));
    }
    st.push_back(Submodule::span(m.source()->base().stalk(x), phi.rows(), cols));
  }
  return VectorSubsheaf(m.target(), s.whole(), std::move(st));
}

// ---------------------------------------------------------------------------

namespace {

std::optional<Matrix> resolve_transition(const TransitionCocycle& c, int i, int j, std::string* why) {
  auto it = c.transitions.find({i, j});
  if (it != c.transitions.end()) return it->second;
  const OpenSet uij = c.cover[static_cast<std::size_t>(i)] & c.cover[static_cast<std::size_t>(j)];
  if (i == j) return Matrix::identity(c.base->ring(uij), c.rank);
  auto jt = c.transitions.find({j, i});
  if (jt != c.transitions.end()) {
    if (auto inv = inverse(jt->second)) return inv;
    *why = "transition " + std::to_string(j) + "," + std::to_string(i) + " is not invertible";
    return std::nullopt;
  }
  *why = "missing transition " + std::to_string(i) + "," + std::to_string(j);
  return std::nullopt;
}

}  // namespace

std::vector<std::string> validate_cocycle(const TransitionCocycle& c) {
  std::vector<std::string> report;
  const AlgebraSheaf& a = *c.base;
  const FinSpace& s = a.space();
  const int m = static_cast<int>(c.cover.size());
  if (c.rank < 0) return {"rank must be nonnegative"};
  OpenSet covered;
  for (OpenSet u : c.cover) {
    if (!s.is_open(u.bits())) return {"cover member " + describe(s, u) + " is not open"};
    covered = covered | u;
  }
  if (covered != s.whole()) return {"cover does not cover the space"};
  for (const auto& [ij, g] : c.transitions) {
    const auto [i, j] = ij;
    if (i < 0 || j < 0 || i >= m || j >= m) return {"transition index out of range"};
    const OpenSet uij = c.cover[static_cast<std::size_t>(i)] & c.cover[static_cast<std::size_t>(j)];
    if (g.ring() != a.ring(uij) || g.rows() != c.rank || g.cols() != c.rank) {
      report.push_back("transition " + std::to_string(i) + "," + std::to_string(j) + " has the wrong shape or ring");
    } else if (!is_invertible(g)) {
      report.push_back("transition " + std::to_string(i) + "," + std::to_string(j) + " is not invertible");
    }
  }
  if (!report.empty()) return report;

  std::map<std::pair<int, int>, Matrix> g;
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      const OpenSet uij = c.cover[static_cast<std::size_t>(i)] & c.cover[static_cast<std::size_t>(j)];
      if (uij.empty()) continue;
      std::string why;
      auto t = resolve_transition(c, i, j, &why);
      if (!t) {
        report.push_back(why);
        continue;
      }
      g.emplace(std::pair{i, j}, *t);
    }
  }
  if (!report.empty()) return report;
  for (int i = 0; i < m; ++i) {
    const OpenSet ui = c.cover[static_cast<std::size_t>(i)];
    for (Point x : ui.points()) {
      if (!is_identity(germ_matrix(a, ui, g.at({i, i}), x))) {
        report.push_back("g_" + std::to_string(i) + std::to_string(i) + " is not the identity");
        break;
      }
    }
    for (int j = 0; j < m; ++j) {
      for (int k = 0; k < m; ++k) {
        const OpenSet uj = c.cover[static_cast<std::size_t>(j)], uk = c.cover[static_cast<std::size_t>(k)];
        for (Point x : (ui & uj & uk).points()) {
          const Matrix gij = germ_matrix(a, ui & uj, g.at({i, j}), x);
          const Matrix gjk = germ_matrix(a, uj & uk, g.at({j, k}), x);
          const Matrix gik = germ_matrix(a, ui & uk, g.at({i, k}), x);
          if (!(gij * gjk == gik)) {
            report.push_back("cocycle condition fails for (" + std::to_string(i) + "," + std::to_string(j) + "," +
                             std::to_string(k) + ") at " + s.name(x));
            break;
          }
        }
      }
    }
  }
  return report;
}

CocycleSheaf sheaf_from_cocycle(const TransitionCocycle& c) {
  if (auto report = validate_cocycle(c); !report.empty()) throw Error(ErrorKind::CocycleConditionViolated, report.front());
  const AlgebraSheaf& a = *c.base;
  const FinSpace& s = a.space();
  const int m = static_cast<int>(c.cover.size());

  auto transition = [&](int i, int j) {
    std::string why;
    return *resolve_transition(c, i, j, &why);
  };
  // Each stalk is written in the coordinates of the first chart containing it.
  std::vector<int> chart(static_cast<std::size_t>(s.size()), -1);
  for (Point x = 0; x < s.size(); ++x) {
    for (int i = 0; i < m && chart[static_cast<std::size_t>(x)] < 0; ++i) {
      if (c.cover[static_cast<std::size_t>(i)].contains(x)) chart[static_cast<std::size_t>(x)] = i;
    }
  }
  auto germ_of = [&](int i, int j, Point x) {
    const OpenSet uij = c.cover[static_cast<std::size_t>(i)] & c.cover[static_cast<std::size_t>(j)];
    return germ_matrix(a, uij, transition(i, j), x);
  };

  std::map<std::pair<Point, Point>, Matrix> maps;
  for (Point x = 0; x < s.size(); ++x) {
    for (Point y : s.min_open(x).points()) {
      if (y == x) continue;
      maps.emplace(std::pair{x, y}, germ_of(chart[static_cast<std::size_t>(y)], chart[static_cast<std::size_t>(x)], y));
    }
  }
  CocycleSheaf out;
  out.cover = c.cover;
  out.sheaf = ModuleSheaf::make(c.base, std::vector<int>(static_cast<std::size_t>(s.size()), c.rank), std::move(maps));
  const auto target = free_sheaf(c.base, c.rank);
  for (int i = 0; i < m; ++i) {
    std::map<Point, Matrix> comps;
    for (Point x : c.cover[static_cast<std::size_t>(i)].points()) comps.emplace(x, germ_of(i, chart[static_cast<std::size_t>(x)], x));
    out.trivializations.emplace_back(out.sheaf, target, c.cover[static_cast<std::size_t>(i)], std::move(comps));
  }
  return out;
}

// ---------------------------------------------------------------------------

std::vector<std::string> validate_weights(const WeightFamily& w) {
  std::vector<std::string> report;
  const AlgebraSheaf& a = *w.base;
  const FinSpace& s = a.space();
  const OpenSet whole = s.whole();
  if (w.weights.size() != w.cover.size()) return {"need one weight per cover member"};
  for (std::size_t i = 0; i < w.cover.size(); ++i) {
    if (w.weights[i] < 0 || w.weights[i] >= a.ring(whole)->size()) return {"weight " + std::to_string(i) + " is not a global section"};
    for (Point x : s.whole().points()) {
      if (w.cover[i].contains(x)) continue;
      if (a.germ(whole, w.weights[i], x) != a.stalk(x)->zero()) {
        report.push_back("weight " + std::to_string(i) + " does not vanish at " + s.name(x) + " outside its cover member");
      }
    }
  }
  for (Point x = 0; x < s.size(); ++x) {
    bool unit = false;
    for (std::size_t i = 0; i < w.cover.size() && !unit; ++i) unit = a.stalk(x)->is_unit(a.germ(whole, w.weights[i], x));
    if (!unit) report.push_back("no weight has a unit germ at " + s.name(x));
  }
  return report;
}

WeightSearch search_weight_families(const AlgebraPtr& a, const std::vector<OpenSet>& cover, std::size_t budget) {
  WeightSearch out;
  SearchBudget b(budget);
  const VecCodec tuples(a->ring(a->space().whole())->size(), static_cast<int>(cover.size()));
  for (std::uint64_t code = 0; code < tuples.count(); ++code) {
    b.charge();
    WeightFamily w{a, cover, tuples.decode(code)};
    ++out.candidates;
    if (validate_weights(w).empty()) out.valid.push_back(std::move(w));
  }
  return out;
}

ModuleMorphism embed_via_weights(const ModuleSheafPtr& e, const std::vector<OpenSet>& cover,
                                 const std::vector<ModuleMorphism>& trivializations, const WeightFamily& w) {
  if (w.base != e->base_ptr() || w.cover != cover) throw Error(ErrorKind::InvalidWeights, "weights are for a different cover or base");
  if (auto report = validate_weights(w); !report.empty()) throw Error(ErrorKind::InvalidWeights, report.front());
  if (trivializations.size() != cover.size()) throw Error(ErrorKind::TrivializationMismatch, "need one trivialization per cover member");
  const AlgebraSheaf& a = e->base();
  const FinSpace& s = a.space();
  const int k = e->rank(0);
  for (std::size_t i = 0; i < cover.size(); ++i) {
    const ModuleMorphism& psi = trivializations[i];
    if (psi.source() != e || psi.domain() != cover[i]) {
      throw Error(ErrorKind::TrivializationMismatch, "trivialization " + std::to_string(i) + " has the wrong source or domain");
    }
    for (Point x = 0; x < s.size(); ++x) {
      if (psi.target()->rank(x) != k) throw Error(ErrorKind::TrivializationMismatch, "trivialization target is not A^k");
      for (Point y : s.min_open(x).points()) {
        if (!is_identity(psi.target()->transition(x, y))) throw Error(ErrorKind::TrivializationMismatch, "trivialization target is not free");
      }
    }
    if (!is_isomorphism(psi) || !check_naturality(psi).empty()) {
      throw Error(ErrorKind::TrivializationMismatch, "trivialization " + std::to_string(i) + " is not an isomorphism onto A^k");
    }
  }
  const int m = static_cast<int>(cover.size());
  const auto target = free_sheaf(e->base_ptr(), k * m);
  const OpenSet whole = s.whole();
  std::map<Point, Matrix> comps;
  for (Point x = 0; x < s.size(); ++x) {
    const RingPtr& r = a.stalk(x);
    Matrix phi(r, k * m, e->rank(x));
    for (int i = 0; i < m; ++i) {
      if (!cover[static_cast<std::size_t>(i)].contains(x)) continue;
      const Matrix block = trivializations[static_cast<std::size_t>(i)].component(x).scaled(a.germ(whole, w.weights[static_cast<std::size_t>(i)], x));
      for (int row = 0; row < k; ++row) {
        for (int col = 0; col < e->rank(x); ++col) phi.set(i * k + row, col, block.at(row, col));
      }
    }
    comps.emplace(x, std::move(phi));
  }
  return ModuleMorphism(e, target, whole, std::move(comps));
}

}  // namespace finsheaf
