#include <doctest.h>

#include "finsheaf/json_io.hpp"
#include "oracles.hpp"

using namespace finsheaf;

namespace {

const std::string kData = FINSHEAF_DATA_DIR;

Presheaf demo_presheaf() {
  const auto s = sierpinski_space();
  return two_algebra_presheaf(s, s->index_of("c"), make_quotient(2, {0, 0, 1}), make_field(2), {0, 1, 0, 1});
}

}  // namespace

TEST_CASE("constant presheaf is valid and a corrupted restriction is caught") {
  const auto s = sierpinski_space();
  const Presheaf p = constant_presheaf(s, Carrier::of(make_field(3)));
  CHECK(validate(p).empty());
  CHECK(p.uniform_kind() == CarrierKind::Ring);

  // Identity on X replaced by a non-identity map.
  const Presheaf bad(s, p.carriers(), [&](OpenSet from, OpenSet to) {
    ElementMap m = p.restriction(from, to);
    if (from == s->whole() && to == s->whole()) std::swap(m[1], m[2]);
    return m;
  });
  CHECK_FALSE(validate(bad).empty());
}

TEST_CASE("two-algebra presheaf stalks") {
  const Presheaf p = demo_presheaf();
  CHECK(validate(p).empty());
  const FinSpace& s = p.space();
  CHECK(stalk(p, s.index_of("c")).carrier().size == 4);
  CHECK(stalk(p, s.index_of("o")).carrier().size == 2);
  // Germ of t at o is rho(t) = 0.
  CHECK(stalk(p, s.index_of("o")).germ(s.whole(), 2) == 0);
  CHECK(stalk(p, s.index_of("o")).germ(s.whole(), 3) == 1);
  CHECK_THROWS_AS(two_algebra_presheaf(sierpinski_space(), 1, make_quotient(2, {0, 0, 1}), make_field(2), {0, 0, 0, 0}),
                  Error);
}

TEST_CASE("monopresheaf check matches separation over every cover") {
  const auto d2 = discrete_space({"x", "y"});
  const Presheaf non_sep = parse_presheaf(read_json_file(kData + "/non_separated.json"), d2);
  CHECK(validate(non_sep).empty());
  CHECK_FALSE(is_monopresheaf(non_sep));
  CHECK_FALSE(oracle::separated_on_all_covers(non_sep));

  const Presheaf const_f3 = constant_presheaf(d2, Carrier::of(make_field(3)));
  CHECK(is_monopresheaf(const_f3));
  CHECK(oracle::separated_on_all_covers(const_f3));

  for (const auto& sp : {sierpinski_space(), pseudo_circle(), chain_space(3), d2}) {
    const Presheaf p = constant_sheaf(sp, make_field(2));
    CHECK(is_monopresheaf(p) == oracle::separated_on_all_covers(p));
    CHECK(is_monopresheaf(p));
  }
  CHECK(is_monopresheaf(demo_presheaf()) == oracle::separated_on_all_covers(demo_presheaf()));
}

TEST_CASE("constant presheaf on a disconnected space is not complete") {
  const auto d2 = discrete_space({"x", "y"});
  const Presheaf p = constant_presheaf(d2, Carrier::of(make_field(3)));
  const SheafSpace sh = sheafify(p);
  CHECK(sh.families(d2->whole()).size() == 9);
  CHECK_FALSE(sh.unit_bijective(d2->whole()));
  CHECK(sh.unit_injective(d2->whole()));
  CHECK_FALSE(is_complete(p));
  // The constant sheaf is the sheafification: locally constant functions.
  const Presheaf cs = constant_sheaf(d2, make_field(3));
  CHECK(cs.carrier(d2->whole()).size == 9);
  CHECK(is_complete(cs));
}

TEST_CASE("sheafification of the two-algebra presheaf") {
  const Presheaf p = demo_presheaf();
  const FinSpace& s = p.space();
  const SheafSpace sh = sheafify(p);
  // X = U_c, so sections over X are germs at c.
  CHECK(sh.families(s.whole()).size() == 4);
  CHECK(sh.families(OpenSet()).size() == 1);
  for (OpenSet u : s.opens()) {
    if (!u.empty()) CHECK(sh.unit_bijective(u));
  }
  CHECK(is_complete(p));
  CHECK(check_naturality(unit_morphism(sh)).empty());
  REQUIRE(sh.sections().carrier(s.whole()).ring);
  CHECK(find_ring_isomorphism(sh.sections().carrier(s.whole()).ring, make_quotient(2, {0, 0, 1})));

  // Idempotent: the sections presheaf is its own sheafification.
  const SheafSpace again = sheafify(sh.sections());
  for (OpenSet u : s.opens()) {
    CHECK(again.unit_bijective(u));
    CHECK(again.families(u).size() == sh.families(u).size());
  }
}

TEST_CASE("stalk of the sheafification equals the stalk of the presheaf") {
  for (const auto& sp : {pseudo_circle(), chain_space(3)}) {
    const Presheaf p = constant_presheaf(sp, Carrier::of(make_field(2)));
    const SheafSpace sh = sheafify(p);
    for (Point x = 0; x < sp->size(); ++x) {
      const OpenSet ux = sp->min_open(x);
      CHECK(sh.sections().carrier(ux).size == p.carrier(ux).size);
      // Germ of unit(s) at x equals unit of the germ of s.
      for (OpenSet u : sp->opens()) {
        if (!u.contains(x)) continue;
        for (Element a = 0; a < p.carrier(u).size; ++a) {
          const Element via_unit = sh.sections().restrict(u, ux, sh.unit(u)[static_cast<std::size_t>(a)]);
          CHECK(via_unit == sh.unit(ux)[static_cast<std::size_t>(p.restrict(u, ux, a))]);
        }
      }
    }
  }
}

TEST_CASE("pullbacks along constant maps") {
  const Presheaf p = demo_presheaf();
  const auto s = p.space_ptr();
  const auto pt = point_space();
  const Presheaf at_c = pullback(p, ContinuousMap::constant(pt, s, s->index_of("c")));
  const Presheaf at_o = pullback(p, ContinuousMap::constant(pt, s, s->index_of("o")));
  CHECK(at_c.carrier(pt->whole()).size == 4);
  CHECK(at_o.carrier(pt->whole()).size == 2);
  CHECK_FALSE(find_ring_isomorphism(at_c.carrier(pt->whole()).ring, at_o.carrier(pt->whole()).ring));

  // Pulling back along the identity changes nothing up to size.
  const Presheaf id = pullback(p, ContinuousMap::identity(s));
  for (OpenSet u : s->opens()) {
    if (!u.empty()) CHECK(id.carrier(u).size == p.carrier(u).size);
  }
}

TEST_CASE("compatible families respect the budget") {
  const auto d = discrete_space({"a", "b", "c", "d", "e", "f"});
  const StalkSystem st = StalkSystem::of(constant_presheaf(d, Carrier::of(make_field(3))));
  SearchBudget tiny(10);
  CHECK_THROWS_WITH_AS(compatible_families(st, d->whole(), tiny), doctest::Contains("SearchBudgetExceeded"), Error);
  SearchBudget ample(1'000'000);
  CHECK(compatible_families(st, d->whole(), ample).size() == 729);
}
