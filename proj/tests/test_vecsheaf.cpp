#include <doctest.h>

#include "finsheaf/json_io.hpp"

using namespace finsheaf;

namespace {

const std::string kData = FINSHEAF_DATA_DIR;

/// Rank-1 cocycle on the pseudo-circle over the cover {U_c, U_d}, whose
/// overlap {a, b} is discrete: the transition is a pair of germs.
TransitionCocycle circle_cocycle(const AlgebraPtr& a, Element at_a, Element at_b) {
  const FinSpace& s = a->space();
  const OpenSet uc = s.min_open(s.index_of("c"));
  const OpenSet ud = s.min_open(s.index_of("d"));
  const OpenSet overlap = uc & ud;
  const auto glued = a->glue(overlap, {at_a, at_b});
  REQUIRE(glued);
  TransitionCocycle c{a, {uc, ud}, 1, {}};
  c.transitions.emplace(std::make_pair(0, 1), Matrix(a->ring(overlap), 1, 1, {*glued}));
  return c;
}

}  // namespace

TEST_CASE("free sheaf sections") {
  const auto a = AlgebraSheaf::constant(pseudo_circle(), make_field(3));
  const auto e = free_sheaf(a, 2);
  CHECK(e->sections(e->space().whole()).size() == 9);
  CHECK(e->sections(e->space().open_from_names({"a", "b"})).size() == 81);
  CHECK(check_semilinearity(e).empty());
  CHECK(check_naturality(identity_morphism(e)).empty());
  CHECK(is_isomorphism(identity_morphism(e)));
}

TEST_CASE("subsheaf validation") {
  const auto s = sierpinski_space();
  const auto a = AlgebraSheaf::constant(s, make_field(2));
  const auto e = free_sheaf(a, 2);
  const Point o = s->index_of("o"), c = s->index_of("c");

  std::vector<Submodule> stalks(2);
  stalks[static_cast<std::size_t>(c)] = Submodule::span(a->stalk(c), 2, {{1, 0}});
  stalks[static_cast<std::size_t>(o)] = Submodule::span(a->stalk(o), 2, {{0, 1}});
  CHECK_FALSE(validate_subsheaf(VectorSubsheaf(e, s->whole(), stalks)).empty());

  // A constant line.
  stalks[static_cast<std::size_t>(c)] = Submodule::span(a->stalk(c), 2, {{1, 1}});
  stalks[static_cast<std::size_t>(o)] = Submodule::span(a->stalk(o), 2, {{1, 1}});
  const VectorSubsheaf line(e, s->whole(), stalks);
  CHECK(validate_subsheaf(line).empty());
  CHECK(subsheaf_sections(line, s->whole()).size() == 2);
  const FreenessResult fr = is_free_of_rank(line, s->whole(), 1);
  CHECK(fr.free);
  REQUIRE(fr.witness.size() == 1);
  CHECK(is_locally_free(line, s->whole(), 1));
  CHECK_FALSE(is_free_of_rank(line, s->whole(), 2).free);

  // A line at c that specializes into the whole plane at o is not locally free of rank 1.
  stalks[static_cast<std::size_t>(o)] = Submodule::full(a->stalk(o), 2);
  const VectorSubsheaf mixed(e, s->whole(), stalks);
  CHECK(validate_subsheaf(mixed).empty());
  CHECK_FALSE(is_locally_free(mixed, s->whole(), 1));

  CHECK(is_free_of_rank(full_subsheaf(e, s->whole()), s->whole(), 2).free);
  CHECK(is_free_of_rank(zero_subsheaf(e, s->whole()), s->whole(), 0).free);
  CHECK(is_free_of_rank(line, OpenSet(), 1).free);
}

TEST_CASE("Moebius cocycle: locally free, not free") {
  const auto a = AlgebraSheaf::constant(pseudo_circle(), make_field(3));
  const TransitionCocycle mob = circle_cocycle(a, 1, 2);
  CHECK(validate_cocycle(mob).empty());
  const CocycleSheaf m = sheaf_from_cocycle(mob);
  const OpenSet x = a->space().whole();
  const VectorSubsheaf full_m = full_subsheaf(m.sheaf, x);
  CHECK(is_locally_free(full_m, x, 1));
  CHECK_FALSE(is_free_of_rank(full_m, x, 1).free);
  // Nowhere-vanishing global sections are exactly what is missing.
  CHECK(m.sheaf->sections(x).size() == 1);

  const CocycleSheaf t = sheaf_from_cocycle(circle_cocycle(a, 1, 1));
  CHECK(is_free_of_rank(full_subsheaf(t.sheaf, x), x, 1).free);
  CHECK(t.sheaf->sections(x).size() == 3);

  CHECK_FALSE(find_module_isomorphism(m.sheaf, t.sheaf));
  CHECK(find_module_isomorphism(t.sheaf, free_sheaf(a, 1)));
  for (const ModuleMorphism& psi : m.trivializations) {
    CHECK(check_naturality(psi).empty());
    CHECK(is_isomorphism(psi));
  }
  CHECK(check_semilinearity(m.sheaf).empty());
}

TEST_CASE("cohomologous cocycles give isomorphic sheaves") {
  const auto a = AlgebraSheaf::constant(pseudo_circle(), make_field(3));
  // g' = h_0 g h_1^{-1} with h_0 = 2, h_1 = 1.
  const auto m1 = sheaf_from_cocycle(circle_cocycle(a, 1, 2)).sheaf;
  const auto m2 = sheaf_from_cocycle(circle_cocycle(a, 2, 1)).sheaf;
  const auto t1 = sheaf_from_cocycle(circle_cocycle(a, 1, 1)).sheaf;
  const auto t2 = sheaf_from_cocycle(circle_cocycle(a, 2, 2)).sheaf;
  const auto iso = find_module_isomorphism(m1, m2);
  REQUIRE(iso);
  CHECK(check_naturality(*iso).empty());
  CHECK(is_isomorphism(*iso));
  CHECK(find_module_isomorphism(t1, t2));
  CHECK_FALSE(find_module_isomorphism(m2, t2));
}

TEST_CASE("cocycle validation") {
  const auto a = AlgebraSheaf::constant(pseudo_circle(), make_field(3));
  TransitionCocycle c = circle_cocycle(a, 1, 0);
  CHECK_FALSE(validate_cocycle(c).empty());
  CHECK_THROWS_WITH_AS(sheaf_from_cocycle(c), doctest::Contains("CocycleConditionViolated"), Error);

  TransitionCocycle j = parse_cocycle(read_json_file(kData + "/mobius_f3.json"), a);
  CHECK(validate_cocycle(j).empty());
  CHECK(find_module_isomorphism(sheaf_from_cocycle(j).sheaf, sheaf_from_cocycle(circle_cocycle(a, 1, 2)).sheaf));
}

TEST_CASE("weight families") {
  const auto pc = pseudo_circle();
  const auto a = AlgebraSheaf::constant(pc, make_field(3));
  const TransitionCocycle mob = circle_cocycle(a, 1, 2);
  const WeightSearch none = search_weight_families(a, mob.cover);
  CHECK(none.candidates == 9);
  CHECK(none.valid.empty());
  const WeightFamily ones{a, mob.cover, {1, 1}};
  CHECK_FALSE(validate_weights(ones).empty());
  const CocycleSheaf m = sheaf_from_cocycle(mob);
  CHECK_THROWS_WITH_AS(embed_via_weights(m.sheaf, m.cover, m.trivializations, ones), doctest::Contains("InvalidWeights"),
                       Error);

  // Trivial cover {X}: alpha = 1 works.
  const WeightSearch whole = search_weight_families(a, {pc->whole()});
  CHECK(whole.valid.size() == 2);
}

TEST_CASE("embedding through indicator weights on a discrete space") {
  const auto d2 = discrete_space({"x", "y"});
  const auto a = AlgebraSheaf::constant(d2, make_field(2));
  const TransitionCocycle c = parse_cocycle(read_json_file(kData + "/discrete2_line.json"), a);
  const CocycleSheaf e = sheaf_from_cocycle(c);
  const WeightFamily w = parse_weights(read_json_file(kData + "/discrete2_indicators.json"), a, c.cover);
  CHECK(validate_weights(w).empty());
  const WeightSearch found = search_weight_families(a, c.cover);
  REQUIRE(found.valid.size() == 1);
  CHECK(found.valid.front().weights == w.weights);

  const ModuleMorphism phi = embed_via_weights(e.sheaf, c.cover, e.trivializations, w);
  CHECK(phi.target()->rank(0) == 2);
  CHECK(check_naturality(phi).empty());
  CHECK(is_monomorphism(phi));
  CHECK_FALSE(is_isomorphism(phi));
  const VectorSubsheaf img = image_subsheaf(phi);
  CHECK(validate_subsheaf(img).empty());
  CHECK(is_locally_free(img, d2->whole(), 1));
}

TEST_CASE("module sheaf functor check") {
  const auto s = sierpinski_space();
  const auto a = AlgebraSheaf::constant(s, make_field(2));
  // Rank change without a matrix is rejected.
  CHECK_THROWS_AS(ModuleSheaf::make(a, {1, 2}, {}), Error);
  const Point o = s->index_of("o"), c = s->index_of("c");
  std::vector<int> ranks(2);
  ranks[static_cast<std::size_t>(o)] = 1;
  ranks[static_cast<std::size_t>(c)] = 2;
  std::map<std::pair<Point, Point>, Matrix> maps;
  maps.emplace(std::make_pair(c, o), Matrix::from_rows(a->stalk(o), {{1, 1}}));
  const auto e = ModuleSheaf::make(a, ranks, maps);
  CHECK(e->restrict_germ(c, o, {1, 0}) == Vec{1});
  CHECK(e->restrict_germ(c, o, {1, 1}) == Vec{0});
  CHECK(e->sections(s->whole()).size() == 4);
  CHECK(check_semilinearity(e).empty());
}
