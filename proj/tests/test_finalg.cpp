#include <doctest.h>

#include "finsheaf/finalg.hpp"
#include "oracles.hpp"

using namespace finsheaf;

TEST_CASE("ring constructors") {
  const auto f2 = make_field(2);
  CHECK(f2->size() == 2);
  CHECK(f2->is_field());

  const auto dual = make_quotient(2, {0, 0, 1});
  CHECK(dual->size() == 4);
  const Element t = 2;  // code of c0 + c1 t is c0 + 2 c1
  CHECK(dual->mul(t, t) == 0);
  CHECK(dual->is_nilpotent(t));
  CHECK_FALSE(dual->is_unit(t));
  CHECK_FALSE(dual->is_field());

  const auto f4 = make_quotient(2, {1, 1, 1});
  CHECK(f4->is_field());

  const auto f2f2 = make_product(f2, f2);
  CHECK(f2f2->size() == 4);
  for (Element a = 1; a < 4; ++a) CHECK_FALSE(f2f2->is_nilpotent(a));

  const auto z6 = make_mod_ring(6);
  CHECK_FALSE(z6->is_unit(2));
  CHECK(z6->is_unit(5));
  CHECK(make_zero_ring()->is_trivial());
  for (const auto& r : {f2, dual, f4, f2f2, z6}) {
    CHECK(r->is_unit(r->one()));
    CHECK(FinRing::check_axioms(r->size(), r->add_table(), r->mul_table(), r->zero(), r->one()).empty());
  }
}

TEST_CASE("constructor errors") {
  CHECK_THROWS_WITH_AS(make_field(4), doctest::Contains("NotPrime"), Error);
  CHECK_THROWS_WITH_AS(make_quotient(4, {0, 1}), doctest::Contains("NotPrime"), Error);
  CHECK_THROWS_WITH_AS(make_quotient(2, {1}), doctest::Contains("InvalidPolynomial"), Error);
  CHECK_THROWS_WITH_AS(make_quotient(2, {0, 0, 3}), doctest::Contains("InvalidPolynomial"), Error);
  CHECK_THROWS_WITH_AS(make_mod_ring(1), doctest::Contains("InvalidArgument"), Error);
  // Non-associative multiplication on two elements.
  CHECK_THROWS_WITH_AS(FinRing::from_tables("bad", 2, {0, 1, 1, 0}, {0, 0, 0, 0}, 0, 1), doctest::Contains("RingAxiomViolated"),
                       Error);
}

TEST_CASE("ring morphisms and isomorphism search") {
  const auto f2 = make_field(2);
  const auto dual = make_quotient(2, {0, 0, 1});
  const auto f2f2 = make_product(f2, f2);
  CHECK_NOTHROW(RingMorphism(dual, f2, {0, 1, 0, 1}));
  CHECK_THROWS_AS(RingMorphism(dual, f2, {0, 0, 0, 0}), Error);

  const auto id = find_ring_isomorphism(f2, f2);
  REQUIRE(id);
  CHECK(id->assignment() == std::vector<Element>{0, 1});
  CHECK_FALSE(find_ring_isomorphism(dual, f2));
  CHECK_FALSE(find_ring_isomorphism(dual, f2f2));
  CHECK_FALSE(find_ring_isomorphism(dual, make_mod_ring(4)));
  CHECK(find_ring_isomorphism(make_mod_ring(6), make_product(f2, make_field(3))));
  CHECK(find_ring_isomorphism(make_quotient(2, {1, 1, 1}), make_quotient(2, {1, 1, 1})));
}

TEST_CASE("determinants match the permutation-sum formula") {
  const auto dual = make_quotient(2, {0, 0, 1});
  const auto f2 = make_field(2);
  CHECK(det(Matrix::identity(f2, 3)) == 1);
  const Matrix u = Matrix::from_rows(f2, {{1, 1}, {0, 1}});
  CHECK(det(u) == 1);
  CHECK(is_invertible(u));
  const Matrix tm = Matrix::from_rows(dual, {{2, 0}, {0, 1}});
  CHECK(det(tm) == 2);
  CHECK_FALSE(is_invertible(tm));
  CHECK_THROWS_WITH_AS(det(Matrix(f2, 2, 3)), doctest::Contains("NonSquare"), Error);

  SearchBudget budget(1'000'000);
  for (const auto& r : {make_field(3), make_mod_ring(4), dual}) {
    for (const Matrix& m : all_matrices(r, 2, 2, budget)) CHECK(det(m) == oracle::permutation_det(m));
  }
  for (const Matrix& m : all_matrices(f2, 3, 3, budget)) CHECK(det(m) == oracle::permutation_det(m));
}

TEST_CASE("adjugate inverse agrees with exhaustive search") {
  SearchBudget budget(1'000'000);
  for (const auto& r : {make_field(2), make_field(3), make_mod_ring(4), make_quotient(2, {0, 0, 1})}) {
    for (const Matrix& m : all_matrices(r, 2, 2, budget)) {
      const auto inv = inverse(m);
      const auto brute = oracle::brute_force_inverse(m);
      REQUIRE(inv.has_value() == brute.has_value());
      if (inv) CHECK(*inv == *brute);
      CHECK(is_invertible(m) == inv.has_value());
    }
  }
}

TEST_CASE("vector coding is lexicographic") {
  const VecCodec c(3, 2);
  CHECK(c.count() == 9);
  CHECK(c.encode({1, 2}) == 5);
  CHECK(c.decode(7) == Vec{2, 1});
  for (std::uint64_t i = 0; i < c.count(); ++i) CHECK(c.encode(c.decode(i)) == i);
}

TEST_CASE("submodules") {
  const auto f2 = make_field(2);
  const auto s = Submodule::span(f2, 2, {{1, 1}});
  CHECK(s.size() == 2);
  CHECK(s.contains(Vec{1, 1}));
  CHECK_FALSE(s.contains(Vec{1, 0}));
  CHECK(s.dimension() == 1);
  CHECK(s.padded(1).size() == 2);
  CHECK(s.padded(1).contains(Vec{1, 1, 0}));
  CHECK(s.subset_of(Submodule::full(f2, 2)));
  CHECK(Submodule::zero(f2, 2).size() == 1);
  CHECK_THROWS_AS(Submodule::from_codes(f2, 2, {0, 1, 2}), Error);

  // Over Z/4 the span of 2 is a submodule that is not free.
  const auto z4 = make_mod_ring(4);
  CHECK(Submodule::span(z4, 1, {{2}}).size() == 2);
  CHECK_THROWS_WITH_AS(enumerate_free_submodules(z4, 2, 1), doctest::Contains("NotAField"), Error);
}

TEST_CASE("subspace counts: library, Gaussian binomial and brute force agree") {
  CHECK(enumerate_free_submodules(make_field(2), 2, 1).size() == 3);
  CHECK(enumerate_free_submodules(make_field(2), 4, 2).size() == 35);
  CHECK(enumerate_free_submodules(make_field(3), 3, 1).size() == 13);
  for (int q : {2, 3}) {
    for (int n = 0; n <= 4; ++n) {
      for (int k = 0; k <= n; ++k) {
        const auto subs = enumerate_free_submodules(make_field(q), n, k);
        CHECK(subs.size() == oracle::gaussian_binomial(q, n, k));
        CHECK(std::is_sorted(subs.begin(), subs.end()));
        if (q == 2 || n <= 3) CHECK(subs.size() == oracle::brute_force_subspace_count(q, n, k));
      }
    }
  }
  // Also works for the non-prime field F_4.
  CHECK(enumerate_free_submodules(make_quotient(2, {1, 1, 1}), 2, 1).size() == 5);
}

TEST_CASE("free modules") {
  const auto m = FinModule::free(make_field(3), 2);
  CHECK(m->size() == 9);
  CHECK(m->add(1, 3) == 4);
  CHECK(m->act(2, 4) == 8);
}
