#pragma once

// Finite commutative unital rings given by explicit operation tables, plus the
// matrix, free-module and submodule machinery the sheaf layers are built on.
//
// Elements are integer codes 0..size-1. Every constructor fixes a canonical
// coding so enumeration orders are reproducible:
//   Fp / Zm         code = residue
//   F_p[t]/(f)      code = sum c_i p^i  (coefficients low to high)
//   R x S           code = r * |S| + s

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "finsheaf/error.hpp"

namespace finsheaf {

using Element = int;
using Vec = std::vector<Element>;

class FinRing;
using RingPtr = std::shared_ptr<const FinRing>;

class FinRing {
 public:
  /// Builds a ring from its tables. When `validate` is set the full axiom
  /// check runs and RingAxiomViolated is thrown on failure.
  static RingPtr from_tables(std::string name, int size, std::vector<Element> add,
                             std::vector<Element> mul, Element zero, Element one,
                             std::vector<std::string> element_names = {}, bool validate = true);

  /// Lists every violated axiom (empty when the tables describe a commutative unital ring).
  static std::vector<std::string> check_axioms(int size, const std::vector<Element>& add,
                                               const std::vector<Element>& mul, Element zero,
                                               Element one);

  const std::string& name() const { return name_; }
  int size() const { return size_; }
  Element zero() const { return zero_; }
  Element one() const { return one_; }
  bool is_trivial() const { return size_ == 1; }

  Element add(Element a, Element b) const { return add_[idx(a, b)]; }
  Element mul(Element a, Element b) const { return mul_[idx(a, b)]; }
  Element neg(Element a) const { return neg_[static_cast<std::size_t>(a)]; }
  Element sub(Element a, Element b) const { return add(a, neg(b)); }

  bool is_unit(Element a) const { return inv_[static_cast<std::size_t>(a)] >= 0; }
  std::optional<Element> inverse(Element a) const {
    Element i = inv_[static_cast<std::size_t>(a)];
    return i >= 0 ? std::optional<Element>(i) : std::nullopt;
  }
  bool is_nilpotent(Element a) const;
  /// Nontrivial and every nonzero element is a unit.
  bool is_field() const;

  const std::string& element_name(Element a) const { return names_[static_cast<std::size_t>(a)]; }
  const std::vector<Element>& add_table() const { return add_; }
  const std::vector<Element>& mul_table() const { return mul_; }

 private:
  FinRing() = default;
  std::size_t idx(Element a, Element b) const {
    return static_cast<std::size_t>(a) * static_cast<std::size_t>(size_) + static_cast<std::size_t>(b);
  }

  std::string name_;
  int size_ = 0;
  std::vector<Element> add_, mul_, neg_, inv_;
  Element zero_ = 0, one_ = 0;
  std::vector<std::string> names_;
};

RingPtr make_field(int p);
RingPtr make_mod_ring(int m);
/// F_p[t]/(poly), poly monic of degree >= 1, coefficients low to high.
RingPtr make_quotient(int p, const std::vector<int>& poly);
RingPtr make_product(const RingPtr& left, const RingPtr& right);
RingPtr make_zero_ring();

bool is_prime(int p);

class RingMorphism {
 public:
  /// Throws InvalidMorphism unless the assignment preserves add, mul and one.
  RingMorphism(RingPtr domain, RingPtr codomain, std::vector<Element> assignment);

  static RingMorphism identity(const RingPtr& ring);
  static std::optional<std::string> check(const FinRing& domain, const FinRing& codomain,
                                          const std::vector<Element>& assignment);

  const RingPtr& domain() const { return domain_; }
  const RingPtr& codomain() const { return codomain_; }
  const std::vector<Element>& assignment() const { return map_; }
  Element operator()(Element a) const { return map_[static_cast<std::size_t>(a)]; }

 private:
  RingPtr domain_;
  RingPtr codomain_;
  std::vector<Element> map_;
};

/// Exhaustive search for a unital ring isomorphism; returns the
/// lexicographically least one. Throws SearchBudgetExceeded when |r| > max_size.
std::optional<RingMorphism> find_ring_isomorphism(const RingPtr& r, const RingPtr& s,
                                                  int max_size = 64);

// ---------------------------------------------------------------------------
// Free modules R^n, vectors and matrices.

/// Base-|R| coding of vectors in R^n; coordinate 0 is the most significant
/// digit so numeric order equals lexicographic order.
class VecCodec {
 public:
  VecCodec(int ring_size, int rank);

  int rank() const { return rank_; }
  std::uint64_t count() const { return count_; }
  std::uint64_t encode(const Vec& v) const;
  Vec decode(std::uint64_t code) const;

 private:
  std::uint64_t q_;
  int rank_;
  std::uint64_t count_;
};

Vec vec_add(const FinRing& r, const Vec& a, const Vec& b);
Vec vec_scale(const FinRing& r, Element c, const Vec& v);
Vec vec_map(const RingMorphism& f, const Vec& v);

class Matrix {
 public:
  Matrix(RingPtr ring, int rows, int cols);
  Matrix(RingPtr ring, int rows, int cols, std::vector<Element> entries);

  static Matrix identity(const RingPtr& ring, int n);
  /// Entries given as nested rows.
  static Matrix from_rows(const RingPtr& ring, const std::vector<std::vector<Element>>& rows);

  const RingPtr& ring() const { return ring_; }
  int rows() const { return rows_; }
  int cols() const { return cols_; }
  Element at(int i, int j) const { return entries_[static_cast<std::size_t>(i * cols_ + j)]; }
  void set(int i, int j, Element v) { entries_[static_cast<std::size_t>(i * cols_ + j)] = v; }
  const std::vector<Element>& entries() const { return entries_; }

  Vec apply(const Vec& v) const;
  Matrix operator*(const Matrix& other) const;
  /// Entrywise image under a ring morphism.
  Matrix mapped(const RingMorphism& f) const;
  Matrix scaled(Element c) const;

  friend bool operator==(const Matrix& a, const Matrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.entries_ == b.entries_;
  }

 private:
  RingPtr ring_;
  int rows_, cols_;
  std::vector<Element> entries_;
};

/// Cofactor expansion along the first row. Throws NonSquare.
Element det(const Matrix& m);
bool is_invertible(const Matrix& m);
/// Adjugate over the determinant; nullopt when the determinant is not a unit.
std::optional<Matrix> inverse(const Matrix& m);

/// All matrices of the given shape, in code order. Only sensible for tiny shapes.
std::vector<Matrix> all_matrices(const RingPtr& ring, int rows, int cols, SearchBudget& budget);

// ---------------------------------------------------------------------------
// Submodules of R^n.

/// An explicit submodule of R^n stored as the sorted codes of its elements.
class Submodule {
 public:
  Submodule() = default;

  static Submodule zero(const RingPtr& ring, int rank);
  static Submodule full(const RingPtr& ring, int rank);
  /// R-linear span of the generators.
  static Submodule span(const RingPtr& ring, int rank, const std::vector<Vec>& generators);
  /// Throws InvalidArgument unless the codes form a submodule.
  static Submodule from_codes(const RingPtr& ring, int rank, std::vector<std::uint64_t> codes);

  const RingPtr& ring() const { return ring_; }
  int rank() const { return rank_; }
  std::size_t size() const { return codes_.size(); }
  const std::vector<std::uint64_t>& codes() const { return codes_; }
  std::vector<Vec> vectors() const;
  bool contains(std::uint64_t code) const;
  bool contains(const Vec& v) const;
  bool subset_of(const Submodule& other) const;
  /// Vector-space dimension; requires a field.
  int dimension() const;
  /// Row-reduced basis; requires a field.
  std::vector<Vec> basis() const;

  /// The same submodule with `extra` zero coordinates appended.
  Submodule padded(int extra) const;

  friend bool operator==(const Submodule& a, const Submodule& b) {
    return a.rank_ == b.rank_ && a.codes_ == b.codes_ && a.ring_ == b.ring_;
  }
  friend bool operator<(const Submodule& a, const Submodule& b) {
    if (a.rank_ != b.rank_) return a.rank_ < b.rank_;
    return a.codes_ < b.codes_;
  }

  static bool is_closed(const FinRing& ring, int rank, const std::vector<std::uint64_t>& sorted_codes);

 private:
  RingPtr ring_;
  int rank_ = 0;
  std::vector<std::uint64_t> codes_;
};

/// Every k-dimensional subspace of r^n, each once, ordered by element codes.
/// Throws NotAField on non-field rings.
std::vector<Submodule> enumerate_free_submodules(const RingPtr& r, int n, int k);

// ---------------------------------------------------------------------------
// Abstract finite modules over a fixed scalar ring, used for module-tagged
// presheaf carriers.

class FinModule;
using ModulePtr = std::shared_ptr<const FinModule>;

class FinModule {
 public:
  static ModulePtr from_tables(RingPtr scalars, int size, std::vector<Element> add,
                               std::vector<Element> act, Element zero, bool validate = true);
  /// R^n with VecCodec coding.
  static ModulePtr free(const RingPtr& scalars, int rank);

  const RingPtr& scalars() const { return scalars_; }
  int size() const { return size_; }
  Element zero() const { return zero_; }
  Element add(Element a, Element b) const {
    return add_[static_cast<std::size_t>(a) * static_cast<std::size_t>(size_) + static_cast<std::size_t>(b)];
  }
  Element act(Element r, Element a) const {
    return act_[static_cast<std::size_t>(r) * static_cast<std::size_t>(size_) + static_cast<std::size_t>(a)];
  }

 private:
  FinModule() = default;
  RingPtr scalars_;
  int size_ = 0;
  std::vector<Element> add_, act_;
  Element zero_ = 0;
};

inline constexpr int kMaxTableElements = 1024;

}  // namespace finsheaf
