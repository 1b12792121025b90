#include "finsheaf/finalg.hpp"

#include <algorithm>
#include <functional>
#include <numeric>

namespace finsheaf {

namespace {

std::string poly_name(const std::vector<int>& coeffs) {
  std::string out;
  for (int i = static_cast<int>(coeffs.size()) - 1; i >= 0; --i) {
    const int c = coeffs[static_cast<std::size_t>(i)];
    if (c == 0) continue;
    if (!out.empty()) out += "+";
    if (i == 0) {
      out += std::to_string(c);
      continue;
    }
    if (c != 1) out += std::to_string(c);
    out += i == 1 ? "t" : "t^" + std::to_string(i);
  }
  return out.empty() ? "0" : out;
}

}  // namespace

std::vector<std::string> FinRing::check_axioms(int n, const std::vector<Element>& add,
                                               const std::vector<Element>& mul, Element zero,
                                               Element one) {
  std::vector<std::string> out;
  const auto N = static_cast<std::size_t>(n);
  if (n <= 0) return {"ring must have at least one element"};
  if (add.size() != N * N || mul.size() != N * N) return {"operation tables must be size x size"};
  if (zero < 0 || zero >= n || one < 0 || one >= n) return {"zero/one out of range"};
  for (Element v : add) {
    if (v < 0 || v >= n) return {"addition table has an out-of-range entry"};
  }
  for (Element v : mul) {
    if (v < 0 || v >= n) return {"multiplication table has an out-of-range entry"};
  }
  auto A = [&](Element a, Element b) { return add[static_cast<std::size_t>(a * n + b)]; };
  auto M = [&](Element a, Element b) { return mul[static_cast<std::size_t>(a * n + b)]; };
  auto note = [&](std::string msg) {
    if (out.size() < 8) out.push_back(std::move(msg));
  };

  for (Element a = 0; a < n; ++a) {
    if (A(a, zero) != a) note("zero is not an additive identity for " + std::to_string(a));
    if (M(a, one) != a) note("one is not a multiplicative identity for " + std::to_string(a));
    bool has_neg = false;
    for (Element b = 0; b < n; ++b) {
      if (A(a, b) == zero) has_neg = true;
      if (A(a, b) != A(b, a)) note("addition not commutative at (" + std::to_string(a) + "," + std::to_string(b) + ")");
      if (M(a, b) != M(b, a)) note("multiplication not commutative at (" + std::to_string(a) + "," + std::to_string(b) + ")");
      for (Element c = 0; c < n; ++c) {
        if (A(A(a, b), c) != A(a, A(b, c))) note("addition not associative");
        if (M(M(a, b), c) != M(a, M(b, c))) note("multiplication not associative");
        if (M(a, A(b, c)) != A(M(a, b), M(a, c))) note("multiplication does not distribute");
      }
    }
    if (!has_neg) note("no additive inverse for " + std::to_string(a));
    if (out.size() >= 8) break;
  }
  if (n > 1 && zero == one) note("one equals zero in a nontrivial ring");
  return out;
}

RingPtr FinRing::from_tables(std::string name, int size, std::vector<Element> add,
                             std::vector<Element> mul, Element zero, Element one,
                             std::vector<std::string> element_names, bool validate) {
  if (validate) {
    auto problems = check_axioms(size, add, mul, zero, one);
    if (!problems.empty()) throw Error(ErrorKind::RingAxiomViolated, name + ": " + problems.front());
  } else if (size <= 0 || add.size() != static_cast<std::size_t>(size) * static_cast<std::size_t>(size) ||
             mul.size() != add.size()) {
    throw Error(ErrorKind::RingAxiomViolated, name + ": malformed tables");
  }
  auto r = std::shared_ptr<FinRing>(new FinRing());
  r->name_ = std::move(name);
  r->size_ = size;
  r->add_ = std::move(add);
  r->mul_ = std::move(mul);
  r->zero_ = zero;
  r->one_ = one;
  r->neg_.assign(static_cast<std::size_t>(size), -1);
  r->inv_.assign(static_cast<std::size_t>(size), -1);
  for (Element a = 0; a < size; ++a) {
    for (Element b = 0; b < size; ++b) {
      if (r->add(a, b) == zero && r->neg_[static_cast<std::size_t>(a)] < 0) r->neg_[static_cast<std::size_t>(a)] = b;
      if (r->mul(a, b) == one && r->inv_[static_cast<std::size_t>(a)] < 0) r->inv_[static_cast<std::size_t>(a)] = b;
    }
  }
  if (element_names.size() != static_cast<std::size_t>(size)) {
    element_names.clear();
    for (Element a = 0; a < size; ++a) element_names.push_back(std::to_string(a));
  }
  r->names_ = std::move(element_names);
  return r;
}

bool FinRing::is_nilpotent(Element a) const {
  Element p = a;
  for (int i = 0; i <= size_; ++i) {
    if (p == zero_) return true;
    p = mul(p, a);
  }
  return false;
}

bool FinRing::is_field() const {
  if (size_ < 2) return false;
  for (Element a = 0; a < size_; ++a) {
    if (a != zero_ && !is_unit(a)) return false;
  }
  return true;
}

bool is_prime(int p) {
  if (p < 2) return false;
  for (int d = 2; d * d <= p; ++d) {
    if (p % d == 0) return false;
  }
  return true;
}

RingPtr make_mod_ring(int m) {
  if (m < 2) throw Error(ErrorKind::InvalidArgument, "modulus must be at least 2");
  if (m > 256) throw Error(ErrorKind::InvalidArgument, "modulus too large for table rings");
  std::vector<Element> add, mul;
  for (int a = 0; a < m; ++a) {
    for (int b = 0; b < m; ++b) {
      add.push_back((a + b) % m);
      mul.push_back((a * b) % m);
    }
  }
  return FinRing::from_tables("Z/" + std::to_string(m), m, std::move(add), std::move(mul), 0, 1);
}

RingPtr make_field(int p) {
  if (!is_prime(p)) throw Error(ErrorKind::NotPrime, std::to_string(p) + " is not prime");
  auto zm = make_mod_ring(p);
  return FinRing::from_tables("F_" + std::to_string(p), p, zm->add_table(), zm->mul_table(), 0, 1, {}, false);
}

RingPtr make_quotient(int p, const std::vector<int>& poly) {
  if (!is_prime(p)) throw Error(ErrorKind::NotPrime, std::to_string(p) + " is not prime");
  if (poly.size() < 2) throw Error(ErrorKind::InvalidPolynomial, "polynomial must have degree >= 1");
  for (int c : poly) {
    if (c < 0 || c >= p) throw Error(ErrorKind::InvalidPolynomial, "coefficients must lie in [0, p)");
  }
  if (poly.back() != 1) throw Error(ErrorKind::InvalidPolynomial, "polynomial must be monic");
  const int d = static_cast<int>(poly.size()) - 1;
  int size = 1;
  for (int i = 0; i < d; ++i) {
    size *= p;
    if (size > 256) throw Error(ErrorKind::InvalidArgument, "quotient ring too large for table rings");
  }

  auto digits = [&](int code) {
    std::vector<int> c(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i, code /= p) c[static_cast<std::size_t>(i)] = code % p;
    return c;
  };
  auto code_of = [&](const std::vector<int>& c) {
    int code = 0;
    for (int i = d - 1; i >= 0; --i) code = code * p + c[static_cast<std::size_t>(i)];
    return code;
  };

  std::vector<Element> add, mul;
  std::vector<std::string> names;
  for (int a = 0; a < size; ++a) {
    const auto ca = digits(a);
    names.push_back(poly_name(ca));
    for (int b = 0; b < size; ++b) {
      const auto cb = digits(b);
      std::vector<int> s(static_cast<std::size_t>(d));
      for (int i = 0; i < d; ++i) s[static_cast<std::size_t>(i)] = (ca[static_cast<std::size_t>(i)] + cb[static_cast<std::size_t>(i)]) % p;
      add.push_back(code_of(s));

      std::vector<int> prod(static_cast<std::size_t>(2 * d), 0);
      for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
          auto& slot = prod[static_cast<std::size_t>(i + j)];
          slot = (slot + ca[static_cast<std::size_t>(i)] * cb[static_cast<std::size_t>(j)]) % p;
        }
      }
      // t^d = -(poly_0 + ... + poly_{d-1} t^{d-1})
      for (int deg = 2 * d - 1; deg >= d; --deg) {
        const int lead = prod[static_cast<std::size_t>(deg)];
        if (lead == 0) continue;
        prod[static_cast<std::size_t>(deg)] = 0;
        for (int i = 0; i < d; ++i) {
          auto& slot = prod[static_cast<std::size_t>(deg - d + i)];
          slot = ((slot - lead * poly[static_cast<std::size_t>(i)]) % p + p) % p;
        }
      }
      prod.resize(static_cast<std::size_t>(d));
      mul.push_back(code_of(prod));
    }
  }
  std::vector<int> trimmed(poly.begin(), poly.end());
  std::string name = "F_" + std::to_string(p) + "[t]/(" + poly_name(trimmed) + ")";
  return FinRing::from_tables(std::move(name), size, std::move(add), std::move(mul), 0, 1,
                              std::move(names));
}

RingPtr make_product(const RingPtr& left, const RingPtr& right) {
  const int m = left->size(), n = right->size();
  const int size = m * n;
  if (size > 4096) throw Error(ErrorKind::InvalidArgument, "product ring too large for table rings");
  std::vector<Element> add, mul;
  std::vector<std::string> names;
  add.reserve(static_cast<std::size_t>(size * size));
  mul.reserve(static_cast<std::size_t>(size * size));
  for (int a = 0; a < size; ++a) {
    names.push_back("(" + left->element_name(a / n) + "," + right->element_name(a % n) + ")");
    for (int b = 0; b < size; ++b) {
      add.push_back(left->add(a / n, b / n) * n + right->add(a % n, b % n));
      mul.push_back(left->mul(a / n, b / n) * n + right->mul(a % n, b % n));
    }
  }
  return FinRing::from_tables(left->name() + " x " + right->name(), size, std::move(add), std::move(mul),
                              left->zero() * n + right->zero(), left->one() * n + right->one(),
                              std::move(names), size <= 64);
}

RingPtr make_zero_ring() { return FinRing::from_tables("0", 1, {0}, {0}, 0, 0, {"0"}); }

// ---------------------------------------------------------------------------

std::optional<std::string> RingMorphism::check(const FinRing& dom, const FinRing& cod,
                                               const std::vector<Element>& f) {
  if (f.size() != static_cast<std::size_t>(dom.size())) return "assignment must cover the domain";
  for (Element v : f) {
    if (v < 0 || v >= cod.size()) return "assignment value out of range";
  }
  auto F = [&](Element a) { return f[static_cast<std::size_t>(a)]; };
  if (F(dom.one()) != cod.one()) return "one is not preserved";
  for (Element a = 0; a < dom.size(); ++a) {
    for (Element b = 0; b < dom.size(); ++b) {
      if (F(dom.add(a, b)) != cod.add(F(a), F(b))) return "addition is not preserved";
      if (F(dom.mul(a, b)) != cod.mul(F(a), F(b))) return "multiplication is not preserved";
    }
  }
  return std::nullopt;
}

RingMorphism::RingMorphism(RingPtr domain, RingPtr codomain, std::vector<Element> assignment)
    : domain_(std::move(domain)), codomain_(std::move(codomain)), map_(std::move(assignment)) {
  if (auto why = check(*domain_, *codomain_, map_)) {
    throw Error(ErrorKind::InvalidMorphism, domain_->name() + " -> " + codomain_->name() + ": " + *why);
  }
}

RingMorphism RingMorphism::identity(const RingPtr& ring) {
  std::vector<Element> id(static_cast<std::size_t>(ring->size()));
  std::iota(id.begin(), id.end(), 0);
  return RingMorphism(ring, ring, std::move(id));
}

std::optional<RingMorphism> find_ring_isomorphism(const RingPtr& r, const RingPtr& s, int max_size) {
  if (r->size() != s->size()) return std::nullopt;
  const int n = r->size();
  if (n > max_size) {
    throw Error(ErrorKind::SearchBudgetExceeded,
                "isomorphism search limited to rings of size " + std::to_string(max_size));
  }
  // Counting invariants prune pairs that cannot be isomorphic.
  auto profile = [](const FinRing& ring) {
    int units = 0, nilpotents = 0;
    for (Element a = 0; a < ring.size(); ++a) {
      units += ring.is_unit(a);
      nilpotents += ring.is_nilpotent(a);
    }
    return std::pair{units, nilpotents};
  };
  if (profile(*r) != profile(*s)) return std::nullopt;

  std::vector<Element> image(static_cast<std::size_t>(n), -1);
  std::vector<char> used(static_cast<std::size_t>(n), 0);

  // Assign a -> v and close under the ring operations. Returns false on conflict;
  // `trail` records assignments to undo.
  std::function<bool(Element, Element, std::vector<Element>&)> assign =
      [&](Element a, Element v, std::vector<Element>& trail) -> bool {
    std::vector<std::pair<Element, Element>> queue{{a, v}};
    while (!queue.empty()) {
      auto [x, y] = queue.back();
      queue.pop_back();
      Element& slot = image[static_cast<std::size_t>(x)];
      if (slot >= 0) {
        if (slot != y) return false;
        continue;
      }
      if (used[static_cast<std::size_t>(y)]) return false;
      slot = y;
      used[static_cast<std::size_t>(y)] = 1;
      trail.push_back(x);
      for (Element b = 0; b < n; ++b) {
        const Element fb = image[static_cast<std::size_t>(b)];
        if (fb < 0) continue;
        queue.emplace_back(r->add(x, b), s->add(y, fb));
        queue.emplace_back(r->mul(x, b), s->mul(y, fb));
      }
    }
    return true;
  };
  auto undo = [&](const std::vector<Element>& trail) {
    for (Element x : trail) {
      used[static_cast<std::size_t>(image[static_cast<std::size_t>(x)])] = 0;
      image[static_cast<std::size_t>(x)] = -1;
    }
  };

  std::vector<Element> base_trail;
  if (!assign(r->zero(), s->zero(), base_trail) || !assign(r->one(), s->one(), base_trail)) {
    return std::nullopt;
  }

  std::function<bool()> search = [&]() -> bool {
    auto it = std::find(image.begin(), image.end(), -1);
    if (it == image.end()) return true;
    const auto a = static_cast<Element>(it - image.begin());
    for (Element v = 0; v < n; ++v) {
      if (used[static_cast<std::size_t>(v)]) continue;
      std::vector<Element> trail;
      if (assign(a, v, trail) && search()) return true;
      undo(trail);
    }
    return false;
  };
  if (!search()) return std::nullopt;
  return RingMorphism(r, s, image);
}

// ---------------------------------------------------------------------------

VecCodec::VecCodec(int ring_size, int rank) : q_(static_cast<std::uint64_t>(ring_size)), rank_(rank), count_(1) {
  for (int i = 0; i < rank; ++i) {
    if (count_ > (std::uint64_t{1} << 40) / q_) throw Error(ErrorKind::SpaceTooLarge, "free module too large to code");
    count_ *= q_;
  }
}

std::uint64_t VecCodec::encode(const Vec& v) const {
  std::uint64_t code = 0;
  for (Element c : v) code = code * q_ + static_cast<std::uint64_t>(c);
  return code;
}

Vec VecCodec::decode(std::uint64_t code) const {
  Vec v(static_cast<std::size_t>(rank_));
  for (int i = rank_ - 1; i >= 0; --i) {
    v[static_cast<std::size_t>(i)] = static_cast<Element>(code % q_);
    code /= q_;
  }
  return v;
}

Vec vec_add(const FinRing& r, const Vec& a, const Vec& b) {
  Vec out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = r.add(a[i], b[i]);
  return out;
}

Vec vec_scale(const FinRing& r, Element c, const Vec& v) {
  Vec out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = r.mul(c, v[i]);
  return out;
}

Vec vec_map(const RingMorphism& f, const Vec& v) {
  Vec out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = f(v[i]);
  return out;
}

Matrix::Matrix(RingPtr ring, int rows, int cols)
    : ring_(std::move(ring)), rows_(rows), cols_(cols),
      entries_(static_cast<std::size_t>(rows * cols), ring_->zero()) {}

Matrix::Matrix(RingPtr ring, int rows, int cols, std::vector<Element> entries)
    : ring_(std::move(ring)), rows_(rows), cols_(cols), entries_(std::move(entries)) {
  if (entries_.size() != static_cast<std::size_t>(rows * cols)) {
    throw Error(ErrorKind::InvalidArgument, "matrix entry count must equal rows x cols");
  }
  for (Element e : entries_) {
    if (e < 0 || e >= ring_->size()) throw Error(ErrorKind::InvalidArgument, "matrix entry out of range");
  }
}

Matrix Matrix::identity(const RingPtr& ring, int n) {
  Matrix m(ring, n, n);
  for (int i = 0; i < n; ++i) m.set(i, i, ring->one());
  return m;
}

Matrix Matrix::from_rows(const RingPtr& ring, const std::vector<std::vector<Element>>& rows) {
  const int r = static_cast<int>(rows.size());
  const int c = r == 0 ? 0 : static_cast<int>(rows.front().size());
  std::vector<Element> entries;
  for (const auto& row : rows) {
    if (static_cast<int>(row.size()) != c) throw Error(ErrorKind::InvalidArgument, "ragged matrix rows");
    entries.insert(entries.end(), row.begin(), row.end());
  }
  return Matrix(ring, r, c, std::move(entries));
}

Vec Matrix::apply(const Vec& v) const {
  if (static_cast<int>(v.size()) != cols_) throw Error(ErrorKind::InvalidArgument, "vector length mismatch");
  Vec out(static_cast<std::size_t>(rows_), ring_->zero());
  for (int i = 0; i < rows_; ++i) {
    Element acc = ring_->zero();
    for (int j = 0; j < cols_; ++j) acc = ring_->add(acc, ring_->mul(at(i, j), v[static_cast<std::size_t>(j)]));
    out[static_cast<std::size_t>(i)] = acc;
  }
  return out;
}

Matrix Matrix::operator*(const Matrix& other) const {
  if (cols_ != other.rows_) throw Error(ErrorKind::InvalidArgument, "matrix shape mismatch");
  if (ring_ != other.ring_) throw Error(ErrorKind::InvalidArgument, "matrices over different rings");
  Matrix out(ring_, rows_, other.cols_);
  for (int i = 0; i < rows_; ++i) {
    for (int j = 0; j < other.cols_; ++j) {
      Element acc = ring_->zero();
      for (int l = 0; l < cols_; ++l) acc = ring_->add(acc, ring_->mul(at(i, l), other.at(l, j)));
      out.set(i, j, acc);
    }
  }
  return out;
}

Matrix Matrix::mapped(const RingMorphism& f) const {
  if (f.domain() != ring_) throw Error(ErrorKind::InvalidArgument, "morphism domain differs from matrix ring");
  std::vector<Element> e;
  e.reserve(entries_.size());
  for (Element x : entries_) e.push_back(f(x));
  return Matrix(f.codomain(), rows_, cols_, std::move(e));
}

Matrix Matrix::scaled(Element c) const {
  Matrix out = *this;
  for (auto& e : out.entries_) e = ring_->mul(c, e);
  return out;
}

Element det(const Matrix& m) {
  if (m.rows() != m.cols()) throw Error(ErrorKind::NonSquare, "determinant of a non-square matrix");
  const FinRing& r = *m.ring();
  const int n = m.rows();
  if (n == 0) return r.one();
  if (n == 1) return m.at(0, 0);
  Element acc = r.zero();
  for (int j = 0; j < n; ++j) {
    Matrix minor(m.ring(), n - 1, n - 1);
    for (int i = 1; i < n; ++i) {
      for (int c = 0, mc = 0; c < n; ++c) {
        if (c == j) continue;
        minor.set(i - 1, mc++, m.at(i, c));
      }
    }
    Element term = r.mul(m.at(0, j), det(minor));
    acc = (j % 2 == 0) ? r.add(acc, term) : r.sub(acc, term);
  }
  return acc;
}

bool is_invertible(const Matrix& m) { return m.ring()->is_unit(det(m)); }

std::optional<Matrix> inverse(const Matrix& m) {
  const auto d_inv = m.ring()->inverse(det(m));
  if (!d_inv) return std::nullopt;
  const FinRing& r = *m.ring();
  const int n = m.rows();
  Matrix out(m.ring(), n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      // cofactor C_ji goes to position (i, j)
      Matrix minor(m.ring(), n - 1, n - 1);
      for (int a = 0, ma = 0; a < n; ++a) {
        if (a == j) continue;
        for (int b = 0, mb = 0; b < n; ++b) {
          if (b == i) continue;
          minor.set(ma, mb++, m.at(a, b));
        }
        ++ma;
      }
      Element c = n == 1 ? r.one() : det(minor);
      if ((i + j) % 2 == 1) c = r.neg(c);
      out.set(i, j, r.mul(*d_inv, c));
    }
  }
  return out;
}

std::vector<Matrix> all_matrices(const RingPtr& ring, int rows, int cols, SearchBudget& budget) {
  VecCodec codec(ring->size(), rows * cols);
  std::vector<Matrix> out;
  for (std::uint64_t code = 0; code < codec.count(); ++code) {
    budget.charge();
    out.emplace_back(ring, rows, cols, codec.decode(code));
  }
  return out;
}

// ---------------------------------------------------------------------------

Submodule Submodule::zero(const RingPtr& ring, int rank) {
  Submodule s;
  s.ring_ = ring;
  s.rank_ = rank;
  s.codes_ = {VecCodec(ring->size(), rank).encode(Vec(static_cast<std::size_t>(rank), ring->zero()))};
  return s;
}

Submodule Submodule::full(const RingPtr& ring, int rank) {
  Submodule s;
  s.ring_ = ring;
  s.rank_ = rank;
  VecCodec codec(ring->size(), rank);
  s.codes_.resize(codec.count());
  std::iota(s.codes_.begin(), s.codes_.end(), std::uint64_t{0});
  return s;
}

Submodule Submodule::span(const RingPtr& ring, int rank, const std::vector<Vec>& generators) {
  Submodule s = zero(ring, rank);
  VecCodec codec(ring->size(), rank);
  for (const auto& g : generators) {
    if (static_cast<int>(g.size()) != rank) throw Error(ErrorKind::InvalidArgument, "generator length mismatch");
    const auto gc = codec.encode(g);
    if (s.contains(gc)) continue;
    std::vector<Vec> multiples;
    for (Element c = 0; c < ring->size(); ++c) multiples.push_back(vec_scale(*ring, c, g));
    std::vector<std::uint64_t> next;
    next.reserve(s.codes_.size() * multiples.size());
    for (auto code : s.codes_) {
      const Vec v = codec.decode(code);
      for (const auto& m : multiples) next.push_back(codec.encode(vec_add(*ring, v, m)));
    }
    std::sort(next.begin(), next.end());
    next.erase(std::unique(next.begin(), next.end()), next.end());
    s.codes_ = std::move(next);
  }
  return s;
}

bool Submodule::is_closed(const FinRing& ring, int rank, const std::vector<std::uint64_t>& codes) {
  VecCodec codec(ring.size(), rank);
  auto has = [&](const Vec& v) { return std::binary_search(codes.begin(), codes.end(), codec.encode(v)); };
  if (!has(Vec(static_cast<std::size_t>(rank), ring.zero()))) return false;
  for (auto a : codes) {
    const Vec va = codec.decode(a);
    for (Element c = 0; c < ring.size(); ++c) {
      if (!has(vec_scale(ring, c, va))) return false;
    }
    for (auto b : codes) {
      if (b < a) continue;
      if (!has(vec_add(ring, va, codec.decode(b)))) return false;
    }
  }
  return true;
}

Submodule Submodule::from_codes(const RingPtr& ring, int rank, std::vector<std::uint64_t> codes) {
  std::sort(codes.begin(), codes.end());
  codes.erase(std::unique(codes.begin(), codes.end()), codes.end());
  VecCodec codec(ring->size(), rank);
  for (auto c : codes) {
    if (c >= codec.count()) throw Error(ErrorKind::InvalidArgument, "vector code out of range");
  }
  if (!is_closed(*ring, rank, codes)) throw Error(ErrorKind::InvalidArgument, "codes do not form a submodule");
  Submodule s;
  s.ring_ = ring;
  s.rank_ = rank;
  s.codes_ = std::move(codes);
  return s;
}

std::vector<Vec> Submodule::vectors() const {
  VecCodec codec(ring_->size(), rank_);
  std::vector<Vec> out;
  out.reserve(codes_.size());
  for (auto c : codes_) out.push_back(codec.decode(c));
  return out;
}

bool Submodule::contains(std::uint64_t code) const { return std::binary_search(codes_.begin(), codes_.end(), code); }

bool Submodule::contains(const Vec& v) const { return contains(VecCodec(ring_->size(), rank_).encode(v)); }

bool Submodule::subset_of(const Submodule& other) const {
  return std::includes(other.codes_.begin(), other.codes_.end(), codes_.begin(), codes_.end());
}

int Submodule::dimension() const {
  if (!ring_->is_field()) throw Error(ErrorKind::NotAField, ring_->name() + " is not a field");
  int d = 0;
  for (std::size_t s = 1; s < codes_.size(); s *= static_cast<std::size_t>(ring_->size())) ++d;
  return d;
}

std::vector<Vec> Submodule::basis() const {
  if (!ring_->is_field()) throw Error(ErrorKind::NotAField, ring_->name() + " is not a field");
  std::vector<Vec> out;
  Submodule current = zero(ring_, rank_);
  VecCodec codec(ring_->size(), rank_);
  for (auto c : codes_) {
    if (current.contains(c)) continue;
    out.push_back(codec.decode(c));
    current = span(ring_, rank_, out);
    if (current.size() == codes_.size()) break;
  }
  return out;
}

Submodule Submodule::padded(int extra) const {
  Submodule s;
  s.ring_ = ring_;
  s.rank_ = rank_ + extra;
  std::uint64_t shift = 1;
  for (int i = 0; i < extra; ++i) shift *= static_cast<std::uint64_t>(ring_->size());
  for (auto c : codes_) s.codes_.push_back(c * shift);
  return s;
}

std::vector<Submodule> enumerate_free_submodules(const RingPtr& r, int n, int k) {
  if (!r->is_field()) throw Error(ErrorKind::NotAField, r->name() + " is not a field");
  if (k < 0 || k > n) throw Error(ErrorKind::InvalidArgument, "need 0 <= k <= n");
  std::vector<Submodule> out;
  // Reduced row echelon forms: choose pivot columns, fill the free slots.
  std::vector<int> pivots(static_cast<std::size_t>(k));
  std::iota(pivots.begin(), pivots.end(), 0);
  const int q = r->size();
  while (true) {
    std::vector<std::pair<int, int>> free_slots;
    for (int i = 0; i < k; ++i) {
      for (int j = pivots[static_cast<std::size_t>(i)] + 1; j < n; ++j) {
        if (std::find(pivots.begin(), pivots.end(), j) == pivots.end()) free_slots.emplace_back(i, j);
      }
    }
    VecCodec fill(q, static_cast<int>(free_slots.size()));
    for (std::uint64_t code = 0; code < fill.count(); ++code) {
      const Vec values = fill.decode(code);
      std::vector<Vec> rows(static_cast<std::size_t>(k), Vec(static_cast<std::size_t>(n), r->zero()));
      for (int i = 0; i < k; ++i) rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(pivots[static_cast<std::size_t>(i)])] = r->one();
      for (std::size_t s = 0; s < free_slots.size(); ++s) {
        rows[static_cast<std::size_t>(free_slots[s].first)][static_cast<std::size_t>(free_slots[s].second)] = values[s];
      }
      out.push_back(Submodule::span(r, n, rows));
    }
    // next combination
    int i = k - 1;
    while (i >= 0 && pivots[static_cast<std::size_t>(i)] == n - k + i) --i;
    if (i < 0) break;
    ++pivots[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < k; ++j) pivots[static_cast<std::size_t>(j)] = pivots[static_cast<std::size_t>(j - 1)] + 1;
  }
  std::sort(out.begin(), out.end());
  return out;
}

// ---------------------------------------------------------------------------

ModulePtr FinModule::from_tables(RingPtr scalars, int size, std::vector<Element> add,
                                 std::vector<Element> act, Element zero, bool validate) {
  const auto N = static_cast<std::size_t>(size);
  if (size <= 0 || add.size() != N * N || act.size() != static_cast<std::size_t>(scalars->size()) * N) {
    throw Error(ErrorKind::InvalidArgument, "malformed module tables");
  }
  auto m = std::shared_ptr<FinModule>(new FinModule());
  m->scalars_ = std::move(scalars);
  m->size_ = size;
  m->add_ = std::move(add);
  m->act_ = std::move(act);
  m->zero_ = zero;
  if (validate) {
    const FinRing& r = *m->scalars_;
    for (Element a = 0; a < size; ++a) {
      if (m->add(a, zero) != a || m->act(r.one(), a) != a) {
        throw Error(ErrorKind::InvalidArgument, "module identities fail");
      }
      for (Element b = 0; b < size; ++b) {
        if (m->add(a, b) != m->add(b, a)) throw Error(ErrorKind::InvalidArgument, "module addition not commutative");
        for (Element c = 0; c < r.size(); ++c) {
          if (m->act(c, m->add(a, b)) != m->add(m->act(c, a), m->act(c, b))) {
            throw Error(ErrorKind::InvalidArgument, "scalar action not additive");
          }
        }
      }
      for (Element c = 0; c < r.size(); ++c) {
        for (Element d = 0; d < r.size(); ++d) {
          if (m->act(r.mul(c, d), a) != m->act(c, m->act(d, a)) ||
              m->act(r.add(c, d), a) != m->add(m->act(c, a), m->act(d, a))) {
            throw Error(ErrorKind::InvalidArgument, "scalar action not compatible with ring operations");
          }
        }
      }
    }
  }
  return m;
}

ModulePtr FinModule::free(const RingPtr& scalars, int rank) {
  VecCodec codec(scalars->size(), rank);
  if (codec.count() > static_cast<std::uint64_t>(kMaxTableElements)) {
    throw Error(ErrorKind::SpaceTooLarge, "free module too large for explicit tables");
  }
  const int size = static_cast<int>(codec.count());
  std::vector<Element> add, act;
  for (int a = 0; a < size; ++a) {
    const Vec va = codec.decode(static_cast<std::uint64_t>(a));
    for (int b = 0; b < size; ++b) {
      add.push_back(static_cast<Element>(codec.encode(vec_add(*scalars, va, codec.decode(static_cast<std::uint64_t>(b))))));
    }
  }
  for (Element c = 0; c < scalars->size(); ++c) {
    for (int a = 0; a < size; ++a) {
      act.push_back(static_cast<Element>(codec.encode(vec_scale(*scalars, c, codec.decode(static_cast<std::uint64_t>(a))))));
    }
  }
  return from_tables(scalars, size, std::move(add), std::move(act), 0, false);
}

}  // namespace finsheaf
