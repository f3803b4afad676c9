#pragma once

#include <string>
#include <vector>

#include "sphf/matrix.hpp"
#include "sphf/scalar.hpp"

namespace sphf::rootdata {

enum class CartanType { A1, A2, B2 };

CartanType parse_cartan_type(const std::string& s);
std::string cartan_type_name(CartanType t);

// Weights live in h*; coordinates are exact rationals in the simple-root
// basis by default, with an explicit tag for the fundamental-weight basis.
struct WeightVec {
  enum class Basis { SimpleRoot, FundamentalWeight };
  std::vector<Rational> c;
  Basis basis = Basis::SimpleRoot;

  WeightVec() = default;
  explicit WeightVec(std::vector<Rational> coords, Basis b = Basis::SimpleRoot)
      : c(std::move(coords)), basis(b) {}

  friend bool operator==(const WeightVec& a, const WeightVec& b) {
    return a.basis == b.basis && a.c == b.c;
  }
};

WeightVec operator+(const WeightVec& a, const WeightVec& b);
WeightVec operator-(const WeightVec& a, const WeightVec& b);
WeightVec operator*(const Rational& s, const WeightVec& a);

// Root-system combinatorics with the Killing-normalized bilinear form.  All
// pairings on h* are induced by the Killing form of g, so e.g. (α,α) = 1/2
// for A1; every constant downstream depends on this normalization.
class RootSystem {
 public:
  static RootSystem build(CartanType type);

  CartanType type() const { return type_; }
  int rank() const { return rank_; }

  // positive roots as integer coordinate vectors in the simple-root basis,
  // ordered by height then lexicographically
  const std::vector<std::vector<int>>& positive_roots() const { return pos_; }
  const std::vector<std::vector<int>>& cartan_matrix() const { return cartan_; }
  const Matrix<Rational>& gram() const { return gram_; }
  const Matrix<Rational>& gram_inv() const { return gram_inv_; }
  const WeightVec& rho() const { return rho_; }

  WeightVec to_simple_root_basis(const WeightVec& w) const;
  WeightVec to_fundamental_basis(const WeightVec& w) const;

  WeightVec weight_of_root(const std::vector<int>& root) const;
  // index into positive_roots(), or -1
  int positive_root_index(const std::vector<int>& root) const;

  Rational pairing(const WeightVec& a, const WeightVec& b) const;
  Rational norm2(const WeightVec& a) const { return pairing(a, a); }
  // (a, b^vee) with b a root
  Rational coroot_pairing(const WeightVec& a, const std::vector<int>& root) const;

  // all gamma in Q_- with ht(-gamma) <= m, sorted by height then lex
  std::vector<std::vector<int>> enumerate_qminus(int m) const;
  static int height(const std::vector<int>& gamma_neg);  // ht(-gamma)

  // truncated surrogate for h*_HC: (2(lambda+rho)+gamma, gamma) != 0 for all
  // nonzero gamma in Q_- up to height m
  bool is_hc_generic_truncated(const WeightVec& lambda, int m) const;
  // (lambda, alpha^vee) not integral for every root
  bool is_regular(const WeightVec& lambda) const;
  // dominance order: a <= b iff b - a is a nonnegative combination of simple roots
  bool dominance_leq(const WeightVec& a, const WeightVec& b) const;

  std::vector<int> simple_reflection(int i, const std::vector<int>& root) const;

 private:
  CartanType type_;
  int rank_ = 0;
  std::vector<std::vector<int>> pos_;
  std::vector<std::vector<int>> cartan_;
  Matrix<Rational> gram_, gram_inv_;
  Matrix<Rational> cartan_q_, cartan_q_inv_;
  WeightVec rho_;
};

}  // namespace sphf::rootdata
