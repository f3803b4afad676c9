#include "sphf/rootdata.hpp"

#include <algorithm>
#include <stdexcept>

namespace sphf::rootdata {

CartanType parse_cartan_type(const std::string& s) {
  if (s == "A1" || s == "a1") return CartanType::A1;
  if (s == "A2" || s == "a2") return CartanType::A2;
  if (s == "B2" || s == "b2") return CartanType::B2;
  throw std::invalid_argument("unsupported Cartan type: " + s);
}

std::string cartan_type_name(CartanType t) {
  switch (t) {
    case CartanType::A1: return "A1";
    case CartanType::A2: return "A2";
    case CartanType::B2: return "B2";
  }
  return "?";
}

static void check_same_basis(const WeightVec& a, const WeightVec& b) {
  if (a.basis != b.basis || a.c.size() != b.c.size())
    throw std::invalid_argument("weight basis mismatch");
}

WeightVec operator+(const WeightVec& a, const WeightVec& b) {
  check_same_basis(a, b);
  WeightVec r = a;
  for (size_t i = 0; i < r.c.size(); ++i) r.c[i] += b.c[i];
  return r;
}

WeightVec operator-(const WeightVec& a, const WeightVec& b) {
  check_same_basis(a, b);
  WeightVec r = a;
  for (size_t i = 0; i < r.c.size(); ++i) r.c[i] -= b.c[i];
  return r;
}

WeightVec operator*(const Rational& s, const WeightVec& a) {
  WeightVec r = a;
  for (auto& x : r.c) x *= s;
  return r;
}

RootSystem RootSystem::build(CartanType type) {
  RootSystem rs;
  rs.type_ = type;
  // (a_i, a_j) in the convention where long roots have squared length 2; the
  // Killing normalization divides by 2 h^vee.
  std::vector<std::vector<Rational>> g0;
  long dual_coxeter = 0;
  switch (type) {
    case CartanType::A1:
      rs.rank_ = 1;
      rs.cartan_ = {{2}};
      g0 = {{2}};
      dual_coxeter = 2;
      rs.pos_ = {{1}};
      break;
    case CartanType::A2:
      rs.rank_ = 2;
      rs.cartan_ = {{2, -1}, {-1, 2}};
      g0 = {{2, -1}, {-1, 2}};
      dual_coxeter = 3;
      rs.pos_ = {{1, 0}, {0, 1}, {1, 1}};
      break;
    case CartanType::B2:
      // alpha_1 long, alpha_2 short
      rs.rank_ = 2;
      rs.cartan_ = {{2, -1}, {-2, 2}};
      g0 = {{2, -1}, {-1, 1}};
      dual_coxeter = 3;
      rs.pos_ = {{1, 0}, {0, 1}, {1, 1}, {1, 2}};
      break;
  }
  const int r = rs.rank_;
  rs.gram_ = Matrix<Rational>(r, r);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) rs.gram_(i, j) = g0[i][j] / Rational(2 * dual_coxeter);
  rs.gram_inv_ = *rs.gram_.inverse();
  rs.cartan_q_ = Matrix<Rational>(r, r);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) rs.cartan_q_(i, j) = Rational(rs.cartan_[i][j]);
  rs.cartan_q_inv_ = *rs.cartan_q_.inverse();

  auto by_height_lex = [](const std::vector<int>& a, const std::vector<int>& b) {
    int ha = 0, hb = 0;
    for (int x : a) ha += x;
    for (int x : b) hb += x;
    if (ha != hb) return ha < hb;
    return b < a;  // lex descending on coordinates within a height
  };
  std::sort(rs.pos_.begin(), rs.pos_.end(), by_height_lex);

  std::vector<Rational> rho(r, Rational(0));
  for (const auto& a : rs.pos_)
    for (int i = 0; i < r; ++i) rho[i] += Rational(a[i]) / 2;
  rs.rho_ = WeightVec(rho);
  return rs;
}

WeightVec RootSystem::to_simple_root_basis(const WeightVec& w) const {
  if (w.basis == WeightVec::Basis::SimpleRoot) return w;
  // fundamental coords f relate to root coords x by f = C x
  Matrix<Rational> f(rank_, 1);
  for (int i = 0; i < rank_; ++i) f(i, 0) = w.c[i];
  Matrix<Rational> x = cartan_q_inv_ * f;
  WeightVec out;
  out.basis = WeightVec::Basis::SimpleRoot;
  out.c.resize(rank_);
  for (int i = 0; i < rank_; ++i) out.c[i] = x(i, 0);
  return out;
}

WeightVec RootSystem::to_fundamental_basis(const WeightVec& w) const {
  if (w.basis == WeightVec::Basis::FundamentalWeight) return w;
  Matrix<Rational> x(rank_, 1);
  for (int i = 0; i < rank_; ++i) x(i, 0) = w.c[i];
  Matrix<Rational> f = cartan_q_ * x;
  WeightVec out;
  out.basis = WeightVec::Basis::FundamentalWeight;
  out.c.resize(rank_);
  for (int i = 0; i < rank_; ++i) out.c[i] = f(i, 0);
  return out;
}

WeightVec RootSystem::weight_of_root(const std::vector<int>& root) const {
  WeightVec w;
  w.c.reserve(root.size());
  for (int x : root) w.c.emplace_back(x);
  return w;
}

int RootSystem::positive_root_index(const std::vector<int>& root) const {
  for (size_t i = 0; i < pos_.size(); ++i)
    if (pos_[i] == root) return int(i);
  return -1;
}

Rational RootSystem::pairing(const WeightVec& a, const WeightVec& b) const {
  WeightVec x = to_simple_root_basis(a), y = to_simple_root_basis(b);
  if (int(x.c.size()) != rank_ || int(y.c.size()) != rank_)
    throw std::invalid_argument("weight rank mismatch");
  Rational s(0);
  for (int i = 0; i < rank_; ++i)
    for (int j = 0; j < rank_; ++j) s += x.c[i] * gram_(i, j) * y.c[j];
  return s;
}

Rational RootSystem::coroot_pairing(const WeightVec& a, const std::vector<int>& root) const {
  WeightVec b = weight_of_root(root);
  return 2 * pairing(a, b) / pairing(b, b);
}

std::vector<std::vector<int>> RootSystem::enumerate_qminus(int m) const {
  if (m < 0) throw std::invalid_argument("negative truncation height");
  std::vector<std::vector<int>> out;
  std::vector<int> cur(rank_, 0);
  // all nonnegative vectors with coordinate sum <= m, negated
  auto rec = [&](auto&& self, int pos, int left) -> void {
    if (pos == rank_) {
      std::vector<int> g = cur;
      for (int& x : g) x = -x;
      out.push_back(std::move(g));
      return;
    }
    for (int v = 0; v <= left; ++v) {
      cur[pos] = v;
      self(self, pos + 1, left - v);
    }
    cur[pos] = 0;
  };
  rec(rec, 0, m);
  std::sort(out.begin(), out.end(), [](const std::vector<int>& a, const std::vector<int>& b) {
    int ha = height(a), hb = height(b);
    if (ha != hb) return ha < hb;
    return a < b;  // lex ascending on gamma = lex descending on -gamma
  });
  return out;
}

int RootSystem::height(const std::vector<int>& gamma_neg) {
  int h = 0;
  for (int x : gamma_neg) h -= x;
  return h;
}

bool RootSystem::is_hc_generic_truncated(const WeightVec& lambda, int m) const {
  WeightVec lr = to_simple_root_basis(lambda) + rho_;
  for (const auto& g : enumerate_qminus(m)) {
    if (height(g) == 0) continue;
    WeightVec gw = weight_of_root(g);
    if (sgn(pairing(2 * Rational(1) * lr + gw, gw)) == 0) return false;
  }
  return true;
}

bool RootSystem::is_regular(const WeightVec& lambda) const {
  WeightVec l = to_simple_root_basis(lambda);
  for (const auto& a : pos_) {
    Rational p = coroot_pairing(l, a);
    if (p.get_den() == 1) return false;
  }
  return true;
}

bool RootSystem::dominance_leq(const WeightVec& a, const WeightVec& b) const {
  WeightVec d = to_simple_root_basis(b) - to_simple_root_basis(a);
  for (const auto& x : d.c)
    if (sgn(x) < 0) return false;
  return true;
}

std::vector<int> RootSystem::simple_reflection(int i, const std::vector<int>& root) const {
  // s_i(b) = b - (b, a_i^vee) a_i ; for b in the root lattice the pairing is
  // sum_k b_k C_ik
  long p = 0;
  for (int k = 0; k < rank_; ++k) p += long(root[k]) * cartan_[i][k];
  std::vector<int> out = root;
  out[i] -= int(p);
  return out;
}

}  // namespace sphf::rootdata
