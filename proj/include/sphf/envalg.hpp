#pragma once

#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "sphf/matrix.hpp"
#include "sphf/parallel.hpp"
#include "sphf/rootdata.hpp"
#include "sphf/scalar.hpp"

namespace sphf::envalg {

using rootdata::CartanType;
using rootdata::RootSystem;
using rootdata::WeightVec;

// A finite-dimensional Lie algebra with a fixed ordered basis and exact
// structure constants.  The basis order doubles as the PBW order of the
// enveloping algebra.
template <class F>
struct LieTable {
  const RootSystem* rs = nullptr;
  int n = 0;
  std::vector<std::string> name;
  std::vector<std::vector<int>> wt;  // root-lattice coords per symbol (h: zero)
  // br[i][j] = [b_i, b_j] as a sparse combination of basis symbols
  std::vector<std::vector<std::vector<std::pair<int, F>>>> br;

  std::vector<std::pair<int, F>> bracket(int i, int j) const { return br[i][j]; }

  // Killing form from the structure constants alone: K(i,j) = tr(ad_i ad_j).
  Matrix<F> killing_form() const {
    std::vector<Matrix<F>> ad(n, Matrix<F>(n, n));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (const auto& [k, c] : br[i][j]) ad[i](k, j) += c;
    Matrix<F> K(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        F s = FieldOps<F>::zero();
        Matrix<F> p = ad[i] * ad[j];
        for (int k = 0; k < n; ++k) s += p(k, k);
        K(i, j) = s;
      }
    return K;
  }
};

// PBW monomial: weakly increasing list of basis-symbol ids.
using Mono = std::vector<uint8_t>;

template <class F>
struct Elem {
  std::map<Mono, F> t;

  static Elem zero() { return Elem{}; }
  static Elem unit() {
    Elem e;
    e.t[{}] = FieldOps<F>::one();
    return e;
  }
  static Elem sym(int id) {
    Elem e;
    e.t[{uint8_t(id)}] = FieldOps<F>::one();
    return e;
  }

  bool is_zero() const { return t.empty(); }
  void add(const Mono& m, const F& c) {
    if (sphf::is_zero(c)) return;
    auto it = t.find(m);
    if (it == t.end()) {
      t.emplace(m, c);
    } else {
      it->second += c;
      if (sphf::is_zero(it->second)) t.erase(it);
    }
  }
  Elem& operator+=(const Elem& o) {
    for (const auto& [m, c] : o.t) add(m, c);
    return *this;
  }
  Elem& operator-=(const Elem& o) {
    for (const auto& [m, c] : o.t) add(m, -c);
    return *this;
  }
  friend Elem operator+(Elem a, const Elem& b) { return a += b; }
  friend Elem operator-(Elem a, const Elem& b) { return a -= b; }
  Elem operator-() const {
    Elem e;
    for (const auto& [m, c] : t) e.t.emplace(m, -c);
    return e;
  }
  Elem& scale(const F& s) {
    if (sphf::is_zero(s)) {
      t.clear();
      return *this;
    }
    for (auto& [m, c] : t) c *= s;
    return *this;
  }
  friend Elem operator*(const F& s, Elem a) { return a.scale(s); }
  friend bool operator==(const Elem& a, const Elem& b) { return a.t == b.t; }
};

// Enveloping-algebra arithmetic over a LieTable.  Normalization is plain PBW
// straightening driven by a worklist map, which merges duplicate intermediate
// words and needs no shared cache (safe under the parallel kernels).
template <class F>
class UEA {
 public:
  explicit UEA(const LieTable<F>* table) : L_(table) {}

  const LieTable<F>& table() const { return *L_; }

  Elem<F> straighten(const std::vector<uint8_t>& word, const F& coef) const {
    Elem<F> out;
    std::map<std::vector<uint8_t>, F> work;
    work.emplace(word, coef);
    while (!work.empty()) {
      auto it = work.begin();
      std::vector<uint8_t> w = it->first;
      F c = it->second;
      work.erase(it);
      if (sphf::is_zero(c)) continue;
      size_t i = 0;
      while (i + 1 < w.size() && w[i] <= w[i + 1]) ++i;
      if (i + 1 >= w.size()) {
        out.add(w, c);
        continue;
      }
      std::vector<uint8_t> sw = w;
      std::swap(sw[i], sw[i + 1]);
      {
        auto [pos, fresh] = work.emplace(sw, c);
        if (!fresh) pos->second += c;
      }
      for (const auto& [k, ck] : L_->br[w[i]][w[i + 1]]) {
        std::vector<uint8_t> red;
        red.reserve(w.size() - 1);
        red.insert(red.end(), w.begin(), w.begin() + i);
        red.push_back(uint8_t(k));
        red.insert(red.end(), w.begin() + i + 2, w.end());
        F cc = c * ck;
        auto [pos, fresh] = work.emplace(std::move(red), cc);
        if (!fresh) pos->second += cc;
      }
    }
    return out;
  }

  Elem<F> mul_mono(const Mono& a, const Mono& b) const {
    std::vector<uint8_t> w;
    w.reserve(a.size() + b.size());
    w.insert(w.end(), a.begin(), a.end());
    w.insert(w.end(), b.begin(), b.end());
    return straighten(w, FieldOps<F>::one());
  }

  Elem<F> mul(const Elem<F>& a, const Elem<F>& b) const {
    std::vector<std::pair<const std::pair<const Mono, F>*, const std::pair<const Mono, F>*>> prods;
    prods.reserve(a.t.size() * b.t.size());
    for (const auto& pa : a.t)
      for (const auto& pb : b.t) prods.emplace_back(&pa, &pb);
    return par::map_merge(
        prods.size(), Elem<F>::zero(),
        [&](Elem<F>& acc, size_t i) {
          const auto& [pa, pb] = prods[i];
          Elem<F> p = straighten_concat(pa->first, pb->first, pa->second * pb->second);
          acc += p;
        },
        [](Elem<F>& acc, Elem<F>&& o) { acc += o; }, 64);
  }

  std::vector<int> weight_of_mono(const Mono& m) const {
    std::vector<int> w(L_->rs->rank(), 0);
    for (uint8_t s : m)
      for (int i = 0; i < L_->rs->rank(); ++i) w[i] += L_->wt[s][i];
    return w;
  }

 private:
  Elem<F> straighten_concat(const Mono& a, const Mono& b, const F& c) const {
    std::vector<uint8_t> w;
    w.reserve(a.size() + b.size());
    w.insert(w.end(), a.begin(), a.end());
    w.insert(w.end(), b.begin(), b.end());
    return straighten(w, c);
  }

  const LieTable<F>* L_;
};

// U(g) with Chevalley-basis symbols ordered for PBW: negative roots by
// decreasing height, then h_1..h_r (h_i = t_{alpha_i}), then positive roots
// by increasing height.
template <class F>
class GAlg {
 public:
  static GAlg build(const RootSystem& rs);

  const RootSystem& rs() const { return *Lp_->rs; }
  const LieTable<F>& table() const { return *Lp_; }
  const UEA<F>& uea() const { return U_; }
  int dim() const { return Lp_->n; }
  int npos() const { return int(Lp_->rs->positive_roots().size()); }

  // id of e_root for any root (positive or negative), of h_i, of f_alpha
  int id_e(const std::vector<int>& root) const {
    auto it = root_id_.find(root);
    if (it == root_id_.end()) throw std::invalid_argument("not a root");
    return it->second;
  }
  int id_h(int i) const { return npos() + i; }
  int id_f(int pos_idx) const {
    std::vector<int> r = Lp_->rs->positive_roots()[pos_idx];
    for (int& x : r) x = -x;
    return id_e(r);
  }
  int id_ep(int pos_idx) const { return id_e(Lp_->rs->positive_roots()[pos_idx]); }
  bool is_h(int id) const { return id >= npos() && id < npos() + Lp_->rs->rank(); }
  bool is_pos_e(int id) const { return id >= npos() + Lp_->rs->rank(); }
  bool is_neg_e(int id) const { return id < npos(); }

  // t_lambda in the h-basis: t_{sum c_i alpha_i} = sum c_i h_i
  Elem<F> t_of(const WeightVec& w) const {
    WeightVec x = Lp_->rs->to_simple_root_basis(w);
    Elem<F> e;
    for (int i = 0; i < Lp_->rs->rank(); ++i)
      e += FieldOps<F>::from(x.c[i]) * Elem<F>::sym(id_h(i));
    return e;
  }

  // y_alpha = e_alpha - e_{-alpha} expanded in U(g); alpha a positive root index
  Elem<F> y_in_g(int pos_idx) const {
    return Elem<F>::sym(id_ep(pos_idx)) - Elem<F>::sym(id_f(pos_idx));
  }

  // quadratic Casimir sum_j x_j^2 + sum_{alpha in R} e_alpha e_{-alpha},
  // with the orthonormal-basis part realized as the Gram-inverse contraction
  Elem<F> casimir() const {
    Elem<F> om;
    const auto& gi = Lp_->rs->gram_inv();
    for (int i = 0; i < Lp_->rs->rank(); ++i)
      for (int j = 0; j < Lp_->rs->rank(); ++j) {
        if (sphf::is_zero(gi(i, j))) continue;
        om += FieldOps<F>::from(gi(i, j)) *
              U_.mul(Elem<F>::sym(id_h(i)), Elem<F>::sym(id_h(j)));
      }
    for (int p = 0; p < npos(); ++p) {
      om += U_.mul(Elem<F>::sym(id_ep(p)), Elem<F>::sym(id_f(p)));
      om += U_.mul(Elem<F>::sym(id_f(p)), Elem<F>::sym(id_ep(p)));
    }
    return om;
  }

  // second display of the Casimir: sum_j x_j^2 + 2 t_rho + 2 sum_{alpha>0} e_{-alpha} e_alpha
  Elem<F> casimir_second_form() const {
    Elem<F> om;
    const auto& gi = Lp_->rs->gram_inv();
    for (int i = 0; i < Lp_->rs->rank(); ++i)
      for (int j = 0; j < Lp_->rs->rank(); ++j) {
        if (sphf::is_zero(gi(i, j))) continue;
        om += FieldOps<F>::from(gi(i, j)) *
              U_.mul(Elem<F>::sym(id_h(i)), Elem<F>::sym(id_h(j)));
      }
    om += F(2) * t_of(Lp_->rs->rho());
    for (int p = 0; p < npos(); ++p)
      om += F(2) * U_.mul(Elem<F>::sym(id_f(p)), Elem<F>::sym(id_ep(p)));
    return om;
  }

  // Chevalley involution: theta(e_alpha) = -e_{-alpha}, theta|h = -id
  Elem<F> theta(const Elem<F>& x) const {
    Elem<F> out;
    for (const auto& [m, c] : x.t) {
      std::vector<uint8_t> w;
      w.reserve(m.size());
      for (uint8_t s : m) w.push_back(uint8_t(theta_sym_[s]));
      F sign = (m.size() % 2 == 0) ? FieldOps<F>::one() : -FieldOps<F>::one();
      out += U_.straighten(w, c * sign);
    }
    return out;
  }

  // the matrix realization the structure constants were detached from
  const std::vector<Matrix<F>>& defining_rep() const { return rep_; }

 private:
  std::unique_ptr<LieTable<F>> Lp_;
  UEA<F> U_{nullptr};
  std::map<std::vector<int>, int> root_id_;
  std::vector<int> theta_sym_;  // symbol image under theta (sign is (-1) each)
  std::vector<Matrix<F>> rep_;

  GAlg() = default;
};

// U(k) in the y-basis: symbols y_alpha for positive roots alpha, ordered by
// height then lex, with brackets derived from the g-table (k is closed).
template <class F>
class KAlg {
 public:
  static KAlg build(const GAlg<F>& g) {
    KAlg k;
    k.g_ = &g;
    k.Lp_ = std::make_unique<LieTable<F>>();
    auto& L = *k.Lp_;
    const auto& rs = g.rs();
    const int np = g.npos();
    L.rs = &rs;
    L.n = np;
    L.name.resize(np);
    L.wt.assign(np, std::vector<int>(rs.rank(), 0));  // y's are not h-weight vectors
    for (int p = 0; p < np; ++p) L.name[p] = "y[" + root_str(rs.positive_roots()[p]) + "]";
    L.br.assign(np, std::vector<std::vector<std::pair<int, F>>>(np));
    for (int a = 0; a < np; ++a)
      for (int b = 0; b < np; ++b) {
        if (a == b) continue;
        Elem<F> g_br = g.uea().mul(g.y_in_g(a), g.y_in_g(b)) -
                       g.uea().mul(g.y_in_g(b), g.y_in_g(a));
        // decompose in the y-basis: [y_a, y_b] = sum_c N_c y_c; k closes, so the
        // bracket is supported on single e-symbols pairing up as e_c - e_{-c}
        std::vector<std::pair<int, F>> row;
        Elem<F> rem = g_br;
        for (int c = 0; c < np; ++c) {
          Mono me{uint8_t(g.id_ep(c))};
          auto it = rem.t.find(me);
          if (it == rem.t.end()) continue;
          F coef = it->second;
          row.emplace_back(c, coef);
          rem -= coef * g.y_in_g(c);
        }
        if (!rem.is_zero()) throw std::logic_error("k is not closed: bracket residue");
        L.br[a][b] = std::move(row);
      }
    k.U_ = UEA<F>(k.Lp_.get());
    return k;
  }

  const LieTable<F>& table() const { return *Lp_; }
  const UEA<F>& uea() const { return U_; }
  const GAlg<F>& g() const { return *g_; }
  int npos() const { return Lp_->n; }

  // expand a y-monomial into U(g)
  Elem<F> expand_in_g(const Mono& m) const {
    Elem<F> out = Elem<F>::unit();
    for (uint8_t s : m) out = g_->uea().mul(out, g_->y_in_g(s));
    return out;
  }
  Elem<F> expand_in_g(const Elem<F>& x) const {
    Elem<F> out;
    for (const auto& [m, c] : x.t) out += c * expand_in_g(m);
    return out;
  }

  // antipode: anti-homomorphism with S(y) = -y
  Elem<F> antipode(const Elem<F>& x) const {
    Elem<F> out;
    for (const auto& [m, c] : x.t) {
      std::vector<uint8_t> w(m.rbegin(), m.rend());
      F sign = (m.size() % 2 == 0) ? FieldOps<F>::one() : -FieldOps<F>::one();
      out += U_.straighten(w, c * sign);
    }
    return out;
  }

 private:
  static std::string root_str(const std::vector<int>& r) {
    std::string s;
    for (size_t i = 0; i < r.size(); ++i) s += (i ? "," : "") + std::to_string(r[i]);
    return s;
  }
  std::unique_ptr<LieTable<F>> Lp_;
  UEA<F> U_{nullptr};
  const GAlg<F>* g_ = nullptr;
};

// --- tensor products of enveloping algebras -------------------------------

using TMono = std::vector<Mono>;

template <class F>
struct TElem {
  std::map<TMono, F> t;

  static TElem zero() { return TElem{}; }
  static TElem unit(int legs) {
    TElem e;
    e.t[TMono(size_t(legs))] = FieldOps<F>::one();
    return e;
  }
  bool is_zero() const { return t.empty(); }
  void add(const TMono& m, const F& c) {
    if (sphf::is_zero(c)) return;
    auto it = t.find(m);
    if (it == t.end()) {
      t.emplace(m, c);
    } else {
      it->second += c;
      if (sphf::is_zero(it->second)) t.erase(it);
    }
  }
  TElem& operator+=(const TElem& o) {
    for (const auto& [m, c] : o.t) add(m, c);
    return *this;
  }
  TElem& operator-=(const TElem& o) {
    for (const auto& [m, c] : o.t) add(m, -c);
    return *this;
  }
  friend TElem operator+(TElem a, const TElem& b) { return a += b; }
  friend TElem operator-(TElem a, const TElem& b) { return a -= b; }
  TElem operator-() const {
    TElem e;
    for (const auto& [m, c] : t) e.t.emplace(m, -c);
    return e;
  }
  TElem& scale(const F& s) {
    if (sphf::is_zero(s)) {
      t.clear();
      return *this;
    }
    for (auto& [m, c] : t) c *= s;
    return *this;
  }
  friend TElem operator*(const F& s, TElem a) { return a.scale(s); }
  friend bool operator==(const TElem& a, const TElem& b) { return a.t == b.t; }

  // place a single-algebra element into one leg of an (otherwise unit) tensor
  static TElem embed(const Elem<F>& x, int leg, int legs) {
    TElem e;
    for (const auto& [m, c] : x.t) {
      TMono tm((size_t(legs)));
      tm[size_t(leg)] = m;
      e.t.emplace(std::move(tm), c);
    }
    return e;
  }
};

// Leg-wise multiplication; each leg carries its own enveloping algebra.
template <class F>
class TensorAlg {
 public:
  explicit TensorAlg(std::vector<const UEA<F>*> legs) : legs_(std::move(legs)) {}

  int nlegs() const { return int(legs_.size()); }
  const UEA<F>& leg(int i) const { return *legs_[size_t(i)]; }

  TElem<F> mul(const TElem<F>& a, const TElem<F>& b) const {
    std::vector<std::pair<const std::pair<const TMono, F>*, const std::pair<const TMono, F>*>>
        prods;
    prods.reserve(a.t.size() * b.t.size());
    for (const auto& pa : a.t)
      for (const auto& pb : b.t) prods.emplace_back(&pa, &pb);
    return par::map_merge(
        prods.size(), TElem<F>::zero(),
        [&](TElem<F>& acc, size_t idx) {
          const auto& [pa, pb] = prods[idx];
          acc += mono_prod(pa->first, pb->first, pa->second * pb->second);
        },
        [](TElem<F>& acc, TElem<F>&& o) { acc += o; }, 32);
  }

  TElem<F> commutator(const TElem<F>& a, const TElem<F>& b) const {
    return mul(a, b) - mul(b, a);
  }

 private:
  TElem<F> mono_prod(const TMono& a, const TMono& b, const F& c) const {
    TElem<F> acc;
    acc.t[TMono(a.size())] = c;
    for (size_t l = 0; l < a.size(); ++l) {
      Elem<F> p = legs_[l]->mul_mono(a[l], b[l]);
      TElem<F> next;
      for (const auto& [tm, tc] : acc.t)
        for (const auto& [m, mc] : p.t) {
          TMono nm = tm;
          nm[l] = m;
          next.add(nm, tc * mc);
        }
      acc = std::move(next);
    }
    return acc;
  }

  std::vector<const UEA<F>*> legs_;
};

// (N-1)-fold iterated coproduct of U(k) into U(k)^{otimes N}: primitive on y's.
template <class F>
TElem<F> coproduct_iter(const KAlg<F>& k, const Elem<F>& x, int nlegs) {
  TElem<F> out;
  for (const auto& [m, c] : x.t) {
    TElem<F> acc;
    acc.t[TMono(size_t(nlegs))] = c;
    for (uint8_t s : m) {
      TElem<F> next;
      for (const auto& [tm, tc] : acc.t)
        for (int l = 0; l < nlegs; ++l) {
          TMono nm = tm;
          nm[size_t(l)].push_back(s);  // appended in word order; legs stay sorted
          next.add(nm, tc);
        }
      acc = std::move(next);
    }
    out += acc;
  }
  return out;
}

// --- construction of the g-table from a faithful matrix realization --------

template <class F>
GAlg<F> GAlg<F>::build(const RootSystem& rs) {
  GAlg<F> g;
  const int r = rs.rank();
  const int np = int(rs.positive_roots().size());
  const int n = 2 * np + r;

  // defining-representation matrices for each basis symbol
  std::vector<Matrix<F>> rep;
  rep.resize(size_t(n));
  auto E = [](int dim, int i, int j, const F& c) {
    Matrix<F> m(dim, dim);
    m(i, j) = c;
    return m;
  };

  std::vector<std::vector<int>> neg_order;  // negative roots by decreasing height
  for (int p = np - 1; p >= 0; --p) {
    std::vector<int> root = rs.positive_roots()[p];
    for (int& x : root) x = -x;
    neg_order.push_back(root);
  }

  auto sym_index = [&](bool neg, int pos_idx) {
    return neg ? (np - 1 - pos_idx) : (np + r + pos_idx);
  };

  if (rs.type() == CartanType::A1) {
    // e_alpha = E/2, e_{-alpha} = F/2, h_1 = t_alpha = H/4
    const F half = FieldOps<F>::from(Rational(1, 2));
    rep[size_t(sym_index(false, 0))] = E(2, 0, 1, half);
    rep[size_t(sym_index(true, 0))] = E(2, 1, 0, half);
    Matrix<F> h(2, 2);
    h(0, 0) = FieldOps<F>::from(Rational(1, 4));
    h(1, 1) = FieldOps<F>::from(Rational(-1, 4));
    rep[size_t(np)] = h;
  } else if (rs.type() == CartanType::A2) {
    // e_alpha = E_ij / sqrt(6); needs sqrt(6) in the scalar field
    auto s6 = FieldOps<F>::from_sqrt_int(6);
    if (!s6) throw std::invalid_argument("A2 structure constants need sqrt(6) in the scalar field");
    F c = FieldOps<F>::one() / *s6;
    auto entry = [&](const std::vector<int>& root) -> std::pair<int, int> {
      // alpha_1 = E12-row, alpha_2 = E23-row, alpha_1+alpha_2 = E13-row
      if (root == std::vector<int>{1, 0}) return {0, 1};
      if (root == std::vector<int>{0, 1}) return {1, 2};
      if (root == std::vector<int>{1, 1}) return {0, 2};
      throw std::logic_error("unexpected A2 root");
    };
    for (int p = 0; p < np; ++p) {
      auto [i, j] = entry(rs.positive_roots()[p]);
      rep[size_t(sym_index(false, p))] = E(3, i, j, c);
      rep[size_t(sym_index(true, p))] = E(3, j, i, c);
    }
    // h_i = t_{alpha_i} = (E_ii - E_{i+1,i+1})/6
    for (int i = 0; i < r; ++i) {
      Matrix<F> h(3, 3);
      h(i, i) = FieldOps<F>::from(Rational(1, 6));
      h(i + 1, i + 1) = FieldOps<F>::from(Rational(-1, 6));
      rep[size_t(np + i)] = h;
    }
  } else {
    throw std::invalid_argument("unsupported type for envalg structure constants: " +
                                rootdata::cartan_type_name(rs.type()));
  }

  const int d = rep[0].rows();
  // decompose arbitrary matrices over the basis by exact solve
  Matrix<F> basis_flat(d * d, n);
  for (int s = 0; s < n; ++s)
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) basis_flat(i * d + j, s) = rep[size_t(s)](i, j);
  auto decompose = [&](const Matrix<F>& m) {
    Matrix<F> rhs(d * d, 1);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) rhs(i * d + j, 0) = m(i, j);
    auto x = Matrix<F>::solve(basis_flat, rhs);
    if (!x) throw std::logic_error("matrix outside the Lie algebra span");
    return *x;
  };

  g.Lp_ = std::make_unique<LieTable<F>>();
  auto& L = *g.Lp_;
  L.rs = &rs;
  L.n = n;
  L.name.resize(size_t(n));
  L.wt.assign(size_t(n), std::vector<int>(size_t(r), 0));
  for (int p = 0; p < np; ++p) {
    g.root_id_[rs.positive_roots()[p]] = sym_index(false, p);
    std::vector<int> nr = rs.positive_roots()[p];
    for (int& x : nr) x = -x;
    g.root_id_[nr] = sym_index(true, p);
    L.wt[size_t(sym_index(false, p))] = rs.positive_roots()[p];
    L.wt[size_t(sym_index(true, p))] = nr;
  }
  for (int s = 0; s < n; ++s) {
    if (s < np) L.name[size_t(s)] = "f" + std::to_string(np - s);
    else if (s < np + r) L.name[size_t(s)] = "h" + std::to_string(s - np + 1);
    else L.name[size_t(s)] = "e" + std::to_string(s - np - r + 1);
  }

  L.br.assign(size_t(n), std::vector<std::vector<std::pair<int, F>>>(size_t(n)));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      Matrix<F> c = rep[size_t(i)] * rep[size_t(j)] - rep[size_t(j)] * rep[size_t(i)];
      Matrix<F> x = decompose(c);
      std::vector<std::pair<int, F>> row;
      for (int k = 0; k < n; ++k)
        if (!sphf::is_zero(x(k, 0))) row.emplace_back(k, x(k, 0));
      L.br[size_t(i)][size_t(j)] = std::move(row);
    }

  g.theta_sym_.resize(size_t(n));
  for (int p = 0; p < np; ++p) {
    g.theta_sym_[size_t(sym_index(false, p))] = sym_index(true, p);
    g.theta_sym_[size_t(sym_index(true, p))] = sym_index(false, p);
  }
  for (int i = 0; i < r; ++i) g.theta_sym_[size_t(np + i)] = np + i;

  g.rep_ = std::move(rep);
  g.U_ = UEA<F>(g.Lp_.get());
  return g;
}

}  // namespace sphf::envalg

namespace sphf {
template <class F>
struct CoeffField<envalg::Elem<F>> {
  using type = F;
};
template <class F>
struct CoeffField<envalg::TElem<F>> {
  using type = F;
};
}  // namespace sphf
