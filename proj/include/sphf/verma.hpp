#pragma once

#include <map>
#include <stdexcept>
#include <vector>

#include "sphf/envalg.hpp"
#include "sphf/fseries.hpp"

namespace sphf::verma {

using envalg::Elem;
using envalg::GAlg;
using envalg::Mono;
using fseries::Expo;
using rootdata::RootSystem;
using rootdata::WeightVec;

struct DepthOverflow : std::runtime_error {
  DepthOverflow() : std::runtime_error("verma: action exceeds truncation depth") {}
};

// vector in a (truncated) highest-weight module: weight offset -> coordinates
template <class F>
struct ModVec {
  std::map<Expo, std::vector<F>> comp;

  bool is_zero() const { return comp.empty(); }
  void prune() {
    for (auto it = comp.begin(); it != comp.end();) {
      bool all0 = true;
      for (const auto& x : it->second)
        if (!sphf::is_zero(x)) {
          all0 = false;
          break;
        }
      if (all0) it = comp.erase(it);
      else ++it;
    }
  }
};

// Verma module M_lambda truncated at depth m: per-weight PBW bases of
// f-monomials, exact generator actions, Shapovalov forms.
template <class F>
class VermaModule {
 public:
  VermaModule(const GAlg<F>& g, WeightVec lambda, int depth)
      : g_(&g), lam_(g.rs().to_simple_root_basis(lambda)), m_(depth) {
    const auto& rs = g.rs();
    for (const auto& gamma : rs.enumerate_qminus(m_)) {
      std::vector<Mono> monos;
      Mono cur;
      enumerate(gamma, 0, cur, monos);
      std::sort(monos.begin(), monos.end());
      auto& slot = basis_[gamma];
      slot = std::move(monos);
      auto& idx = index_[gamma];
      for (size_t i = 0; i < slot.size(); ++i) idx[slot[i]] = int(i);
    }
  }

  const GAlg<F>& g() const { return *g_; }
  const RootSystem& rs() const { return g_->rs(); }
  const WeightVec& highest_weight() const { return lam_; }
  int depth() const { return m_; }

  const std::vector<Mono>& weight_basis(const Expo& gamma) const {
    auto it = basis_.find(gamma);
    if (it == basis_.end()) throw DepthOverflow();
    return it->second;
  }
  int dim_at(const Expo& gamma) const {
    auto it = basis_.find(gamma);
    return it == basis_.end() ? 0 : int(it->second.size());
  }
  bool in_range(const Expo& gamma) const { return basis_.count(gamma) != 0; }

  ModVec<F> highest_vector() const {
    ModVec<F> v;
    Expo zero(size_t(rs().rank()), 0);
    v.comp[zero] = std::vector<F>{FieldOps<F>::one()};
    return v;
  }

  ModVec<F> basis_vector(const Expo& gamma, int i) const {
    ModVec<F> v;
    auto& slot = v.comp[gamma];
    slot.assign(weight_basis(gamma).size(), FieldOps<F>::zero());
    slot[size_t(i)] = FieldOps<F>::one();
    return v;
  }

  // act by an arbitrary element of U(g); throws DepthOverflow if any
  // resulting weight leaves the truncation range
  ModVec<F> act(const Elem<F>& x, const ModVec<F>& v) const {
    ModVec<F> out;
    for (const auto& [gamma, coords] : v.comp) {
      const auto& monos = weight_basis(gamma);
      for (size_t i = 0; i < coords.size(); ++i) {
        if (sphf::is_zero(coords[size_t(i)])) continue;
        Elem<F> prod = g_->uea().mul(x, mono_elem(monos[i]));
        push_to_highest(prod, coords[i], out);
      }
    }
    out.prune();
    return out;
  }

  ModVec<F> act_symbol(int sym, const ModVec<F>& v) const {
    return act(Elem<F>::sym(sym), v);
  }

  // matrix of x mapping the weight space at gamma_from into gamma_to
  Matrix<F> action_block(const Elem<F>& x, const Expo& gamma_from, const Expo& gamma_to) const {
    const auto& from = weight_basis(gamma_from);
    const auto& to = weight_basis(gamma_to);
    Matrix<F> mat(int(to.size()), int(from.size()));
    for (size_t j = 0; j < from.size(); ++j) {
      ModVec<F> img = act(x, basis_vector(gamma_from, int(j)));
      auto it = img.comp.find(gamma_to);
      if (it == img.comp.end()) continue;
      for (size_t i = 0; i < it->second.size(); ++i) mat(int(i), int(j)) = it->second[i];
    }
    return mat;
  }

  // Shapovalov form B(u, v) for u a basis monomial, v a module vector of the
  // same weight; contravariance B(x u, v) = -B(u, theta(x) v) peels one
  // f-symbol at a time: B(f_p u', v) = B(u', e_p v)
  F shapovalov_pair(const Mono& u, const ModVec<F>& v) const {
    if (u.empty()) {
      Expo zero(size_t(rs().rank()), 0);
      auto it = v.comp.find(zero);
      if (it == v.comp.end() || it->second.empty()) return FieldOps<F>::zero();
      return it->second[0];
    }
    int p = g_->npos() - 1 - int(u[0]);  // f-symbol id -> positive root index
    Mono rest(u.begin() + 1, u.end());
    return shapovalov_pair(rest, act(Elem<F>::sym(g_->id_ep(p)), v));
  }

  Matrix<F> shapovalov_gram(const Expo& gamma) const {
    const auto& monos = weight_basis(gamma);
    Matrix<F> gm(int(monos.size()), int(monos.size()));
    for (size_t i = 0; i < monos.size(); ++i)
      for (size_t j = 0; j < monos.size(); ++j)
        gm(int(i), int(j)) = shapovalov_pair(monos[i], basis_vector(gamma, int(j)));
    return gm;
  }

  // lambda(h) for the h-part of a PBW word, exact
  F eval_h_word(const Mono& hpart) const {
    Rational v(1);
    for (uint8_t s : hpart) {
      int i = int(s) - g_->npos();
      std::vector<int> ei(size_t(rs().rank()), 0);
      ei[size_t(i)] = 1;
      v *= rs().pairing(lam_, rs().weight_of_root(ei));
    }
    return FieldOps<F>::from(v);
  }

  static Elem<F> mono_elem(const Mono& mono) {
    Elem<F> e;
    e.t[mono] = FieldOps<F>::one();
    return e;
  }

 private:
  void enumerate(const Expo& gamma, int next_pos, Mono& cur, std::vector<Mono>& out) const {
    const auto& rs = g_->rs();
    bool zero = true;
    for (int x : gamma)
      if (x != 0) zero = false;
    if (zero) {
      Mono sorted = cur;
      std::sort(sorted.begin(), sorted.end());
      out.push_back(sorted);
      return;
    }
    for (int p = next_pos; p < g_->npos(); ++p) {
      const auto& root = rs.positive_roots()[size_t(p)];
      Expo rest = gamma;
      bool ok = true;
      for (int i = 0; i < rs.rank(); ++i) {
        rest[size_t(i)] += root[size_t(i)];
        if (rest[size_t(i)] > 0) ok = false;
      }
      if (!ok) continue;
      cur.push_back(uint8_t(g_->id_f(p)));
      enumerate(rest, p, cur, out);
      cur.pop_back();
    }
  }

  // expand prod * m_lambda into weight components of the truncated module
  void push_to_highest(const Elem<F>& prod, const F& scale, ModVec<F>& out) const {
    const int np = g_->npos();
    const int r = rs().rank();
    for (const auto& [word, c] : prod.t) {
      size_t i = 0;
      while (i < word.size() && int(word[i]) < np) ++i;
      size_t j = i;
      while (j < word.size() && int(word[j]) < np + r) ++j;
      if (j < word.size()) continue;  // positive-root symbol kills m_lambda
      Mono fpart(word.begin(), word.begin() + i);
      Mono hpart(word.begin() + i, word.begin() + j);
      F val = c * scale * eval_h_word(hpart);
      if (sphf::is_zero(val)) continue;
      Expo gamma = g_->uea().weight_of_mono(fpart);
      auto bit = basis_.find(gamma);
      if (bit == basis_.end()) throw DepthOverflow();
      auto& slot = out.comp[gamma];
      if (slot.empty()) slot.assign(bit->second.size(), FieldOps<F>::zero());
      slot[size_t(index_.at(gamma).at(fpart))] += val;
    }
  }

  const GAlg<F>* g_;
  WeightVec lam_;
  int m_;
  std::map<Expo, std::vector<Mono>> basis_;
  std::map<Expo, std::map<Mono, int>> index_;
};

// finite dimensional module with exact generator matrices, weight-block basis
template <class F>
struct FinDimModule {
  const GAlg<F>* g = nullptr;
  WeightVec hw;                     // highest weight
  std::vector<Expo> offsets;        // per block, offset from hw (in Q_-)
  std::vector<int> dims;            // per block
  std::vector<int> starts;          // block start index in the flat basis
  int dim_total = 0;
  std::vector<Matrix<F>> sym_mat;   // per g-basis symbol, dim_total^2
  std::vector<Expo> wt_off;         // per flat index, weight offset from hw

  int block_of_offset(const Expo& g_off) const {
    for (size_t b = 0; b < offsets.size(); ++b)
      if (offsets[b] == g_off) return int(b);
    return -1;
  }

  WeightVec weight_of_block(int b) const {
    WeightVec w = g->rs().to_simple_root_basis(hw);
    for (int i = 0; i < g->rs().rank(); ++i) w.c[size_t(i)] += offsets[size_t(b)][size_t(i)];
    return w;
  }

  int block_of_index(int i) const {
    for (size_t b = 0; b < starts.size(); ++b)
      if (i >= starts[b] && i < starts[b] + dims[b]) return int(b);
    return -1;
  }

  Matrix<F> act_elem(const Elem<F>& x) const {
    Matrix<F> out(dim_total, dim_total);
    for (const auto& [word, c] : x.t) {
      Matrix<F> acc = Matrix<F>::identity(dim_total);
      for (uint8_t s : word) acc = acc * sym_mat[size_t(s)];
      out += c * acc;
    }
    return out;
  }

  Matrix<F> y_matrix(int pos_idx) const {
    return sym_mat[size_t(g->id_ep(pos_idx))] - sym_mat[size_t(g->id_f(pos_idx))];
  }
};

// tensor product module on the kron-flattened basis (index i1*dim2 + i2)
template <class F>
FinDimModule<F> tensor_product(const FinDimModule<F>& a, const FinDimModule<F>& b) {
  FinDimModule<F> out;
  out.g = a.g;
  out.hw = a.hw + b.hw;
  out.dim_total = a.dim_total * b.dim_total;
  out.wt_off.resize(size_t(out.dim_total));
  for (int i = 0; i < a.dim_total; ++i)
    for (int j = 0; j < b.dim_total; ++j) {
      Expo w = a.wt_off[size_t(i)];
      for (size_t k = 0; k < w.size(); ++k) w[k] += b.wt_off[size_t(j)][k];
      out.wt_off[size_t(i * b.dim_total + j)] = std::move(w);
    }
  Matrix<F> ia = Matrix<F>::identity(a.dim_total), ib = Matrix<F>::identity(b.dim_total);
  for (int s = 0; s < a.g->dim(); ++s)
    out.sym_mat.push_back(kron(a.sym_mat[size_t(s)], ib) + kron(ia, b.sym_mat[size_t(s)]));
  // block data is left empty: tensor bases are not weight-contiguous
  return out;
}

// trivial one-dimensional module
template <class F>
FinDimModule<F> trivial_module(const GAlg<F>& g) {
  FinDimModule<F> out;
  out.g = &g;
  out.hw = WeightVec(std::vector<Rational>(size_t(g.rs().rank()), Rational(0)));
  out.dim_total = 1;
  out.offsets = {Expo(size_t(g.rs().rank()), 0)};
  out.dims = {1};
  out.starts = {0};
  out.wt_off = {Expo(size_t(g.rs().rank()), 0)};
  out.sym_mat.assign(size_t(g.dim()), Matrix<F>(1, 1));
  return out;
}


// irreducible quotient of the truncated Verma module by the per-weight
// Shapovalov radical; fails if the truncation depth cannot exhaust the
// weight support of L_mu
template <class F>
FinDimModule<F> irrep(const GAlg<F>& g, const WeightVec& mu_in, int depth) {
  const auto& rs = g.rs();
  WeightVec mu = rs.to_simple_root_basis(mu_in);
  for (const auto& a : rs.positive_roots()) {
    Rational p = rs.coroot_pairing(mu, a);
    if (p.get_den() != 1 || sgn(p) < 0)
      throw std::invalid_argument("irrep: highest weight not dominant integral");
  }
  VermaModule<F> M(g, mu, depth);

  // quotient data per weight: representative monomial indices + gram
  struct Block {
    Expo gamma;
    std::vector<int> reps;   // pivot columns of the gram
    Matrix<F> gram;          // full gram at this weight
  };
  std::vector<Block> blocks;
  int max_support = -1;
  for (const auto& gamma : rs.enumerate_qminus(depth)) {
    Matrix<F> gm = M.shapovalov_gram(gamma);
    Matrix<F> red = gm;
    std::vector<int> piv = red.rref();
    if (piv.empty()) continue;
    blocks.push_back({gamma, piv, gm});
    max_support = std::max(max_support, fseries::ht_drop(gamma));
  }
  // the support of L_mu occupies contiguous heights; demand enough headroom
  // that every generator action from the top support level stays in range
  int maxht = 0;
  for (int x : rs.positive_roots().back()) maxht += x;
  if (max_support + maxht > depth)
    throw std::invalid_argument("irrep: truncation depth does not exhaust the weight support");

  FinDimModule<F> U;
  U.g = &g;
  U.hw = mu;
  for (const auto& b : blocks) {
    U.starts.push_back(U.dim_total);
    U.offsets.push_back(b.gamma);
    U.dims.push_back(int(b.reps.size()));
    U.dim_total += int(b.reps.size());
    for (size_t k = 0; k < b.reps.size(); ++k) U.wt_off.push_back(b.gamma);
  }

  // project a Verma vector at weight gamma onto quotient coordinates:
  // solve G[:,reps] x = G u
  auto project = [&](const Block& b, const std::vector<F>& u) {
    int n = b.gram.rows();
    Matrix<F> gu(n, 1);
    for (int i = 0; i < n; ++i) {
      F s = FieldOps<F>::zero();
      for (int j = 0; j < n; ++j) s += b.gram(i, j) * u[size_t(j)];
      gu(i, 0) = s;
    }
    Matrix<F> gp(n, int(b.reps.size()));
    for (int i = 0; i < n; ++i)
      for (size_t k = 0; k < b.reps.size(); ++k) gp(i, int(k)) = b.gram(i, b.reps[k]);
    auto x = Matrix<F>::solve(gp, gu);
    if (!x) throw std::logic_error("irrep: projection solve failed");
    return *x;
  };

  U.sym_mat.assign(size_t(g.dim()), Matrix<F>(U.dim_total, U.dim_total));
  for (int s = 0; s < g.dim(); ++s) {
    Matrix<F>& mat = U.sym_mat[size_t(s)];
    for (size_t b = 0; b < blocks.size(); ++b) {
      for (size_t k = 0; k < blocks[b].reps.size(); ++k) {
        ModVec<F> img = M.act_symbol(s, M.basis_vector(blocks[b].gamma, blocks[b].reps[k]));
        int col = U.starts[b] + int(k);
        for (const auto& [gto, coords] : img.comp) {
          int tb = -1;
          for (size_t bb = 0; bb < blocks.size(); ++bb)
            if (blocks[bb].gamma == gto) tb = int(bb);
          if (tb < 0) {
            // image lands in a weight with zero quotient: must be radical
            Matrix<F> gm = M.shapovalov_gram(gto);
            Matrix<F> uvec(int(coords.size()), 1);
            for (size_t i = 0; i < coords.size(); ++i) uvec(int(i), 0) = coords[i];
            Matrix<F> gu = gm * uvec;
            if (!gu.zero()) throw std::logic_error("irrep: action escapes the quotient support");
            continue;
          }
          Matrix<F> x = project(blocks[size_t(tb)], coords);
          for (int i = 0; i < x.rows(); ++i) mat(U.starts[size_t(tb)] + i, col) += x(i, 0);
        }
      }
    }
  }
  return U;
}

}  // namespace sphf::verma
