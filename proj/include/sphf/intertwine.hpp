#pragma once

#include <functional>
#include <map>
#include <memory>
#include <stdexcept>
#include <vector>

#include "sphf/verma.hpp"

namespace sphf::intertwine {

using envalg::Elem;
using envalg::GAlg;
using envalg::KAlg;
using envalg::Mono;
using fseries::Expo;
using rootdata::RootSystem;
using rootdata::WeightVec;
using verma::FinDimModule;
using verma::ModVec;
using verma::VermaModule;

struct NonGenericWeight : std::runtime_error {
  Expo gamma;
  explicit NonGenericWeight(Expo g)
      : std::runtime_error("solve failed: weight is non-generic at the given depth"),
        gamma(std::move(g)) {}
};

// finite dimensional U(k)-module: matrices for the y_alpha, alpha > 0
template <class F>
struct KRep {
  int dim = 0;
  std::vector<Matrix<F>> y;  // per positive-root index

  static KRep character(const RootSystem& rs, const F& nu) {
    // one-dimensional characters: rank one (ch(k_0) spans), or trivial
    if (rs.rank() > 1 && !sphf::is_zero(nu))
      throw std::invalid_argument("nontrivial k-characters exist only in rank one here");
    KRep k;
    k.dim = 1;
    for (size_t p = 0; p < rs.positive_roots().size(); ++p) {
      Matrix<F> m(1, 1);
      m(0, 0) = nu;
      k.y.push_back(m);
    }
    return k;
  }

  static KRep from_findim(const FinDimModule<F>& U) {
    KRep k;
    k.dim = U.dim_total;
    for (int p = 0; p < U.g->npos(); ++p) k.y.push_back(U.y_matrix(p));
    return k;
  }

  // dual module: y acts by -y^T
  KRep dual() const {
    KRep k;
    k.dim = dim;
    for (const auto& m : y) k.y.push_back(-m.transpose());
    return k;
  }

  // act by a U(k) element in the y-PBW basis
  Matrix<F> act_kelem(const Elem<F>& x) const {
    Matrix<F> out(dim, dim);
    for (const auto& [word, c] : x.t) {
      Matrix<F> acc = Matrix<F>::identity(dim);
      for (uint8_t s : word) acc = acc * y[size_t(s)];
      out += c * acc;
    }
    return out;
  }
};

// weight-graded blocks of an intertwiner
template <class F>
using GradedBlocks = std::map<Expo, Matrix<F>>;

// phi_ell in Hom_k(M_lambda, V): unique with phi(m_lambda) = v, built depth by
// depth from M_lambda = U(k) m_lambda: for a basis monomial f_p w,
//   phi(f_p w m) = phi(e_p (w m)) - sigma(y_p) phi(w m).
// Blocks map M_lambda[lam+gamma] -> V.
template <class F>
GradedBlocks<F> phi_left(const VermaModule<F>& M, const KRep<F>& V, const std::vector<F>& v0,
                         int m) {
  const auto& g = M.g();
  const auto& rs = M.rs();
  GradedBlocks<F> B;
  Expo zero(size_t(rs.rank()), 0);
  Matrix<F> b0(V.dim, 1);
  for (int i = 0; i < V.dim; ++i) b0(i, 0) = v0[size_t(i)];
  B[zero] = b0;

  auto phi_of = [&](const ModVec<F>& u) {
    Matrix<F> out(V.dim, 1);
    for (const auto& [go, coords] : u.comp) {
      const Matrix<F>& blk = B.at(go);
      for (size_t i = 0; i < coords.size(); ++i) {
        if (sphf::is_zero(coords[i])) continue;
        for (int r = 0; r < V.dim; ++r) out(r, 0) += blk(r, int(i)) * coords[i];
      }
    }
    return out;
  };

  for (const auto& gamma : rs.enumerate_qminus(m)) {
    if (gamma == zero) continue;
    const auto& monos = M.weight_basis(gamma);
    Matrix<F> blk(V.dim, int(monos.size()));
    for (size_t j = 0; j < monos.size(); ++j) {
      const Mono& w = monos[j];
      int p = g.npos() - 1 - int(w[0]);  // leading f-symbol
      Mono rest(w.begin() + 1, w.end());
      Expo grest = g.uea().weight_of_mono(rest);
      int rest_idx = -1;
      {
        const auto& rb = M.weight_basis(grest);
        for (size_t i = 0; i < rb.size(); ++i)
          if (rb[i] == rest) rest_idx = int(i);
      }
      ModVec<F> erest = M.act(Elem<F>::sym(g.id_ep(p)), M.basis_vector(grest, rest_idx));
      Matrix<F> col = phi_of(erest);
      Matrix<F> prev(V.dim, 1);
      {
        const Matrix<F>& rb = B.at(grest);
        for (int r = 0; r < V.dim; ++r) prev(r, 0) = rb(r, rest_idx);
      }
      col -= V.y[size_t(p)] * prev;
      for (int r = 0; r < V.dim; ++r) blk(r, int(j)) = col(r, 0);
    }
    B[gamma] = std::move(blk);
  }
  return B;
}

// phi_r in Hom_k(V, bar M_lambda) with highest-weight component f0 (a row
// over V), solved depth by depth from the equivariance conditions
//   e_p C_gamma = C_{gamma+alpha_p} sigma(y_p) + f_p C_{gamma+2alpha_p}.
// Blocks map V -> M_lambda[lam+gamma].
template <class F>
GradedBlocks<F> phi_right(const VermaModule<F>& M, const KRep<F>& V, const std::vector<F>& f0,
                          int m) {
  const auto& g = M.g();
  const auto& rs = M.rs();
  GradedBlocks<F> C;
  Expo zero(size_t(rs.rank()), 0);
  Matrix<F> c0(1, V.dim);
  for (int i = 0; i < V.dim; ++i) c0(0, i) = f0[size_t(i)];
  C[zero] = c0;

  auto shifted = [&](const Expo& gamma, const std::vector<int>& root, int k) {
    Expo out = gamma;
    for (int i = 0; i < rs.rank(); ++i) out[size_t(i)] += k * root[size_t(i)];
    return out;
  };
  auto in_qminus = [&](const Expo& gamma) {
    for (int x : gamma)
      if (x > 0) return false;
    return true;
  };

  for (const auto& gamma : rs.enumerate_qminus(m)) {
    if (gamma == zero) continue;
    int dimg = M.dim_at(gamma);
    int rows = 0;
    std::vector<std::pair<int, Expo>> eqs;  // (positive root index, target weight)
    for (int p = 0; p < g.npos(); ++p) {
      Expo up = shifted(gamma, rs.positive_roots()[size_t(p)], +1);
      if (!in_qminus(up)) continue;
      eqs.emplace_back(p, up);
      rows += M.dim_at(up);
    }
    Matrix<F> A(rows, dimg), Rhs(rows, V.dim);
    int at = 0;
    for (const auto& [p, up] : eqs) {
      Matrix<F> eblk = M.action_block(Elem<F>::sym(g.id_ep(p)), gamma, up);
      for (int i = 0; i < eblk.rows(); ++i)
        for (int j = 0; j < dimg; ++j) A(at + i, j) = eblk(i, j);
      // rhs: C_{gamma+alpha} sigma(y_p) + f_p C_{gamma+2alpha}
      Matrix<F> rhs = C.at(up) * V.y[size_t(p)];
      Expo upp = shifted(gamma, rs.positive_roots()[size_t(p)], +2);
      if (in_qminus(upp)) {
        Matrix<F> fblk = M.action_block(Elem<F>::sym(g.id_f(p)), upp, up);
        rhs += fblk * C.at(upp);
      }
      for (int i = 0; i < rhs.rows(); ++i)
        for (int j = 0; j < V.dim; ++j) Rhs(at + i, j) = rhs(i, j);
      at += eblk.rows();
    }
    auto X = Matrix<F>::solve(A, Rhs);
    if (!X) throw NonGenericWeight(gamma);
    C[gamma] = *X;
  }
  return C;
}

// independent rank-one construction of the same object through the Casimir
// recursion: a chi_nu-invariant vector in the completed Verma module makes the
// a-dependent Casimir factorization act by (lam,lam+2rho) for every a, which
// pins its weight components.  Used as a cross-check oracle for phi_right.
template <class F>
GradedBlocks<F> chi_invariant_vector(const VermaModule<F>& M, const F& nu, int m) {
  const auto& rs = M.rs();
  if (rs.type() != rootdata::CartanType::A1)
    throw std::invalid_argument("chi-invariant recursion is a rank-one construction");
  // scalar sl2 coordinates: lam_c = lam(H), weights drop by 2 per depth
  Rational lam_c = 2 * rs.to_simple_root_basis(M.highest_weight()).c[0];
  // operators on the coefficient sequence (c_n), v = sum c_n f^n m:
  //   t b_n = tau_n b_n, e b_n = eps_n b_{n-1}, f b_n = b_{n+1}
  auto tau = [&](int n) { return FieldOps<F>::from((lam_c - 2 * n) / 4); };
  auto eps = [&](int n) { return FieldOps<F>::from(Rational(n) * (lam_c - n + 1) / 4); };
  F c_cas = FieldOps<F>::from(lam_c * (lam_c + 2) / 8);

  // identity multiplied by (1-q^2)^2, q = a^{-alpha}; polynomial in q with
  // operator coefficients; rows indexed by (q-power j, depth k)
  // (1-q^2)^2 (2t^2 - c) + (1+q^2)(1-q^2) t
  //   + 2 q^4 e^2 - 2 q^2 (ef + fe) + 2 f^2
  //   - 2 nu (q^4 + q^2) e + 2 nu (q^2 + 1) f + 2 nu^2 q^2  = 0
  // solve an extended window so every kept equation row only references
  // represented unknowns: unknowns c_0..c_mm, rows (q^j, b_k) with k <= mm-2
  const int J = 5;  // q-powers 0..4
  const int mm = std::max(m + 2, 4);
  int unknowns = mm + 1;
  int rows = J * (mm - 1);
  Matrix<F> A(rows + 1, unknowns), Rhs(rows + 1, 1);
  auto row_of = [&](int j, int k) { return j * (mm - 1) + k; };
  auto addc = [&](int j, int k, int n, const F& coef) {
    if (k < 0 || k > mm - 2 || j < 0 || j >= J) return;
    if (n < 0 || n > mm) throw std::logic_error("chi recursion: unknown out of window");
    A(row_of(j, k), n) += coef;
  };
  F two = FieldOps<F>::from(Rational(2));
  for (int n = 0; n <= mm; ++n) {
    // (1-2q^2+q^4)(2 t^2 - c) b_n
    F d0 = two * tau(n) * tau(n) - c_cas;
    for (auto [j, sgn2] : {std::pair{0, 1}, std::pair{2, -2}, std::pair{4, 1}})
      addc(j, n, n, F(sgn2) * d0);
    // (1 - q^4) t b_n
    addc(0, n, n, tau(n));
    addc(4, n, n, -tau(n));
    // 2 q^4 e^2
    addc(4, n - 2, n, two * eps(n) * eps(n - 1));
    // -2 q^2 (ef + fe)
    addc(2, n, n, -two * (eps(n + 1) + eps(n)));
    // 2 f^2
    addc(0, n + 2, n, two);
    // -2 nu (q^4 + q^2) e
    addc(4, n - 1, n, -two * nu * eps(n));
    addc(2, n - 1, n, -two * nu * eps(n));
    // 2 nu (q^2 + 1) f
    addc(2, n + 1, n, two * nu);
    addc(0, n + 1, n, two * nu);
    // 2 nu^2 q^2
    addc(2, n, n, two * nu * nu);
  }
  // pin c_0 = 1
  A(rows, 0) = FieldOps<F>::one();
  Rhs(rows, 0) = FieldOps<F>::one();
  auto X = Matrix<F>::solve(A, Rhs);
  if (!X) throw NonGenericWeight(Expo{-1});
  GradedBlocks<F> C;
  for (int n = 0; n <= m; ++n) {
    Matrix<F> blk(1, 1);
    blk(0, 0) = (*X)(n, 0);
    C[Expo{-n}] = blk;
  }
  return C;
}

// --- vertex operators -------------------------------------------------------

// g-intertwiner M_lambda -> M_mu ox U, truncated; blocks[gamma][gamma'] maps
// the domain weight space at lambda+gamma to M_mu[mu+gamma'] ox U (flattened
// index iM * dimU + iU)
template <class F>
struct VertexOp {
  const VermaModule<F>* dom = nullptr;
  const VermaModule<F>* cod = nullptr;
  const FinDimModule<F>* U = nullptr;
  std::map<Expo, std::map<Expo, Matrix<F>>> blocks;
};

// expectation value: the gamma'=0 component of Psi(m_lambda) in U[lam-mu]
template <class F>
std::vector<F> expectation_value(const VertexOp<F>& psi) {
  const auto& rs = psi.dom->rs();
  Expo zero(size_t(rs.rank()), 0);
  std::vector<F> u(size_t(psi.U->dim_total), FieldOps<F>::zero());
  auto it0 = psi.blocks.find(zero);
  if (it0 == psi.blocks.end()) return u;
  auto it = it0->second.find(zero);
  if (it == it0->second.end()) return u;
  for (int i = 0; i < psi.U->dim_total; ++i) u[size_t(i)] = it->second(i, 0);
  return u;
}

// solve the highest-weight data: Psi(m_lambda) = sum_s w_s with
// w_s in M_mu[mu-s] ox U[wt(u)+s] (s in Q_+, finitely many levels),
// w_0 = m_mu ox u, and for every simple root i and level s
//   (e_i ox 1) w_{s+alpha_i} + (1 ox e_i) w_s = 0.
// u may be any vector in a single weight space of U.
template <class F>
VertexOp<F> vertex_operator(const VermaModule<F>& Mlam, const VermaModule<F>& Mmu,
                            const FinDimModule<F>& U, const std::vector<F>& u, int depth) {
  const auto& g = Mlam.g();
  const auto& rs = g.rs();
  const int r = rs.rank();
  const int du = U.dim_total;
  Expo zero(size_t(r), 0);

  // weight offset of u inside U (must be homogeneous)
  Expo u_off;
  {
    bool found = false;
    for (int i = 0; i < du; ++i) {
      if (sphf::is_zero(u[size_t(i)])) continue;
      if (!found) {
        u_off = U.wt_off[size_t(i)];
        found = true;
      } else if (U.wt_off[size_t(i)] != u_off) {
        throw std::invalid_argument("vertex_operator: datum is not a weight vector");
      }
    }
    if (!found) throw std::invalid_argument("vertex_operator: zero datum");
  }
  {
    WeightVec wu = U.hw;
    for (int i = 0; i < r; ++i) wu.c[size_t(i)] += u_off[size_t(i)];
    WeightVec diff = Mlam.highest_weight() - Mmu.highest_weight();
    if (!(rs.to_simple_root_basis(diff) == rs.to_simple_root_basis(wu)))
      throw std::invalid_argument("vertex_operator: weight of datum is not lambda - mu");
  }

  std::map<Expo, std::vector<int>> u_indices;  // U weight offset -> flat indices
  for (int i = 0; i < du; ++i) u_indices[U.wt_off[size_t(i)]].push_back(i);

  // levels s in Q_+ with wt(u)+s a weight of U; keyed by s
  struct Level {
    Expo s;
    Expo uoff;             // = u_off + s
    std::vector<int> uidx; // U indices at that weight
    int mdim = 0;          // dim M_mu[mu-s]
    int start = -1;        // variable offset (levels s != 0)
  };
  std::map<Expo, Level> levels;
  for (const auto& [uoff, idxs] : u_indices) {
    Expo step(size_t(r), 0);
    bool ok = true;
    for (int i = 0; i < r; ++i) {
      step[size_t(i)] = uoff[size_t(i)] - u_off[size_t(i)];
      if (step[size_t(i)] < 0) ok = false;
    }
    if (!ok) continue;
    Expo gp(size_t(r), 0);
    for (int i = 0; i < r; ++i) gp[size_t(i)] = -step[size_t(i)];
    if (!Mmu.in_range(gp)) throw verma::DepthOverflow();
    Level L;
    L.s = step;
    L.uoff = uoff;
    L.uidx = idxs;
    L.mdim = Mmu.dim_at(gp);
    levels.emplace(step, std::move(L));
  }

  int nvar = 0;
  for (auto& [sk, L] : levels) {
    if (sk == zero || L.mdim == 0) continue;
    L.start = nvar;
    nvar += L.mdim * int(L.uidx.size());
  }

  std::vector<std::vector<F>> rows;
  std::vector<F> rhs;
  for (int si = 0; si < r; ++si) {
    std::vector<int> ai(size_t(r), 0);
    ai[size_t(si)] = 1;
    const Matrix<F>& eU = U.sym_mat[size_t(g.id_ep(si))];
    for (const auto& [sk, L] : levels) {
      if (L.mdim == 0) continue;
      // target space: M_mu[mu-s] ox U[wt(u)+s+alpha_i]
      Expo uofft = L.uoff;
      for (int i = 0; i < r; ++i) uofft[size_t(i)] += ai[size_t(i)];
      auto uit = u_indices.find(uofft);
      if (uit == u_indices.end()) {
        // (1 ox e_i) w_s vanishes identically; still need (e_i ox 1) w_{s+a_i}
        // but its U weight wt(u)+s+alpha_i is not a weight of U either, so the
        // source level does not exist.
        continue;
      }
      const auto& ut = uit->second;
      const int md = L.mdim, nut = int(ut.size());
      std::vector<std::vector<F>> block(size_t(md * nut),
                                        std::vector<F>(size_t(nvar), FieldOps<F>::zero()));
      std::vector<F> brhs(size_t(md * nut), FieldOps<F>::zero());

      // (1 ox e_i) w_s
      {
        for (size_t a = 0; a < L.uidx.size(); ++a) {
          int iu = L.uidx[a];
          for (int b = 0; b < nut; ++b) {
            const F& c = eU(ut[size_t(b)], iu);
            if (sphf::is_zero(c)) continue;
            if (sk == zero) {
              for (int jm = 0; jm < md; ++jm)  // md == 1 at level 0
                brhs[size_t(jm * nut + b)] -= c * u[size_t(iu)];
            } else {
              for (int im = 0; im < md; ++im)
                block[size_t(im * nut + b)][size_t(L.start + im * int(L.uidx.size()) + int(a))] +=
                    c;
            }
          }
        }
      }
      // (e_i ox 1) w_{s+alpha_i}: same U weight as the target
      {
        Expo s2 = L.s;
        for (int i = 0; i < r; ++i) s2[size_t(i)] += ai[size_t(i)];
        auto it2 = levels.find(s2);
        if (it2 != levels.end() && it2->second.mdim > 0) {
          const Level& L2 = it2->second;
          Expo gp2(size_t(r), 0), gp(size_t(r), 0);
          for (int i = 0; i < r; ++i) {
            gp2[size_t(i)] = -s2[size_t(i)];
            gp[size_t(i)] = -L.s[size_t(i)];
          }
          Matrix<F> eM = Mmu.action_block(Elem<F>::sym(g.id_ep(si)), gp2, gp);
          for (int jm = 0; jm < md; ++jm)
            for (int im = 0; im < L2.mdim; ++im) {
              const F& c = eM(jm, im);
              if (sphf::is_zero(c)) continue;
              for (int b = 0; b < nut; ++b) {
                // U index of the source coordinate equals the target index
                int a2 = -1;
                for (size_t a = 0; a < L2.uidx.size(); ++a)
                  if (L2.uidx[a] == ut[size_t(b)]) a2 = int(a);
                if (a2 < 0) continue;
                block[size_t(jm * nut + b)]
                     [size_t(L2.start + im * int(L2.uidx.size()) + a2)] += c;
              }
            }
        }
      }
      for (size_t i = 0; i < block.size(); ++i) {
        rows.push_back(std::move(block[i]));
        rhs.push_back(brhs[i]);
      }
    }
  }

  std::optional<Matrix<F>> X;
  if (nvar == 0) {
    bool ok = true;
    for (const auto& x : rhs)
      if (!sphf::is_zero(x)) ok = false;
    if (!ok) throw NonGenericWeight(zero);
    X = Matrix<F>(0, 1);
  } else {
    Matrix<F> A(int(rows.size()), nvar), B(int(rows.size()), 1);
    for (size_t i = 0; i < rows.size(); ++i) {
      for (int j = 0; j < nvar; ++j) A(int(i), j) = rows[i][size_t(j)];
      B(int(i), 0) = rhs[i];
    }
    X = Matrix<F>::solve(A, B);
    if (!X) throw NonGenericWeight(zero);
  }

  // assemble Psi(m_lambda) as an M_mu ox U vector, flat index iM*du + iU
  std::map<Expo, std::vector<F>> psi_m;
  {
    auto& w0 = psi_m[zero];
    w0.assign(size_t(Mmu.dim_at(zero) * du), FieldOps<F>::zero());
    for (int iu = 0; iu < du; ++iu) w0[size_t(iu)] = u[size_t(iu)];
    for (const auto& [sk, L] : levels) {
      if (sk == zero || L.mdim == 0) continue;
      Expo gp(size_t(r), 0);
      for (int i = 0; i < r; ++i) gp[size_t(i)] = -sk[size_t(i)];
      auto& wq = psi_m[gp];
      if (wq.empty()) wq.assign(size_t(L.mdim * du), FieldOps<F>::zero());
      for (int im = 0; im < L.mdim; ++im)
        for (size_t a = 0; a < L.uidx.size(); ++a)
          wq[size_t(im * du + L.uidx[a])] =
              (*X)(L.start + im * int(L.uidx.size()) + int(a), 0);
    }
  }

  // extend to all of M_lambda: Psi(w m_lambda) = Delta(w) Psi(m_lambda)
  VertexOp<F> out;
  out.dom = &Mlam;
  out.cod = &Mmu;
  out.U = &U;

  std::map<Mono, std::map<Expo, std::vector<F>>> images;
  images[Mono{}] = psi_m;

  auto act_delta_f = [&](int p, const std::map<Expo, std::vector<F>>& wv) {
    std::map<Expo, std::vector<F>> out2;
    const Matrix<F>& fU = U.sym_mat[size_t(g.id_f(p))];
    for (const auto& [gp, flat] : wv) {
      int mdim = Mmu.dim_at(gp);
      {  // 1 ox f_p
        auto& dst = out2[gp];
        if (dst.empty()) dst.assign(size_t(mdim * du), FieldOps<F>::zero());
        for (int im = 0; im < mdim; ++im)
          for (int ju = 0; ju < du; ++ju) {
            F sacc = FieldOps<F>::zero();
            for (int iu = 0; iu < du; ++iu) {
              if (sphf::is_zero(fU(ju, iu))) continue;
              sacc += fU(ju, iu) * flat[size_t(im * du + iu)];
            }
            dst[size_t(im * du + ju)] += sacc;
          }
      }
      {  // f_p ox 1
        Expo tgt = gp;
        for (int i = 0; i < r; ++i) tgt[size_t(i)] -= rs.positive_roots()[size_t(p)][size_t(i)];
        if (!Mmu.in_range(tgt)) throw verma::DepthOverflow();
        Matrix<F> fM = Mmu.action_block(Elem<F>::sym(g.id_f(p)), gp, tgt);
        int tdim = Mmu.dim_at(tgt);
        auto& dst = out2[tgt];
        if (dst.empty()) dst.assign(size_t(tdim * du), FieldOps<F>::zero());
        for (int jm = 0; jm < tdim; ++jm)
          for (int im = 0; im < mdim; ++im) {
            if (sphf::is_zero(fM(jm, im))) continue;
            for (int iu = 0; iu < du; ++iu)
              dst[size_t(jm * du + iu)] += fM(jm, im) * flat[size_t(im * du + iu)];
          }
      }
    }
    return out2;
  };

  std::function<const std::map<Expo, std::vector<F>>&(const Mono&)> image_of =
      [&](const Mono& wmono) -> const std::map<Expo, std::vector<F>>& {
    auto it = images.find(wmono);
    if (it != images.end()) return it->second;
    int p = g.npos() - 1 - int(wmono[0]);
    Mono rest(wmono.begin() + 1, wmono.end());
    const auto& base = image_of(rest);
    auto img = act_delta_f(p, base);
    return images.emplace(wmono, std::move(img)).first->second;
  };

  for (const auto& gamma : rs.enumerate_qminus(depth)) {
    const auto& monos = Mlam.weight_basis(gamma);
    std::map<Expo, Matrix<F>> blkmap;
    for (size_t j = 0; j < monos.size(); ++j) {
      const auto& img = image_of(monos[j]);
      for (const auto& [gp, flat] : img) {
        bool all0 = true;
        for (const auto& x : flat)
          if (!sphf::is_zero(x)) {
            all0 = false;
            break;
          }
        if (all0) continue;
        auto& mat = blkmap[gp];
        if (mat.rows() == 0) mat = Matrix<F>(Mmu.dim_at(gp) * du, int(monos.size()));
        for (size_t i = 0; i < flat.size(); ++i) mat(int(i), int(j)) = flat[i];
      }
    }
    out.blocks[gamma] = std::move(blkmap);
  }
  return out;
}


// --- applying vertex operators, fusion, boundary fusion ---------------------

// vector in M ox W for an abstract tail W of dimension wdim;
// comp[gamma] has length dimM(gamma)*wdim with flat index iM*wdim + iW
template <class F>
struct MW {
  std::map<Expo, std::vector<F>> comp;
  int wdim = 1;
};

template <class F>
MW<F> highest_mw(const VermaModule<F>& M) {
  MW<F> v;
  v.wdim = 1;
  Expo zero(size_t(M.rs().rank()), 0);
  v.comp[zero] = {FieldOps<F>::one()};
  return v;
}

// (Psi ox id_W) applied to a vector in M_dom ox W; the result lives in
// M_cod ox U ox W with tail index iU*wdim + iW
template <class F>
MW<F> apply_vertex(const VertexOp<F>& psi, const MW<F>& v) {
  const int du = psi.U->dim_total;
  MW<F> out;
  out.wdim = du * v.wdim;
  for (const auto& [gamma, flat] : v.comp) {
    auto bit = psi.blocks.find(gamma);
    if (bit == psi.blocks.end()) throw verma::DepthOverflow();
    const int dimdom = psi.dom->dim_at(gamma);
    for (const auto& [gp, mat] : bit->second) {
      const int dimcod = psi.cod->dim_at(gp);
      auto& dst = out.comp[gp];
      if (dst.empty()) dst.assign(size_t(dimcod) * size_t(out.wdim), FieldOps<F>::zero());
      for (int row = 0; row < mat.rows(); ++row) {
        // row = iMcod*du + iU
        const int imc = row / du, iu = row % du;
        for (int id = 0; id < dimdom; ++id) {
          const F& c = mat(row, id);
          if (sphf::is_zero(c)) continue;
          for (int iw = 0; iw < v.wdim; ++iw) {
            const F& x = flat[size_t(id * v.wdim + iw)];
            if (sphf::is_zero(x)) continue;
            dst[size_t((imc * du + iu) * v.wdim + iw)] += c * x;
          }
        }
      }
    }
  }
  // prune zero components
  for (auto it = out.comp.begin(); it != out.comp.end();) {
    bool all0 = true;
    for (const auto& x : it->second)
      if (!sphf::is_zero(x)) all0 = false;
    if (all0) it = out.comp.erase(it);
    else ++it;
  }
  return out;
}

// apply phi_ell ox id_W to an (M ox W) vector, producing a V ox W vector
template <class F>
std::vector<F> apply_phi_left(const GradedBlocks<F>& B, int dimV, const VermaModule<F>& M,
                              const MW<F>& v) {
  std::vector<F> out(size_t(dimV * v.wdim), FieldOps<F>::zero());
  for (const auto& [gamma, flat] : v.comp) {
    auto bit = B.find(gamma);
    if (bit == B.end()) throw verma::DepthOverflow();
    const Matrix<F>& blk = bit->second;
    const int dimm = M.dim_at(gamma);
    for (int im = 0; im < dimm; ++im)
      for (int iv = 0; iv < dimV; ++iv) {
        const F& c = blk(iv, im);
        if (sphf::is_zero(c)) continue;
        for (int iw = 0; iw < v.wdim; ++iw) out[size_t(iv * v.wdim + iw)] += c * flat[size_t(im * v.wdim + iw)];
      }
  }
  return out;
}

// weight spread (maximal level height) of a finite dimensional module
template <class F>
int weight_spread(const FinDimModule<F>& U) {
  int h = 0;
  for (const auto& off : U.wt_off) h = std::max(h, fseries::ht_drop(off));
  return h;
}

// Composition driver for chains of vertex operators Psi_i : M_{lam_i} ->
// M_{lam_{i-1}} ox U_i with datum u_i; owns the intermediate Verma modules.
template <class F>
struct VertexChain {
  const GAlg<F>* g = nullptr;
  std::vector<const FinDimModule<F>*> Us;      // U_1 .. U_N
  std::vector<WeightVec> lams;                 // lam_0 .. lam_N
  std::vector<std::unique_ptr<VermaModule<F>>> mods;  // M_{lam_0} .. M_{lam_N}
  std::vector<VertexOp<F>> psis;               // Psi_1 .. Psi_N
  int depth = 0;                               // domain depth of Psi_N

  // build from lam_N and weight vectors u_i (weights mu_i = lam_i - lam_{i-1})
  static VertexChain build(const GAlg<F>& g, const std::vector<const FinDimModule<F>*>& Us,
                           const WeightVec& lamN, const std::vector<std::vector<F>>& us,
                           int depth) {
    const int N = int(Us.size());
    VertexChain ch;
    ch.g = &g;
    ch.Us = Us;
    ch.depth = depth;
    const auto& rs = g.rs();
    // weights of the data
    std::vector<WeightVec> mus;
    for (int i = 0; i < N; ++i) {
      Expo off;
      bool found = false;
      for (int k = 0; k < Us[size_t(i)]->dim_total; ++k)
        if (!sphf::is_zero(us[size_t(i)][size_t(k)])) {
          off = Us[size_t(i)]->wt_off[size_t(k)];
          found = true;
          break;
        }
      if (!found) throw std::invalid_argument("vertex chain: zero datum");
      WeightVec mu = rs.to_simple_root_basis(Us[size_t(i)]->hw);
      for (int k = 0; k < rs.rank(); ++k) mu.c[size_t(k)] += off[size_t(k)];
      mus.push_back(mu);
    }
    ch.lams.assign(size_t(N) + 1, rs.to_simple_root_basis(lamN));
    for (int i = N - 1; i >= 0; --i) ch.lams[size_t(i)] = ch.lams[size_t(i) + 1] - mus[size_t(i)];
    // depth slack: stage i adds the spread of U_{i+1..N}
    std::vector<int> need(size_t(N) + 1, depth);
    for (int i = N - 1; i >= 0; --i)
      need[size_t(i)] = need[size_t(i) + 1] + weight_spread(*Us[size_t(i)]);
    for (int i = 0; i <= N; ++i)
      ch.mods.push_back(std::make_unique<VermaModule<F>>(g, ch.lams[size_t(i)], need[size_t(i)]));
    for (int i = 0; i < N; ++i)
      ch.psis.push_back(vertex_operator(*ch.mods[size_t(i) + 1], *ch.mods[size_t(i)],
                                        *Us[size_t(i)], us[size_t(i)], need[size_t(i) + 1]));
    return ch;
  }

  // (Psi_1 ox id)...(Psi_{N-1} ox id) Psi_N applied to an M_{lam_N} ox W vector
  MW<F> apply(const MW<F>& v) const {
    MW<F> cur = v;
    for (int i = int(psis.size()) - 1; i >= 0; --i) cur = apply_vertex(psis[size_t(i)], cur);
    return cur;
  }
};

// fusion operator J(lambda) on the kron-flattened U_1 ox ... ox U_N:
// J(lambda)(u) is the expectation value of the composed vertex operators
template <class F>
Matrix<F> fusion_operator(const GAlg<F>& g, const std::vector<const FinDimModule<F>*>& Us,
                          const WeightVec& lamN) {
  const auto& rs = g.rs();
  int D = 1;
  for (const auto* U : Us) D *= U->dim_total;
  Matrix<F> J(D, D);
  Expo zero(size_t(rs.rank()), 0);
  for (int col = 0; col < D; ++col) {
    // decode the basis tuple
    std::vector<std::vector<F>> us;
    int rem = col;
    for (int i = int(Us.size()) - 1; i >= 0; --i) {
      int d = Us[size_t(i)]->dim_total;
      std::vector<F> u(size_t(d), FieldOps<F>::zero());
      u[size_t(rem % d)] = FieldOps<F>::one();
      us.insert(us.begin(), std::move(u));
      rem /= d;
    }
    auto ch = VertexChain<F>::build(g, Us, lamN, us, 0);
    MW<F> img = ch.apply(highest_mw(*ch.mods.back()));
    auto it = img.comp.find(zero);
    if (it == img.comp.end()) continue;
    for (int rowi = 0; rowi < D; ++rowi) J(rowi, col) = it->second[size_t(rowi)];
  }
  return J;
}

// left boundary fusion operator on V ox (U_1 ox ... ox U_N):
// J_l(lambda)(v ox u) = (phi^v_{ell,lambda-mu} ox id) Psi_lambda^{J(lambda)u}(m_lambda)
template <class F>
Matrix<F> boundary_fusion(const GAlg<F>& g, const KRep<F>& V,
                          const std::vector<const FinDimModule<F>*>& Us, const WeightVec& lamN) {
  const auto& rs = g.rs();
  Matrix<F> J = fusion_operator(g, Us, lamN);
  // flatten the tensor product into a single module
  FinDimModule<F> Ubig = Us.empty() ? verma::trivial_module(g) : *Us[0];
  for (size_t i = 1; i < Us.size(); ++i) Ubig = verma::tensor_product(Ubig, *Us[size_t(i)]);
  const int D = Ubig.dim_total;
  const int spread = weight_spread(Ubig);
  Matrix<F> JL(V.dim * D, V.dim * D);
  VermaModule<F> Mlam(g, lamN, spread);
  for (int c = 0; c < D; ++c) {
    // w = J(lambda) u_c, homogeneous of the weight of u_c
    std::vector<F> wvec(size_t(D), FieldOps<F>::zero());
    for (int rowi = 0; rowi < D; ++rowi) wvec[size_t(rowi)] = J(rowi, c);
    // mu = weight of u_c
    WeightVec mu = rs.to_simple_root_basis(Ubig.hw);
    for (int k = 0; k < rs.rank(); ++k) mu.c[size_t(k)] += Ubig.wt_off[size_t(c)][size_t(k)];
    VermaModule<F> Mmu(g, rs.to_simple_root_basis(lamN) - mu, 2 * spread);
    auto psi = vertex_operator(Mlam, Mmu, Ubig, wvec, spread);
    MW<F> img = apply_vertex(psi, highest_mw(Mlam));
    for (int iv = 0; iv < V.dim; ++iv) {
      std::vector<F> v0(size_t(V.dim), FieldOps<F>::zero());
      v0[size_t(iv)] = FieldOps<F>::one();
      auto B = phi_left(Mmu, V, v0, 2 * spread);
      std::vector<F> res = apply_phi_left(B, V.dim, Mmu, img);
      for (int jv = 0; jv < V.dim; ++jv)
        for (int ju = 0; ju < D; ++ju)
          JL(jv * D + ju, iv * D + c) = res[size_t(jv * D + ju)];
    }
  }
  return JL;
}

// --- equivariance residuals (exact, blockwise) ------------------------------

// sigma(y_p) phi = phi act(y_p) on every weight block of depth <= m - maxht
template <class F>
bool phi_left_equivariant(const VermaModule<F>& M, const KRep<F>& V, const GradedBlocks<F>& B,
                          int m_check) {
  const auto& g = M.g();
  const auto& rs = M.rs();
  for (const auto& gamma : rs.enumerate_qminus(m_check)) {
    for (int p = 0; p < g.npos(); ++p) {
      Elem<F> y = g.y_in_g(p);
      // columns: basis of M[lam+gamma]; compute phi(y u) - sigma(y) phi(u)
      const auto& monos = M.weight_basis(gamma);
      for (size_t j = 0; j < monos.size(); ++j) {
        ModVec<F> yu = M.act(y, M.basis_vector(gamma, int(j)));
        Matrix<F> lhs(V.dim, 1);
        for (const auto& [go, coords] : yu.comp) {
          auto bit = B.find(go);
          if (bit == B.end()) return false;
          for (size_t i = 0; i < coords.size(); ++i)
            for (int r2 = 0; r2 < V.dim; ++r2) lhs(r2, 0) += bit->second(r2, int(i)) * coords[i];
        }
        Matrix<F> rhs(V.dim, 1);
        const Matrix<F>& blk = B.at(gamma);
        for (int r2 = 0; r2 < V.dim; ++r2) rhs(r2, 0) = blk(r2, int(j));
        rhs = V.y[size_t(p)] * rhs;
        if (!(lhs == rhs)) return false;
      }
    }
  }
  return true;
}

// y_p phi_r(v) = phi_r(sigma(y_p) v) componentwise up to depth m_check
template <class F>
bool phi_right_equivariant(const VermaModule<F>& M, const KRep<F>& V, const GradedBlocks<F>& C,
                           int m_check) {
  const auto& g = M.g();
  const auto& rs = M.rs();
  // components of y_p phi(v) at weight gamma: e_p C_{gamma-alpha} - f_p C_{gamma+alpha}
  auto shifted = [&](const Expo& gamma, const std::vector<int>& root, int k) {
    Expo out = gamma;
    for (int i = 0; i < rs.rank(); ++i) out[size_t(i)] += k * root[size_t(i)];
    return out;
  };
  auto get = [&](const Expo& gamma) -> const Matrix<F>* {
    auto it = C.find(gamma);
    return it == C.end() ? nullptr : &it->second;
  };
  for (const auto& gamma : rs.enumerate_qminus(m_check)) {
    int dimg = M.dim_at(gamma);
    for (int p = 0; p < g.npos(); ++p) {
      const auto& alpha = rs.positive_roots()[size_t(p)];
      Matrix<F> lhs(dimg, V.dim);
      Expo below = shifted(gamma, alpha, -1);
      if (const Matrix<F>* cb = get(below); cb && M.in_range(below))
        lhs += M.action_block(Elem<F>::sym(g.id_ep(p)), below, gamma) * (*cb);
      Expo above = shifted(gamma, alpha, +1);
      if (const Matrix<F>* ca = get(above))
        lhs -= M.action_block(Elem<F>::sym(g.id_f(p)), above, gamma) * (*ca);
      Matrix<F> rhs = (*get(gamma)) * V.y[size_t(p)];
      if (!(lhs == rhs)) return false;
    }
  }
  return true;
}

// Delta(x) Psi = Psi x for every Lie-algebra basis symbol, blockwise
template <class F>
bool vertex_equivariant(const VertexOp<F>& psi, int m_check) {
  const auto& g = psi.dom->g();
  const auto& rs = psi.dom->rs();
  const int du = psi.U->dim_total;
  for (const auto& gamma : rs.enumerate_qminus(m_check)) {
    const auto& monos = psi.dom->weight_basis(gamma);
    for (int s = 0; s < g.dim(); ++s) {
      for (size_t j = 0; j < monos.size(); ++j) {
        // rhs: Psi(x u)
        ModVec<F> xu = psi.dom->act(Elem<F>::sym(s), psi.dom->basis_vector(gamma, int(j)));
        std::map<Expo, std::vector<F>> rhs;
        for (const auto& [go, coords] : xu.comp) {
          auto bit = psi.blocks.find(go);
          if (bit == psi.blocks.end()) return false;
          for (const auto& [gp, mat] : bit->second) {
            auto& dst = rhs[gp];
            if (dst.empty()) dst.assign(size_t(mat.rows()), FieldOps<F>::zero());
            for (int rw = 0; rw < mat.rows(); ++rw)
              for (size_t i = 0; i < coords.size(); ++i) dst[size_t(rw)] += mat(rw, int(i)) * coords[i];
          }
        }
        // lhs: Delta(x) Psi(u) = (x ox 1 + 1 ox x) Psi(u)
        std::map<Expo, std::vector<F>> lhs;
        const Matrix<F>& xU = psi.U->sym_mat[size_t(s)];
        auto bit = psi.blocks.find(gamma);
        if (bit == psi.blocks.end()) return false;
        for (const auto& [gp, mat] : bit->second) {
          const int mdim = psi.cod->dim_at(gp);
          // column j of mat: vector at gp
          // 1 ox x
          {
            auto& dst = lhs[gp];
            if (dst.empty()) dst.assign(size_t(mdim * du), FieldOps<F>::zero());
            for (int im = 0; im < mdim; ++im)
              for (int ju = 0; ju < du; ++ju)
                for (int iu = 0; iu < du; ++iu) {
                  if (sphf::is_zero(xU(ju, iu))) continue;
                  dst[size_t(im * du + ju)] += xU(ju, iu) * mat(im * du + iu, int(j));
                }
          }
          // x ox 1
          {
            std::vector<int> wt = g.table().wt[size_t(s)];
            Expo tgt = gp;
            for (int i = 0; i < rs.rank(); ++i) tgt[size_t(i)] += wt[size_t(i)];
            bool ok = psi.cod->in_range(tgt);
            if (!ok) {
              // must vanish beyond the built window: skip the check for this
              // block by returning early only if the action is nonzero
              continue;
            }
            Matrix<F> xM = psi.cod->action_block(Elem<F>::sym(s), gp, tgt);
            const int tdim = psi.cod->dim_at(tgt);
            auto& dst = lhs[tgt];
            if (dst.empty()) dst.assign(size_t(tdim * du), FieldOps<F>::zero());
            for (int jm = 0; jm < tdim; ++jm)
              for (int im = 0; im < mdim; ++im) {
                if (sphf::is_zero(xM(jm, im))) continue;
                for (int iu = 0; iu < du; ++iu)
                  dst[size_t(jm * du + iu)] += xM(jm, im) * mat(im * du + iu, int(j));
              }
          }
        }
        for (const auto& [gp, vec] : lhs) {
          auto it = rhs.find(gp);
          for (size_t i = 0; i < vec.size(); ++i) {
            F rv = it == rhs.end() ? FieldOps<F>::zero() : it->second[i];
            if (!(vec[i] == rv)) return false;
          }
        }
        for (const auto& [gp, vec] : rhs) {
          if (lhs.count(gp)) continue;
          for (const auto& x : vec)
            if (!sphf::is_zero(x)) return false;
        }
      }
    }
  }
  return true;
}

}  // namespace sphf::intertwine
