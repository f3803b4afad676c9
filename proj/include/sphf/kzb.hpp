#pragma once

#include <map>
#include <stdexcept>
#include <vector>

#include "sphf/hcm.hpp"

namespace sphf::kzb {

using envalg::Elem;
using envalg::GAlg;
using envalg::KAlg;
using envalg::Mono;
using envalg::TElem;
using envalg::TensorAlg;
using envalg::TMono;
using fseries::DiffOp;
using fseries::Expo;
using fseries::Series;
using fseries::TorusPoint;
using intertwine::KRep;
using intertwine::MW;
using intertwine::VertexChain;
using intertwine::VertexOp;
using radial::SigmaPair;
using rootdata::RootSystem;
using rootdata::WeightVec;
using verma::FinDimModule;
using verma::VermaModule;

// ---------------------------------------------------------------------------
// universal dynamical tensors as series with U(g)/U(k) tensor-leg coefficients
// ---------------------------------------------------------------------------

template <class F>
Series<TElem<F>> zero_dyn(const RootSystem& rs, int legs, int m) {
  (void)legs;
  return Series<TElem<F>>(rs, WeightVec(std::vector<Rational>(size_t(rs.rank()), Rational(0))), m);
}

// helper: scale a scalar model series into a tensor coefficient
template <class F>
void add_scaled(Series<TElem<F>>& dst, const Series<F>& s, const TElem<F>& t) {
  for (const auto& [g, v] : s.c) {
    TElem<F> tv = t;
    tv.scale(v);
    dst.add(g, tv);
  }
}

// Felder's trigonometric dynamical r-matrix in legs (a, b) of `legs` slots:
//   r = -(1/2) sum x ox x - sum_{alpha in R} e_{-alpha} ox e_alpha / (1 - xi_{-2alpha})
template <class F>
Series<TElem<F>> felder_r(const GAlg<F>& g, int legs, int a, int b, int m) {
  const auto& rs = g.rs();
  auto out = zero_dyn<F>(rs, legs, m);
  const int r = rs.rank();
  Expo zero(size_t(r), 0);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) {
      const Rational& gij = rs.gram_inv()(i, j);
      if (sgn(gij) == 0) continue;
      TMono tm((size_t(legs)));
      tm[size_t(a)] = Mono{uint8_t(g.id_h(i))};
      tm[size_t(b)] = Mono{uint8_t(g.id_h(j))};
      TElem<F> t;
      t.add(tm, FieldOps<F>::from(Rational(-1, 2) * gij));
      out.add(zero, t);
    }
  for (int p = 0; p < g.npos(); ++p)
    for (int sign : {+1, -1}) {
      std::vector<int> alpha = rs.positive_roots()[size_t(p)];
      for (int& x : alpha) x *= sign;
      Series<F> coef = fseries::inv_one_minus_xi_m2<F>(rs, alpha, m);
      TMono tm((size_t(legs)));
      std::vector<int> nalpha = alpha;
      for (int& x : nalpha) x = -x;
      tm[size_t(a)] = Mono{uint8_t(g.id_e(nalpha))};
      tm[size_t(b)] = Mono{uint8_t(g.id_e(alpha))};
      TElem<F> t;
      t.add(tm, -FieldOps<F>::one());
      add_scaled(out, coef, t);
    }
  return out;
}

// r^{theta_1} = (theta ox id) r = +(1/2) sum x ox x + sum e_alpha ox e_alpha/(1-xi_{-2a});
// equals r_21^{theta_2} since it is a symmetric tensor
template <class F>
Series<TElem<F>> r_theta1(const GAlg<F>& g, int legs, int a, int b, int m) {
  const auto& rs = g.rs();
  auto out = zero_dyn<F>(rs, legs, m);
  const int r = rs.rank();
  Expo zero(size_t(r), 0);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) {
      const Rational& gij = rs.gram_inv()(i, j);
      if (sgn(gij) == 0) continue;
      TMono tm((size_t(legs)));
      tm[size_t(a)] = Mono{uint8_t(g.id_h(i))};
      tm[size_t(b)] = Mono{uint8_t(g.id_h(j))};
      TElem<F> t;
      t.add(tm, FieldOps<F>::from(Rational(1, 2) * gij));
      out.add(zero, t);
    }
  for (int p = 0; p < g.npos(); ++p)
    for (int sign : {+1, -1}) {
      std::vector<int> alpha = rs.positive_roots()[size_t(p)];
      for (int& x : alpha) x *= sign;
      Series<F> coef = fseries::inv_one_minus_xi_m2<F>(rs, alpha, m);
      TMono tm((size_t(legs)));
      tm[size_t(a)] = Mono{uint8_t(g.id_e(alpha))};
      tm[size_t(b)] = Mono{uint8_t(g.id_e(alpha))};
      TElem<F> t;
      t.add(tm, FieldOps<F>::one());
      add_scaled(out, coef, t);
    }
  return out;
}

// folded r-matrices r^{+-} = +-r + r_21^{theta_2}
template <class F>
Series<TElem<F>> folded_r(const GAlg<F>& g, int sign, int legs, int a, int b, int m) {
  Series<TElem<F>> out = r_theta1(g, legs, a, b, m);
  Series<TElem<F>> base = felder_r(g, legs, a, b, m);
  if (sign > 0) out += base;
  else out -= base;
  return out;
}

// right boundary term r~^+ = sum_{alpha in R} e_alpha ox y_alpha/(xi_a - xi_{-a})
template <class F>
Series<TElem<F>> r_tilde_plus(const GAlg<F>& g, int legs, int a, int b, int m) {
  const auto& rs = g.rs();
  auto out = zero_dyn<F>(rs, legs, m);
  for (int p = 0; p < g.npos(); ++p)
    for (int sign : {+1, -1}) {
      std::vector<int> alpha = rs.positive_roots()[size_t(p)];
      for (int& x : alpha) x *= sign;
      Series<F> coef = fseries::inv_xi_diff<F>(rs, alpha, m);
      // y_{-alpha} = -y_alpha; expand y in U(g) on leg b
      for (int esign : {+1, -1}) {
        std::vector<int> beta = rs.positive_roots()[size_t(p)];
        for (int& x : beta) x *= esign;
        TMono tm((size_t(legs)));
        tm[size_t(a)] = Mono{uint8_t(g.id_e(alpha))};
        tm[size_t(b)] = Mono{uint8_t(g.id_e(beta))};
        TElem<F> t;
        F c = FieldOps<F>::one();
        if (esign < 0) c = -c;   // y = e_beta - e_{-beta}
        if (sign < 0) c = -c;    // y_{-alpha} = -y_alpha
        t.add(tm, c);
        add_scaled(out, coef, t);
      }
    }
  return out;
}

// kappa-core = (1/2) sum x^2 + sum_{alpha in R} e_alpha^2/(1 - xi_{-2alpha}), one leg
template <class F>
Series<TElem<F>> kappa_core(const GAlg<F>& g, int legs, int a, int m) {
  const auto& rs = g.rs();
  auto out = zero_dyn<F>(rs, legs, m);
  const int r = rs.rank();
  Expo zero(size_t(r), 0);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) {
      const Rational& gij = rs.gram_inv()(i, j);
      if (sgn(gij) == 0) continue;
      TMono tm((size_t(legs)));
      Mono hh{uint8_t(g.id_h(i)), uint8_t(g.id_h(j))};
      std::sort(hh.begin(), hh.end());
      tm[size_t(a)] = hh;
      TElem<F> t;
      t.add(tm, FieldOps<F>::from(Rational(1, 2) * gij));
      out.add(zero, t);
    }
  for (int p = 0; p < g.npos(); ++p)
    for (int sign : {+1, -1}) {
      std::vector<int> alpha = rs.positive_roots()[size_t(p)];
      for (int& x : alpha) x *= sign;
      Series<F> coef = fseries::inv_one_minus_xi_m2<F>(rs, alpha, m);
      TMono tm((size_t(legs)));
      tm[size_t(a)] = Mono{uint8_t(g.id_e(alpha)), uint8_t(g.id_e(alpha))};
      TElem<F> t;
      t.add(tm, FieldOps<F>::one());
      add_scaled(out, coef, t);
    }
  return out;
}

// d = -(1/2) sum_{alpha>0} coth_alpha t_alpha (the unfolded factorization term)
template <class F>
Series<TElem<F>> d_term(const GAlg<F>& g, int legs, int a, int m) {
  const auto& rs = g.rs();
  auto out = zero_dyn<F>(rs, legs, m);
  for (int p = 0; p < g.npos(); ++p) {
    const auto& alpha = rs.positive_roots()[size_t(p)];
    Series<F> coth = fseries::coth_xi<F>(rs, alpha, m);
    for (int i = 0; i < rs.rank(); ++i) {
      if (alpha[size_t(i)] == 0) continue;
      TMono tm((size_t(legs)));
      tm[size_t(a)] = Mono{uint8_t(g.id_h(i))};
      TElem<F> t;
      t.add(tm, FieldOps<F>::from(Rational(-1, 2) * alpha[size_t(i)]));
      add_scaled(out, coth, t);
    }
  }
  return out;
}

// b = d + m(r^{theta_1}) = (1/2)sum x^2 - (1/2)sum_{a>0} coth t_a + sum e^2/(1-xi)
template <class F>
Series<TElem<F>> b_term(const GAlg<F>& g, int legs, int a, int m) {
  Series<TElem<F>> out = kappa_core(g, legs, a, m);
  out += d_term(g, legs, a, m);
  return out;
}

// full dynamical k-matrix in U(k) ox U(g) ox U(k) placed at legs (kl, a, kr);
// the outer legs are U(k) legs (y-symbol words)
template <class F>
Series<TElem<F>> kappa_full(const GAlg<F>& g, const KAlg<F>& /*k*/, int legs, int kl, int a,
                            int kr, int m) {
  const auto& rs = g.rs();
  auto out = kappa_core(g, legs, a, m);
  for (int p = 0; p < g.npos(); ++p)
    for (int sign : {+1, -1}) {
      std::vector<int> alpha = rs.positive_roots()[size_t(p)];
      for (int& x : alpha) x *= sign;
      // y_alpha ox e_alpha ox 1 / (1-xi_{-2a})
      {
        Series<F> coef = fseries::inv_one_minus_xi_m2<F>(rs, alpha, m);
        TMono tm((size_t(legs)));
        tm[size_t(kl)] = Mono{uint8_t(p)};  // y_p in the k-leg
        tm[size_t(a)] = Mono{uint8_t(g.id_e(alpha))};
        TElem<F> t;
        t.add(tm, sign > 0 ? FieldOps<F>::one() : -FieldOps<F>::one());
        add_scaled(out, coef, t);
      }
      // 1 ox e_alpha ox y_alpha / (xi_a - xi_{-a})
      {
        Series<F> coef = fseries::inv_xi_diff<F>(rs, alpha, m);
        TMono tm((size_t(legs)));
        tm[size_t(a)] = Mono{uint8_t(g.id_e(alpha))};
        tm[size_t(kr)] = Mono{uint8_t(p)};
        TElem<F> t;
        t.add(tm, sign > 0 ? FieldOps<F>::one() : -FieldOps<F>::one());
        add_scaled(out, coef, t);
      }
    }
  return out;
}

// sum_k (x_k)_leg d_{x_k}(s): each exponent gamma contributes t_gamma = sum
// gamma_j h_j left-multiplied into the given (U(g)) leg
template <class F>
Series<TElem<F>> dyn_derivative(const GAlg<F>& g, const TensorAlg<F>& alg,
                                const Series<TElem<F>>& s, int leg) {
  const auto& rs = g.rs();
  Series<TElem<F>> out(*s.rs, s.lam, s.m);
  for (const auto& [gamma, tel] : s.c) {
    for (int j = 0; j < rs.rank(); ++j) {
      if (gamma[size_t(j)] == 0) continue;
      TElem<F> hj;
      TMono tm(size_t(alg.nlegs()));
      tm[size_t(leg)] = Mono{uint8_t(g.id_h(j))};
      hj.add(tm, FieldOps<F>::from(Rational(gamma[size_t(j)])));
      out.add(gamma, alg.mul(hj, tel));
    }
  }
  return out;
}

template <class F>
Series<TElem<F>> dyn_commutator(const TensorAlg<F>& alg, const Series<TElem<F>>& a,
                                const Series<TElem<F>>& b) {
  auto mul = [&alg](const TElem<F>& x, const TElem<F>& y) { return alg.mul(x, y); };
  return fseries::series_mul(a, b, mul) - fseries::series_mul(b, a, mul);
}

struct IdentityReport {
  std::string name;
  bool pass = false;
  int m = 0;
  std::vector<Expo> residual_support;
  double wall_ms = 0;
};

// the three mixed classical dynamical Yang-Baxter equations in R ox U(g)^{ox 3}
template <class F>
std::vector<IdentityReport> verify_cdybe(const GAlg<F>& g, const KAlg<F>& k, int m,
                                         bool negative_control = false) {
  TensorAlg<F> alg({&g.uea(), &g.uea(), &g.uea()});
  auto rp = [&](int a, int b) { return folded_r(g, +1, 3, a, b, m); };
  auto rm = [&](int a, int b) { return folded_r(g, -1, 3, a, b, m); };
  (void)k;
  std::vector<IdentityReport> out;
  auto record = [&](const std::string& name, const Series<TElem<F>>& resid) {
    IdentityReport rep;
    rep.name = name;
    rep.m = m;
    rep.pass = resid.is_zero();
    for (const auto& [gme, v] : resid.c)
      if (!v.is_zero()) rep.residual_support.push_back(gme);
    out.push_back(std::move(rep));
  };
  // (1) (x)_1 d(r23^-) - (x)_2 d(r13^-) = [r13^-, r12^+] + [r12^-, r23^-] + [r13^-, r23^-]
  {
    auto r12p = negative_control ? rm(0, 1) : rp(0, 1);
    auto lhs = dyn_derivative(g, alg, rm(1, 2), 0) - dyn_derivative(g, alg, rm(0, 2), 1);
    auto rhs = dyn_commutator(alg, rm(0, 2), r12p) + dyn_commutator(alg, rm(0, 1), rm(1, 2)) +
               dyn_commutator(alg, rm(0, 2), rm(1, 2));
    record("cdybe-1", lhs - rhs);
  }
  // (2) (x)_1 d(r23^+) - (x)_3 d(r12^-) = [r12^-, r13^+] + [r12^-, r23^+] + [r13^-, r23^+]
  {
    auto lhs = dyn_derivative(g, alg, rp(1, 2), 0) - dyn_derivative(g, alg, rm(0, 1), 2);
    auto rhs = dyn_commutator(alg, rm(0, 1), rp(0, 2)) + dyn_commutator(alg, rm(0, 1), rp(1, 2)) +
               dyn_commutator(alg, rm(0, 2), rp(1, 2));
    record("cdybe-2", lhs - rhs);
  }
  // (3) (x)_2 d(r13^+) - (x)_3 d(r12^+) = [r12^+, r13^+] + [r12^+, r23^+] + [r23^-, r13^+]
  {
    auto lhs = dyn_derivative(g, alg, rp(0, 2), 1) - dyn_derivative(g, alg, rp(0, 1), 2);
    auto rhs = dyn_commutator(alg, rp(0, 1), rp(0, 2)) + dyn_commutator(alg, rp(0, 1), rp(1, 2)) +
               dyn_commutator(alg, rm(1, 2), rp(0, 2));
    record("cdybe-3", lhs - rhs);
  }
  return out;
}

// mixed classical dynamical reflection equation in U(k) ox U(g)^{ox 2} ox U(k)
template <class F>
IdentityReport verify_reflection(const GAlg<F>& g, const KAlg<F>& k, int m) {
  TensorAlg<F> alg({&k.uea(), &g.uea(), &g.uea(), &k.uea()});
  // kappa_i: U(g)-slot at g-leg i (legs 1 and 2), U(k)-legs at 0 and 3
  auto kap1 = kappa_full(g, k, 4, 0, 1, 3, m);
  auto kap2 = kappa_full(g, k, 4, 0, 2, 3, m);
  auto rp = folded_r(g, +1, 4, 1, 2, m);
  auto rm = folded_r(g, -1, 4, 1, 2, m);
  auto k2rp = kap2 + rp;
  auto k1rm = kap1 + rm;
  auto lhs = dyn_derivative(g, alg, k2rp, 1) - dyn_derivative(g, alg, k1rm, 2);
  auto rhs = dyn_commutator(alg, k1rm, k2rp);
  auto resid = lhs - rhs;
  IdentityReport rep;
  rep.name = "reflection";
  rep.m = m;
  rep.pass = resid.is_zero();
  for (const auto& [gme, v] : resid.c)
    if (!v.is_zero()) rep.residual_support.push_back(gme);
  return rep;
}

// ---------------------------------------------------------------------------
// factorizations of the Casimir through truncated vertex operators
// ---------------------------------------------------------------------------

// flattened picture of Hom(M_lam^{<=dcheck}, (M_mu ox U)^{built}):
template <class F>
struct FlatHom {
  const VermaModule<F>* dom;
  const VermaModule<F>* cod;
  const FinDimModule<F>* U;
  int dcheck;
  std::vector<Expo> dom_off, cod_off;
  std::map<Expo, int> dom_start, cod_start;
  int dom_dim = 0, cod_dim = 0;

  FlatHom(const VermaModule<F>& d, const VermaModule<F>& c, const FinDimModule<F>& u, int dc)
      : dom(&d), cod(&c), U(&u), dcheck(dc) {
    for (const auto& gm : d.rs().enumerate_qminus(dc)) {
      dom_off.push_back(gm);
      dom_start[gm] = dom_dim;
      dom_dim += d.dim_at(gm);
    }
    for (const auto& gm : c.rs().enumerate_qminus(c.depth())) {
      cod_off.push_back(gm);
      cod_start[gm] = cod_dim;
      cod_dim += c.dim_at(gm) * u.dim_total;
    }
  }

  Matrix<F> flatten(const VertexOp<F>& psi) const {
    Matrix<F> out(cod_dim, dom_dim);
    for (const auto& gm : dom_off) {
      auto bit = psi.blocks.find(gm);
      if (bit == psi.blocks.end()) continue;
      int c0 = dom_start.at(gm);
      for (const auto& [gp, mat] : bit->second) {
        int r0 = cod_start.at(gp);
        for (int i = 0; i < mat.rows(); ++i)
          for (int j = 0; j < mat.cols(); ++j) out(r0 + i, c0 + j) = mat(i, j);
      }
    }
    return out;
  }

  // action of an element on the codomain M_mu factor, on columns whose
  // M-depth is at most from_max (the rest of the matrix stays zero)
  Matrix<F> act_cod_M(const Elem<F>& x, int from_max) const {
    Matrix<F> out(cod_dim, cod_dim);
    const int du = U->dim_total;
    for (const auto& gfrom : cod_off) {
      if (fseries::ht_drop(gfrom) > from_max) continue;
      for (int i = 0; i < cod->dim_at(gfrom); ++i) {
        auto img = cod->act(x, cod->basis_vector(gfrom, i));
        for (const auto& [gto, coords] : img.comp) {
          auto it = cod_start.find(gto);
          if (it == cod_start.end()) throw verma::DepthOverflow();
          for (size_t j = 0; j < coords.size(); ++j) {
            if (sphf::is_zero(coords[j])) continue;
            for (int iu = 0; iu < du; ++iu)
              out(it->second + int(j) * du + iu, cod_start.at(gfrom) + i * du + iu) += coords[j];
          }
        }
      }
    }
    return out;
  }

  // action of an element on the codomain U factor
  Matrix<F> act_cod_U(const Elem<F>& x) const {
    Matrix<F> out(cod_dim, cod_dim);
    Matrix<F> xu = U->act_elem(x);
    const int du = U->dim_total;
    for (const auto& gm : cod_off) {
      int s = cod_start.at(gm);
      for (int i = 0; i < cod->dim_at(gm); ++i)
        for (int ju = 0; ju < du; ++ju)
          for (int iu = 0; iu < du; ++iu) {
            if (sphf::is_zero(xu(ju, iu))) continue;
            out(s + i * du + ju, s + i * du + iu) += xu(ju, iu);
          }
    }
    return out;
  }

  // Psi o (x .): act on the domain first (which may leave the checked window
  // but must stay inside the built vertex blocks), then push through Psi
  Matrix<F> psi_after(const VertexOp<F>& psi, const Elem<F>& x) const {
    Matrix<F> out(cod_dim, dom_dim);
    for (const auto& gfrom : dom_off) {
      for (int i = 0; i < dom->dim_at(gfrom); ++i) {
        auto img = dom->act(x, dom->basis_vector(gfrom, i));
        for (const auto& [gmid, coords] : img.comp) {
          auto bit = psi.blocks.find(gmid);
          if (bit == psi.blocks.end()) throw verma::DepthOverflow();
          for (const auto& [gp, mat] : bit->second) {
            int r0 = cod_start.at(gp);
            for (int rr = 0; rr < mat.rows(); ++rr)
              for (size_t j = 0; j < coords.size(); ++j) {
                if (sphf::is_zero(coords[j])) continue;
                out(r0 + rr, dom_start.at(gfrom) + i) += mat(rr, int(j)) * coords[j];
              }
          }
        }
      }
    }
    return out;
  }
};

struct FactorizationReport {
  std::string which;
  bool pass = false;
  int m = 0;
};

// antipode of U(g): anti-homomorphism with S(x) = -x on g
template <class F>
Elem<F> antipode_g(const GAlg<F>& g, const Elem<F>& x) {
  Elem<F> out;
  for (const auto& [mword, c] : x.t) {
    std::vector<uint8_t> w(mword.rbegin(), mword.rend());
    F sign = (mword.size() % 2 == 0) ? FieldOps<F>::one() : -FieldOps<F>::one();
    out += g.uea().straighten(w, c * sign);
  }
  return out;
}

// factorization check: (1/2)((Omega ox 1)Psi - Psi Omega) =
// tau_l Psi - Psi * tau_r + (1 ox d)Psi with series-expanded R-coefficients;
// tau_l, tau_r are 2-leg dynamical tensors (legs: M-side, U-side), d one leg.
template <class F>
FactorizationReport verify_factorization(const GAlg<F>& g, const KAlg<F>& k, char which,
                                         const WeightVec& lam, const FinDimModule<F>& U,
                                         const std::vector<F>& u, int depth, int m,
                                         bool negative_control = false) {
  const auto& rs = g.rs();
  const int maxht = [&] {
    int h = 0;
    for (int x : rs.positive_roots().back()) h += x;
    return h;
  }();
  // weight of u
  WeightVec mu = rs.to_simple_root_basis(lam);
  {
    Expo off;
    for (int i = 0; i < U.dim_total; ++i)
      if (!sphf::is_zero(u[size_t(i)])) {
        off = U.wt_off[size_t(i)];
        break;
      }
    WeightVec wu = rs.to_simple_root_basis(U.hw);
    for (int i = 0; i < rs.rank(); ++i) wu.c[size_t(i)] += off[size_t(i)];
    mu = rs.to_simple_root_basis(lam) - wu;
  }
  const int spread = intertwine::weight_spread(U);
  const int cmax = depth + maxht + spread;  // max M-depth the flattened maps reach
  VermaModule<F> Mlam(g, lam, depth + 2 * maxht);
  VermaModule<F> Mmu(g, mu, cmax + 2 * maxht);
  auto psi = intertwine::vertex_operator(Mlam, Mmu, U, u, depth + maxht);
  FlatHom<F> fl(Mlam, Mmu, U, depth);
  Matrix<F> P = fl.flatten(psi);

  // LHS: (1/2)((Omega ox 1)Psi - Psi Omega), exact scalars via honest action
  Elem<F> om = g.casimir();
  Matrix<F> lhs_mat = fl.act_cod_M(om, cmax) * P - fl.psi_after(psi, om);
  Series<Matrix<F>> lhs(rs, WeightVec(std::vector<Rational>(size_t(rs.rank()), Rational(0))), m);
  lhs.add(Expo(size_t(rs.rank()), 0), FieldOps<F>::from(Rational(1, 2)) * lhs_mat);

  // RHS pieces
  Series<TElem<F>> tl(rs, lhs.lam, m), tr(rs, lhs.lam, m), dd(rs, lhs.lam, m);
  if (which == 'a') {
    tl = felder_r(g, 2, 0, 1, m);
    tr = tl;
    dd = negative_control ? zero_dyn<F>(rs, 1, m) : d_term(g, 1, 0, m);
  } else {
    tl = folded_r(g, +1, 2, 0, 1, m);
    tr = -folded_r(g, -1, 2, 0, 1, m);
    dd = b_term(g, 1, 0, m);
  }
  Series<Matrix<F>> rhs(rs, lhs.lam, m);
  // tau_l Psi: leg 0 acts on the codomain M factor, leg 1 on U
  for (const auto& [gme, tel] : tl.c) {
    Matrix<F> acc(fl.cod_dim, fl.dom_dim);
    for (const auto& [tm, c] : tel.t) {
      Matrix<F> t = fl.act_cod_M(c * verma::VermaModule<F>::mono_elem(tm[0]), cmax) *
                    fl.act_cod_U(verma::VermaModule<F>::mono_elem(tm[1]));
      acc += t * P;
    }
    rhs.add(gme, acc);
  }
  // -(Psi * tau_r): (Psi*(x ox y))(v) = (1 ox S(x))Psi(y v)
  for (const auto& [gme, tel] : tr.c) {
    Matrix<F> acc(fl.cod_dim, fl.dom_dim);
    for (const auto& [tm, c] : tel.t) {
      Elem<F> sx = c * antipode_g(g, verma::VermaModule<F>::mono_elem(tm[0]));
      acc += fl.act_cod_U(sx) * fl.psi_after(psi, verma::VermaModule<F>::mono_elem(tm[1]));
    }
    rhs.add(gme, -acc);
  }
  // (1 ox d)Psi on the U leg
  for (const auto& [gme, tel] : dd.c) {
    Matrix<F> acc(fl.cod_dim, fl.dom_dim);
    for (const auto& [tm, c] : tel.t)
      acc += fl.act_cod_U(c * verma::VermaModule<F>::mono_elem(tm[0])) * P;
    rhs.add(gme, acc);
  }
  (void)k;
  FactorizationReport rep;
  rep.which = std::string(1, which);
  rep.m = m;
  rep.pass = (lhs - rhs).is_zero();
  return rep;
}

// ---------------------------------------------------------------------------
// represented asymptotic boundary KZB operators and N-point functions
// ---------------------------------------------------------------------------

template <class F>
struct KZBContext {
  const GAlg<F>* g;
  const KAlg<F>* k;
  KRep<F> Vl, Vrs;  // Vrs = the dual-side representation applied directly
  std::vector<const FinDimModule<F>*> Us;
  int m;

  KZBContext(const GAlg<F>& g_, const KAlg<F>& k_, KRep<F> vl, KRep<F> vr_star,
             std::vector<const FinDimModule<F>*> us, int trunc)
      : g(&g_), k(&k_), Vl(std::move(vl)), Vrs(std::move(vr_star)), Us(std::move(us)), m(trunc) {}

  int nlegs() const { return int(Us.size()) + 2; }
  int dim() const {
    int d = Vl.dim * Vrs.dim;
    for (const auto* U : Us) d *= U->dim_total;
    return d;
  }

  static Matrix<F> k_word(const KRep<F>& rep, const Mono& word) {
    Matrix<F> out = Matrix<F>::identity(rep.dim);
    for (uint8_t s : word) out = out * rep.y[size_t(s)];
    return out;
  }

  // matrix of a tensor monomial over legs [K, G..G, K]
  Matrix<F> represent(const TMono& tm) const {
    Matrix<F> out = k_word(Vl, tm[0]);
    for (size_t i = 0; i < Us.size(); ++i) {
      Matrix<F> gm = Matrix<F>::identity(Us[i]->dim_total);
      for (uint8_t s : tm[i + 1]) gm = gm * Us[i]->sym_mat[size_t(s)];
      out = kron(out, gm);
    }
    out = kron(out, k_word(Vrs, tm[size_t(nlegs()) - 1]));
    return out;
  }

  Matrix<F> represent(const TElem<F>& t) const {
    Matrix<F> out(dim(), dim());
    for (const auto& [tm, c] : t.t) out += c * represent(tm);
    return out;
  }

  Series<Matrix<F>> represent(const Series<TElem<F>>& s) const {
    Series<Matrix<F>> out(*s.rs, s.lam, s.m);
    for (const auto& [gme, t] : s.c) out.add(gme, represent(t));
    return out;
  }

  // D_i = E_i - sum_{j<i} r^+_{ji} - kappa_i - sum_{j>i} r^-_{ij}, 1-based i
  DiffOp<Matrix<F>> bkzb_operator(int i) const {
    const auto& rs = g->rs();
    const int N = int(Us.size());
    DiffOp<Matrix<F>> op(rs);
    // E_i = sum Ginv_st d_{h_s} ox (h_t)_{U_i}
    for (int s = 0; s < rs.rank(); ++s) {
      Series<Matrix<F>> cs(rs, WeightVec(std::vector<Rational>(size_t(rs.rank()), Rational(0))),
                           m);
      Matrix<F> acc(dim(), dim());
      bool nonzero = false;
      for (int t = 0; t < rs.rank(); ++t) {
        const Rational& gst = rs.gram_inv()(s, t);
        if (sgn(gst) == 0) continue;
        TElem<F> ht;
        TMono tm((size_t(nlegs())));
        tm[size_t(i)] = Mono{uint8_t(g->id_h(t))};
        ht.add(tm, FieldOps<F>::from(gst));
        acc += represent(ht);
        nonzero = true;
      }
      if (!nonzero) continue;
      cs.add(Expo(size_t(rs.rank()), 0), acc);
      std::vector<int> dp(size_t(rs.rank()), 0);
      dp[size_t(s)] = 1;
      op.add_term(std::move(cs), dp);
    }
    Series<TElem<F>> sub(rs, WeightVec(std::vector<Rational>(size_t(rs.rank()), Rational(0))), m);
    for (int j = 1; j < i; ++j) sub += folded_r(*g, +1, nlegs(), j, i, m);
    sub += kappa_full(*g, *k, nlegs(), 0, i, nlegs() - 1, m);
    for (int j = i + 1; j <= N; ++j) sub += folded_r(*g, -1, nlegs(), i, j, m);
    op.add_term(-represent(sub), std::vector<int>(size_t(rs.rank()), 0));
    op.prune();
    return op;
  }

  // represented H^{(N)} = -(1/2) Delta + V^{(N)}: the left U(k) slot of the
  // universal Hamiltonian spreads over (V_l, U_1..U_N) via the iterated
  // coproduct; the right slot acts on V_r^*
  DiffOp<Matrix<F>> hamiltonian() const {
    const auto& rs = g->rs();
    DiffOp<Matrix<F>> op(rs);
    const int d = dim();
    Matrix<F> idm = Matrix<F>::identity(d);
    for (int s = 0; s < rs.rank(); ++s)
      for (int t = 0; t < rs.rank(); ++t) {
        const Rational& gst = rs.gram_inv()(s, t);
        if (sgn(gst) == 0) continue;
        Series<Matrix<F>> cs(rs, WeightVec(std::vector<Rational>(size_t(rs.rank()), Rational(0))),
                             m);
        cs.add(Expo(size_t(rs.rank()), 0), FieldOps<F>::from(Rational(-1, 2) * gst) * idm);
        std::vector<int> dp(size_t(rs.rank()), 0);
        ++dp[size_t(s)];
        ++dp[size_t(t)];
        op.add_term(std::move(cs), dp);
      }
    for (int p = 0; p < g->npos(); ++p) {
      const auto& alpha = rs.positive_roots()[size_t(p)];
      Rational na = rs.pairing(rs.weight_of_root(alpha), rs.weight_of_root(alpha));
      // Delta^{(N)}(y_alpha) over (V_l, U_1..U_N) and y on V_r^*
      Matrix<F> yl(d, d), yr(d, d);
      {
        TElem<F> t;
        TMono tm((size_t(nlegs())));
        tm[0] = Mono{uint8_t(p)};
        t.add(tm, FieldOps<F>::one());
        yl += represent(t);
        for (size_t j = 0; j < Us.size(); ++j) {
          TElem<F> tj;
          TMono tmj((size_t(nlegs())));
          // y in a G leg: e_alpha - e_{-alpha}
          std::vector<int> nalpha = alpha;
          for (int& x : nalpha) x = -x;
          TMono tme = tmj, tmf = tmj;
          tme[j + 1] = Mono{uint8_t(g->id_e(alpha))};
          tmf[j + 1] = Mono{uint8_t(g->id_e(nalpha))};
          tj.add(tme, FieldOps<F>::one());
          tj.add(tmf, -FieldOps<F>::one());
          yl += represent(tj);
        }
        TElem<F> tr2;
        TMono tmr((size_t(nlegs())));
        tmr[size_t(nlegs()) - 1] = Mono{uint8_t(p)};
        tr2.add(tmr, FieldOps<F>::one());
        yr += represent(tr2);
      }
      Series<F> isq = fseries::inv_xi_diff_sq<F>(rs, alpha, m);
      Series<Matrix<F>> pot(rs, isq.lam, m);
      Matrix<F> base = FieldOps<F>::from(na / 2) * idm + yl * yl + yr * yr;
      for (const auto& [gme, v] : isq.c) pot.add(gme, (-v) * base);
      Series<F> cross(rs, isq.lam, m);
      {
        std::vector<int> b2 = alpha;
        for (int& x : b2) x *= 2;
        Series<F> geo = fseries::expand_inverse_one_minus<F>(rs, b2, m);
        geo = fseries::series_mul(geo, geo);
        Series<F> pre(rs, isq.lam, m);
        Expo m1(size_t(rs.rank()), 0), m3(size_t(rs.rank()), 0);
        for (int i2 = 0; i2 < rs.rank(); ++i2) {
          m1[size_t(i2)] = -alpha[size_t(i2)];
          m3[size_t(i2)] = -3 * alpha[size_t(i2)];
        }
        pre.add(m1, FieldOps<F>::one());
        pre.add(m3, FieldOps<F>::one());
        cross = fseries::series_mul(pre, geo);
      }
      Matrix<F> ylyr = yl * yr;
      for (const auto& [gme, v] : cross.c) pot.add(gme, (-v) * ylyr);
      op.add_term(std::move(pot), std::vector<int>(size_t(rs.rank()), 0));
    }
    op.prune();
    return op;
  }
};

// formal N-point spherical function as a V_l ox U ox V_r^* valued series:
// coefficient at gamma is (phi_l ox id) Psi phi_r^gamma
template <class F>
Series<Matrix<F>> npoint_spherical(const GAlg<F>& g, const VertexChain<F>& ch,
                                   const KRep<F>& Vl, const std::vector<F>& v, const KRep<F>& Vr,
                                   const std::vector<F>& f, int m) {
  const auto& rs = g.rs();
  const VermaModule<F>& MlamN = *ch.mods.back();
  const VermaModule<F>& Mlam0 = *ch.mods.front();
  auto Cr = intertwine::phi_right(MlamN, Vr, f, m);
  auto Bl = intertwine::phi_left(Mlam0, Vl, v, Mlam0.depth());
  int Udim = 1;
  for (const auto* U : ch.Us) Udim *= U->dim_total;
  Series<Matrix<F>> out(rs, MlamN.highest_weight(), m);
  for (const auto& gamma : rs.enumerate_qminus(m)) {
    auto itc = Cr.find(gamma);
    if (itc == Cr.end()) continue;
    const Matrix<F>& C = itc->second;  // dimM(gamma) x dr
    if (C.zero()) continue;
    MW<F> mw;
    mw.wdim = Vr.dim;
    auto& slot = mw.comp[gamma];
    slot.assign(size_t(C.rows() * C.cols()), FieldOps<F>::zero());
    for (int i = 0; i < C.rows(); ++i)
      for (int j = 0; j < C.cols(); ++j) slot[size_t(i * C.cols() + j)] = C(i, j);
    MW<F> img = ch.apply(mw);
    std::vector<F> res = intertwine::apply_phi_left(Bl, Vl.dim, Mlam0, img);
    Matrix<F> col(int(res.size()), 1);
    for (size_t i = 0; i < res.size(); ++i) col(int(i), 0) = res[i];
    if (col.zero()) continue;
    out.add(gamma, col);
    (void)Udim;
  }
  return out;
}

struct KZBEigenReport {
  bool d_eigen = true;     // all D_i eigen equations
  bool h_eigen = false;    // H^{(N)} Schroedinger equation
  bool leading = false;    // leading coefficient = J_l(lam_N - rho)(v ox u) ox f
  int m = 0;
  bool pass() const { return d_eigen && h_eigen && leading; }
};

// full verification of the asymptotic boundary KZB eigen equations for the
// normalized N-point function of weight (lam_0..lam_N)
template <class F>
KZBEigenReport verify_bkzb_eigen(const GAlg<F>& g, const KAlg<F>& k, const KRep<F>& Vl,
                                 const KRep<F>& Vr, std::vector<const FinDimModule<F>*> Us,
                                 const WeightVec& lamN, const std::vector<std::vector<F>>& us,
                                 const std::vector<F>& v, const std::vector<F>& f, int m) {
  KZBEigenReport rep;
  rep.m = m;
  const auto& rs = g.rs();
  // chain at the rho-shifted weights
  WeightVec lamN_sh = rs.to_simple_root_basis(lamN) - rs.rho();
  auto ch = VertexChain<F>::build(g, Us, lamN_sh, us, m);
  Series<Matrix<F>> F0 = npoint_spherical(g, ch, Vl, v, Vr, f, m);
  Series<F> ds = fseries::delta_series<F>(rs, m, +1);
  auto smul = [](const F& a, const Matrix<F>& b) { return a * b; };
  Series<Matrix<F>> Fb = fseries::series_mul(ds, F0, smul);

  KZBContext<F> ctx(g, k, Vl, Vr.dual(), Us, m);
  auto mul = [](const Matrix<F>& a, const Matrix<F>& b) { return a * b; };
  // unshifted weights lam_i: lam_N and downward by the weights of the u_i
  std::vector<WeightVec> lams(ch.lams);
  for (auto& l : lams) l = l + rs.rho();
  for (size_t i = 1; i <= Us.size(); ++i) {
    auto D = ctx.bkzb_operator(int(i));
    Rational ev = (rs.pairing(lams[i], lams[i]) - rs.pairing(lams[i - 1], lams[i - 1])) / 2;
    Series<Matrix<F>> resid = fseries::apply(D, Fb, mul) - FieldOps<F>::from(ev) * Fb;
    if (!resid.is_zero()) rep.d_eigen = false;
  }
  auto H = ctx.hamiltonian();
  Rational evh = Rational(-1, 2) * rs.pairing(lams.back(), lams.back());
  rep.h_eigen = (fseries::apply(H, Fb, mul) - FieldOps<F>::from(evh) * Fb).is_zero();

  // leading coefficient: J_l(lam_N - rho)(v ox u) ox f
  Matrix<F> JL = intertwine::boundary_fusion(g, Vl, Us, lamN_sh);
  int D = 1;
  for (const auto* U : Us) D *= U->dim_total;
  // flatten v ox u
  std::vector<F> vu(size_t(Vl.dim * D), FieldOps<F>::zero());
  {
    std::vector<F> uflat(size_t(D), FieldOps<F>::zero());
    // u = u_1 ox ... ox u_N
    std::vector<int> idx;  // iterate all components
    std::function<void(size_t, int, F)> recur = [&](size_t leg, int flat, F c) {
      if (leg == Us.size()) {
        uflat[size_t(flat)] += c;
        return;
      }
      for (int i = 0; i < Us[leg]->dim_total; ++i) {
        if (sphf::is_zero(us[leg][size_t(i)])) continue;
        recur(leg + 1, flat * Us[leg]->dim_total + i, c * us[leg][size_t(i)]);
      }
    };
    recur(0, 0, FieldOps<F>::one());
    for (int i = 0; i < Vl.dim; ++i)
      for (int j = 0; j < D; ++j) vu[size_t(i * D + j)] = v[size_t(i)] * uflat[size_t(j)];
  }
  Matrix<F> vu_col(Vl.dim * D, 1);
  for (int i = 0; i < Vl.dim * D; ++i) vu_col(i, 0) = vu[size_t(i)];
  Matrix<F> lead_vu = JL * vu_col;
  const Matrix<F>* lead = Fb.at(Expo(size_t(rs.rank()), 0));
  bool ok = lead != nullptr;
  if (ok) {
    // expected: (J_l (v ox u)) ox f
    Matrix<F> expect(Vl.dim * D * Vr.dim, 1);
    for (int i = 0; i < Vl.dim * D; ++i)
      for (int j = 0; j < Vr.dim; ++j)
        expect(i * Vr.dim + j, 0) = lead_vu(i, 0) * f[size_t(j)];
    ok = (*lead == expect);
  }
  rep.leading = ok;
  return rep;
}

// symbolic boundary KZB operator with universal U(k) ox U(g)^N ox U(k)
// coefficients (desk-scale: N <= 2, rank one)
template <class F>
DiffOp<TElem<F>> universal_bkzb_operator(const GAlg<F>& g, const KAlg<F>& k, int i, int N,
                                         int m) {
  const auto& rs = g.rs();
  const int legs = N + 2;
  DiffOp<TElem<F>> op(rs);
  for (int s2 = 0; s2 < rs.rank(); ++s2) {
    TElem<F> acc;
    for (int t = 0; t < rs.rank(); ++t) {
      const Rational& gst = rs.gram_inv()(s2, t);
      if (sgn(gst) == 0) continue;
      TMono tm((size_t(legs)));
      tm[size_t(i)] = Mono{uint8_t(g.id_h(t))};
      acc.add(tm, FieldOps<F>::from(gst));
    }
    if (acc.is_zero()) continue;
    Series<TElem<F>> cs = zero_dyn<F>(rs, legs, m);
    cs.add(Expo(size_t(rs.rank()), 0), acc);
    std::vector<int> dp(size_t(rs.rank()), 0);
    dp[size_t(s2)] = 1;
    op.add_term(std::move(cs), dp);
  }
  Series<TElem<F>> sub = zero_dyn<F>(rs, legs, m);
  for (int j = 1; j < i; ++j) sub += folded_r(g, +1, legs, j, i, m);
  sub += kappa_full(g, k, legs, 0, i, legs - 1, m);
  for (int j = i + 1; j <= N; ++j) sub += folded_r(g, -1, legs, i, j, m);
  op.add_term(-sub, std::vector<int>(size_t(rs.rank()), 0));
  op.prune();
  return op;
}

// symbolic commutativity [D_i, D_j] = 0 in the full tensor algebra
template <class F>
bool verify_commutativity_universal(const GAlg<F>& g, const KAlg<F>& k, int N, int m) {
  std::vector<const envalg::UEA<F>*> legs;
  legs.push_back(&k.uea());
  for (int j = 0; j < N; ++j) legs.push_back(&g.uea());
  legs.push_back(&k.uea());
  TensorAlg<F> alg(legs);
  auto mul = [&alg](const TElem<F>& a, const TElem<F>& b) { return alg.mul(a, b); };
  std::vector<DiffOp<TElem<F>>> Ds;
  for (int i = 1; i <= N; ++i) Ds.push_back(universal_bkzb_operator(g, k, i, N, m));
  for (int i = 0; i < N; ++i)
    for (int j = i; j < N; ++j)
      if (!fseries::commutator(Ds[size_t(i)], Ds[size_t(j)], mul).is_zero()) return false;
  return true;
}

// operator commutators in represented mode: [D_i, D_j] and [D_i, H^{(N)}]
template <class F>
bool verify_commutativity(const KZBContext<F>& ctx) {
  auto mul = [](const Matrix<F>& a, const Matrix<F>& b) { return a * b; };
  const int N = int(ctx.Us.size());
  std::vector<DiffOp<Matrix<F>>> Ds;
  for (int i = 1; i <= N; ++i) Ds.push_back(ctx.bkzb_operator(i));
  for (int i = 0; i < N; ++i)
    for (int j = i; j < N; ++j)
      if (!fseries::commutator(Ds[size_t(i)], Ds[size_t(j)], mul).is_zero()) return false;
  auto H = ctx.hamiltonian();
  for (int i = 0; i < N; ++i)
    if (!fseries::commutator(Ds[size_t(i)], H, mul).is_zero()) return false;
  return true;
}

}  // namespace sphf::kzb
