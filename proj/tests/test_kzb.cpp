#include <doctest.h>

#include "sphf/kzb.hpp"

using namespace sphf;
using namespace sphf::envalg;
using namespace sphf::fseries;
using namespace sphf::kzb;
using rootdata::CartanType;
using rootdata::RootSystem;
using rootdata::WeightVec;
using Q6 = Quad<6>;

namespace {
WeightVec w(std::vector<Rational> c) { return WeightVec(std::move(c)); }
const RootSystem& rsA1() {
  static auto rs = RootSystem::build(CartanType::A1);
  return rs;
}
const GAlg<Rational>& gA1() {
  static auto g = GAlg<Rational>::build(rsA1());
  return g;
}
const KAlg<Rational>& kA1() {
  static auto k = KAlg<Rational>::build(gA1());
  return k;
}
const RootSystem& rsA2() {
  static auto rs = RootSystem::build(CartanType::A2);
  return rs;
}
const GAlg<Q6>& gA2() {
  static auto g = GAlg<Q6>::build(rsA2());
  return g;
}
const KAlg<Q6>& kA2() {
  static auto k = KAlg<Q6>::build(gA2());
  return k;
}

// theta applied to one G-leg of a tensor series (test-side helper)
template <class F>
Series<TElem<F>> theta_leg(const GAlg<F>& g, const Series<TElem<F>>& s, int leg) {
  Series<TElem<F>> out(*s.rs, s.lam, s.m);
  for (const auto& [gm, tel] : s.c) {
    TElem<F> acc;
    for (const auto& [tm, c] : tel.t) {
      Elem<F> im = g.theta(verma::VermaModule<F>::mono_elem(tm[size_t(leg)]));
      for (const auto& [mo, mc] : im.t) {
        TMono nm = tm;
        nm[size_t(leg)] = mo;
        acc.add(nm, c * mc);
      }
    }
    out.add(gm, acc);
  }
  return out;
}

// swap two legs
template <class F>
Series<TElem<F>> swap_legs(const Series<TElem<F>>& s, int a, int b) {
  Series<TElem<F>> out(*s.rs, s.lam, s.m);
  for (const auto& [gm, tel] : s.c) {
    TElem<F> acc;
    for (const auto& [tm, c] : tel.t) {
      TMono nm = tm;
      std::swap(nm[size_t(a)], nm[size_t(b)]);
      acc.add(nm, c);
    }
    out.add(gm, acc);
  }
  return out;
}

// multiplication map m: U(g) ox U(g) -> U(g) on a 2-leg series
template <class F>
Series<TElem<F>> mult_legs(const GAlg<F>& g, const Series<TElem<F>>& s) {
  Series<TElem<F>> out(*s.rs, s.lam, s.m);
  for (const auto& [gm, tel] : s.c) {
    TElem<F> acc;
    for (const auto& [tm, c] : tel.t) {
      Elem<F> prod = g.uea().mul_mono(tm[0], tm[1]);
      for (const auto& [mo, mc] : prod.t) acc.add(TMono{mo}, c * mc);
    }
    out.add(gm, acc);
  }
  return out;
}
}  // namespace

TEST_CASE("folded r-matrices match their explicit displays") {
  const int m = 8;
  // r^+ = sum_{a in R} y_a ox e_a/(1-xi_{-2a})
  auto rp = folded_r(gA1(), +1, 2, 0, 1, m);
  Series<TElem<Rational>> expect = zero_dyn<Rational>(rsA1(), 2, m);
  for (int sign : {+1, -1}) {
    std::vector<int> alpha{sign};
    auto coef = inv_one_minus_xi_m2<Rational>(rsA1(), alpha, m);
    for (int es : {+1, -1}) {
      TMono tm(2);
      tm[0] = Mono{uint8_t(gA1().id_e(std::vector<int>{es}))};
      tm[1] = Mono{uint8_t(gA1().id_e(alpha))};
      // y_alpha with alpha = sign*a expands as sign*(e_a - e_{-a})
      TElem<Rational> t;
      t.add(tm, es > 0 ? Rational(sign) : Rational(-sign));
      add_scaled(expect, coef, t);
    }
  }
  CHECK(rp == expect);
  // r^- = sum x ox x + sum (e_a + e_{-a}) ox e_a/(1-xi_{-2a})
  auto rm = folded_r(gA1(), -1, 2, 0, 1, m);
  Series<TElem<Rational>> expect2 = zero_dyn<Rational>(rsA1(), 2, m);
  {
    TMono tm(2);
    tm[0] = Mono{uint8_t(gA1().id_h(0))};
    tm[1] = Mono{uint8_t(gA1().id_h(0))};
    TElem<Rational> t;
    t.add(tm, rsA1().gram_inv()(0, 0));
    expect2.add({0}, t);
  }
  for (int sign : {+1, -1}) {
    std::vector<int> alpha{sign};
    auto coef = inv_one_minus_xi_m2<Rational>(rsA1(), alpha, m);
    for (int es : {+1, -1}) {
      TMono tm(2);
      tm[0] = Mono{uint8_t(gA1().id_e(std::vector<int>{es}))};
      tm[1] = Mono{uint8_t(gA1().id_e(alpha))};
      TElem<Rational> t;
      t.add(tm, Rational(1));
      add_scaled(expect2, coef, t);
    }
  }
  CHECK(rm == expect2);
}

TEST_CASE("r_theta1 is the symmetric twisted r-matrix") {
  const int m = 6;
  auto rt = r_theta1(gA2(), 2, 0, 1, m);
  CHECK(swap_legs(rt, 0, 1) == rt);
  // r^{theta1} = (theta ox id) r
  CHECK(theta_leg(gA2(), felder_r(gA2(), 2, 0, 1, m), 0) == rt);
  // height-0 part of r is the classical r-matrix -(1/2)x ox x - sum_{a>0} e_{-a} ox e_a
  auto r = felder_r(gA2(), 2, 0, 1, m);
  const TElem<Q6>* h0 = r.at({0, 0});
  REQUIRE(h0 != nullptr);
  TElem<Q6> expect;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      if (sgn(rsA2().gram_inv()(i, j)) == 0) continue;
      TMono tm(2);
      tm[0] = Mono{uint8_t(gA2().id_h(i))};
      tm[1] = Mono{uint8_t(gA2().id_h(j))};
      expect.add(tm, FieldOps<Q6>::from(Rational(-1, 2) * rsA2().gram_inv()(i, j)));
    }
  for (int p = 0; p < 3; ++p) {
    TMono tm(2);
    tm[0] = Mono{uint8_t(gA2().id_f(p))};
    tm[1] = Mono{uint8_t(gA2().id_ep(p))};
    expect.add(tm, -FieldOps<Q6>::one());
  }
  CHECK(*h0 == expect);
}

TEST_CASE("leg membership of the folded matrices") {
  const int m = 6;
  auto rp = folded_r(gA2(), +1, 2, 0, 1, m);
  auto rm = folded_r(gA2(), -1, 2, 0, 1, m);
  auto rt = r_tilde_plus(gA2(), 2, 0, 1, m);
  CHECK(theta_leg(gA2(), rp, 0) == rp);    // first leg in k
  CHECK(theta_leg(gA2(), rm, 0) == -rm);   // first leg in p
  CHECK(theta_leg(gA2(), rt, 1) == rt);    // second leg in k
}

TEST_CASE("kappa-core is m(r^theta1); b = d + m(r^theta1)") {
  const int m = 8;
  auto rt = r_theta1(gA1(), 2, 0, 1, m);
  CHECK(mult_legs(gA1(), rt) == kappa_core(gA1(), 1, 0, m));
  CHECK(b_term(gA1(), 1, 0, m) == d_term(gA1(), 1, 0, m) + kappa_core(gA1(), 1, 0, m));
  auto rt2 = r_theta1(gA2(), 2, 0, 1, m);
  CHECK(mult_legs(gA2(), rt2) == kappa_core(gA2(), 1, 0, m));
  CHECK(b_term(gA2(), 1, 0, m) == d_term(gA2(), 1, 0, m) + kappa_core(gA2(), 1, 0, m));
}

TEST_CASE("kappa decomposes as r^+ (+) kappa-core (+) r~^+") {
  // expand the U(k)-legs of kappa into U(g) words and compare with the folded
  // pieces placed on the outer legs (the alternative form of kappa)
  const int m = 6;
  auto kap = kappa_full(gA1(), kA1(), 3, 0, 1, 2, m);
  // expand k-legs: y_p words -> e - f products
  Series<TElem<Rational>> expanded = zero_dyn<Rational>(rsA1(), 3, m);
  for (const auto& [gm, tel] : kap.c) {
    for (const auto& [tm, c] : tel.t) {
      Elem<Rational> l0 = kA1().expand_in_g(tm[0]);
      Elem<Rational> l2 = kA1().expand_in_g(tm[2]);
      for (const auto& [m0, c0] : l0.t)
        for (const auto& [m2, c2] : l2.t) {
          TMono nm(3);
          nm[0] = m0;
          nm[1] = tm[1];
          nm[2] = m2;
          TElem<Rational> t;
          t.add(nm, c * c0 * c2);
          expanded += [&] {
            Series<TElem<Rational>> s = zero_dyn<Rational>(rsA1(), 3, m);
            s.add(gm, t);
            return s;
          }();
        }
    }
  }
  Series<TElem<Rational>> expect =
      folded_r(gA1(), +1, 3, 0, 1, m) + kappa_core(gA1(), 3, 1, m) + r_tilde_plus(gA1(), 3, 1, 2, m);
  CHECK(expanded == expect);
}

TEST_CASE("mixed cdYBE: A1 and A2, with negative control") {
  for (auto& rep : verify_cdybe(gA1(), kA1(), 8)) {
    CHECK(rep.pass);
    CHECK(rep.residual_support.empty());
  }
  for (auto& rep : verify_cdybe(gA2(), kA2(), 5)) CHECK(rep.pass);
  auto bad = verify_cdybe(gA1(), kA1(), 8, true);
  CHECK_FALSE(bad[0].pass);
  CHECK_FALSE(bad[0].residual_support.empty());
}

TEST_CASE("mixed classical dynamical reflection equation") {
  CHECK(verify_reflection(gA1(), kA1(), 8).pass);
  CHECK(verify_reflection(gA2(), kA2(), 4).pass);
}

TEST_CASE("residuals are height-stable under re-truncation") {
  // vanishing at m implies vanishing at m' < m: recompute at smaller heights
  for (int m2 : {3, 5}) {
    for (auto& rep : verify_cdybe(gA1(), kA1(), m2)) CHECK(rep.pass);
    CHECK(verify_reflection(gA1(), kA1(), m2).pass);
  }
}

TEST_CASE("factorizations of the Casimir through a truncated vertex operator") {
  auto U = verma::irrep(gA1(), w({Rational(1)}), 4);  // adjoint
  WeightVec lam = w({Rational(7, 9)});
  std::vector<Rational> u(3, Rational(0));
  for (int i = 0; i < 3; ++i)
    if (U.wt_off[size_t(i)] == Expo{-1}) u[size_t(i)] = Rational(1);  // zero weight
  auto ra = verify_factorization(gA1(), kA1(), 'a', lam, U, u, 4, 6);
  CHECK(ra.pass);
  auto rb = verify_factorization(gA1(), kA1(), 'b', lam, U, u, 4, 6);
  CHECK(rb.pass);
  // negative control: drop d in case a
  auto bad = verify_factorization(gA1(), kA1(), 'a', lam, U, u, 4, 6, true);
  CHECK_FALSE(bad.pass);
  // trivial U: both sides vanish
  auto T = verma::trivial_module(gA1());
  auto rt = verify_factorization(gA1(), kA1(), 'a', lam, T, {Rational(1)}, 4, 6);
  CHECK(rt.pass);
}

TEST_CASE("twisted commutation: -r^t1 D - D * r^t1 = (1 ox m(r^t1)) D") {
  const int depth = 3, m = 6;
  auto U = verma::irrep(gA1(), w({Rational(1)}), 4);
  WeightVec lam = w({Rational(5, 7)});
  std::vector<Rational> u(3, Rational(0));
  for (int i = 0; i < 3; ++i)
    if (U.wt_off[size_t(i)] == Expo{-1}) u[size_t(i)] = Rational(1);
  const int maxht = 1, spread = 2;
  const int cmax = depth + maxht + spread;
  verma::VermaModule<Rational> Mlam(gA1(), lam, depth + 2 * maxht);
  verma::VermaModule<Rational> Mmu(gA1(), lam, cmax + 2 * maxht);
  auto psi = intertwine::vertex_operator(Mlam, Mmu, U, u, depth + maxht);
  FlatHom<Rational> fl(Mlam, Mmu, U, depth);
  Matrix<Rational> P = fl.flatten(psi);
  auto rt = r_theta1(gA1(), 2, 0, 1, m);
  Series<Matrix<Rational>> lhs(rsA1(), w({Rational(0)}), m), rhs(rsA1(), w({Rational(0)}), m);
  for (const auto& [gm, tel] : rt.c) {
    Matrix<Rational> acc(fl.cod_dim, fl.dom_dim);
    for (const auto& [tm, c] : tel.t) {
      // -(x ox y) D: x on M-cod, y on U
      acc -= fl.act_cod_M(c * verma::VermaModule<Rational>::mono_elem(tm[0]), cmax) *
             fl.act_cod_U(verma::VermaModule<Rational>::mono_elem(tm[1])) * P;
      // -(D * (x ox y)) = -(1 ox S(x)) D (y .)
      Elem<Rational> sx = c * antipode_g(gA1(), verma::VermaModule<Rational>::mono_elem(tm[0]));
      acc -= fl.act_cod_U(sx) * fl.psi_after(psi, verma::VermaModule<Rational>::mono_elem(tm[1]));
    }
    lhs.add(gm, acc);
  }
  auto mr = mult_legs(gA1(), rt);
  for (const auto& [gm, tel] : mr.c) {
    Matrix<Rational> acc(fl.cod_dim, fl.dom_dim);
    for (const auto& [tm, c] : tel.t)
      acc += fl.act_cod_U(c * verma::VermaModule<Rational>::mono_elem(tm[0])) * P;
    rhs.add(gm, acc);
  }
  CHECK(lhs == rhs);
}

TEST_CASE("N-point spherical function: N = 0 reduces to the elementary one") {
  radial::RadialCtx<Rational> rctx(gA1(), kA1());
  auto Vl = intertwine::KRep<Rational>::character(rsA1(), Rational(1, 3));
  auto Vr = intertwine::KRep<Rational>::character(rsA1(), Rational(-2, 5));
  WeightVec lam = w({Rational(5, 7)});
  const int m = 6;
  auto ch = intertwine::VertexChain<Rational>::build(gA1(), {}, lam, {}, m);
  auto F0 = npoint_spherical(gA1(), ch, Vl, {Rational(1)}, Vr, {Rational(1)}, m);
  verma::VermaModule<Rational> M(gA1(), lam, m);
  auto Bl = intertwine::phi_left(M, Vl, {Rational(1)}, m);
  auto Cr = intertwine::phi_right(M, Vr, {Rational(1)}, m);
  auto Fe = hcm::formal_spherical(rsA1(), M, Bl, Cr, 1, 1, m);
  CHECK(F0 == Fe);
}

TEST_CASE("boundary KZB operators: N=1 structure and eigen equations") {
  auto U = verma::irrep(gA1(), w({Rational(1)}), 4);
  auto V2 = verma::irrep(gA1(), w({Rational(1, 2)}), 3);
  auto Vl = intertwine::KRep<Rational>::from_findim(V2);
  auto Vr = intertwine::KRep<Rational>::from_findim(V2);
  const int m = 4;
  // u of weight alpha: lam_0 = lam_1 - alpha
  std::vector<Rational> u(3, Rational(0));
  for (int i = 0; i < 3; ++i)
    if (U.wt_off[size_t(i)] == Expo{0}) u[size_t(i)] = Rational(1);
  WeightVec lam = w({Rational(22, 7)});
  auto rep = verify_bkzb_eigen(gA1(), kA1(), Vl, Vr, {&U}, lam, {u},
                               {Rational(1), Rational(2)}, {Rational(1), Rational(-1)}, m);
  CHECK(rep.d_eigen);
  CHECK(rep.h_eigen);
  CHECK(rep.leading);
}

TEST_CASE("boundary KZB eigen equations, N = 2 with a zero-weight insertion") {
  auto U = verma::irrep(gA1(), w({Rational(1)}), 4);
  auto V2 = verma::irrep(gA1(), w({Rational(1, 2)}), 3);
  auto Vl = intertwine::KRep<Rational>::from_findim(V2);
  auto Vr = intertwine::KRep<Rational>::from_findim(V2);
  const int m = 3;
  std::vector<Rational> u1(3, Rational(0)), u2(3, Rational(0));
  for (int i = 0; i < 3; ++i) {
    if (U.wt_off[size_t(i)] == Expo{0}) u1[size_t(i)] = Rational(1);   // weight alpha
    if (U.wt_off[size_t(i)] == Expo{-1}) u2[size_t(i)] = Rational(1);  // weight 0
  }
  WeightVec lam = w({Rational(22, 7)});
  auto rep = verify_bkzb_eigen(gA1(), kA1(), Vl, Vr, {&U, &U}, lam, {u1, u2},
                               {Rational(1), Rational(0)}, {Rational(0), Rational(1)}, m);
  CHECK(rep.d_eigen);
  CHECK(rep.h_eigen);
  CHECK(rep.leading);
}

TEST_CASE("symbolic commutativity of the universal KZB operators (N=2, rank one)") {
  CHECK(verify_commutativity_universal(gA1(), kA1(), 2, 4));
}

TEST_CASE("commutativity of the represented KZB operators") {
  auto U = verma::irrep(gA1(), w({Rational(1)}), 4);
  auto V2 = verma::irrep(gA1(), w({Rational(1, 2)}), 3);
  auto Vl = intertwine::KRep<Rational>::from_findim(V2);
  auto Vrs = intertwine::KRep<Rational>::from_findim(V2).dual();
  KZBContext<Rational> ctx(gA1(), kA1(), Vl, Vrs, {&U, &U}, 5);
  CHECK(verify_commutativity(ctx));
}
