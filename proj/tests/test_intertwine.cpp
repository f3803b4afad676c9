#include <doctest.h>

#include <random>

#include "sphf/intertwine.hpp"
#include "sphf/rankone.hpp"

using namespace sphf;
using namespace sphf::envalg;
using namespace sphf::verma;
using namespace sphf::intertwine;
using rootdata::CartanType;
using rootdata::RootSystem;
using rootdata::WeightVec;
using Gi = GaussianRational;
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
const GAlg<Gi>& gA1i() {
  static auto g = GAlg<Gi>::build(rsA1());
  return g;
}
const RootSystem& rsA2() {
  static auto rs = RootSystem::build(CartanType::A2);
  return rs;
}
const GAlg<Q6>& gA2() {
  static auto g = GAlg<Q6>::build(rsA2());
  return g;
}
}  // namespace

TEST_CASE("phi_left: rank-one weight components are Meixner-Pollaczek values") {
  // phi(u_n) = 2^n p_n^{(-lam/2)}(-nu)/n!; our basis b_n = (n!/2^n)u_n gives
  // phi(b_n) = p_n^{(-lam/2)}(-nu)
  Rational lam_c(5, 7);
  Gi nu(Rational(0), Rational(2, 3));
  VermaModule<Gi> M(gA1i(), w({lam_c / 2}), 8);
  auto V = KRep<Gi>::character(rsA1(), nu);
  auto B = phi_left(M, V, {FieldOps<Gi>::one()}, 8);
  for (int n = 0; n <= 8; ++n) {
    auto p = rankone::mp_poly<Gi>(n, -lam_c / 2);
    CHECK(B.at({-n})(0, 0) == rankone::mp_eval(p, -nu));
  }
  // nu = 0: depth-1 component vanishes (p_1(0) = 0)
  auto B0 = phi_left(M, KRep<Gi>::character(rsA1(), Gi(0)), {FieldOps<Gi>::one()}, 4);
  CHECK(is_zero(B0.at({-1})(0, 0)));
  CHECK(phi_left_equivariant(M, V, B, 7));
}

TEST_CASE("phi_left: equivariance and expectation roundtrip on A2") {
  WeightVec lam = w({Rational(2, 5), Rational(3, 7)});
  VermaModule<Q6> M(gA2(), lam, 4);
  auto U3 = irrep(gA2(), rsA2().to_simple_root_basis(WeightVec({Rational(1), Rational(0)},
                                                              WeightVec::Basis::FundamentalWeight)),
                  4);
  auto V = KRep<Q6>::from_findim(U3);
  std::vector<Q6> v0 = {Q6(1), Q6(Rational(2, 3)), Q6(Rational(-1, 4))};
  auto B = phi_left(M, V, v0, 4);
  // phi(m_lambda) = v
  Expo zero{0, 0};
  for (int i = 0; i < 3; ++i) CHECK(B.at(zero)(i, 0) == v0[size_t(i)]);
  CHECK(phi_left_equivariant(M, V, B, 2));
}

TEST_CASE("phi_right: rank-one components match the closed form") {
  // phi_right with character value c solves y v = c v; the closed form for
  // v in bar M^{chi_{-nu}} has components (-2)^n p_n(-nu)/(-lam)_n u_n, so
  // c = -nu and the b_n coordinate is (-4)^n p_n(c)/((-lam)_n n!)
  Rational lam_c(1, 2);
  Gi c(Rational(0), Rational(1, 5));
  VermaModule<Gi> M(gA1i(), w({lam_c / 2}), 8);
  auto V = KRep<Gi>::character(rsA1(), c);
  auto C = phi_right(M, V, {FieldOps<Gi>::one()}, 8);
  for (int n = 0; n <= 8; ++n) {
    Gi expect = rankone::phi_right_component(lam_c, -c, n);
    // convert u_n coefficient to b_n coordinate: u_n = (2^n/n!) b_n
    Rational p2(1);
    for (int i = 0; i < n; ++i) p2 *= 2;
    expect = expect * FieldOps<Gi>::from(p2 / rankone::factorial(n));
    CHECK(C.at({-n})(0, 0) == expect);
  }
  CHECK(phi_right_equivariant(M, V, C, 7));
  // depth-1 coefficient in the u-basis: (-2) p_1(c)/(-lam_c)_1 = 2c/lam_c;
  // the u -> b conversion factor 2 makes the b-coordinate 4c/lam_c
  CHECK(C.at({-1})(0, 0) == Gi(Rational(4)) * c / FieldOps<Gi>::from(lam_c));
}

TEST_CASE("phi_right: non-generic weight errors") {
  VermaModule<Rational> M(gA1(), w({Rational(0)}), 3);
  auto V = KRep<Rational>::character(rsA1(), Rational(1, 3));
  CHECK_THROWS_AS(phi_right(M, V, {Rational(1)}, 3), NonGenericWeight);
}

TEST_CASE("phi_right: uniqueness (rerun gives identical blocks)") {
  WeightVec lam = w({Rational(2, 5), Rational(3, 7)});
  VermaModule<Q6> M(gA2(), lam, 5);
  auto U3 = irrep(gA2(), rsA2().to_simple_root_basis(WeightVec({Rational(1), Rational(0)},
                                                              WeightVec::Basis::FundamentalWeight)),
                  4);
  auto V = KRep<Q6>::from_findim(U3).dual();
  std::vector<Q6> f0 = {Q6(Rational(1, 2)), Q6(2), Q6(Rational(-1, 3))};
  auto C1 = phi_right(M, V, f0, 5);
  auto C2 = phi_right(M, V, f0, 5);
  for (const auto& [gk, mat] : C1) CHECK(C2.at(gk) == mat);
  // the checker needs the blocks one root-height below the probed weights
  CHECK(phi_right_equivariant(M, V, C1, 3));
}

TEST_CASE("chi_invariant_vector agrees with phi_right on random (lambda, nu)") {
  std::mt19937_64 rng(2024);
  int done = 0;
  while (done < 20) {
    Rational lam_c = ratio(long(rng() % 19) - 9, 1 + long(rng() % 7));
    if (lam_c.get_den() == 1 && sgn(lam_c) >= 0) continue;
    Rational nu = ratio(long(rng() % 9) - 4, 1 + long(rng() % 5));
    VermaModule<Rational> M(gA1(), w({lam_c / 2}), 8);
    auto V = KRep<Rational>::character(rsA1(), nu);
    GradedBlocks<Rational> C;
    try {
      C = phi_right(M, V, {Rational(1)}, 8);
    } catch (const NonGenericWeight&) {
      continue;
    }
    auto X = chi_invariant_vector(M, nu, 8);
    for (int n = 0; n <= 8; ++n) CHECK(C.at({-n}) == X.at({-n}));
    ++done;
  }
}

TEST_CASE("vertex operator: trivial module gives the identity") {
  WeightVec lam = w({Rational(3, 7)});
  VermaModule<Rational> M(gA1(), lam, 5);
  auto U = trivial_module(gA1());
  auto psi = vertex_operator(M, M, U, {Rational(1)}, 5);
  for (const auto& [gamma, bm] : psi.blocks) {
    CHECK(bm.size() == 1);
    CHECK(bm.at(gamma) == Matrix<Rational>::identity(M.dim_at(gamma)));
  }
  CHECK(vertex_equivariant(psi, 3));
}

TEST_CASE("vertex operator: sl2 adjoint with zero-weight datum") {
  // Psi(m_lam) = m_lam ox u0 + c f m_lam ox (highest root vector); the
  // depth-1 solve fixes c; we freeze the oracle value computed from the
  // singular-vector equation here: c = -(u-action constant)/lam-type value.
  WeightVec lam = w({Rational(5, 3)});  // lam_c = 10/3
  auto U = irrep(gA1(), w({Rational(1)}), 4);  // adjoint, dim 3
  REQUIRE(U.dim_total == 3);
  VermaModule<Rational> M(gA1(), lam, 6);
  // zero-weight basis vector of the adjoint
  std::vector<Rational> u(3, Rational(0));
  int zidx = -1, hidx = -1;
  for (int i = 0; i < 3; ++i) {
    if (U.wt_off[size_t(i)] == Expo{-1}) zidx = i;   // hw - alpha = 0 weight
    if (U.wt_off[size_t(i)] == Expo{0}) hidx = i;
  }
  REQUIRE(zidx >= 0);
  REQUIRE(hidx >= 0);
  u[size_t(zidx)] = Rational(1);
  auto psi = vertex_operator(M, M, U, u, 5);
  CHECK(vertex_equivariant(psi, 3));
  auto ev = expectation_value(psi);
  CHECK(ev == u);
  // depth-1 component: solve (e ox 1) w_{alpha} + (1 ox e) w_0 = 0 by hand:
  // w_alpha = c * (f m ox e-vector), e f m = (lam,alpha) m = lam_c/4 m,
  // (1 ox e) u0 = (e-action on zero weight vector); equate and read off c
  Expo zero{0};
  const auto& blk0 = psi.blocks.at(zero);
  const Matrix<Rational>& w1 = blk0.at(Expo{-1});  // rows: iM*3+iU over M[-1] ox U
  // the only allowed U weight at level alpha is the highest one
  Rational c_found = w1(0 * 3 + hidx, 0);
  // oracle: c * (lam_c/4) + (e u)_hw-coeff = 0
  Matrix<Rational> eU = U.sym_mat[size_t(gA1().id_ep(0))];
  Rational e_u = eU(hidx, zidx);
  Rational lam_c = Rational(10, 3);
  CHECK(c_found * (lam_c / 4) + e_u == Rational(0));
  CHECK(!is_zero(c_found));
}

TEST_CASE("vertex operator: non-weight datum and weight mismatch throw") {
  WeightVec lam = w({Rational(5, 3)});
  auto U = irrep(gA1(), w({Rational(1)}), 4);
  VermaModule<Rational> M(gA1(), lam, 4);
  std::vector<Rational> bad = {Rational(1), Rational(1), Rational(1)};
  CHECK_THROWS(vertex_operator(M, M, U, bad, 4));
  std::vector<Rational> u(3, Rational(0));
  for (int i = 0; i < 3; ++i)
    if (U.wt_off[size_t(i)] == Expo{0}) u[size_t(i)] = Rational(1);
  CHECK_THROWS(vertex_operator(M, M, U, u, 4));  // weight alpha != 0
}

TEST_CASE("fusion: single factor and trivial factors give the identity") {
  auto U = irrep(gA1(), w({Rational(1)}), 4);
  WeightVec lam = w({Rational(7, 5)});
  auto J1 = fusion_operator<Rational>(gA1(), {&U}, lam);
  CHECK(J1 == Matrix<Rational>::identity(3));
  auto T = trivial_module(gA1());
  auto Jt = fusion_operator<Rational>(gA1(), {&T, &T, &T}, lam);
  CHECK(Jt == Matrix<Rational>::identity(1));
}

TEST_CASE("fusion: triangular for the right-tail weight filtration, ones on the diagonal") {
  // the M-weight pushed through the vertex chain forces, for every nonzero
  // entry, dominance of each right-tail partial weight sum; within an equal
  // tail the entry is the identity
  auto U = irrep(gA1(), w({Rational(1)}), 4);
  WeightVec lam = w({Rational(7, 5)});
  auto J = fusion_operator<Rational>(gA1(), {&U, &U}, lam);
  CHECK(J.inverse().has_value());
  auto wt1 = [&](int flat) { return U.wt_off[size_t(flat / 3)]; };
  auto wt2 = [&](int flat) { return U.wt_off[size_t(flat % 3)]; };
  auto dom_geq = [&](const Expo& a, const Expo& b) {
    for (size_t k = 0; k < a.size(); ++k)
      if (a[k] < b[k]) return false;
    return true;
  };
  for (int i = 0; i < 9; ++i) {
    CHECK(J(i, i) == Rational(1));
    for (int j = 0; j < 9; ++j) {
      if (i == j || is_zero(J(i, j))) continue;
      // total weight preserved
      Expo ti = wt1(i), tj = wt1(j);
      for (size_t k = 0; k < ti.size(); ++k) {
        CHECK(ti[k] + wt2(i)[k] == tj[k] + wt2(j)[k]);
      }
      // tail sums dominate: wt2(row) >= wt2(col), strict somewhere overall
      CHECK(dom_geq(wt2(i), wt2(j)));
      bool tail_equal = wt2(i) == wt2(j);
      CHECK_FALSE(tail_equal);  // equal tails force equal rows here (1-dim wt spaces)
    }
  }
}

TEST_CASE("boundary fusion: trivial factors give the identity on V") {
  auto T = trivial_module(gA1());
  auto V = KRep<Rational>::from_findim(irrep(gA1(), w({Rational(1, 2)}), 3));
  auto JL = boundary_fusion<Rational>(gA1(), V, {&T}, w({Rational(7, 5)}));
  CHECK(JL == Matrix<Rational>::identity(2));
}

TEST_CASE("boundary fusion: unitriangularity of J_l (id ox J^{-1}) and det 1") {
  auto U = irrep(gA1(), w({Rational(1)}), 4);
  auto V = KRep<Rational>::from_findim(irrep(gA1(), w({Rational(1, 2)}), 3));
  WeightVec lam = w({Rational(7, 5)});
  auto J = fusion_operator<Rational>(gA1(), {&U, &U}, lam);
  auto JL = boundary_fusion<Rational>(gA1(), V, {&U, &U}, lam);
  auto Jinv = J.inverse();
  REQUIRE(Jinv.has_value());
  Matrix<Rational> M = JL * kron(Matrix<Rational>::identity(2), *Jinv);
  auto UU = tensor_product(U, U);
  const int D = UU.dim_total;
  for (int i = 0; i < 2 * D; ++i) {
    CHECK(M(i, i) == Rational(1));
    for (int j = 0; j < 2 * D; ++j) {
      if (i == j || is_zero(M(i, j))) continue;
      Expo wi = UU.wt_off[size_t(i % D)], wj = UU.wt_off[size_t(j % D)];
      bool higher = true, equal = true;
      for (size_t k = 0; k < wi.size(); ++k) {
        if (wi[k] < wj[k]) higher = false;
        if (wi[k] != wj[k]) equal = false;
      }
      CHECK(higher);
      CHECK_FALSE(equal);
    }
  }
}
