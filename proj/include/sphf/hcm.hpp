#pragma once

#include <map>
#include <stdexcept>
#include <vector>

#include "sphf/radial.hpp"

namespace sphf::hcm {

using envalg::GAlg;
using envalg::KAlg;
using envalg::TElem;
using fseries::DiffOp;
using fseries::Expo;
using fseries::Series;
using intertwine::GradedBlocks;
using intertwine::KRep;
using intertwine::NonGenericWeight;
using radial::RadialCtx;
using radial::SigmaPair;
using rootdata::RootSystem;
using rootdata::WeightVec;
using verma::VermaModule;

// Unique eigen-series of D with eigenvalue (lam, lam+2rho) and leading
// coefficient `id`: the xi_{lam+gamma} coefficient of (D - c)Phi vanishes,
// and each step divides by -(2(lam+rho)+gamma, gamma).
template <class C, class Mul>
Series<C> hc_series(const RootSystem& rs, const DiffOp<C>& D, const WeightVec& lam_in, int m,
                    const C& id, Mul&& mul) {
  WeightVec lam = rs.to_simple_root_basis(lam_in);
  if (!rs.is_hc_generic_truncated(lam, m)) {
    for (const auto& g : rs.enumerate_qminus(m)) {
      if (fseries::ht_drop(g) == 0) continue;
      WeightVec gw = rs.weight_of_root(g);
      if (sgn(rs.pairing(2 * Rational(1) * (lam + rs.rho()) + gw, gw)) == 0)
        throw NonGenericWeight(g);
    }
  }
  // the recursion is valid because every off-diagonal operator contribution
  // strictly lowers the height; multiplication terms must have no height-0 part
  for (const auto& term : D.t) {
    bool pure_mult = true;
    for (int p : term.dp)
      if (p != 0) pure_mult = false;
    if (pure_mult && term.coef.at(Expo(size_t(rs.rank()), 0)) != nullptr)
      throw std::logic_error("hc_series: operator has a height-0 multiplication part");
  }

  Rational c = rs.pairing(lam, lam + 2 * Rational(1) * rs.rho());
  Series<C> phi(rs, lam, m);
  phi.add(Expo(size_t(rs.rank()), 0), id);
  for (int d = 1; d <= m; ++d) {
    Series<C> img = fseries::apply(D, phi, mul);
    for (const auto& gamma : rs.enumerate_qminus(d)) {
      if (fseries::ht_drop(gamma) != d) continue;
      WeightVec gw = rs.weight_of_root(gamma);
      // residual R_gamma = img_gamma - c * phi_gamma(=0) plus the diagonal that
      // the new coefficient will produce: (lam+gamma, lam+gamma+2rho) Gamma
      C r = img.at(gamma) ? *img.at(gamma) : C{};
      if (sphf::is_zero_coeff(r)) continue;
      Rational denom = rs.pairing(2 * Rational(1) * (lam + rs.rho()) + gw, gw);
      using FF = typename CoeffField<C>::type;
      FF s = FieldOps<FF>::from(Rational(-1) / denom);
      r = s * r;
      phi.add(gamma, r);
    }
  }
  return phi;
}

// represented-mode Harish-Chandra coefficients for sigma
template <class F>
Series<Matrix<F>> hc_coefficients_sigma(RadialCtx<F>& ctx, const SigmaPair<F>& sp,
                                        const WeightVec& lam, int m) {
  auto pihat = ctx.pi_hat_sigma(ctx.radial_casimir(), sp, m);
  auto mul = [](const Matrix<F>& a, const Matrix<F>& b) { return a * b; };
  return hc_series(ctx.rs(), pihat, lam, m, Matrix<F>::identity(sp.dim()), mul);
}

// universal-mode coefficients in U(k) ox U(k) (height-capped by the caller)
template <class F>
Series<TElem<F>> hc_coefficients_universal(RadialCtx<F>& ctx, const WeightVec& lam, int m) {
  auto pihat = ctx.pi_hat_universal(ctx.radial_casimir(), m);
  envalg::TensorAlg<F> alg({&ctx.k().uea(), &ctx.k().uea()});
  auto mul = [&alg](const TElem<F>& a, const TElem<F>& b) { return alg.mul(a, b); };
  return hc_series(ctx.rs(), pihat, lam, m, TElem<F>::unit(2), mul);
}

// formal elementary sigma-spherical function: coefficient at gamma is the
// composition phi_l^gamma o phi_r^gamma, a vector in V_l ox V_r^*
// (row-major vec of the dl x dr matrix)
template <class F>
Series<Matrix<F>> formal_spherical(const RootSystem& rs, const VermaModule<F>& M,
                                   const GradedBlocks<F>& Bl, const GradedBlocks<F>& Cr, int dl,
                                   int dr, int m) {
  Series<Matrix<F>> out(rs, M.highest_weight(), m);
  for (const auto& gamma : rs.enumerate_qminus(m)) {
    auto itb = Bl.find(gamma);
    auto itc = Cr.find(gamma);
    if (itb == Bl.end() || itc == Cr.end()) continue;
    Matrix<F> T = itb->second * itc->second;  // dl x dr
    Matrix<F> v(dl * dr, 1);
    for (int i = 0; i < dl; ++i)
      for (int j = 0; j < dr; ++j) v(i * dr + j, 0) = T(i, j);
    out.add(gamma, v);
  }
  return out;
}

template <class F>
Matrix<F> vec_outer(const std::vector<F>& v, const std::vector<F>& f) {
  Matrix<F> out(int(v.size() * f.size()), 1);
  for (size_t i = 0; i < v.size(); ++i)
    for (size_t j = 0; j < f.size(); ++j)
      out(int(i * f.size() + j), 0) = v[i] * f[j];
  return out;
}

struct MainThmReport {
  bool eigen = false;        // (a) eigen equation for Pi-hat^sigma(Omega)
  bool coefficients = false; // (b) phi^mu_l o phi^mu_r = Gamma^sigma_mu(lam) S_lam
  bool hc_route = false;     // (c) F^{v,f} = Phi^sigma_lam (v ox f)
  int m = 0;
  bool pass() const { return eigen && coefficients && hc_route; }
};

// verify the three statements relating F^{v,f} to the HC series
template <class F>
MainThmReport verify_main_theorem(RadialCtx<F>& ctx, const KRep<F>& Vl, const KRep<F>& Vr,
                                  const WeightVec& lam, const std::vector<F>& v,
                                  const std::vector<F>& f, int m) {
  MainThmReport rep;
  rep.m = m;
  const auto& rs = ctx.rs();
  const auto& g = ctx.g();
  VermaModule<F> M(g, lam, m);
  auto Bl = intertwine::phi_left(M, Vl, v, m);
  auto Cr = intertwine::phi_right(M, Vr, f, m);
  Series<Matrix<F>> Fs = formal_spherical(rs, M, Bl, Cr, Vl.dim, Vr.dim, m);

  auto sp = SigmaPair<F>::modules(Vl, Vr);
  auto pihat = ctx.pi_hat_sigma(ctx.radial_casimir(), sp, m);
  auto mul = [](const Matrix<F>& a, const Matrix<F>& b) { return a * b; };
  Series<Matrix<F>> img = fseries::apply(pihat, Fs, mul);
  Rational zeta = rs.pairing(rs.to_simple_root_basis(lam),
                             rs.to_simple_root_basis(lam) + 2 * Rational(1) * rs.rho());
  Series<Matrix<F>> resid = img - FieldOps<F>::from(zeta) * Fs;
  rep.eigen = resid.is_zero();

  Series<Matrix<F>> hc = hc_coefficients_sigma(ctx, sp, lam, m);
  Matrix<F> S = vec_outer(v, f);
  bool okb = true;
  Series<Matrix<F>> viaHC(rs, Fs.lam, m);
  for (const auto& gamma : rs.enumerate_qminus(m)) {
    Matrix<F> expect(S.rows(), 1);
    if (const Matrix<F>* G = hc.at(gamma)) expect = (*G) * S;
    const Matrix<F>* got = Fs.at(gamma);
    Matrix<F> gv = got ? *got : Matrix<F>(S.rows(), 1);
    if (!(gv == expect)) okb = false;
    viaHC.add(gamma, expect);
  }
  rep.coefficients = okb;
  rep.hc_route = (Fs == viaHC);
  return rep;
}

struct SchrodingerReport {
  bool schrodinger = false;  // (H + (lam,lam)/2) F_bold = 0
  bool hz_eigen = false;     // (H_Omega - zeta_{lam-rho}(Omega)) F_bold = 0
  bool leading = false;      // leading coefficient preserved
  int m = 0;
  bool pass() const { return schrodinger && hz_eigen && leading; }
};

// normalized spherical function F_bold = delta * F_{M_{lam-rho}} and its
// Schroedinger/eigen residuals
template <class F>
SchrodingerReport verify_schrodinger(RadialCtx<F>& ctx, const KRep<F>& Vl, const KRep<F>& Vr,
                                     const WeightVec& lam_in, const std::vector<F>& v,
                                     const std::vector<F>& f, int m) {
  SchrodingerReport rep;
  rep.m = m;
  const auto& rs = ctx.rs();
  const auto& g = ctx.g();
  WeightVec lam = rs.to_simple_root_basis(lam_in);
  WeightVec lsh = lam - rs.rho();
  VermaModule<F> M(g, lsh, m);
  auto Bl = intertwine::phi_left(M, Vl, v, m);
  auto Cr = intertwine::phi_right(M, Vr, f, m);
  Series<Matrix<F>> Fs = formal_spherical(rs, M, Bl, Cr, Vl.dim, Vr.dim, m);
  // F_bold = delta * F, leading exponent lam
  Series<F> ds = fseries::delta_series<F>(rs, m, +1);
  auto smul = [](const F& a, const Matrix<F>& b) { return a * b; };
  Series<Matrix<F>> Fb = fseries::series_mul(ds, Fs, smul);

  auto sp = SigmaPair<F>::modules(Vl, Vr);
  auto pih = ctx.pi_hat_sigma(ctx.radial_casimir(), sp, m);
  auto H = radial::hamiltonian_conjugated(g, pih, m);
  auto mul = [](const Matrix<F>& a, const Matrix<F>& b) { return a * b; };
  Series<Matrix<F>> himg = fseries::apply(H, Fb, mul);
  Rational ev = Rational(-1, 2) * rs.pairing(lam, lam);
  rep.schrodinger = (himg - FieldOps<F>::from(ev) * Fb).is_zero();

  // H_Omega = -2H - |rho|^2, eigenvalue zeta_{lam-rho}(Omega)
  Series<Matrix<F>> ho = FieldOps<F>::from(Rational(-2)) * himg;
  ho += FieldOps<F>::from(-rs.pairing(rs.rho(), rs.rho())) * Fb;
  Rational zeta = rs.pairing(lsh, lsh + 2 * Rational(1) * rs.rho());
  rep.hz_eigen = (ho - FieldOps<F>::from(zeta) * Fb).is_zero();

  const Matrix<F>* lead = Fb.at(Expo(size_t(rs.rank()), 0));
  Matrix<F> expect = vec_outer(v, f);
  rep.leading = lead && (*lead == expect);
  return rep;
}

}  // namespace sphf::hcm
