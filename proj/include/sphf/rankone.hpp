#pragma once

#include <stdexcept>
#include <vector>

#include "sphf/fseries.hpp"

namespace sphf::rankone {

using fseries::Series;
using rootdata::RootSystem;
using rootdata::WeightVec;
using Gi = GaussianRational;

// This module works in scalar sl2 coordinates: weights are identified
// with lambda(H), the positive root alpha with 2, and (lambda,mu) = lambda*mu/8.
// Series in a^{-2} are series in xi_{-alpha} of the A1 root system.

// monic Meixner-Pollaczek polynomial (phi = pi/2 specialization), coefficient
// list in the variable s; recursion
//   p_{n+1} - s p_n + n(n+2L-1)/4 p_{n-1} = 0,  p_{-1} = 0, p_0 = 1
template <class F>
struct MPPoly {
  int n = 0;
  std::vector<F> coef;  // coef[k] multiplies s^k
};

template <class F>
MPPoly<F> mp_poly(int n, const Rational& L) {
  std::vector<std::vector<F>> p(size_t(n) + 2);
  p[0] = {FieldOps<F>::one()};
  if (n >= 1) p[1] = {FieldOps<F>::zero(), FieldOps<F>::one()};
  for (int k = 1; k < n; ++k) {
    // p_{k+1} = s p_k - k(k+2L-1)/4 p_{k-1}
    std::vector<F> nxt(size_t(k) + 2, FieldOps<F>::zero());
    for (size_t i = 0; i < p[size_t(k)].size(); ++i) nxt[i + 1] += p[size_t(k)][i];
    Rational c = Rational(k) * (Rational(k) + 2 * L - 1) / 4;
    F fc = FieldOps<F>::from(c);
    for (size_t i = 0; i < p[size_t(k) - 1].size(); ++i) nxt[i] -= fc * p[size_t(k) - 1][i];
    p[size_t(k) + 1] = std::move(nxt);
  }
  MPPoly<F> out;
  out.n = n;
  out.coef = p[size_t(n)];
  return out;
}

template <class F>
F mp_eval(const MPPoly<F>& p, const F& s) {
  F v = FieldOps<F>::zero();
  for (size_t i = p.coef.size(); i-- > 0;) v = v * s + p.coef[i];
  return v;
}

template <class F>
F pochhammer(const F& a, int k) {
  F v = FieldOps<F>::one();
  for (int i = 0; i < k; ++i) v *= a + F(i);
  return v;
}

inline Rational factorial(int n) {
  Rational v(1);
  for (int i = 2; i <= n; ++i) v *= i;
  return v;
}

// require nu in iQ and return the rational q with nu = i q
inline Rational imag_part_of(const Gi& nu) {
  if (sgn(nu.re) != 0) throw std::invalid_argument("character parameter must lie in iQ");
  return nu.im;
}

namespace detail {

// univariate series in u = a^{-2} over F, truncated at degree m
template <class F>
using USeries = std::vector<F>;

template <class F>
USeries<F> u_one(int m) {
  USeries<F> s(size_t(m) + 1, FieldOps<F>::zero());
  s[0] = FieldOps<F>::one();
  return s;
}

template <class F>
USeries<F> u_mul(const USeries<F>& a, const USeries<F>& b) {
  USeries<F> out(a.size(), FieldOps<F>::zero());
  for (size_t i = 0; i < a.size(); ++i) {
    if (sphf::is_zero(a[i])) continue;
    for (size_t j = 0; i + j < out.size() && j < b.size(); ++j) out[i + j] += a[i] * b[j];
  }
  return out;
}

// (1 + sign*u)^e, rational exponent
template <class F>
USeries<F> u_binom(int m, const Rational& e, int sign) {
  USeries<F> s(size_t(m) + 1, FieldOps<F>::zero());
  Rational c(1);
  s[0] = FieldOps<F>::one();
  for (int k = 1; k <= m; ++k) {
    c *= (e - Rational(k - 1)) / Rational(k);
    Rational v = c;
    if (sign < 0 && k % 2 == 1) v = -v;
    s[size_t(k)] = FieldOps<F>::from(v);
  }
  return s;
}

}  // namespace detail

// Expansion of
//   (a+a^{-1})^lambda ((a-a^{-1})/(a+a^{-1}))^{i(nu_l+nu_r)}
//     * 2F1(-lambda/2+i nu_l, -lambda/2+i nu_r; -lambda | 4/(a+a^{-1})^2)
// as a^lambda * (series in a^{-2}).  Parameters nu in iQ keep every
// coefficient rational; the imaginary parts must cancel exactly.
inline Series<Rational> hc_closed_form(const RootSystem& rs, const Rational& lam, const Gi& nu_l,
                                       const Gi& nu_r, int m) {
  if (rs.type() != rootdata::CartanType::A1)
    throw std::invalid_argument("rank-one closed form needs type A1");
  if (lam.get_den() == 1 && sgn(lam) >= 0)
    throw std::invalid_argument("lambda must avoid Z_{>=0}");
  using detail::USeries;
  // all exponents and parameters are rational once nu = i q
  Rational ql = imag_part_of(nu_l), qr = imag_part_of(nu_r);
  Rational i_nu_l = -ql, i_nu_r = -qr;  // i * (i q) = -q

  USeries<Gi> acc = detail::u_binom<Gi>(m, lam, +1);                       // (1+u)^lambda
  acc = detail::u_mul(acc, detail::u_binom<Gi>(m, i_nu_l + i_nu_r, -1));   // (1-u)^{i(nl+nr)}
  acc = detail::u_mul(acc, detail::u_binom<Gi>(m, -(i_nu_l + i_nu_r), +1));

  // 2F1 at z = 4u/(1+u)^2; with nu = i q the parameter -lam/2 + i nu = -lam/2 - q
  Gi A = FieldOps<Gi>::from(-lam / 2 - ql);
  Gi B = FieldOps<Gi>::from(-lam / 2 - qr);
  Gi C = FieldOps<Gi>::from(-lam);
  USeries<Gi> f = detail::u_one<Gi>(m);
  USeries<Gi> zk = detail::u_one<Gi>(m);  // z^k as series in u
  for (int k = 1; k <= m; ++k) {
    // z^k = 4^k u^k (1+u)^{-2k}
    USeries<Gi> uk(size_t(m) + 1, FieldOps<Gi>::zero());
    Rational p4(1);
    for (int i = 0; i < k; ++i) p4 *= 4;
    if (k <= m) uk[size_t(k)] = FieldOps<Gi>::from(p4);
    zk = detail::u_mul(uk, detail::u_binom<Gi>(m, Rational(-2 * k), +1));
    Gi coef = pochhammer(A, k) * pochhammer(B, k) /
              (pochhammer(C, k) * FieldOps<Gi>::from(factorial(k)));
    for (size_t i = 0; i < f.size(); ++i) f[i] += coef * zk[i];
  }
  acc = detail::u_mul(acc, f);

  Series<Rational> out(rs, WeightVec({lam / 2}), m);
  for (int k = 0; k <= m; ++k) {
    const Gi& c = acc[size_t(k)];
    if (sgn(c.im) != 0) throw std::logic_error("closed form: imaginary residue");
    out.add({-k}, c.re);
  }
  return out;
}

// series display's n-th coefficient: 4^n p_n(-nu_l) p_n(-nu_r) / ((-lam)_n n!) (-1)^n
inline Rational poisson_lhs_coef(const Rational& lam, const Gi& nu_l, const Gi& nu_r, int n) {
  auto p = mp_poly<Gi>(n, -lam / 2);
  Gi v = mp_eval(p, -nu_l) * mp_eval(p, -nu_r);
  Rational p4(1);
  for (int i = 0; i < n; ++i) p4 *= 4;
  Gi den = pochhammer(FieldOps<Gi>::from(-lam), n) * FieldOps<Gi>::from(factorial(n));
  Gi c = FieldOps<Gi>::from(p4) * v / den;
  if (n % 2 == 1) c = -c;
  if (sgn(c.im) != 0) throw std::logic_error("poisson coefficient: imaginary residue");
  return c.re;
}

struct PoissonReport {
  bool pass = true;
  int m = 0;
  std::vector<int> failed_orders;
};

// compare the generating-series side against the Gauss closed form
inline PoissonReport verify_poisson(const RootSystem& rs, const Rational& lam, const Gi& nu_l,
                                    const Gi& nu_r, int m) {
  PoissonReport rep;
  rep.m = m;
  Series<Rational> rhs = hc_closed_form(rs, lam, nu_l, nu_r, m);
  for (int n = 0; n <= m; ++n) {
    Rational lhs = poisson_lhs_coef(lam, nu_l, nu_r, n);
    const Rational* r = rhs.at({-n});
    Rational rv = r ? *r : Rational(0);
    if (lhs != rv) {
      rep.pass = false;
      rep.failed_orders.push_back(n);
    }
  }
  return rep;
}

// weight components of rank-one k-intertwiners (test oracles):
//   into the Verma module: v[lam-2n] = (-2)^n p_n^{(-lam/2)}(-nu)/(-lam)_n * u_n
//   out of it:             psi(u_n) = 2^n p_n^{(-lam/2)}(-nu)/n!
inline Gi phi_right_component(const Rational& lam, const Gi& nu, int n) {
  auto p = mp_poly<Gi>(n, -lam / 2);
  Rational p2(1);
  for (int i = 0; i < n; ++i) p2 *= 2;
  Gi num = FieldOps<Gi>::from(n % 2 == 0 ? p2 : -p2) * mp_eval(p, -nu);
  return num / pochhammer(FieldOps<Gi>::from(-lam), n);
}

inline Gi phi_left_component(const Rational& lam, const Gi& nu, int n) {
  auto p = mp_poly<Gi>(n, -lam / 2);
  Rational p2(1);
  for (int i = 0; i < n; ++i) p2 *= 2;
  return FieldOps<Gi>::from(p2 / factorial(n)) * mp_eval(p, -nu);
}

}  // namespace sphf::rankone
