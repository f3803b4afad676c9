#pragma once

#include <algorithm>
#include <map>
#include <stdexcept>
#include <vector>

#include "sphf/parallel.hpp"
#include "sphf/rootdata.hpp"
#include "sphf/scalar.hpp"

namespace sphf::fseries {

using rootdata::RootSystem;
using rootdata::WeightVec;

// Exponent offset from the leading exponent, in simple-root coordinates.
using Expo = std::vector<int>;

inline int ht_drop(const Expo& g) {
  int h = 0;
  for (int x : g) h -= x;
  return h;
}

inline Expo expo_add(const Expo& a, const Expo& b) {
  Expo r = a;
  for (size_t i = 0; i < r.size(); ++i) r[i] += b[i];
  return r;
}

// Truncated formal series  sum_gamma c_gamma xi_{lam+gamma}  with offsets
// gamma kept while ht(-gamma) <= m.  Coefficients are any additive type with
// is_zero and scalar action.
template <class C>
struct Series {
  const RootSystem* rs = nullptr;
  WeightVec lam;  // leading exponent (simple-root basis)
  int m = 0;      // truncation height
  std::map<Expo, C> c;

  Series() = default;
  Series(const RootSystem& r, WeightVec l, int trunc)
      : rs(&r), lam(std::move(l)), m(trunc) {}

  static Series zero_like(const RootSystem& r, WeightVec l, int trunc) {
    return Series(r, std::move(l), trunc);
  }

  bool is_zero() const { return c.empty(); }
  int rank() const { return rs->rank(); }

  void add(const Expo& g, const C& v) {
    if (sphf::is_zero_coeff(v)) return;
    if (ht_drop(g) > m) return;
    auto it = c.find(g);
    if (it == c.end()) {
      c.emplace(g, v);
    } else {
      it->second += v;
      if (sphf::is_zero_coeff(it->second)) c.erase(it);
    }
  }

  const C* at(const Expo& g) const {
    auto it = c.find(g);
    return it == c.end() ? nullptr : &it->second;
  }

  Series& operator+=(const Series& o) {
    require_compatible(o);
    for (const auto& [g, v] : o.c) add(g, v);
    return *this;
  }
  Series& operator-=(const Series& o) {
    require_compatible(o);
    for (const auto& [g, v] : o.c) {
      C nv = v;
      nv = -nv;
      add(g, nv);
    }
    return *this;
  }
  friend Series operator+(Series a, const Series& b) { return a += b; }
  friend Series operator-(Series a, const Series& b) { return a -= b; }
  Series operator-() const {
    Series s = *this;
    for (auto& [g, v] : s.c) v = -v;
    return s;
  }

  template <class S>
  Series& scale(const S& f) {
    for (auto it = c.begin(); it != c.end();) {
      it->second = f * it->second;
      if (sphf::is_zero_coeff(it->second)) it = c.erase(it);
      else ++it;
    }
    return *this;
  }

  Series truncated(int m2) const {
    Series s(*rs, lam, m2);
    for (const auto& [g, v] : c)
      if (ht_drop(g) <= m2) s.c.emplace(g, v);
    return s;
  }

  // move the leading exponent; the integral difference folds into offsets
  Series rebased(const WeightVec& new_lam) const {
    WeightVec d = rs->to_simple_root_basis(lam) - rs->to_simple_root_basis(new_lam);
    Expo shift(size_t(rank()), 0);
    for (int i = 0; i < rank(); ++i) {
      if (d.c[size_t(i)].get_den() != 1)
        throw std::invalid_argument("rebased: exponent difference not integral");
      shift[size_t(i)] = int(d.c[size_t(i)].get_num().get_si());
    }
    Series s(*rs, new_lam, m);
    for (const auto& [g, v] : c) s.add(expo_add(g, shift), v);
    return s;
  }

  friend bool operator==(const Series& a, const Series& b) {
    return a.lam == b.lam && a.c == b.c;
  }

  void require_compatible(const Series& o) const {
    if (rs != o.rs || !(lam == o.lam))
      throw std::invalid_argument("series leading exponents differ; rebase first");
  }
};

// scalar multiple of a series (scalar type fixed by the coefficient's field)
template <class C>
Series<C> operator*(const typename CoeffField<C>::type& s, Series<C> a) {
  return a.scale(s);
}


// product with an explicit coefficient multiplier (C1 x C2 -> R)
template <class C1, class C2, class Mul>
auto series_mul(const Series<C1>& a, const Series<C2>& b, Mul&& mul)
    -> Series<decltype(mul(std::declval<C1>(), std::declval<C2>()))> {
  using R = decltype(mul(std::declval<C1>(), std::declval<C2>()));
  if (a.rs != b.rs) throw std::invalid_argument("series over different root systems");
  Series<R> out(*a.rs, a.rs->to_simple_root_basis(a.lam) + a.rs->to_simple_root_basis(b.lam),
                std::min(a.m, b.m));
  std::vector<const std::pair<const Expo, C1>*> av;
  av.reserve(a.c.size());
  for (const auto& p : a.c) av.push_back(&p);
  return par::map_merge(
      av.size(), out,
      [&](Series<R>& acc, size_t i) {
        const auto& [ga, va] = *av[i];
        for (const auto& [gb, vb] : b.c) {
          Expo g = expo_add(ga, gb);
          if (ht_drop(g) > acc.m) continue;
          acc.add(g, mul(va, vb));
        }
      },
      [](Series<R>& acc, Series<R>&& o) {
        for (auto& [g, v] : o.c) acc.add(g, v);
      },
      8);
}

template <class F>
Series<F> series_mul(const Series<F>& a, const Series<F>& b) {
  return series_mul(a, b, [](const F& x, const F& y) -> F { return x * y; });
}

// (lam+gamma)(h_i) = (lam+gamma, alpha_i), exact
inline Rational exponent_pair_h(const RootSystem& rs, const WeightVec& lam, const Expo& g, int i) {
  WeightVec w = rs.to_simple_root_basis(lam);
  for (int j = 0; j < rs.rank(); ++j) w.c[size_t(j)] += g[size_t(j)];
  std::vector<int> ei(size_t(rs.rank()), 0);
  ei[size_t(i)] = 1;
  return rs.pairing(w, rs.weight_of_root(ei));
}

// --- scalar model series (the ring R and the gauge factor) -----------------

template <class F>
Series<F> series_one(const RootSystem& rs, int m) {
  Series<F> s(rs, WeightVec(std::vector<Rational>(size_t(rs.rank()), Rational(0))), m);
  s.add(Expo(size_t(rs.rank()), 0), FieldOps<F>::one());
  return s;
}

template <class F>
Series<F> series_xi(const RootSystem& rs, const WeightVec& mu, int m) {
  Series<F> s(rs, rs.to_simple_root_basis(mu), m);
  s.add(Expo(size_t(rs.rank()), 0), FieldOps<F>::one());
  return s;
}

// (1 - xi_{-beta})^{-1} = sum_k xi_{-k beta} for strictly positive beta
template <class F>
Series<F> expand_inverse_one_minus(const RootSystem& rs, const std::vector<int>& beta, int m) {
  int hb = 0;
  for (int x : beta) hb += x;
  if (hb <= 0) throw std::invalid_argument("expand_inverse_one_minus needs a positive weight");
  Series<F> s = series_one<F>(rs, m);
  Expo g(size_t(rs.rank()), 0);
  for (int k = 1;; ++k) {
    for (int i = 0; i < rs.rank(); ++i) g[size_t(i)] = -k * beta[size_t(i)];
    if (ht_drop(g) > m) break;
    s.add(g, FieldOps<F>::one());
  }
  return s;
}

// 1/(1 - xi_{-2 alpha}) for a root alpha of either sign:
//   alpha > 0: geometric series; alpha < 0: -xi_{-2|alpha|}/(1 - xi_{-2|alpha|})
template <class F>
Series<F> inv_one_minus_xi_m2(const RootSystem& rs, const std::vector<int>& alpha, int m) {
  int ha = 0;
  for (int x : alpha) ha += x;
  std::vector<int> abs = alpha;
  if (ha < 0)
    for (int& x : abs) x = -x;
  std::vector<int> beta = abs;
  for (int& x : beta) x *= 2;
  Series<F> geo = expand_inverse_one_minus<F>(rs, beta, m);
  if (ha > 0) return geo;
  Series<F> s(rs, geo.lam, m);
  Expo shift(size_t(rs.rank()), 0);
  for (int i = 0; i < rs.rank(); ++i) shift[size_t(i)] = -2 * abs[size_t(i)];
  for (const auto& [g, v] : geo.c) s.add(expo_add(g, shift), -v);
  return s;
}

// 1/(xi_alpha - xi_{-alpha}) = xi_{-alpha} (1-xi_{-2 alpha})^{-1} for alpha>0,
// odd under alpha -> -alpha
template <class F>
Series<F> inv_xi_diff(const RootSystem& rs, const std::vector<int>& alpha, int m) {
  int ha = 0;
  for (int x : alpha) ha += x;
  std::vector<int> abs = alpha;
  if (ha < 0)
    for (int& x : abs) x = -x;
  std::vector<int> beta = abs;
  for (int& x : beta) x *= 2;
  Series<F> geo = expand_inverse_one_minus<F>(rs, beta, m);
  Series<F> s(rs, geo.lam, m);
  Expo shift(size_t(rs.rank()), 0);
  for (int i = 0; i < rs.rank(); ++i) shift[size_t(i)] = -abs[size_t(i)];
  for (const auto& [g, v] : geo.c) s.add(expo_add(g, shift), ha > 0 ? v : -v);
  return s;
}

// (xi_alpha + xi_{-alpha})/(xi_alpha - xi_{-alpha}), even part coefficient
template <class F>
Series<F> coth_xi(const RootSystem& rs, const std::vector<int>& alpha, int m) {
  int ha = 0;
  for (int x : alpha) ha += x;
  std::vector<int> abs = alpha;
  if (ha < 0)
    for (int& x : abs) x = -x;
  // (1 + xi_{-2a})/(1 - xi_{-2a}) = 1 + 2 sum_{k>=1} xi_{-2ka}
  Series<F> s = series_one<F>(rs, m);
  Expo g(size_t(rs.rank()), 0);
  for (int k = 1;; ++k) {
    for (int i = 0; i < rs.rank(); ++i) g[size_t(i)] = -2 * k * abs[size_t(i)];
    if (ht_drop(g) > m) break;
    s.add(g, FieldOps<F>::from(Rational(2)));
  }
  if (ha < 0) s.scale(-FieldOps<F>::one());
  return s;
}

// 1/(xi_alpha - xi_{-alpha})^2 = xi_{-2a}(1-xi_{-2a})^{-2} = sum_{k>=1} k xi_{-2ka}
template <class F>
Series<F> inv_xi_diff_sq(const RootSystem& rs, const std::vector<int>& alpha, int m) {
  std::vector<int> abs = alpha;
  int ha = 0;
  for (int x : alpha) ha += x;
  if (ha < 0)
    for (int& x : abs) x = -x;
  Series<F> s(rs, WeightVec(std::vector<Rational>(size_t(rs.rank()), Rational(0))), m);
  Expo g(size_t(rs.rank()), 0);
  for (int k = 1;; ++k) {
    for (int i = 0; i < rs.rank(); ++i) g[size_t(i)] = -2 * k * abs[size_t(i)];
    if (ht_drop(g) > m) break;
    s.add(g, FieldOps<F>::from(Rational(k)));
  }
  return s;
}

// binomial series (1-u)^e with rational exponent e, u = xi_{-beta}
template <class F>
Series<F> binom_one_minus(const RootSystem& rs, const std::vector<int>& beta, const Rational& e,
                          int m) {
  Series<F> s = series_one<F>(rs, m);
  Rational coef(1);
  Expo g(size_t(rs.rank()), 0);
  for (int k = 1;; ++k) {
    // C(e,k) (-1)^k = C(e,k-1)(-1)^{k-1} * (e-k+1)/k * (-1)
    coef *= (e - Rational(k - 1)) / Rational(k);
    coef = -coef;
    for (int i = 0; i < rs.rank(); ++i) g[size_t(i)] = -k * beta[size_t(i)];
    if (ht_drop(g) > m) break;
    s.add(g, FieldOps<F>::from(coef));
  }
  return s;
}

// gauge factor delta^{sign} = xi_{sign*rho} prod_{alpha>0} (1-xi_{-2alpha})^{sign/2}
template <class F>
Series<F> delta_series(const RootSystem& rs, int m, int sign) {
  if (sign != 1 && sign != -1) throw std::invalid_argument("delta sign must be +-1");
  Series<F> s = series_xi<F>(rs, Rational(sign) * rs.rho(), m);
  for (const auto& a : rs.positive_roots()) {
    std::vector<int> b = a;
    for (int& x : b) x *= 2;
    s = series_mul(s, binom_one_minus<F>(rs, b, Rational(sign, 2), m));
  }
  return s;
}

// --- torus points and the symbolic coefficient ring R ----------------------

// exact point of A_reg: t_i = a^{-alpha_i} in (0,1)
struct TorusPoint {
  std::vector<Rational> t;

  // a^{gamma} for gamma in the root lattice = prod t_i^{-gamma_i}
  Rational xi(const Expo& g) const {
    Rational v(1);
    for (size_t i = 0; i < t.size(); ++i) {
      long e = -g[i];
      Rational base = t[i];
      if (e < 0) {
        base = Rational(1) / base;
        e = -e;
      }
      for (long k = 0; k < e; ++k) v *= base;
    }
    return v;
  }
};

template <class F>
struct LPoly {
  std::map<Expo, F> t;

  static LPoly zero() { return LPoly{}; }
  static LPoly one(int rank) {
    LPoly p;
    p.t[Expo(size_t(rank), 0)] = FieldOps<F>::one();
    return p;
  }
  static LPoly xi(const Expo& g) {
    LPoly p;
    p.t[g] = FieldOps<F>::one();
    return p;
  }
  bool is_zero() const { return t.empty(); }
  void add(const Expo& g, const F& v) {
    if (sphf::is_zero(v)) return;
    auto it = t.find(g);
    if (it == t.end()) {
      t.emplace(g, v);
    } else {
      it->second += v;
      if (sphf::is_zero(it->second)) t.erase(it);
    }
  }
  LPoly& operator+=(const LPoly& o) {
    for (const auto& [g, v] : o.t) add(g, v);
    return *this;
  }
  friend LPoly operator+(LPoly a, const LPoly& b) { return a += b; }
  LPoly operator-() const {
    LPoly p;
    for (const auto& [g, v] : t) p.t.emplace(g, -v);
    return p;
  }
  friend LPoly operator-(LPoly a, const LPoly& b) { return a += -b; }
  friend LPoly operator*(const LPoly& a, const LPoly& b) {
    LPoly p;
    for (const auto& [ga, va] : a.t)
      for (const auto& [gb, vb] : b.t) p.add(expo_add(ga, gb), va * vb);
    return p;
  }
  LPoly& scale(const F& s) {
    if (sphf::is_zero(s)) {
      t.clear();
      return *this;
    }
    for (auto& [g, v] : t) v *= s;
    return *this;
  }
  friend bool operator==(const LPoly& a, const LPoly& b) { return a.t == b.t; }
};

// Element of (a localization of) the ring R: a Laurent polynomial in the
// xi_{-alpha_i} divided by a product of factors (1 - xi_{-2 alpha}) over
// positive roots.  This is exactly the shape the radial rewriting produces.
template <class F>
struct RatFunc {
  const RootSystem* rs = nullptr;
  LPoly<F> num;
  std::vector<int> den;  // den[p] >= 0: power of (1 - xi_{-2 alpha_p})

  RatFunc() = default;
  explicit RatFunc(const RootSystem& r) : rs(&r), den(r.positive_roots().size(), 0) {}

  static RatFunc zero(const RootSystem& r) { return RatFunc(r); }
  static RatFunc one(const RootSystem& r) {
    RatFunc f(r);
    f.num = LPoly<F>::one(r.rank());
    return f;
  }
  static RatFunc monomial(const RootSystem& r, const Expo& g, const F& c) {
    RatFunc f(r);
    f.num.add(g, c);
    return f;
  }

  bool is_zero() const { return num.is_zero(); }

  static LPoly<F> den_factor(const RootSystem& rs, int p) {
    LPoly<F> d = LPoly<F>::one(rs.rank());
    Expo g(size_t(rs.rank()), 0);
    for (int i = 0; i < rs.rank(); ++i) g[size_t(i)] = -2 * rs.positive_roots()[size_t(p)][size_t(i)];
    d.add(g, -FieldOps<F>::one());
    return d;
  }

  RatFunc& operator+=(const RatFunc& o) {
    // scale both numerators to the common denominator (max powers)
    std::vector<int> cd(den.size());
    for (size_t p = 0; p < den.size(); ++p) cd[p] = std::max(den[p], o.den[p]);
    LPoly<F> a = num, b = o.num;
    for (size_t p = 0; p < den.size(); ++p) {
      LPoly<F> f = den_factor(*rs, int(p));
      for (int k = den[p]; k < cd[p]; ++k) a = a * f;
      for (int k = o.den[p]; k < cd[p]; ++k) b = b * f;
    }
    num = a + b;
    den = cd;
    reduce();
    return *this;
  }
  friend RatFunc operator+(RatFunc a, const RatFunc& b) { return a += b; }
  RatFunc operator-() const {
    RatFunc f = *this;
    f.num = -f.num;
    return f;
  }
  friend RatFunc operator-(RatFunc a, const RatFunc& b) { return a += -b; }
  friend RatFunc operator*(const RatFunc& a, const RatFunc& b) {
    RatFunc f(*a.rs);
    f.num = a.num * b.num;
    for (size_t p = 0; p < f.den.size(); ++p) f.den[p] = a.den[p] + b.den[p];
    f.reduce();
    return f;
  }
  RatFunc& scale(const F& s) {
    num.scale(s);
    return *this;
  }
  friend RatFunc operator*(const F& s, RatFunc a) { return a.scale(s); }

  friend bool operator==(const RatFunc& a, const RatFunc& b) {
    // cross-multiplied equality
    LPoly<F> x = a.num, y = b.num;
    for (size_t p = 0; p < a.den.size(); ++p) {
      LPoly<F> f = den_factor(*a.rs, int(p));
      for (int k = 0; k < b.den[p]; ++k) x = x * f;
      for (int k = 0; k < a.den[p]; ++k) y = y * f;
    }
    return x == y;
  }

  F eval(const TorusPoint& a) const {
    F v = FieldOps<F>::zero();
    for (const auto& [g, c] : num.t) v += c * FieldOps<F>::from(a.xi(g));
    for (size_t p = 0; p < den.size(); ++p) {
      if (den[p] == 0) continue;
      Expo g(size_t(rs->rank()), 0);
      for (int i = 0; i < rs->rank(); ++i)
        g[size_t(i)] = -2 * rs->positive_roots()[p][size_t(i)];
      F d = FieldOps<F>::one() - FieldOps<F>::from(a.xi(g));
      for (int k = 0; k < den[p]; ++k) v = v / d;
    }
    return v;
  }

  Series<F> expand(int m) const {
    Series<F> s(*rs, WeightVec(std::vector<Rational>(size_t(rs->rank()), Rational(0))), m);
    for (const auto& [g, c] : num.t) s.add(g, c);
    for (size_t p = 0; p < den.size(); ++p)
      for (int k = 0; k < den[p]; ++k) {
        std::vector<int> b = rs->positive_roots()[p];
        for (int& x : b) x *= 2;
        s = series_mul(s, expand_inverse_one_minus<F>(*rs, b, m));
      }
    return s;
  }

  // cancel denominator factors that divide the numerator exactly
  void reduce() {
    if (num.is_zero()) {
      std::fill(den.begin(), den.end(), 0);
      return;
    }
    for (size_t p = 0; p < den.size(); ++p)
      while (den[p] > 0) {
        auto q = try_divide(num, int(p));
        if (!q) break;
        num = *q;
        --den[p];
      }
  }

  // exact division of P by (1 - xi_{-2 alpha_p}), if possible
  std::optional<LPoly<F>> try_divide(const LPoly<F>& poly, int p) const {
    Expo step(size_t(rs->rank()), 0);
    for (int i = 0; i < rs->rank(); ++i)
      step[size_t(i)] = -2 * rs->positive_roots()[size_t(p)][size_t(i)];
    // group terms into rays g0 + k*step; divide each ray by (1 - v) via
    // cumulative sums, requiring zero remainder
    std::map<Expo, std::map<int, F>> rays;
    for (const auto& [g, c] : poly.t) {
      // canonical ray representative: shift g by -k*step as far as terms exist;
      // instead key by g reduced along step using the maximal k such that
      // g - k*step stays... simpler: key by g modulo step direction using the
      // minimal element reachable: use g + k*step with k chosen so that the
      // first coordinate hit by step is reduced into [0, |step_i|)
      int i0 = 0;
      while (i0 < rs->rank() && step[size_t(i0)] == 0) ++i0;
      int k = 0;
      if (i0 < rs->rank()) {
        // choose k = floor division so the representative is canonical
        int si = step[size_t(i0)];
        int gi = g[size_t(i0)];
        // k such that gi - k*si in [0, -si) for si<0
        k = gi / si;
        if (gi % si != 0 && ((gi < 0) != (si < 0))) --k;
      }
      Expo rep = g;
      for (int i = 0; i < rs->rank(); ++i) rep[size_t(i)] -= k * step[size_t(i)];
      rays[rep][k] = c;
    }
    LPoly<F> out;
    for (auto& [rep, ray] : rays) {
      // P_ray = sum_k c_k v^k with v = xi_step; divide by (1 - v):
      // q_k = sum_{j<=k} c_j, remainder = sum_all c_j must vanish
      F run = FieldOps<F>::zero();
      int kmin = ray.begin()->first, kmax = ray.rbegin()->first;
      std::map<int, F> q;
      for (int k = kmin; k <= kmax; ++k) {
        auto it = ray.find(k);
        if (it != ray.end()) run += it->second;
        q[k] = run;
      }
      if (!sphf::is_zero(run)) return std::nullopt;
      for (const auto& [k, c] : q) {
        if (k == kmax) continue;  // top coefficient of quotient is the (zero) sum
        Expo g = rep;
        for (int i = 0; i < rs->rank(); ++i) g[size_t(i)] += k * step[size_t(i)];
        out.add(g, c);
      }
    }
    return out;
  }
};

// --- differential operators with series coefficients -----------------------

// finite sum of (coefficient series) * (monomial in d_{h_1}..d_{h_r});
// d_h xi_{mu} = (mu, alpha_i) xi_{mu} for h = h_i = t_{alpha_i}
template <class C>
struct DiffOp {
  struct Term {
    Series<C> coef;
    std::vector<int> dp;  // power of d_{h_i} per i
  };
  const RootSystem* rs = nullptr;
  std::vector<Term> t;

  explicit DiffOp(const RootSystem& r) : rs(&r) {}
  DiffOp() = default;

  static DiffOp mult_op(Series<C> s) {
    DiffOp d(*s.rs);
    d.t.push_back({std::move(s), std::vector<int>(size_t(d.rs->rank()), 0)});
    return d;
  }

  void add_term(Series<C> s, std::vector<int> dp) {
    if (s.is_zero()) return;
    for (auto& term : t)
      if (term.dp == dp && term.coef.lam == s.lam) {
        term.coef += s;
        return;
      }
    t.push_back({std::move(s), std::move(dp)});
  }

  DiffOp& operator+=(const DiffOp& o) {
    for (const auto& term : o.t) add_term(term.coef, term.dp);
    return *this;
  }
  friend DiffOp operator+(DiffOp a, const DiffOp& b) { return a += b; }
  DiffOp operator-() const {
    DiffOp d = *this;
    for (auto& term : d.t) term.coef = -term.coef;
    return d;
  }
  friend DiffOp operator-(DiffOp a, const DiffOp& b) { return a += -b; }
  template <class S>
  DiffOp& scale(const S& s) {
    for (auto& term : t) term.coef.scale(s);
    return *this;
  }

  void prune() {
    std::vector<Term> keep;
    for (auto& term : t)
      if (!term.coef.is_zero()) keep.push_back(std::move(term));
    t = std::move(keep);
  }

  bool is_zero() const {
    for (const auto& term : t)
      if (!term.coef.is_zero()) return false;
    return true;
  }

  DiffOp truncated(int m2) const {
    DiffOp d(*rs);
    for (const auto& term : t) d.add_term(term.coef.truncated(m2), term.dp);
    d.prune();
    return d;
  }
};

// apply d^{dp} to a series: multiply each coefficient by
// prod_i (lam+gamma, alpha_i)^{dp_i}
template <class V>
Series<V> apply_dmono(const std::vector<int>& dp, const Series<V>& s) {
  Series<V> out(*s.rs, s.lam, s.m);
  for (const auto& [g, v] : s.c) {
    Rational f(1);
    bool all0 = true;
    for (int i = 0; i < s.rs->rank(); ++i) {
      for (int k = 0; k < dp[size_t(i)]; ++k) {
        f *= exponent_pair_h(*s.rs, s.lam, g, i);
        all0 = false;
      }
    }
    if (all0) {
      out.add(g, v);
    } else {
      using FF = typename CoeffField<V>::type;
      V scaled = FieldOps<FF>::from(f) * v;
      out.add(g, scaled);
    }
  }
  return out;
}

// op(s) with coefficient action mul : C x V -> V
template <class C, class V, class Mul>
Series<V> apply(const DiffOp<C>& op, const Series<V>& s, Mul&& mul) {
  Series<V> out;
  bool first = true;
  for (const auto& term : op.t) {
    Series<V> ds = apply_dmono(term.dp, s);
    Series<V> prod = series_mul(term.coef, ds, mul);
    if (first) {
      out = std::move(prod);
      first = false;
    } else {
      out += prod;
    }
  }
  if (first) {
    out = Series<V>(*s.rs, s.lam, s.m);
  }
  return out;
}

// compose two operators; Leibniz pushes each d_{h_i} of A through B's
// coefficients (d_h acts on a coefficient series by its exponents alone)
template <class C, class Mul>
DiffOp<C> compose(const DiffOp<C>& a, const DiffOp<C>& b, Mul&& mul) {
  DiffOp<C> out(*a.rs);
  const int r = a.rs->rank();
  for (const auto& ta : a.t)
    for (const auto& tb : b.t) {
      // start with the pair (coef_b, dp_b); push each derivative of ta.dp in
      std::vector<std::pair<Series<C>, std::vector<int>>> cur;
      cur.emplace_back(tb.coef, tb.dp);
      for (int i = 0; i < r; ++i)
        for (int k = 0; k < ta.dp[size_t(i)]; ++k) {
          std::vector<std::pair<Series<C>, std::vector<int>>> next;
          for (auto& [cs, dp] : cur) {
            // d_i (cs * d^dp) = (d_i cs) d^dp + cs d^{dp+e_i}
            std::vector<int> one(size_t(r), 0);
            one[size_t(i)] = 1;
            Series<C> dcs = apply_dmono(one, cs);
            if (!dcs.is_zero()) next.emplace_back(std::move(dcs), dp);
            std::vector<int> dp2 = dp;
            ++dp2[size_t(i)];
            next.emplace_back(cs, std::move(dp2));
          }
          cur = std::move(next);
        }
      for (auto& [cs, dp] : cur) out.add_term(series_mul(ta.coef, cs, mul), dp);
    }
  out.prune();
  return out;
}

template <class C, class Mul>
DiffOp<C> commutator(const DiffOp<C>& a, const DiffOp<C>& b, Mul&& mul) {
  return compose(a, b, mul) - compose(b, a, mul);
}

}  // namespace sphf::fseries
