#pragma once

#include <map>
#include <stdexcept>
#include <vector>

#include "sphf/fseries.hpp"
#include "sphf/intertwine.hpp"

namespace sphf::radial {

using envalg::Elem;
using envalg::GAlg;
using envalg::KAlg;
using envalg::Mono;
using envalg::TElem;
using envalg::TMono;
using fseries::DiffOp;
using fseries::Expo;
using fseries::RatFunc;
using fseries::Series;
using fseries::TorusPoint;
using intertwine::KRep;
using rootdata::RootSystem;
using rootdata::WeightVec;

// Element of R ox U(h) ox U(k) ox U(k): coefficient in the symbolic ring R,
// an Ad-side k-monomial, an h-monomial and a right k-monomial.  The
// evaluation map multiplies legs as Ad_{a^{-1}}(x) h y.
template <class F>
struct Radial {
  struct Key {
    Mono ad, h, y;
    friend bool operator<(const Key& a, const Key& b) {
      if (a.ad != b.ad) return a.ad < b.ad;
      if (a.h != b.h) return a.h < b.h;
      return a.y < b.y;
    }
    friend bool operator==(const Key& a, const Key& b) {
      return a.ad == b.ad && a.h == b.h && a.y == b.y;
    }
  };
  std::map<Key, RatFunc<F>> t;

  bool is_zero() const { return t.empty(); }
  void add(const Key& k, const RatFunc<F>& c) {
    if (c.is_zero()) return;
    auto it = t.find(k);
    if (it == t.end()) {
      t.emplace(k, c);
    } else {
      it->second += c;
      if (it->second.is_zero()) t.erase(it);
    }
  }
  Radial& operator+=(const Radial& o) {
    for (const auto& [k, c] : o.t) add(k, c);
    return *this;
  }
  friend bool operator==(const Radial& a, const Radial& b) {
    if (a.t.size() != b.t.size()) return false;
    for (const auto& [k, c] : a.t) {
      auto it = b.t.find(k);
      if (it == b.t.end() || !(c == it->second)) return false;
    }
    return true;
  }
};

// representation pair for Pi-hat: the right factor is applied directly to the
// (already antipoded) second U(k) leg
template <class F>
struct SigmaPair {
  KRep<F> left, right;

  static SigmaPair characters(const RootSystem& rs, const F& nu_l, const F& nu_r) {
    return {KRep<F>::character(rs, nu_l), KRep<F>::character(rs, nu_r)};
  }
  static SigmaPair modules(const KRep<F>& vl, const KRep<F>& vr) { return {vl, vr.dual()}; }
  int dim() const { return left.dim * right.dim; }
};

// The radial component map as a rewriting algorithm.  Words are built from
// tagged symbols AdY(p) < H(i) < Y(p); root vectors are eliminated through
//   e_alpha   = -xi_{-a}(1-xi_{-2a})^{-1} AdY(a) + (1-xi_{-2a})^{-1} Y(a)
//   e_{-alpha} = -xi_{-a}(1-xi_{-2a})^{-1} AdY(a) + xi_{-2a}(1-xi_{-2a})^{-1} Y(a)
// and cross-class commutators reinsert root vectors with monomial
// coefficients; termination follows by filtration-degree descent.
template <class F>
class RadialCtx {
 public:
  RadialCtx(const GAlg<F>& g, const KAlg<F>& k) : g_(&g), k_(&k) {}

  const GAlg<F>& g() const { return *g_; }
  const KAlg<F>& k() const { return *k_; }
  const RootSystem& rs() const { return g_->rs(); }

  Radial<F> radial_component(const Elem<F>& x) {
    Radial<F> out;
    for (const auto& [mono, c] : x.t) {
      const Radial<F>& r = radial_mono(mono);
      for (const auto& [key, coef] : r.t) out.add(key, c * coef);
    }
    return out;
  }

  // closed form of Pi(Omega)
  Radial<F> radial_casimir() const {
    const auto& rs = g_->rs();
    const int r = rs.rank();
    Radial<F> out;
    // sum_j x_j^2 as the Gram-inverse contraction over h_i h_j
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < r; ++j) {
        const Rational& gij = rs.gram_inv()(i, j);
        if (sgn(gij) == 0) continue;
        Mono h{uint8_t(i), uint8_t(j)};
        std::sort(h.begin(), h.end());
        out.add({Mono{}, h, Mono{}},
                RatFunc<F>::monomial(rs, Expo(size_t(r), 0), FieldOps<F>::from(gij)));
      }
    for (int p = 0; p < g_->npos(); ++p) {
      const auto& alpha = rs.positive_roots()[size_t(p)];
      // (1/2) sum_{a in R} coth_a t_a = sum_{a>0} coth_a t_a
      RatFunc<F> coth(rs);
      coth.num = fseries::LPoly<F>::one(r);
      Expo m2(size_t(r), 0);
      for (int i = 0; i < r; ++i) m2[size_t(i)] = -2 * alpha[size_t(i)];
      coth.num.add(m2, FieldOps<F>::one());
      coth.den[size_t(p)] = 1;
      for (int i = 0; i < r; ++i) {
        if (alpha[size_t(i)] == 0) continue;
        RatFunc<F> c = coth;
        c.scale(FieldOps<F>::from(Rational(alpha[size_t(i)])));
        out.add({Mono{}, Mono{uint8_t(i)}, Mono{}}, c);
      }
      // both roots +-alpha contribute equally to the k-legs
      RatFunc<F> isq(rs);  // 1/(xi_a - xi_{-a})^2 = xi_{-2a}(1-xi_{-2a})^{-2}
      isq.num = fseries::LPoly<F>::xi(m2);
      isq.den[size_t(p)] = 2;
      RatFunc<F> two_isq = isq;
      two_isq.scale(FieldOps<F>::from(Rational(2)));
      out.add({Mono{uint8_t(p), uint8_t(p)}, Mono{}, Mono{}}, two_isq);
      out.add({Mono{}, Mono{}, Mono{uint8_t(p), uint8_t(p)}}, two_isq);
      // -(xi_a + xi_{-a})/(xi_a - xi_{-a})^2 per root: num -(xi_{-a}+xi_{-3a})
      RatFunc<F> cross(rs);
      Expo m1(size_t(r), 0), m3(size_t(r), 0);
      for (int i = 0; i < r; ++i) {
        m1[size_t(i)] = -alpha[size_t(i)];
        m3[size_t(i)] = -3 * alpha[size_t(i)];
      }
      cross.num.add(m1, FieldOps<F>::from(Rational(-2)));
      cross.num.add(m3, FieldOps<F>::from(Rational(-2)));
      cross.den[size_t(p)] = 2;
      out.add({Mono{uint8_t(p)}, Mono{}, Mono{uint8_t(p)}}, cross);
    }
    return out;
  }

  // exact check of Gamma_a(Pi(x)) = x at a torus point
  bool verify_gamma(const Elem<F>& x, const TorusPoint& a) {
    Radial<F> pi = radial_component(x);
    Elem<F> acc;
    for (const auto& [key, coef] : pi.t) {
      F c = coef.eval(a);
      if (sphf::is_zero(c)) continue;
      Elem<F> prod = Elem<F>::unit();
      for (uint8_t p : key.ad) prod = g_->uea().mul(prod, ad_y(p, a));
      for (uint8_t i : key.h) prod = g_->uea().mul(prod, Elem<F>::sym(g_->id_h(int(i))));
      if (!key.y.empty()) prod = g_->uea().mul(prod, k_->expand_in_g(key.y));
      acc += c * prod;
    }
    return acc == x;
  }

  // Pi-hat := (r*_A ox id ox S) Pi as a differential operator with universal
  // U(k) ox U(k) coefficients, expanded to height m
  DiffOp<TElem<F>> pi_hat_universal(const Radial<F>& pi, int m) const {
    const auto& rs = g_->rs();
    const int r = rs.rank();
    DiffOp<TElem<F>> op(rs);
    for (const auto& [key, coef] : pi.t) {
      std::vector<int> dp(size_t(r), 0);
      for (uint8_t i : key.h) ++dp[size_t(i)];
      Elem<F> right = k_->antipode(verma::VermaModule<F>::mono_elem(key.y));
      TElem<F> legs;
      for (const auto& [ym, yc] : right.t) {
        TMono tm(2);
        tm[0] = key.ad;
        tm[1] = ym;
        legs.add(tm, yc);
      }
      Series<F> cs = coef.expand(m);
      Series<TElem<F>> coefs(rs, cs.lam, m);
      for (const auto& [gme, v] : cs.c) {
        TElem<F> scaled = legs;
        scaled.scale(v);
        coefs.add(gme, scaled);
      }
      op.add_term(std::move(coefs), dp);
    }
    op.prune();
    return op;
  }

  DiffOp<Matrix<F>> pi_hat_sigma(const Radial<F>& pi, const SigmaPair<F>& sp, int m) const {
    const auto& rs = g_->rs();
    const int r = rs.rank();
    DiffOp<Matrix<F>> op(rs);
    for (const auto& [key, coef] : pi.t) {
      std::vector<int> dp(size_t(r), 0);
      for (uint8_t i : key.h) ++dp[size_t(i)];
      Elem<F> right = k_->antipode(verma::VermaModule<F>::mono_elem(key.y));
      Matrix<F> mat = kron(sp.left.act_kelem(verma::VermaModule<F>::mono_elem(key.ad)),
                           sp.right.act_kelem(right));
      if (mat.zero()) continue;
      Series<F> cs = coef.expand(m);
      Series<Matrix<F>> coefs(rs, cs.lam, m);
      for (const auto& [gme, v] : cs.c) coefs.add(gme, v * mat);
      op.add_term(std::move(coefs), dp);
    }
    op.prune();
    return op;
  }

 private:
  // tagged word symbols
  static constexpr uint8_t kAd = 0, kH = 64, kY = 128, kE = 192;
  using Word = std::vector<uint8_t>;

  Elem<F> ad_y(int p, const TorusPoint& a) const {
    const auto& rs = g_->rs();
    Expo mal(size_t(rs.rank()), 0), pal(size_t(rs.rank()), 0);
    for (int i = 0; i < rs.rank(); ++i) {
      mal[size_t(i)] = -rs.positive_roots()[size_t(p)][size_t(i)];
      pal[size_t(i)] = rs.positive_roots()[size_t(p)][size_t(i)];
    }
    return FieldOps<F>::from(a.xi(mal)) * Elem<F>::sym(g_->id_ep(p)) -
           FieldOps<F>::from(a.xi(pal)) * Elem<F>::sym(g_->id_f(p));
  }

  const Radial<F>& radial_mono(const Mono& mono) {
    auto it = cache_.find(mono);
    if (it != cache_.end()) return it->second;
    Word w;
    for (uint8_t s : mono) {
      if (g_->is_h(int(s))) w.push_back(uint8_t(kH + (int(s) - g_->npos())));
      else w.push_back(uint8_t(kE + s));
    }
    Radial<F> out = normalize(w, RatFunc<F>::one(g_->rs()));
    return cache_.emplace(mono, std::move(out)).first->second;
  }

  // coefficients of the elementary relation
  RatFunc<F> c_ad(int p) const {
    const auto& rs = g_->rs();
    Expo m1(size_t(rs.rank()), 0);
    for (int i = 0; i < rs.rank(); ++i) m1[size_t(i)] = -rs.positive_roots()[size_t(p)][size_t(i)];
    RatFunc<F> f = RatFunc<F>::monomial(rs, m1, -FieldOps<F>::one());
    f.den[size_t(p)] = 1;
    return f;
  }
  RatFunc<F> c_y(int p, bool negative_root) const {
    const auto& rs = g_->rs();
    RatFunc<F> f(rs);
    if (!negative_root) {
      f.num = fseries::LPoly<F>::one(rs.rank());
    } else {
      Expo m2(size_t(rs.rank()), 0);
      for (int i = 0; i < rs.rank(); ++i)
        m2[size_t(i)] = -2 * rs.positive_roots()[size_t(p)][size_t(i)];
      f.num = fseries::LPoly<F>::xi(m2);
    }
    f.den[size_t(p)] = 1;
    return f;
  }

  // xi_{gamma} monomial for a signed root
  RatFunc<F> xi_of(const std::vector<int>& root, int sign) const {
    const auto& rs = g_->rs();
    Expo e(size_t(rs.rank()), 0);
    for (int i = 0; i < rs.rank(); ++i) e[size_t(i)] = sign * root[size_t(i)];
    return RatFunc<F>::monomial(rs, e, FieldOps<F>::one());
  }

  static int cls(uint8_t s) { return s >= kE ? 3 : s >= kY ? 2 : s >= kH ? 1 : 0; }

  Radial<F> normalize(const Word& word, const RatFunc<F>& coef) {
    const auto& rs = g_->rs();
    Radial<F> out;
    std::map<Word, RatFunc<F>> work;
    work.emplace(word, coef);
    auto push = [&](Word w, RatFunc<F> c) {
      if (c.is_zero()) return;
      auto [pos, fresh] = work.emplace(std::move(w), c);
      if (!fresh) pos->second += c;
    };
    while (!work.empty()) {
      auto it = work.begin();
      Word w = it->first;
      RatFunc<F> c = it->second;
      work.erase(it);
      if (c.is_zero()) continue;

      // eliminate the first root-vector symbol
      size_t epos = w.size();
      for (size_t i = 0; i < w.size(); ++i)
        if (cls(w[i]) == 3) {
          epos = i;
          break;
        }
      if (epos < w.size()) {
        int gid = int(w[epos] - kE);
        bool neg = g_->is_neg_e(gid);
        int p = neg ? (g_->npos() - 1 - gid) : (gid - g_->npos() - rs.rank());
        Word w1 = w;
        w1[epos] = uint8_t(kAd + p);
        push(std::move(w1), c * c_ad(p));
        Word w2 = w;
        w2[epos] = uint8_t(kY + p);
        push(std::move(w2), c * c_y(p, neg));
        continue;
      }

      // find the first out-of-order adjacent pair
      size_t i = 0;
      bool sorted = true;
      for (; i + 1 < w.size(); ++i) {
        int ca = cls(w[i]), cb = cls(w[i + 1]);
        if (ca > cb || (ca == cb && w[i] > w[i + 1])) {
          sorted = false;
          break;
        }
      }
      if (sorted) {
        typename Radial<F>::Key key;
        for (uint8_t s : w) {
          if (cls(s) == 0) key.ad.push_back(uint8_t(s - kAd));
          else if (cls(s) == 1) key.h.push_back(uint8_t(s - kH));
          else key.y.push_back(uint8_t(s - kY));
        }
        out.add(key, c);
        continue;
      }

      uint8_t x = w[i], y = w[i + 1];
      Word sw = w;
      std::swap(sw[i], sw[i + 1]);
      push(std::move(sw), c);

      // bracket terms [x, y] inserted at position i
      auto insert_sym = [&](uint8_t s, const RatFunc<F>& cc) {
        Word nw;
        nw.reserve(w.size() - 1);
        nw.insert(nw.end(), w.begin(), w.begin() + long(i));
        nw.push_back(s);
        nw.insert(nw.end(), w.begin() + long(i) + 2, w.end());
        push(std::move(nw), cc);
      };
      auto insert_gsym = [&](int gid, const RatFunc<F>& cc) {
        if (g_->is_h(gid)) insert_sym(uint8_t(kH + gid - g_->npos()), cc);
        else insert_sym(uint8_t(kE + gid), cc);
      };
      const int cx = cls(x), cy0 = cls(y);
      if (cx == 0 && cy0 == 0) {
        // [Ad y_q, Ad y_p] = Ad([y_q, y_p]) stays in the Ad leg
        for (const auto& [s, bc] : k_->table().br[size_t(x - kAd)][size_t(y - kAd)])
          insert_sym(uint8_t(kAd + s), c * RatFunc<F>::monomial(rs, Expo(size_t(rs.rank()), 0), bc));
      } else if (cx == 2 && cy0 == 2) {
        for (const auto& [s, bc] : k_->table().br[size_t(x - kY)][size_t(y - kY)])
          insert_sym(uint8_t(kY + s), c * RatFunc<F>::monomial(rs, Expo(size_t(rs.rank()), 0), bc));
      } else if (cx == 1 && cy0 == 1) {
        // h's commute
      } else if (cx == 1 && cy0 == 0) {
        // [h_i, Ad y_p] = a_p(h_i)(xi_{-a_p} e_p + xi_{a_p} e_{-p})
        int hi = int(x - kH), p = int(y - kAd);
        const auto& alpha = rs.positive_roots()[size_t(p)];
        std::vector<int> ei(size_t(rs.rank()), 0);
        ei[size_t(hi)] = 1;
        Rational ah = rs.pairing(rs.weight_of_root(alpha), rs.weight_of_root(ei));
        if (sgn(ah) != 0) {
          RatFunc<F> base = c;
          base.scale(FieldOps<F>::from(ah));
          insert_gsym(g_->id_ep(p), base * xi_of(alpha, -1));
          insert_gsym(g_->id_f(p), base * xi_of(alpha, +1));
        }
      } else if (cx == 2 && cy0 == 0) {
        // [y_q, Ad y_p] = xi_{-a_p} [y_q, e_p] - xi_{a_p} [y_q, e_{-p}]
        int q = int(x - kY), p = int(y - kAd);
        Elem<F> br1 = g_->uea().mul(g_->y_in_g(q), Elem<F>::sym(g_->id_ep(p))) -
                      g_->uea().mul(Elem<F>::sym(g_->id_ep(p)), g_->y_in_g(q));
        Elem<F> br2 = g_->uea().mul(g_->y_in_g(q), Elem<F>::sym(g_->id_f(p))) -
                      g_->uea().mul(Elem<F>::sym(g_->id_f(p)), g_->y_in_g(q));
        for (const auto& [mono, bc] : br1.t)
          insert_gsym(int(mono[0]), c * xi_of(rs.positive_roots()[size_t(p)], -1) *
                                        RatFunc<F>::monomial(rs, Expo(size_t(rs.rank()), 0), bc));
        for (const auto& [mono, bc] : br2.t)
          insert_gsym(int(mono[0]),
                      c * xi_of(rs.positive_roots()[size_t(p)], +1) *
                          RatFunc<F>::monomial(rs, Expo(size_t(rs.rank()), 0), -bc));
      } else if (cx == 2 && cy0 == 1) {
        // [y_q, h_i] = -a_q(h_i)(e_q + e_{-q})
        int q = int(x - kY), hi = int(y - kH);
        const auto& alpha = rs.positive_roots()[size_t(q)];
        std::vector<int> ei(size_t(rs.rank()), 0);
        ei[size_t(hi)] = 1;
        Rational ah = rs.pairing(rs.weight_of_root(alpha), rs.weight_of_root(ei));
        if (sgn(ah) != 0) {
          RatFunc<F> base = c;
          base.scale(FieldOps<F>::from(-ah));
          insert_gsym(g_->id_ep(q), base);
          insert_gsym(g_->id_f(q), base);
        }
      } else {
        throw std::logic_error("radial rewriting: unexpected symbol pair");
      }
    }
    return out;
  }

  const GAlg<F>* g_;
  const KAlg<F>* k_;
  std::map<Mono, Radial<F>> cache_;
};

// --- spin Calogero-Moser Hamiltonians ---------------------------------------

// closed form of Pi-hat(Omega): Delta + (1/2) sum coth d_{t_a}
// + sum (xi_a-xi_{-a})^{-2} prod_eps(y ox 1 + xi_{eps a} 1 ox y), represented
template <class F>
DiffOp<Matrix<F>> pi_hat_casimir_sigma(const GAlg<F>& g, const SigmaPair<F>& sp, int m) {
  const auto& rs = g.rs();
  const int r = rs.rank();
  const int d = sp.dim();
  DiffOp<Matrix<F>> op(rs);
  Matrix<F> idm = Matrix<F>::identity(d);
  // Delta
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) {
      if (sgn(rs.gram_inv()(i, j)) == 0) continue;
      std::vector<int> dp(size_t(r), 0);
      ++dp[size_t(i)];
      ++dp[size_t(j)];
      Series<Matrix<F>> cs(rs, WeightVec(std::vector<Rational>(size_t(r), Rational(0))), m);
      cs.add(Expo(size_t(r), 0), FieldOps<F>::from(rs.gram_inv()(i, j)) * idm);
      op.add_term(std::move(cs), dp);
    }
  for (int p = 0; p < g.npos(); ++p) {
    const auto& alpha = rs.positive_roots()[size_t(p)];
    // (1/2) sum_{a in R} coth_a d_{t_a} = sum_{a>0} coth_a d_{t_a}
    Series<F> coth = fseries::coth_xi<F>(rs, alpha, m);
    for (int i = 0; i < r; ++i) {
      if (alpha[size_t(i)] == 0) continue;
      std::vector<int> dp(size_t(r), 0);
      ++dp[size_t(i)];
      Series<Matrix<F>> cs(rs, coth.lam, m);
      for (const auto& [gme, v] : coth.c) {
        F s = v * FieldOps<F>::from(Rational(alpha[size_t(i)]));
        cs.add(gme, s * idm);
      }
      op.add_term(std::move(cs), dp);
    }
    // potential: per root pair, 2*(isq*(yl^2 + yr^2) + (xi_a+xi_{-a}) isq yl yr)
    Matrix<F> yl = kron(sp.left.y[size_t(p)], Matrix<F>::identity(sp.right.dim));
    Matrix<F> yr = kron(Matrix<F>::identity(sp.left.dim), sp.right.y[size_t(p)]);
    Series<F> isq = fseries::inv_xi_diff_sq<F>(rs, alpha, m);
    Series<Matrix<F>> pot(rs, isq.lam, m);
    Matrix<F> ysq = yl * yl + yr * yr;
    for (const auto& [gme, v] : isq.c) pot.add(gme, FieldOps<F>::from(Rational(2)) * v * ysq);
    // (xi_a + xi_{-a})/(xi_a-xi_{-a})^2 = (xi_{-a}+xi_{-3a})(1-xi_{-2a})^{-2}
    Series<F> cross(rs, isq.lam, m);
    {
      Series<F> geo2 = fseries::expand_inverse_one_minus<F>(
          rs, [&] {
            std::vector<int> b = alpha;
            for (int& x : b) x *= 2;
            return b;
          }(), m);
      geo2 = fseries::series_mul(geo2, geo2);
      Series<F> pre(rs, isq.lam, m);
      Expo m1(size_t(r), 0), m3(size_t(r), 0);
      for (int i = 0; i < r; ++i) {
        m1[size_t(i)] = -alpha[size_t(i)];
        m3[size_t(i)] = -3 * alpha[size_t(i)];
      }
      pre.add(m1, FieldOps<F>::one());
      pre.add(m3, FieldOps<F>::one());
      cross = fseries::series_mul(pre, geo2);
    }
    Matrix<F> ylyr = yl * yr;
    for (const auto& [gme, v] : cross.c)
      pot.add(gme, FieldOps<F>::from(Rational(2)) * v * ylyr);
    op.add_term(std::move(pot), std::vector<int>(size_t(r), 0));
  }
  op.prune();
  return op;
}

// H_bold = -(1/2)(delta o (Pi-hat(Omega) + |rho|^2) o delta^{-1}), computed by
// operator conjugation
template <class F>
DiffOp<Matrix<F>> hamiltonian_conjugated(const GAlg<F>& g, const DiffOp<Matrix<F>>& pihat,
                                         int m) {
  const auto& rs = g.rs();
  int dim = 1;
  for (const auto& term : pihat.t) {
    for (const auto& [gme, v] : term.coef.c) {
      dim = v.rows();
      break;
    }
    break;
  }
  auto mul = [](const Matrix<F>& a, const Matrix<F>& b) { return a * b; };
  Series<F> ds = fseries::delta_series<F>(rs, m, +1);
  Series<F> dsi = fseries::delta_series<F>(rs, m, -1);
  auto lift = [&](const Series<F>& s) {
    Series<Matrix<F>> out(rs, s.lam, m);
    for (const auto& [gme, v] : s.c) out.add(gme, v * Matrix<F>::identity(dim));
    return out;
  };
  DiffOp<Matrix<F>> d_op = DiffOp<Matrix<F>>::mult_op(lift(ds));
  DiffOp<Matrix<F>> dinv_op = DiffOp<Matrix<F>>::mult_op(lift(dsi));
  Rational rho2 = rs.pairing(rs.rho(), rs.rho());
  DiffOp<Matrix<F>> inner = pihat;
  Series<Matrix<F>> cst(rs, WeightVec(std::vector<Rational>(size_t(rs.rank()), Rational(0))), m);
  cst.add(Expo(size_t(rs.rank()), 0), FieldOps<F>::from(rho2) * Matrix<F>::identity(dim));
  inner.add_term(std::move(cst), std::vector<int>(size_t(rs.rank()), 0));
  DiffOp<Matrix<F>> conj = fseries::compose(d_op, fseries::compose(inner, dinv_op, mul), mul);
  // rebase all coefficients to leading exponent 0 (rho - rho cancels)
  DiffOp<Matrix<F>> out(rs);
  WeightVec zero(std::vector<Rational>(size_t(rs.rank()), Rational(0)));
  for (auto& term : conj.t) out.add_term(term.coef.rebased(zero), term.dp);
  out.scale(FieldOps<F>::from(Rational(-1, 2)));
  out.prune();
  return out;
}

// closed form: -(1/2)Delta - (1/2) sum_{a in R} (xi_a-xi_{-a})^{-2}
//   (|a|^2/2 + prod_eps(y ox 1 + xi_{eps a}(1 ox y)))
template <class F>
DiffOp<Matrix<F>> hamiltonian_closed_form(const GAlg<F>& g, const SigmaPair<F>& sp, int m) {
  const auto& rs = g.rs();
  const int r = rs.rank();
  const int d = sp.dim();
  DiffOp<Matrix<F>> op(rs);
  Matrix<F> idm = Matrix<F>::identity(d);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) {
      if (sgn(rs.gram_inv()(i, j)) == 0) continue;
      std::vector<int> dp(size_t(r), 0);
      ++dp[size_t(i)];
      ++dp[size_t(j)];
      Series<Matrix<F>> cs(rs, WeightVec(std::vector<Rational>(size_t(r), Rational(0))), m);
      cs.add(Expo(size_t(r), 0), FieldOps<F>::from(Rational(-1, 2) * rs.gram_inv()(i, j)) * idm);
      op.add_term(std::move(cs), dp);
    }
  for (int p = 0; p < g.npos(); ++p) {
    const auto& alpha = rs.positive_roots()[size_t(p)];
    Rational na = rs.pairing(rs.weight_of_root(alpha), rs.weight_of_root(alpha));
    Matrix<F> yl = kron(sp.left.y[size_t(p)], Matrix<F>::identity(sp.right.dim));
    Matrix<F> yr = kron(Matrix<F>::identity(sp.left.dim), sp.right.y[size_t(p)]);
    Series<F> isq = fseries::inv_xi_diff_sq<F>(rs, alpha, m);
    // -(1/2) * 2 * [ isq*(|a|^2/2 + yl^2 + yr^2) + cross * yl yr ]
    Series<Matrix<F>> pot(rs, isq.lam, m);
    Matrix<F> base = FieldOps<F>::from(na / 2) * idm + yl * yl + yr * yr;
    for (const auto& [gme, v] : isq.c) pot.add(gme, (-v) * base);
    Series<F> cross(rs, isq.lam, m);
    {
      std::vector<int> b = alpha;
      for (int& x : b) x *= 2;
      Series<F> geo2 = fseries::expand_inverse_one_minus<F>(rs, b, m);
      geo2 = fseries::series_mul(geo2, geo2);
      Series<F> pre(rs, isq.lam, m);
      Expo m1(size_t(r), 0), m3(size_t(r), 0);
      for (int i = 0; i < r; ++i) {
        m1[size_t(i)] = -alpha[size_t(i)];
        m3[size_t(i)] = -3 * alpha[size_t(i)];
      }
      pre.add(m1, FieldOps<F>::one());
      pre.add(m3, FieldOps<F>::one());
      cross = fseries::series_mul(pre, geo2);
    }
    Matrix<F> ylyr = yl * yr;
    for (const auto& [gme, v] : cross.c) pot.add(gme, (-v) * ylyr);
    op.add_term(std::move(pot), std::vector<int>(size_t(r), 0));
  }
  op.prune();
  return op;
}

}  // namespace sphf::radial
