#pragma once

#include <gmpxx.h>

#include <optional>
#include <type_traits>
#include <stdexcept>
#include <string>

namespace sphf {

// Exact arbitrary-precision rational scalar.
using Rational = mpq_class;

inline bool is_zero(const Rational& x) { return sgn(x) == 0; }
inline std::string scalar_str(const Rational& x) { return x.get_str(); }

// mpq_class(n, d) does not canonicalize; GMP arithmetic assumes it.
inline Rational ratio(long n, long d) {
  Rational q(n, d);
  q.canonicalize();
  return q;
}

inline Rational parse_rational(const std::string& s) {
  if (s.empty()) throw std::invalid_argument("empty rational literal");
  Rational q;
  if (q.set_str(s, 10) != 0) throw std::invalid_argument("bad rational literal: " + s);
  q.canonicalize();
  return q;
}

// Quadratic extension Q(sqrt(D)) for square-free D != 0,1.  D = -1 gives the
// Gaussian rationals Q(i); D = 6 hosts the A2 Chevalley normalization.
template <long long D>
struct Quad {
  Rational re, im;  // re + im*sqrt(D)

  Quad() : re(0), im(0) {}
  Quad(const Rational& r) : re(r), im(0) {}
  Quad(long n) : re(n), im(0) {}
  Quad(int n) : re(n), im(0) {}
  Quad(Rational r, Rational i) : re(std::move(r)), im(std::move(i)) {}

  static Quad sqrt_gen() { return Quad(Rational(0), Rational(1)); }

  Quad operator-() const { return Quad(-re, -im); }
  Quad& operator+=(const Quad& o) { re += o.re; im += o.im; return *this; }
  Quad& operator-=(const Quad& o) { re -= o.re; im -= o.im; return *this; }
  Quad& operator*=(const Quad& o) {
    Rational r = re * o.re + Rational(long(D)) * im * o.im;
    Rational i = re * o.im + im * o.re;
    re = std::move(r);
    im = std::move(i);
    return *this;
  }
  Quad& operator/=(const Quad& o) {
    Rational n = o.re * o.re - Rational(long(D)) * o.im * o.im;
    if (sgn(n) == 0) throw std::domain_error("division by zero in Quad");
    Rational r = (re * o.re - Rational(long(D)) * im * o.im) / n;
    Rational i = (im * o.re - re * o.im) / n;
    re = std::move(r);
    im = std::move(i);
    return *this;
  }

  friend Quad operator+(Quad a, const Quad& b) { return a += b; }
  friend Quad operator-(Quad a, const Quad& b) { return a -= b; }
  friend Quad operator*(Quad a, const Quad& b) { return a *= b; }
  friend Quad operator/(Quad a, const Quad& b) { return a /= b; }
  friend bool operator==(const Quad& a, const Quad& b) { return a.re == b.re && a.im == b.im; }
  friend bool operator!=(const Quad& a, const Quad& b) { return !(a == b); }
};

template <long long D>
inline bool is_zero(const Quad<D>& x) {
  return sgn(x.re) == 0 && sgn(x.im) == 0;
}

template <long long D>
inline std::string scalar_str(const Quad<D>& x) {
  const std::string gen = (D == -1) ? "i" : ("sqrt(" + std::to_string(D) + ")");
  if (sgn(x.im) == 0) return x.re.get_str();
  std::string s;
  if (sgn(x.re) != 0) s = x.re.get_str();
  if (sgn(x.im) > 0 && !s.empty()) s += "+";
  if (x.im == Rational(1)) s += gen;
  else if (x.im == Rational(-1)) s += "-" + gen;
  else s += x.im.get_str() + "*" + gen;
  return s;
}

// Field plumbing for the templated algebra tower.  `from_sqrt_int(n)` reports
// whether sqrt(n) exists in the field; structure-constant tables use it.
template <class F>
struct FieldOps;

template <>
struct FieldOps<Rational> {
  static Rational zero() { return Rational(0); }
  static Rational one() { return Rational(1); }
  static Rational from(const Rational& q) { return q; }
  static std::optional<Rational> from_sqrt_int(long n) {
    if (n < 0) return std::nullopt;
    mpz_class z(n);
    if (!mpz_perfect_square_p(z.get_mpz_t())) return std::nullopt;
    mpz_class r;
    mpz_sqrt(r.get_mpz_t(), z.get_mpz_t());
    return Rational(r);
  }
};

template <long long D>
struct FieldOps<Quad<D>> {
  static Quad<D> zero() { return Quad<D>(); }
  static Quad<D> one() { return Quad<D>(1); }
  static Quad<D> from(const Rational& q) { return Quad<D>(q); }
  static std::optional<Quad<D>> from_sqrt_int(long n) {
    if (auto r = FieldOps<Rational>::from_sqrt_int(n)) return Quad<D>(*r);
    // sqrt(n) = k*sqrt(D) when n = k^2 * D.
    if (D != 0 && n % D == 0) {
      if (auto k = FieldOps<Rational>::from_sqrt_int(n / D)) return Quad<D>(Rational(0), *k);
    }
    return std::nullopt;
  }
};

using GaussianRational = Quad<-1>;

// Underlying scalar field of a coefficient type (series coefficients may be
// field elements, exact matrices, or enveloping-algebra elements).
template <class V>
struct CoeffField {
  using type = V;
};

template <class T, class = void>
struct HasIsZeroMember : std::false_type {};
template <class T>
struct HasIsZeroMember<T, std::void_t<decltype(std::declval<const T&>().is_zero())>>
    : std::true_type {};

// zero test that works for field scalars and structured coefficients alike
template <class T>
inline bool is_zero_coeff(const T& x) {
  if constexpr (HasIsZeroMember<T>::value) return x.is_zero();
  else return is_zero(x);
}

}  // namespace sphf
