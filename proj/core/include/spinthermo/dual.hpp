#pragma once

#include <cmath>
#include <numbers>
#include <type_traits>

// Forward-mode automatic differentiation. Nesting Dual<Dual<double>> yields
// exact second derivatives; one more level carries a parameter gradient.
namespace spinthermo::ad {

template <class T>
struct Dual;

template <class T>
struct is_dual : std::false_type {};
template <class T>
struct is_dual<Dual<T>> : std::true_type {};

inline double primal(double x) { return x; }
template <class T>
double primal(const Dual<T>& x);

template <class T>
struct Dual {
  T v{};
  T d{};

  constexpr Dual() = default;
  // Lifts constants and lower-order duals.
  template <class U>
    requires(!std::is_same_v<std::remove_cvref_t<U>, Dual> && std::is_convertible_v<const U&, T>)
  constexpr Dual(const U& c) : v(c), d(0.0) {}
  constexpr Dual(const T& value, const T& deriv) : v(value), d(deriv) {}

  friend Dual operator+(const Dual& a, const Dual& b) { return {a.v + b.v, a.d + b.d}; }
  friend Dual operator-(const Dual& a, const Dual& b) { return {a.v - b.v, a.d - b.d}; }
  friend Dual operator*(const Dual& a, const Dual& b) { return {a.v * b.v, a.v * b.d + a.d * b.v}; }
  friend Dual operator/(const Dual& a, const Dual& b) {
    T inv = T(1.0) / b.v;
    return {a.v * inv, (a.d - a.v * inv * b.d) * inv};
  }
  friend Dual operator-(const Dual& a) { return {-a.v, -a.d}; }

  Dual& operator+=(const Dual& o) { return *this = *this + o; }
  Dual& operator-=(const Dual& o) { return *this = *this - o; }
  Dual& operator*=(const Dual& o) { return *this = *this * o; }
  Dual& operator/=(const Dual& o) { return *this = *this / o; }

  friend bool operator<(const Dual& a, const Dual& b) { return primal(a) < primal(b); }
  friend bool operator>(const Dual& a, const Dual& b) { return primal(a) > primal(b); }
};

template <class T>
double primal(const Dual<T>& x) {
  return primal(x.v);
}

inline double exp(double x) { return std::exp(x); }
inline double log(double x) { return std::log(x); }
inline double log1p(double x) { return std::log1p(x); }
inline double expm1(double x) { return std::expm1(x); }
inline double sqrt(double x) { return std::sqrt(x); }
inline double tanh(double x) { return std::tanh(x); }
inline double cosh(double x) { return std::cosh(x); }
inline double sinh(double x) { return std::sinh(x); }
inline double abs(double x) { return std::abs(x); }

template <class T>
Dual<T> exp(const Dual<T>& a) {
  T e = exp(a.v);
  return {e, e * a.d};
}
template <class T>
Dual<T> log(const Dual<T>& a) {
  return {log(a.v), a.d / a.v};
}
template <class T>
Dual<T> log1p(const Dual<T>& a) {
  return {log1p(a.v), a.d / (T(1.0) + a.v)};
}
template <class T>
Dual<T> expm1(const Dual<T>& a) {
  return {expm1(a.v), exp(a.v) * a.d};
}
template <class T>
Dual<T> sqrt(const Dual<T>& a) {
  T s = sqrt(a.v);
  return {s, a.d / (T(2.0) * s)};
}
template <class T>
Dual<T> tanh(const Dual<T>& a) {
  T t = tanh(a.v);
  return {t, (T(1.0) - t * t) * a.d};
}
template <class T>
Dual<T> cosh(const Dual<T>& a) {
  return {cosh(a.v), sinh(a.v) * a.d};
}
template <class T>
Dual<T> sinh(const Dual<T>& a) {
  return {sinh(a.v), cosh(a.v) * a.d};
}
template <class T>
Dual<T> abs(const Dual<T>& a) {
  return primal(a) < 0.0 ? -a : a;
}

// ln cosh without overflow.
template <class S>
S log_cosh(const S& x) {
  S ax = abs(x);
  return ax + log1p(exp(S(-2.0) * ax)) - S(std::numbers::ln2);
}

template <class S>
S log_add_exp(const S& x, const S& y) {
  if (primal(x) >= primal(y)) return x + log1p(exp(y - x));
  return y + log1p(exp(x - y));
}

template <class S>
S sigmoid(const S& x) {
  if (primal(x) >= 0.0) return S(1.0) / (S(1.0) + exp(-x));
  S e = exp(x);
  return e / (S(1.0) + e);
}

// f''(x) for a generic callable, exact to rounding.
template <class S, class F>
S second_derivative(F&& f, const S& x) {
  using D2 = Dual<Dual<S>>;
  D2 X{Dual<S>{x, S(1.0)}, Dual<S>{S(1.0), S(0.0)}};
  return f(X).d.d;
}

// f'(x)
template <class S, class F>
S first_derivative(F&& f, const S& x) {
  return f(Dual<S>{x, S(1.0)}).d;
}

}  // namespace spinthermo::ad
