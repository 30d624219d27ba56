#pragma once

#include <cmath>

#include <Eigen/Dense>
#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/trigamma.hpp>

namespace amh {

/**
 * Second-order forward-mode number: value, gradient and Hessian with respect
 * to N independent variables. Only the handful of operations the GARCH
 * likelihood needs are provided.
 */
template <int N>
struct Jet {
  using Grad = Eigen::Matrix<double, N, 1>;
  using Hess = Eigen::Matrix<double, N, N>;

  double v = 0.0;
  Grad g = Grad::Zero();
  Hess h = Hess::Zero();

  Jet() = default;
  explicit Jet(double value) : v(value) {}

  static Jet variable(int index, double value) {
    Jet j(value);
    j.g(index) = 1.0;
    return j;
  }

  /// f(this) given f, f' and f'' at the current value.
  Jet chain(double f, double f1, double f2) const {
    Jet r(f);
    r.g = f1 * g;
    r.h = f1 * h + f2 * (g * g.transpose());
    return r;
  }

  Jet& operator+=(const Jet& o) {
    v += o.v;
    g += o.g;
    h += o.h;
    return *this;
  }
  Jet& operator+=(double c) {
    v += c;
    return *this;
  }
  Jet& operator*=(double c) {
    v *= c;
    g *= c;
    h *= c;
    return *this;
  }
};

template <int N>
Jet<N> operator+(Jet<N> a, const Jet<N>& b) { return a += b; }
template <int N>
Jet<N> operator+(Jet<N> a, double c) { return a += c; }
template <int N>
Jet<N> operator+(double c, Jet<N> a) { return a += c; }
template <int N>
Jet<N> operator-(Jet<N> a) { return a *= -1.0; }
template <int N>
Jet<N> operator-(Jet<N> a, const Jet<N>& b) { return a += -b; }
template <int N>
Jet<N> operator-(Jet<N> a, double c) { return a += -c; }
template <int N>
Jet<N> operator-(double c, const Jet<N>& a) { return -a + c; }
template <int N>
Jet<N> operator*(Jet<N> a, double c) { return a *= c; }
template <int N>
Jet<N> operator*(double c, Jet<N> a) { return a *= c; }

template <int N>
Jet<N> operator*(const Jet<N>& a, const Jet<N>& b) {
  Jet<N> r(a.v * b.v);
  r.g = a.v * b.g + b.v * a.g;
  const auto cross = (a.g * b.g.transpose()).eval();
  r.h = a.v * b.h + b.v * a.h + cross + cross.transpose();
  return r;
}

// log and reciprocal work with relative derivatives g / v and h / v so that
// values far from 1 do not push 1 / v^2 or 1 / v^3 out of range.
template <int N>
Jet<N> reciprocal(const Jet<N>& a) {
  const double inv = 1.0 / a.v;
  const auto rg = (a.g * inv).eval();
  Jet<N> r(inv);
  r.g = -inv * rg;
  r.h = inv * (2.0 * (rg * rg.transpose()) - inv * a.h);
  return r;
}

template <int N>
Jet<N> operator/(const Jet<N>& a, const Jet<N>& b) { return a * reciprocal(b); }
template <int N>
Jet<N> operator/(double c, const Jet<N>& b) { return c * reciprocal(b); }

template <int N>
Jet<N> log(const Jet<N>& a) {
  const double inv = 1.0 / a.v;
  const auto rg = (a.g * inv).eval();
  Jet<N> r(std::log(a.v));
  r.g = rg;
  r.h = inv * a.h - rg * rg.transpose();
  return r;
}

template <int N>
Jet<N> log1p(const Jet<N>& a) {
  const double s = 1.0 + a.v;
  return a.chain(std::log1p(a.v), 1.0 / s, -1.0 / (s * s));
}

template <int N>
Jet<N> exp(const Jet<N>& a) {
  const double e = std::exp(a.v);
  return a.chain(e, e, e);
}

template <int N>
Jet<N> lgamma(const Jet<N>& a) {
  return a.chain(std::lgamma(a.v), boost::math::digamma(a.v), boost::math::trigamma(a.v));
}

}  // namespace amh
