#pragma once

#include "quasilat/core.hpp"

#include <cmath>

namespace quasilat {

/// L^2-normalized Hermite functions h_0 .. h_{n-1} sampled at t, as columns.
///
/// h_n(t) = (2 pi)^{1/4} psi_n(sqrt(2 pi) t) where psi_n are the standard
/// Hermite functions, so h_0 is the Gaussian 2^{1/4} e^{-pi t^2}. Uses the
/// three-term recurrence on psi_n, which never forms the polynomial and stays
/// finite far into the tails.
template <typename Scalar>
MatrixX<Scalar> hermite_functions(const VectorX<Scalar>& t, int n) {
  using std::exp;
  using std::sqrt;
  const Scalar pi(kPi);
  const Scalar root2pi = sqrt(Scalar(2) * pi);
  const VectorX<Scalar> u = root2pi * t;
  MatrixX<Scalar> h(t.size(), n);
  if (n == 0) return h;
  const Scalar c0 = sqrt(sqrt(Scalar(2) * pi)) * sqrt(sqrt(Scalar(1) / pi));
  h.col(0) = c0 * (-u.array().square() / Scalar(2)).exp().matrix();
  if (n > 1) h.col(1) = sqrt(Scalar(2)) * u.cwiseProduct(h.col(0));
  for (int k = 1; k + 1 < n; ++k) {
    const Scalar a = sqrt(Scalar(2) / Scalar(k + 1));
    const Scalar b = sqrt(Scalar(k) / Scalar(k + 1));
    h.col(k + 1) = a * u.cwiseProduct(h.col(k)) - b * h.col(k - 1);
  }
  return h;
}

}  // namespace quasilat
