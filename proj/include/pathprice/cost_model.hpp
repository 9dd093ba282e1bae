#ifndef PATHPRICE_COST_MODEL_HPP
#define PATHPRICE_COST_MODEL_HPP

#include <cmath>
#include <limits>

namespace pathprice::mm1 {

// M/M/1 congestion cost f(rho) = rho / (1 - rho) and its convex conjugate
// f*(y) = sup_{rho >= 0} [y rho - f(rho)].

template <typename Scalar>
Scalar cost(Scalar rho) {
  if (rho >= Scalar(1)) return std::numeric_limits<Scalar>::infinity();
  return rho / (Scalar(1) - rho);
}

template <typename Scalar>
Scalar marginal_cost(Scalar rho) {
  if (rho >= Scalar(1)) return std::numeric_limits<Scalar>::infinity();
  const Scalar gap = Scalar(1) - rho;
  return Scalar(1) / (gap * gap);
}

template <typename Scalar>
Scalar conjugate(Scalar y) {
  if (y < Scalar(1)) return Scalar(0);
  const Scalar s = std::sqrt(y) - Scalar(1);
  return s * s;
}

/// Maximizer of y rho - f(rho): the utilization at which marginal cost equals y.
template <typename Scalar>
Scalar conjugate_derivative(Scalar y) {
  if (y < Scalar(1)) return Scalar(0);
  return Scalar(1) - Scalar(1) / std::sqrt(y);
}

/// Per-edge congestion cost as a bundle of plain functions; defaults to M/M/1.
struct CostModel {
  double (*f)(double) = &cost<double>;
  double (*f_prime)(double) = &marginal_cost<double>;
  double (*f_star)(double) = &conjugate<double>;
  double (*f_star_prime)(double) = &conjugate_derivative<double>;
};

}  // namespace pathprice::mm1

#endif  // PATHPRICE_COST_MODEL_HPP
