// Dominant singular pair by power iteration on the implicit Gram matrix.
#pragma once

#include "psif/common.hpp"

namespace psif {

struct Rank1Fit {
  double sigma = 0.0;
  Vector left;   // unit, length = rows of E
  Vector right;  // unit, length = cols of E
};

// E ~ sigma * left * right^T. Iterates right <- normalize(E^T E right)
// starting from `start_right`; stops after `max_iters` or when the
// Rayleigh quotient (sigma^2) changes by less than `tol` relatively.
inline Rank1Fit dominant_singular_pair(const Matrix& E, const Vector& start_right,
                                       int max_iters, double tol) {
  Rank1Fit fit;
  fit.left = Vector::Zero(E.rows());
  fit.right = Vector::Zero(E.cols());
  if (E.rows() == 0 || E.cols() == 0) return fit;

  // Largest-norm row of E; it lies in the row space, so iteration from it
  // cannot stall in the null space.
  const auto fallback_row = [&E]() -> Vector {
    Eigen::Index best = 0;
    double best_norm = -1.0;
    for (Eigen::Index r = 0; r < E.rows(); ++r) {
      const double rn = E.row(r).norm();
      if (rn > best_norm) {
        best_norm = rn;
        best = r;
      }
    }
    if (!(best_norm > 0.0)) return Vector();  // zero matrix
    return E.row(best).transpose() / best_norm;
  };

  Vector w = start_right;
  const double start_norm = w.norm();
  if (start_norm > 0.0) {
    w /= start_norm;
    if (!((E * w).squaredNorm() > 0.0)) w = fallback_row();
  } else {
    w = fallback_row();
  }
  if (w.size() == 0) return fit;

  double lambda_prev = -1.0;
  Vector t;
  for (int it = 0; it < max_iters; ++it) {
    t = E * w;                    // n-vector
    const double lambda = t.squaredNorm();
    if (!(lambda > 0.0)) break;
    Vector w_next = E.transpose() * t;
    const double wn = w_next.norm();
    if (!(wn > 0.0)) break;
    w = w_next / wn;
    if (lambda_prev >= 0.0 && std::abs(lambda - lambda_prev) <= tol * lambda) {
      break;
    }
    lambda_prev = lambda;
  }

  t = E * w;
  fit.sigma = t.norm();
  fit.right = w;
  if (fit.sigma > 0.0) fit.left = t / fit.sigma;
  return fit;
}

// Flips the pair so the first coordinate of `v` with |x| > 0 is positive.
inline void fix_sign_by_first_nonzero(Vector& v, Vector* companion = nullptr) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (v[i] != 0.0) {
      if (v[i] < 0.0) {
        v = -v;
        if (companion) *companion = -*companion;
      }
      return;
    }
  }
}

}  // namespace psif
