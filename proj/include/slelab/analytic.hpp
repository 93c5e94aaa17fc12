#pragma once
#include <complex>
#include <vector>

namespace slelab {

using cplx = std::complex<double>;

// SLE parameter triple.  d is the trace dimension, alpha the boundary
// exponent; both are determined by kappa.
struct Kappa {
  double kappa;
  double d;      // 1 + kappa/8
  double alpha;  // 8/kappa - 1
};

// Throws std::domain_error unless 0 < kappa < 8 (space-filling regime and
// degenerate kappa are rejected).
Kappa kappa_params(double kappa);

// Ordered marked-point configuration with its derived geometry.
struct PointConfig {
  std::vector<cplx> points;  // z_1..z_n, distinct, Im >= 0, none at 0
  std::vector<double> l;     // min distance to {0, z_1..z_{k-1}}
  std::vector<double> dmin;  // min distance to {0} and all other z_j
  std::vector<double> y;     // Im z_k
  std::vector<double> R;     // dmin_k AND y_k (minimum)
  double Q;                  // max_k |z_k| / dmin_k, always >= 1
};

PointConfig config_quantities(const std::vector<cplx>& points);

enum class GreenKind { f_with_radii, f_limit, g_one_point, ghat_estimate };

struct GreenValue {
  double value;
  GreenKind kind;
};

// Piecewise comparison kernel: y^{alpha-(2-d)} x^{2-d} for x <= y, x^alpha
// for x >= y.  Continuous at x == y (the x <= y branch is taken there).
double p_y(const Kappa& k, double y, double x);

// log P_y(x); requires x > 0 (and y >= 0).
double log_p_y(const Kappa& k, double y, double x);

// prod_k P_{y_k}(r_k) / P_{y_k}(l_k), evaluated in log space.
GreenValue f_radii(const Kappa& k, const PointConfig& cfg,
                   const std::vector<double>& radii);

// prod_k y_k^{alpha-(2-d)} / P_{y_k}(l_k); rejects boundary points.
GreenValue f_limit(const Kappa& k, const PointConfig& cfg);

// One-point Green's function c_hat (Im z)^{d-2+alpha} |z|^{-alpha}.
GreenValue green_one_point(const Kappa& k, double c_hat, cplx z);

// Residual of the n=1 Green PDE at z, derivatives by central differences
// with the given step.  |residual|/G(z) -> 0 as step -> 0.
double pde_residual_1pt(const Kappa& k, double c_hat, cplx z, double step);

}  // namespace slelab
