#include "slelab/analytic.hpp"

#include <cmath>
#include <stdexcept>

namespace slelab {

Kappa kappa_params(double kappa) {
  if (!(kappa > 0.0) || !(kappa < 8.0)) {
    throw std::domain_error("kappa must lie in (0,8)");
  }
  return Kappa{kappa, 1.0 + kappa / 8.0, 8.0 / kappa - 1.0};
}

double p_y(const Kappa& k, double y, double x) {
  if (y < 0.0 || x < 0.0) {
    throw std::domain_error("p_y: negative input");
  }
  const double two_minus_d = 2.0 - k.d;
  if (x <= y) {
    // continuity at x == y: take this branch deterministically
    return std::pow(y, k.alpha - two_minus_d) * std::pow(x, two_minus_d);
  }
  return std::pow(x, k.alpha);
}

double log_p_y(const Kappa& k, double y, double x) {
  if (y < 0.0 || !(x > 0.0)) {
    throw std::domain_error("log_p_y: requires y >= 0, x > 0");
  }
  const double two_minus_d = 2.0 - k.d;
  if (x <= y) {
    return (k.alpha - two_minus_d) * std::log(y) + two_minus_d * std::log(x);
  }
  return k.alpha * std::log(x);
}

PointConfig config_quantities(const std::vector<cplx>& points) {
  const std::size_t n = points.size();
  if (n == 0) throw std::invalid_argument("config_quantities: empty configuration");
  for (std::size_t i = 0; i < n; ++i) {
    if (points[i] == cplx(0.0, 0.0)) {
      throw std::invalid_argument("config_quantities: point at the origin");
    }
    if (points[i].imag() < 0.0) {
      throw std::invalid_argument("config_quantities: point below the real line");
    }
    for (std::size_t j = i + 1; j < n; ++j) {
      if (points[i] == points[j]) {
        throw std::invalid_argument("config_quantities: duplicate points");
      }
    }
  }
  PointConfig cfg;
  cfg.points = points;
  cfg.l.resize(n);
  cfg.dmin.resize(n);
  cfg.y.resize(n);
  cfg.R.resize(n);
  cfg.Q = 0.0;
  for (std::size_t kk = 0; kk < n; ++kk) {
    double l = std::abs(points[kk]);  // z_0 = 0
    for (std::size_t j = 0; j < kk; ++j) l = std::min(l, std::abs(points[kk] - points[j]));
    double dm = std::abs(points[kk]);
    for (std::size_t j = 0; j < n; ++j) {
      if (j != kk) dm = std::min(dm, std::abs(points[kk] - points[j]));
    }
    cfg.l[kk] = l;
    cfg.dmin[kk] = dm;
    cfg.y[kk] = points[kk].imag();
    cfg.R[kk] = std::min(dm, cfg.y[kk]);
    cfg.Q = std::max(cfg.Q, std::abs(points[kk]) / dm);
  }
  return cfg;
}

GreenValue f_radii(const Kappa& k, const PointConfig& cfg,
                   const std::vector<double>& radii) {
  if (radii.size() != cfg.points.size()) {
    throw std::invalid_argument("f_radii: radii length mismatch");
  }
  double log_sum = 0.0;
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 0.0)) throw std::invalid_argument("f_radii: radii must be positive");
    log_sum += log_p_y(k, cfg.y[i], radii[i]) - log_p_y(k, cfg.y[i], cfg.l[i]);
  }
  return GreenValue{std::exp(log_sum), GreenKind::f_with_radii};
}

GreenValue f_limit(const Kappa& k, const PointConfig& cfg) {
  const double two_minus_d = 2.0 - k.d;
  double log_sum = 0.0;
  for (std::size_t i = 0; i < cfg.points.size(); ++i) {
    if (!(cfg.y[i] > 0.0)) {
      throw std::domain_error("f_limit: boundary point (Im z = 0) not supported");
    }
    log_sum += (k.alpha - two_minus_d) * std::log(cfg.y[i]) -
               log_p_y(k, cfg.y[i], cfg.l[i]);
  }
  return GreenValue{std::exp(log_sum), GreenKind::f_limit};
}

GreenValue green_one_point(const Kappa& k, double c_hat, cplx z) {
  if (!(z.imag() > 0.0)) throw std::domain_error("green_one_point: Im z must be positive");
  if (!(c_hat > 0.0)) throw std::domain_error("green_one_point: c_hat must be positive");
  const double lg = (k.d - 2.0 + k.alpha) * std::log(z.imag()) -
                    k.alpha * std::log(std::abs(z));
  return GreenValue{c_hat * std::exp(lg), GreenKind::g_one_point};
}

double pde_residual_1pt(const Kappa& k, double c_hat, cplx z, double step) {
  if (!(step > 0.0)) throw std::invalid_argument("pde_residual_1pt: step must be positive");
  if (!(z.imag() > 0.0)) throw std::domain_error("pde_residual_1pt: Im z must be positive");
  const double x = z.real(), y = z.imag(), h = step;
  auto G = [&](double xx, double yy) {
    return green_one_point(k, c_hat, cplx(xx, yy)).value;
  };
  const double g0 = G(x, y);
  const double gx = (G(x + h, y) - G(x - h, y)) / (2.0 * h);
  const double gy = (G(x, y + h) - G(x, y - h)) / (2.0 * h);
  const double gxx = (G(x + h, y) - 2.0 * g0 + G(x - h, y)) / (h * h);
  const double r2 = x * x + y * y;
  return 0.5 * k.kappa * gxx + gx * 2.0 * x / r2 - gy * 2.0 * y / r2 -
         2.0 * (2.0 - k.d) * g0 * (x * x - y * y) / (r2 * r2);
}

}  // namespace slelab
