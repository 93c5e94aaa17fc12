#include "slelab/flow.hpp"

#include <algorithm>
#include <cmath>

namespace slelab {

namespace {

// Branch with nonnegative imaginary part, hand-rolled (hot loop).
inline cplx upper_sqrt_fast(double x, double y) {
  const double m = std::sqrt(x * x + y * y);
  const double t = std::sqrt(0.5 * (m + std::fabs(x)));
  double re, im;
  if (x >= 0.0) {
    re = t;
    im = (t != 0.0) ? y / (2.0 * t) : 0.0;
  } else {
    re = (t != 0.0) ? std::fabs(y) / (2.0 * t) : 0.0;
    im = std::copysign(t, y == 0.0 ? 1.0 : y);
  }
  if (im < 0.0) {
    re = -re;
    im = -im;
  }
  return cplx(re, im);
}

}  // namespace

PointFlow::PointFlow(const Kappa& k, std::span<const cplx> targets,
                     const FlowOptions& opt, SplitMix64* rng)
    : kappa_(k),
      opt_(opt),
      rng_(rng),
      w_(targets.begin(), targets.end()),
      gp_(targets.size(), cplx(1.0, 0.0)),
      alive_(targets.size(), true),
      swallow_time_(targets.size(), 0.0),
      alive_count_(targets.size()) {}

double PointFlow::conf_dist(std::size_t i) const {
  if (!alive_[i]) return 0.0;
  return w_[i].imag() / std::abs(gp_[i]);
}

double PointFlow::tip_dist(std::size_t i) const {
  if (!alive_[i]) return 0.0;
  return std::abs(w_[i]) / std::abs(gp_[i]);
}

double PointFlow::step(double max_dt) {
  double dt = opt_.dt_floor;
  if (opt_.adaptive) {
    // cap in mapped coordinates: the per-step slit height 2*sqrt(dt) and the
    // driving increment ~sqrt(kappa*dt) must stay well below min |Z_t(z_i)|,
    // otherwise the swallow test fires on points the curve never approached
    double dmin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < w_.size(); ++i) {
      if (alive_[i]) dmin = std::min(dmin, std::abs(w_[i]));
    }
    if (std::isinf(dmin)) {
      // nothing left to resolve; finish the horizon in large steps
      dt = std::max(opt_.dt_floor, 0.05 * (t_ + opt_.dt_floor));
    } else {
      const double cap = opt_.eta * dmin;
      dt = std::max(opt_.dt_floor, cap * cap / std::max(4.0, kappa_.kappa));
    }
  }
  dt = std::min(dt, max_dt);
  const double delta = std::sqrt(kappa_.kappa * dt) * rng_->next_normal();
  const double swallow2 = 4.0 * dt * (1.0 + opt_.swallow_margin);
  for (std::size_t i = 0; i < w_.size(); ++i) {
    if (!alive_[i]) continue;
    const cplx v = w_[i] - delta;
    if (std::norm(v) < swallow2) {
      alive_[i] = false;
      swallow_time_[i] = t_;
      --alive_count_;
      continue;
    }
    const cplx wn = upper_sqrt_fast(v.real() * v.real() - v.imag() * v.imag() + 4.0 * dt,
                                    2.0 * v.real() * v.imag());
    gp_[i] *= v / wn;
    w_[i] = wn;
  }
  t_ += dt;
  return dt;
}

double HitProfile::first_time_within(double r, double horizon) const {
  for (const auto& [t, dist] : lows) {
    if (t > horizon) break;
    if (dist <= r) return t;
  }
  if (swallow_time <= horizon) return swallow_time;
  return kNever;
}

std::vector<HitProfile> simulate_hit_profiles(const Kappa& k,
                                              std::span<const cplx> targets,
                                              const FlowOptions& opt,
                                              double t_max, SplitMix64* rng) {
  PointFlow flow(k, targets, opt, rng);
  const std::size_t n = targets.size();
  std::vector<HitProfile> profiles(n);
  std::vector<double> last(n);
  for (std::size_t i = 0; i < n; ++i) {
    last[i] = flow.conf_dist(i);
    profiles[i].lows.emplace_back(0.0, last[i]);
  }
  while (flow.time() < t_max && flow.alive_count() > 0) {
    flow.step(t_max - flow.time());
    const double t = flow.time();
    for (std::size_t i = 0; i < n; ++i) {
      if (!flow.alive(i)) {
        if (profiles[i].swallow_time == HitProfile::kNever) {
          profiles[i].swallow_time = flow.swallow_time(i);
        }
        continue;
      }
      const double d = flow.conf_dist(i);
      if (d <= 0.995 * last[i]) {
        profiles[i].lows.emplace_back(t, d);
        last[i] = d;
      }
    }
  }
  return profiles;
}

}  // namespace slelab
