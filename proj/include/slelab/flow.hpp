#pragma once
#include <limits>
#include <span>
#include <vector>

#include "slelab/analytic.hpp"
#include "slelab/rng.hpp"

namespace slelab {

// Step-size policy for the Monte Carlo point flow.  dt_floor is the base
// resolution near the targets; away from them the capacity step grows so
// that the per-step hull feature stays below eta times the distance from
// the curve tip to the nearest tracked point.
struct FlowOptions {
  double dt_floor = 1e-4;
  double eta = 0.15;
  bool adaptive = true;
  double swallow_margin = 0.5;
};

// Centered Loewner flow of a fixed set of interior points under a Brownian
// driving realization drawn step by step from the supplied stream.  One
// instance per Monte Carlo sample; not shared between workers.
class PointFlow {
 public:
  PointFlow(const Kappa& k, std::span<const cplx> targets,
            const FlowOptions& opt, SplitMix64* rng);

  // Advance one step of at most max_dt; returns the step actually taken.
  double step(double max_dt = std::numeric_limits<double>::infinity());

  double time() const { return t_; }
  std::size_t size() const { return w_.size(); }
  bool alive(std::size_t i) const { return alive_[i]; }
  double swallow_time(std::size_t i) const { return swallow_time_[i]; }
  cplx centered(std::size_t i) const { return w_[i]; }       // Z_t(z_i)
  cplx gprime(std::size_t i) const { return gp_[i]; }
  std::size_t alive_count() const { return alive_count_; }

  // Conformal-radius distance proxy: Im Z_t(z) / |g_t'(z)| (half the
  // conformal radius of z in H_t); non-increasing in t, 0 once swallowed.
  double conf_dist(std::size_t i) const;

  // Distance from the curve tip to z_i, measured through the map:
  // |Z_t(z_i)| / |g_t'(z_i)|.
  double tip_dist(std::size_t i) const;

 private:
  Kappa kappa_;
  FlowOptions opt_;
  SplitMix64* rng_;
  std::vector<cplx> w_;
  std::vector<cplx> gp_;
  std::vector<bool> alive_;
  std::vector<double> swallow_time_;
  std::size_t alive_count_;
  double t_ = 0.0;
};

// Running minima of the conformal-radius distance for one target: the
// staircase of (time, distance) record lows, recorded at 0.5% granularity,
// plus the swallow time if any.  Enough to answer "when did the curve first
// come within r" for every radius and horizon of a common-random-numbers
// comparison from a single simulation pass.
struct HitProfile {
  static constexpr double kNever = std::numeric_limits<double>::infinity();
  double swallow_time = kNever;
  std::vector<std::pair<double, double>> lows;  // (t, conf_dist), dist decreasing

  // First time the conformal-radius distance drops to r, restricted to
  // t <= horizon; kNever if it does not happen.
  double first_time_within(double r, double horizon) const;
};

std::vector<HitProfile> simulate_hit_profiles(const Kappa& k,
                                              std::span<const cplx> targets,
                                              const FlowOptions& opt,
                                              double t_max, SplitMix64* rng);

}  // namespace slelab
