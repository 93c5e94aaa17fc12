#pragma once
#include <optional>
#include <span>
#include <vector>

#include "slelab/analytic.hpp"

namespace slelab {

// Square root with nonnegative imaginary part on the slit plane; keeps the
// Loewner flow in the closed upper half-plane.
inline cplx upper_sqrt(cplx w) {
  cplx s = std::sqrt(w);
  return s.imag() < 0.0 ? -s : s;
}

// Time-discretized driving function U_t on a uniform grid, u[0] = 0.
struct DrivingPath {
  double dt = 0.0;
  std::vector<double> u;  // u[i] = U(i*dt)
  Kappa kappa{};
  std::uint64_t seed = 0;

  double duration() const { return dt * static_cast<double>(u.size() - 1); }
};

// Brownian driving: increments are iid Normal(0, kappa*dt), deterministic
// given the seed.
DrivingPath sample_driving(const Kappa& k, double t_max, double dt,
                           std::uint64_t seed);

// Discrete curve: tips[i] approximates gamma(i*dt); tips[0] = U(0).
struct CurveTrace {
  DrivingPath driving;
  std::vector<cplx> tips;
};

// Slit-map discretization: per step of capacity 2*dt, shift by the driving
// increment then apply h(w) = sqrt(w^2 + 4*dt).  Tips come from composing
// the inverse elementary maps applied to 0 (O(N^2) in the step count).
CurveTrace trace_curve(const DrivingPath& path);

struct MapState {
  cplx g;        // g_t(z)
  cplx gprime;   // g_t'(z)
  bool swallowed = false;
  double swallow_time = 0.0;
};

// Forward point flow, composing exactly the per-step maps of trace_curve.
// A point is swallowed once |g_s(z) - U_s|^2 < 4*dt*(1+margin), margin 0.5.
MapState evolve_point(const DrivingPath& path, cplx z, double t);

// Z_t(z) = g_t(z) - U_t.
cplx centered_map(const DrivingPath& path, cplx z, double t);

// First step time with |tip| > rho, if the trace ever exits.
std::optional<double> hull_exit_time(const CurveTrace& trace, double rho);

// Hull map of the closed semi-disc of radius r at x0: z + r^2/(z - x0).
cplx semidisc_map(double x0, double r, cplx z);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

// Approximates S_{K_t} by evaluating g_t just outside the swept real
// footprint (offset sqrt(dt)); error O(sqrt(dt)).  Always contains U_t.
Interval hull_support(const CurveTrace& trace, double t);

// For each target, the first step time at which the polyline through the
// tips comes within the given radius, or nullopt.  Segments longer than
// min(radii)/4 are re-traced locally at dt/4 (up to 3 levels) with the
// driving refined by linear interpolation.
std::vector<std::optional<double>> first_hits(const CurveTrace& trace,
                                              std::span<const cplx> targets,
                                              std::span<const double> radii);

}  // namespace slelab
