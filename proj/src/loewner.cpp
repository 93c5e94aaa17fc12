#include "slelab/loewner.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "slelab/rng.hpp"

namespace slelab {

namespace {

constexpr double kSwallowMargin = 0.5;

// Inverse elementary map: preimage of w under h(v) = sqrt(v^2 + 4*cap/2)...
// here cap is the half-plane capacity 2*dt of the step, slit height 2*sqrt(dt).
inline cplx inverse_step(cplx w, double delta, double dt) {
  return delta + upper_sqrt(w * w - 4.0 * dt);
}

}  // namespace

DrivingPath sample_driving(const Kappa& k, double t_max, double dt,
                           std::uint64_t seed) {
  if (!(t_max > 0.0) || !(dt > 0.0)) {
    throw std::invalid_argument("sample_driving: t_max and dt must be positive");
  }
  if (dt > t_max) {
    throw std::invalid_argument("sample_driving: dt exceeds t_max");
  }
  const std::size_t n = static_cast<std::size_t>(std::ceil(t_max / dt - 1e-12));
  DrivingPath path;
  path.dt = dt;
  path.kappa = k;
  path.seed = seed;
  path.u.resize(n + 1);
  path.u[0] = 0.0;
  SplitMix64 rng(seed);
  const double sigma = std::sqrt(k.kappa * dt);
  for (std::size_t i = 0; i < n; ++i) {
    path.u[i + 1] = path.u[i] + sigma * rng.next_normal();
  }
  return path;
}

CurveTrace trace_curve(const DrivingPath& path) {
  const std::size_t n = path.u.size() - 1;
  const double dt = path.dt;
  CurveTrace trace;
  trace.driving = path;
  trace.tips.resize(n + 1);
  trace.tips[0] = cplx(path.u[0], 0.0);
  for (std::size_t m = 1; m <= n; ++m) {
    cplx v(0.0, 0.0);
    for (std::size_t i = m; i-- > 0;) {
      v = inverse_step(v, path.u[i + 1] - path.u[i], dt);
    }
    trace.tips[m] = v + path.u[0];
  }
  return trace;
}

MapState evolve_point(const DrivingPath& path, cplx z, double t) {
  const double dt = path.dt;
  if (t < 0.0 || t > path.duration() + 0.5 * dt) {
    throw std::invalid_argument("evolve_point: t outside path duration");
  }
  const std::size_t m =
      std::min(path.u.size() - 1,
               static_cast<std::size_t>(std::llround(t / dt)));
  MapState st;
  if (z == cplx(path.u[0], 0.0)) {
    st.g = z;
    st.gprime = cplx(1.0, 0.0);
    st.swallowed = true;
    st.swallow_time = 0.0;
    return st;
  }
  cplx w = z - path.u[0];
  cplx gp(1.0, 0.0);
  const double swallow2 = 4.0 * dt * (1.0 + kSwallowMargin);
  for (std::size_t i = 0; i < m; ++i) {
    const cplx v = w - (path.u[i + 1] - path.u[i]);
    if (std::norm(v) < swallow2) {
      st.g = w + path.u[i];
      st.gprime = gp;
      st.swallowed = true;
      st.swallow_time = static_cast<double>(i) * dt;
      return st;
    }
    // upper_sqrt collapses both real half-axes to the positive one; restore
    // the sign for real points left of the slit
    cplx wn = upper_sqrt(v * v + 4.0 * dt);
    if (v.imag() == 0.0 && v.real() < 0.0) wn = -wn;
    gp *= v / wn;
    w = wn;
  }
  st.g = w + path.u[m];
  st.gprime = gp;
  return st;
}

cplx centered_map(const DrivingPath& path, cplx z, double t) {
  const std::size_t m =
      std::min(path.u.size() - 1,
               static_cast<std::size_t>(std::llround(t / path.dt)));
  return evolve_point(path, z, t).g - path.u[m];
}

std::optional<double> hull_exit_time(const CurveTrace& trace, double rho) {
  if (!(rho > 0.0)) throw std::invalid_argument("hull_exit_time: rho must be positive");
  for (std::size_t i = 0; i < trace.tips.size(); ++i) {
    if (std::abs(trace.tips[i]) > rho) {
      return static_cast<double>(i) * trace.driving.dt;
    }
  }
  return std::nullopt;
}

cplx semidisc_map(double x0, double r, cplx z) {
  if (!(r > 0.0)) throw std::invalid_argument("semidisc_map: r must be positive");
  if (z == cplx(x0, 0.0)) throw std::invalid_argument("semidisc_map: singular input z = x0");
  return z + r * r / (z - x0);
}

Interval hull_support(const CurveTrace& trace, double t) {
  const DrivingPath& path = trace.driving;
  const std::size_t m =
      std::min(path.u.size() - 1,
               static_cast<std::size_t>(std::llround(t / path.dt)));
  if (m == 0) return Interval{path.u[0], path.u[0]};
  double lo = path.u[0], hi = path.u[0];
  for (std::size_t i = 0; i <= m; ++i) {
    lo = std::min(lo, trace.tips[i].real());
    hi = std::max(hi, trace.tips[i].real());
  }
  // bracket just outside the footprint; widen if the bracket point is still
  // numerically inside the hull
  double eps = std::sqrt(path.dt);
  for (int attempt = 0; attempt < 8; ++attempt) {
    MapState a = evolve_point(path, cplx(lo - eps, 0.0), t);
    MapState b = evolve_point(path, cplx(hi + eps, 0.0), t);
    if (!a.swallowed && !b.swallowed) {
      return Interval{a.g.real(), b.g.real()};
    }
    eps *= 2.0;
  }
  throw std::runtime_error("hull_support: bracketing failed");
}

namespace {

// gamma(t_i + tau) with the final coarse step re-traced at substep h and the
// driving refined by linear interpolation.
cplx tip_within_step(const DrivingPath& path, std::size_t i, double tau, double h) {
  const double dt = path.dt;
  const double delta = path.u[i + 1] - path.u[i];
  cplx v(0.0, 0.0);
  const std::size_t nsub =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(tau / h)));
  const double hs = tau / static_cast<double>(nsub);
  const double dsub = delta * hs / dt;
  for (std::size_t s = 0; s < nsub; ++s) v = inverse_step(v, dsub, hs);
  for (std::size_t j = i; j-- > 0;) {
    v = inverse_step(v, path.u[j + 1] - path.u[j], dt);
  }
  return v + path.u[0];
}

double point_segment_dist(cplx p, cplx a, cplx b) {
  const cplx ab = b - a;
  const double len2 = std::norm(ab);
  if (len2 == 0.0) return std::abs(p - a);
  double s = ((p.real() - a.real()) * ab.real() + (p.imag() - a.imag()) * ab.imag()) / len2;
  s = std::clamp(s, 0.0, 1.0);
  return std::abs(p - (a + s * ab));
}

}  // namespace

std::vector<std::optional<double>> first_hits(const CurveTrace& trace,
                                              std::span<const cplx> targets,
                                              std::span<const double> radii) {
  if (targets.size() != radii.size()) {
    throw std::invalid_argument("first_hits: targets/radii length mismatch");
  }
  for (double r : radii) {
    if (!(r > 0.0)) throw std::invalid_argument("first_hits: radii must be positive");
  }
  const DrivingPath& path = trace.driving;
  const double dt = path.dt;
  double rmin = radii.empty() ? 0.0 : *std::min_element(radii.begin(), radii.end());
  std::vector<std::optional<double>> hits(targets.size());
  std::size_t remaining = targets.size();

  for (std::size_t k = 0; k < targets.size(); ++k) {
    if (std::abs(targets[k] - trace.tips[0]) <= radii[k]) {
      hits[k] = 0.0;
      --remaining;
    }
  }

  const double seg_cap = rmin / 4.0;
  for (std::size_t i = 0; i + 1 < trace.tips.size() && remaining > 0; ++i) {
    // refined polyline over [t_i, t_{i+1}], times paired with points
    std::vector<std::pair<double, cplx>> pts;
    pts.emplace_back(static_cast<double>(i) * dt, trace.tips[i]);
    pts.emplace_back(static_cast<double>(i + 1) * dt, trace.tips[i + 1]);
    for (int level = 1; level <= 3; ++level) {
      bool too_coarse = false;
      for (std::size_t s = 0; s + 1 < pts.size(); ++s) {
        if (std::abs(pts[s + 1].second - pts[s].second) > seg_cap) {
          too_coarse = true;
          break;
        }
      }
      if (!too_coarse) break;
      const double h = dt / std::pow(4.0, level);
      const std::size_t nsub = static_cast<std::size_t>(std::llround(dt / h));
      std::vector<std::pair<double, cplx>> fine;
      fine.reserve(nsub + 1);
      fine.emplace_back(pts.front());
      for (std::size_t s = 1; s < nsub; ++s) {
        const double tau = h * static_cast<double>(s);
        fine.emplace_back(static_cast<double>(i) * dt + tau,
                          tip_within_step(path, i, tau, h));
      }
      fine.emplace_back(pts.back());
      pts = std::move(fine);
    }
    for (std::size_t k = 0; k < targets.size(); ++k) {
      if (hits[k]) continue;
      for (std::size_t s = 0; s + 1 < pts.size(); ++s) {
        if (point_segment_dist(targets[k], pts[s].second, pts[s + 1].second) <= radii[k]) {
          hits[k] = pts[s + 1].first;
          --remaining;
          break;
        }
      }
    }
  }
  return hits;
}

}  // namespace slelab
