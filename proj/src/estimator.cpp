#include "slelab/estimator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace slelab {

namespace {

constexpr std::size_t kBlockSize = 512;

double scenario_t_max(const Scenario& s) {
  double zmax = 0.0;
  for (const cplx& z : s.points) zmax = std::max(zmax, std::abs(z));
  const double rho = s.truncation_factor * zmax;
  return 0.5 * rho * rho;
}

GreenEstimate binomial_estimate(std::size_t hits, std::size_t n, double m) {
  GreenEstimate e;
  e.n_samples = n;
  e.n_hits = hits;
  e.truncation_factor = m;
  if (n == 0) {
    e.defined = false;
    return e;
  }
  const double p = static_cast<double>(hits) / static_cast<double>(n);
  e.mean = p;
  e.stderr_ = std::sqrt(p * (1.0 - p) / static_cast<double>(n));
  return e;
}

// Deterministic block-parallel loop; block_fn(b) must touch only slot b.
void parallel_blocks(std::size_t nblocks, int workers,
                     const std::function<void(std::size_t)>& block_fn) {
  if (workers <= 1 || nblocks <= 1) {
    for (std::size_t b = 0; b < nblocks; ++b) block_fn(b);
    return;
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t b = next.fetch_add(1);
      if (b >= nblocks) return;
      block_fn(b);
    }
  };
  std::vector<std::thread> pool;
  const int nthreads = std::min<int>(workers, static_cast<int>(nblocks));
  pool.reserve(static_cast<std::size_t>(nthreads));
  for (int i = 0; i < nthreads; ++i) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
}

double log_green_shape(const Kappa& k, double im, double abs_z) {
  return (k.d - 2.0 + k.alpha) * std::log(im) - k.alpha * std::log(abs_z);
}

}  // namespace

void validate_scenario(const Scenario& s) {
  if (!(s.kappa.kappa > 0.0) || !(s.kappa.kappa < 8.0)) {
    throw std::invalid_argument("scenario: kappa must lie in (0,8)");
  }
  const PointConfig cfg = config_quantities(s.points);
  if (s.radii.size() != s.points.size()) {
    throw std::invalid_argument("scenario: radii length mismatch");
  }
  for (std::size_t i = 0; i < s.radii.size(); ++i) {
    if (!(s.radii[i] > 0.0)) throw std::invalid_argument("scenario: radii must be positive");
    if (!(s.radii[i] < cfg.dmin[i])) {
      throw std::invalid_argument("scenario: requires r_k < d_k");
    }
    if (!(cfg.y[i] > 0.0)) {
      throw std::invalid_argument("scenario: interior points only (Im z > 0)");
    }
    if (!(s.radii[i] < cfg.y[i])) {
      throw std::invalid_argument("scenario: requires r_k < Im z_k");
    }
  }
  if (!(s.dt > 0.0)) throw std::invalid_argument("scenario: dt must be positive");
  if (!(s.truncation_factor >= 2.0)) {
    throw std::invalid_argument("scenario: truncation factor M must be >= 2");
  }
  if (s.workers < 1) throw std::invalid_argument("scenario: workers must be >= 1");
}

std::vector<ArmCounts> run_hit_mc(const Scenario& s,
                                  const std::vector<HitArm>& arms) {
  validate_scenario(s);
  if (arms.empty()) throw std::invalid_argument("run_hit_mc: no arms");
  double t_sim = 0.0;
  for (const HitArm& a : arms) {
    if (a.radii.size() != s.points.size()) {
      throw std::invalid_argument("run_hit_mc: arm radii length mismatch");
    }
    t_sim = std::max(t_sim, a.t_max);
  }
  const std::size_t n = s.n_samples;
  const std::size_t nblocks = (n + kBlockSize - 1) / kBlockSize;
  std::vector<std::vector<ArmCounts>> partial(
      nblocks, std::vector<ArmCounts>(arms.size()));

  FlowOptions opt;
  opt.dt_floor = s.dt;
  opt.eta = s.eta;
  opt.adaptive = s.adaptive;

  auto block_fn = [&](std::size_t b) {
    const std::size_t lo = b * kBlockSize;
    const std::size_t hi = std::min(n, lo + kBlockSize);
    const std::size_t npts = s.points.size();
    std::vector<double> times(npts);
    std::vector<int> order(npts);
    for (std::size_t i = lo; i < hi; ++i) {
      SplitMix64 rng(mix_seed(s.master_seed, i));
      const auto profiles =
          simulate_hit_profiles(s.kappa, s.points, opt, t_sim, &rng);
      for (std::size_t a = 0; a < arms.size(); ++a) {
        bool all = true;
        for (std::size_t kidx = 0; kidx < npts; ++kidx) {
          times[kidx] = profiles[kidx].first_time_within(arms[a].radii[kidx],
                                                         arms[a].t_max);
          if (times[kidx] == HitProfile::kNever) {
            all = false;
            break;
          }
        }
        if (!all) continue;
        ArmCounts& c = partial[b][a];
        ++c.all_hit;
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](int u, int v) { return times[u] < times[v]; });
        ++c.per_perm[order];
      }
    }
  };
  parallel_blocks(nblocks, s.workers, block_fn);

  // merge in ascending block order
  std::vector<ArmCounts> merged(arms.size());
  for (std::size_t b = 0; b < nblocks; ++b) {
    for (std::size_t a = 0; a < arms.size(); ++a) {
      merged[a].all_hit += partial[b][a].all_hit;
      for (const auto& [perm, cnt] : partial[b][a].per_perm) {
        merged[a].per_perm[perm] += cnt;
      }
    }
  }
  return merged;
}

VisitEstimate estimate_visit_prob(const Scenario& s) {
  const auto counts =
      run_hit_mc(s, {HitArm{s.radii, scenario_t_max(s)}});
  VisitEstimate out;
  out.unordered = binomial_estimate(counts[0].all_hit, s.n_samples,
                                    s.truncation_factor);
  for (const auto& [perm, cnt] : counts[0].per_perm) {
    out.per_permutation[perm] =
        binomial_estimate(cnt, s.n_samples, s.truncation_factor);
  }
  return out;
}

GreenEstimate rescaled_green(const Scenario& s) {
  GreenEstimate e = estimate_visit_prob(s).unordered;
  double factor = 1.0;
  for (double r : s.radii) factor *= std::pow(r, s.kappa.d - 2.0);
  e.mean *= factor;
  e.stderr_ *= factor;
  e.rescaled = true;
  return e;
}

std::vector<GreenEstimate> convergence_sweep(
    const Scenario& s, const std::vector<std::vector<double>>& schedule) {
  if (schedule.empty()) throw std::invalid_argument("convergence_sweep: empty schedule");
  const PointConfig cfg = config_quantities(s.points);
  for (std::size_t e = 0; e < schedule.size(); ++e) {
    if (schedule[e].size() != s.points.size()) {
      throw std::invalid_argument("convergence_sweep: schedule entry length mismatch");
    }
    for (std::size_t kidx = 0; kidx < schedule[e].size(); ++kidx) {
      const double r = schedule[e][kidx];
      if (!(r > 0.0) || !(r < cfg.dmin[kidx])) {
        throw std::invalid_argument("convergence_sweep: schedule radius outside (0, d_k)");
      }
      if (e > 0 && !(r <= schedule[e - 1][kidx])) {
        throw std::invalid_argument("convergence_sweep: schedule must be decreasing");
      }
    }
  }
  Scenario probe = s;
  probe.radii = schedule.front();
  const double t_max = scenario_t_max(s);
  std::vector<HitArm> arms;
  arms.reserve(schedule.size());
  for (const auto& radii : schedule) arms.push_back(HitArm{radii, t_max});
  const auto counts = run_hit_mc(probe, arms);
  std::vector<GreenEstimate> out;
  out.reserve(schedule.size());
  for (std::size_t a = 0; a < schedule.size(); ++a) {
    GreenEstimate e = binomial_estimate(counts[a].all_hit, s.n_samples,
                                        s.truncation_factor);
    double factor = 1.0;
    for (double r : schedule[a]) factor *= std::pow(r, s.kappa.d - 2.0);
    e.mean *= factor;
    e.stderr_ *= factor;
    e.rescaled = true;
    out.push_back(e);
  }
  return out;
}

BoundRatio bound_ratio(const Scenario& s) {
  const GreenEstimate e = estimate_visit_prob(s).unordered;
  const PointConfig cfg = config_quantities(s.points);
  const double f = f_radii(s.kappa, cfg, s.radii).value;
  BoundRatio br;
  br.low_sample = (e.n_hits == 0);
  br.ratio = e.mean / f;
  return br;
}

double calibrate_c_hat(const Kappa& k, cplx z, double r, std::size_t n,
                       double dt, std::uint64_t seed) {
  if (!(z.imag() > 0.0)) throw std::invalid_argument("calibrate_c_hat: Im z must be positive");
  if (!(r > 0.0) || !(r < z.imag())) {
    throw std::invalid_argument("calibrate_c_hat: requires 0 < r < Im z");
  }
  Scenario s;
  s.kappa = k;
  s.points = {z};
  s.radii = {r};
  s.n_samples = n;
  s.dt = dt;
  s.master_seed = seed;
  const GreenEstimate e = estimate_visit_prob(s).unordered;
  if (e.n_hits == 0) throw std::runtime_error("calibrate_c_hat: zero hits, calibration failed");
  const double shape = std::exp(log_green_shape(k, z.imag(), std::abs(z)));
  return std::pow(r, k.d - 2.0) * e.mean / shape;
}

double rn_weight(const DrivingPath& path, cplx z, double stop_radius,
                 const Kappa& k, double c_hat) {
  (void)c_hat;  // cancels in M^z_t / G(z)
  if (!(z.imag() > 0.0)) throw std::invalid_argument("rn_weight: Im z must be positive");
  if (!(stop_radius > 0.0) || !(stop_radius < std::abs(z))) {
    throw std::invalid_argument("rn_weight: requires 0 < stop_radius < |z|");
  }
  const double dt = path.dt;
  const double log_g0 = log_green_shape(k, z.imag(), std::abs(z));
  cplx w = z - path.u[0];
  cplx gp(1.0, 0.0);
  const double swallow2 = 4.0 * dt * 1.5;
  auto weight_here = [&] {
    const double log_m = (2.0 - k.d) * std::log(std::abs(gp)) +
                         log_green_shape(k, w.imag(), std::abs(w));
    return std::exp(log_m - log_g0);
  };
  if (w.imag() / std::abs(gp) <= stop_radius) return weight_here();
  for (std::size_t i = 0; i + 1 < path.u.size(); ++i) {
    const cplx v = w - (path.u[i + 1] - path.u[i]);
    if (std::norm(v) < swallow2) {
      // curve passed through the disc; report the last pre-swallow value
      return weight_here();
    }
    const cplx wn = upper_sqrt(v * v + 4.0 * dt);
    gp *= v / wn;
    w = wn;
    if (w.imag() / std::abs(gp) <= stop_radius) return weight_here();
  }
  return 0.0;
}

std::vector<MeanStderr> martingale_test(const Kappa& k, double c_hat, cplx z,
                                        const std::vector<double>& times,
                                        std::size_t n, double dt,
                                        std::uint64_t seed) {
  (void)c_hat;  // M_t / M_0 is c_hat-free
  if (!(z.imag() > 0.0)) throw std::invalid_argument("martingale_test: Im z must be positive");
  if (!std::is_sorted(times.begin(), times.end())) {
    throw std::invalid_argument("martingale_test: times must be ascending");
  }
  const double guard = 0.1 * z.imag();
  const double log_m0 = log_green_shape(k, z.imag(), std::abs(z));
  std::vector<double> sum(times.size(), 0.0), sumsq(times.size(), 0.0);
  FlowOptions opt;
  opt.dt_floor = dt;
  opt.adaptive = false;
  const cplx targets[1] = {z};
  for (std::size_t i = 0; i < n; ++i) {
    SplitMix64 rng(mix_seed(seed, i));
    PointFlow flow(k, targets, opt, &rng);
    double log_m = log_m0;
    bool frozen = false;
    for (std::size_t ti = 0; ti < times.size(); ++ti) {
      while (!frozen && flow.time() < times[ti] - 0.25 * dt) {
        flow.step(times[ti] - flow.time());
        if (!flow.alive(0) || flow.conf_dist(0) < guard) {
          frozen = true;
          break;
        }
        log_m = (2.0 - k.d) * std::log(std::abs(flow.gprime(0))) +
                log_green_shape(k, flow.centered(0).imag(),
                                std::abs(flow.centered(0)));
      }
      const double ratio = std::exp(log_m - log_m0);
      sum[ti] += ratio;
      sumsq[ti] += ratio * ratio;
    }
  }
  std::vector<MeanStderr> out(times.size());
  for (std::size_t ti = 0; ti < times.size(); ++ti) {
    const double mean = sum[ti] / static_cast<double>(n);
    const double var =
        std::max(0.0, sumsq[ti] / static_cast<double>(n) - mean * mean);
    out[ti].mean = mean;
    out[ti].stderr_ = std::sqrt(var / static_cast<double>(n));
  }
  return out;
}

GreenEstimate ghat_two_point(const Kappa& k, double c_hat, cplx z1, cplx z2,
                             double rho1, std::size_t n, double dt,
                             std::uint64_t seed) {
  if (z1 == z2) throw std::invalid_argument("ghat_two_point: points must be distinct");
  if (!(z1.imag() > 0.0) || !(z2.imag() > 0.0)) {
    throw std::invalid_argument("ghat_two_point: interior points required");
  }
  if (!(rho1 > 0.0) || !(rho1 < std::min(std::abs(z1 - z2), std::abs(z1)))) {
    throw std::invalid_argument("ghat_two_point: requires rho1 < |z1-z2| and |z1|");
  }
  const double zmax = std::max(std::abs(z1), std::abs(z2));
  const double t_max = 0.5 * (20.0 * zmax) * (20.0 * zmax);
  const double log_g1 = log_green_shape(k, z1.imag(), std::abs(z1));
  FlowOptions opt;
  opt.dt_floor = dt;
  const cplx targets[2] = {z1, z2};
  double sum = 0.0, sumsq = 0.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < n; ++i) {
    SplitMix64 rng(mix_seed(seed, i));
    PointFlow flow(k, targets, opt, &rng);
    double log_w = 0.0;  // log of M^{z1}_t / G(z1), updated while z1 alive
    bool reached = false;
    while (flow.time() < t_max) {
      flow.step(t_max - flow.time());
      if (!flow.alive(0)) {
        reached = true;  // swallowed: tau attained, last pre-swallow weight
        break;
      }
      log_w = (2.0 - k.d) * std::log(std::abs(flow.gprime(0))) +
              log_green_shape(k, flow.centered(0).imag(),
                              std::abs(flow.centered(0))) -
              log_g1;
      if (flow.conf_dist(0) <= rho1) {
        reached = true;
        break;
      }
    }
    double term = 0.0;
    if (reached && flow.alive(1)) {
      const cplx w2 = flow.centered(1);
      const double log_f2 =
          (2.0 - k.d) * std::log(std::abs(flow.gprime(1))) +
          log_green_shape(k, w2.imag(), std::abs(w2)) + std::log(c_hat);
      term = std::exp(std::log(c_hat) + log_g1 + log_w + log_f2);
      ++hits;
    }
    sum += term;
    sumsq += term * term;
  }
  GreenEstimate e;
  e.n_samples = n;
  e.n_hits = hits;
  e.truncation_factor = 20.0;
  e.rescaled = true;
  if (n == 0) {
    e.defined = false;
    return e;
  }
  e.mean = sum / static_cast<double>(n);
  const double var =
      std::max(0.0, sumsq / static_cast<double>(n) - e.mean * e.mean);
  e.stderr_ = std::sqrt(var / static_cast<double>(n));
  return e;
}

std::pair<GreenEstimate, GreenEstimate> scaling_check(const Scenario& s,
                                                      double lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("scaling_check: lambda must be positive");
  Scenario scaled = s;
  for (cplx& z : scaled.points) z *= lambda;
  for (double& r : scaled.radii) r *= lambda;
  scaled.dt = s.dt * lambda * lambda;
  scaled.master_seed = s.master_seed ^ 0xA5A5A5A55A5A5A5AULL;
  return {estimate_visit_prob(s).unordered,
          estimate_visit_prob(scaled).unordered};
}

}  // namespace slelab
