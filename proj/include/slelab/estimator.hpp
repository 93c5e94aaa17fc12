#pragma once
#include <map>
#include <vector>

#include "slelab/analytic.hpp"
#include "slelab/flow.hpp"
#include "slelab/loewner.hpp"

namespace slelab {

// One Monte Carlo experiment cell.  truncation_factor M bounds the simulated
// capacity time by t_max = (M * max|z_k|)^2 / 2, which guarantees the hull
// has exited the disc of radius M * max|z_k|.
struct Scenario {
  Kappa kappa{};
  std::vector<cplx> points;
  std::vector<double> radii;
  std::size_t n_samples = 0;
  double dt = 1e-4;
  double truncation_factor = 20.0;
  std::uint64_t master_seed = 0;
  int workers = 1;
  double eta = 0.15;     // adaptive step aggressiveness (see FlowOptions)
  bool adaptive = true;  // uniform dt_floor stepping when false
};

// Throws std::invalid_argument describing the first violated precondition.
void validate_scenario(const Scenario& s);

struct GreenEstimate {
  double mean = 0.0;
  double stderr_ = 0.0;
  std::size_t n_samples = 0;
  std::size_t n_hits = 0;
  double truncation_factor = 0.0;
  bool rescaled = false;
  bool defined = true;  // false for degenerate n_samples == 0 cells
};

using Permutation = std::vector<int>;

struct OrderedHitRecord {
  Permutation permutation;
  std::vector<double> hit_times;
  bool all_hit = false;
};

struct VisitEstimate {
  GreenEstimate unordered;
  std::map<Permutation, GreenEstimate> per_permutation;
};

// Low-level multi-arm engine: each arm is a (radii, horizon) pair evaluated
// on the same per-sample curve, so cross-arm comparisons use common random
// numbers and monotonicity in the radii holds path by path.
struct HitArm {
  std::vector<double> radii;
  double t_max = 0.0;
};

struct ArmCounts {
  std::size_t all_hit = 0;
  std::map<Permutation, std::size_t> per_perm;
};

std::vector<ArmCounts> run_hit_mc(const Scenario& s,
                                  const std::vector<HitArm>& arms);

// Raw any-order visit probability plus the ordered split.  The unordered
// hit count equals the sum of the ordered counts exactly, per run.
VisitEstimate estimate_visit_prob(const Scenario& s);

// Unordered estimate multiplied by prod r_k^{d-2} (stderr scaled the same).
GreenEstimate rescaled_green(const Scenario& s);

// One rescaled estimate per schedule entry, common random numbers across
// entries.  Schedule must be nonempty with decreasing radii within (0, d_k).
std::vector<GreenEstimate> convergence_sweep(
    const Scenario& s, const std::vector<std::vector<double>>& schedule);

struct BoundRatio {
  double ratio = 0.0;
  bool low_sample = false;  // zero hits; ratio reported as 0
};

// (raw unordered p_hat) / F(z; r).
BoundRatio bound_ratio(const Scenario& s);

// c_hat estimate r^{d-2} p_hat / ((Im z)^{d-2+alpha} |z|^{-alpha}).
// Throws std::runtime_error on zero hits.
double calibrate_c_hat(const Kappa& k, cplx z, double r, std::size_t n,
                       double dt, std::uint64_t seed);

// Radon-Nikodym weight M^z_tau / G(z) along a given driving path, with
// tau the first time the conformal-radius distance to z drops to
// stop_radius.  Returns 0 if tau is not reached within the path duration.
// c_hat cancels algebraically and is accepted only for interface symmetry.
double rn_weight(const DrivingPath& path, cplx z, double stop_radius,
                 const Kappa& k, double c_hat);

struct MeanStderr {
  double mean = 0.0;
  double stderr_ = 0.0;
};

// E[M_{t and tau_guard}] / M_0 for each requested time (ascending), with the
// guard stopping once the conformal-radius distance drops below 0.1 Im z.
std::vector<MeanStderr> martingale_test(const Kappa& k, double c_hat, cplx z,
                                        const std::vector<double>& times,
                                        std::size_t n, double dt,
                                        std::uint64_t seed);

// Importance-sampled ordered two-point estimate
// G(z1) E[rn_weight * |g_tau'(z2)|^{2-d} G(Z_tau(z2))].
GreenEstimate ghat_two_point(const Kappa& k, double c_hat, cplx z1, cplx z2,
                             double rho1, std::size_t n, double dt,
                             std::uint64_t seed);

// Raw-probability estimates for (points, radii) and (lambda*points,
// lambda*radii) with independent seeds; equal in distribution.
std::pair<GreenEstimate, GreenEstimate> scaling_check(const Scenario& s,
                                                      double lambda);

}  // namespace slelab
