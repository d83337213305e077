// Copyright 2026 The povmdyn Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Monte Carlo and iteration experiments built on the library: the
// two-qubit-effect volume ratio, fixed-point dynamics, the cumulative-norm
// sweep and entropy trajectories.

#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "povmdyn/dynamics.hpp"
#include "povmdyn/error.hpp"
#include "povmdyn/majorization.hpp"
#include "povmdyn/povm.hpp"
#include "povmdyn/rng.hpp"
#include "povmdyn/sampling.hpp"

namespace povmdyn {

struct McEstimate {
  double mean;
  double std_error;
  std::uint64_t samples;  // accepted draws
  std::uint64_t seed;
};

/// Fraction of the cone {|tau| <= t, 0 <= t <= 2} that also satisfies
/// |tau| <= 2 - t, with (t, tau) uniform on [0, 2] x [-2, 2]^3.
inline McEstimate volume_ratio_mc(std::uint64_t samples, std::uint64_t seed) {
  if (samples == 0) throw DomainError("volume_ratio_mc: samples must be positive");
  SeededRng rng(seed);
  const std::uint64_t max_raw = samples * 1000 + 1000;
  std::uint64_t accepted = 0, hits = 0;
  for (std::uint64_t raw = 0; raw < max_raw && accepted < samples; ++raw) {
    const double t = rng.uniform(0.0, 2.0);
    const double x = rng.uniform(-2.0, 2.0), y = rng.uniform(-2.0, 2.0), z = rng.uniform(-2.0, 2.0);
    const double tau = std::sqrt(x * x + y * y + z * z);
    if (tau > t) continue;
    ++accepted;
    if (tau <= 2.0 - t) ++hits;
  }
  if (accepted == 0) throw NumericFailure("volume_ratio_mc: no draw landed in the conditioning set");
  const double m = static_cast<double>(hits) / static_cast<double>(accepted);
  return {m, std::sqrt(m * (1.0 - m) / static_cast<double>(accepted)), accepted, seed};
}

enum class ProductKind { kStar, kStarDual };

inline const char* to_string(ProductKind k) { return k == ProductKind::kStar ? "star" : "star_dual"; }

struct TrajectoryStep {
  std::size_t iteration;
  double t;
  double tau;
  double tau_sigma_z;
  double offdiag_plusminus;
};

struct Trajectory {
  std::vector<TrajectoryStep> steps;
  HermitianMatrix final_effect;
};

/// |<+|P|->|.
inline double offdiag_plusminus(const HermitianMatrix& p) {
  if (p.dim() != 2) throw DimensionMismatch("offdiag_plusminus needs d = 2");
  Eigen::Vector2cd plus, minus;
  plus << 1.0, 1.0;
  minus << 1.0, -1.0;
  return std::abs((plus.adjoint() * p.matrix() * minus)(0)) / 2.0;
}

inline TrajectoryStep trajectory_step(std::size_t it, const HermitianMatrix& p) {
  const RealVector ev = eigenvalues(p);
  return {it, p.trace(), ev(1) - ev(0), hs_inner(pauli::sigma_z(), p), offdiag_plusminus(p)};
}

/// identity - 2 eps |-><-|.
inline Effect noisy_identity(double eps) {
  return Effect(HermitianMatrix::identity(2) - 2.0 * eps * pauli::x_minus());
}

/// Iterates P -> first effect of ((B,1-B),(1-B,B)) (*|*dag) (P, 1-P).
inline Trajectory fixed_point_run(const Effect& b, const Effect& p0, std::size_t steps, ProductKind product) {
  if (b.dim() != 2 || p0.dim() != 2) throw DimensionMismatch("fixed_point_run needs d = 2");
  Trajectory tr;
  tr.steps.reserve(steps + 1);
  HermitianMatrix p = p0.matrix();
  tr.steps.push_back(trajectory_step(0, p));
  for (std::size_t k = 1; k <= steps; ++k) {
    const Effect e(p);
    p = product == ProductKind::kStar ? star_combination(b, e) : xi_combination(b, e);
    tr.steps.push_back(trajectory_step(k, p));
  }
  tr.final_effect = p;
  return tr;
}

/// Ginibre effect with trace uniform on [k/count, (k+1)/count).
inline Effect stratified_start(std::size_t k, std::size_t count, SeededRng& rng) {
  const HermitianMatrix g = ginibre_psd(2, rng);
  const double t = (static_cast<double>(k) + rng.uniform()) / static_cast<double>(count);
  return Effect(g * (t / g.trace()));
}

struct FixedPointRun {
  std::size_t start;
  ProductKind product;
  Trajectory trajectory;
};

/// Both products from `starts` trace-stratified random effects; start k
/// draws from child stream k of seed.
inline std::vector<FixedPointRun> fixed_point_experiment(double eps, std::size_t steps, std::size_t starts,
                                                         std::uint64_t seed) {
  const Effect b = noisy_identity(eps);
  std::vector<FixedPointRun> runs;
  for (std::size_t k = 0; k < starts; ++k) {
    SeededRng rng(child_seed(seed, k));
    const Effect p0 = stratified_start(k, starts, rng);
    for (ProductKind pk : {ProductKind::kStar, ProductKind::kStarDual})
      runs.push_back({k, pk, fixed_point_run(b, p0, steps, pk)});
  }
  return runs;
}

struct ConjectureConfig {
  std::size_t n = 2;
  std::size_t d = 2;
  std::size_t samples = 1000;  // per recipe pairing
  std::uint64_t seed = 0;
  ConjectureReading reading = ConjectureReading::kJoint;
  std::vector<PovmMethod> vector_methods = {PovmMethod::kGinibreRenormalized, PovmMethod::kNearExtremal,
                                            PovmMethod::kNearUniform};
  std::vector<MatrixMethod> matrix_methods = {MatrixMethod::kFeasibilityCompleted, MatrixMethod::kNearIdentity,
                                              MatrixMethod::kNearFlat, MatrixMethod::kCirculant};
  double epsilon = kDefaultEpsilon;
  double tol = 1e-8;
};

struct ConjectureViolation {
  std::size_t sample;
  std::uint64_t replay_seed;
  double margin;
  Permutation q_ordering;
};

struct PairingReport {
  PovmMethod vector_method;
  MatrixMethod matrix_method;
  std::size_t samples = 0;
  double worst_margin = 0.0;
  std::vector<ConjectureViolation> violations;
  std::size_t shrink_checked = 0;
  std::size_t shrink_violations = 0;
  double shrink_worst_gap = 0.0;  // max of centered ||Xi|| - ||P||
  std::vector<std::uint64_t> sampling_failures;  // replay seeds whose draw raised NumericFailure
};

struct ConjectureReport {
  ConjectureConfig config;
  std::vector<PairingReport> pairings;
  std::size_t total_samples() const {
    std::size_t s = 0;
    for (const auto& p : pairings) s += p.samples;
    return s;
  }
  std::size_t total_violations() const {
    std::size_t s = 0;
    for (const auto& p : pairings) s += p.violations.size();
    return s;
  }
  std::size_t total_sampling_failures() const {
    std::size_t s = 0;
    for (const auto& p : pairings) s += p.sampling_failures.size();
    return s;
  }
  std::size_t total_shrink_violations() const {
    std::size_t s = 0;
    for (const auto& p : pairings) s += p.shrink_violations;
    return s;
  }
};

struct ConjectureSample {
  Povm p;
  BlockMatrix b;
  Povm q;
};

/// Regenerates one sweep instance from its replay seed.
inline ConjectureSample conjecture_sample(std::size_t n, std::size_t d, PovmMethod vm, MatrixMethod mm,
                                          double epsilon, std::uint64_t replay_seed) {
  SeededRng rng(replay_seed);
  Povm p = random_povm(n, d, vm, rng, epsilon);
  BlockMatrix b = random_bistochastic(n, d, mm, rng, epsilon);
  Povm q = blockwise_product(b, p, 1e-8);
  return {std::move(p), std::move(b), std::move(q)};
}

inline constexpr double kShrinkTol = 1e-10;

inline ConjectureReport conjecture_sweep(const ConjectureConfig& cfg) {
  if (cfg.n > kMaxConjectureN) throw CombinatorialLimit("conjecture_sweep: n exceeds the enumeration cap");
  ConjectureReport rep{cfg, {}};
  std::uint64_t pairing = 0;
  for (PovmMethod vm : cfg.vector_methods) {
    for (MatrixMethod mm : cfg.matrix_methods) {
      PairingReport pr;
      pr.vector_method = vm;
      pr.matrix_method = mm;
      pr.worst_margin = std::numeric_limits<double>::infinity();
      const std::uint64_t pseed = child_seed(cfg.seed, pairing++);
      for (std::size_t s = 0; pr.samples < cfg.samples; ++s) {
        const std::uint64_t rs = child_seed(pseed, s);
        std::optional<ConjectureSample> drawn;
        try {
          drawn = conjecture_sample(cfg.n, cfg.d, vm, mm, cfg.epsilon, rs);
        } catch (const NumericFailure&) {
          pr.sampling_failures.push_back(rs);
          if (pr.sampling_failures.size() > cfg.samples)
            throw NumericFailure("conjecture_sweep: sampler failed more often than it succeeded");
          continue;
        }
        const ConjectureSample& cs = *drawn;
        const ConjectureVerdict v = conjecture_check(cs.p, cs.q, cfg.tol, cfg.reading);
        ++pr.samples;
        pr.worst_margin = std::min(pr.worst_margin, v.margin);
        if (!v.holds) pr.violations.push_back({s, rs, v.margin, v.worst_q_ordering});
        if (cfg.n == 2) {
          const HermitianMatrix xi = xi_combination(Effect(cs.b(0, 0)), Effect(cs.p[0]));
          const double gap = distance_from_flat(xi, 2) - distance_from_flat(cs.p[0], 2);
          if (pr.shrink_checked == 0 || gap > pr.shrink_worst_gap) pr.shrink_worst_gap = gap;
          ++pr.shrink_checked;
          if (gap > kShrinkTol) ++pr.shrink_violations;
        }
      }
      rep.pairings.push_back(std::move(pr));
    }
  }
  return rep;
}

struct MonotoneTrajectory {
  std::vector<double> values;           // E_rho(P_k), k = 0..
  std::optional<std::size_t> stopped_at;  // first step whose iterate is not sortable
};

/// E_rho along P_{k+1} = B * P_k; stops after the first unsortable iterate.
inline MonotoneTrajectory monotone_trajectory(const Povm& p0, const BlockMatrix& b, const DensityMatrix& rho,
                                              std::size_t steps) {
  if (!sortable_order(p0)) throw DomainError("monotone_trajectory: P0 is not sortable");
  if (!b.is_bistochastic(1e-8)) throw DomainError("monotone_trajectory: B is not bistochastic");
  MonotoneTrajectory out;
  Povm p = p0;
  out.values.push_back(entropy_monotone(p, rho));
  for (std::size_t k = 1; k <= steps; ++k) {
    p = blockwise_product(b, p, 1e-8);
    out.values.push_back(entropy_monotone(p, rho));
    if (!sortable_order(p)) {
      out.stopped_at = k;
      break;
    }
  }
  return out;
}

}  // namespace povmdyn
