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

// Sortability, operator and classical majorization, entropy monotones and
// the cumulative-norm profile.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "povmdyn/dynamics.hpp"
#include "povmdyn/error.hpp"
#include "povmdyn/linalg.hpp"
#include "povmdyn/povm.hpp"
#include "povmdyn/rng.hpp"

namespace povmdyn {

using Permutation = std::vector<std::size_t>;

class MajorizationFailure : public DomainError {
 public:
  using DomainError::DomainError;
};

inline Permutation identity_permutation(std::size_t n) {
  Permutation p(n);
  std::iota(p.begin(), p.end(), std::size_t{0});
  return p;
}

/// Order pi with P_{pi[0]} >= P_{pi[1]} >= ... in the Loewner order, if any.
/// Comparable pairs form a digraph; Kahn's algorithm picks the lowest free
/// index first, so ties keep their original order.
inline std::optional<Permutation> sortable_order(const Povm& p, double tol = kPsdTol) {
  const std::size_t n = p.n();
  // geq[a][b]: P_a >= P_b.
  std::vector<std::vector<bool>> geq(n, std::vector<bool>(n, false));
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      if (a != b) geq[a][b] = loewner_leq(p[b], p[a], tol);

  std::vector<std::vector<std::size_t>> out(n);
  std::vector<std::size_t> indeg(n, 0);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      if (a == b || !geq[a][b]) continue;
      if (geq[b][a] && b < a) continue;  // tie: keep only lower -> higher
      out[a].push_back(b);
      ++indeg[b];
    }
  }
  Permutation order;
  std::vector<bool> done(n, false);
  while (order.size() < n) {
    std::size_t pick = n;
    for (std::size_t v = 0; v < n; ++v)
      if (!done[v] && indeg[v] == 0) {
        pick = v;
        break;
      }
    if (pick == n) return std::nullopt;
    done[pick] = true;
    order.push_back(pick);
    for (auto w : out[pick]) --indeg[w];
  }
  for (std::size_t r = 0; r + 1 < n; ++r)
    if (!geq[order[r]][order[r + 1]]) return std::nullopt;
  return order;
}

struct MajorizationReport {
  bool holds = false;
  std::vector<double> k_values;  // lambda_min of sum_{j<=k} (P_j - Q_j), k = 1..n
  double equality_residual = 0.0;
};

/// Cumulative Loewner dominance of the given orderings of P and Q.
inline MajorizationReport operator_majorizes(const Povm& p, const Povm& q, double tol = kPsdTol) {
  if (p.n() != q.n() || p.d() != q.d()) throw DimensionMismatch("operator_majorizes: shape mismatch");
  MajorizationReport r;
  HermitianMatrix theta = HermitianMatrix::zero(p.d());
  for (std::size_t k = 0; k < p.n(); ++k) {
    theta += p[k] - q[k];
    r.k_values.push_back(lambda_min(theta));
  }
  r.equality_residual = hs_norm(theta);
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k + 1 < p.n(); ++k) worst = std::min(worst, r.k_values[k]);
  r.holds = (p.n() == 1 || worst >= -tol) && r.equality_residual <= tol;
  return r;
}

struct NecessityVerdict {
  bool bistochastic = false;
  std::string probe;     // "V_j", "P_u" or "rows"
  std::size_t row = 0;   // offending row of S
  double deficit = 0.0;  // most negative eigenvalue, or row deviation
};

/// Runs the cumulative condition with the fuzzy probes V_j and the uniform
/// probe P_u, placing each output effect first in turn.
inline NecessityVerdict bistochastic_necessity_check(const BlockMatrix& s, double tol = kSumTol) {
  if (s.rows() != s.cols()) throw DimensionMismatch("bistochastic_necessity_check: S must be square");
  if (!s.is_column_stochastic(tol))
    throw DomainError("bistochastic_necessity_check: S is not column-stochastic");
  const std::size_t n = s.rows();
  const std::size_t d = s.d();

  // Q = S * P; the k = 1 condition with Q_i first reads P_top >= Q_i.
  auto probe = [&](const Povm& pv, std::size_t top,
                   const std::string& name) -> std::optional<NecessityVerdict> {
    const BlockMatrix q = blockwise_product(s, BlockMatrix::from_povm(pv));
    for (std::size_t i = 0; i < n; ++i) {
      const double lo = lambda_min(pv[top] - q(i, 0));
      if (lo < -tol) return NecessityVerdict{false, name, i, lo};
    }
    return std::nullopt;
  };

  for (std::size_t j = 0; j < n; ++j)
    if (auto bad = probe(fuzzy_povm(j, n, d), j, "V_" + std::to_string(j + 1))) return *bad;
  if (auto bad = probe(uniform_povm(n, d), 0, "P_u")) return *bad;

  const auto id = HermitianMatrix::identity(d);
  NecessityVerdict worst{true, "", 0, 0.0};
  for (std::size_t i = 0; i < n; ++i) {
    const double dev = max_abs_diff(s.row_sum(i), id);
    if (dev > tol && dev > worst.deficit) worst = {false, "rows", i, dev};
  }
  return worst;
}

namespace detail {

inline void check_probability_vector(const std::vector<double>& p, double tol, const char* who) {
  double sum = 0.0;
  for (double x : p) {
    if (!(x >= -tol)) throw DomainError(std::string(who) + ": negative entry");
    sum += x;
  }
  if (std::abs(sum - 1.0) > tol) {
    std::ostringstream os;
    os << who << ": entries sum to " << sum;
    throw DomainError(os.str());
  }
}

/// Indices ordering v descending; stable.
inline Permutation descending_order(const std::vector<double>& v) {
  Permutation idx = identity_permutation(v.size());
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] > v[b]; });
  return idx;
}

}  // namespace detail

/// p majorizes q: prefix sums of p (descending) dominate those of q.
inline bool classical_majorizes(const std::vector<double>& p, const std::vector<double>& q,
                                double tol = 1e-10) {
  if (p.size() != q.size()) throw DimensionMismatch("classical_majorizes: length mismatch");
  detail::check_probability_vector(p, std::max(tol, 1e-9), "classical_majorizes");
  detail::check_probability_vector(q, std::max(tol, 1e-9), "classical_majorizes");
  std::vector<double> ps(p), qs(q);
  std::sort(ps.begin(), ps.end(), std::greater<>());
  std::sort(qs.begin(), qs.end(), std::greater<>());
  double cp = 0.0, cq = 0.0;
  for (std::size_t k = 0; k + 1 < ps.size(); ++k) {
    cp += ps[k];
    cq += qs[k];
    if (cp < cq - tol) return false;
  }
  cp += ps.back();
  cq += qs.back();
  return std::abs(cp - cq) <= tol;
}

/// Bistochastic B with B p = q, built from at most n - 1 T-transforms acting
/// on the descending rearrangements.
inline Eigen::MatrixXd bistochastic_from_majorization(const std::vector<double>& p,
                                                      const std::vector<double>& q) {
  if (!classical_majorizes(p, q, 1e-10)) throw MajorizationFailure("p does not majorize q");
  const auto n = static_cast<Eigen::Index>(p.size());
  const Permutation sp = detail::descending_order(p);
  const Permutation sq = detail::descending_order(q);
  Eigen::MatrixXd perm_p = Eigen::MatrixXd::Zero(n, n), perm_q = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd x(n), target(n);
  for (Eigen::Index r = 0; r < n; ++r) {
    perm_p(r, static_cast<Eigen::Index>(sp[static_cast<std::size_t>(r)])) = 1.0;
    perm_q(r, static_cast<Eigen::Index>(sq[static_cast<std::size_t>(r)])) = 1.0;
    x(r) = p[sp[static_cast<std::size_t>(r)]];
    target(r) = q[sq[static_cast<std::size_t>(r)]];
  }

  constexpr double kEq = 1e-14;
  Eigen::MatrixXd t_total = Eigen::MatrixXd::Identity(n, n);
  for (Eigen::Index step = 0; step < n; ++step) {
    Eigen::Index j = -1;
    for (Eigen::Index a = n - 1; a >= 0; --a)
      if (x(a) > target(a) + kEq) {
        j = a;
        break;
      }
    if (j < 0) break;
    Eigen::Index k = -1;
    for (Eigen::Index b = j + 1; b < n; ++b)
      if (x(b) < target(b) - kEq) {
        k = b;
        break;
      }
    if (k < 0) break;
    const double delta = std::min(x(j) - target(j), target(k) - x(k));
    const double lambda = 1.0 - delta / (x(j) - x(k));
    Eigen::MatrixXd t = Eigen::MatrixXd::Identity(n, n);
    t(j, j) = t(k, k) = lambda;
    t(j, k) = t(k, j) = 1.0 - lambda;
    x = t * x;
    t_total = t * t_total;
  }
  Eigen::MatrixXd b = perm_q.transpose() * t_total * perm_p;
  Eigen::VectorXd pv = Eigen::Map<const Eigen::VectorXd>(p.data(), n);
  Eigen::VectorXd qv = Eigen::Map<const Eigen::VectorXd>(q.data(), n);
  const double err = (b * pv - qv).cwiseAbs().maxCoeff();
  if (err > 1e-10) {
    std::ostringstream os;
    os << "T-transform chain missed q by " << err;
    throw NumericFailure(os.str());
  }
  return b;
}

/// lambda_min(sqrt(P_j) rho sqrt(P_j)) for each j.
inline std::vector<double> state_dep_scalars(const Povm& p, const DensityMatrix& rho) {
  if (rho.dim() != p.d()) throw DimensionMismatch("state_dep_scalars: dimension mismatch");
  std::vector<double> v;
  for (const auto& e : p.effects()) v.push_back(lambda_min(congruence(sqrt_psd(e), rho.matrix())));
  return v;
}

/// Stable descending sort of state_dep_scalars.
inline Permutation state_dep_precondition(const Povm& p, const DensityMatrix& rho) {
  return detail::descending_order(state_dep_scalars(p, rho));
}

/// sum_j log tr(P_j rho) + n log n; -inf if an outcome has probability <= tol.
inline double entropy_monotone(const Povm& p, const DensityMatrix& rho, double tol = kProbTol) {
  const auto probs = p.probabilities(rho);
  double e = static_cast<double>(p.n()) * std::log(static_cast<double>(p.n()));
  for (double x : probs) {
    if (x <= tol) return -std::numeric_limits<double>::infinity();
    e += std::log(x);
  }
  return e;
}

struct MinEntropyConfig {
  std::size_t grid = 2048;          // d = 2 sphere points
  std::size_t refine_iterations = 60;
  std::size_t random_starts = 4096;  // d > 2
  std::uint64_t seed = 0;
  double tol = kProbTol;
};

struct MinEntropyResult {
  double value;
  bool certified;  // false for the d > 2 random search
};

namespace detail {

inline double pure_entropy(const Povm& p, const Eigen::VectorXcd& psi, double tol) {
  double e = static_cast<double>(p.n()) * std::log(static_cast<double>(p.n()));
  const double nrm = psi.squaredNorm();
  for (const auto& eff : p.effects()) {
    const double x = (psi.adjoint() * eff.matrix() * psi)(0).real() / nrm;
    if (x <= tol) return -std::numeric_limits<double>::infinity();
    e += std::log(x);
  }
  return e;
}

inline Eigen::VectorXcd bloch_ket(double theta, double phi) {
  Eigen::VectorXcd v(2);
  v << std::cos(theta / 2.0), std::polar(std::sin(theta / 2.0), phi);
  return v;
}

}  // namespace detail

/// min over states of entropy_monotone, searched over pure states.
inline MinEntropyResult min_entropy(const Povm& p, const MinEntropyConfig& cfg = {}) {
  for (const auto& e : p.effects())
    if (lambda_min(e) <= cfg.tol) return {-std::numeric_limits<double>::infinity(), true};

  if (p.d() == 1) return {detail::pure_entropy(p, Eigen::VectorXcd::Ones(1), cfg.tol), true};

  if (p.d() == 2) {
    const std::size_t g = std::max<std::size_t>(cfg.grid, 1);
    double best = std::numeric_limits<double>::infinity();
    double bt = 0.0, bp = 0.0;
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (std::size_t k = 0; k < g; ++k) {
      const double z = 1.0 - (2.0 * static_cast<double>(k) + 1.0) / static_cast<double>(g);
      const double th = std::acos(z);
      const double ph = golden * static_cast<double>(k);
      const double v = detail::pure_entropy(p, detail::bloch_ket(th, ph), cfg.tol);
      if (v < best) best = v, bt = th, bp = ph;
    }
    double step = std::sqrt(4.0 * std::numbers::pi / static_cast<double>(g));
    for (std::size_t it = 0; it < cfg.refine_iterations; ++it) {
      bool moved = false;
      for (auto [dt, dp] : {std::pair{1.0, 0.0}, {-1.0, 0.0}, {0.0, 1.0}, {0.0, -1.0}}) {
        const double th = bt + dt * step, ph = bp + dp * step;
        const double v = detail::pure_entropy(p, detail::bloch_ket(th, ph), cfg.tol);
        if (v < best) best = v, bt = th, bp = ph, moved = true;
      }
      if (!moved) step *= 0.5;
    }
    return {best, true};
  }

  SeededRng rng(cfg.seed);
  const auto d = static_cast<Eigen::Index>(p.d());
  auto draw = [&] {
    Eigen::VectorXcd v(d);
    for (Eigen::Index i = 0; i < d; ++i) v(i) = rng.complex_normal();
    return Eigen::VectorXcd(v / v.norm());
  };
  double best = std::numeric_limits<double>::infinity();
  Eigen::VectorXcd arg(d);
  for (std::size_t s = 0; s < std::max<std::size_t>(cfg.random_starts, 1); ++s) {
    Eigen::VectorXcd v = draw();
    const double e = detail::pure_entropy(p, v, cfg.tol);
    if (e < best) best = e, arg = v;
  }
  double step = 0.25;
  for (std::size_t it = 0; it < cfg.refine_iterations * 8; ++it) {
    Eigen::VectorXcd v = arg + step * draw();
    v /= v.norm();
    const double e = detail::pure_entropy(p, v, cfg.tol);
    if (e < best) {
      best = e, arg = v;
    } else {
      step *= 0.9;
    }
  }
  return {best, false};
}

struct NormProfile {
  std::vector<double> values;  // values[k-1] = ||sum_{i<=k} (P_i - 1/n)||_2
};

inline NormProfile norm_profile(const Povm& p, const Permutation& ordering) {
  Povm::check_permutation(ordering, p.n());
  const HermitianMatrix flat = HermitianMatrix::identity(p.d()) * (1.0 / static_cast<double>(p.n()));
  NormProfile r;
  HermitianMatrix acc = HermitianMatrix::zero(p.d());
  for (auto k : ordering) {
    acc += p[k] - flat;
    r.values.push_back(hs_norm(acc));
  }
  return r;
}

/// ||X - identity/n||_2: distance from the flat effect.
inline double distance_from_flat(const HermitianMatrix& x, std::size_t n) {
  return hs_norm(x - HermitianMatrix::identity(x.dim()) * (1.0 / static_cast<double>(n)));
}

enum class ConjectureReading { kJoint, kPerK };

struct ConjectureVerdict {
  bool holds = true;
  Permutation worst_q_ordering;  // sigma with the smallest margin
  double margin = 0.0;           // best achievable min_k (P-profile - Q-profile) at that sigma
};

inline constexpr std::size_t kMaxConjectureN = 6;

/// For every ordering sigma of Q, looks for an ordering pi of P whose profile
/// dominates Q's at every k (jointly, or separately per k).
inline ConjectureVerdict conjecture_check(const Povm& p, const Povm& q, double tol = 1e-8,
                                          ConjectureReading reading = ConjectureReading::kJoint) {
  if (p.n() != q.n() || p.d() != q.d()) throw DimensionMismatch("conjecture_check: shape mismatch");
  if (p.n() > kMaxConjectureN) {
    std::ostringstream os;
    os << "conjecture_check enumerates n! orderings; n = " << p.n() << " exceeds " << kMaxConjectureN;
    throw CombinatorialLimit(os.str());
  }
  const std::size_t n = p.n();
  std::vector<std::vector<double>> prof_p;
  Permutation perm = identity_permutation(n);
  do {
    prof_p.push_back(norm_profile(p, perm).values);
  } while (std::next_permutation(perm.begin(), perm.end()));

  std::vector<double> best_p_per_k(n, -std::numeric_limits<double>::infinity());
  for (const auto& pr : prof_p)
    for (std::size_t k = 0; k < n; ++k) best_p_per_k[k] = std::max(best_p_per_k[k], pr[k]);

  ConjectureVerdict v;
  v.margin = std::numeric_limits<double>::infinity();
  perm = identity_permutation(n);
  do {
    const auto qv = norm_profile(q, perm).values;
    double m = 0.0;
    if (reading == ConjectureReading::kJoint) {
      m = -std::numeric_limits<double>::infinity();
      for (const auto& pr : prof_p) {
        double mk = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < n; ++k) mk = std::min(mk, pr[k] - qv[k]);
        m = std::max(m, mk);
      }
    } else {
      m = std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < n; ++k) m = std::min(m, best_p_per_k[k] - qv[k]);
    }
    if (m < v.margin) {
      v.margin = m;
      v.worst_q_ordering = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  v.holds = v.margin >= -tol;
  return v;
}

}  // namespace povmdyn
