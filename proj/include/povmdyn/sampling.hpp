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

// Seeded samplers for effects, POVMs, block (bi)stochastic matrices and
// states.
//
// POVMs are drawn by renormalizing Ginibre PSD matrices,
// P_j = T^{-1/2} G_j T^{-1/2} with T = sum_j G_j, which resolves the identity
// exactly. Bistochastic matrices with a random first block are completed by
// Dykstra projection and then pulled inside the PSD cone by mixing with a
// fixed interior completion.

#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "povmdyn/compatibility.hpp"
#include "povmdyn/dynamics.hpp"
#include "povmdyn/error.hpp"
#include "povmdyn/linalg.hpp"
#include "povmdyn/povm.hpp"
#include "povmdyn/rng.hpp"

namespace povmdyn {

inline ComplexMatrix ginibre_matrix(std::size_t d, SeededRng& rng) {
  const auto n = static_cast<Eigen::Index>(d);
  ComplexMatrix x(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) x(i, j) = rng.complex_normal();
  return x;
}

/// X^dag X for Ginibre X.
inline HermitianMatrix ginibre_psd(std::size_t d, SeededRng& rng) {
  const ComplexMatrix x = ginibre_matrix(d, rng);
  return HermitianMatrix(x.adjoint() * x);
}

/// t X^dag X / tr(X^dag X) with t uniform on [0, 1].
inline Effect ginibre_effect(std::size_t d, SeededRng& rng) {
  if (d == 0) throw DomainError("ginibre_effect: d must be positive");
  const HermitianMatrix g = ginibre_psd(d, rng);
  const double t = rng.uniform();
  return Effect(g * (t / g.trace()));
}

/// Haar unitary: QR of a Ginibre matrix with the phases of R's diagonal
/// moved into Q.
inline ComplexMatrix random_unitary(std::size_t d, SeededRng& rng) {
  const ComplexMatrix x = ginibre_matrix(d, rng);
  Eigen::HouseholderQR<ComplexMatrix> qr(x);
  ComplexMatrix q = qr.householderQ();
  const ComplexMatrix r = qr.matrixQR();
  for (Eigen::Index k = 0; k < q.cols(); ++k) {
    const Complex rk = r(k, k);
    const double a = std::abs(rk);
    if (a > 0.0) q.col(k) *= rk / a;
  }
  return q;
}

inline DensityMatrix random_density(std::size_t d, SeededRng& rng) {
  const HermitianMatrix g = ginibre_psd(d, rng);
  return DensityMatrix(g * (1.0 / g.trace()));
}

inline DensityMatrix random_pure(std::size_t d, SeededRng& rng) {
  Eigen::VectorXcd v(static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = rng.complex_normal();
  return DensityMatrix::pure(v);
}

enum class PovmMethod { kGinibreRenormalized, kNearExtremal, kNearUniform };
enum class MatrixMethod { kFeasibilityCompleted, kNearIdentity, kNearFlat, kCirculant };

inline PovmMethod parse_povm_method(const std::string& s) {
  if (s == "ginibre_renormalized") return PovmMethod::kGinibreRenormalized;
  if (s == "near_extremal") return PovmMethod::kNearExtremal;
  if (s == "near_uniform") return PovmMethod::kNearUniform;
  throw DomainError("unknown POVM method: " + s);
}
inline const char* to_string(PovmMethod m) {
  switch (m) {
    case PovmMethod::kGinibreRenormalized: return "ginibre_renormalized";
    case PovmMethod::kNearExtremal: return "near_extremal";
    case PovmMethod::kNearUniform: return "near_uniform";
  }
  return "unknown";
}
inline MatrixMethod parse_matrix_method(const std::string& s) {
  if (s == "feasibility_completed") return MatrixMethod::kFeasibilityCompleted;
  if (s == "near_identity") return MatrixMethod::kNearIdentity;
  if (s == "near_flat") return MatrixMethod::kNearFlat;
  if (s == "circulant") return MatrixMethod::kCirculant;
  throw DomainError("unknown matrix method: " + s);
}
inline const char* to_string(MatrixMethod m) {
  switch (m) {
    case MatrixMethod::kFeasibilityCompleted: return "feasibility_completed";
    case MatrixMethod::kNearIdentity: return "near_identity";
    case MatrixMethod::kNearFlat: return "near_flat";
    case MatrixMethod::kCirculant: return "circulant";
  }
  return "unknown";
}

/// Default mixing weight of the perturbation recipes.
inline constexpr double kDefaultEpsilon = 0.05;

namespace detail {

inline Povm ginibre_renormalized(std::size_t n, std::size_t d, SeededRng& rng) {
  for (int attempt = 0; attempt < 10; ++attempt) {
    std::vector<HermitianMatrix> g;
    HermitianMatrix t = HermitianMatrix::zero(d);
    for (std::size_t j = 0; j < n; ++j) {
      g.push_back(ginibre_psd(d, rng));
      t += g.back();
    }
    const EigenSystem es = eig_h(t);
    const double lo = es.eigenvalues(0), hi = es.eigenvalues(es.eigenvalues.size() - 1);
    if (!(lo > 1e-12 * hi)) continue;
    const HermitianMatrix w = apply_spectral(es, [](double x) { return 1.0 / std::sqrt(x); });
    for (auto& e : g) e = congruence(w, e);
    return validate_povm(g);
  }
  throw NumericFailure("ginibre_renormalized: singular total after 10 draws");
}

/// eps * a + (1 - eps) * b effectwise.
inline Povm povm_mix(double eps, const Povm& a, const Povm& b) {
  std::vector<HermitianMatrix> e;
  for (std::size_t j = 0; j < a.n(); ++j) e.push_back(eps * a[j] + (1.0 - eps) * b[j]);
  return validate_povm(e);
}

inline void check_epsilon(double eps) {
  if (!(eps >= 0.0 && eps <= 1.0)) throw DomainError("epsilon must lie in [0, 1]");
}

}  // namespace detail

inline Povm random_povm(std::size_t n, std::size_t d, PovmMethod method, SeededRng& rng,
                        double epsilon = kDefaultEpsilon) {
  if (n == 0 || d == 0) throw DomainError("random_povm: n and d must be positive");
  switch (method) {
    case PovmMethod::kGinibreRenormalized:
      return detail::ginibre_renormalized(n, d, rng);
    case PovmMethod::kNearExtremal:
      detail::check_epsilon(epsilon);
      return detail::povm_mix(epsilon, detail::ginibre_renormalized(n, d, rng), fuzzy_povm(0, n, d));
    case PovmMethod::kNearUniform:
      detail::check_epsilon(epsilon);
      return detail::povm_mix(epsilon, detail::ginibre_renormalized(n, d, rng), uniform_povm(n, d));
  }
  throw DomainError("random_povm: unknown method");
}

/// n x n grid whose columns are independent random POVMs.
inline BlockMatrix random_stochastic(std::size_t n, std::size_t d, SeededRng& rng) {
  Grid g(n, std::vector<HermitianMatrix>(n));
  for (std::size_t j = 0; j < n; ++j) {
    const Povm col = detail::ginibre_renormalized(n, d, rng);
    for (std::size_t i = 0; i < n; ++i) g[i][j] = col[i];
  }
  return validate_block(std::move(g));
}

struct CompletionConfig {
  std::size_t budget = kCompatBudget;
  double tol = 1e-6;
  std::size_t restarts = 4;
};

/// Bistochastic matrix with B_11 = b11: Dykstra completion from a random
/// start, then an exact affine projection mixed with the interior
/// completion Y (Y_1j = Y_i1 = (1 - b11)/(n-1), other blocks
/// ((n-2) + b11)/(n-1)^2) just enough to restore positivity.
inline BlockMatrix complete_bistochastic(const Effect& b11, std::size_t n, SeededRng& rng,
                                         const CompletionConfig& cfg = {}) {
  const std::size_t d = b11.dim();
  const auto id = HermitianMatrix::identity(d);
  if (n == 1) {
    if (max_abs_diff(b11.matrix(), id) > kSumTol) throw DomainError("n = 1 forces B_11 = identity");
    return BlockMatrix::identity(1, d);
  }
  std::vector<std::vector<std::optional<HermitianMatrix>>> mask(n, std::vector<std::optional<HermitianMatrix>>(n));
  mask[0][0] = b11.matrix();
  const MarginalProjector proj(std::vector<HermitianMatrix>(n, id), std::vector<HermitianMatrix>(n, id), mask);

  DykstraResult dr{};
  for (std::size_t attempt = 0; attempt < std::max<std::size_t>(cfg.restarts, 1); ++attempt) {
    Grid start(n, std::vector<HermitianMatrix>(n));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        start[i][j] = (i == 0 && j == 0) ? b11.matrix() : ginibre_effect(d, rng).matrix();
    dr = dykstra_marginals(proj, std::move(start), cfg.budget, cfg.tol);
    if (dr.converged) break;
  }
  if (!dr.converged) {
    std::ostringstream os;
    os << "bistochastic completion did not converge in " << cfg.restarts << " x " << cfg.budget
       << " iterations (residual " << dr.residual << ")";
    throw NumericFailure(os.str());
  }
  Grid x = proj.project(dr.point);

  const double fn = static_cast<double>(n);
  const HermitianMatrix edge = (id - b11.matrix()) * (1.0 / (fn - 1.0));
  const HermitianMatrix inner = ((fn - 2.0) * id + b11.matrix()) * (1.0 / ((fn - 1.0) * (fn - 1.0)));
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (i == 0 && j == 0) continue;
      const HermitianMatrix& y = (i == 0 || j == 0) ? edge : inner;
      const double lx = lambda_min(x[i][j]);
      if (lx >= 0.0) continue;
      const double ly = lambda_min(y);
      if (!(ly > lx)) throw NumericFailure("bistochastic completion: no interior point to mix with");
      s = std::max(s, -lx / (ly - lx));
    }
  if (s > 0.0) {
    s = std::min(1.0, s * (1.0 + 1e-9));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        if (i == 0 && j == 0) continue;
        const HermitianMatrix& y = (i == 0 || j == 0) ? edge : inner;
        x[i][j] = (1.0 - s) * x[i][j] + s * y;
      }
  }
  BlockMatrix b = validate_block(std::move(x));
  if (!b.is_bistochastic(1e-8)) throw NumericFailure("bistochastic completion lost the marginals");
  return b;
}

inline BlockMatrix random_bistochastic(std::size_t n, std::size_t d, MatrixMethod method, SeededRng& rng,
                                       double epsilon = kDefaultEpsilon, const CompletionConfig& cfg = {}) {
  if (n == 0 || d == 0) throw DomainError("random_bistochastic: n and d must be positive");
  switch (method) {
    case MatrixMethod::kCirculant:
      return circulant_from_povm(detail::ginibre_renormalized(n, d, rng));
    case MatrixMethod::kFeasibilityCompleted: {
      const Effect b11 = n == 1 ? Effect(HermitianMatrix::identity(d)) : ginibre_effect(d, rng);
      return complete_bistochastic(b11, n, rng, cfg);
    }
    case MatrixMethod::kNearIdentity:
      detail::check_epsilon(epsilon);
      return epsilon * random_bistochastic(n, d, MatrixMethod::kFeasibilityCompleted, rng, epsilon, cfg) +
             (1.0 - epsilon) * BlockMatrix::identity(n, d);
    case MatrixMethod::kNearFlat:
      detail::check_epsilon(epsilon);
      return epsilon * random_bistochastic(n, d, MatrixMethod::kFeasibilityCompleted, rng, epsilon, cfg) +
             (1.0 - epsilon) * BlockMatrix::flat(n, d);
  }
  throw DomainError("random_bistochastic: unknown method");
}

/// Sortable POVM: a descending scalar chain c_1 >= ... >= c_n > 0 plus a
/// commuting diagonal perturbation in a Haar basis. Each perturbation entry
/// is at most fraction * gap / 2, where gap is the smallest of the chain gaps
/// and c_n, so the chain order survives in every eigendirection. The result
/// is returned in chain order.
inline Povm random_sortable_povm(std::size_t n, std::size_t d, SeededRng& rng, double fraction = 0.5) {
  if (n == 0 || d == 0) throw DomainError("random_sortable_povm: n and d must be positive");
  if (!(fraction >= 0.0 && fraction <= 1.0)) throw DomainError("fraction must lie in [0, 1]");
  std::vector<double> c(n);
  double total = 0.0;
  for (auto& x : c) total += (x = rng.uniform(0.05, 1.0));
  for (auto& x : c) x /= total;
  std::sort(c.begin(), c.end(), std::greater<>());
  double gap = c.back();
  for (std::size_t j = 0; j + 1 < n; ++j) gap = std::min(gap, c[j] - c[j + 1]);

  const ComplexMatrix u = random_unitary(d, rng);
  std::vector<std::vector<double>> diag(n, std::vector<double>(d));
  for (std::size_t k = 0; k < d; ++k) {
    std::vector<double> w(n);
    double mean = 0.0;
    for (auto& x : w) mean += (x = rng.uniform(-1.0, 1.0));
    mean /= static_cast<double>(n);
    for (std::size_t j = 0; j < n; ++j) diag[j][k] = c[j] + fraction * gap / 4.0 * (w[j] - mean);
  }
  std::vector<HermitianMatrix> e;
  for (std::size_t j = 0; j < n; ++j)
    e.push_back(HermitianMatrix(u * HermitianMatrix::diagonal(diag[j]).matrix() * u.adjoint()));
  return validate_povm(e);
}

}  // namespace povmdyn
