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

// povmdyn command-line driver.
//
// Exit codes: 0 ok / property holds, 1 validation or property violation,
// 2 usage error, 3 numeric failure (including an undecided compatibility
// search).

#include <CLI11.hpp>

#include <charconv>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "povmdyn/compatibility.hpp"
#include "povmdyn/dynamics.hpp"
#include "povmdyn/experiments.hpp"
#include "povmdyn/json_io.hpp"
#include "povmdyn/majorization.hpp"
#include "povmdyn/povm.hpp"
#include "povmdyn/sampling.hpp"

namespace {

using namespace povmdyn;
using povmdyn::json::Json;

constexpr int kOk = 0;
constexpr int kViolation = 1;
constexpr int kUsage = 2;
constexpr int kNumeric = 3;

class UsageError : public Error {
 public:
  using Error::Error;
};

/// Shortest round-trip decimal; "inf"/"-inf"/"nan" for non-finite values.
std::string num(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, end);
}

/// JSON cannot hold infinities; they are written as strings.
Json jnum(double x) { return std::isfinite(x) ? Json(x) : Json(num(x)); }

void emit(const std::string& text, const std::string& out) {
  if (out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(out, std::ios::binary);
  if (!f) throw UsageError("cannot write " + out);
  f << text;
}

void emit_json(const Json& j, const std::string& out) { emit(j.dump(2) + "\n", out); }

Json violations_json(const ValidationError& e) {
  Json arr = Json::array();
  for (const auto& v : e.violations())
    arr.push_back({{"kind", to_string(v.kind)}, {"row", v.row}, {"col", v.col}, {"value", jnum(v.value)},
                   {"message", v.message}});
  return arr;
}

Json permutation_json(const Permutation& p) {
  Json a = Json::array();
  for (auto k : p) a.push_back(k + 1);
  return a;
}

// validate -------------------------------------------------------------------

int run_validate(const std::string& what, const std::string& file, double tol) {
  const Json in = json::read_file(file);
  try {
    if (what == "povm") {
      const Povm p = json::decode_povm(in, tol);
      const auto order = sortable_order(p);
      emit_json({{"valid", true}, {"type", "povm"}, {"n", p.n()}, {"d", p.d()},
                 {"sortable", order.has_value()},
                 {"sorted_order", order ? permutation_json(*order) : Json(nullptr)}},
                "");
    } else {
      const BlockMatrix b = json::decode_block(in, std::max(tol, kPsdTol));
      emit_json({{"valid", true}, {"type", "block"}, {"rows", b.rows()}, {"cols", b.cols()}, {"d", b.d()},
                 {"kind", to_string(b.kind(tol))}, {"column_deviation", b.column_deviation()},
                 {"row_deviation", b.row_deviation()}},
                "");
    }
  } catch (const ValidationError& e) {
    emit_json({{"valid", false}, {"type", what}, {"violations", violations_json(e)}}, "");
    return kViolation;
  }
  return kOk;
}

// product --------------------------------------------------------------------

int run_product(const std::string& left, const std::string& right, bool dual, const std::string& out) {
  const BlockMatrix a = json::decode_block(json::read_file(left));
  const Json rj = json::read_file(right);
  const bool right_is_povm = rj.is_object() && rj.contains("effects");
  const BlockMatrix b = right_is_povm ? BlockMatrix::from_povm(json::decode_povm(rj)) : json::decode_block(rj);
  const BlockMatrix c = dual ? dual_blockwise_product(a, b) : blockwise_product(a, b);
  if (right_is_povm && c.is_column_stochastic()) {
    emit_json(json::encode(c.column(0)), out);
  } else {
    emit_json(json::encode(c), out);
  }
  return kOk;
}

// majorize -------------------------------------------------------------------

int run_majorize(const std::string& pf, const std::string& qf, const std::string& state, double tol) {
  const Povm p = json::decode_povm(json::read_file(pf));
  const Povm q = json::decode_povm(json::read_file(qf));
  const auto order = sortable_order(p, tol);
  Json rep = {{"p_sortable", order.has_value()}};
  bool holds = false;
  if (order) {
    rep["p_order"] = permutation_json(*order);
    const MajorizationReport r = operator_majorizes(p.permuted(*order), q, tol);
    Json kv = Json::array();
    for (double v : r.k_values) kv.push_back(v);
    rep["operator"] = {{"holds", r.holds}, {"k_values", kv}, {"equality_residual", r.equality_residual}};
    holds = r.holds;
  }
  if (!state.empty()) {
    const DensityMatrix rho = json::decode_density(json::read_file(state));
    const auto pv = p.probabilities(rho), qv = q.probabilities(rho);
    const bool cl = classical_majorizes(pv, qv, std::max(tol, 1e-10));
    rep["classical"] = {{"p", pv}, {"q", qv}, {"holds", cl}};
    rep["state_dependent_order"] = permutation_json(state_dep_precondition(p, rho));
    rep["entropy"] = {{"p", jnum(entropy_monotone(p, rho))}, {"q", jnum(entropy_monotone(q, rho))}};
    holds = order ? holds && cl : cl;
  }
  rep["holds"] = holds;
  emit_json(rep, "");
  return holds ? kOk : kViolation;
}

// compat ---------------------------------------------------------------------

int run_compat(const std::string& pf, const std::string& qf, std::size_t budget, double tol) {
  const Povm p = json::decode_povm(json::read_file(pf));
  const Povm q = json::decode_povm(json::read_file(qf));
  const CompatVerdict v = decide_compatibility(p, q, budget, tol);
  Json rep = {{"status", to_string(v.status)}, {"iterations", v.iterations}, {"residual", v.residual}};
  if (v.witness) {
    rep["mother"] = json::encode(v.witness->blocks());
    rep["p_residual"] = v.witness->p_residual(p);
    rep["q_residual"] = v.witness->q_residual(q);
  }
  if (v.certificate) rep["certificate"] = v.certificate->describe();
  emit_json(rep, "");
  switch (v.status) {
    case CompatVerdict::Status::kFeasible: return kOk;
    case CompatVerdict::Status::kInfeasible: return kViolation;
    case CompatVerdict::Status::kUnknown: return kNumeric;
  }
  return kNumeric;
}

// sample ---------------------------------------------------------------------

int run_sample(const std::string& what, std::size_t n, std::size_t d, const std::string& method, double eps,
               std::uint64_t seed, const std::string& out) {
  SeededRng rng(seed);
  if (what == "povm") {
    emit_json(json::encode(random_povm(n, d, parse_povm_method(method), rng, eps)), out);
  } else if (what == "bistochastic") {
    emit_json(json::encode(random_bistochastic(n, d, parse_matrix_method(method), rng, eps)), out);
  } else if (what == "stochastic") {
    emit_json(json::encode(random_stochastic(n, d, rng)), out);
  } else if (what == "density") {
    if (method == "hs") {
      emit_json(json::encode(random_density(d, rng)), out);
    } else if (method == "pure") {
      emit_json(json::encode(random_pure(d, rng)), out);
    } else {
      throw UsageError("density methods are hs and pure");
    }
  } else {
    throw UsageError("unknown sample kind " + what);
  }
  return kOk;
}

// experiments ----------------------------------------------------------------

int run_volume(std::uint64_t samples, std::uint64_t seed, const std::string& out) {
  const McEstimate m = volume_ratio_mc(samples, seed);
  emit_json({{"experiment", "volume"}, {"mean", m.mean}, {"std_error", m.std_error}, {"samples", m.samples},
             {"seed", m.seed}, {"expected", 0.125}},
            out);
  return kOk;
}

int run_fixed_points(double eps, std::size_t steps, std::size_t starts, std::uint64_t seed, const std::string& out,
                     double threshold) {
  const auto runs = fixed_point_experiment(eps, steps, starts, seed);
  std::ostringstream csv;
  csv << "start,product,iteration,t,tau,tau_sigma_z,offdiag_plusminus\n";
  Json summary = Json::array();
  bool all = true;
  const Effect b = noisy_identity(eps);
  for (const auto& r : runs) {
    std::optional<std::size_t> hit;
    for (const auto& s : r.trajectory.steps) {
      csv << r.start << ',' << to_string(r.product) << ',' << s.iteration << ',' << num(s.t) << ','
          << num(s.tau) << ',' << num(s.tau_sigma_z) << ',' << num(s.offdiag_plusminus) << '\n';
      if (!hit && s.offdiag_plusminus <= threshold) hit = s.iteration;
    }
    all = all && hit.has_value();
    summary.push_back({{"start", r.start},
                       {"product", to_string(r.product)},
                       {"converged_at", hit ? Json(*hit) : Json(nullptr)},
                       {"final_offdiag_plusminus", r.trajectory.steps.back().offdiag_plusminus},
                       {"final_commutator_norm", commutator_norm(b.matrix(), r.trajectory.final_effect)}});
  }
  emit(csv.str(), out);
  if (!out.empty())
    emit_json({{"experiment", "fixed-points"}, {"epsilon", eps}, {"steps", steps}, {"seed", seed},
               {"threshold", threshold}, {"all_converged", all}, {"runs", summary}},
              "");
  return all ? kOk : kViolation;
}

std::vector<PovmMethod> povm_methods(const std::string& s) {
  if (s == "all") return ConjectureConfig{}.vector_methods;
  return {parse_povm_method(s)};
}
std::vector<MatrixMethod> matrix_methods(const std::string& s) {
  if (s == "all") return ConjectureConfig{}.matrix_methods;
  return {parse_matrix_method(s)};
}

int run_conjecture(const ConjectureConfig& cfg, const std::string& out) {
  const ConjectureReport rep = conjecture_sweep(cfg);
  Json pairs = Json::array();
  for (const auto& p : rep.pairings) {
    Json viol = Json::array();
    for (const auto& v : p.violations)
      viol.push_back({{"sample", v.sample}, {"replay_seed", v.replay_seed}, {"margin", v.margin},
                      {"q_ordering", permutation_json(v.q_ordering)}});
    Json pj = {{"vector_method", to_string(p.vector_method)},
               {"matrix_method", to_string(p.matrix_method)},
               {"samples", p.samples},
               {"worst_margin", jnum(p.worst_margin)},
               {"violations", viol},
               {"sampling_failures", p.sampling_failures}};
    if (cfg.n == 2)
      pj["norm_shrinkage"] = {{"checked", p.shrink_checked}, {"violations", p.shrink_violations},
                              {"worst_gap", p.shrink_worst_gap}};
    pairs.push_back(std::move(pj));
  }
  Json j = {{"experiment", "conjecture"},
            {"n", cfg.n},
            {"d", cfg.d},
            {"samples_per_pairing", cfg.samples},
            {"seed", cfg.seed},
            {"reading", cfg.reading == ConjectureReading::kJoint ? "joint" : "per_k"},
            {"epsilon", cfg.epsilon},
            {"tol", cfg.tol},
            {"total_samples", rep.total_samples()},
            {"total_violations", rep.total_violations()},
            {"total_sampling_failures", rep.total_sampling_failures()},
            {"pairings", pairs}};
  emit_json(j, out);
  return rep.total_violations() == 0 ? kOk : kViolation;
}

int run_monotone(const std::string& pf, const std::string& bf, const std::string& sf, std::size_t steps,
                 const std::string& out) {
  const Povm p = json::decode_povm(json::read_file(pf));
  const BlockMatrix b = json::decode_block(json::read_file(bf));
  const DensityMatrix rho = json::decode_density(json::read_file(sf));
  const MonotoneTrajectory t = monotone_trajectory(p, b, rho, steps);
  std::ostringstream csv;
  csv << "step,entropy,sortable\n";
  for (std::size_t k = 0; k < t.values.size(); ++k)
    csv << k << ',' << num(t.values[k]) << ',' << ((t.stopped_at && *t.stopped_at == k) ? 0 : 1) << '\n';
  emit(csv.str(), out);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"povmdyn: discrete dynamics of quantum measurements"};
  app.require_subcommand(1);

  std::string kind, file, left, right, out, pf, qf, state, method = "ginibre_renormalized", reading = "joint";
  std::string vmethod = "all", mmethod = "all", matrix_file;
  double tol = kSumTol, eps = kDefaultEpsilon, compat_tol = kCompatTol, threshold = 1e-6, fp_eps = 0.01;
  bool dual = false;
  std::size_t budget = kCompatBudget, n = 2, d = 2, steps = 5000, starts = 10, msteps = 10;
  std::uint64_t seed = 0, samples = 1000000, csamples = 1000;

  auto* validate = app.add_subcommand("validate", "Validate a POVM or block matrix file");
  validate->add_option("kind", kind, "povm or block")->required()->check(CLI::IsMember({"povm", "block"}));
  validate->add_option("file", file)->required();
  validate->add_option("--tol", tol, "Identity-sum budget");

  auto* product = app.add_subcommand("product", "Blockwise product left * right");
  product->add_option("left", left, "BlockMatrix JSON")->required();
  product->add_option("right", right, "BlockMatrix or Povm JSON")->required();
  product->add_flag("--dual", dual, "Use the dual product");
  product->add_option("--out", out);

  auto* majorize = app.add_subcommand("majorize", "Operator (and classical) majorization of P over Q");
  majorize->add_option("P", pf)->required();
  majorize->add_option("Q", qf)->required();
  majorize->add_option("--state", state, "DensityMatrix JSON");
  majorize->add_option("--tol", tol);

  auto* compat = app.add_subcommand("compat", "Decide joint measurability of P and Q");
  compat->add_option("P", pf)->required();
  compat->add_option("Q", qf)->required();
  compat->add_option("--budget", budget);
  compat->add_option("--tol", compat_tol);

  auto* sample = app.add_subcommand("sample", "Draw a random object");
  sample->add_option("kind", kind, "povm, bistochastic, stochastic or density")
      ->required()
      ->check(CLI::IsMember({"povm", "bistochastic", "stochastic", "density"}));
  sample->add_option("--n", n);
  sample->add_option("--d", d);
  sample->add_option("--method", method);
  sample->add_option("--epsilon", eps);
  sample->add_option("--seed", seed)->required();
  sample->add_option("--out", out);

  auto* experiment = app.add_subcommand("experiment", "Run an experiment");
  experiment->require_subcommand(1);
  auto* volume = experiment->add_subcommand("volume", "Monte Carlo volume ratio");
  volume->add_option("--samples", samples);
  volume->add_option("--seed", seed)->required();
  volume->add_option("--out", out);

  auto* fixed = experiment->add_subcommand("fixed-points", "Noisy-identity fixed-point dynamics");
  fixed->add_option("--epsilon", fp_eps);
  fixed->add_option("--steps", steps);
  fixed->add_option("--starts", starts);
  fixed->add_option("--seed", seed)->required();
  fixed->add_option("--threshold", threshold);
  fixed->add_option("--out", out);

  auto* conj = experiment->add_subcommand("conjecture", "Cumulative-norm profile sweep");
  conj->add_option("--n", n);
  conj->add_option("--d", d);
  conj->add_option("--samples", csamples, "Samples per recipe pairing");
  conj->add_option("--seed", seed)->required();
  conj->add_option("--reading", reading)->check(CLI::IsMember({"joint", "per_k"}));
  conj->add_option("--vector-method", vmethod);
  conj->add_option("--matrix-method", mmethod);
  conj->add_option("--epsilon", eps);
  conj->add_option("--out", out);

  auto* mono = experiment->add_subcommand("monotone", "Entropy along iterated products");
  mono->add_option("--povm", pf)->required();
  mono->add_option("--matrix", matrix_file)->required();
  mono->add_option("--state", state)->required();
  mono->add_option("--steps", msteps);
  mono->add_option("--out", out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*validate) return run_validate(kind, file, tol);
    if (*product) return run_product(left, right, dual, out);
    if (*majorize) return run_majorize(pf, qf, state, tol);
    if (*compat) return run_compat(pf, qf, budget, compat_tol);
    if (*sample) return run_sample(kind, n, d, method, eps, seed, out);
    if (*volume) return run_volume(samples, seed, out);
    if (*fixed) return run_fixed_points(fp_eps, steps, starts, seed, out, threshold);
    if (*conj) {
      ConjectureConfig cfg;
      cfg.n = n;
      cfg.d = d;
      cfg.samples = csamples;
      cfg.seed = seed;
      cfg.reading = reading == "joint" ? ConjectureReading::kJoint : ConjectureReading::kPerK;
      cfg.vector_methods = povm_methods(vmethod);
      cfg.matrix_methods = matrix_methods(mmethod);
      cfg.epsilon = eps;
      return run_conjecture(cfg, out);
    }
    if (*mono) return run_monotone(pf, matrix_file, state, msteps, out);
  } catch (const ValidationError& e) {
    emit_json({{"error", "validation"}, {"violations", violations_json(e)}}, "");
    return kViolation;
  } catch (const NumericFailure& e) {
    emit_json({{"error", "numeric"}, {"message", e.what()}}, "");
    return kNumeric;
  } catch (const UsageError& e) {
    std::cerr << e.what() << "\n";
    return kUsage;
  } catch (const CombinatorialLimit& e) {
    std::cerr << e.what() << "\n";
    return kUsage;
  } catch (const json::FormatError& e) {
    emit_json({{"error", "format"}, {"message", e.what()}}, "");
    return kViolation;
  } catch (const Error& e) {
    emit_json({{"error", "domain"}, {"message", e.what()}}, "");
    return kViolation;
  }
  return kUsage;
}
