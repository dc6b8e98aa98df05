#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "interlace/config.hpp"
#include "interlace/errors.hpp"
#include "interlace/json_io.hpp"
#include "interlace/mixedchar.hpp"
#include "interlace/partition.hpp"
#include "interlace/paving.hpp"
#include "interlace/realstable.hpp"
#include "interlace/unipoly.hpp"

namespace interlace {

struct JobSpec {
  std::string command;  // mixed-char | pave | partition-search | barrier | nice-family | verify
  Json input;
  std::string output_path;     // empty: stdout
  std::string roots_csv_path;  // optional, mixed-char only
  Tolerances tol;
  Budgets budgets;
  double epsilon = 0.99;
  int r = 2;
  SearchStrategy strategy = SearchStrategy::Auto;
  std::int64_t budget = default_budgets().enumeration;
  std::uint64_t seed = 0;
  int threads = 1;
  std::string pave_mode = "auto";  // auto | projection | selfadjoint | general
  int falsifier_trials = 1000;
};

namespace cli_detail {

// Shortest round-trip decimal form, deterministic across runs.
inline std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline double get_double(const Json& j, const char* key) {
  if (!j.contains(key)) throw Error(ErrorCode::BadInput, std::string("missing field ") + key);
  return j.at(key).get<double>();
}

inline bool close(double a, double b, double tol = 1e-9) {
  return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

inline Json strategy_json(SearchStrategy s) { return search_strategy_name(s); }

inline Json paving_to_json(const PavingResult& res, const std::string& kind) {
  Json blocks = Json::array();
  for (const auto& blk : res.blocks) {
    Json b = Json::array();
    for (int u : blk) b.push_back(u + 1);
    blocks.push_back(std::move(b));
  }
  Json j{{"kind", kind},
         {"ambient", res.ambient},
         {"r", res.r},
         {"operator_norm", res.operator_norm},
         {"bound", res.bound},
         {"blocks", std::move(blocks)},
         {"block_norms", res.block_norms},
         {"max_ratio", res.max_ratio},
         {"certified", res.certified},
         {"strategy", strategy_json(res.strategy)},
         {"iterations", res.iterations}};
  if (kind != "projection") j["epsilon"] = res.epsilon;
  return j;
}

}  // namespace cli_detail

// CSV rows (index, root, bound), roots descending, index starting at 1.
inline void emit_roots_csv(const std::vector<double>& roots,
                           std::optional<double> bound, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::BadInput, "cannot open CSV output path");
  out << "index,root,bound\n";
  for (std::size_t i = 0; i < roots.size(); ++i) {
    out << (i + 1) << ',' << cli_detail::format_double(roots[i]) << ',';
    if (bound) out << cli_detail::format_double(*bound);
    out << '\n';
  }
}

namespace cli_detail {

inline Json run_mixed_char(const JobSpec& job, int& exit_code) {
  const PSDSystem S = system_from_json(job.input, job.tol);
  const MixedCharResult res = mixed_char(S, job.budgets, job.tol);
  Json out{{"mu", res.mu.coeffs},
           {"roots", res.roots},
           {"method", mixed_char_method_name(res.method)},
           {"cross_checked", res.cross_checked},
           {"sum_is_identity", S.sum_is_identity},
           {"all_rank_one", S.all_rank_one},
           {"epsilon", S.trace_bound}};
  exit_code = 0;
  if (res.bound) {
    out["bound"] = *res.bound;
    const double margin = *res.bound - (res.roots.empty() ? 0.0 : res.roots.front());
    out["margin"] = margin;
    if (margin < -1e-8) exit_code = 1;
  } else {
    out["bound"] = nullptr;
    out["margin"] = nullptr;
  }
  if (S.all_rank_one) {
    const auto identity = rank_one_identity_check(S, job.budgets);
    out["rank_one_identity_deviation"] = identity.deviation;
  }
  if (!job.roots_csv_path.empty())
    emit_roots_csv(res.roots, res.bound, job.roots_csv_path);
  return out;
}

inline Json run_pave(const JobSpec& job, int& exit_code) {
  const ComplexMatrix T = matrix_from_json(job.input);
  std::string kind = job.pave_mode;
  if (kind == "auto") {
    if (is_projection(T, job.tol.projection))
      kind = "projection";
    else if (is_hermitian(T, job.tol.hermitian))
      kind = "selfadjoint";
    else
      kind = "general";
  }
  PavingResult res;
  if (kind == "projection") {
    res = pave_projection(T, job.r, job.strategy, job.budget, job.seed, job.threads, job.tol);
  } else if (kind == "selfadjoint") {
    res = pave_selfadjoint(T, job.epsilon, job.strategy, job.budget, job.seed,
                           job.threads, job.tol);
  } else if (kind == "general") {
    res = pave_general(T, job.epsilon, job.strategy, job.budget, job.seed, job.threads,
                       job.tol);
  } else {
    throw Error(ErrorCode::BadInput, "pave mode must be auto/projection/selfadjoint/general");
  }
  exit_code = res.certified ? 0 : 1;
  return paving_to_json(res, kind);
}

inline Json run_partition_search(const JobSpec& job, int& exit_code) {
  const PSDSystem S = system_from_json(job.input, job.tol);
  const PartitionSearchResult res =
      partition_search(S, job.r, job.strategy, job.budget, job.seed, job.threads,
                       job.budgets);
  Json blocks = Json::array();
  for (const auto& blk : res.best.blocks()) {
    Json b = Json::array();
    for (int u : blk) b.push_back(u + 1);
    blocks.push_back(std::move(b));
  }
  exit_code = res.certified ? 0 : 1;
  return Json{{"omega", res.best.omega},
              {"blocks", std::move(blocks)},
              {"objective", res.objective},
              {"block_norms", res.block_norms},
              {"bound", res.bound},
              {"norm_bound", S.norm_bound},
              {"trace_bound", S.trace_bound},
              {"certified", res.certified},
              {"strategy", strategy_json(res.strategy)},
              {"iterations", res.iterations}};
}

inline Json run_barrier(const JobSpec& job, int& exit_code) {
  const PSDSystem S = system_from_json(job.input, job.tol);
  if (!job.input.contains("x"))
    throw Error(ErrorCode::BadInput, "barrier input needs a point \"x\"");
  const std::vector<double> x = job.input.at("x").get<std::vector<double>>();
  Json out;
  out["x"] = x;
  Json values = Json::array();
  for (int j = 0; j < S.count(); ++j) values.push_back(barrier(S, x, j));
  out["values"] = std::move(values);
  exit_code = 0;

  if (job.input.contains("i") && job.input.contains("j")) {
    const int i = job.input.at("i").get<int>() - 1;
    const int j = job.input.at("j").get<int>() - 1;
    const int kmax = job.input.contains("kmax") ? job.input.at("kmax").get<int>() : 3;
    const BarrierReport rep = barrier_sign_check(S, x, i, j, kmax, 0.0, job.tol.fd);
    Json signs = Json::array();
    for (auto v : rep.derivative_signs) signs.push_back(check_verdict_name(v));
    Json mono = Json::array(), convex = Json::array();
    for (auto v : rep.nonincreasing_along_axis) mono.push_back(check_verdict_name(v));
    for (auto v : rep.convex_along_axis) convex.push_back(check_verdict_name(v));
    out["sign_check"] = Json{{"i", i + 1},
                             {"j", j + 1},
                             {"kmax", kmax},
                             {"value", rep.value},
                             {"grid_bound", rep.grid_bound},
                             {"positive", check_verdict_name(rep.positive)},
                             {"derivative_signs", std::move(signs)},
                             {"nonincreasing_along_axis", std::move(mono)},
                             {"convex_along_axis", std::move(convex)},
                             {"pass", rep.pass()}};
    if (!rep.pass()) exit_code = 1;
  }
  if (job.input.contains("delta") && job.input.contains("j")) {
    const int j = job.input.at("j").get<int>() - 1;
    const double delta = job.input.at("delta").get<double>();
    const bool pass = barrier_shift_check(S, x, j, delta, job.tol.fd,
                                          job.budgets.interpolation_evals);
    out["shift_check"] = Json{{"j", j + 1}, {"delta", delta}, {"pass", pass}};
    if (!pass) exit_code = 1;
  }
  return out;
}

inline Json run_nice_family(const JobSpec& job, int& exit_code) {
  if (!job.input.contains("polynomials") || !job.input.at("polynomials").is_array())
    throw Error(ErrorCode::BadInput, "nice-family input needs a \"polynomials\" array");
  std::vector<RealPoly> members;
  for (const auto& pj : job.input.at("polynomials")) members.push_back(poly_from_json(pj));
  const PolyFamily F(members);
  const auto verdict = is_nice_family(F, job.tol.interlace, job.tol.root);
  const auto counterexample =
      nice_family_falsifier(F, job.falsifier_trials, job.seed, job.tol.root);

  Json out{{"nice", verdict.nice},
           {"reason", nice_family_reason_name(verdict.reason)},
           {"trials", job.falsifier_trials}};
  out["counterexample_weights"] = counterexample ? Json(*counterexample) : Json(nullptr);

  exit_code = 0;
  // A nice family with a counterexample (or the converse with none found in a
  // falsifiable case) would contradict the equivalence theorem.
  if (verdict.nice && counterexample) exit_code = 1;

  if (job.input.contains("weights")) {
    const auto w = job.input.at("weights").get<std::vector<double>>();
    Json combo_json;
    const RealPoly combo = convex_combo(F, w);
    combo_json["coefficients"] = combo.coeffs;
    try {
      combo_json["roots"] = real_roots(combo, job.tol.root);
      combo_json["real_rooted"] = true;
      combo_json["bracket_ok"] = root_bracket_check(F, w, job.tol.interlace, job.tol.root);
    } catch (const NotRealRootedError&) {
      combo_json["roots"] = nullptr;
      combo_json["real_rooted"] = false;
      combo_json["bracket_ok"] = false;
    }
    out["combination"] = std::move(combo_json);
  }
  return out;
}

// Re-derives every numeric claim of a previous report from its echoed input.
// Searches are not repeated: reported blocks and assignments are re-priced
// from scratch and the certificates re-checked.
inline Json run_verify(const JobSpec& job, int& exit_code) {
  const Json& report = job.input;
  if (!report.contains("command") || !report.contains("input") || !report.contains("result"))
    throw Error(ErrorCode::BadInput, "verify expects a report with command/input/result");
  const std::string cmd = report.at("command").get<std::string>();
  const Json& input = report.at("input");
  const Json& res = report.at("result");
  std::vector<std::string> mismatches;
  int claims = 0;
  auto claim = [&](bool ok, const std::string& what) {
    ++claims;
    if (!ok) mismatches.push_back(what);
  };

  if (cmd == "mixed-char") {
    const PSDSystem S = system_from_json(input, job.tol);
    const MixedCharResult fresh = mixed_char(S, job.budgets, job.tol);
    const auto reported_mu = res.at("mu").get<std::vector<double>>();
    claim(reported_mu.size() == fresh.mu.coeffs.size(), "mu degree");
    for (std::size_t k = 0; k < std::min(reported_mu.size(), fresh.mu.coeffs.size()); ++k)
      claim(close(reported_mu[k], fresh.mu.coeffs[k]), "mu coefficient " + std::to_string(k));
    const auto reported_roots = res.at("roots").get<std::vector<double>>();
    claim(reported_roots.size() == fresh.roots.size(), "root count");
    for (std::size_t k = 0; k < std::min(reported_roots.size(), fresh.roots.size()); ++k)
      claim(close(reported_roots[k], fresh.roots[k], 1e-6), "root " + std::to_string(k));
    if (!res.at("bound").is_null()) {
      claim(fresh.bound.has_value() &&
                close(res.at("bound").get<double>(), *fresh.bound),
            "bound");
      claim(close(res.at("margin").get<double>(),
                  *fresh.bound - (fresh.roots.empty() ? 0.0 : fresh.roots.front()), 1e-6),
            "margin");
    }
  } else if (cmd == "pave") {
    const ComplexMatrix T = matrix_from_json(input);
    std::vector<std::vector<int>> blocks;
    for (const auto& bj : res.at("blocks")) {
      std::vector<int> blk;
      for (const auto& u : bj) blk.push_back(u.get<int>() - 1);
      blocks.push_back(std::move(blk));
    }
    const double epsilon =
        res.contains("epsilon") ? res.at("epsilon").get<double>() : 0.0;
    const double norm_T = spectral_norm(T);
    claim(close(res.at("operator_norm").get<double>(), norm_T), "operator norm");
    const auto reported = res.at("block_norms").get<std::vector<double>>();
    claim(reported.size() == blocks.size(), "block count");
    double max_ratio = 0.0;
    bool all_below = true;
    const double bound = res.at("bound").get<double>();
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      const double n = detail::compression_norm(T, blocks[b]);
      if (b < reported.size())
        claim(close(reported[b], n, 1e-8), "block norm " + std::to_string(b));
      if (norm_T > 0.0) max_ratio = std::max(max_ratio, n / norm_T);
      if (n > bound + 1e-9) all_below = false;
    }
    // Partition structure is validated as a side effect.
    verify_paving(T, blocks, epsilon > 0.0 ? epsilon : 1.0);
    claim(close(res.at("max_ratio").get<double>(), max_ratio, 1e-8), "max ratio");
    claim(res.at("certified").get<bool>() == all_below, "certified flag");
  } else if (cmd == "partition-search") {
    const PSDSystem S = system_from_json(input, job.tol);
    const auto omega = res.at("omega").get<std::vector<int>>();
    const int r = static_cast<int>(res.at("block_norms").size());
    const Assignment w(S.count(), r, omega);
    const auto norms = detail::canonical_block_norms(S.matrices, S.dim, w);
    const auto reported = res.at("block_norms").get<std::vector<double>>();
    for (std::size_t b = 0; b < norms.size(); ++b)
      claim(close(reported[b], norms[b], 1e-8), "block norm " + std::to_string(b));
    const double objective = *std::max_element(norms.begin(), norms.end());
    claim(close(res.at("objective").get<double>(), objective, 1e-8), "objective");
    const double C = S.norm_bound;
    const double bound = (1.0 / std::sqrt(static_cast<double>(r)) + std::sqrt(C)) *
                         (1.0 / std::sqrt(static_cast<double>(r)) + std::sqrt(C));
    claim(close(res.at("bound").get<double>(), bound), "bound");
    claim(res.at("certified").get<bool>() == (objective <= bound + 1e-9), "certified flag");
  } else if (cmd == "barrier") {
    const PSDSystem S = system_from_json(input, job.tol);
    const auto x = input.at("x").get<std::vector<double>>();
    const auto values = res.at("values").get<std::vector<double>>();
    claim(static_cast<int>(values.size()) == S.count(), "value count");
    for (int j = 0; j < S.count(); ++j)
      claim(close(values[static_cast<std::size_t>(j)], barrier(S, x, j)),
            "barrier value " + std::to_string(j + 1));
    if (res.contains("sign_check")) {
      const Json& sc = res.at("sign_check");
      const BarrierReport rep =
          barrier_sign_check(S, x, sc.at("i").get<int>() - 1, sc.at("j").get<int>() - 1,
                             sc.at("kmax").get<int>(), 0.0, job.tol.fd);
      claim(close(sc.at("value").get<double>(), rep.value), "sign-check value");
      claim(sc.at("pass").get<bool>() == rep.pass(), "sign-check verdict");
    }
    if (res.contains("shift_check")) {
      const Json& sh = res.at("shift_check");
      const bool pass =
          barrier_shift_check(S, x, sh.at("j").get<int>() - 1,
                              sh.at("delta").get<double>(), job.tol.fd,
                              job.budgets.interpolation_evals);
      claim(sh.at("pass").get<bool>() == pass, "shift-check verdict");
    }
  } else if (cmd == "nice-family") {
    std::vector<RealPoly> members;
    for (const auto& pj : input.at("polynomials")) members.push_back(poly_from_json(pj));
    const PolyFamily F(members);
    claim(res.at("nice").get<bool>() == is_nice_family(F, job.tol.interlace, job.tol.root).nice,
          "nice verdict");
    const std::uint64_t seed = report.at("seed").get<std::uint64_t>();
    const int trials = res.at("trials").get<int>();
    const auto cex = nice_family_falsifier(F, trials, seed, job.tol.root);
    claim(res.at("counterexample_weights").is_null() == !cex.has_value(),
          "counterexample presence");
    if (res.contains("combination") && input.contains("weights")) {
      const auto w = input.at("weights").get<std::vector<double>>();
      const Json& combo = res.at("combination");
      const RealPoly fresh = convex_combo(F, w);
      const auto reported_c = combo.at("coefficients").get<std::vector<double>>();
      claim(reported_c.size() == fresh.coeffs.size(), "combination degree");
      for (std::size_t k = 0; k < std::min(reported_c.size(), fresh.coeffs.size()); ++k)
        claim(close(reported_c[k], fresh.coeffs[k]),
              "combination coefficient " + std::to_string(k));
      claim(combo.at("real_rooted").get<bool>() == is_real_rooted(fresh, job.tol.root),
            "combination real-rootedness");
      if (combo.at("real_rooted").get<bool>())
        claim(combo.at("bracket_ok").get<bool>() ==
                  root_bracket_check(F, w, job.tol.interlace, job.tol.root),
              "combination bracket");
    }
  } else {
    throw Error(ErrorCode::BadInput, "verify does not understand command " + cmd);
  }

  exit_code = mismatches.empty() ? 0 : 1;
  return Json{{"verified_command", cmd},
              {"claims_checked", claims},
              {"mismatches", mismatches}};
}

}  // namespace cli_detail

// Runs a job and writes the report. Exit codes: 0 success with certificates
// passing, 1 when a certified bound is violated or not certified, 2 on
// input/validation errors.
inline int run(const JobSpec& job) {
  Json report;
  int exit_code = 2;
  try {
    report["command"] = job.command;
    report["input"] = job.input;
    report["seed"] = job.seed;
    report["strategy"] = search_strategy_name(job.strategy);
    report["tolerances"] = tolerances_to_json(job.tol);
    report["budgets"] = budgets_to_json(job.budgets);

    Json result;
    if (job.command == "mixed-char") {
      result = cli_detail::run_mixed_char(job, exit_code);
    } else if (job.command == "pave") {
      result = cli_detail::run_pave(job, exit_code);
    } else if (job.command == "partition-search") {
      result = cli_detail::run_partition_search(job, exit_code);
    } else if (job.command == "barrier") {
      result = cli_detail::run_barrier(job, exit_code);
    } else if (job.command == "nice-family") {
      result = cli_detail::run_nice_family(job, exit_code);
    } else if (job.command == "verify") {
      result = cli_detail::run_verify(job, exit_code);
    } else {
      throw Error(ErrorCode::BadInput, "unknown command " + job.command);
    }
    report["result"] = std::move(result);
    report["status"] = exit_code == 0 ? "ok" : "not-certified";
  } catch (const Error& e) {
    report = Json{{"command", job.command},
                  {"seed", job.seed},
                  {"error", Json{{"code", error_code_name(e.code())}, {"message", e.what()}}}};
    exit_code = 2;
  } catch (const std::exception& e) {
    report = Json{{"command", job.command},
                  {"seed", job.seed},
                  {"error", Json{{"code", "BadInput"}, {"message", e.what()}}}};
    exit_code = 2;
  }

  const std::string text = report.dump(2) + "\n";
  if (job.output_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(job.output_path, std::ios::binary);
    if (!out) {
      std::cerr << "cannot open output path " << job.output_path << "\n";
      return 2;
    }
    out << text;
  }
  return exit_code;
}

}  // namespace interlace
