// Command-line front end: JSON in, JSON/CSV out, for paving, partition
// search, mixed characteristic polynomials, barrier reports, nice-family
// checks, and report verification.

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "interlace/cli.hpp"

namespace {

using interlace::Json;

struct CommonFlags {
  std::string input_path;
  std::string inline_payload;
  std::string output_path;
  std::string config_path;
  std::string roots_csv;
  std::string strategy = "auto";
  std::string pave_mode = "auto";
  double epsilon = 0.99;
  int r = 2;
  std::int64_t budget = interlace::default_budgets().enumeration;
  std::uint64_t seed = 0;
  int threads = 1;
  int trials = 1000;

  // Tolerance overrides; negative means "not set".
  double tol_hermitian = -1, tol_psd_clamp = -1, tol_root = -1, tol_projection = -1,
         tol_interlace = -1, tol_sign_scale = -1, tol_fd = -1, tol_stability = -1,
         tol_sum_identity = -1, tol_rank = -1;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--input", f.input_path, "Input JSON path (- for stdin)");
  cmd->add_option("--inline", f.inline_payload, "Inline JSON payload");
  cmd->add_option("--output", f.output_path, "Output JSON path (default stdout)");
  cmd->add_option("--config", f.config_path,
                  "Config JSON path (also via INTERLACE_CONFIG)");
  cmd->add_option("--epsilon", f.epsilon, "Target epsilon");
  cmd->add_option("--r", f.r, "Number of blocks r");
  cmd->add_option("--strategy", f.strategy, "Search strategy")
      ->check(CLI::IsMember({"auto", "exhaustive", "local"}));
  cmd->add_option("--budget", f.budget, "Search/enumeration budget");
  cmd->add_option("--seed", f.seed, "Random seed (always recorded in output)");
  cmd->add_option("--threads", f.threads, "Worker threads for exhaustive search");
  cmd->add_option("--trials", f.trials, "Falsifier trials (nice-family)");
  cmd->add_option("--roots-csv", f.roots_csv, "Write roots CSV here (mixed-char)");
  cmd->add_option("--mode", f.pave_mode, "Paving mode")
      ->check(CLI::IsMember({"auto", "projection", "selfadjoint", "general"}));
  cmd->add_option("--tol-hermitian", f.tol_hermitian, "Hermitian tolerance");
  cmd->add_option("--tol-psd-clamp", f.tol_psd_clamp, "PSD clamp tolerance");
  cmd->add_option("--tol-root", f.tol_root, "Root imaginary-part tolerance");
  cmd->add_option("--tol-projection", f.tol_projection, "Projection tolerance");
  cmd->add_option("--tol-interlace", f.tol_interlace, "Interlacing slack");
  cmd->add_option("--tol-sign-scale", f.tol_sign_scale, "Sign-check scale");
  cmd->add_option("--tol-fd", f.tol_fd, "Finite-difference tolerance");
  cmd->add_option("--tol-stability", f.tol_stability, "Stability falsifier tolerance");
  cmd->add_option("--tol-sum-identity", f.tol_sum_identity, "Sum-to-identity tolerance");
  cmd->add_option("--tol-rank", f.tol_rank, "Numeric rank cutoff");
}

Json load_payload(const CommonFlags& f) {
  if (!f.inline_payload.empty()) return Json::parse(f.inline_payload);
  if (f.input_path.empty())
    throw interlace::Error(interlace::ErrorCode::BadInput, "no input given");
  if (f.input_path == "-") {
    std::stringstream buf;
    buf << std::cin.rdbuf();
    return Json::parse(buf.str());
  }
  std::ifstream in(f.input_path, std::ios::binary);
  if (!in)
    throw interlace::Error(interlace::ErrorCode::BadInput,
                           "cannot open input path " + f.input_path);
  return Json::parse(in);
}

interlace::JobSpec build_job(const std::string& command, const CommonFlags& f) {
  interlace::JobSpec job;
  job.command = command;

  // Config file first (flag wins over the environment), then CLI flags.
  std::string config = f.config_path;
  if (config.empty()) {
    if (const char* env = std::getenv("INTERLACE_CONFIG")) config = env;
  }
  if (!config.empty()) {
    std::ifstream in(config, std::ios::binary);
    if (!in)
      throw interlace::Error(interlace::ErrorCode::BadInput,
                             "cannot open config path " + config);
    const Json cfg = Json::parse(in);
    if (cfg.contains("tolerances")) interlace::tolerances_from_json(cfg.at("tolerances"), job.tol);
    if (cfg.contains("budgets")) interlace::budgets_from_json(cfg.at("budgets"), job.budgets);
  }

  auto override_tol = [](double flag, double& slot) {
    if (flag >= 0) slot = flag;
  };
  override_tol(f.tol_hermitian, job.tol.hermitian);
  override_tol(f.tol_psd_clamp, job.tol.psd_clamp);
  override_tol(f.tol_root, job.tol.root);
  override_tol(f.tol_projection, job.tol.projection);
  override_tol(f.tol_interlace, job.tol.interlace);
  override_tol(f.tol_sign_scale, job.tol.sign_scale);
  override_tol(f.tol_fd, job.tol.fd);
  override_tol(f.tol_stability, job.tol.stability);
  override_tol(f.tol_sum_identity, job.tol.sum_identity);
  override_tol(f.tol_rank, job.tol.rank);

  job.input = load_payload(f);
  job.output_path = f.output_path;
  job.roots_csv_path = f.roots_csv;
  job.epsilon = f.epsilon;
  job.r = f.r;
  if (f.strategy == "exhaustive") job.strategy = interlace::SearchStrategy::Exhaustive;
  if (f.strategy == "local") job.strategy = interlace::SearchStrategy::Local;
  job.budget = f.budget;
  job.seed = f.seed;
  job.threads = f.threads;
  job.pave_mode = f.pave_mode;
  job.falsifier_trials = f.trials;
  return job;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Paving, partition search, and interlacing-family toolkit"};
  app.require_subcommand(1);

  const std::vector<std::string> commands{"mixed-char", "pave", "partition-search",
                                          "barrier", "nice-family", "verify"};
  const std::vector<std::string> descriptions{
      "Mixed characteristic polynomial with root-bound certificates",
      "Pave a matrix into diagonal blocks with certified norms",
      "Search partitions minimizing the largest block norm",
      "Barrier function values and sign/shift checks",
      "Common-interlacing verdict and convex-combination falsifier",
      "Recompute the numeric claims of a previous report"};

  std::vector<CommonFlags> flags(commands.size());
  for (std::size_t c = 0; c < commands.size(); ++c) {
    CLI::App* sub = app.add_subcommand(commands[c], descriptions[c]);
    add_common(sub, flags[c]);
  }

  CLI11_PARSE(app, argc, argv);

  for (std::size_t c = 0; c < commands.size(); ++c) {
    if (app.got_subcommand(commands[c])) {
      try {
        return interlace::run(build_job(commands[c], flags[c]));
      } catch (const std::exception& e) {
        const Json err{{"command", commands[c]},
                       {"error", Json{{"code", "BadInput"}, {"message", e.what()}}}};
        std::cout << err.dump(2) << "\n";
        return 2;
      }
    }
  }
  return 2;
}
