// Command-line front end: decision runs, oracle runs, generators, batch
// mode, and XL sizing reports over the JSON state format.

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sepq/sepq.hpp"

namespace {

using sepq::Json;

constexpr int kExitSeparable = 0;
constexpr int kExitEntangled = 1;
constexpr int kExitIndeterminate = 2;
constexpr int kExitError = 3;

void emit(const Json& report, const std::string& out_path) {
  if (out_path.empty())
    std::cout << report.dump(2) << "\n";
  else
    sepq::save_json(report, out_path);
}

int outcome_exit_code(sepq::Outcome o) {
  switch (o) {
    case sepq::Outcome::Separable: return kExitSeparable;
    case sepq::Outcome::Entangled: return kExitEntangled;
    default: return kExitIndeterminate;
  }
}

void add_config_flags(CLI::App* cmd, sepq::RunConfig& cfg) {
  cmd->add_option("--tol-herm", cfg.tol.herm);
  cmd->add_option("--tol-trace", cfg.tol.trace);
  cmd->add_option("--tol-psd", cfg.tol.psd);
  cmd->add_option("--tol-rank", cfg.tol.rank);
  cmd->add_option("--tol-recon", cfg.tol.recon);
  cmd->add_option("--tol-sym", cfg.tol.sym);
  cmd->add_option("--tol-iso", cfg.tol.iso);
  cmd->add_option("--tol-pivot", cfg.tol.pivot);
  cmd->add_option("--tol-root", cfg.tol.root);
  cmd->add_option("--tol-proj", cfg.tol.proj);
  cmd->add_option("--tol-feas", cfg.tol.feas);
  cmd->add_option("--tol-weight", cfg.tol.weight);
  cmd->add_option("--tol-sep", cfg.tol.sep);
  cmd->add_option("--d-max", cfg.d_max);
  cmd->add_option("--expand-budget", cfg.expand_budget);
  cmd->add_option("--k-max", cfg.k_max);
  cmd->add_option("--fallback-restarts", cfg.fallback_restarts);
  cmd->add_option("--fallback-steps", cfg.fallback_steps);
  cmd->add_option("--seed", cfg.seed);
  cmd->add_flag("--use-c-family", cfg.use_c_family);
}

sepq::DensityMatrix load_state(const std::string& path, const sepq::Tolerances& tol) {
  const auto [entries, dims] = sepq::state_from_json(sepq::load_json(path));
  return sepq::validate_state(entries, dims, tol);
}

Json batch_entry(const std::string& path, const sepq::RunConfig& cfg) {
  Json entry;
  entry["input"] = path;
  try {
    const auto verdict = sepq::decide(load_state(path, cfg.tol), cfg);
    entry["report"] = sepq::verdict_to_json(verdict, /*include_timings=*/false);
    entry["outcome"] = sepq::to_string(verdict.outcome);
  } catch (const std::exception& e) {
    entry["error"] = e.what();
    entry["outcome"] = "error";
  }
  return entry;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bipartite separability decision engine"};
  app.require_subcommand(1);

  sepq::RunConfig cfg;
  std::string input, output, oracle_name, gen_kind;
  int r = 0, n_eff = 0, dim_m = 2, dim_n = 2, terms = 1, rank = 1;

  auto* decide_cmd = app.add_subcommand("decide", "classify a state file");
  decide_cmd->add_option("input", input)->required();
  decide_cmd->add_option("--out", output);
  add_config_flags(decide_cmd, cfg);

  auto* plan_cmd = app.add_subcommand("plan", "XL sizing report for (r, N_eff)");
  plan_cmd->add_option("r", r)->required();
  plan_cmd->add_option("n_eff", n_eff)->required();
  plan_cmd->add_option("--d-max", cfg.d_max);
  plan_cmd->add_option("--out", output);

  auto* oracle_cmd = app.add_subcommand("oracle", "run one entanglement oracle");
  oracle_cmd->add_option("name", oracle_name)->required()->check(
      CLI::IsMember({"ppt", "realignment", "pure"}));
  oracle_cmd->add_option("input", input)->required();
  oracle_cmd->add_option("--out", output);

  auto* gen_cmd = app.add_subcommand("gen", "generate a state file");
  gen_cmd->add_option("kind", gen_kind)->required()->check(CLI::IsMember({"product", "random"}));
  std::vector<int> dims_vec;
  auto* dims_opt = gen_cmd->add_option("--dims", dims_vec)->expected(2);
  gen_cmd->add_option("--terms", terms);
  gen_cmd->add_option("--rank", rank);
  gen_cmd->add_option("--seed", cfg.seed);
  gen_cmd->add_option("--out", output)->required();

  auto* batch_cmd = app.add_subcommand("batch", "decide every input in a manifest");
  batch_cmd->add_option("manifest", input)->required();
  batch_cmd->add_option("--out", output);
  add_config_flags(batch_cmd, cfg);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitError;
  }

  try {
    if (decide_cmd->parsed()) {
      const auto verdict = sepq::decide(load_state(input, cfg.tol), cfg);
      emit(sepq::verdict_to_json(verdict), output);
      return outcome_exit_code(verdict.outcome);
    }

    if (plan_cmd->parsed()) {
      Json j;
      j["r"] = r;
      j["N_eff"] = n_eff;
      j["delta"] = sepq::delta(r, n_eff);
      j["heuristic_D"] = r >= 2 ? sepq::estimate_degree_heuristic(r, n_eff) : 0;
      try {
        const auto p = sepq::select_degree(r, n_eff, cfg.d_max);
        j["D"] = p.D;
        j["n_eqs"] = p.n_eqs;
        j["n_vars"] = p.n_vars;
        j["memory_bytes"] = p.n_eqs * p.n_vars * static_cast<long long>(sizeof(sepq::Complex));
      } catch (const sepq::DegreeOverflow& e) {
        j["degree_overflow"] = e.what();
        emit(j, output);
        return kExitError;
      }
      emit(j, output);
      return 0;
    }

    if (oracle_cmd->parsed()) {
      const auto state = load_state(input, cfg.tol);
      sepq::OracleVerdict v;
      if (oracle_name == "ppt")
        v = sepq::ppt_test(state, cfg.tol);
      else if (oracle_name == "realignment")
        v = sepq::realignment_test(state, cfg.tol);
      else
        v = sepq::pure_separability(state, cfg.tol);
      emit(sepq::oracle_to_json(v), output);
      switch (v.outcome) {
        case sepq::OracleOutcome::SeparableCertified: return 0;
        case sepq::OracleOutcome::EntangledCertified: return 1;
        default: return 2;
      }
    }

    if (gen_cmd->parsed()) {
      sepq::BipartiteDims dims{2, 2};
      if (dims_opt->count() > 0) dims = {dims_vec[0], dims_vec[1]};
      const auto state = gen_kind == "product"
                             ? sepq::gen_product_mixture(dims, terms, cfg.seed, cfg.tol)
                             : sepq::gen_random_state(dims, rank, cfg.seed, cfg.tol);
      sepq::save_json(sepq::state_to_json(state.entries, dims), output);
      return 0;
    }

    if (batch_cmd->parsed()) {
      const auto manifest = sepq::load_json(input);
      if (!manifest.contains("inputs")) throw sepq::Error("manifest must contain \"inputs\"");
      Json report;
      report["results"] = Json::array();
      Json counts;
      for (const auto& c : {"separable", "entangled", "indeterminate", "error"}) counts[c] = 0;
      for (const auto& path : manifest.at("inputs")) {
        Json entry = batch_entry(path.get<std::string>(), cfg);
        counts[entry.at("outcome").get<std::string>()] =
            counts.value(entry.at("outcome").get<std::string>(), 0) + 1;
        report["results"].push_back(std::move(entry));
      }
      report["counts"] = std::move(counts);
      emit(report, output);
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
