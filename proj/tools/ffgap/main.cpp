#include <functional>
#include <iostream>
#include <map>

#include "CLI11.hpp"
#include "commands.hpp"
#include "config.hpp"
#include "ffgap/io.hpp"

using namespace ffgap;
using namespace ffgap::cli;

namespace {

// Flags parse into a staging config; only flags actually given are copied over the file values.
struct Bindings {
  RunConfig staging;
  std::string config_file;
  std::string extents, region, window;
  std::vector<std::pair<CLI::Option*, std::function<void(RunConfig&)>>> apply;

  template <typename T>
  CLI::Option* bind(CLI::App* sub, const std::string& name, T RunConfig::*member, const std::string& help) {
    auto* opt = sub->add_option(name, staging.*member, help);
    apply.emplace_back(opt, [this, member](RunConfig& c) { c.*member = staging.*member; });
    return opt;
  }
  void flag(CLI::App* sub, const std::string& name, bool RunConfig::*member, bool value, const std::string& help) {
    auto* opt = sub->add_flag(name, help);
    apply.emplace_back(opt, [member, value](RunConfig& c) { c.*member = value; });
  }
};

void add_common(CLI::App* sub, Bindings& b) {
  sub->add_option("--config", b.config_file, "Flat JSON config (schema_version 1); flags override its values");
  b.bind(sub, "--model", &RunConfig::model, "Model")
      ->check(CLI::IsMember({"heisenberg_fm", "aklt", "commuting_toy", "low_rank"}));
  b.bind(sub, "--geometry", &RunConfig::geometry, "Built-in geometry")
      ->check(CLI::IsMember({"chain", "grid", "honeycomb"}));
  auto* ext = sub->add_option("--extents", b.extents, "Geometry extents, e.g. 10 or 3x3");
  b.apply.emplace_back(ext, [&b](RunConfig& c) { c.extents = parse_extents(b.extents); });
  b.bind(sub, "--toy", &RunConfig::toy, "commuting_toy variant")->check(CLI::IsMember({"exclusion", "polarizing"}));
  b.bind(sub, "--rank", &RunConfig::rank, "low_rank projector rank");
  b.bind(sub, "--seed", &RunConfig::seed, "Seed for random models and iterative solvers");
  b.bind(sub, "--resample-budget", &RunConfig::resample_budget, "low_rank resample budget");
  b.bind(sub, "--graph", &RunConfig::graph_file, "Graph JSON file (replaces --geometry)");
  b.bind(sub, "--interaction", &RunConfig::interaction_file, "Interaction JSON file (replaces --model)");
  auto* reg = sub->add_option("--region", b.region, "Vertex ids, e.g. 0..9 or 0,1,2 (default: every vertex)");
  b.apply.emplace_back(reg, [&b](RunConfig& c) { c.region = parse_id_list(b.region); });
  auto* win = sub->add_option("--window", b.window, "Window LO:HI, comma separated per axis, e.g. 0,0:5,5");
  b.apply.emplace_back(win, [&b](RunConfig& c) { c.window = b.window; });
  b.bind(sub, "--t", &RunConfig::t, "Coarse-graining scale t");
  b.bind(sub, "--alpha", &RunConfig::alpha, "Coarse-graining axis");
  b.bind(sub, "--lambda", &RunConfig::lambda, "Gap lower bound to use instead of the computed gap");
  b.bind(sub, "--g-mode", &RunConfig::g_mode, "Commutation degree: commutator or overlap")
      ->check(CLI::IsMember({"commutator", "overlap"}));
  b.bind(sub, "--k-min", &RunConfig::k_min, "First family level");
  b.bind(sub, "--k-max", &RunConfig::k_max, "Last family level");
  b.bind(sub, "--s-rule", &RunConfig::s_rule, "s_k rule: inf, const:S, power:C:P or fraction:F");
  b.flag(sub, "--no-tail", &RunConfig::tail, false, "Certify the finite product only");
  b.bind(sub, "--max-pairs", &RunConfig::max_pairs, "Sample at most this many split pairs per level (0 = all)");
  b.bind(sub, "--sizes", &RunConfig::sizes, "Sizes for scaling, e.g. 4..12 or 4,6,8");
  b.flag(sub, "--raw", &RunConfig::projector_form, false, "Use H instead of the projector form");
  b.bind(sub, "--dense-max", &RunConfig::dense_max, "Largest dimension diagonalised densely");
  b.bind(sub, "--sparse-max", &RunConfig::sparse_max, "Largest Hilbert space dimension");
  b.bind(sub, "--num-eigs", &RunConfig::num_eigs, "Eigenvalues requested from the iterative solver");
  b.bind(sub, "--tolerance", &RunConfig::tolerance, "Iterative solver tolerance");
  b.bind(sub, "--threads", &RunConfig::threads, "Worker threads (default: available cores)");
  b.bind(sub, "--csv", &RunConfig::csv, "Write CSV here instead of stdout");
  b.flag(sub, "--quiet", &RunConfig::quiet, true, "Suppress the text report");
}

RunConfig resolve(const Bindings& b) {
  RunConfig cfg;
  if (!b.config_file.empty()) apply_config_file(cfg, read_text_file(b.config_file));
  for (const auto& [opt, fn] : b.apply)
    if (opt->count() > 0) fn(cfg);
  check(cfg);
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ffgap: spectral gap certification for frustration-free lattice Hamiltonians"};
  app.require_subcommand(1);
  app.footer(exit_code_table() +
             "\nEnvironment:\n  FFGAP_CACHE_DIR  directory for cached ground-space projectors\n"
             "\nCSV goes to stdout (or --csv); the text report goes to stderr (stdout with --csv).\n");

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"gap", "Ground-state degeneracy and spectral gap of a region"},
      {"dl-check", "Detectability checks with lhs/mid/rhs triples"},
      {"certify", "Finite-size gap certificate over family levels k"},
      {"scaling", "Gap versus system size with an exponent fit"},
      {"coloring", "Layer colouring and commutation degree of the terms"},
      {"validate", "Validate geometry and interaction input"},
  };
  const std::map<std::string, int (*)(const RunConfig&)> handlers = {
      {"gap", cmd_gap},         {"dl-check", cmd_dl_check}, {"certify", cmd_certify},
      {"scaling", cmd_scaling}, {"coloring", cmd_coloring}, {"validate", cmd_validate},
  };
  std::map<std::string, std::unique_ptr<Bindings>> bindings;
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->footer(exit_code_table());
    bindings[name] = std::make_unique<Bindings>();
    add_common(sub, *bindings[name]);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    for (const auto& [name, fn] : handlers)
      if (app.got_subcommand(name)) return fn(resolve(*bindings[name]));
    return kExitUsage;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.code()) << "): " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}
