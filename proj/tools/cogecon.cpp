// Command-line front end: generate, test, compare, analyze.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "cogecon/agent.hpp"
#include "cogecon/config.hpp"
#include "cogecon/harness.hpp"
#include "cogecon/partition.hpp"
#include "cogecon/puck.hpp"
#include "cogecon/task_analysis.hpp"

namespace fs = std::filesystem;
using namespace cogecon;

namespace {

std::ofstream open_out(const fs::path& p) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream os(p);
  if (!os) throw Error("cannot write " + p.string());
  return os;
}

void print_summary(const SummaryRow& r) {
  std::cout << r.name << ": regions " << r.regions << ", final score " << r.final_score << ", steps to cap ";
  if (r.steps_to_cap)
    std::cout << *r.steps_to_cap << '\n';
  else
    std::cout << "never\n";
}

// "name=path" or plain "path" (named after the file stem).
std::pair<std::string, std::string> named(const std::string& arg) {
  const auto eq = arg.find('=');
  if (eq != std::string::npos) return {arg.substr(0, eq), arg.substr(eq + 1)};
  return {fs::path(arg).stem().string(), arg};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Representation learning by cognitive economy on the puck-on-a-hill task"};
  app.fallthrough();
  std::string config_path;
  std::uint64_t seed = 0;
  bool print_cfg = false, sweep = false;
  app.add_option("--config", config_path, "flat key = value config file")->check(CLI::ExistingFile);
  auto* seed_opt = app.add_option("--seed", seed, "master seed (overrides the config)");
  app.add_flag("--print-config", print_cfg, "print every config key with its value and exit");
  app.add_flag("--sweep-bounds", sweep, "re-derive the state-space bounds from random-policy trials");

  auto* gen = app.add_subcommand("generate", "learn a representation online and export it");
  std::string gen_out = "generated.rep", gen_log = "session.csv", gen_init, gen_q;
  bool gen_seeded = false;
  gen->add_option("-o,--out", gen_out, "representation file to write");
  gen->add_option("--log", gen_log, "session log CSV to write");
  gen->add_option("--qtable", gen_q, "also dump the final action values here");
  gen->add_flag("--seeded", gen_seeded, "start from the two seed prototypes");
  gen->add_option("--initial", gen_init, "start from this Voronoi representation file")->check(CLI::ExistingFile);

  auto* tst = app.add_subcommand("test", "learning curves for one representation");
  std::string tst_rep, tst_curves = "curves.csv", tst_avg = "averaged.csv";
  tst->add_option("representation", tst_rep, "representation file")->required()->check(CLI::ExistingFile);
  tst->add_option("--curves", tst_curves, "per-run curves CSV to write");
  tst->add_option("--avg", tst_avg, "averaged curve CSV to write");

  auto* cmp = app.add_subcommand("compare", "learning curves and summary for several representations");
  std::vector<std::string> cmp_reps;
  std::string cmp_out = "comparison";
  cmp->add_option("representations", cmp_reps, "representation files, optionally as name=path")->required();
  cmp->add_option("-o,--out", cmp_out, "output directory");

  auto* ana = app.add_subcommand("analyze", "viability map, critical states, representation validation");
  std::string ana_out = "analysis";
  std::vector<std::string> ana_reps;
  ana->add_option("-o,--out", ana_out, "output directory");
  ana->add_option("--validate", ana_reps, "representation files to check, optionally as name=path");

  app.require_subcommand(0, 1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    Config cfg = config_path.empty() ? Config{} : load_config(config_path);
    if (seed_opt->count() > 0) cfg.seed = seed;
    cfg.sync();
    const PuckEnv env(cfg.env);
    if (sweep) {
      Rng rng(derive_seed(cfg.seed, {0xb0u}));
      cfg.bounds = sweep_bounds(env, rng);
      cfg.sync();
      std::cerr << "swept bounds: x [" << cfg.bounds.x_lo << ", " << cfg.bounds.x_hi << "], v [" << cfg.bounds.v_lo
                << ", " << cfg.bounds.v_hi << "]\n";
    }
    cfg.validate();

    if (print_cfg) {
      print_config(std::cout, cfg);
      return 0;
    }
    if (app.get_subcommands().empty()) {
      std::cerr << app.help();
      return 2;
    }

    if (gen->parsed()) {
      std::optional<Representation> initial;
      if (gen_seeded) initial = seed_representation(cfg.agent.scale);
      if (!gen_init.empty()) initial = load_file(gen_init);
      SessionResult res = run_generation_session(env, cfg.agent, cfg.stop, cfg.bounds, std::move(initial));
      save_file(res.representation, gen_out);
      auto log = open_out(gen_log);
      res.log.write_csv(log);
      if (!gen_q.empty()) {
        auto q = open_out(gen_q);
        res.table.dump(q);
      }
      std::cout << "trials " << res.log.trials.size() << ", steps " << res.total_steps << ", regions "
                << res.representation.region_count() << ", prototypes " << res.representation.prototypes().size()
                << (res.succeeded ? ", succeeded" : ", stopped before success") << '\n';
    } else if (tst->parsed()) {
      const Representation rep = load_file(tst_rep);
      const auto runs = test_runs(rep, env, cfg.test);
      const auto avg = average_curves(runs);
      auto c = open_out(tst_curves);
      write_curves_csv(c, runs);
      auto a = open_out(tst_avg);
      write_averaged_csv(a, avg);
      print_summary({fs::path(tst_rep).stem().string(), rep.region_count(), avg.empty() ? 0.0 : avg.back().mean_score,
                     steps_to_reach(avg, static_cast<double>(cfg.test.trial_cap))});
    } else if (cmp->parsed()) {
      std::vector<std::pair<std::string, Representation>> reps;
      for (const auto& arg : cmp_reps) {
        auto [nm, path] = named(arg);
        reps.emplace_back(nm, load_file(path));
      }
      const Comparison result = compare(reps, env, cfg.test);
      write_comparison(result, cmp_out);
      for (const auto& row : result.summary) print_summary(row);
    } else if (ana->parsed()) {
      const ViabilityGrid grid = viability_map(env, cfg.bounds, cfg.resolution);
      const fs::path dir(ana_out);
      auto vs = open_out(dir / "viability.csv");
      write_viability(vs, grid);
      auto cs = open_out(dir / "critical.csv");
      write_critical(cs, grid);
      std::cout << "equilibrium_x " << equilibrium_x(cfg.env) << '\n'
                << "controllable cells " << grid.count(Viability::Controllable) << " of " << grid.size() << '\n';
      for (const auto& arg : ana_reps) {
        auto [nm, path] = named(arg);
        const ValidationReport r = validate_representation(grid, load_file(path));
        auto os = open_out(dir / (nm + "_validation.txt"));
        os << r;
        std::cout << nm << ": regions " << r.regions << ", violations " << r.violations << '\n';
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
