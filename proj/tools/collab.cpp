#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "collab/errors.hpp"
#include "collab/experiments.hpp"
#include "collab/instance_io.hpp"

namespace {

using namespace collab;
using nlohmann::ordered_json;

struct SolverFlags {
  std::optional<int> max_iters;
  std::optional<double> tol;
  std::optional<std::uint64_t> seed;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--solver.max-iters", max_iters, "BR dynamics round cap")
        ->envname("COLLAB_SOLVER_MAX_ITERS");
    cmd->add_option("--solver.tol", tol, "max coordinate change at convergence")
        ->envname("COLLAB_SOLVER_TOL");
    cmd->add_option("--seed", seed, "RNG seed")->envname("COLLAB_SEED");
  }

  void apply(SolverConfig& cfg) const {
    if (max_iters) cfg.max_iters = *max_iters;
    if (tol) cfg.tol_q = *tol;
    if (seed) cfg.seed = *seed;
    cfg.validate();
  }
};

void emit(const std::string& text, const std::string& out) {
  if (out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(out);
  if (!f) throw InvalidInput("cannot write '" + out + "'");
  f << text;
}

double finite_or(double v, double fallback) { return std::isfinite(v) ? v : fallback; }

int cmd_run(const std::string& path, const SolverFlags& flags,
            std::optional<double> floor, const std::string& out) {
  InstanceFile file = read_instance_file(path);
  flags.apply(file.solver);
  Instance inst = validate_instance(file.raw);
  if (floor) inst = inst.with_epsilon_floor(*floor);

  const EquilibriumResult eq = br_dynamics(inst, file.solver);

  ordered_json rec;
  rec["instance"] = path;
  rec["converged"] = eq.converged;
  rec["iterations"] = eq.iterations;
  rec["welfare"] = eq.welfare;
  ordered_json profile = ordered_json::object();
  for (int i = 0; i < inst.num_players(); ++i) {
    ordered_json row = ordered_json::object();
    for (int e : inst.player(i).edges) {
      row[inst.project(inst.edge(e).project).id] = eq.profile[e];
    }
    profile[inst.player(i).id] = row;
  }
  rec["profile"] = profile;
  ordered_json utilities = ordered_json::object();
  for (int i = 0; i < inst.num_players(); ++i) {
    utilities[inst.player(i).id] = eq.utilities[i];
  }
  rec["utilities"] = utilities;

  try {
    const OptResult opt = solve_opt(inst, file.solver);
    rec["opt"] = opt.value;
    rec["ratio"] = finite_or(opt.value / eq.welfare, -1.0);
    rec["opt_certified"] = opt.certified;
    rec["opt_kkt_residual"] = opt.kkt_residual;
  } catch (const SolverError& e) {
    rec["opt"] = nullptr;
    rec["ratio"] = nullptr;
    rec["opt_error"] = e.what();
  }
  rec["diagnostics"] = {{"last_change", eq.last_change},
                        {"max_gain", eq.max_gain},
                        {"tol", file.solver.tol_q},
                        {"max_iters", file.solver.max_iters},
                        {"epsilon_floor", inst.epsilon_floor()}};
  emit(rec.dump(2) + "\n", out);
  if (!eq.converged) {
    std::cerr << "not converged after " << eq.iterations
              << " rounds: last change " << eq.last_change << ", max gain "
              << eq.max_gain << "\n";
    return 2;
  }
  return 0;
}

// "name=v1,v2,..." or "name=lo:hi:count" (inclusive, evenly spaced).
std::pair<std::string, std::vector<double>> parse_axis(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw InvalidInput("grid axis '" + text + "' must look like name=v1,v2");
  }
  std::pair<std::string, std::vector<double>> axis{text.substr(0, eq), {}};
  const std::string body = text.substr(eq + 1);
  auto to_double = [&](const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != s.size()) {
      throw InvalidInput("grid axis '" + axis.first + "': bad number '" + s + "'");
    }
    return v;
  };
  if (body.empty()) return axis;
  if (std::count(body.begin(), body.end(), ':') == 2) {
    const auto c1 = body.find(':');
    const auto c2 = body.find(':', c1 + 1);
    const double lo = to_double(body.substr(0, c1));
    const double hi = to_double(body.substr(c1 + 1, c2 - c1 - 1));
    const double count = to_double(body.substr(c2 + 1));
    if (count < 1 || count != std::floor(count) || count > 1e4) {
      throw InvalidInput("grid axis '" + axis.first + "': bad point count");
    }
    const int k = static_cast<int>(count);
    for (int t = 0; t < k; ++t) {
      axis.second.push_back(k == 1 ? lo : lo + (hi - lo) * t / (k - 1));
    }
    return axis;
  }
  std::stringstream ss(body);
  std::string item;
  while (std::getline(ss, item, ',')) axis.second.push_back(to_double(item));
  return axis;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Collaborative contribution game solver"};
  app.require_subcommand(1);

  std::string out;
  auto add_out = [&](CLI::App* cmd) {
    cmd->add_option("--out", out, "write output here instead of stdout")
        ->envname("COLLAB_OUT");
  };

  CLI::App* run = app.add_subcommand("run", "equilibrium, optimum and ratio of one instance");
  std::string instance_path;
  SolverFlags run_flags;
  std::optional<double> floor;
  run->add_option("--instance", instance_path, "instance JSON file")
      ->required()
      ->envname("COLLAB_INSTANCE");
  run->add_option("--epsilon-floor", floor, "minimum evaluated project total")
      ->envname("COLLAB_EPSILON_FLOOR");
  run_flags.add_to(run);
  add_out(run);

  CLI::App* reproduce = app.add_subcommand("reproduce", "run a named experiment, CSV output");
  ExperimentSpec spec;
  SolverFlags rep_flags;
  reproduce->add_option("--experiment", spec.name, "experiment name")
      ->required()
      ->envname("COLLAB_EXPERIMENT");
  reproduce->add_option("--n", spec.n_list, "player counts")->delimiter(',');
  reproduce->add_option("--alpha", spec.alpha_list, "alpha values")->delimiter(',');
  reproduce->add_option("--mu", spec.mu_list, "cost exponents")->delimiter(',');
  reproduce->add_option("--beta", spec.beta, "lower-bound beta");
  reproduce->add_option("--instances", spec.instances, "random instances per point");
  reproduce->add_option("--rounds", spec.rounds, "learning horizon");
  rep_flags.add_to(reproduce);
  add_out(reproduce);

  CLI::App* sweep = app.add_subcommand("sweep", "template over a parameter grid, CSV output");
  std::string tmpl;
  std::vector<std::string> axes;
  SolverFlags sweep_flags;
  sweep->add_option("--template", tmpl, "symmetric, lowerbound, linearcost, softbudget")
      ->required()
      ->envname("COLLAB_TEMPLATE");
  sweep->add_option("--grid", axes, "name=v1,v2 or name=lo:hi:count; repeatable");
  sweep_flags.add_to(sweep);
  add_out(sweep);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (*run) return cmd_run(instance_path, run_flags, floor, out);
    if (*reproduce) {
      rep_flags.apply(spec.solver);
      if (rep_flags.seed) spec.seed = *rep_flags.seed;
      emit(to_csv(run_experiment(spec)), out);
      return 0;
    }
    if (*sweep) {
      SolverConfig cfg;
      sweep_flags.apply(cfg);
      std::vector<std::pair<std::string, std::vector<double>>> grid;
      for (const std::string& a : axes) grid.push_back(parse_axis(a));
      emit(to_csv(run_sweep(tmpl, grid, cfg)), out);
      return 0;
    }
  } catch (const InvalidInput& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const SolverError& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
