#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "collab/analysis.hpp"
#include "collab/bayes.hpp"

namespace collab {

/// A named reproduction run. Empty lists fall back to each experiment's
/// documented defaults.
struct ExperimentSpec {
  std::string name;  // lowerbound, elasticity, linearcost, ranking,
                     // softbudget, nonmonotone, bayes
  std::vector<int> n_list;
  std::vector<double> alpha_list;
  std::vector<double> mu_list;
  double beta = 1e-3;
  std::uint64_t seed = 1;
  int instances = 0;  // random instances per parameter point; 0 = default
  int rounds = 0;     // learning horizon; 0 = default
  SolverConfig solver;
};

const std::vector<std::string>& experiment_names();

std::vector<PoaReport> run_experiment(const ExperimentSpec& spec);

/// Header plus one line per row, each terminated by a newline.
std::string to_csv(const std::vector<PoaReport>& rows);

/// Sweep templates: symmetric (n, alpha), lowerbound (n, alpha, beta),
/// linearcost (n), softbudget (n, mu).
const std::vector<std::string>& sweep_templates();

/// Cartesian product of the grid, axes ordered by name and the first axis
/// varying slowest. At most 10^4 cells.
std::vector<PoaReport> run_sweep(
    const std::string& template_name,
    const std::vector<std::pair<std::string, std::vector<double>>>& grid,
    const SolverConfig& solver = {});

/// The five instances used for the learning guarantee.
std::vector<std::pair<std::string, Instance>> learning_corpus();

/// The learning corpus with two support types per player.
std::vector<std::pair<std::string, std::pair<Instance, TypeDistribution>>>
bayes_corpus();

}  // namespace collab
