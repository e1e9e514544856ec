#pragma once

#include <string>

#include "collab/instance.hpp"
#include "collab/solvers.hpp"

namespace collab {

/// A parsed instance file: the raw description plus its optional `solver`
/// block applied over the defaults.
struct InstanceFile {
  RawInstance raw;
  SolverConfig solver;
};

/// Parses the JSON instance format. Syntax errors report line and column;
/// schema errors report the offending field path.
InstanceFile parse_instance_file(const std::string& text);
InstanceFile read_instance_file(const std::string& path);

}  // namespace collab
