#include "collab/instance_io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "collab/errors.hpp"

namespace collab {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw InvalidInput(path + ": " + what);
}

const json& field(const json& obj, const std::string& key,
                  const std::string& path) {
  if (!obj.is_object()) fail(path, "expected an object");
  const auto it = obj.find(key);
  if (it == obj.end()) fail(path, "missing field '" + key + "'");
  return *it;
}

double number(const json& params, const std::string& key,
              const std::string& path, std::optional<double> fallback = {}) {
  if (params.is_object()) {
    const auto it = params.find(key);
    if (it != params.end()) {
      if (!it->is_number()) fail(path + "." + key, "expected a number");
      return it->get<double>();
    }
  }
  if (fallback) return *fallback;
  fail(path, "missing parameter '" + key + "'");
}

const json& params_of(const json& obj) {
  static const json empty = json::object();
  const auto it = obj.find("params");
  return it == obj.end() ? empty : *it;
}

std::string text(const json& v, const std::string& path) {
  if (!v.is_string()) fail(path, "expected a string");
  return v.get<std::string>();
}

CostModel parse_cost(const json& obj, const std::string& path) {
  const std::string kind = text(field(obj, "kind", path), path + ".kind");
  const json& p = params_of(obj);
  if (kind == "hard_budget") return CostModel::Budget(number(p, "budget", path));
  if (kind == "power") {
    return CostModel::Power(number(p, "kappa", path, 1.0), number(p, "mu", path));
  }
  if (kind == "linear") return CostModel::Linear();
  fail(path + ".kind", "unknown cost kind '" + kind + "'");
}

EffortMap parse_map(const json& obj, const std::string& path) {
  const std::string kind = text(field(obj, "map_kind", path), path + ".map_kind");
  const json& p = params_of(obj);
  if (kind == "linear_ability") return EffortMap::Linear(number(p, "ability", path, 1.0));
  if (kind == "power_convex") {
    return EffortMap::Power(number(p, "scale", path, 1.0), number(p, "exponent", path));
  }
  fail(path + ".map_kind", "unknown map kind '" + kind + "'");
}

ValueFunction parse_value(const json& obj, const std::string& path) {
  const std::string kind = text(field(obj, "kind", path), path + ".kind");
  const json& p = params_of(obj);
  if (kind == "power") {
    return ValueFunction::Power(number(p, "w", path, 1.0), number(p, "alpha", path));
  }
  if (kind == "saturating") {
    return ValueFunction::Saturating(number(p, "kappa", path, 1.0),
                                     number(p, "beta", path));
  }
  if (kind == "sqrt") return ValueFunction::Sqrt();
  if (kind == "max_quality") return ValueFunction::MaxQuality();
  if (kind == "single_peaked") return ValueFunction::SinglePeaked(number(p, "r", path));
  fail(path + ".kind", "unknown value kind '" + kind + "'");
}

std::vector<std::pair<std::string, EffortMap>> parse_maps(const json& obj,
                                                          const std::string& path) {
  if (!obj.is_object()) fail(path, "expected an object keyed by project id");
  std::vector<std::pair<std::string, EffortMap>> maps;
  for (const auto& [id, spec] : obj.items()) {
    maps.emplace_back(id, parse_map(spec, path + "." + id));
  }
  return maps;
}

SharingRule parse_rule(const json& v, const std::string& path) {
  try {
    return SharingRule::Parse(text(v, path));
  } catch (const InvalidInput& e) {
    fail(path, e.what());
  }
}

void apply_solver(const json& obj, SolverConfig& cfg) {
  const std::string path = "solver";
  if (!obj.is_object()) fail(path, "expected an object");
  for (const auto& [key, v] : obj.items()) {
    const std::string at = path + "." + key;
    if (!v.is_number() && !v.is_boolean()) fail(at, "expected a number or boolean");
    if (key == "max_iters") {
      cfg.max_iters = v.get<int>();
    } else if (key == "tol") {
      cfg.tol_q = v.get<double>();
    } else if (key == "tol_u") {
      cfg.tol_u = v.get<double>();
    } else if (key == "inner_tol") {
      cfg.inner_tol = v.get<double>();
    } else if (key == "horizon") {
      cfg.horizon = v.get<int>();
    } else if (key == "step_scale") {
      cfg.step_scale = v.get<double>();
    } else if (key == "seed") {
      cfg.seed = v.get<std::uint64_t>();
    } else if (key == "random_order") {
      cfg.random_order = v.get<bool>();
    } else if (key == "allow_fallback") {
      cfg.allow_fallback = v.get<bool>();
    } else {
      fail(at, "unknown solver setting");
    }
  }
  cfg.validate();
}

}  // namespace

InstanceFile parse_instance_file(const std::string& body) {
  json doc;
  try {
    doc = json::parse(body);
  } catch (const json::parse_error& e) {
    const auto upto = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, body.size());
    const auto line = 1 + std::count(body.begin(), body.begin() + static_cast<long>(upto), '\n');
    const auto last_nl = body.rfind('\n', upto == 0 ? 0 : upto - 1);
    const auto column = last_nl == std::string::npos ? upto + 1 : upto - last_nl;
    throw InvalidInput("line " + std::to_string(line) + ", column " +
                       std::to_string(column) + ": malformed JSON");
  }
  if (!doc.is_object()) fail("<root>", "expected an object");

  InstanceFile out;
  RawInstance& raw = out.raw;
  if (const auto it = doc.find("sharing"); it != doc.end()) {
    raw.sharing = parse_rule(*it, "sharing");
  }
  if (const auto it = doc.find("epsilon_floor"); it != doc.end()) {
    if (!it->is_number()) fail("epsilon_floor", "expected a number");
    raw.epsilon_floor = it->get<double>();
  }

  const json& projects = field(doc, "projects", "<root>");
  if (!projects.is_array()) fail("projects", "expected an array");
  for (std::size_t j = 0; j < projects.size(); ++j) {
    const std::string path = "projects[" + std::to_string(j) + "]";
    const json& pj = projects[j];
    const std::string id = text(field(pj, "id", path), path + ".id");
    std::optional<SharingRule> rule;
    if (const auto it = pj.find("sharing"); it != pj.end()) {
      rule = parse_rule(*it, path + ".sharing");
    }
    try {
      raw.projects.push_back(
          {id, parse_value(field(pj, "value", path), path + ".value"), rule});
    } catch (const InvalidInput& e) {
      throw InvalidInput("project '" + id + "': " + e.what());
    }
  }

  const json& players = field(doc, "players", "<root>");
  if (!players.is_array()) fail("players", "expected an array");
  for (std::size_t i = 0; i < players.size(); ++i) {
    const std::string path = "players[" + std::to_string(i) + "]";
    const json& pi = players[i];
    RawPlayer rp;
    rp.id = text(field(pi, "id", path), path + ".id");
    rp.cost = parse_cost(field(pi, "cost", path), path + ".cost");
    rp.projects = parse_maps(field(pi, "projects", path), path + ".projects");
    if (const auto it = pi.find("types"); it != pi.end()) {
      if (!it->is_array()) fail(path + ".types", "expected an array");
      for (std::size_t k = 0; k < it->size(); ++k) {
        const std::string tpath = path + ".types[" + std::to_string(k) + "]";
        const json& tj = (*it)[k];
        RawType rt;
        rt.prob = number(tj, "prob", tpath);
        rt.cost = tj.contains("cost") ? parse_cost(tj["cost"], tpath + ".cost") : rp.cost;
        if (tj.contains("maps")) rt.maps = parse_maps(tj["maps"], tpath + ".maps");
        rp.types.push_back(std::move(rt));
      }
    }
    raw.players.push_back(std::move(rp));
  }

  if (const auto it = doc.find("solver"); it != doc.end()) apply_solver(*it, out.solver);
  return out;
}

InstanceFile read_instance_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_instance_file(buf.str());
  } catch (const InvalidInput& e) {
    throw InvalidInput(path + ": " + e.what());
  }
}

}  // namespace collab
