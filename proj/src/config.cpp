#include "bqce/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

namespace bqce {

namespace {

using nlohmann::json;

double read_p(const json& v) {
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "inf" || s == "infinity") return std::numeric_limits<double>::infinity();
    throw Error("config: p must be 1, 2 or \"inf\"");
  }
  return v.get<double>();
}

void apply(RunConfig& c, const std::string& key, const json& v) {
  if (key == "problem") c.problem = v.get<std::string>();
  else if (key == "N") c.N = v.get<int>();
  else if (key == "method") c.method = v.get<std::string>();
  else if (key == "K0") c.K0 = v.is_array() ? v.get<std::vector<int>>() : std::vector<int>{v.get<int>()};
  else if (key == "rule") c.rule = v.get<std::string>();
  else if (key == "alpha") c.alpha = v.get<double>();
  else if (key == "p") c.p = read_p(v);
  else if (key == "growth_cap") c.growth_cap = v.get<double>();
  else if (key == "buffer") c.buffer = v.get<int>();
  else if (key == "load") c.load = v.get<double>();
  else if (key == "a") c.model = EamModel::with(v.get<double>(), c.model.b, c.model.c);
  else if (key == "b") c.model = EamModel::with(c.model.a, v.get<double>(), c.model.c);
  else if (key == "c") c.model = EamModel::with(c.model.a, c.model.b, v.get<double>());
  else if (key == "max_iter") c.solver.max_iter = v.get<std::size_t>();
  else if (key == "gtol") c.solver.gtol = v.get<double>();
  else if (key == "newton_steps") c.solver.newton_steps = v.get<int>();
  else if (key == "reproducible") c.reproducible = v.get<bool>();
  else if (key == "out") c.out = v.get<std::string>();
  else if (key == "reference_cache") c.reference_cache = v.get<std::string>();
  else if (key == "seed") c.seed = v.get<std::uint64_t>();
  else throw Error("config: unknown key '" + key + "'");
}

}  // namespace

CoupledSettings RunConfig::coupled() const {
  CoupledSettings s;
  s.rule = parse_rule(rule);
  s.alpha = alpha;
  s.p = p;
  s.mesh.growth_cap = growth_cap;
  s.mesh.buffer = buffer;
  s.solver = solver;
  s.reduction = reproducible ? Reduction::reproducible : Reduction::fast;
  return s;
}

RunConfig parse_config(const std::string& text) {
  RunConfig c;
  try {
    const json j = json::parse(text);
    if (!j.is_object()) throw Error("config: top level must be an object");
    for (const auto& [key, value] : j.items()) {
      if ((key == "model" || key == "solver") && value.is_object()) {
        for (const auto& [k, v] : value.items()) apply(c, k, v);
      } else {
        apply(c, key, value);
      }
    }
  } catch (const json::exception& e) {
    throw Error(std::string("config: ") + e.what());
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string dump_config(const RunConfig& c) {
  json j;
  j["problem"] = c.problem;
  j["N"] = c.N;
  j["method"] = c.method;
  j["K0"] = c.K0;
  j["rule"] = c.rule;
  j["alpha"] = c.alpha;
  if (std::isinf(c.p)) j["p"] = "inf";
  else j["p"] = c.p;
  j["growth_cap"] = c.growth_cap;
  j["buffer"] = c.buffer;
  j["load"] = c.load;
  j["model"] = {{"a", c.model.a}, {"b", c.model.b}, {"c", c.model.c}};
  j["solver"] = {{"max_iter", c.solver.max_iter},
                 {"gtol", c.solver.gtol},
                 {"newton_steps", c.solver.newton_steps},
                 {"reproducible", c.reproducible}};
  j["out"] = c.out;
  j["reference_cache"] = c.reference_cache;
  j["seed"] = c.seed;
  return j.dump(2);
}

void validate(const RunConfig& c) {
  parse_problem(c.problem);
  const ParameterRule rule = parse_rule(c.rule);
  if (c.N < 20) throw Error("config: benchmarks need N >= 20");
  if (c.K0.empty()) throw Error("config: K0 list is empty");
  if (c.method == "atm") {
    for (int R : c.K0)
      if (R < 1 || R > c.N) throw Error("config: ATM radius " + std::to_string(R) + " outside [1, N]");
    return;
  }
  const BlendKind kind = parse_blend(c.method);
  for (int K0 : c.K0) {
    const ParameterPlan plan = select_parameters(c.alpha, c.p, K0, c.N, rule);
    const int K1 = kind == BlendKind::qce ? 0 : plan.K1;
    if (K0 + K1 + c.buffer >= c.N) {
      throw Error("config: K0 + K1 + buffer = " + std::to_string(K0 + K1 + c.buffer) + " must stay below N = " +
                  std::to_string(c.N));
    }
  }
}

}  // namespace bqce
