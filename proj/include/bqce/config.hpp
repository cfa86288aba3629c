#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bqce/benchmark.hpp"

namespace bqce {

/// Run configuration, read from a flat JSON object whose keys mirror the
/// fields below (nested "model" and "solver" objects are also accepted).
struct RunConfig {
  std::string problem = "divacancy";
  int N = 100;
  std::string method = "bqce-smooth";
  std::vector<int> K0{3, 4, 6, 8, 11, 16};
  std::string rule = "table";
  double alpha = 3.0;
  double p = 2.0;
  double growth_cap = 1.5;
  int buffer = 2;
  double load = 0.03;
  EamModel model;
  SolverOptions solver;
  bool reproducible = false;
  std::string out;
  std::string reference_cache;
  std::uint64_t seed = 1;

  CoupledSettings coupled() const;
};

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);
std::string dump_config(const RunConfig& config);

/// N >= 20, a known problem/method/rule, and K0 + K1 + buffer < N for every
/// K0 of a coupled method. Raises Error otherwise.
void validate(const RunConfig& config);

}  // namespace bqce
