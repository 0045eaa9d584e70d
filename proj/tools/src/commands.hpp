#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "archive.hpp"
#include "spinthermo_cli/cli.hpp"
#include "spinthermo/serialize.hpp"

namespace spinthermo::cli {

struct GlobalOptions {
  std::optional<double> beta;
  int threads = 0;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string method = "auto";
  bool long_run = false;
};

struct ReproduceRequest {
  std::string target;
  std::string scale = "desk";
  double beta = 1.0;
  std::uint64_t seed = 0;
  int n_max = 0;
  int steps = 0;
};

inline const char* kReproduceTargets[] = {"table1", "table2", "table3", "fig1", "fig6", "fig7", "fig9"};

ReproduceRequest reproduce_request_from_json(const Json& j);
Json reproduce_request_to_json(const ReproduceRequest& r);
// Runs the target, writing curves into the archive; returns the result body.
Json run_reproduce(const ReproduceRequest& r, Archive& archive, int threads, std::ostream& out);
std::string reproduce_help();

}  // namespace spinthermo::cli
