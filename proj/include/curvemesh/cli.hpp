#pragma once

#include "curvemesh/mesh.hpp"
#include "curvemesh/parallel.hpp"

#include "json.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace curvemesh::cli {

enum ExitCode : int { ok = 0, usage = 2, parse = 3, total_failure = 4 };

struct RunManifest {
  std::string command;
  std::string spec_path;
  std::vector<int> degrees{2};
  std::optional<int> q;  // empty: q = 2p - 1
  std::vector<int> elements{4};
  Layout layout = Layout::constrained;
  int workers = 1;
  long seed = 0;
  double tol = 1e-12;
  std::string out_dir = "out";
  PartitionStrategy partition = PartitionStrategy::arclength;
  ParallelMode mode = ParallelMode::by_element;

  int q_for(int p) const;
  /// Throws SpecError on out-of-range values.
  void validate() const;
  Config config() const;
  nlohmann::json to_json() const;
  /// Canonical text echoed into every output.
  std::string text() const;
  std::string hash() const;
};

int cmd_optimize(const RunManifest& m, std::ostream& log);
int cmd_converge(const RunManifest& m, std::ostream& log);
int cmd_decompose(const RunManifest& m, std::ostream& log);
int cmd_bench(const RunManifest& m, std::ostream& log);

/// args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_cli(int argc, char** argv);

}  // namespace curvemesh::cli
