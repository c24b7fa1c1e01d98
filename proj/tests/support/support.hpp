#pragma once

// Test-only helpers: fixture loading, a seeded random trace generator and
// independent oracles that the library results are checked against.

#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "tracelens/graph.hpp"
#include "tracelens/trace.hpp"

namespace support {

std::string fixture_dir();
std::string schema_dir();
std::vector<std::string> fixture_paths();
std::string fixture_path(const std::string& stem);
tracelens::ProofTrace load_fixture(const std::string& stem);
std::string read_file(const std::string& path);

// Fresh empty directory under the system temp dir.
std::string temp_dir(const std::string& tag);

// Valid trace with at most `max_nodes` statements plus rule applications.
tracelens::ProofTrace random_trace(std::mt19937_64& rng,
                                   std::size_t max_nodes = 15);

// Reachability matrix by Floyd-Warshall over the edge list; reflexive.
class Closure {
 public:
  explicit Closure(const tracelens::ExplanationGraph& g);
  bool reaches(const std::string& from, const std::string& to) const;

 private:
  std::map<std::string, std::size_t> index_;
  std::vector<std::vector<bool>> reach_;
};

// Ids with no incoming edge, found by scanning the edge list.
std::set<std::string> parentless(const tracelens::ExplanationGraph& g);

// Tie-corrected Friedman statistic in the Conover form
// (k - 1) sum (R_j - N (k+1) / 2)^2 / (A - C), ranks counted pairwise.
double friedman_oracle(const std::vector<std::vector<double>>& m);

// W = (12 sum R_j^2 - 3 N^2 k (k+1)^2) / (N^2 k (k^2 - 1) - N sum(t^3 - t)).
double kendall_oracle(const std::vector<std::vector<double>>& m);

// Minimal JSON Schema checker covering the keywords used in schemas/.
// Returns the first violation as "path: message", or "" when valid.
std::string schema_violation(const nlohmann::json& doc,
                             const std::string& schema_file);

}  // namespace support
