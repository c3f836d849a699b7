#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ffgap/error.hpp"

namespace ffgap::cli {

inline constexpr int kSchemaVersion = 1;

// Exit statuses. Each failure path gets its own code; the table is printed by --help.
enum Exit : int {
  kExitOk = 0,
  kExitInternal = 1,
  kExitUsage = 2,
  kExitConfig = 3,
  kExitParse = 4,
  kExitIo = 5,
  kExitRegionTooLarge = 6,
  kExitEigensolver = 7,
  kExitNotFrustrationFree = 8,
  kExitCheckFailed = 9,
  kExitInsufficientData = 10,
  kExitGapless = 11,
  kExitInvalidInput = 12,
  kExitDetectability = 13,
  kExitResampleBudget = 14,
  kExitGeometry = 15,
};

int exit_code_for(ErrorCode code);
std::string exit_code_table();

struct RunConfig {
  // model or input files
  std::string model = "heisenberg_fm";
  std::string geometry = "chain";
  std::vector<std::size_t> extents{8};
  int rank = 1;
  std::string toy = "polarizing";
  std::uint64_t seed = 1;
  int resample_budget = 64;
  std::string graph_file;
  std::string interaction_file;
  // region and window
  std::vector<std::size_t> region;  // empty = every vertex
  std::string window;               // "lo:hi", comma separated per axis; empty = bounding box
  int alpha = 0;
  // detectability
  double t = 2.0;
  std::optional<double> lambda;
  std::string g_mode = "commutator";
  // certification
  int k_min = 1;
  int k_max = 3;
  std::string s_rule = "fraction:0.125";
  bool tail = true;
  std::size_t max_pairs = 0;
  std::string sizes = "4..12";
  // solver
  bool projector_form = true;
  long long dense_max = 4096;
  long long sparse_max = 1LL << 24;
  int num_eigs = 6;
  double tolerance = 1e-10;
  unsigned threads = 0;  // 0 = available cores
  // output
  std::string csv;  // empty = stdout
  bool quiet = false;
};

// Flat JSON document: {"schema_version": 1, key: value, ...}. Unknown keys are rejected.
void apply_config_file(RunConfig& cfg, const std::string& text);
void check(const RunConfig& cfg);

std::vector<std::size_t> parse_extents(const std::string& text);
std::vector<std::size_t> parse_id_list(const std::string& text);
std::vector<int> parse_sizes(const std::string& text);
std::pair<std::vector<double>, std::vector<double>> parse_window(const std::string& text);

}  // namespace ffgap::cli
