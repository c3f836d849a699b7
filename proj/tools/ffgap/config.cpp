#include "config.hpp"

#include <charconv>
#include <functional>
#include <map>
#include <sstream>

#include "json.hpp"

namespace ffgap::cli {

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kConfig:
      return kExitConfig;
    case ErrorCode::kParse:
      return kExitParse;
    case ErrorCode::kIo:
      return kExitIo;
    case ErrorCode::kRegionTooLarge:
      return kExitRegionTooLarge;
    case ErrorCode::kEigensolverFailed:
      return kExitEigensolver;
    case ErrorCode::kNotFrustrationFree:
      return kExitNotFrustrationFree;
    case ErrorCode::kInsufficientData:
      return kExitInsufficientData;
    case ErrorCode::kGaplessAtFiniteSize:
      return kExitGapless;
    case ErrorCode::kDegreeExceedsBudget:
    case ErrorCode::kSingleLayer:
    case ErrorCode::kSplitNotAdmissible:
      return kExitDetectability;
    case ErrorCode::kResampleBudgetExhausted:
      return kExitResampleBudget;
    case ErrorCode::kUnreachable:
    case ErrorCode::kDuplicateCoordinates:
    case ErrorCode::kInsufficientWidth:
    case ErrorCode::kUnsupportedRegion:
      return kExitGeometry;
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kNegativeEigenvalue:
    case ErrorCode::kNotHermitian:
    case ErrorCode::kEmptyInteraction:
    case ErrorCode::kSupportOutsideRegion:
    case ErrorCode::kInconsistentSequence:
      return kExitInvalidInput;
  }
  return kExitInternal;
}

std::string exit_code_table() {
  return "Exit codes:\n"
         "   0  success\n"
         "   1  internal error\n"
         "   2  usage error (bad flags, empty k range)\n"
         "   3  configuration rejected (unknown key, schema version, t below threshold)\n"
         "   4  input file could not be parsed\n"
         "   5  file could not be read or written\n"
         "   6  region too large for the configured caps\n"
         "   7  eigensolver did not converge\n"
         "   8  interaction is not frustration-free on the region\n"
         "   9  one or more checks failed\n"
         "  10  insufficient data\n"
         "  11  gapless at finite size\n"
         "  12  invalid input (non-Hermitian, negative, inconsistent sequence, ...)\n"
         "  13  detectability precondition violated (degree budget, single layer, split)\n"
         "  14  random instance resample budget exhausted\n"
         "  15  geometry error (unreachable, duplicate coordinates, split width)\n";
}

namespace {

using nlohmann::json;

template <typename T>
T get_as(const json& v, const std::string& key) {
  try {
    return v.get<T>();
  } catch (const json::exception&) {
    fail(ErrorCode::kConfig, "config key '" + key + "' has the wrong type");
  }
}

std::vector<std::size_t> size_list(const json& v, const std::string& key) {
  if (v.is_string()) return parse_id_list(v.get<std::string>());
  return get_as<std::vector<std::size_t>>(v, key);
}

}  // namespace

void apply_config_file(RunConfig& cfg, const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::kParse, std::string("config: ") + e.what());
  }
  if (!doc.is_object()) fail(ErrorCode::kConfig, "config must be a JSON object");
  if (!doc.contains("schema_version")) fail(ErrorCode::kConfig, "config lacks schema_version");
  if (get_as<int>(doc["schema_version"], "schema_version") != kSchemaVersion)
    fail(ErrorCode::kConfig, "unsupported schema_version (expected " + std::to_string(kSchemaVersion) + ")");

  using Setter = std::function<void(const json&, const std::string&)>;
  const std::map<std::string, Setter> setters = {
      {"schema_version", [](const json&, const std::string&) {}},
      {"model", [&](const json& v, const std::string& k) { cfg.model = get_as<std::string>(v, k); }},
      {"geometry", [&](const json& v, const std::string& k) { cfg.geometry = get_as<std::string>(v, k); }},
      {"extents", [&](const json& v, const std::string& k) { cfg.extents = size_list(v, k); }},
      {"rank", [&](const json& v, const std::string& k) { cfg.rank = get_as<int>(v, k); }},
      {"toy", [&](const json& v, const std::string& k) { cfg.toy = get_as<std::string>(v, k); }},
      {"seed", [&](const json& v, const std::string& k) { cfg.seed = get_as<std::uint64_t>(v, k); }},
      {"resample_budget", [&](const json& v, const std::string& k) { cfg.resample_budget = get_as<int>(v, k); }},
      {"graph_file", [&](const json& v, const std::string& k) { cfg.graph_file = get_as<std::string>(v, k); }},
      {"interaction_file",
       [&](const json& v, const std::string& k) { cfg.interaction_file = get_as<std::string>(v, k); }},
      {"region", [&](const json& v, const std::string& k) { cfg.region = size_list(v, k); }},
      {"window", [&](const json& v, const std::string& k) { cfg.window = get_as<std::string>(v, k); }},
      {"alpha", [&](const json& v, const std::string& k) { cfg.alpha = get_as<int>(v, k); }},
      {"t", [&](const json& v, const std::string& k) { cfg.t = get_as<double>(v, k); }},
      {"lambda", [&](const json& v, const std::string& k) { cfg.lambda = get_as<double>(v, k); }},
      {"g_mode", [&](const json& v, const std::string& k) { cfg.g_mode = get_as<std::string>(v, k); }},
      {"k_min", [&](const json& v, const std::string& k) { cfg.k_min = get_as<int>(v, k); }},
      {"k_max", [&](const json& v, const std::string& k) { cfg.k_max = get_as<int>(v, k); }},
      {"s_rule", [&](const json& v, const std::string& k) { cfg.s_rule = get_as<std::string>(v, k); }},
      {"tail", [&](const json& v, const std::string& k) { cfg.tail = get_as<bool>(v, k); }},
      {"max_pairs", [&](const json& v, const std::string& k) { cfg.max_pairs = get_as<std::size_t>(v, k); }},
      {"sizes", [&](const json& v, const std::string& k) { cfg.sizes = get_as<std::string>(v, k); }},
      {"projector_form", [&](const json& v, const std::string& k) { cfg.projector_form = get_as<bool>(v, k); }},
      {"dense_max", [&](const json& v, const std::string& k) { cfg.dense_max = get_as<long long>(v, k); }},
      {"sparse_max", [&](const json& v, const std::string& k) { cfg.sparse_max = get_as<long long>(v, k); }},
      {"num_eigs", [&](const json& v, const std::string& k) { cfg.num_eigs = get_as<int>(v, k); }},
      {"tolerance", [&](const json& v, const std::string& k) { cfg.tolerance = get_as<double>(v, k); }},
      {"threads", [&](const json& v, const std::string& k) { cfg.threads = get_as<unsigned>(v, k); }},
      {"csv", [&](const json& v, const std::string& k) { cfg.csv = get_as<std::string>(v, k); }},
      {"quiet", [&](const json& v, const std::string& k) { cfg.quiet = get_as<bool>(v, k); }},
  };
  for (const auto& [key, value] : doc.items()) {
    const auto it = setters.find(key);
    if (it == setters.end()) fail(ErrorCode::kConfig, "unknown config key '" + key + "'");
    if (value.is_object() || (value.is_array() && !value.empty() && value.front().is_array()))
      fail(ErrorCode::kConfig, "config is flat: key '" + key + "' must not be nested");
    it->second(value, key);
  }
}

void check(const RunConfig& cfg) {
  if (!(cfg.tolerance > 0.0)) fail(ErrorCode::kConfig, "tolerance must be positive");
  if (!(cfg.t > 0.0)) fail(ErrorCode::kConfig, "t must be positive");
  if (cfg.lambda && !(*cfg.lambda > 0.0)) fail(ErrorCode::kConfig, "lambda must be positive");
  if (cfg.dense_max < 0 || cfg.dense_max > (1LL << 14)) fail(ErrorCode::kConfig, "dense_max must lie in [0, 16384]");
  if (cfg.sparse_max < 1 || cfg.sparse_max > (1LL << 26)) fail(ErrorCode::kConfig, "sparse_max must lie in [1, 2^26]");
  if (cfg.num_eigs < 1 || cfg.num_eigs > 64) fail(ErrorCode::kConfig, "num_eigs must lie in [1, 64]");
  if (cfg.rank < 0) fail(ErrorCode::kConfig, "rank must be non-negative");
  if (cfg.resample_budget < 1) fail(ErrorCode::kConfig, "resample_budget must be positive");
  if (cfg.alpha < 0) fail(ErrorCode::kConfig, "alpha must be non-negative");
  if (cfg.g_mode != "commutator" && cfg.g_mode != "overlap")
    fail(ErrorCode::kConfig, "g_mode must be 'commutator' or 'overlap'");
  if (cfg.k_min < 1) fail(ErrorCode::kConfig, "k_min must be at least 1");
}

namespace {

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, sep)) out.push_back(item);
  if (!text.empty() && text.back() == sep) out.push_back("");
  return out;
}

template <typename T>
T parse_number(const std::string& s, const std::string& what) {
  T value{};
  const auto* end = s.data() + s.size();
  const auto r = std::from_chars(s.data(), end, value);
  if (s.empty() || r.ec != std::errc() || r.ptr != end) fail(ErrorCode::kConfig, "bad " + what + " '" + s + "'");
  return value;
}

}  // namespace

std::vector<std::size_t> parse_extents(const std::string& text) {
  std::vector<std::size_t> out;
  const char sep = text.find('x') != std::string::npos ? 'x' : ',';
  for (const auto& s : split(text, sep)) out.push_back(parse_number<std::size_t>(s, "extent"));
  if (out.empty()) fail(ErrorCode::kConfig, "empty extents");
  return out;
}

std::vector<std::size_t> parse_id_list(const std::string& text) {
  std::vector<std::size_t> out;
  if (text.empty()) return out;
  for (const auto& s : split(text, ',')) {
    const auto dots = s.find("..");
    if (dots == std::string::npos) {
      out.push_back(parse_number<std::size_t>(s, "vertex id"));
      continue;
    }
    const auto lo = parse_number<std::size_t>(s.substr(0, dots), "vertex id");
    const auto hi = parse_number<std::size_t>(s.substr(dots + 2), "vertex id");
    if (hi < lo) fail(ErrorCode::kConfig, "empty id range '" + s + "'");
    for (std::size_t v = lo; v <= hi; ++v) out.push_back(v);
  }
  return out;
}

std::vector<int> parse_sizes(const std::string& text) {
  std::vector<int> out;
  for (auto v : parse_id_list(text)) out.push_back(static_cast<int>(v));
  return out;
}

std::pair<std::vector<double>, std::vector<double>> parse_window(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) fail(ErrorCode::kConfig, "window must read LO:HI");
  std::vector<double> lo, hi;
  for (const auto& s : split(text.substr(0, colon), ',')) lo.push_back(parse_number<double>(s, "window bound"));
  for (const auto& s : split(text.substr(colon + 1), ',')) hi.push_back(parse_number<double>(s, "window bound"));
  if (lo.size() != hi.size() || lo.empty()) fail(ErrorCode::kConfig, "window bounds disagree in dimension");
  for (std::size_t i = 0; i < lo.size(); ++i)
    if (hi[i] < lo[i]) fail(ErrorCode::kConfig, "window is empty along axis " + std::to_string(i));
  return {lo, hi};
}

}  // namespace ffgap::cli
