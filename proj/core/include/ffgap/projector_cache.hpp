#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>

#include "ffgap/interaction.hpp"

namespace ffgap {

// Content-addressed store of ground-space bases. Files are named by a 64-bit
// FNV-1a digest of the local dimension, the region and every term inside it.
class ProjectorCache {
 public:
  static constexpr const char* kEnvironmentVariable = "FFGAP_CACHE_DIR";

  explicit ProjectorCache(std::filesystem::path directory);
  // Cache rooted at $FFGAP_CACHE_DIR, or nullopt when the variable is unset or empty.
  static std::optional<ProjectorCache> from_environment();

  const std::filesystem::path& directory() const { return directory_; }

  std::optional<DenseMatrix> load(std::uint64_t key, Eigen::Index rows) const;
  void store(std::uint64_t key, const DenseMatrix& basis) const;

  std::size_t hits() const { return counters_->hits; }
  std::size_t misses() const { return counters_->misses; }

 private:
  struct Counters {
    std::atomic<std::size_t> hits{0};
    std::atomic<std::size_t> misses{0};
  };
  std::filesystem::path directory_;
  std::shared_ptr<Counters> counters_;
};

std::uint64_t fnv1a(const void* data, std::size_t size, std::uint64_t seed = 0xcbf29ce484222325ull);
std::uint64_t ground_space_key(const Interaction& phi, const Region& region);

}  // namespace ffgap
