#include "ffgap/projector_cache.hpp"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <string>
#include <system_error>

#include "ffgap/error.hpp"

namespace ffgap {

namespace {

constexpr char kMagic[8] = {'F', 'F', 'G', 'K', '0', '0', '0', '1'};

std::string key_name(std::uint64_t key) {
  static const char* hex = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i, key >>= 4) out[i] = hex[key & 0xf];
  return out + ".kern";
}

}  // namespace

std::uint64_t fnv1a(const void* data, std::size_t size, std::uint64_t seed) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  std::uint64_t h = seed;
  for (std::size_t i = 0; i < size; ++i) {
    h ^= bytes[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

std::uint64_t ground_space_key(const Interaction& phi, const Region& region) {
  std::uint64_t h = fnv1a("ffgap-kernel-v1", 15);
  const std::int64_t d = phi.local_dim();
  h = fnv1a(&d, sizeof d, h);
  const std::uint64_t n = region.size();
  h = fnv1a(&n, sizeof n, h);
  for (VertexId v : region) {
    const std::uint64_t id = v;
    h = fnv1a(&id, sizeof id, h);
  }
  for (std::size_t idx : phi.terms_within(region)) {
    const auto& term = phi.terms()[idx];
    const std::uint64_t size = term.support.size();
    h = fnv1a(&size, sizeof size, h);
    for (VertexId v : term.support) {
      const std::uint64_t id = v;
      h = fnv1a(&id, sizeof id, h);
    }
    for (Eigen::Index r = 0; r < term.matrix.rows(); ++r)
      for (Eigen::Index c = 0; c < term.matrix.cols(); ++c) {
        const double parts[2] = {term.matrix(r, c).real(), term.matrix(r, c).imag()};
        h = fnv1a(parts, sizeof parts, h);
      }
  }
  return h;
}

ProjectorCache::ProjectorCache(std::filesystem::path directory)
    : directory_(std::move(directory)), counters_(std::make_shared<Counters>()) {
  std::error_code ec;
  std::filesystem::create_directories(directory_, ec);
  if (ec) fail(ErrorCode::kIo, "cannot create cache directory " + directory_.string() + ": " + ec.message());
}

std::optional<ProjectorCache> ProjectorCache::from_environment() {
  const char* value = std::getenv(kEnvironmentVariable);
  if (value == nullptr || *value == '\0') return std::nullopt;
  return ProjectorCache(value);
}

std::optional<DenseMatrix> ProjectorCache::load(std::uint64_t key, Eigen::Index rows) const {
  std::ifstream in(directory_ / key_name(key), std::ios::binary);
  auto miss = [this]() -> std::optional<DenseMatrix> {
    ++counters_->misses;
    return std::nullopt;
  };
  if (!in) return miss();
  char magic[8];
  std::int64_t header[2];
  in.read(magic, sizeof magic);
  in.read(reinterpret_cast<char*>(header), sizeof header);
  if (!in || std::memcmp(magic, kMagic, sizeof magic) != 0 || header[0] != rows || header[1] < 0) return miss();
  DenseMatrix m(header[0], header[1]);
  in.read(reinterpret_cast<char*>(m.data()), static_cast<std::streamsize>(sizeof(Complex) * m.size()));
  if (!in) return miss();
  ++counters_->hits;
  return m;
}

void ProjectorCache::store(std::uint64_t key, const DenseMatrix& basis) const {
  const auto target = directory_ / key_name(key);
  const auto temp = target.string() + ".tmp";
  {
    std::ofstream out(temp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::kIo, "cannot write " + temp);
    const std::int64_t header[2] = {basis.rows(), basis.cols()};
    out.write(kMagic, sizeof kMagic);
    out.write(reinterpret_cast<const char*>(header), sizeof header);
    out.write(reinterpret_cast<const char*>(basis.data()), static_cast<std::streamsize>(sizeof(Complex) * basis.size()));
    if (!out) fail(ErrorCode::kIo, "short write on " + temp);
  }
  std::error_code ec;
  std::filesystem::rename(temp, target, ec);
  if (ec) fail(ErrorCode::kIo, "cannot move " + temp + " into place: " + ec.message());
}

}  // namespace ffgap
