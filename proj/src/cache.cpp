#include "ege/cache.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>

namespace ege::cache {

namespace {

constexpr char kMagic[8] = {'E', 'G', 'E', 'S', 'P', 'C', '0', '1'};

struct Header {
  char magic[8];
  std::uint32_t beta;
  std::uint32_t n_levels;
  std::uint64_t seed;
  std::uint32_t index;
  std::uint32_t density;
};

Header make_header(const EnsembleConfig& config, int index) {
  Header h{};
  std::memcpy(h.magic, kMagic, 8);
  h.beta = static_cast<std::uint32_t>(config.beta);
  h.n_levels = static_cast<std::uint32_t>(config.n_levels);
  h.seed = config.seed;
  h.index = static_cast<std::uint32_t>(index);
  h.density = config.density_mode == DensityMode::uniform ? 0 : 1;
  return h;
}

}  // namespace

std::filesystem::path spectrum_path(const std::filesystem::path& dir,
                                    const EnsembleConfig& config, int index) {
  return dir / config.content_hash() /
         ("spec_" + std::to_string(index) + ".bin");
}

void write_spectrum(const std::filesystem::path& dir,
                    const EnsembleConfig& config, int index,
                    const Eigen::ArrayXd& levels) {
  const auto path = spectrum_path(dir, config, index);
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
    throw std::runtime_error("cache: cannot open " + path.string() +
                             " for writing");
  const Header h = make_header(config, index);
  out.write(reinterpret_cast<const char*>(&h), sizeof(h));
  out.write(reinterpret_cast<const char*>(levels.data()),
            static_cast<std::streamsize>(levels.size() * sizeof(double)));
  if (!out) throw std::runtime_error("cache: short write to " + path.string());
}

bool read_spectrum(const std::filesystem::path& dir,
                   const EnsembleConfig& config, int index,
                   Eigen::ArrayXd& out) {
  const auto path = spectrum_path(dir, config, index);
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  Header h{};
  in.read(reinterpret_cast<char*>(&h), sizeof(h));
  const Header expect = make_header(config, index);
  if (!in || std::memcmp(h.magic, kMagic, 8) != 0 || h.beta != expect.beta ||
      h.n_levels != expect.n_levels || h.seed != expect.seed ||
      h.index != expect.index || h.density != expect.density)
    throw std::runtime_error("cache: header mismatch in " + path.string());
  out.resize(h.n_levels);
  in.read(reinterpret_cast<char*>(out.data()),
          static_cast<std::streamsize>(out.size() * sizeof(double)));
  if (!in) throw std::runtime_error("cache: truncated file " + path.string());
  for (Eigen::Index i = 1; i < out.size(); ++i)
    if (!(out[i] >= out[i - 1]))
      throw std::runtime_error("cache: unsorted levels in " + path.string());
  return true;
}

}  // namespace ege::cache
