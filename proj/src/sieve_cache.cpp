#include "eklab/sieve_cache.hpp"

#include <openssl/evp.h>

#include <array>
#include <cstring>
#include <fstream>
#include <memory>
#include <vector>

#include "eklab/error.hpp"

namespace eklab {
namespace {

void put_u64(std::ostream& out, std::uint64_t v) {
  std::array<char, 8> buf{};
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  out.write(buf.data(), buf.size());
}

std::uint64_t get_u64(const unsigned char* p) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

std::string to_hex(const unsigned char* data, std::size_t len) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (std::size_t i = 0; i < len; ++i) {
    out.push_back(kDigits[data[i] >> 4]);
    out.push_back(kDigits[data[i] & 0xF]);
  }
  return out;
}

std::filesystem::path sidecar(const std::filesystem::path& path) {
  auto p = path;
  p += ".sha256";
  return p;
}

}  // namespace

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IntegrityError("cannot open " + path.string());
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256: digest initialisation failed");
  }
  std::vector<char> buf(1 << 16);
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    const auto got = in.gcount();
    if (got > 0) EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(got));
  }
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int md_len = 0;
  EVP_DigestFinal_ex(ctx.get(), md.data(), &md_len);
  return to_hex(md.data(), md_len);
}

std::filesystem::path omega_cache_path(const std::filesystem::path& dir, std::uint64_t limit,
                                       std::optional<std::uint64_t> cutoff) {
  return dir / ("omega-" + std::to_string(limit) + "-" + std::to_string(cutoff.value_or(0)) +
                ".ekw");
}

std::string save_omega_cache(const OmegaTable& table, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write cache " + path.string());
    out.write(kCacheMagic, 4);
    out.put(static_cast<char>(kCacheVersion));
    put_u64(out, table.limit());
    put_u64(out, table.cutoff().value_or(0));
    const auto counts = table.counts();
    out.write(reinterpret_cast<const char*>(counts.data()),
              static_cast<std::streamsize>(counts.size()));
    if (!out) throw std::runtime_error("short write to cache " + path.string());
  }
  const std::string digest = sha256_file(path);
  std::ofstream(sidecar(path), std::ios::trunc) << digest << '\n';
  return digest;
}

OmegaTable load_omega_cache(const std::filesystem::path& path,
                            const std::optional<std::string>& expected_digest) {
  std::optional<std::string> expected = expected_digest;
  if (!expected) {
    std::ifstream side(sidecar(path));
    std::string line;
    if (side && std::getline(side, line) && !line.empty()) expected = line;
  }
  if (expected) {
    const std::string actual = sha256_file(path);
    if (actual != *expected) {
      throw IntegrityError("cache digest mismatch for " + path.string() + ": expected " +
                           *expected + ", found " + actual);
    }
  }

  std::ifstream in(path, std::ios::binary);
  if (!in) throw IntegrityError("cannot open cache " + path.string());
  std::array<unsigned char, kCacheHeaderBytes> header{};
  in.read(reinterpret_cast<char*>(header.data()), header.size());
  if (in.gcount() != static_cast<std::streamsize>(header.size())) {
    throw IntegrityError("cache header truncated: " + path.string());
  }
  if (std::memcmp(header.data(), kCacheMagic, 4) != 0) {
    throw IntegrityError("bad cache magic in " + path.string());
  }
  if (header[4] != kCacheVersion) {
    throw IntegrityError("unsupported cache version " + std::to_string(header[4]) + " in " +
                         path.string());
  }
  const std::uint64_t limit = get_u64(header.data() + 5);
  const std::uint64_t cutoff_raw = get_u64(header.data() + 13);
  const auto size = std::filesystem::file_size(path);
  if (limit == 0 || size != kCacheHeaderBytes + limit) {
    throw IntegrityError("cache size does not match its limit: " + path.string());
  }
  std::vector<std::uint8_t> counts(limit + 1, 0);
  in.read(reinterpret_cast<char*>(counts.data() + 1), static_cast<std::streamsize>(limit));
  if (static_cast<std::uint64_t>(in.gcount()) != limit) {
    throw IntegrityError("cache body truncated: " + path.string());
  }
  std::optional<std::uint64_t> cutoff;
  if (cutoff_raw != 0) cutoff = cutoff_raw;
  if (cutoff && *cutoff > limit) throw IntegrityError("cache cutoff exceeds limit");
  return OmegaTable(limit, cutoff, std::move(counts));
}

}  // namespace eklab
