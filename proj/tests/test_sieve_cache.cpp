#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "eklab/error.hpp"
#include "eklab/sieve_cache.hpp"

using namespace eklab;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::path(EKLAB_TEST_TMP) / "cache" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void flip_byte(const fs::path& file, std::uintmax_t offset) {
  std::fstream f(file, std::ios::in | std::ios::out | std::ios::binary);
  f.seekg(static_cast<std::streamoff>(offset));
  char c = 0;
  f.get(c);
  f.seekp(static_cast<std::streamoff>(offset));
  f.put(static_cast<char>(c ^ 0x01));
}

}  // namespace

TEST(SieveCache, RoundTrip) {
  const fs::path dir = scratch("round");
  const OmegaTable t = build_omega_table(50'000, 31);
  const fs::path file = omega_cache_path(dir, 50'000, 31);
  EXPECT_EQ(file.filename(), "omega-50000-31.ekw");
  const std::string digest = save_omega_cache(t, file);
  EXPECT_EQ(digest.size(), 64u);
  EXPECT_EQ(fs::file_size(file), kCacheHeaderBytes + 50'000);
  EXPECT_EQ(sha256_file(file), digest);
  EXPECT_EQ(load_omega_cache(file), t);
  EXPECT_EQ(load_omega_cache(file, digest), t);
}

TEST(SieveCache, KnownDigestOfEmptyFile) {
  const fs::path file = scratch("empty") / "e";
  std::ofstream(file).close();
  EXPECT_EQ(sha256_file(file), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST(SieveCache, SingleByteCorruptionDetected) {
  const fs::path dir = scratch("flip");
  const fs::path file = omega_cache_path(dir, 10'000, std::nullopt);
  save_omega_cache(build_omega_table(10'000), file);
  flip_byte(file, kCacheHeaderBytes + 777);
  EXPECT_THROW(load_omega_cache(file), IntegrityError);
}

TEST(SieveCache, WrongExpectedDigestRejected) {
  const fs::path file = scratch("wrong") / "t.ekw";
  save_omega_cache(build_omega_table(1000), file);
  EXPECT_THROW(load_omega_cache(file, std::string(64, '0')), IntegrityError);
}

TEST(SieveCache, BadMagicAndTruncation) {
  const fs::path dir = scratch("bad");
  const fs::path file = dir / "t.ekw";
  save_omega_cache(build_omega_table(1000), file);
  fs::remove(fs::path(file.string() + ".sha256"));
  flip_byte(file, 0);
  EXPECT_THROW(load_omega_cache(file), IntegrityError);
  flip_byte(file, 0);
  fs::resize_file(file, kCacheHeaderBytes + 10);
  EXPECT_THROW(load_omega_cache(file), IntegrityError);
}
