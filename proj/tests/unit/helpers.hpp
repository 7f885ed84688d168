#pragma once

#include "zombiescope/day.hpp"
#include "zombiescope/epochs.hpp"

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

namespace zt {

inline zs::Day D(const char* iso) { return zs::Day::parse(iso); }

inline zs::OwnershipInterval iv(const char* a, const char* b, bool closed = false, bool merge_next = false) {
  zs::OwnershipInterval i;
  i.start = D(a);
  i.end = D(b);
  i.start_closed = closed;
  i.merge_next = merge_next;
  return i;
}

inline zs::RdapRecord pos(const char* domain, const char* query, const char* reg) {
  return {domain, D(query), zs::RdapPolarity::positive, D(reg)};
}

inline zs::RdapRecord neg(const char* domain, const char* query) {
  return {domain, D(query), zs::RdapPolarity::negative, std::nullopt};
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
  explicit TempDir(const std::string& tag) {
    static std::mt19937_64 rng(std::random_device{}());
    path_ = std::filesystem::temp_directory_path() / ("zs-" + tag + "-" + std::to_string(rng()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
  std::filesystem::path path_;
};

inline void write(const std::filesystem::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary) << text;
}

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

} // namespace zt
