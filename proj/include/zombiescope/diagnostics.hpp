#pragma once

#include <string>
#include <vector>

namespace zs {

/// Collects non-fatal data problems (skipped records, inconsistent RDAP, ...).
/// Passed by pointer; a null sink drops warnings.
struct Warnings {
  std::vector<std::string> items;

  void add(std::string msg) { items.push_back(std::move(msg)); }
  bool empty() const { return items.empty(); }
};

inline void warn(Warnings* sink, std::string msg) {
  if (sink)
    sink->add(std::move(msg));
}

} // namespace zs
