#pragma once

// Brute-force derivability of context splits by searching rule trees.
// Contexts are plain vectors here so the oracle shares no code with the
// library relation it is compared against.

#include <cstddef>
#include <vector>

namespace oracle {

struct Entry {
  char var;   // 'x', 'y', 'z'
  char qual;  // 'l' li, 'u' un, 'h' hi
  char base;  // 'i' int, 'b' bool
  bool operator==(const Entry& o) const {
    return var == o.var && qual == o.qual && base == o.base;
  }
};

using Ctx = std::vector<Entry>;

// Each rule peels the last entry of the whole context:
//   dup       x: q P with q != li goes to every part
//   lin(j)    x: li P goes to part j only
//   hid(j)    (pseudo only) x: hi B in parts before j, x: li B in part j
// The empty rule closes a derivation when every context is empty; with no
// parts the relation is un(whole).
inline bool derivable(std::vector<Ctx> parts, Ctx whole, bool pseudo) {
  if (parts.empty()) {
    for (const auto& e : whole)
      if (e.qual == 'l') return false;
    return true;
  }
  if (whole.empty()) {
    for (const auto& p : parts)
      if (!p.empty()) return false;
    return true;
  }
  const Entry last = whole.back();
  whole.pop_back();
  auto ends_with = [](const Ctx& c, const Entry& e) { return !c.empty() && c.back() == e; };
  auto ends_with_var = [](const Ctx& c, char v) { return !c.empty() && c.back().var == v; };

  if (last.qual != 'l') {
    for (const auto& p : parts)
      if (!ends_with(p, last)) return false;
    for (auto& p : parts) p.pop_back();
    return derivable(std::move(parts), std::move(whole), pseudo);
  }
  for (std::size_t j = 0; j < parts.size(); ++j) {
    if (!ends_with(parts[j], last)) continue;
    bool others_clear = true;
    for (std::size_t k = 0; k < parts.size(); ++k)
      if (k != j && ends_with_var(parts[k], last.var)) others_clear = false;
    if (others_clear) {
      auto next = parts;
      next[j].pop_back();
      if (derivable(std::move(next), whole, pseudo)) return true;
    }
    if (!pseudo || j == 0) continue;
    const Entry hid{last.var, 'h', last.base};
    bool ok = true;
    for (std::size_t k = 0; k < j; ++k)
      if (!ends_with(parts[k], hid)) ok = false;
    for (std::size_t k = j + 1; k < parts.size(); ++k)
      if (ends_with_var(parts[k], last.var)) ok = false;
    if (!ok) continue;
    auto next = parts;
    for (std::size_t k = 0; k <= j; ++k) next[k].pop_back();
    if (derivable(std::move(next), whole, pseudo)) return true;
  }
  return false;
}

}  // namespace oracle
