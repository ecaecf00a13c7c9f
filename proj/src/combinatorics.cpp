#include "lookback/combinatorics.hpp"

namespace lookback {

namespace {

void compose(int remaining, int slot, std::vector<int>& parts,
             const std::function<void(std::span<const int>)>& visit) {
  const int k = static_cast<int>(parts.size());
  if (slot == k - 1) {
    parts[slot] = remaining;
    visit(parts);
    return;
  }
  const int slots_left = k - slot - 1;
  for (int first = 1; first <= remaining - slots_left; ++first) {
    parts[slot] = first;
    compose(remaining - first, slot + 1, parts, visit);
  }
}

void choose(int j, int start, int slot, std::vector<int>& picked,
            const std::function<void(std::span<const int>)>& visit) {
  if (slot == static_cast<int>(picked.size())) {
    visit(picked);
    return;
  }
  const int needed = static_cast<int>(picked.size()) - slot;
  for (int i = start; i <= j - needed; ++i) {
    picked[slot] = i;
    choose(j, i + 1, slot + 1, picked, visit);
  }
}

}  // namespace

void for_each_composition(int n, int k, const std::function<void(std::span<const int>)>& visit) {
  if (k < 0 || n < 0) return;
  if (k == 0) {
    if (n == 0) visit({});
    return;
  }
  if (n < k) return;
  std::vector<int> parts(static_cast<std::size_t>(k));
  compose(n, 0, parts, visit);
}

void for_each_combination(int j, int r, const std::function<void(std::span<const int>)>& visit) {
  if (r < 0 || r > j) return;
  std::vector<int> picked(static_cast<std::size_t>(r));
  choose(j, 0, 0, picked, visit);
}

}  // namespace lookback
