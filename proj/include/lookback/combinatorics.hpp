#pragma once

#include <functional>
#include <span>
#include <vector>

namespace lookback {

/// Calls visit(parts) for every composition of n into exactly k positive
/// parts, in lexicographic order.
void for_each_composition(int n, int k, const std::function<void(std::span<const int>)>& visit);

/// Calls visit(indices) for every increasing r-subset of {0..j-1}.
void for_each_combination(int j, int r, const std::function<void(std::span<const int>)>& visit);

}  // namespace lookback
