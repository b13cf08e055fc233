#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace greyknn {

/// Fold count actually used: `requested` capped at the smallest non-empty class, never below 2.
std::size_t effective_fold_count(std::span<const std::size_t> labels, std::size_t class_count, std::size_t requested);

/// Stratified fold id per row. Rows of each class are shuffled with the seed and dealt round-robin.
std::vector<std::size_t> stratified_folds(std::span<const std::size_t> labels, std::size_t class_count,
                                          std::size_t folds, std::uint64_t seed);

}  // namespace greyknn
