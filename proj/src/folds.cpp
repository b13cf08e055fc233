#include "greyknn/folds.h"

#include <algorithm>
#include <limits>

#include "greyknn/error.h"
#include "greyknn/rng.h"

namespace greyknn {

std::size_t effective_fold_count(std::span<const std::size_t> labels, std::size_t class_count, std::size_t requested) {
  std::vector<std::size_t> counts(class_count, 0);
  for (auto y : labels) {
    if (y >= class_count) throw DataError(ErrorKind::invalid_argument, "class label out of range");
    ++counts[y];
  }
  std::size_t smallest = std::numeric_limits<std::size_t>::max();
  for (auto c : counts) {
    if (c > 0) smallest = std::min(smallest, c);
  }
  return std::max<std::size_t>(2, std::min(requested, smallest));
}

std::vector<std::size_t> stratified_folds(std::span<const std::size_t> labels, std::size_t class_count,
                                          std::size_t folds, std::uint64_t seed) {
  if (folds < 2) throw DataError(ErrorKind::invalid_argument, "need at least two folds");
  std::vector<std::vector<std::size_t>> by_class(class_count);
  for (std::size_t i = 0; i < labels.size(); ++i) by_class.at(labels[i]).push_back(i);
  std::vector<std::size_t> fold(labels.size(), 0);
  CounterRng rng(seed, /*stream=*/0xF01D);
  // Continue dealing across classes so fold sizes stay balanced when classes are uneven.
  std::size_t next = 0;
  for (auto& rows : by_class) {
    rng.shuffle(std::span<std::size_t>(rows));
    for (auto r : rows) fold[r] = (next++) % folds;
  }
  return fold;
}

}  // namespace greyknn
