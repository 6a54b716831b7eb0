#include "qaccel/indicator.hpp"

#include <algorithm>
#include <limits>
#include <string>

namespace qaccel {

IndicatorSequence::IndicatorSequence(const std::vector<int>& values) {
  values_.reserve(values.size());
  prefix_.reserve(values.size());
  for (int v : values) push(v);
  max_length_ = values_.size();
}

IndicatorSequence::IndicatorSequence(Generator gen, std::uint64_t max_length)
    : gen_(std::move(gen)), max_length_(max_length) {}

void IndicatorSequence::push(int value) {
  if (value != 1 && value != -1)
    throw DomainError("indicator value must be +1 or -1, got " +
                      std::to_string(value));
  std::int32_t prev = prefix_.empty() ? 0 : prefix_.back();
  values_.push_back(static_cast<std::int8_t>(value));
  prefix_.push_back(prev + value);
}

void IndicatorSequence::ensure(std::uint64_t k) {
  if (k <= values_.size()) return;
  if (!gen_)
    throw TruncationError("indicator sequence truncated at k=" +
                          std::to_string(values_.size()) +
                          ", requested k=" + std::to_string(k));
  if (k > max_length_)
    throw TruncationError("indicator sequence extension beyond cap " +
                          std::to_string(max_length_) +
                          ", requested k=" + std::to_string(k));
  values_.reserve(k);
  prefix_.reserve(k);
  while (values_.size() < k) push(gen_());
}

int IndicatorSequence::sigma(std::uint64_t k) {
  if (k == 0) throw DomainError("level numbers start at 1");
  ensure(k);
  return values_[k - 1];
}

std::int64_t IndicatorSequence::prefix_sum(std::uint64_t k) {
  if (k == 0) return 0;
  ensure(k);
  return prefix_[k - 1];
}

std::uint64_t IndicatorSequence::count_group(std::uint64_t k, int group) {
  // count of +1 up to k is (k + S(k)) / 2; of -1 is (k - S(k)) / 2.
  std::int64_t s = prefix_sum(k);
  return static_cast<std::uint64_t>(
      (static_cast<std::int64_t>(k) + (group > 0 ? s : -s)) / 2);
}

std::uint64_t IndicatorSequence::position_in_group(int group,
                                                   std::uint64_t index) {
  if (index == 0) throw DomainError("group indices start at 1");
  while (values_.empty() || count_group(values_.size(), group) < index) {
    if (!gen_)
      throw TruncationError(
          "sequence of length " + std::to_string(values_.size()) +
          " exhausted before member " + std::to_string(index) + " of group " +
          std::to_string(group));
    std::uint64_t target = std::max<std::uint64_t>(values_.size() * 2, 64);
    // Keep doubling up to the cap; ensure() throws once the cap is hit.
    ensure(std::min<std::uint64_t>(std::max(target, index), max_length_));
    if (values_.size() >= max_length_ &&
        count_group(values_.size(), group) < index)
      throw TruncationError("extension cap " + std::to_string(max_length_) +
                            " reached before member " + std::to_string(index) +
                            " of group " + std::to_string(group));
  }
  // count_group is nondecreasing with unit steps, so the smallest k with
  // count >= index has sigma(k) == group.
  std::uint64_t lo = 1, hi = values_.size();
  while (lo < hi) {
    std::uint64_t mid = lo + (hi - lo) / 2;
    if (count_group(mid, group) >= index)
      hi = mid;
    else
      lo = mid + 1;
  }
  return lo;
}

}  // namespace qaccel
