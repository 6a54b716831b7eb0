#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "qaccel/errors.hpp"

namespace qaccel {

// A +/-1 sequence sigma(k), k = 1, 2, ..., labelling energy-ordered
// eigenstates by group membership, together with its prefix sums
// S(k) = sigma(1) + ... + sigma(k).
//
// The stored truncation grows on demand through an optional generator
// callback; without one, access past the stored length throws
// TruncationError. Lazy extension mutates the object, so share instances
// across threads only with external synchronization.
class IndicatorSequence {
 public:
  // Produces sigma(k) for k = size()+1 on each call. Must return +1 or -1.
  using Generator = std::function<int()>;

  static constexpr std::uint64_t kDefaultMaxLength = std::uint64_t{1} << 26;

  IndicatorSequence() = default;

  // Fixed finite sequence; entries must be +1 or -1.
  explicit IndicatorSequence(const std::vector<int>& values);

  // Lazily extendable sequence backed by a generator. max_length bounds
  // memory growth; extension past it throws TruncationError.
  explicit IndicatorSequence(Generator gen,
                             std::uint64_t max_length = kDefaultMaxLength);

  std::uint64_t size() const { return values_.size(); }
  bool extendable() const { return static_cast<bool>(gen_); }
  std::uint64_t max_length() const { return max_length_; }

  // Extends storage to cover k; throws TruncationError when impossible.
  void ensure(std::uint64_t k);

  // sigma(k), k >= 1.
  int sigma(std::uint64_t k);

  // S(k) with S(0) = 0.
  std::int64_t prefix_sum(std::uint64_t k);

  // Number of entries equal to `group` among sigma(1..k).
  std::uint64_t count_group(std::uint64_t k, int group);

  // Smallest k with sigma(k) == group and count_group(k, group) == index.
  // Extends the sequence as needed.
  std::uint64_t position_in_group(int group, std::uint64_t index);

 private:
  void push(int value);

  std::vector<std::int8_t> values_;
  std::vector<std::int32_t> prefix_;
  Generator gen_;
  std::uint64_t max_length_ = kDefaultMaxLength;
};

}  // namespace qaccel
