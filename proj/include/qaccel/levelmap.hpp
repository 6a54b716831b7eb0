#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qaccel/indicator.hpp"

namespace qaccel {

struct GroupIndex {
  int group;            // +1 (group I) or -1 (group II)
  std::uint64_t index;  // 1-based index within the group
};

// Group membership and within-group index of level k under sigma:
// index = (k + sigma(k) S(k)) / 2.
GroupIndex group_index(std::uint64_t k, IndicatorSequence& sigma);

// Inverse: the level number of the index-th member of `group` under sigma.
std::uint64_t position_of(int group, std::uint64_t index,
                          IndicatorSequence& sigma);

// The renumbering map between the separation moment (sigma1) and the
// reconnection moment (sigma2): kbar is defined by sigma2(kbar) = sigma1(k)
// and equal within-group indices.
class AdiabaticLevelMap {
 public:
  AdiabaticLevelMap(IndicatorSequence sigma1, IndicatorSequence sigma2)
      : sigma1_(std::move(sigma1)), sigma2_(std::move(sigma2)) {}

  std::uint64_t forward(std::uint64_t k);
  std::uint64_t backward(std::uint64_t kbar);

  IndicatorSequence& sigma1() { return sigma1_; }
  IndicatorSequence& sigma2() { return sigma2_; }

 private:
  IndicatorSequence sigma1_;
  IndicatorSequence sigma2_;
};

// Level numbers recorded at the start of each period under repeated
// application of the map.
struct LevelTrajectory {
  enum class Kind { Loop, Escaped, Undetermined };

  std::uint64_t start = 1;
  std::vector<std::uint64_t> steps;  // steps[0] == start
  Kind kind = Kind::Undetermined;
  std::uint64_t detail = 0;  // Loop: period; Escaped: threshold;
                             // Undetermined: step limit
  std::string note;          // diagnostic, e.g. truncation message

  static const char* kind_name(Kind k);
};

// Iterates map.forward from k0. Loop detection uses a visited set over all
// values seen, so a loop entered after a transient would still be found.
LevelTrajectory iterate(std::uint64_t k0, AdiabaticLevelMap& map,
                        std::uint64_t step_limit,
                        std::uint64_t escape_threshold);

// Endpoint slope (ln k_S - ln k_0) / S over the S recorded steps.
double growth_rate(const LevelTrajectory& traj);

// ln k_s for every recorded step, for offline fitting.
std::vector<double> log_series(const LevelTrajectory& traj);

// ln k, the entropy of the k-th eigenstate.
double entropy(std::uint64_t k);

}  // namespace qaccel
