#include "qaccel/levelmap.hpp"

#include <cmath>
#include <unordered_map>

namespace qaccel {

GroupIndex group_index(std::uint64_t k, IndicatorSequence& sigma) {
  if (k == 0) throw DomainError("level numbers start at 1");
  int g = sigma.sigma(k);
  std::int64_t s = sigma.prefix_sum(k);
  std::int64_t idx = (static_cast<std::int64_t>(k) + g * s) / 2;
  return GroupIndex{g, static_cast<std::uint64_t>(idx)};
}

std::uint64_t position_of(int group, std::uint64_t index,
                          IndicatorSequence& sigma) {
  if (group != 1 && group != -1)
    throw DomainError("group must be +1 or -1");
  return sigma.position_in_group(group, index);
}

std::uint64_t AdiabaticLevelMap::forward(std::uint64_t k) {
  GroupIndex gi = group_index(k, sigma1_);
  return position_of(gi.group, gi.index, sigma2_);
}

std::uint64_t AdiabaticLevelMap::backward(std::uint64_t kbar) {
  GroupIndex gi = group_index(kbar, sigma2_);
  return position_of(gi.group, gi.index, sigma1_);
}

const char* LevelTrajectory::kind_name(Kind k) {
  switch (k) {
    case Kind::Loop: return "loop";
    case Kind::Escaped: return "escaped";
    case Kind::Undetermined: return "undetermined";
  }
  return "unknown";
}

LevelTrajectory iterate(std::uint64_t k0, AdiabaticLevelMap& map,
                        std::uint64_t step_limit,
                        std::uint64_t escape_threshold) {
  if (k0 == 0) throw DomainError("level numbers start at 1");
  if (step_limit == 0) throw DomainError("step_limit must be >= 1");

  LevelTrajectory traj;
  traj.start = k0;
  traj.steps.push_back(k0);
  std::unordered_map<std::uint64_t, std::uint64_t> first_seen;
  first_seen.emplace(k0, 0);

  std::uint64_t k = k0;
  for (std::uint64_t s = 1; s <= step_limit; ++s) {
    std::uint64_t next;
    try {
      next = map.forward(k);
    } catch (const TruncationError& e) {
      traj.kind = LevelTrajectory::Kind::Undetermined;
      traj.detail = step_limit;
      traj.note = e.what();
      return traj;
    }
    traj.steps.push_back(next);
    auto [it, inserted] = first_seen.emplace(next, s);
    if (!inserted) {
      traj.kind = LevelTrajectory::Kind::Loop;
      traj.detail = s - it->second;
      return traj;
    }
    if (next > escape_threshold) {
      traj.kind = LevelTrajectory::Kind::Escaped;
      traj.detail = escape_threshold;
      return traj;
    }
    k = next;
  }
  traj.kind = LevelTrajectory::Kind::Undetermined;
  traj.detail = step_limit;
  return traj;
}

double growth_rate(const LevelTrajectory& traj) {
  if (traj.steps.size() < 2)
    throw DomainError("growth rate needs at least one recorded step");
  double s = static_cast<double>(traj.steps.size() - 1);
  return (std::log(static_cast<double>(traj.steps.back())) -
          std::log(static_cast<double>(traj.steps.front()))) /
         s;
}

std::vector<double> log_series(const LevelTrajectory& traj) {
  std::vector<double> out;
  out.reserve(traj.steps.size());
  for (std::uint64_t k : traj.steps)
    out.push_back(std::log(static_cast<double>(k)));
  return out;
}

double entropy(std::uint64_t k) {
  if (k == 0) throw DomainError("level numbers start at 1");
  return std::log(static_cast<double>(k));
}

}  // namespace qaccel
