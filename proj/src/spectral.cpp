#include "qaccel/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace qaccel {

namespace {

constexpr double kPi = std::numbers::pi;

double segment_left_energy(std::uint64_t n) {
  double dn = static_cast<double>(n);
  return -1.0 + kPi * kPi * dn * dn;
}

double segment_right_energy(std::uint64_t m, double a) {
  double v = kPi * static_cast<double>(m) / a;
  return v * v;
}

void check_tie(double e1, double e2, const std::string& where) {
  if (std::abs(e1 - e2) < SpectralSnapshot::kDegeneracyTol)
    throw DegenerateSpectrum(where + ": cross-group tie at energies " +
                             std::to_string(e1) + " and " +
                             std::to_string(e2));
}

// Merges two closed-form spectra into a snapshot with K unambiguous merged
// levels plus one safety entry per group.
template <class E1, class E2>
SpectralSnapshot build_snapshot(E1 energy1, E2 energy2, std::uint64_t K,
                                std::string label) {
  if (K == 0) throw DomainError("level count must be >= 1");
  SpectralSnapshot snap;
  snap.label = std::move(label);
  std::uint64_t n = 0, m = 0;
  for (std::uint64_t k = 0; k < K; ++k) {
    double e1 = energy1(n + 1);
    double e2 = energy2(m + 1);
    check_tie(e1, e2, snap.label.empty() ? "snapshot" : snap.label);
    if (e1 < e2) {
      snap.group1.push_back(e1);
      ++n;
    } else {
      snap.group2.push_back(e2);
      ++m;
    }
  }
  snap.group1.push_back(energy1(n + 1));
  snap.group2.push_back(energy2(m + 1));
  snap.validate();
  return snap;
}

}  // namespace

void SpectralSnapshot::validate() const {
  for (const auto* list : {&group1, &group2}) {
    for (std::size_t i = 1; i < list->size(); ++i)
      if ((*list)[i] <= (*list)[i - 1])
        throw DomainError("snapshot '" + label +
                          "': energies not strictly increasing at entry " +
                          std::to_string(i + 1));
  }
  // Cross-group ties: check each group1 energy against its neighbors in
  // group2 (both lists sorted, so binary search suffices).
  for (double e : group1) {
    auto it = std::lower_bound(group2.begin(), group2.end(), e);
    if (it != group2.end()) check_tie(e, *it, "snapshot '" + label + "'");
    if (it != group2.begin()) check_tie(e, *(it - 1), "snapshot '" + label + "'");
  }
}

std::uint64_t SpectralSnapshot::trusted_merged_size() const {
  if (group1.empty() || group2.empty())
    return group1.size() + group2.size();
  double cut = std::min(group1.back(), group2.back());
  auto count = [cut](const std::vector<double>& v) {
    return static_cast<std::uint64_t>(
        std::upper_bound(v.begin(), v.end(), cut) - v.begin());
  };
  return count(group1) + count(group2);
}

SpectralSnapshot segment_snapshot(double a, std::uint64_t K,
                                  std::string label) {
  if (a <= 0) throw DomainError("segment length must be positive");
  return build_snapshot(
      [](std::uint64_t n) { return segment_left_energy(n); },
      [a](std::uint64_t m) { return segment_right_energy(m, a); }, K,
      label.empty() ? "segment a=" + std::to_string(a) : std::move(label));
}

SpectralSnapshot spin_snapshot(double B, std::uint64_t K, std::string label) {
  // E_m^+ = E_n^- would need m - n = 2B; reject 2B within tolerance of an
  // integer.
  double twob = 2.0 * B;
  if (std::abs(twob - std::round(twob)) < SpectralSnapshot::kDegeneracyTol)
    throw DegenerateSpectrum("spin model degenerate at B=" +
                             std::to_string(B));
  return build_snapshot(
      [B](std::uint64_t m) { return static_cast<double>(m) - 0.5 - B; },
      [B](std::uint64_t n) { return static_cast<double>(n) - 0.5 + B; }, K,
      label.empty() ? "spin B=" + std::to_string(B) : std::move(label));
}

IndicatorSequence indicators_from_snapshot(const SpectralSnapshot& snap) {
  snap.validate();
  std::uint64_t len = snap.trusted_merged_size();
  std::vector<int> values;
  values.reserve(len);
  std::size_t i = 0, j = 0;
  while (values.size() < len) {
    bool take1;
    if (i < snap.group1.size() && j < snap.group2.size()) {
      check_tie(snap.group1[i], snap.group2[j], "snapshot '" + snap.label + "'");
      take1 = snap.group1[i] < snap.group2[j];
    } else {
      take1 = i < snap.group1.size();
    }
    values.push_back(take1 ? 1 : -1);
    if (take1)
      ++i;
    else
      ++j;
  }
  return IndicatorSequence(values);
}

double energy_of_level(std::uint64_t k, const SpectralSnapshot& snap) {
  if (k == 0) throw DomainError("level numbers start at 1");
  std::uint64_t len = snap.trusted_merged_size();
  if (k > len)
    throw TruncationError("level " + std::to_string(k) +
                          " beyond trusted merged prefix of length " +
                          std::to_string(len));
  std::size_t i = 0, j = 0;
  double e = 0.0;
  for (std::uint64_t t = 0; t < k; ++t) {
    bool take1 = j >= snap.group2.size() ||
                 (i < snap.group1.size() && snap.group1[i] < snap.group2[j]);
    e = take1 ? snap.group1[i++] : snap.group2[j++];
  }
  return e;
}

IndicatorSequence segment_indicators(double a) {
  if (a <= 0) throw DomainError("segment length must be positive");
  auto gen = [a, n = std::uint64_t{0}, m = std::uint64_t{0}]() mutable {
    double e1 = segment_left_energy(n + 1);
    double e2 = segment_right_energy(m + 1, a);
    check_tie(e1, e2, "segment a=" + std::to_string(a));
    if (e1 < e2) {
      ++n;
      return 1;
    }
    ++m;
    return -1;
  };
  return IndicatorSequence(gen);
}

IndicatorSequence spin_indicators(double B) {
  double twob = 2.0 * B;
  if (std::abs(twob - std::round(twob)) < SpectralSnapshot::kDegeneracyTol)
    throw DegenerateSpectrum("spin model degenerate at B=" +
                             std::to_string(B));
  auto gen = [B, m = std::uint64_t{0}, n = std::uint64_t{0}]() mutable {
    double up = static_cast<double>(m + 1) - 0.5 - B;
    double down = static_cast<double>(n + 1) - 0.5 + B;
    if (up < down) {
      ++m;
      return 1;
    }
    ++n;
    return -1;
  };
  return IndicatorSequence(gen);
}

AdiabaticLevelMap segment_map(const SegmentModelParams& params) {
  if (params.a1 <= 0 || params.a2 <= 0)
    throw DomainError("segment lengths must be positive");
  if (params.a1 == params.a2)
    throw DomainError("separation and reconnection lengths must differ");
  return AdiabaticLevelMap(segment_indicators(params.a1),
                           segment_indicators(params.a2));
}

AdiabaticLevelMap spin_map(const SpinModelParams& params) {
  return AdiabaticLevelMap(spin_indicators(params.b1),
                           spin_indicators(params.b2));
}

AdiabaticLevelMap snapshot_map(const SpectralSnapshot& at_separation,
                               const SpectralSnapshot& at_reconnection) {
  return AdiabaticLevelMap(indicators_from_snapshot(at_separation),
                           indicators_from_snapshot(at_reconnection));
}

}  // namespace qaccel
