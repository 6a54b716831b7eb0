#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qaccel/indicator.hpp"
#include "qaccel/levelmap.hpp"

namespace qaccel {

// Two strictly increasing energy lists at one moment of slow time.
// Energies are dimensionless (hbar = 1 scaling throughout).
struct SpectralSnapshot {
  std::vector<double> group1;
  std::vector<double> group2;
  std::string label;

  // Cross-group energies closer than this are a tie and are rejected.
  static constexpr double kDegeneracyTol = 1e-9;

  // Throws DomainError on non-monotone lists, DegenerateSpectrum on
  // cross-group ties.
  void validate() const;

  // Length of the merged prefix whose ordering is unambiguous, i.e. all
  // merged entries not exceeding min(group1.back(), group2.back()).
  std::uint64_t trusted_merged_size() const;
};

struct SegmentModelParams {
  double a1 = 1.0;  // right-well length at separation
  double a2 = 3.0;  // right-well length at reconnection
  std::uint64_t level_count = 100;
};

struct SpinModelParams {
  double b1 = -0.25;  // field at separation
  double b2 = 0.75;   // field at reconnection
  std::uint64_t level_count = 50;
};

// Divided-segment spectra: left well E_n = -1 + pi^2 n^2 on (-1,0), right
// well E_m = (pi m / a)^2 on (0,a). Lists are generated until the merged
// order of the first K levels is unambiguous (one safety entry past K).
SpectralSnapshot segment_snapshot(double a, std::uint64_t K,
                                  std::string label = "");

// Spin-oscillator spectra: up states E_m = m - 1/2 - B, down states
// E_n = n - 1/2 + B (up is group I).
SpectralSnapshot spin_snapshot(double B, std::uint64_t K,
                               std::string label = "");

// sigma(k) = +1 iff the k-th smallest merged energy comes from group1.
// The result is finite (trusted merged prefix only) and not extendable.
IndicatorSequence indicators_from_snapshot(const SpectralSnapshot& snap);

// The k-th smallest merged energy; TruncationError past the trusted prefix.
double energy_of_level(std::uint64_t k, const SpectralSnapshot& snap);

// Provider-backed (unbounded) indicator sequences for the closed-form models.
IndicatorSequence segment_indicators(double a);
IndicatorSequence spin_indicators(double B);

// Renumbering maps for the physical models and for arbitrary snapshot pairs.
AdiabaticLevelMap segment_map(const SegmentModelParams& params);
AdiabaticLevelMap spin_map(const SpinModelParams& params);
AdiabaticLevelMap snapshot_map(const SpectralSnapshot& at_separation,
                               const SpectralSnapshot& at_reconnection);

}  // namespace qaccel
