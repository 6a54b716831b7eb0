#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "qaccel/errors.hpp"
#include "qaccel/spectral.hpp"
#include "qaccel/stochastic.hpp"
#include "qaccel/tdse.hpp"

namespace qaccel {

inline constexpr const char* kToolVersion = "qaccel 0.1.0";

struct TrajectoryControls {
  std::vector<std::uint64_t> k0;
  std::uint64_t step_limit = 64;
  std::uint64_t escape_threshold = 1000000;
};

struct BernoulliExperiment {
  double beta = 0.5;
  double gamma = 0.25;
  std::uint64_t k_start = 100000;
  std::uint64_t trials = 10000;
  std::uint64_t k0 = 100;
  std::uint64_t periods = 200;
  std::uint64_t seed_count = 50;
  bool fresh_pair_each_period = true;
};

struct TdseExperiment {
  int k0 = 3;
  int level_window = 12;
  int nodes_per_unit = 144;
  int n_points = 600;
  double dt = 0.0;  // 0: choose from the spectral window
  bool attractive_barrier = false;
  Schedule schedule;
};

// Parsed and validated experiment configuration. Unknown keys anywhere in
// the file are errors, not warnings.
struct ExperimentConfig {
  enum class Model { Segment, Spin, Bernoulli, UserSpectra, Tdse };

  Model model = Model::Segment;
  std::uint64_t seed = 0;
  SegmentModelParams segment;
  SpinModelParams spin;
  std::filesystem::path user_spectra_path;
  TrajectoryControls trajectory;
  BernoulliExperiment bernoulli;
  TdseExperiment tdse;

  // Canonical serialized form; its hash identifies the run.
  std::string canonical() const;
  std::uint64_t config_hash() const;

  static ExperimentConfig from_json_text(const std::string& text);
  static ExperimentConfig load(const std::filesystem::path& path);
};

// FNV-1a 64-bit, used for config hashes and output checksums.
std::uint64_t fnv1a64(const std::string& data);

// Two-snapshot plain-text spectrum file: sections [tau1] and [tau2], lines
// "G1 <energy>" / "G2 <energy>", ascending within group.
std::pair<SpectralSnapshot, SpectralSnapshot> load_user_spectra(
    const std::filesystem::path& path);
void save_user_spectra(const std::filesystem::path& path,
                       const SpectralSnapshot& at_separation,
                       const SpectralSnapshot& at_reconnection);

// Subcommand drivers; each writes its CSV outputs plus a manifest entry
// under out_dir and returns the list of files written.
std::vector<std::filesystem::path> cmd_levelmap(
    const ExperimentConfig& config, const std::filesystem::path& out_dir);
std::vector<std::filesystem::path> cmd_trajectory(
    const ExperimentConfig& config, const std::filesystem::path& out_dir);
std::vector<std::filesystem::path> cmd_montecarlo(
    const ExperimentConfig& config, const std::filesystem::path& out_dir);
std::vector<std::filesystem::path> cmd_tdse(
    const ExperimentConfig& config, const std::filesystem::path& out_dir);

// Writes manifest.json covering the given outputs.
std::filesystem::path write_manifest(
    const ExperimentConfig& config, const std::filesystem::path& out_dir,
    const std::vector<std::filesystem::path>& outputs);

}  // namespace qaccel
