#include "qaccel/io.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "qaccel/levelmap.hpp"

namespace qaccel {

namespace {

using nlohmann::json;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string hex64(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(v));
  return buf;
}

void check_keys(const json& j, std::initializer_list<const char*> allowed,
                const std::string& where) {
  if (!j.is_object())
    throw ConfigError(where + ": expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* key : allowed)
      if (it.key() == key) {
        ok = true;
        break;
      }
    if (!ok)
      throw ConfigError(where + ": unknown key '" + it.key() + "'");
  }
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("key '") + key + "': " + e.what());
  }
}

Schedule parse_schedule(const json& j) {
  check_keys(j,
             {"period", "tau1", "tau2", "ramp", "a1", "a2", "alpha_max",
              "move_wall", "epsilon"},
             "tdse.schedule");
  Schedule s;
  s.period = get_or(j, "period", s.period);
  s.tau1 = get_or(j, "tau1", s.tau1);
  s.tau2 = get_or(j, "tau2", s.tau2);
  s.ramp = get_or(j, "ramp", s.ramp);
  s.a1 = get_or(j, "a1", s.a1);
  s.a2 = get_or(j, "a2", s.a2);
  s.alpha_max = get_or(j, "alpha_max", s.alpha_max);
  s.move_wall = get_or(j, "move_wall", s.move_wall);
  s.epsilon = get_or(j, "epsilon", s.epsilon);
  return s;
}

std::ofstream open_csv(const std::filesystem::path& path,
                       const ExperimentConfig& config,
                       const std::string& header) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open output file " + path.string());
  out << "# tool=" << kToolVersion << "\n";
  out << "# config_hash=" << hex64(config.config_hash()) << "\n";
  out << header << "\n";
  return out;
}

AdiabaticLevelMap map_for_config(const ExperimentConfig& config,
                                 std::uint64_t* table_length) {
  switch (config.model) {
    case ExperimentConfig::Model::Segment:
      if (table_length) *table_length = config.segment.level_count;
      return segment_map(config.segment);
    case ExperimentConfig::Model::Spin:
      if (table_length) *table_length = config.spin.level_count;
      return spin_map(config.spin);
    case ExperimentConfig::Model::UserSpectra: {
      auto [s1, s2] = load_user_spectra(config.user_spectra_path);
      if (table_length) *table_length = s1.trusted_merged_size();
      return snapshot_map(s1, s2);
    }
    default:
      throw ConfigError(
          "levelmap/trajectory commands need a spectral model "
          "(segment, spin, or user-spectra)");
  }
}

std::vector<std::filesystem::path> write_trajectories(
    const ExperimentConfig& config, AdiabaticLevelMap& map,
    const std::filesystem::path& out_dir) {
  std::vector<std::filesystem::path> files;
  for (std::uint64_t k0 : config.trajectory.k0) {
    LevelTrajectory traj = iterate(k0, map, config.trajectory.step_limit,
                                   config.trajectory.escape_threshold);
    auto path = out_dir / ("trajectory_k" + std::to_string(k0) + ".csv");
    auto out = open_csv(path, config, "s,k,ln_k,entropy");
    auto lnk = log_series(traj);
    for (std::size_t s = 0; s < traj.steps.size(); ++s)
      out << s << "," << traj.steps[s] << "," << fmt(lnk[s]) << ","
          << fmt(entropy(traj.steps[s])) << "\n";
    out << "# classification=" << LevelTrajectory::kind_name(traj.kind)
        << " detail=" << traj.detail << "\n";
    if (!traj.note.empty()) out << "# note=" << traj.note << "\n";
    files.push_back(path);
  }
  return files;
}

}  // namespace

std::uint64_t fnv1a64(const std::string& data) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string ExperimentConfig::canonical() const {
  json j;
  const char* names[] = {"segment", "spin", "bernoulli", "user-spectra",
                         "tdse"};
  j["model"] = names[static_cast<int>(model)];
  j["seed"] = seed;
  j["segment"] = {{"a1", segment.a1},
                  {"a2", segment.a2},
                  {"level_count", segment.level_count}};
  j["spin"] = {{"b1", spin.b1},
               {"b2", spin.b2},
               {"level_count", spin.level_count}};
  j["user_spectra"] = {{"path", user_spectra_path.string()}};
  j["trajectory"] = {{"k0", trajectory.k0},
                     {"step_limit", trajectory.step_limit},
                     {"escape_threshold", trajectory.escape_threshold}};
  j["bernoulli"] = {{"beta", bernoulli.beta},
                    {"gamma", bernoulli.gamma},
                    {"k_start", bernoulli.k_start},
                    {"trials", bernoulli.trials},
                    {"k0", bernoulli.k0},
                    {"periods", bernoulli.periods},
                    {"seed_count", bernoulli.seed_count},
                    {"fresh_pair_each_period",
                     bernoulli.fresh_pair_each_period}};
  j["tdse"] = {{"k0", tdse.k0},
               {"level_window", tdse.level_window},
               {"nodes_per_unit", tdse.nodes_per_unit},
               {"n_points", tdse.n_points},
               {"dt", tdse.dt},
               {"attractive_barrier", tdse.attractive_barrier},
               {"schedule",
                {{"period", tdse.schedule.period},
                 {"tau1", tdse.schedule.tau1},
                 {"tau2", tdse.schedule.tau2},
                 {"ramp", tdse.schedule.ramp},
                 {"a1", tdse.schedule.a1},
                 {"a2", tdse.schedule.a2},
                 {"alpha_max", tdse.schedule.alpha_max},
                 {"move_wall", tdse.schedule.move_wall},
                 {"epsilon", tdse.schedule.epsilon}}}};
  return j.dump();
}

std::uint64_t ExperimentConfig::config_hash() const {
  return fnv1a64(canonical());
}

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  check_keys(j,
             {"model", "seed", "segment", "spin", "user_spectra", "trajectory",
              "bernoulli", "tdse"},
             "config");
  ExperimentConfig c;

  std::string model = get_or<std::string>(j, "model", "segment");
  if (model == "segment")
    c.model = Model::Segment;
  else if (model == "spin")
    c.model = Model::Spin;
  else if (model == "bernoulli")
    c.model = Model::Bernoulli;
  else if (model == "user-spectra")
    c.model = Model::UserSpectra;
  else if (model == "tdse")
    c.model = Model::Tdse;
  else
    throw ConfigError("unknown model '" + model + "'");

  c.seed = get_or<std::uint64_t>(j, "seed", 0);

  if (j.contains("segment")) {
    const auto& s = j.at("segment");
    check_keys(s, {"a1", "a2", "level_count"}, "segment");
    c.segment.a1 = get_or(s, "a1", c.segment.a1);
    c.segment.a2 = get_or(s, "a2", c.segment.a2);
    c.segment.level_count = get_or(s, "level_count", c.segment.level_count);
    if (c.segment.a1 <= 0 || c.segment.a2 <= 0 ||
        c.segment.a1 == c.segment.a2)
      throw ConfigError("segment: need a1 > 0, a2 > 0, a1 != a2");
  }
  if (j.contains("spin")) {
    const auto& s = j.at("spin");
    check_keys(s, {"b1", "b2", "level_count"}, "spin");
    c.spin.b1 = get_or(s, "b1", c.spin.b1);
    c.spin.b2 = get_or(s, "b2", c.spin.b2);
    c.spin.level_count = get_or(s, "level_count", c.spin.level_count);
  }
  if (j.contains("user_spectra")) {
    const auto& s = j.at("user_spectra");
    check_keys(s, {"path"}, "user_spectra");
    c.user_spectra_path = get_or<std::string>(s, "path", "");
  }
  if (c.model == Model::UserSpectra && c.user_spectra_path.empty())
    throw ConfigError("user-spectra model needs user_spectra.path");

  if (j.contains("trajectory")) {
    const auto& s = j.at("trajectory");
    check_keys(s, {"k0", "step_limit", "escape_threshold"}, "trajectory");
    c.trajectory.k0 =
        get_or<std::vector<std::uint64_t>>(s, "k0", c.trajectory.k0);
    c.trajectory.step_limit =
        get_or(s, "step_limit", c.trajectory.step_limit);
    c.trajectory.escape_threshold =
        get_or(s, "escape_threshold", c.trajectory.escape_threshold);
    if (c.trajectory.step_limit == 0)
      throw ConfigError("trajectory.step_limit must be >= 1");
    for (std::uint64_t k : c.trajectory.k0)
      if (k == 0) throw ConfigError("trajectory.k0 entries must be >= 1");
  }
  if (j.contains("bernoulli")) {
    const auto& s = j.at("bernoulli");
    check_keys(s,
               {"beta", "gamma", "k_start", "trials", "k0", "periods",
                "seed_count", "fresh_pair_each_period"},
               "bernoulli");
    auto& b = c.bernoulli;
    b.beta = get_or(s, "beta", b.beta);
    b.gamma = get_or(s, "gamma", b.gamma);
    b.k_start = get_or(s, "k_start", b.k_start);
    b.trials = get_or(s, "trials", b.trials);
    b.k0 = get_or(s, "k0", b.k0);
    b.periods = get_or(s, "periods", b.periods);
    b.seed_count = get_or(s, "seed_count", b.seed_count);
    b.fresh_pair_each_period =
        get_or(s, "fresh_pair_each_period", b.fresh_pair_each_period);
    if (!(b.beta > 0 && b.beta < 1 && b.gamma > 0 && b.gamma < 1))
      throw ConfigError("bernoulli: beta and gamma must lie in (0,1)");
    if (b.k_start == 0 || b.k0 == 0 || b.trials == 0)
      throw ConfigError("bernoulli: k_start, k0, trials must be >= 1");
  }
  if (j.contains("tdse")) {
    const auto& s = j.at("tdse");
    check_keys(s,
               {"k0", "level_window", "nodes_per_unit", "n_points", "dt",
                "attractive_barrier", "schedule"},
               "tdse");
    auto& t = c.tdse;
    t.k0 = get_or(s, "k0", t.k0);
    t.level_window = get_or(s, "level_window", t.level_window);
    t.nodes_per_unit = get_or(s, "nodes_per_unit", t.nodes_per_unit);
    t.n_points = get_or(s, "n_points", t.n_points);
    t.dt = get_or(s, "dt", t.dt);
    t.attractive_barrier =
        get_or(s, "attractive_barrier", t.attractive_barrier);
    if (s.contains("schedule")) t.schedule = parse_schedule(s.at("schedule"));
    if (t.k0 < 1 || t.k0 > t.level_window)
      throw ConfigError("tdse: need 1 <= k0 <= level_window");
    try {
      t.schedule.validate();
    } catch (const DomainError& e) {
      throw ConfigError(std::string("tdse.schedule: ") + e.what());
    }
  }
  return c;
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str());
}

std::pair<SpectralSnapshot, SpectralSnapshot> load_user_spectra(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read spectrum file " + path.string());
  SpectralSnapshot s1, s2;
  s1.label = "tau1";
  s2.label = "tau2";
  SpectralSnapshot* current = nullptr;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string tok;
    if (!(ls >> tok)) continue;
    auto fail = [&](const std::string& msg) {
      throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": " +
                        msg);
    };
    if (tok == "[tau1]") {
      current = &s1;
    } else if (tok == "[tau2]") {
      current = &s2;
    } else if (tok == "G1" || tok == "G2") {
      if (!current) fail("energy line before any [tau1]/[tau2] section");
      double e;
      if (!(ls >> e)) fail("expected an energy value after " + tok);
      auto& list = tok == "G1" ? current->group1 : current->group2;
      if (!list.empty() && e <= list.back())
        fail(tok + " energies must be strictly ascending (got " + fmt(e) +
             " after " + fmt(list.back()) + ")");
      list.push_back(e);
    } else {
      fail("unrecognized token '" + tok + "'");
    }
    std::string extra;
    if (ls >> extra) fail("trailing content '" + extra + "'");
  }
  if (s1.group1.empty() && s1.group2.empty())
    throw ConfigError(path.string() + ": missing or empty [tau1] section");
  if (s2.group1.empty() && s2.group2.empty())
    throw ConfigError(path.string() + ": missing or empty [tau2] section");
  s1.validate();
  s2.validate();
  return {std::move(s1), std::move(s2)};
}

void save_user_spectra(const std::filesystem::path& path,
                       const SpectralSnapshot& at_separation,
                       const SpectralSnapshot& at_reconnection) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open spectrum file " + path.string());
  auto dump = [&](const char* header, const SpectralSnapshot& s) {
    out << header << "\n";
    for (double e : s.group1) out << "G1 " << fmt(e) << "\n";
    for (double e : s.group2) out << "G2 " << fmt(e) << "\n";
  };
  dump("[tau1]", at_separation);
  dump("[tau2]", at_reconnection);
}

std::vector<std::filesystem::path> cmd_levelmap(
    const ExperimentConfig& config, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  std::uint64_t table_length = 0;
  AdiabaticLevelMap map = map_for_config(config, &table_length);

  auto table_path = out_dir / "map_table.csv";
  auto out = open_csv(table_path, config, "k,sigma1,S1,kbar,sigma2");
  for (std::uint64_t k = 1; k <= table_length; ++k) {
    std::uint64_t kbar;
    try {
      kbar = map.forward(k);
    } catch (const TruncationError&) {
      out << "# table truncated at k=" << k << " (image unresolvable)\n";
      break;
    }
    out << k << "," << map.sigma1().sigma(k) << ","
        << map.sigma1().prefix_sum(k) << "," << kbar << ","
        << map.sigma2().sigma(kbar) << "\n";
  }
  out.close();

  std::vector<std::filesystem::path> files{table_path};
  auto traj_files = write_trajectories(config, map, out_dir);
  files.insert(files.end(), traj_files.begin(), traj_files.end());
  files.push_back(write_manifest(config, out_dir, files));
  return files;
}

std::vector<std::filesystem::path> cmd_trajectory(
    const ExperimentConfig& config, const std::filesystem::path& out_dir) {
  if (config.trajectory.k0.empty())
    throw ConfigError("trajectory command needs a non-empty trajectory.k0");
  std::filesystem::create_directories(out_dir);
  AdiabaticLevelMap map = map_for_config(config, nullptr);
  auto files = write_trajectories(config, map, out_dir);
  files.push_back(write_manifest(config, out_dir, files));
  return files;
}

std::vector<std::filesystem::path> cmd_montecarlo(
    const ExperimentConfig& config, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  const auto& b = config.bernoulli;
  double rho = kl_rho(b.beta, b.gamma);

  BernoulliParams params{b.beta, b.gamma, config.seed, 0};
  GainEstimate gain = mc_gain(params, b.k_start, b.trials);

  auto gain_path = out_dir / "gain.csv";
  {
    auto out = open_csv(gain_path, config,
                        "beta,gamma,k_start,trials,mean,stderr,kl_rho");
    out << fmt(b.beta) << "," << fmt(b.gamma) << "," << b.k_start << ","
        << b.trials << "," << fmt(gain.mean) << "," << fmt(gain.stderr_mean)
        << "," << fmt(rho) << "\n";
  }

  auto slopes_path = out_dir / "lln_slopes.csv";
  {
    auto out = open_csv(
        slopes_path, config,
        "stream_id,slope,kl_rho,within_30pct,periods_completed,overflowed");
    LlnOptions opts;
    opts.fresh_pair_each_period = b.fresh_pair_each_period;
    for (std::uint64_t s = 0; s < b.seed_count; ++s) {
      BernoulliParams p{b.beta, b.gamma, config.seed, s};
      LlnResult r = lln_trajectory(p, b.k0, b.periods, opts);
      double slope = r.trajectory.steps.size() > 1
                         ? growth_rate(r.trajectory)
                         : 0.0;
      bool within = std::abs(slope - rho) <= 0.3 * rho;
      out << s << "," << fmt(slope) << "," << fmt(rho) << "," << within << ","
          << (r.trajectory.steps.size() - 1) << "," << r.overflowed << "\n";
    }
  }

  std::vector<std::filesystem::path> files{gain_path, slopes_path};
  files.push_back(write_manifest(config, out_dir, files));
  return files;
}

std::vector<std::filesystem::path> cmd_tdse(
    const ExperimentConfig& config, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  const auto& t = config.tdse;

  Grid grid;
  grid.dx = 1.0 / t.nodes_per_unit;
  grid.n_points = t.n_points;
  WallOptions wall;
  double needed = std::max(t.schedule.a1, t.schedule.a2) +
                  10.0 * wall.width_cells * grid.dx;
  if (grid.x_max() < needed)
    throw ConfigError("tdse grid too short: x_max=" + fmt(grid.x_max()) +
                      " < required " + fmt(needed));
  BarrierOptions barrier;
  barrier.attractive = t.attractive_barrier;

  PeriodReport report = run_period_experiment(t.k0, t.schedule, grid,
                                              t.level_window, t.dt, wall,
                                              barrier);

  auto pops_path = out_dir / "populations_checkpoints.csv";
  {
    auto out = open_csv(pops_path, config, "checkpoint,tau,k,energy,I_k");
    for (const auto& cp : report.checkpoints)
      for (std::size_t k = 0; k < cp.pops.size(); ++k)
        out << cp.label << "," << fmt(cp.tau) << "," << (k + 1) << ","
            << fmt(cp.energies[k]) << "," << fmt(cp.pops[k]) << "\n";
  }

  auto energy_path = out_dir / "energy_series.csv";
  {
    auto out = open_csv(energy_path, config, "tau,energy_expectation");
    for (std::size_t i = 0; i < report.energy_series.size(); ++i)
      out << fmt(report.energy_times[i]) << ","
          << fmt(report.energy_series[i]) << "\n";
  }

  auto summary_path = out_dir / "summary.csv";
  {
    auto out = open_csv(
        summary_path, config,
        "k0,k_predicted,k_observed,I_predicted,norm_drift,steps,match");
    const auto& last = report.final_checkpoint();
    double ipred =
        report.k_predicted <= last.pops.size()
            ? last.pops[static_cast<std::size_t>(report.k_predicted) - 1]
            : 0.0;
    out << report.k_start << "," << report.k_predicted << "," << last.dominant
        << "," << fmt(ipred) << "," << fmt(report.norm_drift) << ","
        << report.steps << ","
        << (last.dominant == static_cast<int>(report.k_predicted)) << "\n";
  }

  std::vector<std::filesystem::path> files{pops_path, energy_path,
                                           summary_path};
  files.push_back(write_manifest(config, out_dir, files));
  return files;
}

std::filesystem::path write_manifest(
    const ExperimentConfig& config, const std::filesystem::path& out_dir,
    const std::vector<std::filesystem::path>& outputs) {
  json j;
  j["tool"] = kToolVersion;
  j["config_hash"] = hex64(config.config_hash());
  j["config"] = json::parse(config.canonical());
  j["seed"] = config.seed;
  auto now = std::chrono::system_clock::now();
  j["timestamp_unix"] =
      std::chrono::duration_cast<std::chrono::seconds>(now.time_since_epoch())
          .count();
  json files = json::array();
  for (const auto& p : outputs) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    files.push_back({{"file", p.filename().string()},
                     {"checksum_fnv1a64", hex64(fnv1a64(ss.str()))}});
  }
  j["outputs"] = files;
  auto path = out_dir / "manifest.json";
  std::ofstream out(path);
  out << j.dump(2) << "\n";
  return path;
}

}  // namespace qaccel
