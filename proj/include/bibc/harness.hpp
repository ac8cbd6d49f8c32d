#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include "bibc/config.hpp"
#include "bibc/csv.hpp"
#include "bibc/metrics.hpp"

namespace bibc {

enum class Preset { Fig3, Fig4, Fig5, Fig6, Custom };

inline std::string to_string(Preset p) {
  switch (p) {
    case Preset::Fig3: return "fig3";
    case Preset::Fig4: return "fig4";
    case Preset::Fig5: return "fig5";
    case Preset::Fig6: return "fig6";
    case Preset::Custom: return "custom";
  }
  throw std::logic_error("unreachable preset");
}

inline Preset parse_preset(const std::string& s) {
  if (s == "fig3") return Preset::Fig3;
  if (s == "fig4") return Preset::Fig4;
  if (s == "fig5") return Preset::Fig5;
  if (s == "fig6") return Preset::Fig6;
  if (s == "custom") return Preset::Custom;
  throw ConfigError("scenario must be one of fig3|fig4|fig5|fig6|custom, got '" + s + "'");
}

struct RunArtifact {
  std::string out_dir;
  std::string run_id;
  std::vector<std::string> outputs;  // file names inside out_dir
};

namespace detail {

inline std::string fnv1a_hex(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<size_t>(i)] = digits[h & 0xf];
    h >>= 4;
  }
  return out;
}

inline ChannelSet scenario_channels(const Scene& sc, bool normalize) {
  ChannelSet ch = synthesize_channels(sc);
  return normalize ? normalize_backscatter(ch) : ch;
}

inline Waveforms scenario_waveforms(const ChannelSet& ch, const PhasePlan& plan,
                                    double snr_p_db, double snr_d_db) {
  PhasePowers powers = calibrate_powers(ch, plan, std::pow(10.0, snr_p_db / 10.0),
                                        std::pow(10.0, snr_d_db / 10.0));
  return make_waveforms(static_cast<int>(ch.g_ab.rows()), static_cast<int>(ch.g_ab.cols()),
                        plan, powers.p_t_phase1, powers.p_t_phase2);
}

inline double to_db_floor(double x) { return 10.0 * std::log10(std::max(x, 1e-30)); }

inline void write_text(const std::string& body, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f.write(body.data(), static_cast<std::streamsize>(body.size()));
  if (!f) throw std::runtime_error("write failed: " + path);
}

}  // namespace detail

/// Pattern sweep table: columns theta_deg, e_t_db, label. fig3 compares
/// panel-size combinations at fixed nulling depth, fig4 sweeps the nulling
/// depth at fixed panel sizes, custom evaluates exactly the configured
/// projector. Every labeled curve shares the unprojected reference curve.
inline csv::Table radiation_table(const ScenarioConfig& cfg, Preset preset) {
  struct Curve {
    int m, n, k;
    std::string label;
  };
  std::vector<Curve> curves;
  curves.push_back({cfg.scene.m, cfg.scene.n, 0, "no_projection"});
  if (preset == Preset::Fig3) {
    curves.push_back({8, 16, 2, "m8_n16_k2"});
    curves.push_back({16, 16, 3, "m16_n16_k3"});
    curves.push_back({16, 8, 2, "m16_n8_k2"});
  } else if (preset == Preset::Fig4) {
    for (int k = 1; k <= 4; ++k)
      curves.push_back({cfg.scene.m, cfg.scene.n, k, "k" + std::to_string(k)});
  } else {
    if (cfg.projection_mode != ProjectionMode::None && cfg.k > 0)
      curves.push_back({cfg.scene.m, cfg.scene.n, cfg.k, "k" + std::to_string(cfg.k)});
  }

  std::vector<double> grid_deg = resolved_theta_grid_deg(cfg);
  std::vector<double> grid_rad;
  grid_rad.reserve(grid_deg.size());
  for (double d : grid_deg) grid_rad.push_back(d * kTwoPi / 360.0);

  PhasePlan plan = make_phase_plan(cfg.j_p, cfg.j_d, cfg.tau_p, cfg.tau_d);
  csv::Table table;
  table.header = {"theta_deg", "e_t_db", "label"};
  for (const Curve& c : curves) {
    if (cfg.tau_p < c.n || cfg.tau_d < c.m)
      throw ConfigError("scenario curve " + c.label + " needs tau_p >= " + std::to_string(c.n) +
                        " and tau_d >= " + std::to_string(c.m));
    if (c.k >= c.m) throw ConfigError("scenario curve " + c.label + " needs k < m");
    Scene sc = cfg.scene;
    sc.m = c.m;
    sc.n = c.n;
    ChannelSet ch = detail::scenario_channels(sc, cfg.normalize_backscatter);
    Waveforms wf = detail::scenario_waveforms(ch, plan, cfg.snr_p_db, cfg.snr_d_db);
    Projector proj = c.k == 0 ? identity_projector(c.m) : build_projector(ch.g_ab, c.k);
    auto pts = radiation_pattern(proj.p_s, grid_rad, sc.d_ant, wf.alpha_d);
    for (size_t i = 0; i < pts.size(); ++i)
      table.rows.push_back({grid_deg[i], detail::to_db_floor(pts[i].e_t), c.label});
  }
  return table;
}

/// Dynamic-range sweep table: columns y_m, mode, k, snr_p_db, zeta_db,
/// trials. fig5 sweeps the BD along y for the standard mode family; custom
/// evaluates the configured mode only. snr_p_db is nan on rows whose result
/// does not depend on it (deterministic projector construction).
inline csv::Table dynamic_range_table(const ScenarioConfig& cfg, Preset preset, int threads) {
  struct Curve {
    ProjectionMode mode;
    int k;
    double snr_p_db;  // nan when irrelevant
    int trials;
  };
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<Curve> curves;
  std::vector<double> ys = cfg.bd_y_sweep;
  if (preset == Preset::Fig5) {
    if (ys.empty())
      for (int y = 0; y <= 30; ++y) ys.push_back(static_cast<double>(y));
    int trials = cfg.trials.value_or(1000);
    curves.push_back({ProjectionMode::None, 0, nan, 1});
    for (int k = 1; k <= 4; ++k) curves.push_back({ProjectionMode::Perfect, k, nan, 1});
    curves.push_back({ProjectionMode::Estimated, 3, 5.0, trials});
    curves.push_back({ProjectionMode::Estimated, 3, 20.0, trials});
  } else {
    if (ys.empty()) ys.push_back(cfg.scene.bd_position.y());
    int eff_k = cfg.projection_mode == ProjectionMode::None ? 0 : cfg.k;
    bool stochastic = cfg.projection_mode == ProjectionMode::Estimated && eff_k > 0;
    curves.push_back({cfg.projection_mode, eff_k, stochastic ? cfg.snr_p_db : nan,
                      stochastic ? cfg.trials.value_or(1000) : 1});
  }

  PhasePlan plan = make_phase_plan(cfg.j_p, cfg.j_d, cfg.tau_p, cfg.tau_d);
  int jobs = static_cast<int>(curves.size() * ys.size());
  std::vector<DynamicRangeReport> reports(static_cast<size_t>(jobs));
  parallel_for(jobs, threads, [&](int job) {
    size_t ci = static_cast<size_t>(job) / ys.size();
    size_t yi = static_cast<size_t>(job) % ys.size();
    const Curve& c = curves[ci];
    Scene sc = cfg.scene;
    sc.bd_position.y() = ys[yi];
    ChannelSet ch = detail::scenario_channels(sc, cfg.normalize_backscatter);
    double snr_p = std::isnan(c.snr_p_db) ? cfg.snr_p_db : c.snr_p_db;
    Waveforms wf = detail::scenario_waveforms(ch, plan, snr_p, cfg.snr_d_db);
    std::uint64_t seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(ci),
                                     static_cast<std::uint64_t>(yi));
    reports[static_cast<size_t>(job)] =
        dynamic_range(ch, wf, plan, c.mode, c.k, c.trials, seed);
  });

  csv::Table table;
  table.header = {"y_m", "mode", "k", "snr_p_db", "zeta_db", "trials"};
  for (size_t ci = 0; ci < curves.size(); ++ci)
    for (size_t yi = 0; yi < ys.size(); ++yi) {
      const Curve& c = curves[ci];
      const DynamicRangeReport& rep = reports[ci * ys.size() + yi];
      table.rows.push_back({ys[yi], to_string(c.mode), static_cast<std::int64_t>(c.k),
                            c.snr_p_db, rep.zeta_db, static_cast<std::int64_t>(rep.trials)});
    }
  return table;
}

/// ROC table: columns mode, snr_p_db, threshold_log, p_fa, p_d, trials.
/// fig6 runs the three projection policies at two pilot SNRs with common
/// random numbers and a shared per-SNR threshold grid so curves compare at
/// equal false-alarm rates; custom runs the configured policy once.
inline csv::Table roc_table(const ScenarioConfig& cfg, Preset preset, int threads) {
  PhasePlan plan = make_phase_plan(cfg.j_p, cfg.j_d, cfg.tau_p, cfg.tau_d);
  csv::Table table;
  table.header = {"mode", "snr_p_db", "threshold_log", "p_fa", "p_d", "trials"};

  struct Group {
    double snr_p_db;
    std::vector<std::pair<ProjectionMode, int>> modes;
    std::uint64_t seed;
  };
  std::vector<Group> groups;
  Scene base = cfg.scene;
  int trials;
  if (preset == Preset::Fig6) {
    base.bd_position = Eigen::Vector2d(3.0, 3.0);
    trials = cfg.trials.value_or(10000);
    std::vector<double> snrs = {5.0, 20.0};
    for (size_t si = 0; si < snrs.size(); ++si)
      groups.push_back({snrs[si],
                        {{ProjectionMode::None, 0},
                         {ProjectionMode::Perfect, cfg.k},
                         {ProjectionMode::Estimated, cfg.k}},
                        derive_seed(cfg.seed, si)});
  } else {
    trials = cfg.trials.value_or(10000);
    groups.push_back(
        {cfg.snr_p_db, {{cfg.projection_mode, cfg.k}}, derive_seed(cfg.seed, 0)});
  }

  ChannelSet ch = detail::scenario_channels(base, cfg.normalize_backscatter);
  for (const Group& g : groups) {
    Waveforms wf = detail::scenario_waveforms(ch, plan, g.snr_p_db, cfg.snr_d_db);
    std::vector<PairedStats> stats;
    stats.reserve(g.modes.size());
    for (const auto& mode : g.modes) {
      RocScenario rs;
      rs.ch = ch;
      rs.plan = plan;
      rs.wf = wf;
      rs.projection = mode.first;
      rs.k = mode.second;
      rs.detector = cfg.detector_mode;
      rs.epsilon = cfg.epsilon;
      rs.max_iters = cfg.max_iters;
      stats.push_back(paired_glr_stats(rs, trials, g.seed, threads));
    }
    std::vector<double> thresholds = cfg.thresholds;
    if (thresholds.empty()) {
      PairedStats pooled;
      for (const PairedStats& st : stats) {
        pooled.h0.insert(pooled.h0.end(), st.h0.begin(), st.h0.end());
        pooled.h1.insert(pooled.h1.end(), st.h1.begin(), st.h1.end());
      }
      thresholds = default_log_thresholds(pooled, 101);
    }
    for (size_t mi = 0; mi < g.modes.size(); ++mi) {
      RocCurve curve = roc_from_stats(stats[mi], thresholds);
      for (const RocPoint& pt : curve.points)
        table.rows.push_back({to_string(g.modes[mi].first), g.snr_p_db, pt.threshold_log,
                              pt.p_fa, pt.p_d, static_cast<std::int64_t>(trials)});
    }
  }
  return table;
}

/// Execute a scenario and write its artifacts: config echo, result CSVs,
/// and a small run manifest. Identical (config, seed) inputs produce
/// byte-identical directories for any thread count.
inline RunArtifact run_scenario(const ScenarioConfig& cfg, Preset preset,
                                const std::string& out_dir, int threads = 1) {
  validate_config(cfg);
  std::filesystem::create_directories(out_dir);
  std::string echo = config_to_text(cfg);
  detail::write_text(echo, (std::filesystem::path(out_dir) / "config.json").string());

  RunArtifact art;
  art.out_dir = out_dir;
  art.run_id = detail::fnv1a_hex(to_string(preset) + "\n" + std::to_string(cfg.seed) + "\n" + echo);
  art.outputs.push_back("config.json");

  auto emit = [&](const csv::Table& table, const std::string& name) {
    csv::write(table, (std::filesystem::path(out_dir) / name).string());
    art.outputs.push_back(name);
  };
  if (preset == Preset::Fig3 || preset == Preset::Fig4 || preset == Preset::Custom)
    emit(radiation_table(cfg, preset), "radiation.csv");
  if (preset == Preset::Fig5 || preset == Preset::Custom)
    emit(dynamic_range_table(cfg, preset, threads), "dynamic_range.csv");
  if (preset == Preset::Fig6 || preset == Preset::Custom)
    emit(roc_table(cfg, preset, threads), "roc.csv");

  nlohmann::json run;
  run["run_id"] = art.run_id;
  run["scenario"] = to_string(preset);
  run["seed"] = cfg.seed;
  run["outputs"] = art.outputs;
  detail::write_text(run.dump(2) + "\n",
                     (std::filesystem::path(out_dir) / "run.json").string());
  art.outputs.push_back("run.json");
  return art;
}

}  // namespace bibc
