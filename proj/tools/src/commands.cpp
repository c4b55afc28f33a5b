#include "crlab/tools/commands.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>

#include "crlab/allocation.hpp"
#include "crlab/error.hpp"
#include "crlab/log.hpp"
#include "crlab/simulator.hpp"
#include "crlab/solver.hpp"
#include "crlab/tools/config.hpp"
#include "crlab/video.hpp"

namespace crlab::tools {
namespace {

namespace fs = std::filesystem;

struct GridDefault {
  double from, to, step;
};

GridDefault default_grid(sim::SweepParameter p) {
  switch (p) {
    case sim::SweepParameter::Channels: return {1.0, 8.0, 1.0};
    case sim::SweepParameter::Eta: return {0.3, 0.9, 0.1};
    case sim::SweepParameter::RelayPower: return {1.0, 18.0, 1.0};
  }
  return {0.0, 0.0, 1.0};
}

std::vector<double> grid_from(const RunOptions& o, GridDefault d) {
  return make_grid(o.has_from ? o.from : d.from, o.has_to ? o.to : d.to, o.has_step ? o.step : d.step);
}

std::ofstream open_csv(const fs::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("cannot write " + path.string());
  return os;
}

void prepare_out_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + dir.string() + ": " + ec.message());
}

video::SessionConfig ia_base(video::Mode mode) {
  switch (mode) {
    case video::Mode::SingleChannel: return video::single_channel_scenario();
    case video::Mode::MultiNoBond: return video::multi_channel_scenario();
    case video::Mode::MultiBond: return video::bonded_scenario();
  }
  return video::single_channel_scenario();
}

video::SessionConfig load_session(const RunOptions& o) {
  const std::string text = o.config_path.empty() ? std::string() : read_file(o.config_path);
  std::string name = o.scenario;
  if (name.empty() && !text.empty()) name = scenario_name(text);
  if (name.empty()) name = "single-channel";
  video::Mode mode;
  try {
    mode = video::parse_mode(name);
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  video::SessionConfig c = text.empty() ? ia_base(mode) : parse_ia_config(text, ia_base(mode));
  c.mode = mode;
  c.seeds = seed_list(o.seeds);
  c.validate();
  return c;
}

void write_psnr(std::ostream& os, const video::SessionConfig& cfg, const video::SessionResult& r) {
  os << "scheme,user,video,psnr_db\n" << std::setprecision(10);
  for (const auto s : video::kAllSchemes) {
    const auto& res = r.at(s);
    for (std::size_t j = 0; j < res.user_mean_psnr.size(); ++j) {
      os << video::to_string(s) << ',' << j << ',' << cfg.videos[j].name << ',' << res.user_mean_psnr[j] << '\n';
    }
  }
}

}  // namespace

std::vector<fs::path> run_relay(const RunOptions& o) {
  sim::ScenarioConfig cfg = sim::table2_scenario();
  if (!o.config_path.empty()) cfg = load_relay_config(o.config_path, cfg);
  cfg.seeds = seed_list(o.seeds);
  cfg.validate();
  prepare_out_dir(o.out_dir);

  std::vector<fs::path> written;
  std::vector<sim::SweepRow> rows;
  fs::path path;
  if (o.sweep.empty()) {
    // Re-applying the channel count leaves the scenario unchanged.
    const double m = cfg.channels;
    rows = sim::sweep(cfg, sim::SweepParameter::Channels, std::span<const double>(&m, 1));
    path = o.out_dir / "relay.csv";
  } else {
    sim::SweepParameter p;
    try {
      p = sim::parse_sweep_parameter(o.sweep);
    } catch (const DomainError& e) {
      throw ConfigError(e.what());
    }
    const auto grid = grid_from(o, default_grid(p));
    rows = sim::sweep(cfg, p, grid);
    path = o.out_dir / ("relay_" + std::string(sim::to_string(p)) + ".csv");
  }
  auto os = open_csv(path);
  sim::write_sweep_csv(os, rows);
  written.push_back(path);
  written.push_back(write_manifest(o));
  return written;
}

std::vector<fs::path> run_ia(const RunOptions& o) {
  prepare_out_dir(o.out_dir);
  std::vector<fs::path> written;

  if (o.ratio_table) {
    if (o.ratio_channels < 1) throw ConfigError("--M must be >= 1");
    const auto grid = parse_grid(o.eta_grid);
    const auto path = o.out_dir / "ratio_table.csv";
    auto os = open_csv(path);
    os << "M,eta,expected_ratio\n" << std::setprecision(12);
    for (const double eta : grid) {
      os << o.ratio_channels << ',' << eta << ',' << allocation::expected_competitive_ratio(eta, o.ratio_channels)
         << '\n';
    }
    written.push_back(path);
    written.push_back(write_manifest(o));
    return written;
  }

  const video::SessionConfig cfg = load_session(o);

  if (!o.sweep.empty()) {
    if (o.sweep != "eta") throw ConfigError("ia supports only --sweep eta");
    const auto grid = grid_from(o, {0.3, 0.9, 0.15});
    const auto path = o.out_dir / "psnr_vs_eta.csv";
    auto os = open_csv(path);
    os << "eta,curve,psnr_db\n" << std::setprecision(10);
    for (const double eta : grid) {
      video::SessionConfig point = cfg;
      point.markov = channel::MarkovChannelModel::from_utilization(eta, cfg.markov.lambda);
      const auto r = video::run_gop(point);
      os << eta << ",proposed," << r.at(video::Scheme::Proposed).mean_psnr << '\n';
      if (cfg.mode == video::Mode::MultiNoBond) os << eta << ",bound," << r.bound_psnr << '\n';
      os << eta << ",heuristic1," << r.at(video::Scheme::Heuristic1).mean_psnr << '\n';
      os << eta << ",heuristic2," << r.at(video::Scheme::Heuristic2).mean_psnr << '\n';
    }
    written.push_back(path);
    written.push_back(write_manifest(o));
    return written;
  }

  const auto r = video::run_gop(cfg);
  {
    const auto path = o.out_dir / "psnr.csv";
    auto os = open_csv(path);
    write_psnr(os, cfg, r);
    written.push_back(path);
  }
  {
    const auto path = o.out_dir / "trace.csv";
    auto os = open_csv(path);
    video::write_trace_csv(os, r.trace);
    written.push_back(path);
  }
  {
    const auto report = solver::solve(solver::reference_problem(), cfg.solver);
    if (!report.converged) warn("reference convergence run hit the iteration cap");
    const auto path = o.out_dir / "convergence.csv";
    auto os = open_csv(path);
    solver::write_trace_csv(os, report);
    written.push_back(path);
  }
  written.push_back(write_manifest(o));
  return written;
}

}  // namespace crlab::tools
