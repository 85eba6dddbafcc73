/*
 * Copyright 2026 The tiersim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "tiersim/cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "tiersim/errors.hpp"
#include "tiersim/trace_io.hpp"

namespace tiersim::cli {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_number(double v) {
  if (std::isnan(v)) return "";
  return fmt::format("{}", v);
}

void write_sweep_csv(std::ostream& out, const std::vector<EfficiencyPoint>& points) {
  out << kSweepSchema << '\n' << kSweepColumns << '\n';
  for (const auto& p : points) {
    if (p.ok()) {
      out << p.workload << ',' << format_number(p.footprint_ratio) << ',' << format_number(p.arithmetic_intensity)
          << ',' << p.threads << ',' << p.policy << ',' << format_number(p.efficiency) << ','
          << format_number(p.base_time) << ',' << format_number(p.tiered_time) << ',' << p.demand_faults << ','
          << p.prefetch_useful << ",," << format_number(p.base_bandwidth / 1e9) << '\n';
    } else {
      out << p.workload << ',' << format_number(p.footprint_ratio) << ",," << p.threads << ',' << p.policy
          << ",,,,,," << p.error_code << ",\n";
    }
  }
}

void write_features_csv(std::ostream& out, const SweepFeatures& f) {
  out << kFeaturesSchema << '\n' << kFeaturesColumns << '\n';
  out << format_number(f.floor) << ',' << format_number(f.knee_ai) << ',' << format_number(f.threshold_ai) << '\n';
}

void write_run_csv(std::ostream& out, const SimResult& r) {
  out << kRunSchema << '\n' << "thread,time_s\n";
  for (std::size_t i = 0; i < r.per_thread_time.size(); ++i) out << i << ',' << format_number(r.per_thread_time[i]) << '\n';
  out << "total," << format_number(r.total_time) << '\n';
}

json summary_json(const Trace& trace, const SystemSpec& system, const RunConfig& cfg, const SimResult& r) {
  json samples = json::array();
  for (const auto& s : r.bandwidth_samples) {
    samples.push_back({{"time_s", s.time}, {"width_s", s.width}, {"fast_bps", s.fast_bandwidth},
                       {"slow_bps", s.slow_bandwidth}});
  }
  return json{
      {"workload", {{"name", trace.meta.name},
                    {"parameters", trace.meta.parameters},
                    {"total_flops", trace.meta.total_flops},
                    {"total_bytes", trace.meta.total_bytes},
                    {"footprint_bytes", trace.meta.footprint_bytes},
                    {"footprint_ratio", static_cast<double>(trace.meta.footprint_bytes) /
                                            static_cast<double>(system.fast.capacity)},
                    {"arithmetic_intensity", trace.meta.arithmetic_intensity}}},
      {"mode", to_string(cfg.mode)},
      {"policy", {{"name", to_string(cfg.policy.kind)}, {"depth", cfg.policy.depth}}},
      {"warmup", cfg.warmup},
      {"numa", cfg.numa},
      {"total_time_s", r.total_time},
      {"per_thread_time_s", r.per_thread_time},
      {"demand_faults", r.demand_faults},
      {"prefetch_issued", r.prefetch_issued},
      {"prefetch_useful", r.prefetch_useful},
      {"bytes_fast_read", r.bytes_fast_read},
      {"bytes_fast_write", r.bytes_fast_write},
      {"bytes_slow_read", r.bytes_slow_read},
      {"bytes_slow_write", r.bytes_slow_write},
      {"writebacks", r.writebacks},
      {"bandwidth_samples", samples},
  };
}

std::string features_path(const std::string& sweep_csv) {
  fs::path p(sweep_csv);
  std::string stem = p.extension() == ".csv" ? p.stem().string() : p.filename().string();
  return (p.parent_path() / (stem + ".features.csv")).string();
}

namespace {

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << content;
  if (!out) throw std::runtime_error("failed writing '" + path.string() + "'");
}

template <typename F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const SimulationError& e) {
    err << "simulation error: " << e.what() << '\n';
    return kExitRuntime;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_cell(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("malformed " + what + " '" + s + "'");
  }
}

std::string band_text(const Band& b) { return "[" + format_number(b.lo) + ", " + format_number(b.hi) + "]"; }

}  // namespace

int cmd_run(const std::string& config_path, const Options& opt, std::ostream& log, std::ostream& err) {
  return guarded(err, [&] {
    RunConfig cfg = load_run_config(config_path);
    if (opt.seed) cfg.seed = *opt.seed;
    if (opt.out) cfg.output = *opt.out;
    const SystemSpec system = cfg.effective_system();
    Trace trace = build_trace(cfg);
    if (!cfg.save_trace.empty()) save_trace(cfg.save_trace, trace);
    std::optional<CacheState> warm;
    if (cfg.warmup && cfg.mode == SimMode::tiered) warm.emplace(warmup(trace, system));
    SimResult r = simulate(trace, system, cfg.policy, cfg.mode, warm ? &*warm : nullptr);

    fs::create_directories(cfg.output);
    std::ostringstream csv;
    write_run_csv(csv, r);
    write_file(fs::path(cfg.output) / "run.csv", csv.str());
    write_file(fs::path(cfg.output) / "summary.json", summary_json(trace, system, cfg, r).dump(2) + "\n");
    log << fmt::format("{}: total_time {} s, demand_faults {}, prefetch_issued {}, prefetch_useful {}\n",
                       trace.meta.name, format_number(r.total_time), r.demand_faults, r.prefetch_issued,
                       r.prefetch_useful);
    return kExitOk;
  });
}

int cmd_sweep(const std::string& config_path, const Options& opt, std::ostream& log, std::ostream& err) {
  return guarded(err, [&] {
    SweepConfig cfg = load_sweep_config(config_path);
    if (opt.seed) {
      cfg.seed = *opt.seed;
      for (auto& w : cfg.workloads) w.spec.seed = cfg.seed;
    }
    if (opt.out) cfg.output = *opt.out;
    const SystemSpec system = cfg.effective_system();
    std::vector<EfficiencyPoint> points;
    for (const auto& policy : cfg.policies) {
      for (const auto& w : cfg.workloads) {
        SweepGrid grid = cfg.grid;
        if (w.ai_parameters) grid.ai_parameters = *w.ai_parameters;
        SweepTable t = run_sweep(w.spec, grid, system, policy, opt.jobs);
        for (auto& p : t.points) points.push_back(std::move(p));
      }
    }
    fs::create_directories(cfg.output);
    std::ostringstream csv, features;
    write_sweep_csv(csv, points);
    write_features_csv(features, compute_features(system));
    const fs::path csv_path = fs::path(cfg.output) / "sweep.csv";
    write_file(csv_path, csv.str());
    write_file(features_path(csv_path.string()), features.str());
    std::size_t failed = 0;
    for (const auto& p : points) failed += p.ok() ? 0 : 1;
    log << fmt::format("{} points written to {} ({} failed)\n", points.size(), csv_path.string(), failed);
    return kExitOk;
  });
}

int cmd_report(const std::string& csv_path, const std::optional<std::string>& bands_path, std::ostream& out,
               std::ostream& err) {
  return guarded(err, [&] {
    ReportBands bands = bands_path ? load_bands(*bands_path) : ReportBands{};
    std::ifstream in(csv_path, std::ios::binary);
    if (!in) throw ConfigError("cannot open sweep CSV '" + csv_path + "'");
    std::string line;
    if (!std::getline(in, line) || line != kSweepSchema) throw ConfigError("'" + csv_path + "' lacks the sweep schema line");
    if (!std::getline(in, line) || line != kSweepColumns) throw ConfigError("'" + csv_path + "' has unexpected columns");

    struct Row {
      std::string workload, policy, error;
      double ratio = 0, ai = 0, eff = 0;
    };
    std::vector<Row> rows;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      auto c = split(line);
      if (c.size() != 12) throw ConfigError("sweep row has " + std::to_string(c.size()) + " fields, expected 12");
      Row r;
      r.workload = c[0];
      r.ratio = parse_cell(c[1], "footprint_ratio");
      r.policy = c[4];
      r.error = c[10];
      if (r.error.empty()) {
        r.ai = parse_cell(c[2], "arithmetic_intensity");
        r.eff = parse_cell(c[5], "efficiency");
      }
      rows.push_back(r);
    }
    if (rows.empty()) throw ConfigError("'" + csv_path + "' has no data rows");

    const std::string fpath = features_path(csv_path);
    std::ifstream fin(fpath, std::ios::binary);
    if (!fin) throw ConfigError("missing features sidecar '" + fpath + "'");
    if (!std::getline(fin, line) || line != kFeaturesSchema) throw ConfigError("'" + fpath + "' lacks the schema line");
    if (!std::getline(fin, line) || line != kFeaturesColumns) throw ConfigError("'" + fpath + "' has unexpected columns");
    if (!std::getline(fin, line)) throw ConfigError("'" + fpath + "' has no data row");
    auto fc = split(line);
    if (fc.size() != 3) throw ConfigError("'" + fpath + "' row must have 3 fields");
    SweepFeatures f{parse_cell(fc[0], "floor"), parse_cell(fc[1], "knee_ai"), parse_cell(fc[2], "threshold_ai")};

    bool all_pass = true;
    auto verdict = [&](bool ok) {
      all_pass = all_pass && ok;
      return ok ? "PASS" : "FAIL";
    };
    out << fmt::format("{:<14} {:<12} {:<16} {}\n", "floor", format_number(f.floor), band_text(bands.floor),
                       verdict(bands.floor.contains(f.floor)));
    out << fmt::format("{:<14} {:<12} {:<16} {}\n", "knee_ai", format_number(f.knee_ai), band_text(bands.knee_ai),
                       verdict(bands.knee_ai.contains(f.knee_ai)));
    out << fmt::format("{:<14} {:<12} {:<16} {}\n", "threshold_ai", format_number(f.threshold_ai),
                       band_text(bands.threshold_ai), verdict(bands.threshold_ai.contains(f.threshold_ai)));

    std::map<std::string, double> max_ratio;
    for (const auto& r : rows) {
      auto it = max_ratio.find(r.workload);
      if (it == max_ratio.end() || r.ratio > it->second) max_ratio[r.workload] = r.ratio;
    }
    for (const auto& r : rows) {
      if (r.ratio != max_ratio[r.workload]) continue;
      auto band = bands.efficiency_at_max_ratio.find(r.workload);
      std::string head = fmt::format("{} policy={} ratio={} ai={}", r.workload, r.policy, format_number(r.ratio),
                                     r.error.empty() ? format_number(r.ai) : "-");
      if (!r.error.empty()) {
        bool banded = band != bands.efficiency_at_max_ratio.end();
        out << fmt::format("{} error={}{}\n", head, r.error, banded ? std::string(" ") + verdict(false) : "");
        continue;
      }
      if (band == bands.efficiency_at_max_ratio.end()) {
        out << fmt::format("{} efficiency={}\n", head, format_number(r.eff));
      } else {
        out << fmt::format("{} efficiency={} {} {}\n", head, format_number(r.eff), band_text(band->second),
                           verdict(band->second.contains(r.eff)));
      }
    }
    return all_pass ? kExitOk : kExitBandFailure;
  });
}

int main(int argc, char** argv) {
  CLI::App app{"tiersim: trace-driven two-tier memory simulator"};
  app.require_subcommand(1);
  Options opt;
  std::string out_dir;
  std::uint64_t seed = 0;
  auto* out_flag = app.add_option("--out", out_dir, "Output directory (overrides the config)");
  app.add_option("--jobs", opt.jobs, "Parallel sweep points (0 = all cores)");
  auto* seed_flag = app.add_option("--seed", seed, "Seed for random workloads (overrides the config)");

  std::string run_cfg, sweep_cfg, report_csv, bands;
  auto* run = app.add_subcommand("run", "Simulate one configuration");
  run->add_option("config", run_cfg, "Run config (JSON)")->required();
  auto* sweep = app.add_subcommand("sweep", "Run a footprint-ratio x AI sweep");
  sweep->add_option("config", sweep_cfg, "Sweep config (JSON)")->required();
  auto* report = app.add_subcommand("report", "Check a sweep CSV against expectation bands");
  report->add_option("csv", report_csv, "Sweep CSV")->required();
  auto* bands_flag = report->add_option("--bands", bands, "Bands config (JSON)");
  // Global flags may also follow the subcommand.
  for (auto* sub : {run, sweep, report}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }
  if (*out_flag) opt.out = out_dir;
  if (*seed_flag) opt.seed = seed;

  if (*run) return cmd_run(run_cfg, opt, std::cout, std::cerr);
  if (*sweep) return cmd_sweep(sweep_cfg, opt, std::cout, std::cerr);
  std::optional<std::string> b;
  if (*bands_flag) b = bands;
  return cmd_report(report_csv, b, std::cout, std::cerr);
}

}  // namespace tiersim::cli
