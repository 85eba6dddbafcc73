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

#include "tiersim/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "tiersim/errors.hpp"
#include "tiersim/units.hpp"

namespace tiersim {

using nlohmann::json;

namespace {

// Typed access to one JSON object that remembers which keys were read, so
// finish() can reject the rest.
class Obj {
 public:
  Obj(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j.is_object()) throw ConfigError(label() + " must be an object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  const json& raw(const std::string& key) {
    used_.insert(key);
    return j_.at(key);
  }

  std::string where(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  Obj child(const std::string& key) { return Obj(raw(key), where(key)); }

  void number(const std::string& key, double& out) {
    if (!has(key)) return;
    const json& v = raw(key);
    if (!v.is_number()) throw ConfigError(where(key) + " must be a number");
    out = v.get<double>();
    if (!std::isfinite(out)) throw ConfigError(where(key) + " must be finite");
  }

  template <typename T>
  void integer(const std::string& key, T& out) {
    if (!has(key)) return;
    const json& v = raw(key);
    if (v.is_number_unsigned()) {
      auto u = v.get<std::uint64_t>();
      if (u > std::numeric_limits<T>::max()) throw ConfigError(where(key) + " is too large");
      out = static_cast<T>(u);
      return;
    }
    if (v.is_number_float()) {
      double d = v.get<double>();
      if (d >= 0 && std::floor(d) == d && d <= static_cast<double>(std::numeric_limits<T>::max())) {
        out = static_cast<T>(d);
        return;
      }
    }
    throw ConfigError(where(key) + " must be a non-negative integer");
  }

  void boolean(const std::string& key, bool& out) {
    if (!has(key)) return;
    const json& v = raw(key);
    if (!v.is_boolean()) throw ConfigError(where(key) + " must be true or false");
    out = v.get<bool>();
  }

  void string(const std::string& key, std::string& out) {
    if (!has(key)) return;
    const json& v = raw(key);
    if (!v.is_string()) throw ConfigError(where(key) + " must be a string");
    out = v.get<std::string>();
  }

  // A quantity given either as a number in base units or as a unit string.
  template <typename Parse>
  void quantity(const std::string& key, double& out, Parse parse) {
    if (!has(key)) return;
    const json& v = raw(key);
    if (v.is_number()) {
      out = v.get<double>();
    } else if (v.is_string()) {
      try {
        out = parse(v.get<std::string>());
      } catch (const ConfigError& e) {
        throw ConfigError(where(key) + ": " + e.what());
      }
    } else {
      throw ConfigError(where(key) + " must be a number or a unit string");
    }
  }

  void bytes(const std::string& key, std::uint64_t& out) {
    if (!has(key)) return;
    const json& v = raw(key);
    if (v.is_string()) {
      try {
        out = units::parse_byte_count(v.get<std::string>());
      } catch (const ConfigError& e) {
        throw ConfigError(where(key) + ": " + e.what());
      }
      return;
    }
    used_.erase(key);
    integer(key, out);
  }

  void finish() const {
    for (const auto& [k, v] : j_.items()) {
      if (!used_.contains(k)) throw ConfigError("unknown key '" + where(k) + "'");
    }
  }

 private:
  std::string label() const { return path_.empty() ? "config" : path_; }

  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

std::vector<double> number_list(Obj& o, const std::string& key) {
  const json& v = o.raw(key);
  if (!v.is_array()) throw ConfigError(o.where(key) + " must be an array of numbers");
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number()) throw ConfigError(o.where(key) + " must be an array of numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

void read_tier(Obj o, TierSpec& t) {
  o.string("name", t.name);
  o.bytes("capacity", t.capacity);
  o.quantity("read_bandwidth", t.read_bandwidth, units::parse_bandwidth);
  o.quantity("write_bandwidth", t.write_bandwidth, units::parse_bandwidth);
  o.quantity("access_latency", t.access_latency, units::parse_duration);
  o.finish();
}

void read_numa(Obj o, NumaSpec& n) {
  o.integer("sockets", n.sockets);
  o.quantity("cross_link_bandwidth", n.cross_link_bandwidth, units::parse_bandwidth);
  if (o.has("write_placement")) {
    std::string s;
    o.string("write_placement", s);
    n.write_placement = write_placement_from_string(s);
  }
  o.finish();
}

void read_system(Obj o, SystemSpec& s, NumaSpec& numa) {
  if (o.has("fast")) read_tier(o.child("fast"), s.fast);
  if (o.has("slow")) read_tier(o.child("slow"), s.slow);
  o.bytes("page_size", s.page_size);
  o.integer("threads", s.threads);
  o.integer("cores", s.cores);
  o.quantity("per_core_compute", s.per_core_compute, units::parse_flop_rate);
  o.number("reserved_fraction", s.reserved_fraction);
  if (o.has("numa")) read_numa(o.child("numa"), numa);
  o.finish();
}

PolicyConfig read_policy(Obj o) {
  PolicyConfig p;
  std::string name = "sequential";
  o.string("name", name);
  p.kind = policy_kind_from_string(name);
  o.integer("depth", p.depth);
  o.finish();
  return p;
}

std::vector<PolicyConfig> read_policies(Obj& root) {
  if (root.has("policy") && root.has("policies")) throw ConfigError("give either 'policy' or 'policies', not both");
  if (root.has("policy")) return {read_policy(root.child("policy"))};
  if (!root.has("policies")) return {PolicyConfig{PolicyKind::sequential, 8}};
  const json& arr = root.raw("policies");
  if (!arr.is_array() || arr.empty()) throw ConfigError("policies must be a non-empty array");
  std::vector<PolicyConfig> out;
  for (std::size_t i = 0; i < arr.size(); ++i) out.push_back(read_policy(Obj(arr[i], "policies[" + std::to_string(i) + "]")));
  return out;
}

SystemSpec with_numa(SystemSpec s, bool on, const NumaSpec& params) {
  s.numa.reset();
  if (on) s.numa = params;
  return s;
}

// Family knobs shared by run and sweep workloads.
struct Knobs {
  std::uint32_t degree = 0;
  std::uint64_t tile = 0;
  double ai = 0.0;
  workloads::Streams streams = workloads::Streams::one;
  workloads::StreamKernel kernel = workloads::StreamKernel::copy;
  std::uint32_t element_size = 8;
  std::uint64_t chunk = 0;
  std::uint64_t touches = 0;
  std::uint64_t touch_bytes = 4096;
};

// Keys each family accepts besides family/footprint_ratio/threads.
std::set<std::string> knob_keys(Family f, bool sweep) {
  switch (f) {
    case Family::polynomial: return sweep ? std::set<std::string>{"streams", "chunk"}
                                          : std::set<std::string>{"degree", "streams", "chunk", "elements"};
    case Family::stream: return sweep ? std::set<std::string>{"kernel", "chunk"}
                                      : std::set<std::string>{"kernel", "chunk", "elements"};
    case Family::gemm: return sweep ? std::set<std::string>{"element_size"}
                                    : std::set<std::string>{"tile", "element_size", "n"};
    case Family::lu_naive: return sweep ? std::set<std::string>{} : std::set<std::string>{"n"};
    case Family::lu_tiled: return sweep ? std::set<std::string>{} : std::set<std::string>{"tile", "n"};
    case Family::fft3d: return sweep ? std::set<std::string>{} : std::set<std::string>{"n"};
    case Family::random: return sweep ? std::set<std::string>{"touches", "touch_bytes"}
                                      : std::set<std::string>{"ai", "touches", "touch_bytes", "footprint"};
  }
  return {};
}

void read_knobs(Obj& o, const std::set<std::string>& allowed, Knobs& k) {
  auto ok = [&](const char* key) { return allowed.contains(key) && o.has(key); };
  if (ok("degree")) o.integer("degree", k.degree);
  if (ok("tile")) o.integer("tile", k.tile);
  if (ok("ai")) o.number("ai", k.ai);
  if (ok("streams")) {
    std::string s;
    o.string("streams", s);
    k.streams = workloads::streams_from_string(s);
  }
  if (ok("kernel")) {
    std::string s;
    o.string("kernel", s);
    k.kernel = workloads::stream_kernel_from_string(s);
  }
  if (ok("element_size")) o.integer("element_size", k.element_size);
  if (ok("chunk")) o.bytes("chunk", k.chunk);
  if (ok("touches")) o.integer("touches", k.touches);
  if (ok("touch_bytes")) o.bytes("touch_bytes", k.touch_bytes);
}

Family read_family(Obj& o) {
  if (!o.has("family")) throw ConfigError("missing key '" + o.where("family") + "'");
  std::string f;
  o.string("family", f);
  return family_from_string(f);
}

WorkloadConfig read_workload(Obj o) {
  WorkloadConfig w;
  w.family = read_family(o);
  auto allowed = knob_keys(w.family, false);
  Knobs k;
  read_knobs(o, allowed, k);
  w.degree = k.degree;
  w.tile = k.tile;
  w.ai = k.ai;
  w.streams = k.streams;
  w.kernel = k.kernel;
  w.element_size = k.element_size;
  w.chunk = k.chunk;
  w.touches = k.touches;
  w.touch_bytes = k.touch_bytes;
  o.integer("threads", w.threads);
  if (o.has("footprint_ratio")) {
    double r = 0;
    o.number("footprint_ratio", r);
    if (!(r > 0)) throw ConfigError(o.where("footprint_ratio") + " must be > 0");
    w.footprint_ratio = r;
  }
  const char* size_key = nullptr;
  for (const char* key : {"elements", "n", "footprint"}) {
    if (allowed.contains(key)) size_key = key;
  }
  if (size_key && o.has(size_key)) {
    if (w.footprint_ratio) throw ConfigError(o.where(size_key) + " conflicts with footprint_ratio");
    std::string key = size_key;
    if (key == "elements") o.integer("elements", w.elements);
    if (key == "n") o.integer("n", w.n);
    if (key == "footprint") o.bytes("footprint", w.footprint);
  } else if (!w.footprint_ratio) {
    throw ConfigError("workload needs footprint_ratio or '" + o.where(size_key ? size_key : "n") + "'");
  }
  o.finish();
  return w;
}

SweepWorkload read_sweep_workload(Obj o) {
  SweepWorkload sw;
  sw.spec.family = read_family(o);
  Knobs k;
  read_knobs(o, knob_keys(sw.spec.family, true), k);
  sw.spec.streams = k.streams;
  sw.spec.kernel = k.kernel;
  sw.spec.element_size = k.element_size;
  sw.spec.chunk = k.chunk;
  sw.spec.touches = k.touches;
  sw.spec.touch_bytes = k.touch_bytes;
  if (o.has("ai_parameters")) sw.ai_parameters = number_list(o, "ai_parameters");
  o.finish();
  return sw;
}

json tier_json(const TierSpec& t) {
  return json{{"name", t.name},
              {"capacity", t.capacity},
              {"read_bandwidth", t.read_bandwidth},
              {"write_bandwidth", t.write_bandwidth},
              {"access_latency", t.access_latency}};
}

json numa_json(const NumaSpec& n) {
  return json{{"sockets", n.sockets},
              {"cross_link_bandwidth", n.cross_link_bandwidth},
              {"write_placement", to_string(n.write_placement)}};
}

json system_json(const SystemSpec& s, const NumaSpec& numa) {
  json j = to_json(s);
  j["numa"] = numa_json(numa);
  return j;
}

json policy_json(const PolicyConfig& p) { return json{{"name", to_string(p.kind)}, {"depth", p.depth}}; }

void validate_policy(const PolicyConfig& p) {
  if (p.kind != PolicyKind::none && p.depth == 0) throw ConfigError("policy.depth must be >= 1");
}

json parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
  }
}

}  // namespace

SystemSpec RunConfig::effective_system() const { return with_numa(system, numa, numa_params); }
SystemSpec SweepConfig::effective_system() const { return with_numa(system, numa, numa_params); }

RunConfig parse_run_config(const json& j) {
  RunConfig c;
  Obj root(j, "");
  if (root.has("system")) read_system(root.child("system"), c.system, c.numa_params);
  root.boolean("numa", c.numa);
  if (!root.has("workload")) throw ConfigError("missing key 'workload'");
  c.workload = read_workload(root.child("workload"));
  auto policies = read_policies(root);
  if (policies.size() != 1) throw ConfigError("run takes exactly one policy");
  c.policy = policies.front();
  if (root.has("mode")) {
    std::string m;
    root.string("mode", m);
    c.mode = sim_mode_from_string(m);
  }
  root.boolean("warmup", c.warmup);
  root.integer("seed", c.seed);
  root.string("output", c.output);
  root.string("save_trace", c.save_trace);
  root.finish();

  validate(c.effective_system(), c.mode == SimMode::tiered);
  validate_policy(c.policy);
  return c;
}

SweepConfig parse_sweep_config(const json& j) {
  SweepConfig c;
  Obj root(j, "");
  if (root.has("system")) read_system(root.child("system"), c.system, c.numa_params);
  root.boolean("numa", c.numa);
  if (root.has("workload") && root.has("workloads")) throw ConfigError("give either 'workload' or 'workloads', not both");
  if (root.has("workload")) {
    c.workloads.push_back(read_sweep_workload(root.child("workload")));
  } else if (root.has("workloads")) {
    const json& arr = root.raw("workloads");
    if (!arr.is_array()) throw ConfigError("workloads must be an array");
    for (std::size_t i = 0; i < arr.size(); ++i)
      c.workloads.push_back(read_sweep_workload(Obj(arr[i], "workloads[" + std::to_string(i) + "]")));
  }
  if (c.workloads.empty()) throw ConfigError("missing key 'workload'");
  if (!root.has("grid")) throw ConfigError("missing key 'grid'");
  {
    Obj g = root.child("grid");
    if (!g.has("footprint_ratios")) throw ConfigError("missing key 'grid.footprint_ratios'");
    c.grid.footprint_ratios = number_list(g, "footprint_ratios");
    if (g.has("ai_parameters")) c.grid.ai_parameters = number_list(g, "ai_parameters");
    g.integer("threads", c.grid.threads);
    g.finish();
  }
  c.policies = read_policies(root);
  root.boolean("warmup", c.grid.warmup);
  root.integer("seed", c.seed);
  root.string("output", c.output);
  root.finish();

  if (c.grid.footprint_ratios.empty()) throw ConfigError("grid.footprint_ratios must not be empty");
  for (double r : c.grid.footprint_ratios)
    if (!(r > 0)) throw ConfigError("grid.footprint_ratios entries must be > 0");
  if (c.grid.ai_parameters.empty()) throw ConfigError("grid.ai_parameters must not be empty");
  for (auto& w : c.workloads) {
    if (w.ai_parameters && w.ai_parameters->empty()) throw ConfigError("workload ai_parameters must not be empty");
    w.spec.seed = c.seed;
  }
  validate(c.effective_system(), true);
  for (const auto& p : c.policies) validate_policy(p);
  return c;
}

RunConfig load_run_config(const std::string& path) { return parse_run_config(parse_file(path)); }
SweepConfig load_sweep_config(const std::string& path) { return parse_sweep_config(parse_file(path)); }

json to_json(const SystemSpec& s) {
  json j{{"fast", tier_json(s.fast)},
         {"slow", tier_json(s.slow)},
         {"page_size", s.page_size},
         {"threads", s.threads},
         {"cores", s.cores},
         {"per_core_compute", s.per_core_compute},
         {"reserved_fraction", s.reserved_fraction}};
  if (s.numa) j["numa"] = numa_json(*s.numa);
  return j;
}

json to_json(const RunConfig& c) {
  const WorkloadConfig& w = c.workload;
  json wj{{"family", to_string(w.family)}};
  if (w.threads) wj["threads"] = w.threads;
  if (w.footprint_ratio) wj["footprint_ratio"] = *w.footprint_ratio;
  auto keys = knob_keys(w.family, false);
  auto put = [&](const char* key, json v) {
    if (keys.contains(key)) wj[key] = std::move(v);
  };
  put("degree", w.degree);
  put("tile", w.tile);
  put("ai", w.ai);
  put("streams", workloads::to_string(w.streams));
  put("kernel", workloads::to_string(w.kernel));
  put("element_size", w.element_size);
  put("chunk", w.chunk);
  put("touches", w.touches);
  put("touch_bytes", w.touch_bytes);
  if (!w.footprint_ratio) {
    put("elements", w.elements);
    put("n", w.n);
    put("footprint", w.footprint);
  }
  json j{{"system", system_json(c.system, c.numa_params)},
         {"numa", c.numa},
         {"workload", wj},
         {"policy", policy_json(c.policy)},
         {"mode", to_string(c.mode)},
         {"warmup", c.warmup},
         {"seed", c.seed},
         {"output", c.output}};
  if (!c.save_trace.empty()) j["save_trace"] = c.save_trace;
  return j;
}

json to_json(const SweepConfig& c) {
  json ws = json::array();
  for (const auto& w : c.workloads) {
    json wj{{"family", to_string(w.spec.family)}};
    auto keys = knob_keys(w.spec.family, true);
    auto put = [&](const char* key, json v) {
      if (keys.contains(key)) wj[key] = std::move(v);
    };
    put("streams", workloads::to_string(w.spec.streams));
    put("kernel", workloads::to_string(w.spec.kernel));
    put("element_size", w.spec.element_size);
    put("chunk", w.spec.chunk);
    put("touches", w.spec.touches);
    put("touch_bytes", w.spec.touch_bytes);
    if (w.ai_parameters) wj["ai_parameters"] = *w.ai_parameters;
    ws.push_back(wj);
  }
  json policies = json::array();
  for (const auto& p : c.policies) policies.push_back(policy_json(p));
  return json{{"system", system_json(c.system, c.numa_params)},
              {"numa", c.numa},
              {"workloads", ws},
              {"grid",
               {{"footprint_ratios", c.grid.footprint_ratios},
                {"ai_parameters", c.grid.ai_parameters},
                {"threads", c.grid.threads}}},
              {"policies", policies},
              {"warmup", c.grid.warmup},
              {"seed", c.seed},
              {"output", c.output}};
}

Trace build_trace(const RunConfig& c) {
  const SystemSpec s = c.effective_system();
  const WorkloadConfig& w = c.workload;
  const std::uint32_t threads = w.threads ? w.threads : s.threads;
  if (w.footprint_ratio) {
    FamilySpec spec;
    spec.family = w.family;
    spec.streams = w.streams;
    spec.kernel = w.kernel;
    spec.element_size = w.element_size;
    spec.chunk = w.chunk;
    spec.touches = w.touches;
    spec.touch_bytes = w.touch_bytes;
    spec.seed = c.seed;
    double ai_param = 0.0;
    if (w.family == Family::polynomial) ai_param = w.degree;
    if (w.family == Family::gemm || w.family == Family::lu_tiled) ai_param = static_cast<double>(w.tile);
    if (w.family == Family::random) ai_param = w.ai;
    return make_family_trace(spec, *w.footprint_ratio, ai_param, threads, s);
  }
  switch (w.family) {
    case Family::polynomial:
      return workloads::gen_polynomial({w.elements, w.degree, w.streams, threads, w.chunk ? w.chunk : 16 * s.page_size});
    case Family::stream:
      return workloads::gen_stream({w.kernel, w.elements, threads, w.chunk ? w.chunk : 16 * s.page_size});
    case Family::gemm: return workloads::gen_gemm_tiled({w.n, w.tile, w.element_size, threads});
    case Family::lu_naive: return workloads::gen_lu({w.n, workloads::LuVariant::naive, 0, threads});
    case Family::lu_tiled: return workloads::gen_lu({w.n, workloads::LuVariant::tiled, w.tile, threads});
    case Family::fft3d: return workloads::gen_fft3d({w.n, threads});
    case Family::random: {
      std::uint64_t touches = w.touches ? w.touches : w.footprint / std::max<std::uint64_t>(w.touch_bytes, 1);
      return workloads::gen_random({w.footprint, touches, w.touch_bytes, w.ai, threads, c.seed});
    }
  }
  throw ConfigError("unknown workload family");
}

ReportBands parse_bands(const json& j) {
  ReportBands b;
  Obj root(j, "");
  auto band = [&](Obj& o, const std::string& key, Band& out) {
    if (!o.has(key)) return;
    auto v = number_list(o, key);
    if (v.size() != 2 || v[0] > v[1]) throw ConfigError(o.where(key) + " must be [lo, hi] with lo <= hi");
    out = Band{v[0], v[1]};
  };
  band(root, "floor", b.floor);
  band(root, "knee_ai", b.knee_ai);
  band(root, "threshold_ai", b.threshold_ai);
  if (root.has("efficiency_at_max_ratio")) {
    Obj e = root.child("efficiency_at_max_ratio");
    for (const auto& [k, v] : root.raw("efficiency_at_max_ratio").items()) {
      Band bb;
      band(e, k, bb);
      b.efficiency_at_max_ratio[k] = bb;
    }
    e.finish();
  }
  root.finish();
  return b;
}

ReportBands load_bands(const std::string& path) { return parse_bands(parse_file(path)); }

}  // namespace tiersim
