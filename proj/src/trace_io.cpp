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

#include "tiersim/trace_io.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "tiersim/errors.hpp"

namespace tiersim {
namespace {

void check_text(const std::string& s, const char* what) {
  if (s.find('\n') != std::string::npos || s.find('\r') != std::string::npos)
    throw ConfigError(std::string(what) + " contains a line break");
}

class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  // Next line split into its leading keyword and the remainder.
  std::istringstream expect(const std::string& keyword) {
    std::string line;
    if (!std::getline(in_, line)) fail("unexpected end of trace, wanted '" + keyword + "'");
    ++lineno_;
    std::istringstream ss(line);
    std::string word;
    ss >> word;
    if (word != keyword) fail("expected '" + keyword + "', got '" + word + "'");
    return ss;
  }

  bool peek_is(const std::string& keyword) {
    auto pos = in_.tellg();
    std::string line;
    bool match = false;
    if (std::getline(in_, line)) match = line.rfind(keyword + " ", 0) == 0 || line == keyword;
    in_.clear();
    in_.seekg(pos);
    return match;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ConfigError("trace line " + std::to_string(lineno_) + ": " + msg);
  }

 private:
  std::istream& in_;
  int lineno_ = 0;
};

template <typename T>
T field(std::istringstream& ss, const LineReader& r, const char* what) {
  T v{};
  if (!(ss >> v)) r.fail(std::string("bad ") + what);
  return v;
}

// Remainder of the line after one separating space.
std::string rest(std::istringstream& ss) {
  std::string s;
  if (ss.peek() == ' ') ss.get();
  std::getline(ss, s);
  return s;
}

}  // namespace

void write_trace(std::ostream& out, const Trace& t) {
  check_text(t.meta.name, "trace name");
  out << "tiersim-trace " << kTraceFormatVersion << '\n';
  out << "name " << t.meta.name << '\n';
  for (const auto& [k, v] : t.meta.parameters) {
    check_text(v, "parameter value");
    if (k.empty() || k.find_first_of(" \t\n\r") != std::string::npos)
      throw ConfigError("parameter key '" + k + "' is empty or contains whitespace");
    out << "param " << k << ' ' << v << '\n';
  }
  out << "regions " << t.regions.size() << '\n';
  for (const auto& r : t.regions) {
    check_text(r.label, "region label");
    out << "region " << r.id << ' ' << r.size << ' ' << r.label << '\n';
  }
  out << "blocks " << t.blocks.size() << '\n';
  for (const auto& b : t.blocks) {
    out << "block " << b.thread << ' ' << b.flops << ' ' << b.runs.size() << '\n';
    for (const auto& run : b.runs) {
      out << "run " << run.region << ' ' << run.offset << ' ' << run.length << ' '
          << (run.kind == AccessKind::write ? 'w' : 'r') << ' ' << run.count << ' ' << run.stride << '\n';
    }
  }
  out << "end\n";
}

Trace read_trace(std::istream& in) {
  LineReader r(in);
  Trace t;
  {
    auto ss = r.expect("tiersim-trace");
    int version = field<int>(ss, r, "version");
    if (version != kTraceFormatVersion) r.fail("unsupported trace format version " + std::to_string(version));
  }
  {
    auto ss = r.expect("name");
    t.meta.name = rest(ss);
  }
  while (r.peek_is("param")) {
    auto ss = r.expect("param");
    auto key = field<std::string>(ss, r, "parameter key");
    t.meta.parameters[key] = rest(ss);
  }
  {
    auto ss = r.expect("regions");
    auto n = field<std::size_t>(ss, r, "region count");
    for (std::size_t i = 0; i < n; ++i) {
      auto rs = r.expect("region");
      Region reg;
      reg.id = field<RegionId>(rs, r, "region id");
      reg.size = field<std::uint64_t>(rs, r, "region size");
      reg.label = rest(rs);
      t.regions.push_back(std::move(reg));
    }
  }
  {
    auto ss = r.expect("blocks");
    auto n = field<std::size_t>(ss, r, "block count");
    t.blocks.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      auto bs = r.expect("block");
      WorkBlock b;
      b.thread = field<ThreadId>(bs, r, "thread");
      b.flops = field<std::uint64_t>(bs, r, "flops");
      auto runs = field<std::size_t>(bs, r, "run count");
      for (std::size_t j = 0; j < runs; ++j) {
        auto rs = r.expect("run");
        AccessRun run;
        run.region = field<RegionId>(rs, r, "run region");
        run.offset = field<std::uint64_t>(rs, r, "run offset");
        run.length = field<std::uint64_t>(rs, r, "run length");
        auto kind = field<char>(rs, r, "run kind");
        if (kind != 'r' && kind != 'w') r.fail("run kind must be r or w");
        run.kind = kind == 'w' ? AccessKind::write : AccessKind::read;
        run.count = field<std::uint64_t>(rs, r, "run count");
        run.stride = field<std::uint64_t>(rs, r, "run stride");
        b.runs.push_back(run);
      }
      t.blocks.push_back(std::move(b));
    }
  }
  r.expect("end");
  finalize(t);
  return t;
}

void save_trace(const std::string& path, const Trace& trace) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open '" + path + "' for writing");
  write_trace(out, trace);
  if (!out) throw ConfigError("failed writing '" + path + "'");
}

Trace load_trace(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open trace '" + path + "'");
  return read_trace(in);
}

}  // namespace tiersim
