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

#include <algorithm>
#include <unordered_set>

#include "tiersim/engine.hpp"
#include "tiersim/errors.hpp"

namespace tiersim {

PageLayout::PageLayout(const std::vector<Region>& regions, std::uint64_t page_size) : page_size_(page_size) {
  for (const auto& r : regions) {
    PageId pages = (r.size + page_size - 1) / page_size;
    ranges_[r.id] = PageRange{total_pages_, total_pages_ + pages};
    total_pages_ += pages;
  }
}

void expand_run(const AccessRun& run, const PageLayout& layout, std::vector<PageTouch>& out) {
  const std::uint64_t ps = layout.page_size();
  const PageId base = layout.first_page(run.region);
  const bool write = run.kind == AccessKind::write;
  const std::size_t run_start = out.size();
  for (std::uint64_t s = 0; s < run.count; ++s) {
    std::uint64_t pos = run.offset + s * run.stride;
    const std::uint64_t end = pos + run.length;
    while (pos < end) {
      const std::uint64_t in_region = pos / ps;
      const std::uint64_t next = std::min(end, (in_region + 1) * ps);
      const PageId page = base + in_region;
      if (out.size() > run_start && out.back().page == page) {
        out.back().bytes += next - pos;
      } else {
        out.push_back(PageTouch{page, next - pos, write, run.region});
      }
      pos = next;
    }
  }
}

std::uint64_t count_page_touches(const Trace& trace, std::uint64_t page_size) {
  PageLayout layout(trace.regions, page_size);
  std::vector<PageTouch> buf;
  std::uint64_t n = 0;
  for (const auto& b : trace.blocks) {
    for (const auto& r : b.runs) {
      buf.clear();
      expand_run(r, layout, buf);
      n += buf.size();
    }
  }
  return n;
}

CacheState warmup(const Trace& trace, const SystemSpec& system) {
  PageLayout layout(trace.regions, system.page_size);
  CacheState cache(system.cache_pages());
  std::unordered_set<PageId> seen;
  std::vector<PageTouch> buf;
  for (const auto& b : trace.blocks) {
    for (const auto& r : b.runs) {
      buf.clear();
      expand_run(r, layout, buf);
      for (const auto& t : buf) {
        if (seen.insert(t.page).second) cache.admit(t.page, false);
      }
    }
  }
  return cache;
}

}  // namespace tiersim
