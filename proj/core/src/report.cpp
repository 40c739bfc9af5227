#include "refine/report.hpp"

#include <algorithm>
#include <cstdio>
#include <exception>
#include <atomic>
#include <sstream>
#include <thread>
#include <vector>

namespace refine {

void CheckReport::absorb(const CheckReport& sub) {
  attempted += sub.attempted;
  passed += sub.passed;
  failed += sub.failed;
  skipped += sub.skipped;
  if (!counterexample && sub.counterexample) {
    counterexample = sub.name.empty() ? *sub.counterexample : sub.name + ": " + *sub.counterexample;
  }
  for (const auto& r : sub.skip_reasons) {
    bool seen = false;
    for (const auto& q : skip_reasons) seen = seen || q == r;
    if (!seen) skip_reasons.push_back(r);
  }
  for (const auto& n : sub.notes) notes.push_back(n);
  seconds += sub.seconds;
}

std::string format_report(const CheckReport& r, bool with_timing) {
  std::ostringstream os;
  os << (r.ok() ? "PASS" : "FAIL") << ' ' << r.name << "  [" << r.anchor << "]\n";
  os << "  attempted " << r.attempted << ", passed " << r.passed << ", failed " << r.failed << ", skipped "
     << r.skipped << '\n';
  for (const auto& s : r.skip_reasons) os << "  skip: " << s << '\n';
  for (const auto& n : r.notes) os << "  note: " << n << '\n';
  if (r.counterexample) os << "  counterexample: " << *r.counterexample << '\n';
  if (with_timing) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", r.seconds);
    os << "  time " << buf << " s\n";
  }
  return os.str();
}

void parallel_for(std::size_t n, unsigned jobs, const std::function<void(std::size_t)>& body) {
  if (jobs <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(n);
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        body(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned k = 0; k < std::min<std::size_t>(jobs, n); ++k) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

void absorb_indexed(CheckReport& into, std::size_t n, unsigned jobs,
                    const std::function<CheckReport(std::size_t)>& body) {
  std::vector<CheckReport> parts(n);
  parallel_for(n, jobs, [&](std::size_t i) { parts[i] = body(i); });
  for (const auto& p : parts) into.absorb(p);
}

}  // namespace refine
