#pragma once

// Structured pass/fail results shared by every check.

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace refine {

struct CheckReport {
  std::string name;
  std::string anchor;
  std::size_t attempted = 0;
  std::size_t passed = 0;
  std::size_t failed = 0;
  std::size_t skipped = 0;
  std::optional<std::string> counterexample;  // first failure, fully printed
  std::vector<std::string> skip_reasons;      // distinct, in first-seen order
  std::vector<std::string> notes;             // recorded data, not pass/fail
  double seconds = 0.0;

  CheckReport() = default;
  CheckReport(std::string n, std::string a) : name(std::move(n)), anchor(std::move(a)) {}

  bool ok() const noexcept { return failed == 0; }

  void pass() {
    ++attempted;
    ++passed;
  }
  void fail(std::string instance) {
    ++attempted;
    ++failed;
    if (!counterexample) counterexample = std::move(instance);
  }
  void skip(std::string reason) {
    ++attempted;
    ++skipped;
    for (const auto& r : skip_reasons)
      if (r == reason) return;
    skip_reasons.push_back(std::move(reason));
  }
  void note(std::string n) { notes.push_back(std::move(n)); }
  /// Pass iff `cond`; the instance text is only built on failure.
  template <class Describe>
  void expect(bool cond, Describe&& describe) {
    if (cond)
      pass();
    else
      fail(describe());
  }
  /// Folds the counts, first counterexample, skip reasons and notes of `sub`.
  void absorb(const CheckReport& sub);
};

std::string format_report(const CheckReport& r, bool with_timing);

/// Runs body(0..n-1) on up to `jobs` threads; the first exception by index is
/// rethrown after all threads finish.
void parallel_for(std::size_t n, unsigned jobs, const std::function<void(std::size_t)>& body);
/// Runs body(i) for i < n on up to `jobs` threads and absorbs the results
/// into `into` in index order.
void absorb_indexed(CheckReport& into, std::size_t n, unsigned jobs,
                    const std::function<CheckReport(std::size_t)>& body);

}  // namespace refine
