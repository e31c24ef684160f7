// Prints one line per acceptance criterion and exits non-zero if any fails.

#include <chrono>
#include <cstdlib>
#include <cstdio>
#include <functional>
#include <string>

#include "checks.hpp"

namespace {

int failures = 0;

void report(const char* name, const std::function<checks::Result()>& run) {
  const auto start = std::chrono::steady_clock::now();
  checks::Result r;
  try {
    r = run();
  } catch (const std::exception& e) {
    r = checks::Result{false, std::string("uncaught: ") + e.what(), false};
  }
  const auto ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  if (!r.pass) ++failures;
  std::printf("%s %s (%.0f ms): %s\n", r.pass ? "PASS" : "FAIL", name, ms, r.detail.c_str());
  std::fflush(stdout);
}

}  // namespace

int main() {
  std::string command = "c++ -std=c++17 -o {out} {in} && {out}";
  if (const char* env = std::getenv("MARTTA_COMMAND")) command = env;

  report("input-replay", checks::input_replay);
  report("disambiguation-pair", checks::disambiguation);
  report("inheritance-fixture", checks::inheritance);
  checks::FuzzStats fuzz;
  const auto fuzz_start = std::chrono::steady_clock::now();
  fuzz = checks::run_fuzz(1000, 20261014);
  const auto fuzz_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - fuzz_start).count();
  std::printf("     (fuzz: %d sessions, %ld key events, %.0f ms)\n", fuzz.sessions, fuzz.key_events, fuzz_ms);
  report("undo-completeness", [&] { return checks::undo_completeness(fuzz); });
  report("structural-invariant-fuzz", [&] { return checks::structural_fuzz(fuzz); });
  report("precedence-paren-oracle", [] { return checks::precedence_oracle(); });
  report("placeholder-typing-oracle", checks::placeholder_oracle);
  report("composite-fixpoint", checks::composite_fixpoint);
  report("golden-fib", [&] { return checks::golden_fib(command); });
  report("persistence", [&] { return checks::persistence(fuzz); });
  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
