#include <chrono>
#include <cstdio>
#include <functional>
#include <string>

#include <omp.h>

#include "fixlab/arslanov.hpp"
#include "fixlab/stage_sets.hpp"

using namespace fixlab;

namespace {

double seconds(const std::function<void()>& body) {
  const auto start = std::chrono::steady_clock::now();
  body();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void row(const std::string& name, const std::function<bool()>& serial, const std::function<bool()>& parallel) {
  bool a = false, b = false;
  const double ts = seconds([&] { a = serial(); });
  const double tp = seconds([&] { b = parallel(); });
  std::printf("%-34s %9.3f %9.3f %7.2fx  %s\n", name.c_str(), ts, tp, tp > 0 ? ts / tp : 0.0,
              a == b ? "same" : "DIFFERENT");
}

}  // namespace

int main(int argc, char** argv) {
  const Steps stage = argc > 1 ? std::stoull(argv[1]) : 5000;
  std::printf("threads %d, stage %llu\n", omp_get_max_threads(), static_cast<unsigned long long>(stage));
  std::printf("%-34s %9s %9s %8s\n", "kernel", "serial s", "omp s", "speedup");

  StageSet s1, s2;
  row("halting_approx", [&] { s1 = reference::halting_approx(stage); return true; },
      [&] { s2 = halting_approx(stage); return s1 == s2; });
  std::vector<HaltingEntry> e1, e2;
  row("halting_entries", [&] { e1 = reference::halting_entries(stage); return true; },
      [&] { e2 = halting_entries(stage); return e1 == e2; });
  const Nat mu_code = build::mu(build::monus(build::left(), build::right()))->code;
  row("enumerate_domain(mu counter)", [&] { s1 = reference::enumerate_domain(mu_code, stage); return true; },
      [&] { s2 = enumerate_domain(mu_code, stage); return s1 == s2; });
  const Nat fhat = build::left()->code;
  ArslanovRun r1, r2;
  row("run_search(identity approximation)",
      [&] { r1 = reference::run_search(fhat, stage, standard_grid()); return true; },
      [&] { r2 = run_search(fhat, stage, standard_grid()); return r1.candidates == r2.candidates; });
  return 0;
}
