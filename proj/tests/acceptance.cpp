// Acceptance suite: one pass/fail line per criterion, wall time included.
#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#include "seqprice/verify.hpp"

namespace {

constexpr std::uint64_t kSeed = 20240811;

int g_failures = 0;

void report(int number, const std::string& label, bool ok, double seconds,
            const std::string& detail) {
  std::printf("[%s] criterion %2d: %s (%.1fs) -- %s\n", ok ? "PASS" : "FAIL",
              number, label.c_str(), seconds, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++g_failures;
}

template <typename Fn>
void run_one(int number, const std::string& label, Fn fn) {
  auto start = std::chrono::steady_clock::now();
  seqprice::verify::Check c;
  try {
    c = fn();
  } catch (const std::exception& e) {
    c.ok = false;
    c.detail = std::string("exception: ") + e.what();
  }
  double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  report(number, label, c.ok, seconds, c.detail);
}

template <typename Fn>
void run_many(int number, const std::string& label, Fn fn) {
  auto start = std::chrono::steady_clock::now();
  bool ok = true;
  std::string detail;
  try {
    std::vector<seqprice::verify::Check> checks = fn();
    for (const auto& c : checks) {
      ok = ok && c.ok;
      if (!detail.empty()) detail += " | ";
      detail += (c.ok ? "" : "FAIL ") + c.name + ": " + c.detail;
    }
  } catch (const std::exception& e) {
    ok = false;
    detail = std::string("exception: ") + e.what();
  }
  double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  report(number, label, ok, seconds, detail);
}

}  // namespace

int main() {
  using namespace seqprice::verify;
  std::printf("acceptance suite (seed %llu)\n",
              static_cast<unsigned long long>(kSeed));

  run_one(1, "hull sampler guarantees on 200 random inputs",
          [] { return hull_random(kSeed, 200, 8); });
  run_one(2, "hull sampler exact recovery on 100 GS-style inputs",
          [] { return hull_gs_exact(kSeed, 100); });
  run_one(3, "subadditive RRS bound on 100 instances",
          [] { return rrs_subadditive(kSeed, 100); });
  run_one(4, "GS 1-RRS / e-(e-1) OCRS / exact decomposition on 100 instances",
          [] { return gs_rrs_and_ocrs(kSeed, 100); });
  run_one(5, "GS end-to-end halving on 20 solved instances x 1e5 trials",
          [] { return gs_end_to_end(kSeed, 20, 100000); });
  run_one(6, "availability >= 1/2 over 1e4 trials",
          [] { return availability(kSeed, 10000); });
  run_many(7, "XOS lower bound (m=256)", [] { return xos_lb_suite(kSeed); });
  run_many(8, "monotone lower bound (ell in {2,3,5,7})",
           [] { return monotone_lb_suite(kSeed, 10000); });
  run_many(9, "RRS lower bound (m in {10,17,26})",
           [] { return rrs_lb_suite(kSeed); });
  run_many(10, "end-to-end pipeline ratios (m in {2,4,6})",
           [] { return pipeline_report(kSeed, 2000); });
  run_one(11, "demand oracle ground truth on 1000 pairs",
          [] { return demand_ground_truth(kSeed, 1000); });

  if (g_failures == 0) {
    std::printf("acceptance: all criteria passed\n");
    return 0;
  }
  std::printf("acceptance: %d criteria FAILED\n", g_failures);
  return 1;
}
