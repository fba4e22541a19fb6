#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace seqprice::verify {

struct Check {
  std::string name;
  bool ok = false;
  std::string detail;
};

// Hull sampler on random inputs with the oracle assumptions enforced:
// distribution property, domination by w, (1-1/e) mass retention.
Check hull_random(std::uint64_t seed, int count = 200, int k_max = 8);

// Stronger inputs (y^T_j >= w_j on T): zero residual and exact recovery.
Check hull_gs_exact(std::uint64_t seed, int count = 100);

// Subadditive scaling RRS: exact expected revenue meets the 1/(2 ln(2 m G'))
// bound; the power-of-two scheme passes verify_rrs at 4 log2(2 m G').
Check rrs_subadditive(std::uint64_t seed, int count = 100);

// GS identity RRS at alpha 1; reduction output at e/(e-1); exact
// decomposition at alpha 1.
Check gs_rrs_and_ocrs(std::uint64_t seed, int count = 100);

// Sequential GS mechanism halves each buyer's ex ante revenue, exactly in
// expectation and within 3 standard errors under Monte Carlo.
Check gs_end_to_end(std::uint64_t seed, int instances = 20, long trials = 100000);

// Every item stays available with empirical probability >= 1/2 - 3 stderr.
Check availability(std::uint64_t seed, long trials = 10000);

// XOS lower-bound family: exact utility ties, exact ex ante value m, and
// analytic-vs-exhaustive oracle agreement in validation mode.
std::vector<Check> xos_lb_suite(std::uint64_t seed);

// Monotone lower-bound family: good-collection structure, solver value,
// and the one-sale revenue cap under every mechanism.
std::vector<Check> monotone_lb_suite(std::uint64_t seed, long trials = 10000);

// RRS lower-bound family at m in {10, 17, 26}: closed-form identities,
// forced demand sets, and the structured-grid revenue cap.
std::vector<Check> rrs_lb_suite(std::uint64_t seed);

// End-to-end pipeline on random subadditive instances: feasible transcripts,
// verifier passes, finite recorded ratios.
std::vector<Check> pipeline_report(std::uint64_t seed, long trials = 2000);

// demand() against the exhaustive oracle across all kinds.
Check demand_ground_truth(std::uint64_t seed, int pairs = 1000);

}  // namespace seqprice::verify
