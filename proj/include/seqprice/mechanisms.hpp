#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "seqprice/core.hpp"
#include "seqprice/exante.hpp"
#include "seqprice/ocrs.hpp"
#include "seqprice/rng.hpp"

namespace seqprice {

struct Instance {
  int m = 0;
  std::vector<BuyerDistribution> buyers;

  int buyer_count() const { return static_cast<int>(buyers.size()); }
};

struct BuyerRecord {
  ItemSet available;
  ItemPricing offered;
  ItemSet purchased;
  double payment = 0.0;
};

struct Transcript {
  std::vector<BuyerRecord> buyers;
  double revenue = 0.0;
};

// Ex post feasibility: S_1 = [m], B_i subset of S_i, S_{i+1} = S_i \ B_i,
// payment consistency.  Throws on violation.
void validate_transcript(const Instance& instance, const Transcript& t);

// Price bands around the ex ante objective: S = [0, Obj/m^2),
// M = [Obj/m^2, 8 m^2 Obj], L = (8 m^2 Obj, inf).
struct PriceBands {
  double obj = 0.0;
  int m = 1;

  enum class Band { small, medium, large };
  Band band_of(double price) const;
  ItemSet medium_items(const ItemPricing& p) const;
};

// High-branch pricing: halve large prices, lift the rest to at least 2 m Obj.
ItemPricing high_price_pricing(const ItemPricing& p, double obj, int m);

enum class MechanismKind { ocrs_seq, subadd, gs, mono_n, mono_m2 };

std::string to_string(MechanismKind kind);
MechanismKind mechanism_from_string(const std::string& name);

struct RunnerOptions {
  RrsKind rrs = RrsKind::subadditive;  // RRS used by the OCRS-sequential runner
  int gs_exact_buyer_limit = 3;        // exact availability recursion up to here
  int gs_presample_count = 100000;     // Monte Carlo availability beyond it
  std::uint64_t gs_presample_seed = 0x5e9u;
};

class MechanismRunner {
 public:
  virtual ~MechanismRunner() = default;
  virtual Transcript run(Rng& rng) = 0;
};

std::unique_ptr<MechanismRunner> make_runner(MechanismKind kind,
                                             const Instance& instance,
                                             const ExAnteSolution& exante,
                                             const RunnerOptions& opts = {});

// One-shot runs of each mechanism (single transcripts, seeded).
Transcript run_ocrs_sequential(const Instance&, const ExAnteSolution&, std::uint64_t seed);
Transcript run_subadditive_mechanism(const Instance&, const ExAnteSolution&, std::uint64_t seed);
Transcript run_gs_mechanism(const Instance&, const ExAnteSolution&, std::uint64_t seed);
Transcript run_monotone_n_approx(const Instance&, const ExAnteSolution&, std::uint64_t seed);
Transcript run_monotone_m2_approx(const Instance&, const ExAnteSolution&, std::uint64_t seed);

// Precomputed state of the GS mechanism: per-buyer availability
// distributions (exact recursion for few buyers, presampled otherwise) and
// the per-(buyer, pricing) decompositions with their exact revenues.
struct GsPlan {
  std::vector<SetDistribution> availability;
  std::vector<std::vector<RandomPricing>> decomposition;
  std::vector<double> expected_revenue;
  bool exact = true;
};

GsPlan build_gs_plan(const Instance&, const ExAnteSolution&, const RunnerOptions& = {});

struct MonteCarloResult {
  double mean = 0.0;
  double std_err = 0.0;
  long trials = 0;
  std::vector<double> per_buyer_mean;
  std::vector<double> per_buyer_std_err;
  std::vector<std::vector<double>> availability;  // empirical Pr[j in S_i]
  // Fraction of trials in which buyer i saw a finite offer; 1 minus this is
  // the composed skip rate (branch coins, skip coins, empty-set weights).
  std::vector<double> offer_rate;
  std::vector<double> per_trial;  // kept when requested
};

// Independent seeded trials with substream RNGs; every transcript is
// feasibility-checked.
MonteCarloResult monte_carlo(MechanismRunner& runner, const Instance& instance,
                             long trials, std::uint64_t seed,
                             bool keep_per_trial = false);

}  // namespace seqprice
