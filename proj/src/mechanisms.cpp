#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "seqprice/mechanisms.hpp"
#include "seqprice/rrs.hpp"

namespace seqprice {

void validate_transcript(const Instance& instance, const Transcript& t) {
  int n = instance.buyer_count();
  if (static_cast<int>(t.buyers.size()) != n)
    throw std::runtime_error("transcript: wrong buyer count");
  ItemSet expected = ItemSet::full(instance.m);
  double revenue = 0.0;
  for (int i = 0; i < n; ++i) {
    const BuyerRecord& r = t.buyers[i];
    if (!(r.available == expected))
      throw std::runtime_error("transcript: availability chain broken at buyer " +
                               std::to_string(i));
    if (!r.purchased.subset_of(r.available))
      throw std::runtime_error("transcript: buyer " + std::to_string(i) +
                               " bought unavailable items");
    double pay = r.offered.total(r.purchased);
    if (std::abs(pay - r.payment) > 1e-7)
      throw std::runtime_error("transcript: payment mismatch at buyer " +
                               std::to_string(i));
    revenue += r.payment;
    expected = expected.subtract(r.purchased);
  }
  if (std::abs(revenue - t.revenue) > 1e-7)
    throw std::runtime_error("transcript: revenue mismatch");
}

PriceBands::Band PriceBands::band_of(double price) const {
  double lo = obj / (static_cast<double>(m) * m);
  double hi = 8.0 * m * m * obj;
  if (price < lo) return Band::small;
  if (price <= hi) return Band::medium;
  return Band::large;
}

ItemSet PriceBands::medium_items(const ItemPricing& p) const {
  std::vector<int> items;
  for (int j = 0; j < p.size(); ++j)
    if (p[j] < kInf && band_of(p[j]) == Band::medium) items.push_back(j);
  return ItemSet(std::move(items));
}

ItemPricing high_price_pricing(const ItemPricing& p, double obj, int m) {
  std::vector<double> q(p.size());
  double cut = 8.0 * m * m * obj;
  double floor_price = 2.0 * m * obj;
  for (int j = 0; j < p.size(); ++j)
    q[j] = p[j] > cut ? p[j] / 2.0 : std::max(p[j], floor_price);
  return ItemPricing(std::move(q));
}

std::string to_string(MechanismKind kind) {
  switch (kind) {
    case MechanismKind::ocrs_seq: return "ocrs-seq";
    case MechanismKind::subadd: return "subadd";
    case MechanismKind::gs: return "gs";
    case MechanismKind::mono_n: return "mono-n";
    case MechanismKind::mono_m2: return "mono-m2";
  }
  return "?";
}

MechanismKind mechanism_from_string(const std::string& name) {
  if (name == "ocrs-seq") return MechanismKind::ocrs_seq;
  if (name == "subadd") return MechanismKind::subadd;
  if (name == "gs") return MechanismKind::gs;
  if (name == "mono-n") return MechanismKind::mono_n;
  if (name == "mono-m2") return MechanismKind::mono_m2;
  throw std::invalid_argument("unknown mechanism: " + name);
}

namespace {

std::size_t sample_support(Rng& rng, const std::vector<WeightedPricing>& support) {
  std::vector<double> w(support.size());
  for (std::size_t i = 0; i < support.size(); ++i) w[i] = support[i].prob;
  return rng.weighted_index(w);
}

std::size_t sample_valuation(Rng& rng, const BuyerDistribution& d) {
  std::vector<double> w(d.support().size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = d.support()[i].prob;
  return rng.weighted_index(w);
}

BuyerRecord skip_record(const ItemSet& avail, int m) {
  BuyerRecord r;
  r.available = avail;
  r.offered = ItemPricing::all_infinite(m);
  return r;
}

Transcript finish_transcript(std::vector<BuyerRecord> records) {
  Transcript t;
  t.revenue = 0.0;
  for (const auto& r : records) t.revenue += r.payment;
  t.buyers = std::move(records);
  return t;
}

// Shared plan cache for OCRS-style runners, keyed by buyer, reference
// pricing index and realized availability set.  When the hull sampler
// rejects its oracle (the RRS guarantee presumes subadditive buyers), the
// runner degrades to an empty offer for that buyer instead of aborting the
// simulation; the transcript stays feasible, only revenue is lost.
class PlanCache {
 public:
  const OcrsPlan& get(const BuyerDistribution& d, int buyer, std::size_t pricing_idx,
                      const ItemSet& s, const ItemPricing& p, RrsKind rrs) {
    Key key{buyer, pricing_idx, s};
    auto it = cache_.find(key);
    if (it == cache_.end()) {
      OcrsPlan plan;
      try {
        plan = build_ocrs_plan(d, s, p, rrs);
      } catch (const std::runtime_error&) {
        plan.lambda.push_back({ItemSet{}, 1.0});
        plan.pricing.push_back(ItemPricing::all_infinite(d.item_count()));
        plan.alpha = 1.0;
      }
      it = cache_.emplace(key, std::move(plan)).first;
    }
    return it->second;
  }

 private:
  struct Key {
    int buyer;
    std::size_t pricing_idx;
    ItemSet s;
    bool operator<(const Key& o) const {
      if (buyer != o.buyer) return buyer < o.buyer;
      if (pricing_idx != o.pricing_idx) return pricing_idx < o.pricing_idx;
      return s < o.s;
    }
  };
  std::map<Key, OcrsPlan> cache_;
};

class OcrsSequentialRunner : public MechanismRunner {
 public:
  OcrsSequentialRunner(const Instance& instance, const ExAnteSolution& exante,
                       RrsKind rrs)
      : instance_(instance), exante_(exante), rrs_(rrs) {}

  Transcript run(Rng& rng) override {
    int m = instance_.m;
    ItemSet s = ItemSet::full(m);
    std::vector<BuyerRecord> records;
    for (int i = 0; i < instance_.buyer_count(); ++i) {
      if (rng.coin(0.5)) {  // halved constraint via a fair skip
        records.push_back(skip_record(s, m));
        continue;
      }
      const auto& support = exante_.pricings[i].support();
      std::size_t k = sample_support(rng, support);
      const OcrsPlan& plan = cache_.get(instance_.buyers[i], i, k, s,
                                        support[k].pricing, rrs_);
      std::size_t t = sample_plan_entry(rng, plan);
      BuyerRecord rec;
      rec.available = s;
      rec.offered = plan.pricing[t];
      std::size_t vi = sample_valuation(rng, instance_.buyers[i]);
      DemandResult res = demand(instance_.buyers[i].support()[vi].valuation, rec.offered);
      rec.purchased = res.set;
      rec.payment = res.payment;
      s = s.subtract(res.set);
      records.push_back(std::move(rec));
    }
    return finish_transcript(std::move(records));
  }

 private:
  static std::size_t sample_plan_entry(Rng& rng, const OcrsPlan& plan) {
    std::vector<double> w(plan.lambda.size());
    for (std::size_t t = 0; t < w.size(); ++t) w[t] = plan.lambda[t].weight;
    return rng.weighted_index(w);
  }

  Instance instance_;
  ExAnteSolution exante_;
  RrsKind rrs_;
  PlanCache cache_;
};

class SubadditiveRunner : public MechanismRunner {
 public:
  SubadditiveRunner(const Instance& instance, const ExAnteSolution& exante)
      : instance_(instance), exante_(exante) {
    bands_.obj = exante.value;
    bands_.m = instance.m;
    high_.resize(instance.buyer_count());
    for (int i = 0; i < instance.buyer_count(); ++i)
      for (const auto& wp : exante_.pricings[i].support())
        high_[i].push_back(high_price_pricing(wp.pricing, bands_.obj, instance.m));
  }

  Transcript run(Rng& rng) override {
    return rng.coin(0.5) ? run_medium(rng) : run_high(rng);
  }

 private:
  Transcript run_medium(Rng& rng) {
    int m = instance_.m;
    ItemSet s = ItemSet::full(m);
    std::vector<BuyerRecord> records;
    for (int i = 0; i < instance_.buyer_count(); ++i) {
      if (rng.coin(0.5)) {
        records.push_back(skip_record(s, m));
        continue;
      }
      const auto& support = exante_.pricings[i].support();
      std::size_t k = sample_support(rng, support);
      ItemSet target = s.intersect(bands_.medium_items(support[k].pricing));
      const OcrsPlan& plan = cache_.get(instance_.buyers[i], i, k, target,
                                        support[k].pricing, RrsKind::subadditive);
      std::vector<double> w(plan.lambda.size());
      for (std::size_t t = 0; t < w.size(); ++t) w[t] = plan.lambda[t].weight;
      std::size_t t = rng.weighted_index(w);
      BuyerRecord rec;
      rec.available = s;
      rec.offered = plan.pricing[t];
      std::size_t vi = sample_valuation(rng, instance_.buyers[i]);
      DemandResult res = demand(instance_.buyers[i].support()[vi].valuation, rec.offered);
      rec.purchased = res.set;
      rec.payment = res.payment;
      s = s.subtract(res.set);
      records.push_back(std::move(rec));
    }
    return finish_transcript(std::move(records));
  }

  Transcript run_high(Rng& rng) {
    int m = instance_.m;
    ItemSet full = ItemSet::full(m);
    ItemSet s = full;
    std::vector<BuyerRecord> records;
    bool sold = false;
    for (int i = 0; i < instance_.buyer_count(); ++i) {
      if (sold || !(s == full)) {
        records.push_back(skip_record(s, m));
        continue;
      }
      const auto& support = exante_.pricings[i].support();
      std::size_t k = sample_support(rng, support);
      BuyerRecord rec;
      rec.available = s;
      rec.offered = high_[i][k];
      std::size_t vi = sample_valuation(rng, instance_.buyers[i]);
      DemandResult res = demand(instance_.buyers[i].support()[vi].valuation, rec.offered);
      rec.purchased = res.set;
      rec.payment = res.payment;
      if (!res.set.empty()) sold = true;
      s = s.subtract(res.set);
      records.push_back(std::move(rec));
    }
    return finish_transcript(std::move(records));
  }

  Instance instance_;
  ExAnteSolution exante_;
  PriceBands bands_;
  std::vector<std::vector<ItemPricing>> high_;
  PlanCache cache_;
};

class GsRunner : public MechanismRunner {
 public:
  GsRunner(const Instance& instance, const ExAnteSolution& exante,
           const RunnerOptions& opts)
      : instance_(instance), exante_(exante),
        plan_(build_gs_plan(instance, exante, opts)) {}

  Transcript run(Rng& rng) override {
    int m = instance_.m;
    ItemSet s = ItemSet::full(m);
    std::vector<BuyerRecord> records;
    for (int i = 0; i < instance_.buyer_count(); ++i) {
      const auto& support = exante_.pricings[i].support();
      std::size_t k = sample_support(rng, support);
      const RandomPricing& decomp = plan_.decomposition[i][k];
      std::size_t t = sample_support(rng, decomp.support());
      BuyerRecord rec;
      rec.available = s;
      rec.offered = decomp.support()[t].pricing.masked_to(s);
      std::size_t vi = sample_valuation(rng, instance_.buyers[i]);
      DemandResult res = demand(instance_.buyers[i].support()[vi].valuation, rec.offered);
      rec.purchased = res.set;
      rec.payment = res.payment;
      s = s.subtract(res.set);
      records.push_back(std::move(rec));
    }
    return finish_transcript(std::move(records));
  }

 private:
  Instance instance_;
  ExAnteSolution exante_;
  GsPlan plan_;
};

class MonotoneNRunner : public MechanismRunner {
 public:
  MonotoneNRunner(const Instance& instance, const ExAnteSolution& exante)
      : instance_(instance), exante_(exante) {}

  Transcript run(Rng& rng) override {
    int m = instance_.m;
    int n = instance_.buyer_count();
    std::size_t chosen = rng.index(n);
    ItemSet s = ItemSet::full(m);
    std::vector<BuyerRecord> records;
    for (int i = 0; i < n; ++i) {
      if (static_cast<std::size_t>(i) != chosen) {
        records.push_back(skip_record(s, m));
        continue;
      }
      const auto& support = exante_.pricings[i].support();
      std::size_t k = sample_support(rng, support);
      BuyerRecord rec;
      rec.available = s;
      rec.offered = support[k].pricing;
      std::size_t vi = sample_valuation(rng, instance_.buyers[i]);
      DemandResult res = demand(instance_.buyers[i].support()[vi].valuation, rec.offered);
      rec.purchased = res.set;
      rec.payment = res.payment;
      s = s.subtract(res.set);
      records.push_back(std::move(rec));
    }
    return finish_transcript(std::move(records));
  }

 private:
  Instance instance_;
  ExAnteSolution exante_;
};

class MonotoneM2Runner : public MechanismRunner {
 public:
  MonotoneM2Runner(const Instance& instance, const ExAnteSolution& exante)
      : instance_(instance), exante_(exante) {
    int m = instance.m;
    int n = instance.buyer_count();
    // Item with the largest expected priced allocation mass.
    std::vector<double> mass(m, 0.0);
    for (int i = 0; i < n; ++i) {
      for (const auto& wp : exante_.pricings[i].support()) {
        std::vector<double> alloc = expected_alloc(instance.buyers[i], wp.pricing);
        for (int j = 0; j < m; ++j)
          if (alloc[j] > 0 && wp.pricing[j] < kInf)
            mass[j] += wp.prob * wp.pricing[j] * alloc[j];
      }
    }
    star_ = static_cast<int>(std::max_element(mass.begin(), mass.end()) - mass.begin());

    uniform_.resize(n);
    accept_.resize(n);
    for (int i = 0; i < n; ++i) {
      const auto& support = exante_.pricings[i].support();
      for (const auto& wp : support) {
        double pj = wp.pricing[star_];
        ItemPricing uni = pj < kInf ? ItemPricing::uniform(m, pj / m)
                                    : ItemPricing::all_infinite(m);
        double lambda = 0.0;
        for (const auto& wv : instance.buyers[i].support())
          if (!demand(wv.valuation, uni).set.empty()) lambda += wv.prob;
        std::vector<double> alloc = expected_alloc(instance.buyers[i], wp.pricing);
        double a = alloc[star_];
        double accept = (lambda > 1e-12) ? a / (2.0 * lambda) : 0.0;
        uniform_[i].push_back(std::move(uni));
        accept_[i].push_back(accept);
      }
    }
  }

  Transcript run(Rng& rng) override {
    int m = instance_.m;
    ItemSet full = ItemSet::full(m);
    ItemSet s = full;
    std::vector<BuyerRecord> records;
    for (int i = 0; i < instance_.buyer_count(); ++i) {
      if (!(s == full)) {
        records.push_back(skip_record(s, m));
        continue;
      }
      const auto& support = exante_.pricings[i].support();
      std::size_t k = sample_support(rng, support);
      if (!rng.coin(accept_[i][k])) {
        records.push_back(skip_record(s, m));
        continue;
      }
      BuyerRecord rec;
      rec.available = s;
      rec.offered = uniform_[i][k];
      std::size_t vi = sample_valuation(rng, instance_.buyers[i]);
      DemandResult res = demand(instance_.buyers[i].support()[vi].valuation, rec.offered);
      rec.purchased = res.set;
      rec.payment = res.payment;
      s = s.subtract(res.set);
      records.push_back(std::move(rec));
    }
    return finish_transcript(std::move(records));
  }

 private:
  Instance instance_;
  ExAnteSolution exante_;
  int star_ = 0;
  std::vector<std::vector<ItemPricing>> uniform_;
  std::vector<std::vector<double>> accept_;
};

}  // namespace

GsPlan build_gs_plan(const Instance& instance, const ExAnteSolution& exante,
                     const RunnerOptions& opts) {
  int m = instance.m;
  int n = instance.buyer_count();
  GsPlan plan;
  plan.exact = n <= opts.gs_exact_buyer_limit;
  plan.availability.resize(n);
  plan.decomposition.resize(n);
  plan.expected_revenue.assign(n, 0.0);

  // Availability of buyer 0 is the full set.
  std::map<ItemSet, double> avail;
  avail[ItemSet::full(m)] = 1.0;

  for (int i = 0; i < n; ++i) {
    SetDistribution dist;
    for (const auto& [set, prob] : avail) dist.support.push_back({prob, set});
    plan.availability[i] = dist;

    const auto& support = exante.pricings[i].support();
    for (const auto& wp : support) {
      std::vector<double> alloc = expected_alloc(instance.buyers[i], wp.pricing);
      // Half the reference allocation, clamped into the availability-weighted
      // allocation.  For GS buyers the clamp is a no-op (availability stays
      // above 1/2); for declared-GS-but-not instances the mechanism degrades
      // instead of failing.
      std::vector<double> w(m, 0.0);
      for (const auto& [prob, s] : dist.support) {
        std::vector<double> a =
            expected_alloc(instance.buyers[i], wp.pricing.masked_to(s));
        for (int j = 0; j < m; ++j) w[j] += prob * a[j];
      }
      std::vector<double> y(m);
      for (int j = 0; j < m; ++j) y[j] = std::min(0.5 * alloc[j], w[j]);
      RandomPricing decomp = gs_decompose(instance.buyers[i], dist, wp.pricing, y);
      double rev = 0.0;
      for (int j = 0; j < m; ++j)
        if (wp.pricing[j] < kInf) rev += wp.pricing[j] * y[j];
      plan.expected_revenue[i] += wp.prob * rev;
      plan.decomposition[i].push_back(std::move(decomp));
    }

    if (i + 1 == n) break;
    if (plan.exact) {
      // Exact availability propagation over all finite supports.
      std::map<ItemSet, double> next;
      for (const auto& [set, prob] : avail) {
        for (std::size_t k = 0; k < support.size(); ++k) {
          const RandomPricing& decomp = plan.decomposition[i][k];
          for (const auto& dp : decomp.support()) {
            ItemPricing offered = dp.pricing.masked_to(set);
            for (const auto& wv : instance.buyers[i].support()) {
              DemandResult res = demand(wv.valuation, offered);
              next[set.subtract(res.set)] +=
                  prob * support[k].prob * dp.prob * wv.prob;
            }
          }
        }
      }
      avail = std::move(next);
    } else {
      // Presample availability for the next buyer by simulating the prefix.
      std::map<ItemSet, double> next;
      int count = opts.gs_presample_count;
      for (int trial = 0; trial < count; ++trial) {
        Rng rng = Rng::substream(opts.gs_presample_seed, trial);
        ItemSet s = ItemSet::full(m);
        for (int b = 0; b <= i; ++b) {
          const auto& sup = exante.pricings[b].support();
          std::size_t k = sample_support(rng, sup);
          const RandomPricing& decomp = plan.decomposition[b][k];
          std::size_t t = sample_support(rng, decomp.support());
          ItemPricing offered = decomp.support()[t].pricing.masked_to(s);
          std::size_t vi = sample_valuation(rng, instance.buyers[b]);
          DemandResult res =
              demand(instance.buyers[b].support()[vi].valuation, offered);
          s = s.subtract(res.set);
        }
        next[s] += 1.0 / count;
      }
      avail = std::move(next);
    }
  }
  return plan;
}

std::unique_ptr<MechanismRunner> make_runner(MechanismKind kind,
                                             const Instance& instance,
                                             const ExAnteSolution& exante,
                                             const RunnerOptions& opts) {
  switch (kind) {
    case MechanismKind::ocrs_seq:
      return std::make_unique<OcrsSequentialRunner>(instance, exante, opts.rrs);
    case MechanismKind::subadd:
      return std::make_unique<SubadditiveRunner>(instance, exante);
    case MechanismKind::gs:
      return std::make_unique<GsRunner>(instance, exante, opts);
    case MechanismKind::mono_n:
      return std::make_unique<MonotoneNRunner>(instance, exante);
    case MechanismKind::mono_m2:
      return std::make_unique<MonotoneM2Runner>(instance, exante);
  }
  throw std::logic_error("make_runner: unknown mechanism");
}

namespace {

Transcript one_shot(MechanismKind kind, const Instance& instance,
                    const ExAnteSolution& exante, std::uint64_t seed) {
  auto runner = make_runner(kind, instance, exante);
  Rng rng(seed);
  Transcript t = runner->run(rng);
  validate_transcript(instance, t);
  return t;
}

}  // namespace

Transcript run_ocrs_sequential(const Instance& i, const ExAnteSolution& e, std::uint64_t s) {
  return one_shot(MechanismKind::ocrs_seq, i, e, s);
}
Transcript run_subadditive_mechanism(const Instance& i, const ExAnteSolution& e, std::uint64_t s) {
  return one_shot(MechanismKind::subadd, i, e, s);
}
Transcript run_gs_mechanism(const Instance& i, const ExAnteSolution& e, std::uint64_t s) {
  return one_shot(MechanismKind::gs, i, e, s);
}
Transcript run_monotone_n_approx(const Instance& i, const ExAnteSolution& e, std::uint64_t s) {
  return one_shot(MechanismKind::mono_n, i, e, s);
}
Transcript run_monotone_m2_approx(const Instance& i, const ExAnteSolution& e, std::uint64_t s) {
  return one_shot(MechanismKind::mono_m2, i, e, s);
}

MonteCarloResult monte_carlo(MechanismRunner& runner, const Instance& instance,
                             long trials, std::uint64_t seed, bool keep_per_trial) {
  if (trials < 1) throw std::invalid_argument("monte_carlo: trials must be >= 1");
  int n = instance.buyer_count();
  int m = instance.m;
  MonteCarloResult out;
  out.trials = trials;
  out.availability.assign(n, std::vector<double>(m, 0.0));

  double sum = 0.0, sum_sq = 0.0;
  std::vector<double> buyer_sum(n, 0.0), buyer_sum_sq(n, 0.0);
  out.offer_rate.assign(n, 0.0);
  if (keep_per_trial) out.per_trial.reserve(trials);
  for (long t = 0; t < trials; ++t) {
    Rng rng = Rng::substream(seed, static_cast<std::uint64_t>(t));
    Transcript tr = runner.run(rng);
    validate_transcript(instance, tr);
    sum += tr.revenue;
    sum_sq += tr.revenue * tr.revenue;
    if (keep_per_trial) out.per_trial.push_back(tr.revenue);
    for (int i = 0; i < n; ++i) {
      double pay = tr.buyers[i].payment;
      buyer_sum[i] += pay;
      buyer_sum_sq[i] += pay * pay;
      for (int j : tr.buyers[i].available) out.availability[i][j] += 1.0;
      for (int j = 0; j < m; ++j) {
        if (tr.buyers[i].offered[j] < kInf) {
          out.offer_rate[i] += 1.0;
          break;
        }
      }
    }
  }
  for (double& f : out.offer_rate) f /= trials;
  for (auto& row : out.availability)
    for (double& f : row) f /= trials;
  out.mean = sum / trials;
  out.per_buyer_mean.assign(n, 0.0);
  out.per_buyer_std_err.assign(n, 0.0);
  for (int i = 0; i < n; ++i) out.per_buyer_mean[i] = buyer_sum[i] / trials;
  if (trials > 1) {
    double var = (sum_sq - trials * out.mean * out.mean) / (trials - 1);
    out.std_err = std::sqrt(std::max(0.0, var) / trials);
    for (int i = 0; i < n; ++i) {
      double bv = (buyer_sum_sq[i] - trials * out.per_buyer_mean[i] *
                                        out.per_buyer_mean[i]) /
                  (trials - 1);
      out.per_buyer_std_err[i] = std::sqrt(std::max(0.0, bv) / trials);
    }
  }
  return out;
}

}  // namespace seqprice
