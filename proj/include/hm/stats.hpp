#pragma once

// Monte Carlo trial runner with per-trial derived random streams, empirical
// outcome counts and chi-square goodness-of-fit verification.
//
// Trial t of a run draws every random number from
// SplitMix64::for_stream(master_seed, t), so the counts are a deterministic
// function of (config, master_seed) no matter how trials are split across
// worker threads.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <thread>
#include <type_traits>
#include <variant>
#include <vector>

#include "hm/distribution.hpp"
#include "hm/geometry.hpp"
#include "hm/ks_model.hpp"
#include "hm/quantum_ref.hpp"
#include "hm/random.hpp"
#include "hm/rod_model.hpp"
#include "hm/sphere_model.hpp"

namespace hm {

struct SphereExperiment {
  SphereMeasurement measurement;
  SphereState state;
};

struct KSExperiment {
  UnitVector state;
  UnitVector direction;
};

struct RodExperiment {
  RodState state;
  RodMeasurement measurement;
  BreakWeight weight = BreakWeight::quantum();
};

using Experiment = std::variant<SphereExperiment, KSExperiment, RodExperiment>;

inline std::size_t outcome_count(const Experiment& ex) {
  return std::holds_alternative<RodExperiment>(ex) ? 3 : 2;
}

// The model's own exact outcome distribution.
inline OutcomeDistribution analytic_distribution(const Experiment& ex) {
  return std::visit(
      [](const auto& e) -> OutcomeDistribution {
        using T = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<T, SphereExperiment>) {
          return sphere_analytic(e.measurement, e.state);
        } else if constexpr (std::is_same_v<T, KSExperiment>) {
          return ks_analytic(e.state, e.direction);
        } else {
          return rod_analytic(e.state, e.measurement, e.weight).outcomes;
        }
      },
      ex);
}

// Born-rule prediction for the same state and measurement: spin-1/2
// probabilities for the two-outcome models, cos^2 of the direction cosines
// for the rod.
inline OutcomeDistribution born_distribution(const Experiment& ex) {
  if (const auto* rod = std::get_if<RodExperiment>(&ex)) {
    return born_probabilities(RealStateVector(rod->state.p), rod->measurement.e);
  }
  return analytic_distribution(ex);
}

struct RunConfig {
  Experiment experiment;
  std::uint64_t trials = 1;
  std::uint64_t master_seed = 0;
  unsigned workers = 1;
  std::size_t record_limit = 16;  // trials [0, record_limit) are kept as TrialRecords
};

struct TrialRecord {
  std::uint64_t trial;
  std::size_t outcome;
  Vec3 final_state;

  bool operator==(const TrialRecord&) const = default;
};

class EmpiricalDistribution {
 public:
  EmpiricalDistribution() = default;
  explicit EmpiricalDistribution(std::size_t outcomes) : counts_(outcomes, 0) {}
  explicit EmpiricalDistribution(std::vector<std::uint64_t> counts) : counts_(std::move(counts)) {
    for (auto c : counts_) total_ += c;
  }

  void add(std::size_t outcome, std::uint64_t n = 1) {
    counts_.at(outcome) += n;
    total_ += n;
  }

  void merge(const EmpiricalDistribution& other) {
    if (other.counts_.size() != counts_.size()) throw std::invalid_argument("merging distributions of different size");
    for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += other.counts_[i];
    total_ += other.total_;
  }

  std::size_t size() const { return counts_.size(); }
  std::uint64_t count(std::size_t i) const { return counts_.at(i); }
  const std::vector<std::uint64_t>& counts() const { return counts_; }
  std::uint64_t total() const { return total_; }

  double frequency(std::size_t i) const {
    return total_ == 0 ? 0.0 : static_cast<double>(counts_.at(i)) / static_cast<double>(total_);
  }

  OutcomeDistribution frequencies() const {
    std::vector<double> f(counts_.size());
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = frequency(i);
    return OutcomeDistribution(std::move(f), total_);
  }

  bool operator==(const EmpiricalDistribution&) const = default;

 private:
  std::vector<std::uint64_t> counts_;
  std::uint64_t total_ = 0;
};

struct RunResult {
  EmpiricalDistribution counts;
  std::vector<TrialRecord> records;
};

namespace detail {

struct TrialResult {
  std::size_t outcome;
  Vec3 final_state;
};

inline TrialResult run_one(const Experiment& ex, SplitMix64& rng) {
  return std::visit(
      [&rng](const auto& e) -> TrialResult {
        using T = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<T, SphereExperiment>) {
          const auto r = sphere_sample(e.measurement, e.state, rng);
          return {r.outcome, r.new_state.v.vec()};
        } else if constexpr (std::is_same_v<T, KSExperiment>) {
          const auto prepared = ks_prepare(e.state, rng);
          const auto r = ks_measure(prepared, e.direction, rng);
          return {static_cast<std::size_t>(r.outcome), r.new_state.p.vec()};
        } else {
          const auto r = rod_sample(e.state, e.measurement, e.weight, rng);
          return {r.outcome, r.new_state.p.vec()};
        }
      },
      ex);
}

inline void run_range(const RunConfig& cfg, std::uint64_t begin, std::uint64_t end, EmpiricalDistribution& counts,
                      std::vector<TrialRecord>& records) {
  for (std::uint64_t t = begin; t < end; ++t) {
    auto rng = SplitMix64::for_stream(cfg.master_seed, t);
    const auto r = run_one(cfg.experiment, rng);
    counts.add(r.outcome);
    if (t < cfg.record_limit) records.push_back({t, r.outcome, r.final_state});
  }
}

}  // namespace detail

inline RunResult run_trials(const RunConfig& cfg) {
  if (cfg.trials < 1) throw std::invalid_argument("trials must be at least 1");
  if (cfg.workers < 1) throw std::invalid_argument("workers must be at least 1");
  // Surfaces degenerate inputs here rather than inside a worker thread.
  (void)analytic_distribution(cfg.experiment);

  const std::size_t outcomes = outcome_count(cfg.experiment);
  const std::uint64_t workers = std::min<std::uint64_t>(cfg.workers, cfg.trials);
  std::vector<EmpiricalDistribution> partial(workers, EmpiricalDistribution(outcomes));
  std::vector<std::vector<TrialRecord>> partial_records(workers);

  auto bounds = [&](std::uint64_t w) { return cfg.trials / workers * w + std::min(w, cfg.trials % workers); };

  if (workers == 1) {
    detail::run_range(cfg, 0, cfg.trials, partial[0], partial_records[0]);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::uint64_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] { detail::run_range(cfg, bounds(w), bounds(w + 1), partial[w], partial_records[w]); });
    }
  }

  RunResult result{EmpiricalDistribution(outcomes), {}};
  for (std::uint64_t w = 0; w < workers; ++w) {
    result.counts.merge(partial[w]);
    result.records.insert(result.records.end(), partial_records[w].begin(), partial_records[w].end());
  }
  return result;
}

// Upper critical values of the chi-square distribution, P(X > c) = alpha.
// Only the degrees of freedom reachable with two or three outcomes.
inline double chi_square_critical(std::size_t dof, double alpha) {
  struct Entry {
    double alpha, dof1, dof2;
  };
  static constexpr Entry table[] = {
      {0.05, 3.841458820694124, 5.991464547107979},
      {0.01, 6.634896601021214, 9.210340371976182},
      {0.001, 10.827566170662733, 13.815510557964274},
  };
  if (dof == 0) return 0.0;
  for (const auto& e : table) {
    if (std::abs(e.alpha - alpha) < 1e-12) {
      if (dof == 1) return e.dof1;
      if (dof == 2) return e.dof2;
    }
  }
  throw std::invalid_argument("no tabulated chi-square critical value for dof " + std::to_string(dof) +
                              " at alpha " + std::to_string(alpha));
}

inline constexpr double kZ99 = 2.5758293035489004;  // two-sided 99% normal quantile

struct ConfidenceInterval {
  double low;
  double high;

  bool contains(double x) const { return x >= low && x <= high; }
};

// Normal-approximation interval for a binomial frequency.
inline ConfidenceInterval normal_interval(double frequency, std::uint64_t n, double z = kZ99) {
  const double half = z * std::sqrt(frequency * (1.0 - frequency) / static_cast<double>(n));
  return {std::max(0.0, frequency - half), std::min(1.0, frequency + half)};
}

struct GofReport {
  double statistic = 0.0;
  std::size_t dof = 0;
  double alpha = 0.01;
  double threshold = 0.0;
  bool pass = false;
  std::vector<ConfidenceInterval> intervals;  // 99% per outcome
  std::string diagnostic;                     // set when an impossible outcome was observed
};

// Pearson chi-square test of observed counts against an exact distribution.
// Outcomes with zero expected probability are excluded from the statistic;
// any count on one of them fails the test outright.
inline GofReport chi_square_gof(const EmpiricalDistribution& emp, const OutcomeDistribution& expected, double alpha) {
  if (emp.size() != expected.size()) throw std::invalid_argument("outcome count mismatch in chi-square test");
  if (emp.total() == 0) throw std::invalid_argument("chi-square test needs at least one trial");
  if (std::abs(expected.sum() - 1.0) > 1e-9) throw std::invalid_argument("expected distribution does not sum to 1");

  GofReport r;
  r.alpha = alpha;
  const double n = static_cast<double>(emp.total());
  std::size_t positive = 0;
  for (std::size_t i = 0; i < emp.size(); ++i) {
    const double p = expected[i];
    const double f = emp.frequency(i);
    r.intervals.push_back(normal_interval(f, emp.total()));
    if (p > 0.0) {
      ++positive;
      r.statistic += (f - p) * (f - p) / p;
    } else if (emp.count(i) > 0) {
      if (!r.diagnostic.empty()) r.diagnostic += "; ";
      r.diagnostic += "outcome " + std::to_string(i + 1) + " has expected probability 0 but was observed " +
                      std::to_string(emp.count(i)) + " times";
    }
  }
  r.statistic *= n;
  r.dof = positive - 1;
  r.threshold = chi_square_critical(r.dof, alpha);
  r.pass = r.diagnostic.empty() && (r.dof == 0 || r.statistic <= r.threshold);
  return r;
}

}  // namespace hm
