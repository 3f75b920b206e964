#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <vector>

namespace hm {

// Probability vector over a measurement's outcomes. Analytic distributions
// have no trial count; empirical ones record how many trials produced them.
class OutcomeDistribution {
 public:
  OutcomeDistribution() = default;
  OutcomeDistribution(std::initializer_list<double> probs) : probs_(probs) {}
  explicit OutcomeDistribution(std::vector<double> probs, std::optional<std::uint64_t> trials = {})
      : probs_(std::move(probs)), trials_(trials) {}

  std::size_t size() const { return probs_.size(); }
  double operator[](std::size_t i) const { return probs_.at(i); }
  const std::vector<double>& probabilities() const { return probs_; }

  bool is_analytic() const { return !trials_.has_value(); }
  std::optional<std::uint64_t> trials() const { return trials_; }

  double sum() const { return std::accumulate(probs_.begin(), probs_.end(), 0.0); }

 private:
  std::vector<double> probs_;
  std::optional<std::uint64_t> trials_;
};

}  // namespace hm
