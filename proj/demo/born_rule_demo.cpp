// Measures one rod state against a random frame with both breaking weights
// and prints exact and simulated outcome probabilities next to the Born rule.

#include <cstdio>

#include "hm/quantum_ref.hpp"
#include "hm/random.hpp"
#include "hm/rod_model.hpp"
#include "hm/stats.hpp"

int main() {
  hm::SplitMix64 rng(7);
  const hm::RodState state{hm::random_ray(rng)};
  const hm::RodMeasurement measurement{hm::random_frame(rng)};
  const auto born = hm::born_probabilities(hm::RealStateVector(state.p), measurement.e);

  for (const auto weight : {hm::BreakWeight::quantum(), hm::BreakWeight::uniform_variant()}) {
    const auto exact = hm::rod_analytic(state, measurement, weight).outcomes;
    const auto run = hm::run_trials({hm::RodExperiment{state, measurement, weight}, 200000, 42});
    std::printf("%s\n", std::string(hm::to_string(weight.kind())).c_str());
    for (std::size_t i = 0; i < 3; ++i) {
      std::printf("  o%zu  born %.6f  exact %.6f  simulated %.6f\n", i + 1, born[i], exact[i],
                  run.counts.frequency(i));
    }
  }
}
