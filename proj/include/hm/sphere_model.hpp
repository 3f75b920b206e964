#pragma once

// Two-dimensional elastic model. A particle sits on S^2; measuring along u
// drops it orthogonally onto an elastic stretched from -u to u, the elastic
// breaks at a uniformly distributed point, and the particle is pulled to the
// end of the piece it is stuck to.

#include <cstddef>

#include "hm/distribution.hpp"
#include "hm/geometry.hpp"
#include "hm/random.hpp"

namespace hm {

struct SphereState {
  UnitVector v;
};

// Outcome 0 (o1) at u, outcome 1 (o2) at -u.
struct SphereMeasurement {
  UnitVector u;
};

// Break point along the elastic, as a coordinate in [-1, 1] measured from
// -u (at -1) to u (at +1).
class ElasticHiddenVariable {
 public:
  explicit ElasticHiddenVariable(double b) : b_(b) {
    if (!(b >= -1.0 && b <= 1.0)) throw std::invalid_argument("elastic break point outside [-1, 1]");
  }
  double value() const { return b_; }

 private:
  double b_;
};

struct SphereOutcome {
  std::size_t outcome;  // 0 = o1, 1 = o2
  SphereState new_state;
  ElasticHiddenVariable hidden;
};

inline OutcomeDistribution sphere_analytic(const SphereMeasurement& e, const SphereState& s) {
  const double c = std::clamp(dot(e.u, s.v), -1.0, 1.0);
  const double p1 = (1.0 + c) / 2.0;
  return OutcomeDistribution{p1, 1.0 - p1};
}

// Deterministic measurement for a known break point. The particle sits at
// coordinate c = u.v; if the elastic breaks below it the particle stays on
// the piece anchored at u. A break exactly at the particle yields o2.
inline SphereOutcome sphere_resolve(const SphereMeasurement& e, const SphereState& s,
                                    ElasticHiddenVariable hidden) {
  const double c = dot(e.u, s.v);
  if (hidden.value() < c) return {0, SphereState{e.u}, hidden};
  return {1, SphereState{-e.u}, hidden};
}

template <class Rng>
SphereOutcome sphere_sample(const SphereMeasurement& e, const SphereState& s, Rng& rng) {
  // uniform01 is in [0, 1), so b never reaches +1.
  const ElasticHiddenVariable hidden(-1.0 + 2.0 * uniform01(rng));
  return sphere_resolve(e, s, hidden);
}

}  // namespace hm
