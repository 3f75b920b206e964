#pragma once

// Kochen-Specker disk model. The quantum state p carries a hidden state t in
// the open hemisphere around p: a particle is dropped uniformly on a disk of
// unit radius tangent above p and projected orthogonally onto the sphere,
// giving density cos(theta)/pi on the hemisphere. Measuring along q gives
// "up" iff t lies in the hemisphere around q; the state jumps to q or -q and
// the hidden state is drawn afresh about the new pole.

#include <cmath>
#include <cstddef>
#include <numbers>

#include "hm/distribution.hpp"
#include "hm/geometry.hpp"
#include "hm/random.hpp"

namespace hm {

struct KSState {
  UnitVector p;  // quantum state
  UnitVector t;  // hidden state, t.p > 0
};

enum class Spin : std::size_t { Up = 0, Down = 1 };

struct KSOutcome {
  Spin outcome;
  KSState new_state;
};

namespace detail {

// Two unit vectors completing p to an orthonormal basis.
inline std::array<Vec3, 2> tangent_basis(const UnitVector& p) {
  const Vec3& n = p.vec();
  // Cross with the coordinate axis least aligned with p.
  const double ax = std::abs(n.x), ay = std::abs(n.y), az = std::abs(n.z);
  Vec3 helper{0.0, 0.0, 1.0};
  if (ax <= ay && ax <= az) {
    helper = {1.0, 0.0, 0.0};
  } else if (ay <= az) {
    helper = {0.0, 1.0, 0.0};
  }
  const Vec3 e1 = UnitVector::normalize(cross(n, helper)).vec();
  const Vec3 e2 = cross(n, e1);
  return {e1, e2};
}

}  // namespace detail

// Hidden state for quantum state p.
template <class Rng>
UnitVector ks_sample_hidden(const UnitVector& p, Rng& rng) {
  const double r = std::sqrt(uniform01(rng));  // area-uniform radius, r < 1
  const double phi = 2.0 * std::numbers::pi * uniform01(rng);
  const auto [e1, e2] = detail::tangent_basis(p);
  const double height = std::sqrt(1.0 - r * r);
  const Vec3 t = (r * std::cos(phi)) * e1 + (r * std::sin(phi)) * e2 + height * p.vec();
  return UnitVector::normalize(t);
}

template <class Rng>
KSState ks_prepare(const UnitVector& p, Rng& rng) {
  return {p, ks_sample_hidden(p, rng)};
}

// Up iff t.q > 0; the equator t.q == 0 counts as down.
template <class Rng>
KSOutcome ks_measure(const KSState& s, const UnitVector& q, Rng& rng) {
  if (dot(s.t, q) > 0.0) return {Spin::Up, ks_prepare(q, rng)};
  const UnitVector down = -q;
  return {Spin::Down, ks_prepare(down, rng)};
}

// Spin-1/2 probabilities (cos^2(theta/2), sin^2(theta/2)) for measuring q in
// state p; the distribution the disk model is verified against.
inline OutcomeDistribution ks_analytic(const UnitVector& p, const UnitVector& q) {
  const double c = std::clamp(dot(p, q), -1.0, 1.0);
  const double up = (1.0 + c) / 2.0;
  return OutcomeDistribution{up, 1.0 - up};
}

}  // namespace hm
