#pragma once

// Three-dimensional rod model in its geometric form.
//
// The state is a rod (a ray p). A measurement is an orthonormal triad of rays
// e; p is tied to its foot point on each axis by a segment whose projection
// on the rod has length sin^2(theta_i). Measuring proceeds in two stages:
//
//   1. one of the three segments breaks with probability proportional to a
//      breaking weight w(theta_i);
//   2. the rod swings into the plane of the two surviving axes (p is replaced
//      by its normalized projection p'), and one of the two remaining segments
//      breaks with probability proportional to w(theta'_j).
//
// The rod then settles on the last axis it is still tied to, which is the
// outcome and the post-measurement state. With w = sin^2 the outcome
// probabilities are cos^2(theta_k); with w = sin (uniformly breaking
// connections) they are not.

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <span>
#include <string_view>
#include <vector>

#include "hm/distribution.hpp"
#include "hm/geometry.hpp"
#include "hm/random.hpp"

namespace hm {

struct RodState {
  Ray p;
};

struct RodMeasurement {
  Frame e;  // outcome i is the axis e.axis(i)
};

enum class WeightKind { Quantum, UniformVariant };

// Which stages the uniform variant applies to. With FirstOnly the second
// break keeps the quantum weight.
enum class VariantStages { Both, FirstOnly };

// Breaking weight as a function of the angle between the rod and an axis.
// Implemented in terms of sin(theta), which is what the geometry supplies.
class BreakWeight {
 public:
  static constexpr BreakWeight quantum() { return BreakWeight(WeightKind::Quantum, VariantStages::Both); }
  static constexpr BreakWeight uniform_variant(VariantStages stages = VariantStages::Both) {
    return BreakWeight(WeightKind::UniformVariant, stages);
  }

  constexpr WeightKind kind() const { return kind_; }
  constexpr VariantStages stages() const { return stages_; }

  static constexpr double evaluate(WeightKind kind, double sin_theta) {
    return kind == WeightKind::Quantum ? sin_theta * sin_theta : sin_theta;
  }

  // w(theta) for the first break.
  double operator()(double theta) const { return stage1(std::sin(theta)); }

  constexpr double stage1(double sin_theta) const { return evaluate(kind_, sin_theta); }
  constexpr double stage2(double sin_theta) const {
    const bool variant_second = kind_ == WeightKind::UniformVariant && stages_ == VariantStages::Both;
    return evaluate(variant_second ? WeightKind::UniformVariant : WeightKind::Quantum, sin_theta);
  }

  constexpr bool operator==(const BreakWeight&) const = default;

 private:
  constexpr BreakWeight(WeightKind kind, VariantStages stages) : kind_(kind), stages_(stages) {}
  WeightKind kind_;
  VariantStages stages_;
};

inline constexpr std::string_view to_string(WeightKind k) {
  return k == WeightKind::Quantum ? "quantum" : "uniform-variant";
}

class DegenerateRodInput : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Axes broken first and second, and the axis the rod ends on.
struct BreakPath {
  std::size_t first_broken;
  std::size_t second_broken;
  std::size_t outcome;

  constexpr bool operator==(const BreakPath&) const = default;
};

// The two axes other than `dropped`, in increasing order.
constexpr std::array<std::size_t, 2> retained_axes(std::size_t dropped) {
  return dropped == 0 ? std::array<std::size_t, 2>{1, 2}
                      : (dropped == 1 ? std::array<std::size_t, 2>{0, 2} : std::array<std::size_t, 2>{0, 1});
}

namespace detail {

// sin(theta_i) for each axis, from the in-plane complement
// sin^2(theta_i) = c_j^2 + c_k^2. Values below kCanonicalEps are the rod
// lying on that axis and are set to 0.
inline std::array<double, 3> axis_sines(const Ray& p, const Frame& e) {
  const auto c = direction_cosines(p, e);
  std::array<double, 3> s{};
  for (std::size_t i = 0; i < 3; ++i) {
    const auto [j, k] = retained_axes(i);
    const double v = std::sqrt(c[j] * c[j] + c[k] * c[k]);
    s[i] = v < kCanonicalEps ? 0.0 : std::min(v, 1.0);
  }
  return s;
}

}  // namespace detail

// Probabilities of each segment breaking first.
inline std::array<double, 3> stage1_distribution(const RodState& s, const RodMeasurement& m,
                                                 const BreakWeight& w) {
  const auto sines = detail::axis_sines(s.p, m.e);
  std::array<double, 3> weights{};
  double total = 0.0;
  for (std::size_t i = 0; i < 3; ++i) {
    weights[i] = w.stage1(sines[i]);
    total += weights[i];
  }
  if (!(total > 0.0)) throw DegenerateRodInput("degenerate frame/state: all first-stage weights are zero");
  for (auto& x : weights) x /= total;
  return weights;
}

// Probabilities of the segment to axis j (first entry) or axis k (second
// entry) breaking, for a rod p' lying in the plane of axes j and k.
inline std::array<double, 2> stage2_distribution(const Ray& projected, const Frame& e, std::size_t j,
                                                 std::size_t k, const BreakWeight& w) {
  if (j > 2 || k > 2 || j == k) throw std::invalid_argument("retained axes must be two distinct indices");
  const double cj = ray_cosine(projected, e.axis(j));
  const double ck = ray_cosine(projected, e.axis(k));
  // Within the plane, sin(theta'_j) = cos(theta'_k).
  const double wj = w.stage2(ck);
  const double wk = w.stage2(cj);
  const double total = wj + wk;
  if (!(total > 0.0)) throw DegenerateRodInput("degenerate projected state: both second-stage weights are zero");
  return {wj / total, wk / total};
}

struct PathProbability {
  BreakPath path;
  double probability;
};

struct RodAnalysis {
  OutcomeDistribution outcomes;
  std::array<PathProbability, 6> paths;  // ordered by (first, second)
};

// Exact evaluation of the breaking tree over the six break orders.
inline RodAnalysis rod_analytic(const RodState& s, const RodMeasurement& m, const BreakWeight& w) {
  const auto first = stage1_distribution(s, m, w);
  std::array<PathProbability, 6> paths{};
  std::vector<double> outcome(3, 0.0);
  std::size_t n = 0;
  for (std::size_t i = 0; i < 3; ++i) {
    const auto [j, k] = retained_axes(i);
    std::array<double, 2> second{0.0, 0.0};
    if (first[i] > 0.0) {
      const auto proj = project_onto_plane(s.p, m.e, i);
      second = stage2_distribution(proj.ray, m.e, j, k, w);
    }
    // Breaking j second leaves the rod on k, and vice versa.
    paths[n++] = {{i, j, k}, first[i] * second[0]};
    paths[n++] = {{i, k, j}, first[i] * second[1]};
    outcome[k] += first[i] * second[0];
    outcome[j] += first[i] * second[1];
  }
  return {OutcomeDistribution(std::move(outcome)), paths};
}

struct RodOutcome {
  std::size_t outcome;
  RodState new_state;
  BreakPath path;
};

template <class Rng>
RodOutcome rod_sample(const RodState& s, const RodMeasurement& m, const BreakWeight& w, Rng& rng) {
  const auto first = stage1_distribution(s, m, w);
  const std::size_t i = sample_categorical(std::span<const double>(first), rng);
  const auto [j, k] = retained_axes(i);
  const auto proj = project_onto_plane(s.p, m.e, i);
  const auto second = stage2_distribution(proj.ray, m.e, j, k, w);
  const std::size_t broken = sample_categorical(std::span<const double>(second), rng) == 0 ? j : k;
  const std::size_t outcome = broken == j ? k : j;
  return {outcome, RodState{m.e.axis(outcome)}, BreakPath{i, broken, outcome}};
}

// Probability that the rod ends on axis i of frame f, for a fixed state.
// Depends on the whole frame, not just the ray f.axis(i), unless w is the
// quantum weight.
inline auto rod_marginal(const RodState& s, const BreakWeight& w) {
  return [s, w](const Frame& f, std::size_t i) { return rod_analytic(s, RodMeasurement{f}, w).outcomes[i]; };
}

}  // namespace hm
