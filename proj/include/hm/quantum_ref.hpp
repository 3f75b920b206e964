#pragma once

// Reference quantum formalism over real Hilbert spaces of dimension 2 and 3:
// Born probabilities, observables with eigen-rays, Gleason-form measures and
// frame-additivity checks.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "hm/distribution.hpp"
#include "hm/geometry.hpp"

namespace hm {

class DimensionMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Unit vector in R^2 or R^3.
class RealStateVector {
 public:
  RealStateVector(std::initializer_list<double> components) : RealStateVector(std::vector<double>(components)) {}

  explicit RealStateVector(const std::vector<double>& components) : dim_(components.size()) {
    if (dim_ != 2 && dim_ != 3) throw DimensionMismatch("state dimension must be 2 or 3");
    double n2 = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) {
      c_[i] = components[i];
      n2 += c_[i] * c_[i];
    }
    const double n = std::sqrt(n2);
    if (!std::isfinite(n) || std::abs(n - 1.0) > kNormalizeTol) {
      throw GeometryError("state vector is not normalizable: norm " + std::to_string(n));
    }
    for (std::size_t i = 0; i < dim_; ++i) c_[i] /= n;
  }

  explicit RealStateVector(const UnitVector& v) : c_{v.x(), v.y(), v.z()}, dim_(3) {}
  explicit RealStateVector(const Ray& r) : RealStateVector(r.rep()) {}

  std::size_t dimension() const { return dim_; }
  double operator[](std::size_t i) const { return c_.at(i); }

  Vec3 as_vec3() const {
    if (dim_ != 3) throw DimensionMismatch("expected a three-dimensional state");
    return {c_[0], c_[1], c_[2]};
  }

 private:
  std::array<double, 3> c_{};
  std::size_t dim_;
};

inline double inner(const RealStateVector& a, const RealStateVector& b) {
  if (a.dimension() != b.dimension()) throw DimensionMismatch("inner product of states of different dimension");
  double s = 0.0;
  for (std::size_t i = 0; i < a.dimension(); ++i) s += a[i] * b[i];
  return s;
}

// P_i = <x_i, psi>^2 for the axes of a three-dimensional frame.
inline OutcomeDistribution born_probabilities(const RealStateVector& psi, const Frame& e) {
  if (psi.dimension() != 3) throw DimensionMismatch("born_probabilities over a frame needs a 3D state");
  const Vec3 v = psi.as_vec3();
  std::vector<double> p(3);
  for (std::size_t i = 0; i < 3; ++i) {
    const double c = dot(v, e.axis(i).vec());
    p[i] = c * c;
  }
  return OutcomeDistribution(std::move(p));
}

// Born probabilities against an orthonormal basis of matching dimension.
inline OutcomeDistribution born_probabilities(const RealStateVector& psi, std::span<const RealStateVector> basis) {
  if (basis.size() != psi.dimension()) throw DimensionMismatch("basis size does not match state dimension");
  std::vector<double> p;
  p.reserve(basis.size());
  for (const auto& b : basis) {
    const double c = inner(psi, b);
    p.push_back(c * c);
  }
  return OutcomeDistribution(std::move(p));
}

// H = sum_i o_i E_i with E_i the projector on frame axis i.
struct Observable {
  Frame frame;
  std::array<double, 3> eigenvalues;
};

inline double expectation(const Observable& obs, const RealStateVector& psi) {
  const auto p = born_probabilities(psi, obs.frame);
  double s = 0.0;
  for (std::size_t i = 0; i < 3; ++i) s += obs.eigenvalues[i] * p[i];
  return s;
}

// Rank-one projector onto a ray.
struct RayProjector {
  Ray ray;
};

// p(P) = <psi, P psi> restricted to rank-one projectors.
class GleasonMeasure {
 public:
  explicit GleasonMeasure(const RealStateVector& psi) : psi_(psi.as_vec3()) {}

  double operator()(const Ray& r) const {
    const double c = dot(psi_, r.vec());
    return std::min(1.0, c * c);
  }
  double operator()(const RayProjector& proj) const { return (*this)(proj.ray); }

 private:
  Vec3 psi_;
};

inline GleasonMeasure gleason_measure(const RealStateVector& psi) { return GleasonMeasure(psi); }

// Assignment of a probability to axis i of a frame. Non-contextual measures
// ignore the rest of the frame; contextual ones (the rod marginals) do not.
using FrameFunction = std::function<double(const Frame&, std::size_t axis)>;

inline FrameFunction as_frame_function(std::function<double(const Ray&)> measure) {
  return [m = std::move(measure)](const Frame& f, std::size_t i) { return m(f.axis(i)); };
}

struct FrameAdditivityReport {
  std::size_t frames_checked = 0;
  double max_deviation = 0.0;  // max over frames of |sum_i m(axis_i) - 1|
  std::size_t worst_frame = 0;
};

inline FrameAdditivityReport frame_additivity_check(const FrameFunction& measure, std::span<const Frame> frames) {
  FrameAdditivityReport r;
  for (std::size_t f = 0; f < frames.size(); ++f) {
    double s = 0.0;
    for (std::size_t i = 0; i < 3; ++i) s += measure(frames[f], i);
    const double dev = std::abs(s - 1.0);
    if (dev > r.max_deviation) {
      r.max_deviation = dev;
      r.worst_frame = f;
    }
    ++r.frames_checked;
  }
  return r;
}

// Two frames that share one ray, with the index of that ray in each.
struct SharedAxisPair {
  Frame a;
  std::size_t axis_a;
  Frame b;
  std::size_t axis_b;
};

// Pairs `base` with a copy of it rotated by `angle` about axis `shared`. In
// the rotated frame the shared ray is axis 0.
inline SharedAxisPair rotated_about_axis(const Frame& base, std::size_t shared, double angle) {
  const auto [j, k] = std::array<std::size_t, 2>{(shared + 1) % 3, (shared + 2) % 3};
  const Vec3& aj = base.axis(j).vec();
  const Vec3& ak = base.axis(k).vec();
  const double c = std::cos(angle), s = std::sin(angle);
  const Vec3 bj = c * aj + s * ak;
  const Vec3 bk = c * ak - s * aj;
  Frame rotated({base.axis(shared), canonicalize(bj), canonicalize(bk)});
  return {base, shared, rotated, 0};
}

// Largest |m(a, i) - m(b, j)| over frame pairs sharing a ray. Zero for any
// non-contextual measure.
inline double frame_dependence(const FrameFunction& measure, std::span<const SharedAxisPair> pairs) {
  double worst = 0.0;
  for (const auto& p : pairs) {
    worst = std::max(worst, std::abs(measure(p.a, p.axis_a) - measure(p.b, p.axis_b)));
  }
  return worst;
}

}  // namespace hm
