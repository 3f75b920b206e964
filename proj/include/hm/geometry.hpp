#pragma once

// Small fixed-size vector geometry shared by all measurement models: unit
// vectors on S^2, antipodally identified rays, orthonormal frames, direction
// cosines and plane projections.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <random>
#include <span>
#include <stdexcept>
#include <string>

namespace hm {

// Tolerances used repo-wide.
inline constexpr double kIdentityTol = 1e-12;     // algebraic identities
inline constexpr double kOrthoTol = 1e-10;        // constructed orthonormality
inline constexpr double kNormalizeTol = 1e-6;     // accepted input norm drift
inline constexpr double kCanonicalEps = 1e-12;    // ray sign convention

class GeometryError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Raised when a projection would collapse to the zero vector.
class DegenerateProjection : public GeometryError {
 public:
  using GeometryError::GeometryError;
};

struct Vec3 {
  double x{}, y{}, z{};

  constexpr double operator[](std::size_t i) const { return i == 0 ? x : (i == 1 ? y : z); }

  constexpr Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  constexpr Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  constexpr Vec3 operator-() const { return {-x, -y, -z}; }
  constexpr Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  friend constexpr Vec3 operator*(double s, const Vec3& v) { return v * s; }

  constexpr bool operator==(const Vec3&) const = default;
};

constexpr double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

constexpr Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }

// Point on the unit sphere. Orientation matters (u and -u are distinct).
class UnitVector {
 public:
  UnitVector() = default;

  // Accepts a vector whose norm is within kNormalizeTol of 1 and rescales it
  // to unit length.
  static UnitVector from_unit(const Vec3& v) {
    const double n = norm(v);
    if (!std::isfinite(n) || std::abs(n - 1.0) > kNormalizeTol) {
      throw GeometryError("vector is not normalizable: norm " + std::to_string(n));
    }
    return UnitVector(v * (1.0 / n));
  }

  // Normalizes any finite nonzero vector.
  static UnitVector normalize(const Vec3& v) {
    const double n = norm(v);
    if (!std::isfinite(n) || n < kCanonicalEps) {
      throw GeometryError("cannot normalize a zero or non-finite vector");
    }
    return UnitVector(v * (1.0 / n));
  }

  const Vec3& vec() const { return v_; }
  double x() const { return v_.x; }
  double y() const { return v_.y; }
  double z() const { return v_.z; }
  double operator[](std::size_t i) const { return v_[i]; }

  UnitVector operator-() const { return UnitVector(-v_); }
  bool operator==(const UnitVector&) const = default;

 private:
  explicit UnitVector(const Vec3& v) : v_(v) {}
  Vec3 v_{0.0, 0.0, 1.0};
};

inline double dot(const UnitVector& a, const UnitVector& b) { return dot(a.vec(), b.vec()); }

// Angle between two oriented unit vectors, in [0, pi].
inline double angle_between(const UnitVector& a, const UnitVector& b) {
  return std::acos(std::clamp(dot(a, b), -1.0, 1.0));
}

// One-dimensional subspace: unit vector with antipodes identified. The stored
// representative has its first component of magnitude > kCanonicalEps
// strictly positive.
class Ray {
 public:
  Ray() : rep_(UnitVector::from_unit({1.0, 0.0, 0.0})) {}
  explicit Ray(const UnitVector& v) : rep_(canonical_rep(v)) {}

  const UnitVector& rep() const { return rep_; }
  const Vec3& vec() const { return rep_.vec(); }

  bool operator==(const Ray&) const = default;

 private:
  static UnitVector canonical_rep(const UnitVector& v) {
    for (std::size_t i = 0; i < 3; ++i) {
      if (std::abs(v[i]) > kCanonicalEps) return v[i] > 0.0 ? v : -v;
    }
    return v;  // unreachable for unit vectors
  }
  UnitVector rep_;
};

inline Ray canonicalize(const Vec3& v) { return Ray(UnitVector::from_unit(v)); }
inline Ray canonicalize(const UnitVector& v) { return Ray(v); }

// Cosine of the angle between two rays, in [0, 1].
inline double ray_cosine(const Ray& a, const Ray& b) {
  return std::min(1.0, std::abs(dot(a.vec(), b.vec())));
}

// Angle between two rays, in [0, pi/2].
inline double angle_between(const Ray& a, const Ray& b) { return std::acos(ray_cosine(a, b)); }

// Ordered orthonormal triad of rays: a three-outcome measurement.
class Frame {
 public:
  Frame() : Frame(identity_axes()) {}

  explicit Frame(const std::array<Ray, 3>& axes) : axes_(axes) {
    for (std::size_t i = 0; i < 3; ++i) {
      for (std::size_t j = i + 1; j < 3; ++j) {
        if (std::abs(dot(axes_[i].vec(), axes_[j].vec())) > kOrthoTol) {
          throw GeometryError("frame axes are not orthogonal");
        }
      }
    }
  }

  static Frame identity() { return Frame(); }

  const Ray& axis(std::size_t i) const { return axes_.at(i); }
  const std::array<Ray, 3>& axes() const { return axes_; }

  bool operator==(const Frame&) const = default;

 private:
  static std::array<Ray, 3> identity_axes() {
    return {canonicalize(Vec3{1, 0, 0}), canonicalize(Vec3{0, 1, 0}), canonicalize(Vec3{0, 0, 1})};
  }
  std::array<Ray, 3> axes_;
};

// Classical Gram-Schmidt on three vectors. Throws if the triple is
// (numerically) linearly dependent. Orientation of the inputs is preserved.
inline std::array<UnitVector, 3> gram_schmidt(const Vec3& a, const Vec3& b, const Vec3& c) {
  // Two passes each; one loses orthogonality for nearly parallel inputs.
  const auto u0 = UnitVector::normalize(a);
  Vec3 r1 = b;
  for (int pass = 0; pass < 2; ++pass) r1 = r1 - dot(r1, u0.vec()) * u0.vec();
  const auto u1 = UnitVector::normalize(r1);
  Vec3 r2 = c;
  for (int pass = 0; pass < 2; ++pass) {
    r2 = r2 - dot(r2, u0.vec()) * u0.vec();
    r2 = r2 - dot(r2, u1.vec()) * u1.vec();
  }
  const auto u2 = UnitVector::normalize(r2);
  return {u0, u1, u2};
}

inline Frame frame_from(const std::array<UnitVector, 3>& axes) {
  return Frame({Ray(axes[0]), Ray(axes[1]), Ray(axes[2])});
}

// c_i = |<p, axis_i>|.
inline std::array<double, 3> direction_cosines(const Ray& p, const Frame& e) {
  return {ray_cosine(p, e.axis(0)), ray_cosine(p, e.axis(1)), ray_cosine(p, e.axis(2))};
}

struct PlaneProjection {
  Ray ray;      // normalized projection
  double norm;  // sin of the angle between p and the dropped axis
};

// Projects p onto the plane spanned by the two axes other than
// `dropped_axis`.
inline PlaneProjection project_onto_plane(const Ray& p, const Frame& e, std::size_t dropped_axis) {
  if (dropped_axis > 2) throw GeometryError("axis index out of range");
  const std::size_t j = (dropped_axis + 1) % 3;
  const std::size_t k = (dropped_axis + 2) % 3;
  const Vec3& aj = e.axis(j).vec();
  const Vec3& ak = e.axis(k).vec();
  const double cj = dot(p.vec(), aj);
  const double ck = dot(p.vec(), ak);
  const double n = std::sqrt(cj * cj + ck * ck);
  if (n < kCanonicalEps) {
    throw DegenerateProjection("degenerate projection: state coincides with the dropped axis");
  }
  const Vec3 proj = (cj / n) * aj + (ck / n) * ak;
  return {Ray(UnitVector::from_unit(proj)), n};
}

namespace detail {

// Vector with independent standard normal components.
template <class Rng>
Vec3 gaussian3(Rng& rng) {
  std::normal_distribution<double> nd(0.0, 1.0);
  const double x = nd(rng);
  const double y = nd(rng);
  const double z = nd(rng);
  return {x, y, z};
}

}  // namespace detail

// Uniform point on S^2 (normalized Gaussian draw).
template <class Rng>
UnitVector random_unit_vector(Rng& rng) {
  for (;;) {
    const Vec3 g = detail::gaussian3(rng);
    if (norm(g) > 1e-8) return UnitVector::normalize(g);
  }
}

// Oriented orthonormal triad from Gram-Schmidt on three Gaussian draws.
// Triples with any pairwise |cos| above 1 - 1e-6 are redrawn.
template <class Rng>
std::array<UnitVector, 3> random_orthonormal_triad(Rng& rng) {
  for (;;) {
    const auto a = random_unit_vector(rng);
    const auto b = random_unit_vector(rng);
    const auto c = random_unit_vector(rng);
    constexpr double limit = 1.0 - 1e-6;
    if (std::abs(dot(a, b)) > limit || std::abs(dot(a, c)) > limit || std::abs(dot(b, c)) > limit) {
      continue;
    }
    // Coplanar triples pass the pairwise test but fail Gram-Schmidt.
    if (std::abs(dot(cross(a.vec(), b.vec()), c.vec())) < 1e-6) continue;
    return gram_schmidt(a.vec(), b.vec(), c.vec());
  }
}

template <class Rng>
Frame random_frame(Rng& rng) {
  return frame_from(random_orthonormal_triad(rng));
}

template <class Rng>
Ray random_ray(Rng& rng) {
  return Ray(random_unit_vector(rng));
}

}  // namespace hm
