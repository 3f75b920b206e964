#pragma once

// Experiment specifications and the batch commands built on them: exact
// distributions, Monte Carlo simulation with chi-square verdicts, angle
// sweeps and frame-additivity checks. Commands write to caller-supplied
// streams and return process exit codes.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "hm/geometry.hpp"
#include "hm/quantum_ref.hpp"
#include "hm/random.hpp"
#include "hm/rod_model.hpp"
#include "hm/stats.hpp"

namespace hm {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 2;
inline constexpr int kExitStatFail = 3;

inline constexpr std::uint64_t kDefaultSeed = 20240601;
inline constexpr std::uint64_t kMinTrialsForVerdict = 1000;

class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Raw, unvalidated experiment description as given on the command line or
// in a config file.
struct ExperimentSpec {
  std::string command;
  std::string model = "rod";          // sphere2d | ks | rod
  std::string weight = "quantum";     // quantum | uniform-variant (rod only)
  std::string variant_stages = "both";  // both | first
  std::string state = "1,0,0";
  std::string frame = "identity";     // identity | random:<seed> | 9 comma-separated reals
  std::string direction;              // sphere2d/ks measurement direction; empty = first frame axis
  std::uint64_t trials = 100000;
  std::uint64_t seed = kDefaultSeed;
  double alpha = 0.01;
  std::string expect = "self";  // self | born
  std::string out;              // empty = stdout
  unsigned workers = 1;
  std::size_t steps = 11;       // sweep points
  std::string measure = "gleason";  // framecheck: gleason | rod
  std::size_t frames = 1000;        // framecheck frame count
};

// Validated, canonicalized experiment.
struct ResolvedExperiment {
  Experiment experiment;
  std::string model;
  std::string weight;  // "none" for two-outcome models
  UnitVector state;
  std::array<UnitVector, 3> frame_axes;  // oriented, orthonormal
  Frame frame;
  std::string frame_id;
  double frame_correction = 0.0;  // max |component change| from re-orthonormalization
};

namespace detail {

inline std::string format_real(double x) {
  if (x == 0.0) x = 0.0;  // no "-0"
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

inline std::vector<double> parse_reals(const std::string& text, const std::string& what) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw InputError("malformed number '" + item + "' in " + what);
    }
    while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) ++used;
    if (used != item.size() || !std::isfinite(v)) throw InputError("malformed number '" + item + "' in " + what);
    values.push_back(v);
  }
  return values;
}

inline UnitVector parse_direction(const std::string& text, const std::string& what) {
  const auto v = parse_reals(text, what);
  if (v.size() != 3) throw InputError(what + " needs exactly 3 components");
  const Vec3 vec{v[0], v[1], v[2]};
  if (norm(vec) < 1e-12) throw InputError(what + " is the zero vector");
  return UnitVector::normalize(vec);
}

struct ParsedFrame {
  std::array<UnitVector, 3> axes;
  std::string id;
  double correction = 0.0;
};

inline ParsedFrame parse_frame(const std::string& text) {
  if (text == "identity") {
    return {{UnitVector::from_unit({1, 0, 0}), UnitVector::from_unit({0, 1, 0}), UnitVector::from_unit({0, 0, 1})},
            "identity"};
  }
  if (text.rfind("random:", 0) == 0) {
    const std::string digits = text.substr(7);
    std::uint64_t seed = 0;
    try {
      std::size_t used = 0;
      seed = std::stoull(digits, &used);
      if (used != digits.size()) throw InputError("");
    } catch (const std::exception&) {
      throw InputError("malformed frame seed in '" + text + "'");
    }
    SplitMix64 rng(seed);
    return {random_orthonormal_triad(rng), text};
  }
  const auto v = parse_reals(text, "frame");
  if (v.size() != 9) throw InputError("frame needs 'identity', 'random:<seed>' or 9 reals");
  const Vec3 rows[3] = {{v[0], v[1], v[2]}, {v[3], v[4], v[5]}, {v[6], v[7], v[8]}};
  for (int i = 0; i < 3; ++i) {
    if (std::abs(norm(rows[i]) - 1.0) > kNormalizeTol) throw InputError("frame row is not a unit vector");
    for (int j = i + 1; j < 3; ++j) {
      if (std::abs(dot(rows[i], rows[j])) > kNormalizeTol) throw InputError("frame rows are not orthogonal");
    }
  }
  ParsedFrame f{gram_schmidt(rows[0], rows[1], rows[2]), "custom"};
  for (int i = 0; i < 3; ++i) {
    const Vec3 d = f.axes[i].vec() - rows[i];
    f.correction = std::max({f.correction, std::abs(d.x), std::abs(d.y), std::abs(d.z)});
  }
  return f;
}

inline BreakWeight parse_weight(const ExperimentSpec& spec) {
  if (spec.weight == "quantum") return BreakWeight::quantum();
  if (spec.weight == "uniform-variant") {
    if (spec.variant_stages == "both") return BreakWeight::uniform_variant(VariantStages::Both);
    if (spec.variant_stages == "first") return BreakWeight::uniform_variant(VariantStages::FirstOnly);
    throw InputError("variant-stages must be 'both' or 'first'");
  }
  throw InputError("weight must be 'quantum' or 'uniform-variant'");
}

}  // namespace detail

inline ResolvedExperiment resolve(const ExperimentSpec& spec) {
  const UnitVector state = detail::parse_direction(spec.state, "state");
  const auto frame = detail::parse_frame(spec.frame);
  const UnitVector direction =
      spec.direction.empty() ? frame.axes[0] : detail::parse_direction(spec.direction, "direction");

  ResolvedExperiment r{RodExperiment{}, spec.model, "none", state, frame.axes, frame_from(frame.axes), frame.id,
                       frame.correction};
  if (spec.model == "sphere2d") {
    r.experiment = SphereExperiment{SphereMeasurement{direction}, SphereState{state}};
  } else if (spec.model == "ks") {
    r.experiment = KSExperiment{state, direction};
  } else if (spec.model == "rod") {
    const auto weight = detail::parse_weight(spec);
    r.weight = spec.weight;
    r.experiment = RodExperiment{RodState{Ray(state)}, RodMeasurement{r.frame}, weight};
  } else {
    throw InputError("model must be one of sphere2d, ks, rod");
  }
  if (spec.expect != "self" && spec.expect != "born") throw InputError("expect must be 'self' or 'born'");
  if (spec.alpha != 0.05 && spec.alpha != 0.01 && spec.alpha != 0.001) {
    throw InputError("alpha must be 0.05, 0.01 or 0.001");
  }
  return r;
}

inline OutcomeDistribution expected_distribution(const ResolvedExperiment& r, const std::string& expect) {
  return expect == "born" ? born_distribution(r.experiment) : analytic_distribution(r.experiment);
}

namespace detail {

// Runs `body` against the --out file if one is given, else against `out`.
template <class Body>
void with_output(const ExperimentSpec& spec, std::ostream& out, Body&& body) {
  if (spec.out.empty()) {
    body(out);
    return;
  }
  std::ofstream file(spec.out, std::ios::binary);
  if (!file) throw InputError("cannot open output file '" + spec.out + "'");
  body(file);
}

inline void note_correction(const ResolvedExperiment& r, std::ostream& err) {
  if (r.frame_correction > 0.0) {
    err << "note: frame re-orthonormalized (max component change " << format_real(r.frame_correction) << ")\n";
  }
}

inline std::string state_columns(const ResolvedExperiment& r) {
  const Vec3 s = std::holds_alternative<RodExperiment>(r.experiment) ? Ray(r.state).vec() : r.state.vec();
  return format_real(s.x) + "," + format_real(s.y) + "," + format_real(s.z);
}

}  // namespace detail

inline int cmd_analytic(const ExperimentSpec& spec, std::ostream& out, std::ostream& err) {
  const auto r = resolve(spec);
  detail::note_correction(r, err);
  const auto dist = expected_distribution(r, spec.expect);

  out << "model: " << r.model << "  weight: " << r.weight << "  frame: " << r.frame_id << "\n";
  out << "state: " << detail::state_columns(r) << "\n";
  out << "outcome  probability\n";
  for (std::size_t i = 0; i < dist.size(); ++i) {
    out << "o" << (i + 1) << "       " << detail::format_real(dist[i]) << "\n";
  }
  if (const auto* rod = std::get_if<RodExperiment>(&r.experiment); rod && spec.expect == "self") {
    const auto analysis = rod_analytic(rod->state, rod->measurement, rod->weight);
    out << "break order  outcome  probability\n";
    for (const auto& p : analysis.paths) {
      out << p.path.first_broken + 1 << " -> " << p.path.second_broken + 1 << "       o" << p.path.outcome + 1
          << "       " << detail::format_real(p.probability) << "\n";
    }
  }
  out << "distribution: ";
  for (std::size_t i = 0; i < dist.size(); ++i) out << (i ? ", " : "") << detail::format_real(dist[i]);
  out << "\n";

  if (!spec.out.empty()) {
    detail::with_output(spec, out, [&](std::ostream& csv) {
      csv << "model,weight,state_x,state_y,state_z,frame_id,outcome,probability\n";
      for (std::size_t i = 0; i < dist.size(); ++i) {
        csv << r.model << "," << r.weight << "," << detail::state_columns(r) << "," << r.frame_id << "," << (i + 1)
            << "," << detail::format_real(dist[i]) << "\n";
      }
    });
  }
  return kExitOk;
}

inline constexpr const char* kSimulateCsvHeader =
    "model,weight,state_x,state_y,state_z,frame_id,outcome,count,frequency,expected,ci_low,ci_high\n";

inline int cmd_simulate(const ExperimentSpec& spec, std::ostream& out, std::ostream& err) {
  const auto r = resolve(spec);
  detail::note_correction(r, err);
  if (spec.trials < 1) throw InputError("trials must be at least 1");
  if (spec.workers < 1) throw InputError("workers must be at least 1");
  const auto expected = expected_distribution(r, spec.expect);
  const auto run = run_trials(RunConfig{r.experiment, spec.trials, spec.seed, spec.workers});
  const auto& counts = run.counts;

  detail::with_output(spec, out, [&](std::ostream& csv) {
    csv << kSimulateCsvHeader;
    for (std::size_t i = 0; i < counts.size(); ++i) {
      const double f = counts.frequency(i);
      const auto ci = normal_interval(f, counts.total());
      csv << r.model << "," << r.weight << "," << detail::state_columns(r) << "," << r.frame_id << "," << (i + 1)
          << "," << counts.count(i) << "," << detail::format_real(f) << "," << detail::format_real(expected[i]) << ","
          << detail::format_real(ci.low) << "," << detail::format_real(ci.high) << "\n";
    }
  });

  if (spec.trials < kMinTrialsForVerdict) return kExitOk;
  const auto gof = chi_square_gof(counts, expected, spec.alpha);
  out << "verdict: " << (gof.pass ? "PASS" : "FAIL") << " chi2=" << detail::format_real(gof.statistic)
      << " dof=" << gof.dof << " threshold=" << detail::format_real(gof.threshold)
      << " alpha=" << detail::format_real(gof.alpha) << " expect=" << spec.expect << " trials=" << counts.total()
      << "\n";
  if (!gof.diagnostic.empty()) out << "diagnostic: " << gof.diagnostic << "\n";
  return gof.pass ? kExitOk : kExitStatFail;
}

struct SweepPoint {
  double angle;
  double analytic;
  double empirical;
  ConfidenceInterval ci;
};

// Experiment whose state makes angle `theta` with the measured axis
// (outcome 0). For the rod the state leans towards (a2 + a3)/sqrt(2); for
// the two-outcome models towards the second frame axis made orthogonal to
// the measurement direction.
inline Experiment sweep_experiment(const ResolvedExperiment& r, double cos_t, double sin_t) {
  if (const auto* rod = std::get_if<RodExperiment>(&r.experiment)) {
    const Vec3& a1 = r.frame_axes[0].vec();
    const Vec3 diag = (r.frame_axes[1].vec() + r.frame_axes[2].vec()) * (1.0 / std::sqrt(2.0));
    const auto p = UnitVector::normalize(cos_t * a1 + sin_t * diag);
    return RodExperiment{RodState{Ray(p)}, rod->measurement, rod->weight};
  }
  const UnitVector u = std::holds_alternative<SphereExperiment>(r.experiment)
                           ? std::get<SphereExperiment>(r.experiment).measurement.u
                           : std::get<KSExperiment>(r.experiment).direction;
  Vec3 w = r.frame_axes[1].vec() - dot(r.frame_axes[1].vec(), u.vec()) * u.vec();
  if (norm(w) < 1e-6) w = r.frame_axes[2].vec() - dot(r.frame_axes[2].vec(), u.vec()) * u.vec();
  const auto v = UnitVector::normalize(cos_t * u.vec() + sin_t * UnitVector::normalize(w).vec());
  if (std::holds_alternative<SphereExperiment>(r.experiment)) return SphereExperiment{SphereMeasurement{u}, SphereState{v}};
  return KSExperiment{v, u};
}

inline std::vector<SweepPoint> sweep(const ExperimentSpec& spec) {
  if (spec.steps < 2) throw InputError("sweep needs at least 2 steps");
  if (spec.trials < 1) throw InputError("trials must be at least 1");
  const auto r = resolve(spec);
  std::vector<SweepPoint> points;
  for (std::size_t i = 0; i < spec.steps; ++i) {
    const double theta = (std::numbers::pi / 2.0) * static_cast<double>(i) / static_cast<double>(spec.steps - 1);
    // The endpoints are placed exactly.
    const double c = i == 0 ? 1.0 : (i + 1 == spec.steps ? 0.0 : std::cos(theta));
    const double s = i == 0 ? 0.0 : (i + 1 == spec.steps ? 1.0 : std::sin(theta));
    ResolvedExperiment point = r;
    point.experiment = sweep_experiment(r, c, s);
    const double analytic = expected_distribution(point, spec.expect)[0];
    const auto run = run_trials(RunConfig{point.experiment, spec.trials, stream_seed(spec.seed, i), spec.workers, 0});
    const double f = run.counts.frequency(0);
    points.push_back({theta, analytic, f, normal_interval(f, run.counts.total())});
  }
  return points;
}

inline int cmd_sweep(const ExperimentSpec& spec, std::ostream& out, std::ostream& err) {
  const auto points = sweep(spec);
  detail::note_correction(resolve(spec), err);
  detail::with_output(spec, out, [&](std::ostream& csv) {
    csv << "angle,analytic,empirical,ci_low,ci_high\n";
    for (const auto& p : points) {
      csv << detail::format_real(p.angle) << "," << detail::format_real(p.analytic) << ","
          << detail::format_real(p.empirical) << "," << detail::format_real(p.ci.low) << ","
          << detail::format_real(p.ci.high) << "\n";
    }
  });
  return kExitOk;
}

struct FrameCheckResult {
  FrameAdditivityReport additivity;
  double frame_dependence = 0.0;  // over each frame paired with its pi/4 rotation about axis 1
};

// Random frame number `index` of a framecheck run.
inline Frame framecheck_frame(std::uint64_t seed, std::uint64_t index) {
  auto rng = SplitMix64::for_stream(seed, index);
  return random_frame(rng);
}

inline FrameCheckResult framecheck(const ExperimentSpec& spec) {
  if (spec.frames < 1) throw InputError("frames must be at least 1");
  const auto r = resolve(spec);
  FrameFunction measure;
  if (spec.measure == "gleason") {
    measure = as_frame_function(gleason_measure(RealStateVector(r.state)));
  } else if (spec.measure == "rod") {
    measure = rod_marginal(RodState{Ray(r.state)}, detail::parse_weight(spec));
  } else {
    throw InputError("measure must be 'gleason' or 'rod'");
  }
  std::vector<Frame> frames;
  std::vector<SharedAxisPair> pairs;
  frames.reserve(spec.frames);
  pairs.reserve(spec.frames);
  for (std::size_t f = 0; f < spec.frames; ++f) {
    frames.push_back(framecheck_frame(spec.seed, f));
    pairs.push_back(rotated_about_axis(frames.back(), 0, std::numbers::pi / 4.0));
  }
  return {frame_additivity_check(measure, frames), frame_dependence(measure, pairs)};
}

inline int cmd_framecheck(const ExperimentSpec& spec, std::ostream& out, std::ostream&) {
  const auto res = framecheck(spec);
  const std::string name = spec.measure == "rod" ? "rod:" + spec.weight : spec.measure;
  detail::with_output(spec, out, [&](std::ostream& csv) {
    csv << "measure,frames,max_deviation,frame_dependence\n";
    csv << name << "," << res.additivity.frames_checked << "," << detail::format_real(res.additivity.max_deviation)
        << "," << detail::format_real(res.frame_dependence) << "\n";
  });
  return res.additivity.max_deviation <= kIdentityTol ? kExitOk : kExitStatFail;
}

// Dispatches on spec.command. Input errors are reported on `err` and mapped
// to kExitInputError.
inline int run_command(const ExperimentSpec& spec, std::ostream& out, std::ostream& err) {
  try {
    if (spec.command == "analytic") return cmd_analytic(spec, out, err);
    if (spec.command == "simulate") return cmd_simulate(spec, out, err);
    if (spec.command == "sweep") return cmd_sweep(spec, out, err);
    if (spec.command == "framecheck") return cmd_framecheck(spec, out, err);
    throw InputError("unknown command '" + spec.command + "'");
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  }
}

}  // namespace hm
