#include "steerkit/search.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>

namespace steerkit {

namespace {

using Objective = std::function<double(const std::vector<double>&)>;

// Deterministic Nelder-Mead minimizer (reflection 1, expansion 2,
// contraction 0.5, shrink 0.5). Ties in the ordering break by vertex
// index, so identical inputs always walk the same path.
struct NmResult {
  std::vector<double> x;
  double value = 0.0;
};

NmResult nelder_mead(const Objective& f, const std::vector<double>& x0,
                     const std::vector<double>& step, int max_iters,
                     double tol) {
  size_t dim = x0.size();
  size_t n_vertices = dim + 1;
  std::vector<std::vector<double>> simplex(n_vertices, x0);
  for (size_t i = 0; i < dim; ++i) simplex[i + 1][i] += step[i];
  std::vector<double> values(n_vertices);
  for (size_t i = 0; i < n_vertices; ++i) values[i] = f(simplex[i]);

  std::vector<size_t> order(n_vertices);
  auto sort_order = [&] {
    std::iota(order.begin(), order.end(), size_t{0});
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
      if (values[a] != values[b]) return values[a] < values[b];
      return a < b;
    });
  };

  for (int iter = 0; iter < max_iters; ++iter) {
    sort_order();
    size_t best = order[0];
    size_t worst = order[n_vertices - 1];
    size_t second_worst = order[n_vertices - 2];
    if (values[worst] - values[best] < tol) break;

    std::vector<double> centroid(dim, 0.0);
    for (size_t i = 0; i < n_vertices; ++i) {
      if (i == worst) continue;
      for (size_t d = 0; d < dim; ++d) centroid[d] += simplex[i][d];
    }
    for (double& c : centroid) c /= static_cast<double>(dim);

    auto blend = [&](double coeff) {
      std::vector<double> x(dim);
      for (size_t d = 0; d < dim; ++d) {
        x[d] = centroid[d] + coeff * (centroid[d] - simplex[worst][d]);
      }
      return x;
    };

    std::vector<double> reflected = blend(1.0);
    double f_reflected = f(reflected);
    if (f_reflected < values[best]) {
      std::vector<double> expanded = blend(2.0);
      double f_expanded = f(expanded);
      if (f_expanded < f_reflected) {
        simplex[worst] = std::move(expanded);
        values[worst] = f_expanded;
      } else {
        simplex[worst] = std::move(reflected);
        values[worst] = f_reflected;
      }
      continue;
    }
    if (f_reflected < values[second_worst]) {
      simplex[worst] = std::move(reflected);
      values[worst] = f_reflected;
      continue;
    }
    std::vector<double> contracted = blend(f_reflected < values[worst] ? 0.5 : -0.5);
    double f_contracted = f(contracted);
    if (f_contracted < std::min(values[worst], f_reflected)) {
      simplex[worst] = std::move(contracted);
      values[worst] = f_contracted;
      continue;
    }
    for (size_t i = 0; i < n_vertices; ++i) {
      if (i == best) continue;
      for (size_t d = 0; d < dim; ++d) {
        simplex[i][d] = simplex[best][d] + 0.5 * (simplex[i][d] - simplex[best][d]);
      }
      values[i] = f(simplex[i]);
    }
  }
  sort_order();
  return NmResult{simplex[order[0]], values[order[0]]};
}

// Which frames the objective actually varies.
enum class FreeFrames { Tied, BobOnly, CharlieOnly, Both };

FreeFrames free_frames(const InequalitySpec& spec, bool independent) {
  if (!independent) return FreeFrames::Tied;
  switch (spec.scope) {
    case Scope::BobOnly: return FreeFrames::BobOnly;
    case Scope::CharlieOnly: return FreeFrames::CharlieOnly;
    default: return FreeFrames::Both;
  }
}

std::pair<FrameAngle, FrameAngle> frames_from_params(
    FreeFrames mode, const std::vector<double>& x) {
  switch (mode) {
    case FreeFrames::Tied: {
      FrameAngle f = FrameAngle::canonical(x[0], x[1]);
      return {f, f};
    }
    case FreeFrames::BobOnly:
      return {FrameAngle::canonical(x[0], x[1]), FrameAngle{}};
    case FreeFrames::CharlieOnly:
      return {FrameAngle{}, FrameAngle::canonical(x[0], x[1])};
    case FreeFrames::Both:
      return {FrameAngle::canonical(x[0], x[1]),
              FrameAngle::canonical(x[2], x[3])};
  }
  throw ValidationError("invalid frame mode");
}

using LhsFn = std::function<double(const FrameAngle&, const FrameAngle&)>;

MaximizeResult maximize_impl(const LhsFn& lhs_at, const InequalitySpec& spec,
                             const SearchConfig& config) {
  if (config.grid_n < 2 || config.grid_n_independent < 2) {
    throw ValidationError("grid resolution must be at least 2");
  }
  if (config.refine_iters < 0 || !(config.tol > 0.0)) {
    throw ValidationError("invalid refinement settings");
  }
  FreeFrames mode = free_frames(spec, config.independent_frames);
  bool four_dim = mode == FreeFrames::Both;
  int n = four_dim ? config.grid_n_independent : config.grid_n;
  double theta_step = kPi / n;
  double phi_step = 2.0 * kPi / n;

  Objective neg = [&](const std::vector<double>& x) {
    auto [fb, fc] = frames_from_params(mode, x);
    return -lhs_at(fb, fc);
  };

  // Coarse grid in lexicographic order; strict improvement keeps the
  // lexicographically smallest argmax.
  std::vector<double> best_x;
  double best_value = 0.0;
  bool first = true;
  std::vector<int> t(four_dim ? 4 : 2, 0);
  auto point = [&](const std::vector<int>& idx) {
    std::vector<double> x(idx.size());
    for (size_t d = 0; d < idx.size(); ++d) {
      x[d] = idx[d] * (d % 2 == 0 ? theta_step : phi_step);
    }
    return x;
  };
  std::function<void(size_t)> visit = [&](size_t d) {
    if (d == t.size()) {
      std::vector<double> x = point(t);
      double value = neg(x);
      if (first || value < best_value) {
        first = false;
        best_value = value;
        best_x = x;
      }
      return;
    }
    int limit = d % 2 == 0 ? n + 1 : n;  // phi = 2pi duplicates phi = 0
    for (t[d] = 0; t[d] < limit; ++t[d]) visit(d + 1);
  };
  visit(0);

  std::vector<double> step(best_x.size());
  for (size_t d = 0; d < step.size(); ++d) {
    step[d] = d % 2 == 0 ? theta_step : phi_step;
  }
  NmResult refined =
      nelder_mead(neg, best_x, step, config.refine_iters, config.tol);
  if (refined.value < best_value) {
    best_value = refined.value;
    best_x = refined.x;
  }

  auto [fb, fc] = frames_from_params(mode, best_x);
  MaximizeResult result;
  result.frame_bob = fb;
  result.frame_charlie = fc;
  result.lhs = lhs_at(fb, fc);
  result.report.inequality = spec.id;
  result.report.lhs = result.lhs;
  result.report.bound = spec.bound();
  result.report.violated = result.lhs > result.report.bound;
  result.report.frame_bob = fb;
  result.report.frame_charlie = fc;
  return result;
}

}  // namespace

MaximizeResult maximize_violation(const StateVector& psi,
                                  const InequalitySpec& spec,
                                  const SearchConfig& config) {
  LhsFn lhs_at = [&](const FrameAngle& fb, const FrameAngle& fc) {
    return evaluate_inequality(psi, spec, fb, fc).lhs;
  };
  return maximize_impl(lhs_at, spec, config);
}

MaximizeResult maximize_violation(const DensityMatrix& rho,
                                  const InequalitySpec& spec,
                                  const SearchConfig& config) {
  LhsFn lhs_at = [&](const FrameAngle& fb, const FrameAngle& fc) {
    return evaluate_inequality(rho, spec, fb, fc).lhs;
  };
  return maximize_impl(lhs_at, spec, config);
}

ScanCurve alpha_scan(int steps, FramePolicy policy,
                     const FrameAngle& fixed_frame,
                     const SearchConfig& config) {
  if (steps < 2) {
    throw ValidationError("alpha scan needs at least 2 steps");
  }
  const InequalitySpec& spec = inequality_by_id(InequalityId::S1Diag);
  ScanCurve curve;
  curve.policy = policy;
  curve.fixed_frame = fixed_frame;
  if (policy == FramePolicy::Fixed) fixed_frame.validate();
  curve.samples.reserve(steps);
  for (int t = 0; t < steps; ++t) {
    double alpha = static_cast<double>(t) / (steps - 1);
    StateVector psi = generalized_ghz(alpha);
    ScanSample sample;
    sample.alpha = alpha;
    sample.bound = spec.bound();
    if (policy == FramePolicy::Fixed) {
      sample.lhs = evaluate_inequality(psi, spec, fixed_frame, fixed_frame).lhs;
    } else {
      sample.lhs = maximize_violation(psi, spec, config).lhs;
    }
    curve.samples.push_back(sample);
  }
  return curve;
}

std::string steering_label_name(SteeringLabel label) {
  switch (label) {
    case SteeringLabel::Inconclusive: return "inconclusive";
    case SteeringLabel::CollectiveWitnessed: return "collective-witnessed";
    case SteeringLabel::IndividuallySteerable: return "individually-steerable";
    case SteeringLabel::BothSetsViolated: return "both-sets-violated";
  }
  throw ValidationError("invalid steering label");
}

ClassificationResult classify_collective(const StateVector& psi,
                                         const SearchConfig& config) {
  ClassificationResult result;
  bool set1 = false;
  bool set2 = false;
  const auto& catalog = inequality_catalog();
  for (int idx = 0; idx < 10; ++idx) {
    result.per_inequality[idx] = maximize_violation(psi, catalog[idx], config);
    if (result.per_inequality[idx].report.violated) {
      (idx < 6 ? set1 : set2) = true;
    }
  }
  DensityMatrix rho = density_from_vector(psi);
  result.concurrence_ab =
      concurrence(partial_trace(rho, {Subsystem::A, Subsystem::B}));
  result.concurrence_ac =
      concurrence(partial_trace(rho, {Subsystem::A, Subsystem::C}));

  if (!set1) {
    result.label = SteeringLabel::Inconclusive;
  } else if (!set2) {
    result.label = SteeringLabel::CollectiveWitnessed;
  } else if (std::min(result.concurrence_ab, result.concurrence_ac) <=
             kValidationTol) {
    result.label = SteeringLabel::IndividuallySteerable;
  } else {
    result.label = SteeringLabel::BothSetsViolated;
  }
  return result;
}

std::vector<ReferencePairResult> appendix_b_check(const SearchConfig& config) {
  struct Pair {
    const char* label;
    double theta;
    double phi;
  };
  const Pair pairs[6] = {
      {"bell-ab-times-0", kPi, kPi},
      {"bell-ac-times-1", kPi, kPi},
      {"ghz", kPi / 2.0, 0.0},
      {"plus-one-plus", kPi / 2.0, kPi},
      {"bell-ab-times-0", kPi / 2.0, 3.0 * kPi / 2.0},
      {"plus-one-plus", 0.0, 3.0 * kPi / 2.0},
  };

  // Tied-frame maxima per distinct state, shared across pairs.
  SearchConfig tied = config;
  tied.independent_frames = false;
  std::map<std::string, std::array<double, 10>> max_cache;
  auto state_maxima = [&](const std::string& label) {
    auto it = max_cache.find(label);
    if (it != max_cache.end()) return it->second;
    StateVector psi = named_state(label);
    std::array<double, 10> values{};
    for (int idx = 0; idx < 10; ++idx) {
      values[idx] = maximize_violation(psi, inequality_catalog()[idx], tied).lhs;
    }
    max_cache[label] = values;
    return values;
  };

  std::vector<ReferencePairResult> results;
  for (const Pair& pair : pairs) {
    ReferencePairResult entry;
    entry.state_label = pair.label;
    entry.frame = FrameAngle{pair.theta, pair.phi};
    StateVector psi = named_state(pair.label);
    const std::array<double, 10>& maxima = state_maxima(pair.label);
    for (int idx = 0; idx < 10; ++idx) {
      const InequalitySpec& spec = inequality_catalog()[idx];
      ViolationReport report =
          evaluate_inequality(psi, spec, entry.frame, entry.frame);
      ReferencePairEntry& cell = entry.entries[idx];
      cell.id = spec.id;
      cell.lhs = report.lhs;
      cell.bound = report.bound;
      cell.violated = report.violated;
      cell.state_max = maxima[idx];
      cell.attains_state_max = std::abs(report.lhs - maxima[idx]) <= 1e-6;
      cell.attains_theoretical_max =
          std::abs(report.lhs - spec.theoretical_max()) <= 1e-6;
    }
    results.push_back(std::move(entry));
  }
  return results;
}

}  // namespace steerkit
