#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hqlab/hq_operator.hpp"
#include "hqlab/spectrum.hpp"

namespace hqlab {

/// Constraint placed on sampled eigenvalue lists.
///  - Unconstrained: any point of the admissibility cone.
///  - FirstNegative: cone point with the designated first coordinate < 0.
///  - Pinched: first coordinate positive, rest sorted non-increasing with a
///    negative minimum, first >= delta * second, -last >= eps * first.
enum class SampleConstraint { Unconstrained, FirstNegative, Pinched };

struct SampleSpec {
  OperatorConfig cfg;
  SampleConstraint constraint = SampleConstraint::Unconstrained;
  double delta = 0.1;  // pinched only
  double eps = 0.5;    // pinched only
  std::int64_t count = 1;
  std::uint64_t seed = 0;
  double box_radius = 1.0;

  void validate() const;
};

/// Outcome of one Monte-Carlo verification run. `pass` tracks
/// empirical_min_ratio >= theoretical_constant - 1e-12.
struct VerificationReport {
  std::string lemma;
  OperatorConfig cfg;
  std::optional<double> delta;
  std::optional<double> eps;
  std::int64_t count = 0;
  std::uint64_t seed = 0;
  double theoretical_constant = 0.0;
  double empirical_min_ratio = 0.0;
  Spectrum argmin_sample;
  std::int64_t samples_accepted = 0;
  std::int64_t samples_rejected = 0;
  bool pass = false;
};

/// Proved lower bound for the ratio d/dlambda_1 over the derivative sum when
/// the first coordinate is negative: the minimum of the negative-component
/// case constant N(k-l)/(k(N-l)(N-k+1)p) and the counting-case constant
/// 1/(p(C(n-1,p)+1)).
double first_negative_constant(const OperatorConfig& cfg);

/// Proved lower bound for the same ratio under the pinched hypothesis with
/// parameters (delta, eps); minimum over the proof's case constants.
double pinched_constant(const OperatorConfig& cfg, double delta, double eps);

/// Rejection sampler over the admissibility cone; deterministic in the seed.
/// Throws SamplingExhausted when the acceptance rate stays below 1e-4 after
/// 1e7 proposals (or the constraint set is provably empty).
std::vector<Spectrum> sample_admissible(const SampleSpec& spec);

/// Independent re-check of the constraint for one vector; used to validate
/// sampler output through a separate code path.
bool satisfies_constraint(const SampleSpec& spec, const Spectrum& lam);

/// Monte-Carlo verification of the first-negative derivative bound.
VerificationReport verify_first_negative_bound(const SampleSpec& spec);

/// Monte-Carlo verification of the pinched derivative bound.
VerificationReport verify_pinched_bound(const SampleSpec& spec);

/// Batch re-verification of the classical symmetric-function properties and
/// the ordering/concavity/sum bounds of the quotient on sampled cone points.
/// One report per property.
std::vector<VerificationReport> verify_structure_suite(const SampleSpec& spec);

/// All (n, p, k, l) with n in {3,4,5}, 1 <= p <= n-1, 2 <= k <= N, 0 <= l < k,
/// skipping N > 30. The default verification sweep grid.
std::vector<OperatorConfig> default_sweep_grid();

/// True when the constraint set is empty for structural reasons (p = 1 and
/// k = N force the positive orthant, so no coordinate can be negative).
bool constraint_provably_empty(const SampleSpec& spec);

}  // namespace hqlab
