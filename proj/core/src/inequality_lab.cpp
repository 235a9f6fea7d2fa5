#include "hqlab/inequality_lab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hqlab/rng.hpp"

namespace hqlab {

namespace {

constexpr int kStreams = 8;
constexpr std::uint64_t kBudgetWindow = 10'000'000;
constexpr double kMinAcceptanceRate = 1e-4;
constexpr double kPassSlack = 1e-12;

double safe_min(double a, double b) { return a < b ? a : b; }

}  // namespace

void SampleSpec::validate() const {
  cfg.validate();
  if (count < 1) {
    throw InvalidInput("SampleSpec: count must be >= 1");
  }
  if (!(box_radius > 0.0) || !std::isfinite(box_radius)) {
    throw InvalidInput("SampleSpec: box_radius must be positive");
  }
  if (constraint == SampleConstraint::Pinched) {
    if (!(delta > 0.0 && delta <= 1.0) || !(eps > 0.0 && eps <= 1.0)) {
      throw InvalidInput("SampleSpec: pinched delta and eps must lie in (0, 1]");
    }
  }
}

double first_negative_constant(const OperatorConfig& cfg) {
  cfg.validate();
  if (cfg.k < 2) {
    throw InvalidInput("first_negative_constant: requires k >= 2");
  }
  const double N = static_cast<double>(cfg.N());
  const double k = cfg.k;
  const double l = cfg.l;
  const double p = cfg.p;
  const double negative_component_case =
      N * (k - l) / (k * (N - l) * (N - k + 1.0) * p);
  const double counting_case = 1.0 / (p * (binomial(cfg.n - 1, cfg.p) + 1.0));
  return safe_min(negative_component_case, counting_case);
}

double pinched_constant(const OperatorConfig& cfg, double delta, double eps) {
  cfg.validate();
  if (cfg.k < 2) {
    throw InvalidInput("pinched_constant: requires k >= 2");
  }
  if (!(delta > 0.0 && delta <= 1.0) || !(eps > 0.0 && eps <= 1.0)) {
    throw InvalidInput("pinched_constant: delta and eps must lie in (0, 1]");
  }
  const double N = static_cast<double>(cfg.N());
  const double k = cfg.k;
  const double l = cfg.l;
  const double p = cfg.p;
  const double inf = std::numeric_limits<double>::infinity();

  // Smallest-sum-still-moderate case, split on whether the first coordinate
  // is below the smallest tail block.
  const double case_small_first = 1.0 / (p * N);
  const double nm_factor = 1.0 - l * (N - k) / (k * (N - l));
  double case_pinned_tail = inf;
  if (cfg.p > 1) {
    const double c12 =
        eps * eps * nm_factor /
        (4.0 * (p - 1.0) * (p - 1.0) * binomial(cfg.n - 1, cfg.p));
    case_pinned_tail = c12 / ((1.0 + c12) * p);
  }

  // Very negative smallest sum: the chain through the top-sum partials.
  const double theta = eps * delta / (2.0 * (N - 1.0) * p);
  const double theta1 =
      N > 2.0 ? eps * delta / (4.0 * (N - 2.0) * p) : inf;
  const auto claim_constant = [&](int m) -> double {
    if (m <= 0) return 1.0;
    const double subcase_tail =
        eps * delta * theta / (4.0 * (m + 1.0) * (p - 1.0 + delta));
    return safe_min(theta1 * theta, subcase_tail);
  };
  const double case_deep_negative = N * (k - l) / (k * (N - l)) *
                                    claim_constant(cfg.k - 1) *
                                    claim_constant(cfg.l) /
                                    ((N - k + 1.0) * p);

  return safe_min(case_small_first,
                  safe_min(case_pinned_tail, case_deep_negative));
}

bool constraint_provably_empty(const SampleSpec& spec) {
  // p = 1 with k = N pins the cone to the positive orthant, so the
  // negative-coordinate constraints cannot be met.
  if (spec.constraint == SampleConstraint::Unconstrained) return false;
  return spec.cfg.p == 1 && spec.cfg.k == spec.cfg.N();
}

namespace {

/// Shared rejection machinery. Proposals adapt their sign pattern to the
/// constraint (still uniform box draws); every accepted vector is re-checked
/// downstream through satisfies_constraint.
class ConeSampler {
 public:
  explicit ConeSampler(const SampleSpec& spec)
      : spec_(spec), table_(spec.cfg.p, spec.cfg.n) {
    sums_.resize(static_cast<std::size_t>(table_.size()));
    sigma_.resize(static_cast<std::size_t>(spec_.cfg.k) + 1);
    if (constraint_provably_empty(spec_)) {
      throw SamplingExhausted(
          "sample_admissible: constraint set is empty (p = 1 with k = N "
          "forces all eigenvalues positive)",
          0, 0);
    }
  }

  void next(Rng& rng, std::vector<double>& lam) {
    const int n = spec_.cfg.n;
    lam.resize(static_cast<std::size_t>(n));
    const double R = spec_.box_radius;
    while (true) {
      ++proposals_;
      if (proposals_ % kBudgetWindow == 0 &&
          static_cast<double>(accepted_) <
              kMinAcceptanceRate * static_cast<double>(proposals_)) {
        throw SamplingExhausted(
            "sample_admissible: acceptance rate below 1e-4 after " +
                std::to_string(proposals_) + " proposals",
            proposals_, accepted_);
      }
      switch (spec_.constraint) {
        case SampleConstraint::Unconstrained: {
          const double shift = rng.uniform(0.0, R);
          for (double& x : lam) x = rng.uniform(-R, R) + shift;
          break;
        }
        case SampleConstraint::FirstNegative: {
          lam[0] = rng.uniform(-R, 0.0);
          for (int i = 1; i < n; ++i) {
            lam[static_cast<std::size_t>(i)] = rng.uniform(-R, R);
          }
          break;
        }
        case SampleConstraint::Pinched: {
          lam[0] = rng.uniform(0.0, R);
          lam[static_cast<std::size_t>(n - 1)] = rng.uniform(-R, 0.0);
          for (int i = 1; i < n - 1; ++i) {
            lam[static_cast<std::size_t>(i)] = rng.uniform(-R, R);
          }
          std::sort(lam.begin() + 1, lam.end(), std::greater<double>());
          break;
        }
      }
      if (accept(lam)) {
        ++accepted_;
        return;
      }
    }
  }

  std::uint64_t proposals() const { return proposals_; }
  std::uint64_t accepted() const { return accepted_; }

 private:
  bool accept(const std::vector<double>& lam) {
    switch (spec_.constraint) {
      case SampleConstraint::Unconstrained:
        break;
      case SampleConstraint::FirstNegative:
        if (!(lam[0] < 0.0)) return false;
        break;
      case SampleConstraint::Pinched: {
        const std::size_t last = lam.size() - 1;
        if (!(lam[0] > 0.0) || !(lam[last] < 0.0)) return false;
        if (!(lam[0] >= spec_.delta * lam[1])) return false;
        if (!(-lam[last] >= spec_.eps * lam[0])) return false;
        break;
      }
    }
    for (int r = 0; r < table_.size(); ++r) {
      double s = 0.0;
      for (int e : table_.at(r).entries) {
        s += lam[static_cast<std::size_t>(e - 1)];
      }
      sums_[static_cast<std::size_t>(r)] = s;
    }
    elementary_symmetric_table(std::span<const double>(sums_), spec_.cfg.k,
                               sigma_.data());
    for (int j = 1; j <= spec_.cfg.k; ++j) {
      if (!(sigma_[static_cast<std::size_t>(j)] > 0.0)) return false;
    }
    return true;
  }

  const SampleSpec& spec_;
  IndexTable table_;
  std::vector<double> sums_;
  std::vector<double> sigma_;
  std::uint64_t proposals_ = 0;
  std::uint64_t accepted_ = 0;
};

std::int64_t stream_quota(std::int64_t count, int stream) {
  const std::int64_t base = count / kStreams;
  return base + (stream < count % kStreams ? 1 : 0);
}

}  // namespace

bool satisfies_constraint(const SampleSpec& spec, const Spectrum& lam) {
  if (static_cast<int>(lam.size()) != spec.cfg.n) return false;
  if (!lam.all_finite()) return false;
  switch (spec.constraint) {
    case SampleConstraint::Unconstrained:
      break;
    case SampleConstraint::FirstNegative:
      if (!(lam[0] < 0.0)) return false;
      break;
    case SampleConstraint::Pinched: {
      const std::size_t last = lam.size() - 1;
      for (std::size_t i = 1; i + 1 < lam.size(); ++i) {
        if (lam[i] < lam[i + 1]) return false;
      }
      if (!(lam[0] > 0.0)) return false;
      if (!(lam[last] < 0.0)) return false;
      if (!(lam[0] >= spec.delta * lam[1])) return false;
      if (!(-lam[last] >= spec.eps * lam[0])) return false;
      break;
    }
  }
  const IndexTable table(spec.cfg.p, spec.cfg.n);
  const Spectrum sums = lambda_of(lam, table);
  return in_garding_cone(ConeQuery{spec.cfg.k}, sums);
}

std::vector<Spectrum> sample_admissible(const SampleSpec& spec) {
  spec.validate();
  std::vector<Spectrum> out;
  out.reserve(static_cast<std::size_t>(spec.count));
  ConeSampler sampler(spec);
  std::vector<double> lam;
  for (int s = 0; s < kStreams; ++s) {
    Rng rng = Rng::stream(spec.seed, static_cast<std::uint64_t>(s));
    const std::int64_t quota = stream_quota(spec.count, s);
    for (std::int64_t i = 0; i < quota; ++i) {
      sampler.next(rng, lam);
      out.emplace_back(lam);
    }
  }
  return out;
}

namespace {

VerificationReport run_ratio_verification(const SampleSpec& spec,
                                          const std::string& lemma,
                                          double constant) {
  VerificationReport rep;
  rep.lemma = lemma;
  rep.cfg = spec.cfg;
  if (spec.constraint == SampleConstraint::Pinched) {
    rep.delta = spec.delta;
    rep.eps = spec.eps;
  }
  rep.count = spec.count;
  rep.seed = spec.seed;
  rep.theoretical_constant = constant;
  rep.empirical_min_ratio = std::numeric_limits<double>::infinity();

  const IndexTable table(spec.cfg.p, spec.cfg.n);
  const std::vector<int>& first_positions = table.positions_containing(1);
  QuotientGradientKernel kernel;
  kernel.configure(spec.cfg.k, spec.cfg.l);

  ConeSampler sampler(spec);
  std::vector<double> lam;
  std::vector<double> sums(static_cast<std::size_t>(table.size()));
  for (int s = 0; s < kStreams; ++s) {
    Rng rng = Rng::stream(spec.seed, static_cast<std::uint64_t>(s));
    const std::int64_t quota = stream_quota(spec.count, s);
    for (std::int64_t i = 0; i < quota; ++i) {
      sampler.next(rng, lam);
      Spectrum sample(lam);
      if (!satisfies_constraint(spec, sample)) {
        throw InvalidInput(
            "verification: sampler and independent checker disagree");
      }
      for (int r = 0; r < table.size(); ++r) {
        double acc = 0.0;
        for (int e : table.at(r).entries) {
          acc += lam[static_cast<std::size_t>(e - 1)];
        }
        sums[static_cast<std::size_t>(r)] = acc;
      }
      kernel.eval(std::span<const double>(sums));
      double first = 0.0;
      for (int r : first_positions) {
        first += kernel.gradient()[static_cast<std::size_t>(r)];
      }
      const double total =
          static_cast<double>(spec.cfg.p) * kernel.gradient_sum();
      const double ratio = first / total;
      if (ratio < rep.empirical_min_ratio) {
        rep.empirical_min_ratio = ratio;
        rep.argmin_sample = std::move(sample);
      }
    }
  }
  rep.samples_accepted = static_cast<std::int64_t>(sampler.accepted());
  rep.samples_rejected =
      static_cast<std::int64_t>(sampler.proposals() - sampler.accepted());
  rep.pass = rep.empirical_min_ratio >= rep.theoretical_constant - kPassSlack;
  return rep;
}

}  // namespace

VerificationReport verify_first_negative_bound(const SampleSpec& spec) {
  spec.validate();
  if (spec.constraint != SampleConstraint::FirstNegative) {
    throw InvalidInput(
        "verify_first_negative_bound: constraint must be FirstNegative");
  }
  return run_ratio_verification(spec, "first_negative_bound",
                                first_negative_constant(spec.cfg));
}

VerificationReport verify_pinched_bound(const SampleSpec& spec) {
  spec.validate();
  if (spec.constraint != SampleConstraint::Pinched) {
    throw InvalidInput("verify_pinched_bound: constraint must be Pinched");
  }
  return run_ratio_verification(
      spec, "pinched_bound",
      pinched_constant(spec.cfg, spec.delta, spec.eps));
}

std::vector<OperatorConfig> default_sweep_grid() {
  std::vector<OperatorConfig> grid;
  for (int n : {3, 4, 5}) {
    for (int p = 1; p <= n - 1; ++p) {
      const int N = static_cast<int>(binomial(n, p));
      if (N > 30) continue;
      for (int k = 2; k <= N; ++k) {
        for (int l = 0; l < k; ++l) {
          grid.push_back(OperatorConfig{n, p, k, l});
        }
      }
    }
  }
  return grid;
}

namespace {

/// Generic box-with-shift rejection sampler for Garding cone points in R^d.
std::vector<std::vector<double>> sample_cone_vectors(int d, int level,
                                                     std::int64_t count,
                                                     std::uint64_t seed,
                                                     double radius) {
  std::vector<std::vector<double>> out;
  out.reserve(static_cast<std::size_t>(count));
  std::vector<double> v(static_cast<std::size_t>(d));
  std::vector<double> sigma(static_cast<std::size_t>(level) + 1);
  std::uint64_t proposals = 0;
  std::uint64_t accepted = 0;
  for (int s = 0; s < kStreams; ++s) {
    Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(s));
    const std::int64_t quota = stream_quota(count, s);
    for (std::int64_t i = 0; i < quota; ++i) {
      while (true) {
        ++proposals;
        if (proposals % kBudgetWindow == 0 &&
            static_cast<double>(accepted) <
                kMinAcceptanceRate * static_cast<double>(proposals)) {
          throw SamplingExhausted(
              "sample_cone_vectors: acceptance rate below 1e-4", proposals,
              accepted);
        }
        const double shift = rng.uniform(0.0, radius);
        for (double& x : v) x = rng.uniform(-radius, radius) + shift;
        elementary_symmetric_table(std::span<const double>(v), level,
                                   sigma.data());
        bool ok = true;
        for (int j = 1; j <= level; ++j) {
          if (!(sigma[static_cast<std::size_t>(j)] > 0.0)) {
            ok = false;
            break;
          }
        }
        if (ok) {
          ++accepted;
          out.push_back(v);
          break;
        }
      }
    }
  }
  return out;
}

struct MinTracker {
  double min_value = std::numeric_limits<double>::infinity();
  Spectrum argmin;

  void update(double value, const std::vector<double>& sample) {
    if (value < min_value) {
      min_value = value;
      argmin = Spectrum(sample);
    }
  }
};

VerificationReport make_structure_report(const SampleSpec& spec,
                                         const std::string& id,
                                         double constant,
                                         const MinTracker& tracker) {
  VerificationReport rep;
  rep.lemma = id;
  rep.cfg = spec.cfg;
  rep.count = spec.count;
  rep.seed = spec.seed;
  rep.theoretical_constant = constant;
  rep.empirical_min_ratio = tracker.min_value;
  rep.argmin_sample = tracker.argmin;
  rep.samples_accepted = spec.count;
  rep.pass = rep.empirical_min_ratio >= constant - kPassSlack;
  return rep;
}

}  // namespace

std::vector<VerificationReport> verify_structure_suite(const SampleSpec& spec) {
  spec.validate();
  const OperatorConfig& cfg = spec.cfg;
  const int N = cfg.N();
  const int d = N;  // generic cone points live in R^N
  const int k = cfg.k;
  const int l = cfg.l;

  std::vector<VerificationReport> reports;

  // Part 1: symmetric-function properties on generic cone points in R^N.
  {
    const auto points = sample_cone_vectors(d, k, spec.count, spec.seed ^ 0x51,
                                            spec.box_radius);
    MinTracker partial_positive;
    MinTracker split_identity;
    MinTracker sorted_partials;
    MinTracker top_entry;
    MinTracker newton_maclaurin;
    MinTracker gradient_sum;
    MinTracker fd_match;
    RemovalTables tables;
    std::vector<double> sigma(static_cast<std::size_t>(k) + 1);

    std::int64_t index = 0;
    for (const auto& v : points) {
      tables.build(std::span<const double>(v), k);
      elementary_symmetric_table(std::span<const double>(v), k, sigma.data());
      const double sig_k = sigma[static_cast<std::size_t>(k)];

      std::vector<double> removed(static_cast<std::size_t>(d));
      for (int i = 0; i < d; ++i) {
        removed[static_cast<std::size_t>(i)] = tables.removed_sigma(i, k - 1);
        partial_positive.update(removed[static_cast<std::size_t>(i)], v);
      }

      // sigma_k = sigma_k(v|i) + v_i sigma_{k-1}(v|i), every i.
      for (int i = 0; i < d; ++i) {
        const double lhs = sig_k;
        const double rhs = tables.removed_sigma(i, k) +
                           v[static_cast<std::size_t>(i)] *
                               removed[static_cast<std::size_t>(i)];
        const double rel = std::abs(lhs - rhs) / (1.0 + std::abs(lhs));
        split_identity.update(-rel, v);
      }

      // Sorted views: partials ordered, top entry dominates.
      std::vector<double> sorted = v;
      std::stable_sort(sorted.begin(), sorted.end(), std::greater<double>());
      RemovalTables sorted_tables;
      sorted_tables.build(std::span<const double>(sorted), k);
      double prev = sorted_tables.removed_sigma(0, k - 1);
      for (int i = 1; i < d; ++i) {
        const double cur = sorted_tables.removed_sigma(i, k - 1);
        const double scale = 1.0 + std::abs(prev) + std::abs(cur);
        sorted_partials.update((cur - prev) / scale, v);
        prev = cur;
      }
      {
        const double lhs = sorted[0] * sorted_tables.removed_sigma(0, k - 1);
        const double rhs = (static_cast<double>(k) / d) * sig_k;
        top_entry.update((lhs - rhs) / (1.0 + std::abs(rhs)), v);
      }

      // Normalized quotient-root monotonicity across levels (2,0) vs (1,0).
      if (k >= 2) {
        const double sig_1 = sigma[1];
        const double sig_2 = sigma[2];
        const double lhs = std::sqrt(sig_2 / binomial(d, 2));
        const double rhs = sig_1 / d;
        newton_maclaurin.update((rhs - lhs) / (1.0 + std::abs(rhs)), v);
      }

      // Gradient sum of the root-normalized quotient.
      {
        QuotientDerivatives q =
            quotient_derivatives(k, l, std::span<const double>(v));
        const double root = 1.0 / static_cast<double>(k - l);
        const double scale = root * std::pow(q.value, root - 1.0);
        double sum = 0.0;
        for (double g : q.gradient) sum += g;
        gradient_sum.update(scale * sum, v);
      }

      // Spot-check partials against central differences of sigma_k.
      if (index < 64) {
        std::vector<double> pert = v;
        for (int i = 0; i < d; ++i) {
          const double h =
              1e-6 * (1.0 + std::abs(v[static_cast<std::size_t>(i)]));
          pert[static_cast<std::size_t>(i)] =
              v[static_cast<std::size_t>(i)] + h;
          const double fp =
              elementary_symmetric(k, std::span<const double>(pert));
          pert[static_cast<std::size_t>(i)] =
              v[static_cast<std::size_t>(i)] - h;
          const double fm =
              elementary_symmetric(k, std::span<const double>(pert));
          pert[static_cast<std::size_t>(i)] = v[static_cast<std::size_t>(i)];
          const double fd = (fp - fm) / (2.0 * h);
          const double an = removed[static_cast<std::size_t>(i)];
          const double rel = std::abs(fd - an) / (1.0 + std::abs(an));
          fd_match.update(-rel, v);
        }
      }
      ++index;
    }

    const double bound =
        std::pow(binomial(d, k) / binomial(d, l),
                 1.0 / static_cast<double>(k - l));
    reports.push_back(
        make_structure_report(spec, "partial_positive", 0.0, partial_positive));
    reports.push_back(make_structure_report(spec, "sigma_split_identity",
                                            -1e-10, split_identity));
    reports.push_back(make_structure_report(spec, "sorted_partials_ordered",
                                            -1e-12, sorted_partials));
    reports.push_back(
        make_structure_report(spec, "top_entry_bound", -1e-12, top_entry));
    if (k >= 2) {
      reports.push_back(make_structure_report(spec, "newton_maclaurin", -1e-12,
                                              newton_maclaurin));
    }
    reports.push_back(make_structure_report(spec, "quotient_gradient_sum",
                                            bound, gradient_sum));
    reports.push_back(
        make_structure_report(spec, "partial_matches_fd", -1e-6, fd_match));
  }

  // Part 2: properties of the operator through the p-fold sums.
  {
    SampleSpec inner = spec;
    inner.constraint = SampleConstraint::Unconstrained;
    inner.seed = spec.seed ^ 0x52;
    const auto samples = sample_admissible(inner);
    const HqOperator op(cfg);

    MinTracker extreme_sums;
    MinTracker derivative_order;
    MinTracker gradient_sum_bound;
    MinTracker segment_concavity;

    const Spectrum* prev_sample = nullptr;
    for (const Spectrum& lam : samples) {
      std::vector<double> sorted = lam.sorted_descending();
      const Spectrum sorted_spec(sorted);
      const SpectrumEval ev = op.eval_spectrum(sorted_spec, true);
      if (!ev.admissible) continue;  // cannot happen; defensive skip

      // Extremal p-fold sums against the sorted prefix/suffix sums.
      {
        const Spectrum sums = lambda_of(sorted_spec, op.table());
        double top = 0.0, bottom = 0.0;
        for (int i = 0; i < cfg.p; ++i) top += sorted[static_cast<std::size_t>(i)];
        for (int i = cfg.n - cfg.p; i < cfg.n; ++i) {
          bottom += sorted[static_cast<std::size_t>(i)];
        }
        const double max_sum =
            *std::max_element(sums.values.begin(), sums.values.end());
        const double min_sum =
            *std::min_element(sums.values.begin(), sums.values.end());
        const double err =
            std::max(std::abs(max_sum - top), std::abs(min_sum - bottom));
        extreme_sums.update(-err / (1.0 + std::abs(top)), lam.values);
      }

      // Non-increasing eigenvalues give non-decreasing derivatives.
      for (int i = 0; i + 1 < cfg.n; ++i) {
        const double a = ev.dF_dlambda[static_cast<std::size_t>(i)];
        const double b = ev.dF_dlambda[static_cast<std::size_t>(i + 1)];
        derivative_order.update((b - a) / (1.0 + std::abs(a) + std::abs(b)),
                                lam.values);
      }

      // Derivative sum of the root form.
      {
        double sum = 0.0;
        for (double g : ev.dFt_dlambda) sum += g;
        gradient_sum_bound.update(sum, lam.values);
      }

      // Concavity of the root form along segments between samples.
      if (prev_sample != nullptr) {
        const SpectrumEval eva = op.eval_spectrum(*prev_sample, false);
        const SpectrumEval evb = op.eval_spectrum(lam, false);
        if (eva.admissible && evb.admissible) {
          for (double t : {0.25, 0.5, 0.75}) {
            Spectrum mix;
            mix.values.resize(lam.size());
            for (std::size_t i = 0; i < lam.size(); ++i) {
              mix.values[i] = t * prev_sample->values[i] +
                              (1.0 - t) * lam.values[i];
            }
            const SpectrumEval evm = op.eval_spectrum(mix, false);
            if (!evm.admissible) continue;  // convex cone: cannot happen
            const double gap =
                evm.Ftilde - (t * eva.Ftilde + (1.0 - t) * evb.Ftilde);
            segment_concavity.update(gap, lam.values);
          }
        }
      }
      prev_sample = &lam;
    }

    const double cp = cfg.p * std::pow(binomial(N, k) / binomial(N, l),
                                       1.0 / static_cast<double>(k - l));
    reports.push_back(
        make_structure_report(spec, "extreme_sums_identify", -1e-12,
                              extreme_sums));
    reports.push_back(make_structure_report(spec, "derivative_order", -1e-12,
                                            derivative_order));
    reports.push_back(make_structure_report(spec, "gradient_sum_lower_bound",
                                            cp, gradient_sum_bound));
    reports.push_back(make_structure_report(spec, "segment_concavity", -1e-10,
                                            segment_concavity));
  }

  return reports;
}

}  // namespace hqlab
