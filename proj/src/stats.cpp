#include "zombiescope/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <map>
#include <numeric>
#include <stdexcept>

namespace zs {

// ---------------------------------------------------------------------------
// Kaplan-Meier

double KmCurve::survival_at(double t) const {
  double s = 1.0;
  for (const auto& step : steps) {
    if (step.time > t)
      break;
    s = step.survival;
  }
  return s;
}

std::vector<std::pair<double, double>> KmCurve::points() const {
  std::vector<std::pair<double, double>> out{{0.0, 1.0}};
  for (const auto& step : steps)
    if (step.events > 0) {
      if (step.time == 0.0)
        out.front().second = step.survival;
      else
        out.emplace_back(step.time, step.survival);
    }
  return out;
}

KmCurve kaplan_meier(std::span<const SurvivalObservation> observations) {
  if (observations.empty())
    throw std::invalid_argument("kaplan_meier: no observations");
  std::vector<SurvivalObservation> sorted(observations.begin(), observations.end());
  for (const auto& o : sorted)
    if (!(o.time >= 0))
      throw std::invalid_argument("kaplan_meier: negative or NaN time");
  std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.time < b.time; });

  KmCurve curve;
  std::size_t at_risk = sorted.size();
  double s = 1.0;
  for (std::size_t i = 0; i < sorted.size();) {
    const double t = sorted[i].time;
    KmStep step;
    step.time = t;
    step.at_risk = at_risk;
    for (; i < sorted.size() && sorted[i].time == t; ++i)
      ++(sorted[i].event ? step.events : step.censored);
    if (step.events > 0)
      s *= 1.0 - double(step.events) / double(at_risk);
    step.survival = s;
    at_risk -= step.events + step.censored;
    curve.steps.push_back(step);
  }
  return curve;
}

// ---------------------------------------------------------------------------
// Mann-Whitney U

namespace {

// Doubled midranks, so tied ranks stay integral.
std::vector<std::int64_t> doubled_midranks(const std::vector<double>& values, std::int64_t& tie_term) {
  std::vector<std::size_t> idx(values.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return values[a] < values[b]; });
  std::vector<std::int64_t> ranks(values.size());
  tie_term = 0;
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j < idx.size() && values[idx[j]] == values[idx[i]])
      ++j;
    const auto t = static_cast<std::int64_t>(j - i);
    // ranks i+1 .. j, midrank*2 = (i+1+j)
    const auto r2 = static_cast<std::int64_t>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k)
      ranks[idx[k]] = r2;
    tie_term += t * t * t - t;
    i = j;
  }
  return ranks;
}

// Exact two-sided p over all C(N, m) assignments of the pooled ranks to the
// smaller group. `small_ranks` marks which pooled items are in that group.
double exact_p(const std::vector<std::int64_t>& ranks2, std::int64_t observed_r2, std::size_t m,
               std::size_t n_other) {
  const std::int64_t max_sum = std::accumulate(ranks2.begin(), ranks2.end(), std::int64_t{0});
  // dp[k][s]: number of k-subsets with doubled rank sum s
  std::vector<std::vector<double>> dp(m + 1, std::vector<double>(static_cast<std::size_t>(max_sum) + 1, 0.0));
  dp[0][0] = 1.0;
  std::int64_t reach = 0;
  for (auto r : ranks2) {
    reach += r;
    for (std::size_t k = std::min(m, ranks2.size()); k >= 1; --k) {
      auto& row = dp[k];
      const auto& prev = dp[k - 1];
      for (std::int64_t s = reach; s >= r; --s)
        row[static_cast<std::size_t>(s)] += prev[static_cast<std::size_t>(s - r)];
    }
  }
  const auto mm = static_cast<std::int64_t>(m);
  const auto no = static_cast<std::int64_t>(n_other);
  // 2U - 2*mean = (R2 - m(m+1)) - m*n_other
  auto dev = [&](std::int64_t r2) { return std::llabs(r2 - mm * (mm + 1) - mm * no); };
  const std::int64_t obs = dev(observed_r2);
  double total = 0, extreme = 0;
  for (std::size_t s = 0; s < dp[m].size(); ++s) {
    const double c = dp[m][s];
    if (c == 0)
      continue;
    total += c;
    if (dev(static_cast<std::int64_t>(s)) >= obs)
      extreme += c;
  }
  return std::min(1.0, extreme / total);
}

} // namespace

MwuResult mann_whitney_u(std::span<const double> group_a, std::span<const double> group_b,
                         const MwuOptions& options) {
  if (group_a.empty() || group_b.empty())
    throw std::invalid_argument("mann_whitney_u: both groups need at least one value");

  MwuResult r;
  r.n_a = group_a.size();
  r.n_b = group_b.size();
  std::vector<double> pooled(group_a.begin(), group_a.end());
  pooled.insert(pooled.end(), group_b.begin(), group_b.end());
  std::int64_t tie_term = 0;
  const auto ranks2 = doubled_midranks(pooled, tie_term);
  r.tie_correction_applied = tie_term != 0;

  std::int64_t r2_a = 0;
  for (std::size_t i = 0; i < r.n_a; ++i)
    r2_a += ranks2[i];
  const double na = double(r.n_a), nb = double(r.n_b), n = na + nb;
  r.u_a = double(r2_a) / 2.0 - na * (na + 1) / 2.0;
  r.u_b = na * nb - r.u_a;

  const double mean = na * nb / 2.0;
  const double var = na * nb / 12.0 * ((n + 1) - double(tie_term) / (n * (n - 1)));
  if (var > 0) {
    double diff = r.u_a - mean;
    double mag = std::abs(diff);
    if (options.continuity_correction)
      mag = std::max(0.0, mag - 0.5);
    r.z = std::copysign(mag, diff) / std::sqrt(var);
  }

  const bool small = std::min(r.n_a, r.n_b) < kMwuExactMinBelow && r.n_a + r.n_b <= kMwuExactMaxTotal;
  const bool use_exact =
      options.method == MwuMethod::exact || (options.method == MwuMethod::automatic && small);

  if (var <= 0) {
    // every value identical
    r.p_two_sided = 1.0;
  } else if (use_exact) {
    const bool a_small = r.n_a <= r.n_b;
    std::int64_t observed = r2_a;
    if (!a_small)
      observed = std::accumulate(ranks2.begin() + static_cast<std::ptrdiff_t>(r.n_a), ranks2.end(),
                                 std::int64_t{0});
    r.p_two_sided = exact_p(ranks2, observed, a_small ? r.n_a : r.n_b, a_small ? r.n_b : r.n_a);
    r.exact = true;
  } else {
    r.p_two_sided = std::min(1.0, std::erfc(std::abs(r.z) / std::sqrt(2.0)));
  }
  return r;
}

// ---------------------------------------------------------------------------
// distributions

Cdf Cdf::of(std::vector<double> values) {
  Cdf c;
  c.n = values.size();
  std::sort(values.begin(), values.end());
  for (std::size_t i = 0; i < values.size(); ++i)
    if (i + 1 == values.size() || values[i + 1] != values[i])
      c.points.emplace_back(values[i], double(i + 1) / double(values.size()));
  return c;
}

std::optional<double> median(std::vector<double> values) {
  if (values.empty())
    return std::nullopt;
  std::sort(values.begin(), values.end());
  const auto n = values.size();
  return n % 2 ? values[n / 2] : (values[n / 2 - 1] + values[n / 2]) / 2.0;
}

// ---------------------------------------------------------------------------
// zombie aggregates

std::vector<TimeSeries> zombie_fraction_series(std::span<const Linkage> linkages,
                                               const TimelineMap& timelines, DayRange range) {
  const auto days = static_cast<std::size_t>(range.length());
  struct Diffs {
    std::vector<std::int64_t> active, zombie;
  };
  std::map<Ecosystem, Diffs> diffs;

  // add +1 on [from, to) clipped to range
  auto bump = [&](std::vector<std::int64_t>& v, Day from, std::optional<Day> to) {
    const Day lo = std::max(from, range.first);
    const Day hi = to ? std::min(*to, range.last + 1) : range.last + 1;
    if (lo >= hi)
      return;
    v[static_cast<std::size_t>(lo - range.first)] += 1;
    v[static_cast<std::size_t>(hi - range.first)] -= 1;
  };

  for (const auto& l : linkages) {
    auto& d = diffs[l.ecosystem];
    if (d.active.empty()) {
      d.active.assign(days + 1, 0);
      d.zombie.assign(days + 1, 0);
    }
    bump(d.active, l.birth, l.death);

    auto it = timelines.find(l.dns_name);
    const auto v = classify_linkage(l, it == timelines.end() ? nullptr : &it->second, range.last);
    if (v.status != Status::zombie)
      continue;
    const Day from = v.zombie_birth ? *v.zombie_birth : v.rereg->next_epoch_start;
    bump(d.zombie, std::max(from, l.birth), l.death);
  }

  std::vector<TimeSeries> out;
  for (auto& [eco, d] : diffs) {
    TimeSeries ts;
    ts.ecosystem = eco;
    ts.rows.reserve(days);
    std::int64_t a = 0, z = 0;
    for (std::size_t i = 0; i < days; ++i) {
      a += d.active[i];
      z += d.zombie[i];
      SeriesRow row;
      row.date = range.first + static_cast<std::int32_t>(i);
      row.active = static_cast<std::size_t>(a);
      row.zombie = static_cast<std::size_t>(z);
      row.fraction = a == 0 ? 0.0 : double(z) / double(a);
      ts.rows.push_back(row);
    }
    out.push_back(std::move(ts));
  }
  return out;
}

CohortLifespans cohort_lifespans(std::span<const Linkage> linkages, const TimelineMap& timelines,
                                 CohortSpec cohort) {
  if (cohort.width_years < 1)
    throw std::invalid_argument("cohort width must be at least one year");

  struct Entry {
    int year;
    SurvivalObservation obs;
  };
  std::vector<Entry> entries;
  CohortLifespans out;
  for (const auto& l : linkages) {
    auto it = timelines.find(l.dns_name);
    const OwnershipInterval* epoch = it == timelines.end() ? nullptr : it->second.find(l.birth);
    if (!epoch) {
      ++out.excluded;
      continue;
    }
    entries.push_back({l.birth.year(), {double(epoch->length()), !epoch->right_censored}});
  }
  if (entries.empty())
    return out;

  int anchor = entries.front().year;
  for (const auto& e : entries)
    anchor = std::min(anchor, e.year);

  std::map<int, std::vector<SurvivalObservation>> buckets;
  std::vector<SurvivalObservation> all;
  all.reserve(entries.size());
  for (const auto& e : entries) {
    buckets[(e.year - anchor) / cohort.width_years].push_back(e.obs);
    all.push_back(e.obs);
  }
  for (const auto& [k, obs] : buckets) {
    CohortCurve c;
    c.first_year = anchor + k * cohort.width_years;
    c.last_year = c.first_year + cohort.width_years - 1;
    c.n = obs.size();
    c.curve = kaplan_meier(obs);
    out.cohorts.push_back(std::move(c));
  }
  out.overall = kaplan_meier(all);
  return out;
}

DurationDistributions duration_distributions(std::span<const ZombieVerdict> verdicts) {
  std::vector<double> remaining, observed, revoked, reduction, reduction_frac;
  DurationDistributions out;
  for (const auto& v : verdicts) {
    if (v.linkage.ecosystem != Ecosystem::webpki || !v.known_zombie_start())
      continue;
    ++out.zombies;
    const Day zb = *v.zombie_birth;
    const Day scheduled = v.linkage.scheduled_end.value_or(v.linkage.death.value_or(v.as_of));
    const double rem = double(std::min(scheduled, v.as_of) - zb + 1);
    const double obs = double(zombie_duration(v, v.as_of).days);
    remaining.push_back(rem);
    observed.push_back(obs);
    if (v.linkage.death_cause == DeathCause::revoked) {
      ++out.revoked_count;
      revoked.push_back(obs);
      reduction.push_back(rem - obs);
      reduction_frac.push_back(rem > 0 ? (rem - obs) / rem : 0.0);
    }
  }
  out.revoked_fraction = out.zombies ? double(out.revoked_count) / double(out.zombies) : 0.0;
  out.median_revocation_reduction_days = median(reduction);
  out.median_revocation_reduction_fraction = median(reduction_frac);
  out.remaining_validity = Cdf::of(std::move(remaining));
  out.observed = Cdf::of(std::move(observed));
  out.revoked = Cdf::of(std::move(revoked));
  return out;
}

GapAnalysis registration_to_linkage_gaps(std::span<const ZombieVerdict> verdicts, const MwuOptions& options,
                                         Warnings* warnings) {
  GapAnalysis out;
  for (const auto& v : verdicts) {
    if (!v.birth_epoch || v.status == Status::exempt || v.status == Status::indeterminate)
      continue;
    const double gap = double(v.linkage.birth - v.birth_epoch->start);
    (v.status == Status::zombie ? out.zombie_gaps : out.non_zombie_gaps).push_back(gap);
  }
  out.zombie_median = median(out.zombie_gaps);
  out.non_zombie_median = median(out.non_zombie_gaps);
  if (out.zombie_gaps.empty() || out.non_zombie_gaps.empty())
    warn(warnings, "registration-to-linkage test skipped: a population is empty");
  else
    out.test = mann_whitney_u(out.zombie_gaps, out.non_zombie_gaps, options);
  return out;
}

} // namespace zs
