#include "pcfit/selection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace pcfit {

double criterion_dI(const CriterionInput& in) {
  if (in.n < 1) throw std::invalid_argument("criterion_dI: bad n");
  double frac = in.gamma1 * in.p / in.n;
  if (frac >= 1.0) return std::numeric_limits<double>::infinity();
  double denom = 1.0 - frac;
  return in.sigma_hat2 / (denom * denom);
}

double criterion_dB(const CriterionInput& in) {
  if (in.n < 1) throw std::invalid_argument("criterion_dB: bad n");
  return in.sigma_hat2 * (1.0 + in.gamma2 * in.p * std::log(double(in.n)) / in.n);
}

double criterion_pcic(const CriterionInput& in) {
  if (in.n < 1) throw std::invalid_argument("criterion_pcic: bad n");
  double frac = in.gamma1 * in.p / in.n;
  if (frac >= 1.0) return std::numeric_limits<double>::infinity();
  double denom = 1.0 - frac;
  return in.sigma_hat2 * (1.0 + in.gamma2 * in.k * std::log(double(in.n)) / in.n) /
         (denom * denom);
}

int select_model(std::span<const ModelCandidate> candidates) {
  if (candidates.empty()) throw std::invalid_argument("select_model: no candidates");
  int best = 0;
  for (int i = 1; i < static_cast<int>(candidates.size()); ++i) {
    const auto& a = candidates[i];
    const auto& b = candidates[best];
    if (a.pcic < b.pcic ||
        (a.pcic == b.pcic &&
         (a.k < b.k || (a.k == b.k && a.lambda > b.lambda))))
      best = i;
  }
  return best;
}

namespace {

// Build the constraint set when `kept` marks which crossings act as change
// points; every cluster not fully represented is suppressed over its
// width-rule interval with a single-sign f^{(l)} constraint.
ConstraintSpec candidate_constraints(const ChangePointReport& report,
                                     const std::vector<char>& kept,
                                     const KernelFit& fit, const PilotConfig& config,
                                     double h, int n) {
  ChangePointReport sub;
  sub.points.reserve(report.points.size());
  // kept crossings become singleton odd clusters; clusters with no kept
  // member become even-style (suppressed) clusters spanning their width
  for (const auto& cl : report.clusters) {
    std::vector<int> mine;
    for (int idx : cl.members)
      if (kept[idx]) mine.push_back(idx);
    if (mine.empty()) {
      ZeroCluster z;
      z.odd = false;
      // suppression region: the sigma/fixed width around the would-be
      // representative, so the no-change-point hypothesis has teeth
      const ChangePoint& p =
          report.points[cl.odd ? cl.representative : cl.members.front()];
      double w = config.width_rule == WidthRule::fixed
                     ? config.width_fixed
                     : std::max(config.width_c * std::max(p.sigma_if_hat, 0.0) *
                                    std::sqrt(2.0 * std::log(double(n))),
                                2.0 * h);
      z.span.lo = p.x_hat - w;
      z.span.hi = p.x_hat + w;
      sub.clusters.push_back(std::move(z));
      continue;
    }
    for (int idx : mine) {
      ZeroCluster z;
      z.odd = true;
      z.span.lo = z.span.hi = report.points[idx].x_hat;
      z.representative = static_cast<int>(sub.points.size());
      z.members = {z.representative};
      sub.points.push_back(report.points[idx]);
      sub.points.back().cluster_id = static_cast<int>(sub.clusters.size());
      sub.clusters.push_back(std::move(z));
      ++sub.count;
    }
  }
  // clusters were emitted in position order except that suppressed ones keep
  // no points; sort clusters by span for the clipping logic
  std::sort(sub.clusters.begin(), sub.clusters.end(),
            [](const ZeroCluster& a, const ZeroCluster& b) {
              return a.span.lo < b.span.lo;
            });
  return constraint_intervals(sub, fit, config, h, n);
}

}  // namespace

std::vector<ModelCandidate> search_change_point_models(const SampleSet& samples,
                                                       const PilotConfig& config,
                                                       int kmax) {
  if (kmax < 0) throw std::invalid_argument("search_change_point_models: kmax < 0");
  PilotResult base = pilot_fit(samples, config);
  const int n = samples.size();
  const double sigma = base.diagnostics.sigma_hat;
  const double lambda = base.diagnostics.lambda_used;
  const double h = base.diagnostics.h_used;

  SplineConfig scfg;
  scfg.m = config.m > 0 ? config.m : config.ell + 1;
  scfg.lambda = lambda;
  scfg.sigma = sigma;
  scfg.grid_size = config.grid_size;

  const bool do_center = config.center < 0 ? (config.ell >= 1) : (config.center != 0);
  SampleSet work = samples;
  if (do_center && !base.centering_poly.empty()) {
    for (int i = 0; i < n; ++i)
      work.y[i] -= polyval(base.centering_poly, samples.t[i]);
  }

  // candidate "kept crossing" masks, one per K
  const auto& report = base.report;
  std::vector<std::vector<char>> masks;
  std::vector<int> kvals;
  if (base.diagnostics.fallback || report.points.empty()) {
    masks.push_back(std::vector<char>(report.points.size(), 0));
    kvals.push_back(0);
  } else {
    // cluster strength: |f-hat^{(l+1)}| / sigma_if at the representative
    std::vector<std::size_t> odd_clusters;
    for (std::size_t c = 0; c < report.clusters.size(); ++c)
      if (report.clusters[c].odd) odd_clusters.push_back(c);
    auto strength = [&](std::size_t c) {
      const ChangePoint& p = report.points[report.clusters[c].representative];
      double slope = std::abs(base.first_stage.eval_ell1(p.x_hat));
      return p.sigma_if_hat > 0 ? slope / p.sigma_if_hat : slope;
    };
    std::sort(odd_clusters.begin(), odd_clusters.end(),
              [&](std::size_t a, std::size_t b) { return strength(a) < strength(b); });

    // base mask: representatives of odd clusters
    std::vector<char> mask(report.points.size(), 0);
    for (std::size_t c : odd_clusters) mask[report.clusters[c].representative] = 1;
    int k_base = static_cast<int>(odd_clusters.size());
    masks.push_back(mask);
    kvals.push_back(k_base);

    // suppress weakest odd clusters one by one, down to zero
    std::vector<char> down = mask;
    for (std::size_t j = 0; j < odd_clusters.size(); ++j) {
      down[report.clusters[odd_clusters[j]].representative] = 0;
      masks.push_back(down);
      kvals.push_back(k_base - static_cast<int>(j) - 1);
    }

    // promote clusters (strongest first) to all of their crossings
    std::vector<char> up = mask;
    int k_up = k_base;
    for (auto it = odd_clusters.rbegin(); it != odd_clusters.rend() && k_up < kmax;
         ++it) {
      const auto& cl = report.clusters[*it];
      if (cl.members.size() <= 1) continue;
      for (int idx : cl.members) up[idx] = 1;
      k_up += static_cast<int>(cl.members.size()) - 1;
      masks.push_back(up);
      kvals.push_back(k_up);
    }
    for (std::size_t c = 0; c < report.clusters.size() && k_up < kmax; ++c) {
      const auto& cl = report.clusters[c];
      if (cl.odd) continue;
      for (int idx : cl.members) up[idx] = 1;
      k_up += static_cast<int>(cl.members.size());
      masks.push_back(up);
      kvals.push_back(k_up);
    }
  }

  std::vector<ModelCandidate> out;
  for (std::size_t i = 0; i < masks.size(); ++i) {
    if (kvals[i] > kmax) continue;
    ModelCandidate cand;
    cand.k = kvals[i];
    cand.lambda = lambda;
    PilotResult pr;
    pr.first_stage = base.first_stage;
    pr.report = base.report;
    pr.centering_poly = base.centering_poly;
    pr.diagnostics = base.diagnostics;
    ConstraintSpec spec;
    if (!base.diagnostics.fallback && !report.points.empty())
      spec = candidate_constraints(report, masks[i], base.first_stage, config, h, n);
    pr.constraints = spec;
    try {
      if (spec.empty()) {
        pr.second_stage = fit_spline(work, scfg);
        pr.diagnostics.constrained = true;
      } else {
        ConstrainedFit cf = fit_constrained(work, scfg, spec);
        pr.second_stage = std::move(cf.fit);
        pr.qp = std::move(cf.qp);
        pr.diagnostics.constrained = true;
      }
    } catch (const std::exception&) {
      continue;  // candidate dropped; selection works with the rest
    }
    cand.p = pr.second_stage.p_eff;
    cand.sigma_hat2 =
        pr.second_stage.rss / (static_cast<double>(n) * sigma * sigma);
    CriterionInput ci{cand.sigma_hat2, cand.p, cand.k, n, 1.0, 2.0};
    cand.pcic = criterion_pcic(ci);
    cand.result = std::move(pr);
    out.push_back(std::move(cand));
  }
  if (out.empty())
    throw std::runtime_error("search_change_point_models: no candidate could be fit");
  return out;
}

}  // namespace pcfit
