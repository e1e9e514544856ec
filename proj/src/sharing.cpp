#include "collab/sharing.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "collab/errors.hpp"

namespace collab {
namespace {

// s! (n - s - 1)! / n!, the Shapley weight of a coalition of size s not
// containing the player, computed as a product to stay finite.
double shapley_weight(int n, int s) {
  double w = 1.0 / n;
  // 1 / C(n-1, s)
  for (int k = 1; k <= s; ++k) {
    w *= static_cast<double>(k) / static_cast<double>(n - 1 - s + k);
  }
  return w;
}

ShareVector shapley_exact(const ValueFunction& vf, const VectorRef& q) {
  const int n = static_cast<int>(q.size());
  if (n > kShapleyExactLimit) {
    throw InvalidInput("exact Shapley supports at most 12 participants; use "
                       "shapley_sampled:S instead");
  }
  ShareVector out = ShareVector::Zero(n);
  if (n == 0) return out;
  const std::size_t masks = std::size_t{1} << n;
  std::vector<double> value(masks, 0.0);
  std::vector<double> total(vf.sum_based() ? masks : 0, 0.0);
  Vector sub(n);
  for (std::size_t mask = 1; mask < masks; ++mask) {
    if (vf.sum_based()) {
      // peel off the lowest member to reuse the smaller coalition's total
      total[mask] = total[mask & (mask - 1)] + q[std::countr_zero(mask)];
      value[mask] = vf.of_total(total[mask]);
    } else {
      for (int k = 0; k < n; ++k) sub[k] = (mask >> k & 1U) ? q[k] : 0.0;
      value[mask] = vf(sub);
    }
  }
  std::vector<double> weight(n);
  for (int s = 0; s < n; ++s) weight[s] = shapley_weight(n, s);
  for (std::size_t mask = 0; mask < masks; ++mask) {
    const int size = std::popcount(mask);
    for (int i = 0; i < n; ++i) {
      if (mask >> i & 1U) continue;
      out[i] += weight[size] * (value[mask | (std::size_t{1} << i)] - value[mask]);
    }
  }
  return out;
}

ShareVector shapley_sampled(const ValueFunction& vf, const VectorRef& q,
                            int samples, std::uint64_t seed) {
  if (samples < 1) throw InvalidInput("shapley_sampled needs S >= 1");
  const int n = static_cast<int>(q.size());
  ShareVector out = ShareVector::Zero(n);
  if (n == 0) return out;
  std::mt19937_64 rng(seed);
  std::vector<int> perm(n);
  Vector partial = Vector::Zero(n);
  for (int s = 0; s < samples; ++s) {
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    double total = 0.0;
    double before = 0.0;
    if (!vf.sum_based()) partial.setZero();
    for (int idx : perm) {
      double after;
      if (vf.sum_based()) {
        total += q[idx];
        after = vf.of_total(total);
      } else {
        partial[idx] = q[idx];
        after = vf(partial);
      }
      out[idx] += after - before;
      before = after;
    }
  }
  return out / static_cast<double>(samples);
}

Vector marginals(const ValueFunction& vf, const VectorRef& q) {
  Vector mc(q.size());
  for (Eigen::Index i = 0; i < q.size(); ++i) {
    mc[i] = marginal_contribution(vf, q, i);
  }
  return mc;
}

}  // namespace

SharingRule SharingRule::MarginalProportional() {
  SharingRule r;
  r.kind = Kind::kMarginalProportional;
  return r;
}

SharingRule SharingRule::ShapleyExact() {
  SharingRule r;
  r.kind = Kind::kShapleyExact;
  return r;
}

SharingRule SharingRule::ShapleySampled(int samples, std::uint64_t seed) {
  SharingRule r;
  r.kind = Kind::kShapleySampled;
  r.samples = samples;
  r.seed = seed;
  r.validate();
  return r;
}

SharingRule SharingRule::RankingHarmonic(RankOrder order) {
  SharingRule r;
  r.kind = Kind::kRanking;
  r.order = order;
  return r;
}

SharingRule SharingRule::Ranking(std::vector<double> coefficients,
                                 RankOrder order) {
  SharingRule r;
  r.kind = Kind::kRanking;
  r.coefficients = std::move(coefficients);
  r.order = order;
  r.validate();
  return r;
}

SharingRule SharingRule::WinnerTakeAll() {
  SharingRule r;
  r.kind = Kind::kWinnerTakeAll;
  return r;
}

SharingRule SharingRule::Parse(const std::string& text) {
  if (text == "proportional") return Proportional();
  if (text == "marginal_proportional") return MarginalProportional();
  if (text == "shapley_exact") return ShapleyExact();
  if (text == "ranking_harmonic") return RankingHarmonic();
  if (text == "ranking_harmonic_quality") {
    return RankingHarmonic(RankOrder::kQuality);
  }
  if (text == "winner_take_all") return WinnerTakeAll();
  const std::string prefix = "shapley_sampled:";
  if (text.rfind(prefix, 0) == 0) {
    const std::string count = text.substr(prefix.size());
    std::size_t used = 0;
    int s = 0;
    try {
      s = std::stoi(count, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != count.size()) {
      throw InvalidInput("bad sample count in sharing rule '" + text + "'");
    }
    return ShapleySampled(s);
  }
  throw InvalidInput("unknown sharing rule '" + text + "'");
}

std::string SharingRule::name() const {
  switch (kind) {
    case Kind::kProportional:
      return "proportional";
    case Kind::kMarginalProportional:
      return "marginal_proportional";
    case Kind::kShapleyExact:
      return "shapley_exact";
    case Kind::kShapleySampled:
      return "shapley_sampled:" + std::to_string(samples);
    case Kind::kRanking:
      if (!coefficients.empty()) return "ranking";
      return order == RankOrder::kQuality ? "ranking_harmonic_quality"
                                          : "ranking_harmonic";
    case Kind::kWinnerTakeAll:
      return "winner_take_all";
  }
  return "unknown";
}

void SharingRule::validate() const {
  if (kind == Kind::kShapleySampled && samples < 1) {
    throw InvalidInput("shapley_sampled needs S >= 1");
  }
  if (kind == Kind::kRanking && !coefficients.empty()) {
    double sum = 0.0;
    for (std::size_t t = 0; t < coefficients.size(); ++t) {
      if (coefficients[t] < 0.0) {
        throw InvalidInput("ranking coefficients must be nonnegative");
      }
      if (t > 0 && coefficients[t] > coefficients[t - 1]) {
        throw InvalidInput("ranking coefficients must be nonincreasing");
      }
      sum += coefficients[t];
    }
    if (std::abs(sum - 1.0) > 1e-12) {
      throw InvalidInput("ranking coefficients must sum to 1");
    }
  }
}

bool SharingRule::concave_for(const ValueFunction& vf) const {
  switch (kind) {
    case Kind::kProportional:
    case Kind::kShapleyExact:
    case Kind::kShapleySampled:
      return vf.sum_based();
    default:
      return false;
  }
}

bool SharingRule::has_mc_property_for(const ValueFunction& vf) const {
  if (!vf.monotone()) return false;
  switch (kind) {
    case Kind::kProportional:
      return vf.sum_based();
    case Kind::kMarginalProportional:
    case Kind::kShapleyExact:
    case Kind::kShapleySampled:
      return true;
    case Kind::kWinnerTakeAll:
      return vf.kind() == ValueFunction::Kind::kMaxQuality;
    default:
      return false;
  }
}

Vector harmonic_coefficients(int n) {
  if (n < 1) throw InvalidInput("harmonic coefficients need n >= 1");
  double h = 0.0;
  for (int k = 1; k <= n; ++k) h += 1.0 / k;
  Vector a(n);
  for (int t = 1; t <= n; ++t) a[t - 1] = 1.0 / (t * h);
  return a;
}

std::vector<int> ranking_order(const ValueFunction& vf, const VectorRef& q,
                               SharingRule::RankOrder order) {
  const Vector key = order == SharingRule::RankOrder::kQuality
                         ? Vector(q)
                         : marginals(vf, q);
  std::vector<int> idx(q.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](int a, int b) { return key[a] > key[b]; });
  return idx;
}

ShareVector shapley_shares(const ValueFunction& vf, const VectorRef& q,
                           ShapleyMode mode, int samples, std::uint64_t seed) {
  return mode == ShapleyMode::kExact ? shapley_exact(vf, q)
                                     : shapley_sampled(vf, q, samples, seed);
}

ShareVector shares(const SharingRule& rule, const ValueFunction& vf,
                   const VectorRef& q) {
  const Eigen::Index n = q.size();
  ShareVector out = ShareVector::Zero(n);
  if (n == 0) return out;
  const double total_value = vf(q);
  switch (rule.kind) {
    case SharingRule::Kind::kProportional: {
      const double total = q.sum();
      if (total <= 0.0) return out;
      return q * (total_value / total);
    }
    case SharingRule::Kind::kMarginalProportional: {
      const Vector mc = marginals(vf, q);
      const double sum = mc.sum();
      if (sum <= 0.0) return Vector::Constant(n, total_value / n);
      return mc * (total_value / sum);
    }
    case SharingRule::Kind::kShapleyExact:
      return shapley_exact(vf, q);
    case SharingRule::Kind::kShapleySampled:
      return shapley_sampled(vf, q, rule.samples, rule.seed);
    case SharingRule::Kind::kRanking: {
      const Vector a = rule.coefficients.empty()
                           ? harmonic_coefficients(static_cast<int>(n))
                           : Eigen::Map<const Vector>(rule.coefficients.data(),
                                                      rule.coefficients.size());
      if (a.size() != n) {
        throw InvalidInput("ranking coefficient length does not match the "
                           "number of participants");
      }
      const std::vector<int> order = ranking_order(vf, q, rule.order);
      for (Eigen::Index t = 0; t < n; ++t) out[order[t]] = a[t] * total_value;
      return out;
    }
    case SharingRule::Kind::kWinnerTakeAll: {
      Eigen::Index best = 0;
      for (Eigen::Index i = 1; i < n; ++i) {
        if (q[i] > q[best]) best = i;
      }
      out[best] = total_value;
      return out;
    }
  }
  return out;
}

McReport check_mc_property(const SharingRule& rule, const ValueFunction& vf,
                           const VectorRef& q, double tol) {
  const ShareVector s = shares(rule, vf, q);
  McReport report;
  report.min_slack = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < q.size(); ++i) {
    McEntry e;
    e.share = s[i];
    e.marginal = marginal_contribution(vf, q, i);
    e.slack = e.share - e.marginal;
    report.min_slack = std::min(report.min_slack, e.slack);
    report.entries.push_back(e);
  }
  if (report.entries.empty()) report.min_slack = 0.0;
  report.holds = report.min_slack >= -tol;
  return report;
}

double ranking_approx_factor(const ValueFunction& vf, const VectorRef& q) {
  const int n = static_cast<int>(q.size());
  if (n == 0) return 0.0;
  const ShareVector s = shares(SharingRule::RankingHarmonic(), vf, q);
  const Vector a = harmonic_coefficients(n);
  const double h = 1.0 / a[0];
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    const double mc = marginal_contribution(vf, q, i);
    if (mc <= 0.0) continue;
    if (s[i] <= 0.0) return std::numeric_limits<double>::infinity();
    worst = std::max(worst, mc / (h * s[i]));
  }
  return worst;
}

OwnShareCurve::OwnShareCurve(const SharingRule& rule, const ValueFunction& vf,
                             const VectorRef& q, Eigen::Index player,
                             double epsilon_floor)
    : rule_(&rule), vf_(&vf), floor_(epsilon_floor), profile_(q),
      player_(player) {
  if (player < 0 || player >= q.size()) {
    throw InvalidInput("participant index out of range");
  }
  const int n = static_cast<int>(q.size());
  if (vf.sum_based() && rule.kind == SharingRule::Kind::kProportional) {
    mode_ = Mode::kProportional;
    for (int k = 0; k < n; ++k) {
      if (k != player) others_total_ += q[k];
    }
  } else if (vf.sum_based() &&
             rule.kind == SharingRule::Kind::kShapleyExact) {
    if (n > kShapleyExactLimit) {
      throw InvalidInput("exact Shapley supports at most 12 participants");
    }
    mode_ = Mode::kPredecessorSums;
    std::vector<int> others;
    for (int k = 0; k < n; ++k) {
      if (k != player) others.push_back(k);
    }
    const std::size_t masks = std::size_t{1} << others.size();
    pred_totals_.reserve(masks);
    pred_weights_.reserve(masks);
    for (std::size_t mask = 0; mask < masks; ++mask) {
      double total = 0.0;
      for (std::size_t b = 0; b < others.size(); ++b) {
        if (mask >> b & 1U) total += q[others[b]];
      }
      pred_totals_.push_back(total);
      pred_weights_.push_back(shapley_weight(n, std::popcount(mask)));
    }
  } else if (vf.sum_based() &&
             rule.kind == SharingRule::Kind::kShapleySampled) {
    mode_ = Mode::kPredecessorSums;
    // Same permutation stream as shapley_sampled so value() matches shares().
    std::mt19937_64 rng(rule.seed);
    std::vector<int> perm(n);
    pred_totals_.reserve(rule.samples);
    for (int s = 0; s < rule.samples; ++s) {
      std::iota(perm.begin(), perm.end(), 0);
      std::shuffle(perm.begin(), perm.end(), rng);
      double total = 0.0;
      for (int idx : perm) {
        if (idx == player) break;
        total += q[idx];
      }
      pred_totals_.push_back(total);
    }
    pred_weights_.assign(pred_totals_.size(), 1.0 / rule.samples);
  }
}

double OwnShareCurve::value(double own) const {
  switch (mode_) {
    case Mode::kProportional: {
      const double total = std::max(own + others_total_, floor_);
      if (total <= 0.0) return 0.0;
      return own * vf_->average(total);
    }
    case Mode::kPredecessorSums: {
      double sum = 0.0;
      for (std::size_t k = 0; k < pred_totals_.size(); ++k) {
        const double p = pred_totals_[k];
        sum += pred_weights_[k] * (vf_->of_total(p + own) - vf_->of_total(p));
      }
      return sum;
    }
    case Mode::kGeneric:
      break;
  }
  Vector q = profile_;
  q[player_] = own;
  return shares(*rule_, *vf_, q)[player_];
}

double OwnShareCurve::derivative(double own) const {
  switch (mode_) {
    case Mode::kProportional: {
      const double total = own + others_total_;
      if (total < floor_) return vf_->average(floor_);
      if (own == 0.0) return vf_->average(total);
      return vf_->average(total) + own * vf_->average_derivative(total);
    }
    case Mode::kPredecessorSums: {
      double sum = 0.0;
      for (std::size_t k = 0; k < pred_totals_.size(); ++k) {
        sum += pred_weights_[k] *
               vf_->derivative(std::max(pred_totals_[k] + own, floor_));
      }
      return sum;
    }
    case Mode::kGeneric:
      break;
  }
  const double h = 1e-6 * std::max(1.0, own);
  if (own < h) return (value(own + h) - value(own)) / h;
  return (value(own + h) - value(own - h)) / (2.0 * h);
}

}  // namespace collab
