#include "pauc/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <boost/math/special_functions/erf.hpp>

namespace pauc {

namespace {

double standard_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double standard_normal_quantile(double u) {
  if (u <= 0.0) return -std::numeric_limits<double>::infinity();
  if (u >= 1.0) return std::numeric_limits<double>::infinity();
  return -std::sqrt(2.0) * boost::math::erfc_inv(2.0 * u);
}

void check_same_markers(const DiagnosticSample& data) {
  if (data.nondiseased().markers() != data.diseased().markers()) {
    throw std::invalid_argument("groups have different numbers of markers");
  }
}

}  // namespace

TrimSpec::TrimSpec(double p, double q) : p_(p), q_(q) {
  if (!(p > 0.0 && p <= 1.0)) {
    throw std::invalid_argument("trim p must lie in (0, 1], got " + std::to_string(p));
  }
  if (!(q >= 0.0 && q < 1.0)) {
    throw std::invalid_argument("trim q must lie in [0, 1), got " + std::to_string(q));
  }
}

std::string TrimSpec::to_string() const {
  std::ostringstream os;
  os << "(" << p_ << "," << q_ << ")";
  return os.str();
}

DiagnosticSample::DiagnosticSample(PairedSample nondiseased, PairedSample diseased)
    : nondiseased_(std::move(nondiseased)), diseased_(std::move(diseased)) {
  check_same_markers(*this);
  if (alpha() < 2 || beta() < 2) {
    throw std::invalid_argument("each group needs at least 2 subjects");
  }
}

double pauc_estimate_bound(std::size_t alpha, std::size_t beta, const TrimSpec& trim) {
  const std::size_t lo = ceil_count(alpha, 1.0 - trim.p());
  const std::size_t hi = std::min(ceil_count(beta, 1.0 - trim.q()), beta);
  return static_cast<double>((alpha - std::min(lo, alpha)) * hi) /
         static_cast<double>(alpha * beta);
}

PaucEstimate estimate_pauc(const DiagnosticSample& data, const TrimSpec& trim) {
  const std::size_t kappa = data.markers();
  const std::size_t alpha = data.alpha();
  const std::size_t beta = data.beta();
  PaucEstimate est;
  est.theta.resize(static_cast<Eigen::Index>(kappa));
  est.alpha = alpha;
  est.beta = beta;
  for (std::size_t i = 0; i < kappa; ++i) {
    const Sample& xi = data.nondiseased().column(i);
    const Sample& eta = data.diseased().column(i);
    const ExtendedReal a = quantile(xi, 1.0 - trim.p());
    const ExtendedReal b = quantile(eta, 1.0 - trim.q());
    est.lower_cuts.push_back(a);
    est.upper_cuts.push_back(b);

    // b is finite since 1 - q > 0; G_n(b) - G_n(u) counts eta in (u, b].
    const double b_val = b.value();
    const std::size_t g_at_b = eta.count_at_most(b_val);
    std::uint64_t mass = 0;
    for (double x : xi.values()) {
      if (a.less_than(x) && x <= b_val) mass += g_at_b - eta.count_at_most(x);
    }
    est.theta[static_cast<Eigen::Index>(i)] =
        static_cast<double>(mass) / static_cast<double>(alpha * beta);
  }
  return est;
}

PaucEstimate estimate_pauc_trimmed_mw(const DiagnosticSample& data, const TrimSpec& trim) {
  const std::size_t kappa = data.markers();
  const std::size_t alpha = data.alpha();
  const std::size_t beta = data.beta();
  const std::size_t r_first = ceil_count(alpha, 1.0 - trim.p());
  const std::size_t s_last = std::min(ceil_count(beta, 1.0 - trim.q()), beta);

  PaucEstimate est;
  est.theta.resize(static_cast<Eigen::Index>(kappa));
  est.alpha = alpha;
  est.beta = beta;
  for (std::size_t i = 0; i < kappa; ++i) {
    const auto xs = data.nondiseased().column(i).sorted();
    const auto ys = data.diseased().column(i).sorted();
    std::uint64_t count = 0;
    for (std::size_t r = r_first; r < alpha; ++r) {
      for (std::size_t s = 0; s < s_last; ++s) {
        if (xs[r] < ys[s]) ++count;
      }
    }
    est.theta[static_cast<Eigen::Index>(i)] =
        static_cast<double>(count) / static_cast<double>(alpha * beta);
    est.lower_cuts.push_back(r_first == 0 ? ExtendedReal::neg_inf()
                                          : ExtendedReal::finite(xs[r_first - 1]));
    est.upper_cuts.push_back(ExtendedReal::finite(ys[s_last - 1]));
  }
  return est;
}

MarginalSpec::MarginalSpec(Kind kind, double mu, double sigma)
    : kind_(kind), mu_(mu), sigma_(sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw std::invalid_argument("marginal sigma must be positive");
  }
  if (!std::isfinite(mu)) throw std::invalid_argument("marginal mu must be finite");
}

double MarginalSpec::from_standard_normal(double z) const {
  const double y = mu_ + sigma_ * z;
  switch (kind_) {
    case Kind::kNormal: return y;
    case Kind::kLogNormal: return std::exp(y);
    case Kind::kLogitNormal: return 1.0 / (1.0 + std::exp(-y));
  }
  return y;
}

double MarginalSpec::to_standard_normal(double x) const {
  double y = x;
  switch (kind_) {
    case Kind::kNormal: break;
    case Kind::kLogNormal:
      if (x <= 0.0) return -std::numeric_limits<double>::infinity();
      y = std::log(x);
      break;
    case Kind::kLogitNormal:
      if (x <= 0.0) return -std::numeric_limits<double>::infinity();
      if (x >= 1.0) return std::numeric_limits<double>::infinity();
      y = std::log(x) - std::log1p(-x);
      break;
  }
  return (y - mu_) / sigma_;
}

double MarginalSpec::cdf(double x) const { return standard_normal_cdf(to_standard_normal(x)); }

double MarginalSpec::quantile(double u) const {
  return from_standard_normal(standard_normal_quantile(u));
}

std::string MarginalSpec::kind_name() const {
  switch (kind_) {
    case Kind::kNormal: return "normal";
    case Kind::kLogNormal: return "lognormal";
    case Kind::kLogitNormal: return "logitnormal";
  }
  return "normal";
}

MarginalSpec::Kind MarginalSpec::parse_kind(const std::string& name) {
  if (name == "normal") return Kind::kNormal;
  if (name == "lognormal") return Kind::kLogNormal;
  if (name == "logitnormal") return Kind::kLogitNormal;
  throw std::invalid_argument("unknown marginal kind '" + name + "'");
}

double true_pauc(const MarginalSpec& f, const MarginalSpec& g, const TrimSpec& trim,
                 int resolution) {
  if (resolution < 1000) throw std::invalid_argument("resolution must be at least 1000");
  const double lower = 1.0 - trim.p();
  const double g_at_b = 1.0 - trim.q();
  // F(b) with b = G^{-1}(1 - q); q = 0 puts b at the top of G's support.
  const double upper = trim.q() == 0.0 ? 1.0 : f.cdf(g.quantile(g_at_b));
  if (!(upper > lower)) return 0.0;

  const double h = (upper - lower) / resolution;
  double sum = 0.0;
  for (int k = 0; k < resolution; ++k) {
    const double u = lower + (k + 0.5) * h;
    const double t = f.quantile(u);
    sum += g_at_b - g.cdf(t);
  }
  return std::max(0.0, sum * h);
}

}  // namespace pauc
