#pragma once

#include <cmath>
#include <string>
#include <variant>
#include <vector>

#include "gpid/core.hpp"

namespace gpid {

struct Lognormal {
  double mu = 0.0, sigma = 1.0;
  Lognormal(double m, double s) : mu(m), sigma(s) {
    if (!(sigma > 0.0)) throw UsageError("lognormal: sigma must be > 0");
  }
  double cdf(double x) const { return x <= 0.0 ? 0.0 : normal_cdf((std::log(x) - mu) / sigma); }
  double quantile(double u) const { return std::exp(mu + sigma * normal_quantile(u)); }
};

// CDF 1 - (1 + (x/b)^a)^(-q); parameterization stated explicitly because the
// literature varies.
struct SinghMaddala {
  double a = 1.0, b = 1.0, q = 1.0;
  SinghMaddala(double a_, double b_, double q_) : a(a_), b(b_), q(q_) {
    if (!(a > 0.0 && b > 0.0 && q > 0.0)) throw UsageError("singh_maddala: parameters must be > 0");
  }
  double cdf(double x) const { return x <= 0.0 ? 0.0 : 1.0 - std::pow(1.0 + std::pow(x / b, a), -q); }
  double quantile(double u) const {
    if (!(u > 0.0 && u < 1.0)) throw std::domain_error("quantile: u must be in (0,1)");
    return b * std::pow(std::pow(1.0 - u, -1.0 / q) - 1.0, 1.0 / a);
  }
};

struct Pareto {
  double xm = 1.0, alpha = 1.0;
  Pareto(double xm_, double alpha_) : xm(xm_), alpha(alpha_) {
    if (!(xm > 0.0 && alpha > 0.0)) throw UsageError("pareto: parameters must be > 0");
  }
  double cdf(double x) const { return x <= xm ? 0.0 : 1.0 - std::pow(xm / x, alpha); }
  double quantile(double u) const {
    if (!(u > 0.0 && u < 1.0)) throw std::domain_error("quantile: u must be in (0,1)");
    return xm * std::pow(1.0 - u, -1.0 / alpha);
  }
};

struct UniformDist {
  double lo = 0.0, hi = 1.0;
  UniformDist(double lo_, double hi_) : lo(lo_), hi(hi_) {
    if (!(lo >= 0.0 && hi > lo)) throw UsageError("uniform: need 0 <= lo < hi");
  }
  double cdf(double x) const { return x <= lo ? 0.0 : (x >= hi ? 1.0 : (x - lo) / (hi - lo)); }
  double quantile(double u) const { return lo + u * (hi - lo); }
};

using ParamDist = std::variant<Lognormal, SinghMaddala, Pareto, UniformDist>;

inline double dist_cdf(const ParamDist& d, double x) {
  return std::visit([x](const auto& g) { return g.cdf(x); }, d);
}
inline double dist_quantile(const ParamDist& d, double u) {
  return std::visit([u](const auto& g) { return g.quantile(u); }, d);
}

inline std::string dist_describe(const ParamDist& d) {
  char buf[96];
  if (const auto* l = std::get_if<Lognormal>(&d))
    std::snprintf(buf, sizeof buf, "lognormal(%g,%g)", l->mu, l->sigma);
  else if (const auto* s = std::get_if<SinghMaddala>(&d))
    std::snprintf(buf, sizeof buf, "singh_maddala(%g,%g,%g)", s->a, s->b, s->q);
  else if (const auto* p = std::get_if<Pareto>(&d))
    std::snprintf(buf, sizeof buf, "pareto(%g,%g)", p->xm, p->alpha);
  else {
    const auto& u = std::get<UniformDist>(d);
    std::snprintf(buf, sizeof buf, "uniform(%g,%g)", u.lo, u.hi);
  }
  return buf;
}

// "name(a,b[,c])" -> ParamDist
inline ParamDist parse_dist(const std::string& text) {
  auto lp = text.find('(');
  auto rp = text.rfind(')');
  if (lp == std::string::npos || rp == std::string::npos || rp < lp)
    throw UsageError("bad distribution '" + text + "'; expected name(a,b[,c])");
  std::string name = text.substr(0, lp);
  std::vector<double> args;
  std::string inner = text.substr(lp + 1, rp - lp - 1);
  std::size_t pos = 0;
  while (pos <= inner.size()) {
    auto comma = inner.find(',', pos);
    std::string tok = inner.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    try {
      std::size_t used = 0;
      args.push_back(std::stod(tok, &used));
    } catch (const std::exception&) {
      throw UsageError("bad distribution parameter '" + tok + "' in '" + text + "'");
    }
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  auto want = [&](std::size_t k) {
    if (args.size() != k)
      throw UsageError("distribution '" + name + "' expects " + std::to_string(k) + " parameters");
  };
  if (name == "lognormal") { want(2); return Lognormal(args[0], args[1]); }
  if (name == "singh_maddala") { want(3); return SinghMaddala(args[0], args[1], args[2]); }
  if (name == "pareto") { want(2); return Pareto(args[0], args[1]); }
  if (name == "uniform") { want(2); return UniformDist(args[0], args[1]); }
  throw UsageError("unknown distribution '" + name + "' (lognormal, singh_maddala, pareto, uniform)");
}

// Mixture G = sum p_i G_i.  The quantile is a bisection on the cdf, bracketed
// by the extreme component quantiles, to 1e-12 absolute tolerance.
class Mixture {
 public:
  Mixture(std::vector<double> p, std::vector<ParamDist> components)
      : p_(std::move(p)), comps_(std::move(components)) {
    if (p_.empty() || p_.size() != comps_.size()) throw UsageError("mixture: p and components must align");
    double s = 0.0;
    for (double pi : p_) {
      if (!(pi > 0.0)) throw UsageError("mixture: all p_i must be > 0");
      s += pi;
    }
    if (std::abs(s - 1.0) > 1e-12) throw UsageError("mixture: sum p_i must be 1 (got " + std::to_string(s) + ")");
  }

  int K() const { return static_cast<int>(p_.size()); }
  const std::vector<double>& p() const { return p_; }
  const std::vector<ParamDist>& components() const { return comps_; }

  double cdf(double x) const {
    double s = 0.0;
    for (std::size_t i = 0; i < p_.size(); ++i) s += p_[i] * dist_cdf(comps_[i], x);
    return s;
  }

  double quantile(double u) const {
    if (!(u > 0.0 && u < 1.0)) throw std::domain_error("quantile: u must be in (0,1)");
    double lo = dist_quantile(comps_[0], 1e-12), hi = dist_quantile(comps_[0], 1.0 - 1e-12);
    for (std::size_t i = 1; i < comps_.size(); ++i) {
      lo = std::min(lo, dist_quantile(comps_[i], 1e-12));
      hi = std::max(hi, dist_quantile(comps_[i], 1.0 - 1e-12));
    }
    lo = std::min(lo, hi);
    for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
      double mid = 0.5 * (lo + hi);
      if (cdf(mid) >= u)
        hi = mid;
      else
        lo = mid;
    }
    return 0.5 * (lo + hi);
  }

 private:
  std::vector<double> p_;
  std::vector<ParamDist> comps_;
};

}  // namespace gpid
