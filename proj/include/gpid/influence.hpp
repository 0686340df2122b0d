#pragma once

#include <cmath>
#include <concepts>
#include <functional>
#include <memory>
#include <type_traits>
#include <vector>

#include "gpid/core.hpp"
#include "gpid/empirical.hpp"
#include "gpid/measures.hpp"

namespace gpid {

template <class D>
concept QuantileDistribution = requires(const D& d, double x) {
  { d.cdf(x) } -> std::convertible_to<double>;
  { d.quantile(x) } -> std::convertible_to<double>;
};

// integral over s in (a,b] of f(s, G^{-1}(s)).
//
// Empirical overload: the quantile is constant on each ((j-1)/n, j/n], so the
// integral is an exact finite sum of per-piece s-integrals; the pieces are
// handled with 8-node Gauss-Legendre, exact for the polynomial s-weights of
// every built-in measure.
template <class F>
double quantile_integral(const EmpiricalDist& dist, double a, double b, F&& f) {
  if (!(b > a)) return 0.0;
  const auto n = static_cast<double>(dist.n());
  const auto& gl = gauss_legendre(8);
  const auto j_first = static_cast<std::size_t>(std::floor(a * n)) + 1;       // first piece with mass in (a,b]
  KahanSum total;
  for (std::size_t j = j_first; j <= dist.n(); ++j) {
    const double lo = std::max(a, (static_cast<double>(j) - 1.0) / n);
    const double hi = std::min(b, static_cast<double>(j) / n);
    if (hi <= lo) {
      if (lo >= b) break;
      continue;
    }
    const double y = dist.values()[j - 1];
    const double c0 = 0.5 * (hi + lo), c1 = 0.5 * (hi - lo);
    double piece = 0.0;
    for (const auto& [x, w] : gl) piece += w * f(c0 + c1 * x, y);
    total.add(piece * c1);
    if (hi >= b) break;
  }
  return total.value();
}

// Parametric overload: composite Gauss-Legendre, 16 panels x 16 nodes graded
// quadratically toward a (the quantile is steepest near 0).
template <QuantileDistribution D, class F>
  requires(!std::same_as<std::remove_cvref_t<D>, EmpiricalDist>)
double quantile_integral(const D& dist, double a, double b, F&& f) {
  if (!(b > a)) return 0.0;
  const int panels = 16;
  const auto& gl = gauss_legendre(16);
  KahanSum total;
  double e0 = a;
  for (int i = 1; i <= panels; ++i) {
    const double u = static_cast<double>(i) / panels;
    const double e1 = a + (b - a) * u * u;
    const double c0 = 0.5 * (e1 + e0), c1 = 0.5 * (e1 - e0);
    double piece = 0.0;
    for (const auto& [x, w] : gl) {
      const double s = c0 + c1 * x;
      piece += w * f(s, dist.quantile(s));
    }
    total.add(piece * c1);
    e0 = e1;
  }
  return total.value();
}

// H_c, H_pi and the K-pieces of (the ratio form of) one measure at one
// distribution; J = H_c / H_pi is the exact index.
struct Functionals {
  double H_c = 0.0, H_pi = 0.0;
  double K_c = 0.0, K_pi = 0.0;
  double K = 0.0;
  double J = 0.0;
};

struct ExactIndexResult {
  double value = 0.0;
  bool no_poor = false;
  bool hd0_warning = false;  // G0(Z) = 1: all mass at or below the line
};

// Influence pair bound to one measure and one distribution.  gbar/nubar are
// the unrestricted factors; g and nu apply the 1(y<=Z) indicator.
struct InfluencePair {
  double Z = 0.0;
  double q = 0.0;  // G0(Z)
  double J = 0.0;  // exact index of the bound distribution
  double K = 0.0;
  bool no_poor = false;
  bool hd0_warning = false;
  std::function<double(double)> gbar = [](double) { return 0.0; };
  std::function<double(double)> nubar = [](double) { return 0.0; };

  double g(double y) const { return y <= Z ? gbar(y) : 0.0; }
  double nu(double y) const { return y <= Z ? nubar(y) : 0.0; }
};

namespace detail {

// Relative poverty deficit after the Chakravarty transform, if any.
inline double gamma_bar(const MeasureSpec& m, double Z, double y) {
  if (m.transform_alpha) {
    const double Zt = std::pow(Z, m.parameter);
    return (Zt - std::pow(y, m.parameter)) / Zt;
  }
  return m.d((Z - y) / Z);
}

}  // namespace detail

// J(G0) from the measure's quantile-integral form.  Exact finite sum for
// empirical distributions, quadrature for parametric ones.
template <QuantileDistribution D>
ExactIndexResult exact_index(const MeasureSpec& m, const D& dist, double Z) {
  if (!(Z > 0.0)) throw std::domain_error("poverty line must be positive");
  ExactIndexResult out;
  const double q = dist.cdf(Z);
  if (q <= 0.0) {
    out.no_poor = true;
    return out;
  }
  if (q >= 1.0) out.hd0_warning = true;
  const double k = m.parameter;
  switch (m.id) {
    case MeasureId::fgt:
      out.value = quantile_integral(dist, 0.0, q, [&](double, double y) { return std::pow((Z - y) / Z, k); });
      break;
    case MeasureId::chakravarty:
      out.value = quantile_integral(dist, 0.0, q, [&](double, double y) { return 1.0 - std::pow(y / Z, k); });
      break;
    case MeasureId::sen:
      out.value =
          2.0 * quantile_integral(dist, 0.0, q, [&](double s, double y) { return (1.0 - s / q) * (Z - y) / Z; });
      break;
    case MeasureId::shorrocks:
    case MeasureId::thon:
      out.value =
          2.0 * quantile_integral(dist, 0.0, q, [&](double s, double y) { return (1.0 - s) * (Z - y) / Z; });
      break;
    case MeasureId::kakwani:
      out.value = (k + 1.0) * quantile_integral(dist, 0.0, q, [&](double s, double y) {
                    return std::pow(1.0 - s / q, k) * (Z - y) / Z;
                  });
      break;
  }
  return out;
}

// The Sen-family closed forms.  Only sen, shorrocks (thon shares its
// asymptotics) and kakwani(k) have displayed influence pairs.
template <QuantileDistribution D>
InfluencePair influence_closed_form(const MeasureSpec& m, const D& dist, double Z) {
  if (m.id == MeasureId::fgt || m.id == MeasureId::chakravarty)
    throw UsageError("no closed-form influence pair for unweighted measures");
  if (!(Z > 0.0)) throw std::domain_error("poverty line must be positive");

  InfluencePair out;
  out.Z = Z;
  const double q = dist.cdf(Z);
  out.q = q;
  if (q <= 0.0) {
    out.no_poor = true;
    return out;
  }
  if (q >= 1.0) out.hd0_warning = true;
  const double J = exact_index(m, dist, Z).value;
  out.J = J;

  auto cdf = [&dist](double y) { return dist.cdf(y); };
  switch (m.id) {
    case MeasureId::sen: {
      const double mean_poor = quantile_integral(dist, 0.0, q, [](double, double y) { return y; });
      const double K = 2.0 * (1.0 - mean_poor / (Z * q)) + J / q;
      out.K = K;
      out.gbar = [cdf, q, J, K, Z](double y) {
        const double G = cdf(y);
        return 2.0 * ((1.0 - G / q) * (Z - y) / Z - (G / q) * (J / q)) + K;
      };
      out.nubar = [q, J, Z](double y) { return -(2.0 / q) * ((Z - y) / Z + J / q); };
      break;
    }
    case MeasureId::shorrocks:
    case MeasureId::thon: {
      out.K = 0.0;
      out.gbar = [cdf, Z](double y) { return 2.0 * (1.0 - cdf(y)) * (Z - y) / Z; };
      out.nubar = [Z](double y) { return -2.0 * (Z - y) / Z; };
      break;
    }
    case MeasureId::kakwani: {
      const double k = m.parameter;
      const double lead = quantile_integral(
          dist, 0.0, q, [&](double s, double y) { return std::pow(1.0 - s / q, k - 1.0) * (Z - y) / Z; });
      const double K = k * (k + 1.0) / q * lead + J / q;
      out.K = K;
      out.gbar = [cdf, q, J, K, k, Z](double y) {
        const double G = cdf(y);
        return (k + 1.0) * (std::pow(1.0 - G / q, k) * (Z - y) / Z - (J / q) * std::pow(G / q, k)) + K;
      };
      out.nubar = [cdf, q, J, k, Z](double y) {
        const double G = cdf(y);
        return -(k * (k + 1.0) / q) *
               (std::pow(1.0 - G / q, k - 1.0) * (Z - y) / Z + (J / q) * std::pow(G / q, k - 1.0));
      };
      break;
    }
    default:
      break;
  }
  return out;
}

// Generic construction from (c, pi) and their partials.
//
// With constant_normalizer set, B(Q_n)h^{-1}(n,Q_n) is a data-free constant:
// the pi-side functional has zero derivative in the underlying distribution,
// so the construction keeps only the numerator terms (this reproduces the
// displayed Shorrocks pair, K = 0).  Otherwise the full ratio expansion with
// the K_c/K_pi integrals is used.
template <QuantileDistribution D>
InfluencePair influence_generic(const MeasureSpec& m, const D& dist, double Z) {
  if (!(Z > 0.0)) throw std::domain_error("poverty line must be positive");
  InfluencePair out;
  out.Z = Z;
  const double q = dist.cdf(Z);
  out.q = q;
  if (q <= 0.0) {
    out.no_poor = true;
    return out;
  }
  if (q >= 1.0) out.hd0_warning = true;

  const double H_c =
      quantile_integral(dist, 0.0, q, [&](double s, double y) { return m.c(q, s) * detail::gamma_bar(m, Z, y); });
  const double H_pi = quantile_integral(dist, 0.0, q, [&](double s, double) { return m.pi(q, s); });
  if (!(H_pi > 0.0) || !(H_c > 0.0))
    throw DataError("HD6 violation: H_c or H_pi not strictly positive");
  const double J = H_c / H_pi;
  out.J = J;

  auto cdf = [&dist](double y) { return dist.cdf(y); };
  const MeasureSpec spec = m;  // keep the callable pack alive inside the closures
  if (m.constant_normalizer) {
    const double K_c =
        quantile_integral(dist, 0.0, q, [&](double s, double y) { return m.dc_dx(q, s) * detail::gamma_bar(m, Z, y); });
    const double K = K_c / H_pi;
    out.K = K;
    out.gbar = [spec, cdf, q, H_pi, K, Z](double y) {
      return spec.c(q, cdf(y)) * detail::gamma_bar(spec, Z, y) / H_pi + K;
    };
    out.nubar = [spec, cdf, q, H_pi, Z](double y) {
      return spec.dc_dy(q, cdf(y)) * detail::gamma_bar(spec, Z, y) / H_pi;
    };
    return out;
  }

  const double K_c =
      quantile_integral(dist, 0.0, q, [&](double s, double y) { return m.dc_dx(q, s) * detail::gamma_bar(m, Z, y); });
  const double K_pi = quantile_integral(dist, 0.0, q, [&](double s, double) { return m.dpi_dx(q, s); });
  const double K = K_c / H_pi - H_c * K_pi / (H_pi * H_pi);
  out.K = K;
  const double ratio = H_c / (H_pi * H_pi);
  out.gbar = [spec, cdf, q, H_pi, ratio, K, Z](double y) {
    const double G = cdf(y);
    return spec.c(q, G) * detail::gamma_bar(spec, Z, y) / H_pi - ratio * spec.pi(q, G) + K;
  };
  out.nubar = [spec, cdf, q, H_pi, ratio, Z](double y) {
    const double G = cdf(y);
    return spec.dc_dy(q, G) * detail::gamma_bar(spec, Z, y) / H_pi - ratio * spec.dpi_dy(q, G);
  };
  return out;
}

// The five scalars of the ratio form, by the literal (meth3)-(meth4) integrals.
template <QuantileDistribution D>
Functionals functionals(const MeasureSpec& m, const D& dist, double Z) {
  if (!(Z > 0.0)) throw std::domain_error("poverty line must be positive");
  const double q = dist.cdf(Z);
  Functionals f;
  if (q <= 0.0) return f;
  f.H_c = quantile_integral(dist, 0.0, q, [&](double s, double y) { return m.c(q, s) * detail::gamma_bar(m, Z, y); });
  f.H_pi = quantile_integral(dist, 0.0, q, [&](double s, double) { return m.pi(q, s); });
  if (!(f.H_pi > 0.0) || !(f.H_c > 0.0))
    throw DataError("HD6 violation: H_c or H_pi not strictly positive");
  f.K_c = quantile_integral(dist, 0.0, q, [&](double s, double y) { return m.dc_dx(q, s) * detail::gamma_bar(m, Z, y); });
  f.K_pi = quantile_integral(dist, 0.0, q, [&](double s, double) { return m.dpi_dx(q, s); });
  f.K = f.K_c / f.H_pi - f.H_c * f.K_pi / (f.H_pi * f.H_pi);
  f.J = f.H_c / f.H_pi;
  return f;
}

// The influence pair the decomposition plugs in: closed forms for the Sen
// family, the degenerate (gamma, 0) pair for the decomposable measures.
template <QuantileDistribution D>
InfluencePair influence(const MeasureSpec& m, const D& dist, double Z) {
  if (m.id == MeasureId::fgt || m.id == MeasureId::chakravarty) return influence_generic(m, dist, Z);
  return influence_closed_form(m, dist, Z);
}

// HD1/HD2 deviations at finite (n, Q) with the measure's derived h.
struct HdDeviation {
  double dev1 = 0.0;
  double dev2 = 0.0;
};

inline HdDeviation hd_diagnostic(const MeasureSpec& m, std::size_t n, std::size_t Q) {
  if (Q < 1 || Q > n) throw std::domain_error("hd_diagnostic: need 1 <= Q <= n");
  const auto nn = static_cast<double>(n), Qd = static_cast<double>(Q);
  const double hinv = 1.0 / m.h(nn, Qd);
  const double Anorm = m.A(Qd, nn, 1.0);
  HdDeviation out;
  for (std::size_t j = 1; j <= Q; ++j) {
    const double jd = static_cast<double>(j);
    const double lhs1 = Anorm * hinv * m.w(m.mu1 * nn + m.mu2 * Qd - m.mu3 * jd + m.mu4);
    const double lhs2 = m.w(jd) * hinv;
    out.dev1 = std::max(out.dev1, std::abs(lhs1 - m.c(Qd / nn, jd / nn)));
    out.dev2 = std::max(out.dev2, std::abs(lhs2 - m.pi(Qd / nn, jd / nn) / nn));
  }
  return out;
}

}  // namespace gpid
