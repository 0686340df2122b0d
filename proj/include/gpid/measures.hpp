#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <string>

#include "gpid/core.hpp"
#include "gpid/empirical.hpp"

namespace gpid {

enum class MeasureId { fgt, chakravarty, sen, shorrocks, thon, kakwani };

inline const char* measure_name(MeasureId id) {
  switch (id) {
    case MeasureId::fgt: return "fgt";
    case MeasureId::chakravarty: return "chakravarty";
    case MeasureId::sen: return "sen";
    case MeasureId::shorrocks: return "shorrocks";
    case MeasureId::thon: return "thon";
    case MeasureId::kakwani: return "kakwani";
  }
  return "?";
}

// One member of the GPI family: the weighted-sum ingredients (w, d, A, B,
// mu offsets, delta) plus its asymptotic bookkeeping (c, pi, their partials,
// the HD normalizer h).
//
// constant_normalizer marks measures whose normalizer B(Q_n)/h(n,Q_n) is a
// data-independent constant (shorrocks, thon, fgt, chakravarty).  For those
// the influence construction drops the pi-side terms, which is the simplified
// split the closed forms use; the terms it drops cancel exactly against the
// residual process.
struct MeasureSpec {
  MeasureId id = MeasureId::sen;
  double parameter = 0.0;  // alpha for fgt/chakravarty, k for kakwani; unused otherwise

  std::function<double(double)> w;
  std::function<double(double)> d;
  std::function<double(double, double, double)> A;  // A(Q, n, Z)
  std::function<double(double, double)> B;          // B(Q, n)
  double mu1 = 0, mu2 = 0, mu3 = 0, mu4 = 0;
  std::function<double(double)> delta;

  std::function<double(double, double)> c, pi;
  std::function<double(double, double)> dc_dx, dc_dy, dpi_dx, dpi_dy;
  std::function<double(double, double)> h;  // h(n, Q)

  bool constant_normalizer = false;
  bool transform_alpha = false;  // chakravarty: work on Y^alpha against Z^alpha
  bool weighted = false;         // has a closed-form influence pair in the Sen family
};

inline MeasureSpec measure_spec(MeasureId id, std::optional<double> parameter = std::nullopt) {
  const bool needs_param = id == MeasureId::fgt || id == MeasureId::chakravarty || id == MeasureId::kakwani;
  if (needs_param && !parameter)
    throw UsageError(std::string(measure_name(id)) + " requires a parameter");
  if (!needs_param && parameter)
    throw UsageError(std::string(measure_name(id)) + " takes no parameter");

  MeasureSpec m;
  m.id = id;
  m.delta = [](double v) { return v; };
  switch (id) {
    case MeasureId::fgt:
    case MeasureId::chakravarty: {
      double alpha = *parameter;
      if (!(alpha >= 0.0)) throw UsageError("alpha must be >= 0");
      m.parameter = alpha;
      m.w = [](double) { return 1.0; };
      m.d = id == MeasureId::fgt ? std::function<double(double)>([alpha](double u) { return std::pow(u, alpha); })
                                 : std::function<double(double)>([](double u) { return u; });
      m.A = [](double Q, double, double) { return Q; };
      m.B = [](double Q, double) { return Q; };
      m.c = [](double, double) { return 1.0; };
      m.pi = [](double x, double) { return 1.0 / x; };
      m.dc_dx = [](double, double) { return 0.0; };
      m.dc_dy = [](double, double) { return 0.0; };
      m.dpi_dx = [](double x, double) { return -1.0 / (x * x); };
      m.dpi_dy = [](double, double) { return 0.0; };
      m.h = [](double, double Q) { return Q; };
      m.constant_normalizer = true;
      m.transform_alpha = id == MeasureId::chakravarty;
      break;
    }
    case MeasureId::sen: {
      m.w = [](double u) { return u; };
      m.d = [](double u) { return u; };
      m.A = [](double Q, double, double) { return Q; };
      m.B = [](double Q, double) { return Q * (Q + 1.0) / 2.0; };
      m.mu1 = 0; m.mu2 = 1; m.mu3 = 1; m.mu4 = 1;
      m.c = [](double x, double y) { return x - y; };
      m.pi = [](double x, double y) { return y / x; };
      m.dc_dx = [](double, double) { return 1.0; };
      m.dc_dy = [](double, double) { return -1.0; };
      m.dpi_dx = [](double x, double y) { return -y / (x * x); };
      m.dpi_dy = [](double x, double) { return 1.0 / x; };
      m.h = [](double n, double Q) { return n * Q; };
      m.weighted = true;
      break;
    }
    case MeasureId::shorrocks:
    case MeasureId::thon: {
      m.w = [](double u) { return u; };
      m.d = [](double u) { return u; };
      // Thon differs from Shorrocks only by the n(n+1) normalization.
      m.A = id == MeasureId::shorrocks
                ? std::function<double(double, double, double)>(
                      [](double Q, double n, double) { return Q * (Q + 1.0) / (2.0 * n); })
                : std::function<double(double, double, double)>(
                      [](double Q, double n, double) { return Q * (Q + 1.0) / (2.0 * (n + 1.0)); });
      m.B = [](double Q, double) { return Q * (Q + 1.0) / 2.0; };
      m.mu1 = 2; m.mu2 = 0; m.mu3 = 2; m.mu4 = 1;
      m.c = [](double, double y) { return 2.0 * (1.0 - y); };
      m.pi = [](double x, double y) { return 2.0 * y / (x * x); };
      m.dc_dx = [](double, double) { return 0.0; };
      m.dc_dy = [](double, double) { return -2.0; };
      m.dpi_dx = [](double x, double y) { return -4.0 * y / (x * x * x); };
      m.dpi_dy = [](double x, double) { return 2.0 / (x * x); };
      m.h = [](double, double Q) { return Q * (Q + 1.0) / 2.0; };
      m.constant_normalizer = true;
      m.weighted = true;
      break;
    }
    case MeasureId::kakwani: {
      double k = *parameter;
      if (!(k >= 1.0)) throw UsageError("kakwani parameter k must be >= 1");
      m.parameter = k;
      m.w = [k](double u) { return std::pow(u, k); };
      m.d = [](double u) { return u; };
      m.A = [](double Q, double, double) { return Q; };
      m.B = [k](double Q, double) {
        long double s = 0.0L;
        for (double j = 1.0; j <= Q + 0.5; j += 1.0) s += std::pow((long double)j, (long double)k);
        return (double)s;
      };
      m.mu1 = 0; m.mu2 = 1; m.mu3 = 1; m.mu4 = 1;
      m.c = [k](double x, double y) { return std::pow(x - y, k); };
      m.pi = [k](double x, double y) { return std::pow(y, k) / x; };
      m.dc_dx = [k](double x, double y) { return k * std::pow(x - y, k - 1.0); };
      m.dc_dy = [k](double x, double y) { return -k * std::pow(x - y, k - 1.0); };
      m.dpi_dx = [k](double x, double y) { return -std::pow(y, k) / (x * x); };
      m.dpi_dy = [k](double x, double y) { return k * std::pow(y, k - 1.0) / x; };
      m.h = [k](double n, double Q) { return std::pow(n, k) * Q; };
      m.weighted = true;
      break;
    }
  }
  return m;
}

// Measure string grammar: sen | shorrocks | thon | kakwani:k | fgt:a | chakravarty:a
inline MeasureSpec parse_measure(const std::string& text) {
  auto pos = text.find(':');
  std::string name = text.substr(0, pos);
  std::optional<double> param;
  if (pos != std::string::npos) {
    try {
      std::size_t used = 0;
      param = std::stod(text.substr(pos + 1), &used);
      if (used != text.size() - pos - 1) throw std::invalid_argument("");
    } catch (const std::exception&) {
      throw UsageError("bad measure parameter in '" + text +
                       "'; grammar: sen | shorrocks | thon | kakwani:k | fgt:a | chakravarty:a");
    }
  }
  MeasureId id;
  if (name == "sen") id = MeasureId::sen;
  else if (name == "shorrocks") id = MeasureId::shorrocks;
  else if (name == "thon") id = MeasureId::thon;
  else if (name == "kakwani") id = MeasureId::kakwani;
  else if (name == "fgt") id = MeasureId::fgt;
  else if (name == "chakravarty") id = MeasureId::chakravarty;
  else
    throw UsageError("unknown measure '" + name +
                     "'; grammar: sen | shorrocks | thon | kakwani:k | fgt:a | chakravarty:a");
  return measure_spec(id, param);
}

struct IndexValue {
  double value = 0.0;
  std::size_t Q = 0;
  std::size_t n = 0;
  bool no_poor = false;
};

inline std::pair<std::size_t, double> headcount(const EmpiricalDist& dist, double Z) {
  if (!(Z > 0.0)) throw std::domain_error("poverty line must be positive");
  std::size_t Q = dist.count_leq(Z);
  return {Q, static_cast<double>(Q) / static_cast<double>(dist.n())};
}

// The generic weighted GPI evaluated through the (A, B, w, mu, d, delta)
// machinery.  Chakravarty goes through its income/threshold transform.
inline IndexValue compute_gpi(const EmpiricalDist& dist, double Z, const MeasureSpec& spec) {
  if (!(Z > 0.0)) throw std::domain_error("poverty line must be positive");
  const auto nn = static_cast<double>(dist.n());
  const double Zt = spec.transform_alpha ? std::pow(Z, spec.parameter) : Z;
  const std::size_t Q = dist.count_leq(Z);
  IndexValue out;
  out.Q = Q;
  out.n = dist.n();
  if (Q == 0) {
    out.no_poor = true;
    out.value = 0.0;
    return out;
  }
  const double Qd = static_cast<double>(Q);
  long double sum = 0.0L;
  for (std::size_t j = 1; j <= Q; ++j) {
    double y = dist.values()[j - 1];
    if (spec.transform_alpha) y = std::pow(y, spec.parameter);
    const double arg = spec.mu1 * nn + spec.mu2 * Qd - spec.mu3 * static_cast<double>(j) + spec.mu4;
    sum += static_cast<long double>(spec.w(arg)) * static_cast<long double>(spec.d((Zt - y) / Zt));
  }
  const long double norm = static_cast<long double>(spec.A(Qd, nn, Z)) /
                           (static_cast<long double>(nn) * static_cast<long double>(spec.B(Qd, nn)));
  out.value = spec.delta(static_cast<double>(norm * sum));
  return out;
}

// Dedicated per-measure formulas, kept independent of the (A,B,w,mu) route.
inline IndexValue closed_form_index(const EmpiricalDist& dist, double Z, MeasureId id,
                                    std::optional<double> parameter = std::nullopt) {
  if (!(Z > 0.0)) throw std::domain_error("poverty line must be positive");
  const bool needs_param = id == MeasureId::fgt || id == MeasureId::chakravarty || id == MeasureId::kakwani;
  if (needs_param && !parameter) throw UsageError(std::string(measure_name(id)) + " requires a parameter");
  const auto nn = static_cast<double>(dist.n());
  const std::size_t Q = dist.count_leq(Z);
  IndexValue out;
  out.Q = Q;
  out.n = dist.n();
  if (Q == 0) {
    out.no_poor = true;
    return out;
  }
  const double Qd = static_cast<double>(Q);
  long double sum = 0.0L;
  switch (id) {
    case MeasureId::fgt: {
      for (std::size_t j = 0; j < Q; ++j)
        sum += std::pow(static_cast<long double>((Z - dist.values()[j]) / Z), (long double)*parameter);
      out.value = static_cast<double>(sum / nn);
      break;
    }
    case MeasureId::chakravarty: {
      for (std::size_t j = 0; j < Q; ++j)
        sum += 1.0L - std::pow(static_cast<long double>(dist.values()[j] / Z), (long double)*parameter);
      out.value = static_cast<double>(sum / nn);
      break;
    }
    case MeasureId::sen: {
      for (std::size_t j = 1; j <= Q; ++j)
        sum += static_cast<long double>(Qd - j + 1.0) * static_cast<long double>((Z - dist.values()[j - 1]) / Z);
      out.value = static_cast<double>(2.0L * sum / (nn * (Qd + 1.0)));
      break;
    }
    case MeasureId::shorrocks:
    case MeasureId::thon: {
      for (std::size_t j = 1; j <= Q; ++j)
        sum += static_cast<long double>(2.0 * nn - 2.0 * j + 1.0) *
               static_cast<long double>((Z - dist.values()[j - 1]) / Z);
      out.value = static_cast<double>(id == MeasureId::shorrocks ? sum / (nn * nn) : sum / (nn * (nn + 1.0)));
      break;
    }
    case MeasureId::kakwani: {
      const double k = *parameter;
      if (!(k >= 1.0)) throw UsageError("kakwani parameter k must be >= 1");
      long double denom = 0.0L;
      for (std::size_t j = 1; j <= Q; ++j) denom += std::pow((long double)j, (long double)k);
      for (std::size_t j = 1; j <= Q; ++j)
        sum += std::pow(static_cast<long double>(Qd - j + 1.0), (long double)k) *
               static_cast<long double>((Z - dist.values()[j - 1]) / Z);
      out.value = static_cast<double>(static_cast<long double>(Qd) * sum / (nn * denom));
      break;
    }
  }
  return out;
}

inline IndexValue closed_form_index(const EmpiricalDist& dist, double Z, const MeasureSpec& spec) {
  const bool needs_param =
      spec.id == MeasureId::fgt || spec.id == MeasureId::chakravarty || spec.id == MeasureId::kakwani;
  return closed_form_index(dist, Z, spec.id, needs_param ? std::optional<double>(spec.parameter) : std::nullopt);
}

}  // namespace gpid
