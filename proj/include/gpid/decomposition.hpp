#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "gpid/core.hpp"
#include "gpid/empirical.hpp"
#include "gpid/influence.hpp"
#include "gpid/measures.hpp"
#include "gpid/survey.hpp"

namespace gpid {

struct VarianceComponents {
  double A1 = 0, A2 = 0, A31 = 0, A32 = 0;
  double B1 = 0, B2 = 0, B3 = 0;
  std::vector<double> F, M, H;  // one entry per stratum
  double theta1_sq = 0, theta2_sq = 0, theta3_sq = 0;
  bool theta1_clamped = false;   // negative within tolerance, clamped to 0
  bool hd0_warning = false;      // some stratum is fully poor / fully non-poor
};

struct Interval {
  double lo = 0, hi = 0;
  bool contains(double x) const { return lo <= x && x <= hi; }
};

struct GroupIndexRow {
  int label = 0;
  std::size_t n_i = 0;
  double index = 0.0;
};

struct GapReport {
  MeasureId id = MeasureId::sen;
  double parameter = 0.0;
  double Z = 0.0;
  std::size_t n = 0;
  double global_index = 0.0;
  std::vector<GroupIndexRow> group_indices;
  double gd_n = 0.0;
  VarianceComponents components;
  Interval ci_gd, ci_gd0;
  double level = 0.95;
};

struct GapValue {
  double gd_n = 0.0;
  double global_index = 0.0;
  std::vector<GroupIndexRow> group_indices;
};

// gd_n = J_n - sum (n_i/n) J_{n_i}, all through the per-measure closed forms.
inline GapValue gap(const GroupedSample& sample, double Z, const MeasureSpec& m) {
  GapValue out;
  const EmpiricalDist pooled = pooled_distribution(sample);
  out.global_index = closed_form_index(pooled, Z, m).value;
  KahanSum weighted;
  for (int i = 1; i <= sample.K(); ++i) {
    const EmpiricalDist gi = group_distribution(sample, i);
    const double Ji = closed_form_index(gi, Z, m).value;
    out.group_indices.push_back({sample.label(i), sample.n_i(i), Ji});
    weighted.add(sample.p_hat(i) * Ji);
  }
  out.gd_n = out.global_index - weighted.value();
  return out;
}

inline Interval confidence_interval(double gd_n, double theta_sq, std::size_t n, double level) {
  if (!(theta_sq >= 0.0)) throw std::domain_error("confidence_interval: theta_sq must be >= 0");
  if (n < 1) throw std::domain_error("confidence_interval: n must be >= 1");
  if (!(level > 0.0 && level < 1.0)) throw std::domain_error("confidence_interval: level must be in (0,1)");
  const double z = normal_quantile(0.5 * (1.0 + level));
  const double half = z * std::sqrt(theta_sq / static_cast<double>(n));
  return {gd_n - half, gd_n + half};
}

namespace detail {

// Pre-evaluated plug-in arrays for one stratum, restricted to its poor
// observations (the sorted prefix at or below Z).
struct GroupArrays {
  std::vector<double> v;      // poor values, ascending
  std::vector<double> s;      // own empirical CDF at v (jump-inclusive)
  std::vector<double> gdiff;  // gbar_pooled - gbar_group at v
  std::vector<double> cb;     // p_i*nubar_pooled - nubar_group at v
  std::vector<double> nuP;    // nubar_pooled at v
  std::vector<double> pref;   // pref[a] = sum gdiff[0..a-1] (plain prefix sums)
  std::size_t n_i = 0;
  std::size_t Q = 0;
  double sum_gdiff = 0.0;
};

// sum_{a,b} min(s[a],s[b]) x[a] x[b] for ascending s, via suffix sums.
inline double pair_min_sym(const std::vector<double>& s, const std::vector<double>& x) {
  const std::size_t m = s.size();
  std::vector<long double> suffix(m + 1, 0.0L);
  for (std::size_t a = m; a-- > 0;) suffix[a] = suffix[a + 1] + x[a];
  long double total = 0.0L, prefix_sx = 0.0L;
  for (std::size_t a = 0; a < m; ++a) {
    total += x[a] * (s[a] * (suffix[a + 1] + x[a]) + prefix_sx);
    prefix_sx += static_cast<long double>(s[a]) * x[a];
  }
  return static_cast<double>(total);
}

// sum_{a,b} min(u[a],v[b]) x[a] y[b] for ascending u, v.
inline double pair_min_cross(const std::vector<double>& u, const std::vector<double>& x,
                             const std::vector<double>& v, const std::vector<double>& y) {
  const std::size_t mu = u.size(), mv = v.size();
  std::vector<long double> pre_vy(mv + 1, 0.0L), suf_y(mv + 1, 0.0L);
  for (std::size_t b = 0; b < mv; ++b) pre_vy[b + 1] = pre_vy[b] + static_cast<long double>(v[b]) * y[b];
  for (std::size_t b = mv; b-- > 0;) suf_y[b] = suf_y[b + 1] + y[b];
  long double total = 0.0L;
  std::size_t idx = 0;
  for (std::size_t a = 0; a < mu; ++a) {
    while (idx < mv && v[idx] <= u[a]) ++idx;  // v[b] <= u[a] contribute v[b]
    total += x[a] * (pre_vy[idx] + static_cast<long double>(u[a]) * suf_y[idx]);
  }
  return static_cast<double>(total);
}

inline long double dot(const std::vector<double>& a, const std::vector<double>& b) {
  long double s = 0.0L;
  for (std::size_t i = 0; i < a.size(); ++i) s += static_cast<long double>(a[i]) * b[i];
  return s;
}

}  // namespace detail

// Plug-in evaluation of the seven variance constants and the three theta^2's
// of the limit theorem.  Empirical shares, CDFs and influence pairs replace
// their population counterparts; single integrals over a stratum's poor range
// become (1/n_i)-sums, double integrals become (1/(n_i n_j))-double sums with
// empirical CDF values inside the kernels.
inline VarianceComponents variance_components(const GroupedSample& sample, double Z, const MeasureSpec& m) {
  const int K = sample.K();
  const auto n = static_cast<double>(sample.n());
  VarianceComponents out;

  const EmpiricalDist pooled = pooled_distribution(sample);
  if (pooled.count_leq(Z) == 0) throw DataError("no poor observations anywhere: no inference possible");
  const InfluencePair gP = influence(m, pooled, Z);

  std::vector<EmpiricalDist> groups;
  groups.reserve(static_cast<std::size_t>(K));
  for (int i = 1; i <= K; ++i) groups.emplace_back(group_distribution(sample, i));

  std::vector<detail::GroupArrays> ga(static_cast<std::size_t>(K));
  std::vector<double> p(static_cast<std::size_t>(K));
  for (int i = 0; i < K; ++i) {
    const auto& gd = groups[static_cast<std::size_t>(i)];
    auto& a = ga[static_cast<std::size_t>(i)];
    p[static_cast<std::size_t>(i)] = sample.p_hat(i + 1);
    a.n_i = gd.n();
    a.Q = gd.count_leq(Z);
    if (a.Q == 0 || a.Q == gd.n()) out.hd0_warning = true;
    if (a.Q == 0) continue;
    const InfluencePair gi = influence(m, gd, Z);
    a.v.assign(gd.values().begin(), gd.values().begin() + static_cast<std::ptrdiff_t>(a.Q));
    a.s.resize(a.Q);
    a.gdiff.resize(a.Q);
    a.cb.resize(a.Q);
    a.nuP.resize(a.Q);
    a.pref.resize(a.Q + 1);
    a.pref[0] = 0.0;
    const double pi_ = p[static_cast<std::size_t>(i)];
    for (std::size_t t = 0; t < a.Q; ++t) {
      const double y = a.v[t];
      a.s[t] = gd.cdf(y);
      a.gdiff[t] = gP.gbar(y) - gi.gbar(y);
      a.cb[t] = pi_ * gP.nubar(y) - gi.nubar(y);
      a.nuP[t] = gP.nubar(y);
      a.pref[t + 1] = a.pref[t] + a.gdiff[t];
    }
    a.sum_gdiff = a.pref[a.Q];
  }

  // Ghat_h evaluated at stratum i's poor points, for every ordered pair.
  std::vector<std::vector<std::vector<double>>> Gh_at(static_cast<std::size_t>(K));
  for (int h = 0; h < K; ++h) {
    Gh_at[static_cast<std::size_t>(h)].resize(static_cast<std::size_t>(K));
    for (int i = 0; i < K; ++i) {
      if (h == i) continue;
      const auto& vi = ga[static_cast<std::size_t>(i)].v;
      auto& dst = Gh_at[static_cast<std::size_t>(h)][static_cast<std::size_t>(i)];
      dst.resize(vi.size());
      for (std::size_t t = 0; t < vi.size(); ++t) dst[t] = groups[static_cast<std::size_t>(h)].cdf(vi[t]);
    }
  }

  KahanSum A1, A2, A31, A32, B1, B2, B3;
  for (int i = 0; i < K; ++i) {
    const auto& a = ga[static_cast<std::size_t>(i)];
    if (a.Q == 0) continue;
    const double pi_ = p[static_cast<std::size_t>(i)];
    const auto ni = static_cast<double>(a.n_i);

    {  // A1: variance-style moments of gdiff over the stratum
      long double m1 = 0.0L, m2 = 0.0L;
      for (double gdv : a.gdiff) {
        m1 += gdv;
        m2 += static_cast<long double>(gdv) * gdv;
      }
      m1 /= ni;
      m2 /= ni;
      A1.add(pi_ * static_cast<double>(m2 - m1 * m1));
    }
    {  // A2: (s^t - st) kernel against cb x cb
      const double mins = detail::pair_min_sym(a.s, a.cb);
      const double lin = static_cast<double>(detail::dot(a.s, a.cb));
      A2.add(pi_ * (mins - lin * lin) / (ni * ni));
    }
    {  // B1: bridge-covariance of gdiff prefix against cb
      long double acc = 0.0L;
      const double tot = a.sum_gdiff / ni;
      for (std::size_t t = 0; t < a.Q; ++t) {
        // prefix over v[b] <= v[t], tie-inclusive
        const auto ub = static_cast<std::size_t>(
            std::upper_bound(a.v.begin(), a.v.end(), a.v[t]) - a.v.begin());
        acc += (static_cast<long double>(a.pref[ub]) / ni - static_cast<long double>(a.s[t]) * tot) * a.cb[t];
      }
      B1.add(pi_ * static_cast<double>(acc) / ni);
    }
    for (int h = 0; h < K; ++h) {  // A31
      if (h == i) continue;
      const auto& u = Gh_at[static_cast<std::size_t>(h)][static_cast<std::size_t>(i)];
      const double mins = detail::pair_min_sym(u, a.nuP);
      const double lin = static_cast<double>(detail::dot(u, a.nuP));
      A31.add(pi_ * pi_ * p[static_cast<std::size_t>(h)] * (mins - lin * lin) / (ni * ni));
    }
    for (int j = 0; j < K; ++j) {
      if (j == i) continue;
      const auto& b = ga[static_cast<std::size_t>(j)];
      if (b.Q == 0) continue;
      const double pj = p[static_cast<std::size_t>(j)];
      const auto nj = static_cast<double>(b.n_i);
      const auto& Gi_at_j = Gh_at[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      for (int h = 0; h < K; ++h) {  // A32, h outside {i,j}
        if (h == i || h == j) continue;
        const auto& ui = Gh_at[static_cast<std::size_t>(h)][static_cast<std::size_t>(i)];
        const auto& uj = Gh_at[static_cast<std::size_t>(h)][static_cast<std::size_t>(j)];
        const double mins = detail::pair_min_cross(ui, a.nuP, uj, b.nuP);
        const double lin = static_cast<double>(detail::dot(ui, a.nuP)) * static_cast<double>(detail::dot(uj, b.nuP));
        A32.add(pi_ * pj * p[static_cast<std::size_t>(h)] * (mins - lin) / (ni * nj));
      }
      {  // B2: kernel s ^ Ghat_i(y_jb) against cb_i x nuP_j
        const double mins = detail::pair_min_cross(a.s, a.cb, Gi_at_j, b.nuP);
        const double lin = static_cast<double>(detail::dot(a.s, a.cb)) * static_cast<double>(detail::dot(Gi_at_j, b.nuP));
        B2.add(pi_ * pj * (mins - lin) / (ni * nj));
      }
      {  // B3: gdiff prefix of stratum i cut at Ghat_i(y_jb)
        long double acc = 0.0L;
        const double tot = a.sum_gdiff / ni;
        for (std::size_t t = 0; t < b.Q; ++t) {
          const auto cnt = static_cast<std::size_t>(
              std::upper_bound(a.v.begin(), a.v.end(), b.v[t]) - a.v.begin());
          acc += (static_cast<long double>(a.pref[cnt]) / ni - static_cast<long double>(Gi_at_j[t]) * tot) *
                 b.nuP[t];
        }
        B3.add(pi_ * pj * static_cast<double>(acc) / nj);
      }
    }
  }

  out.A1 = A1.value();
  out.A2 = A2.value();
  out.A31 = A31.value();
  out.A32 = A32.value();
  out.B1 = B1.value();
  out.B2 = B2.value();
  out.B3 = B3.value();

  double th1 = out.A1 + out.A2 + out.A31 + out.A32 + 2.0 * (out.B1 + out.B2 + out.B3);
  if (th1 < 0.0) {
    if (th1 < -1e-10) throw DataError("theta1^2 = " + std::to_string(th1) + " below clamp tolerance");
    th1 = 0.0;
    out.theta1_clamped = true;
  }
  out.theta1_sq = th1;

  // F_h = E g(Y^h) - J_{n_h} + H_h ; M_h keeps the index term.
  out.F.resize(static_cast<std::size_t>(K));
  out.M.resize(static_cast<std::size_t>(K));
  out.H.resize(static_cast<std::size_t>(K));
  const std::size_t Qpool = pooled.count_leq(Z);
  std::vector<double> nu_pool(Qpool);
  for (std::size_t t = 0; t < Qpool; ++t) nu_pool[t] = gP.nubar(pooled.values()[t]);
  for (int h = 0; h < K; ++h) {
    KahanSum Hh;
    for (std::size_t t = 0; t < Qpool; ++t)
      Hh.add(groups[static_cast<std::size_t>(h)].cdf(pooled.values()[t]) * nu_pool[t]);
    const double H_h = Hh.value() / n;
    const auto& a = ga[static_cast<std::size_t>(h)];
    long double Eg = 0.0L;
    for (double y : a.v) Eg += gP.gbar(y);
    const double Egh = a.Q ? static_cast<double>(Eg) / static_cast<double>(a.n_i) : 0.0;
    const double Jnh = closed_form_index(groups[static_cast<std::size_t>(h)], Z, m).value;
    out.H[static_cast<std::size_t>(h)] = H_h;
    out.F[static_cast<std::size_t>(h)] = Egh - Jnh + H_h;
    out.M[static_cast<std::size_t>(h)] = Egh + H_h;
  }
  auto discrete_var = [&](const std::vector<double>& f) {
    long double mean = 0.0L;
    for (int h = 0; h < K; ++h) mean += static_cast<long double>(p[static_cast<std::size_t>(h)]) * f[static_cast<std::size_t>(h)];
    long double v = 0.0L;
    for (int h = 0; h < K; ++h) {
      const long double d = f[static_cast<std::size_t>(h)] - mean;
      v += static_cast<long double>(p[static_cast<std::size_t>(h)]) * d * d;
    }
    return static_cast<double>(v);
  };
  out.theta2_sq = discrete_var(out.F);
  out.theta3_sq = discrete_var(out.M);
  return out;
}

// Full report: gap, variance components, and the two intervals (theta1+theta2
// for the exact gap, theta1+theta3 for the gd_0 centering).
inline GapReport decompose(const GroupedSample& sample, double Z, const MeasureSpec& m, double level = 0.95) {
  GapReport rep;
  rep.id = m.id;
  rep.parameter = m.parameter;
  rep.Z = Z;
  rep.n = sample.n();
  rep.level = level;
  GapValue gv = gap(sample, Z, m);
  rep.global_index = gv.global_index;
  rep.group_indices = std::move(gv.group_indices);
  rep.gd_n = gv.gd_n;
  rep.components = variance_components(sample, Z, m);
  rep.ci_gd = confidence_interval(rep.gd_n, rep.components.theta1_sq + rep.components.theta2_sq, sample.n(), level);
  rep.ci_gd0 = confidence_interval(rep.gd_n, rep.components.theta1_sq + rep.components.theta3_sq, sample.n(), level);
  return rep;
}

}  // namespace gpid
