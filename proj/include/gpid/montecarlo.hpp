#pragma once

#include <algorithm>
#include <cmath>
#include <istream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "gpid/core.hpp"
#include "gpid/decomposition.hpp"
#include "gpid/distributions.hpp"
#include "gpid/measures.hpp"
#include "gpid/rng.hpp"
#include "gpid/survey.hpp"

namespace gpid {

// sup-distance between the empirical CDF of `values` and a reference CDF.
template <class Cdf>
double ks_statistic(std::vector<double> values, Cdf&& reference) {
  if (values.empty()) throw std::domain_error("ks_statistic: empty sample");
  std::sort(values.begin(), values.end());
  const auto m = static_cast<double>(values.size());
  double D = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double F = reference(values[i]);
    D = std::max(D, std::abs(static_cast<double>(i + 1) / m - F));
    D = std::max(D, std::abs(static_cast<double>(i) / m - F));
  }
  return D;
}

inline double ks_statistic_normal(const std::vector<double>& values) {
  return ks_statistic(values, [](double x) { return normal_cdf(x); });
}

// Asymptotic KS p-value with Stephens' small-sample correction.
inline double ks_pvalue(double D, std::size_t m) {
  const double sm = std::sqrt(static_cast<double>(m));
  return kolmogorov_sf((sm + 0.12 + 0.11 / sm) * D);
}

struct SimResult {
  std::size_t reps = 0;             // replications kept
  std::size_t skipped = 0;          // draws with an empty stratum (small n only)
  std::vector<double> gd_samples;   // sqrt(n)(gd_n - gd) per replication
  double true_gd = 0.0;
  double mean_plugin_theta_sq = 0.0;
  double empirical_var = 0.0;
  double coverage = 0.0;
  double ks_stat = 0.0;             // studentized gaps vs standard normal
  double ks_p = 0.0;
  double ks_stat_centered = 0.0;    // diagnostic: same after mean-centering
  double ks_p_centered = 0.0;
  double mean_gd_n = 0.0;
};

// One multinomial trial per observation: draw a stratum from p, then an
// income from that stratum's distribution.  Bit-reproducible given the seed.
inline GroupedSample draw_grouped_sample(const Mixture& mix, std::size_t n, std::uint64_t seed) {
  if (n < 1) throw std::domain_error("draw_grouped_sample: n must be >= 1");
  Rng rng(seed);
  const int K = mix.K();
  std::vector<double> values(n);
  std::vector<int> labels(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double u = rng.uniform01();
    int lab = K;
    double acc = 0.0;
    for (int i = 0; i < K; ++i) {
      acc += mix.p()[static_cast<std::size_t>(i)];
      if (u <= acc) {
        lab = i + 1;
        break;
      }
    }
    values[j] = dist_quantile(mix.components()[static_cast<std::size_t>(lab - 1)], rng.uniform01());
    labels[j] = lab;
  }
  // Compact away strata that drew no observations (possible at small n);
  // original component ids are kept as the reported labels.
  std::vector<std::size_t> counts(static_cast<std::size_t>(K), 0);
  for (int lab : labels) ++counts[static_cast<std::size_t>(lab - 1)];
  std::vector<int> remap(static_cast<std::size_t>(K), 0);
  std::vector<int> group_labels;
  for (int i = 0; i < K; ++i)
    if (counts[static_cast<std::size_t>(i)] > 0) {
      group_labels.push_back(i + 1);
      remap[static_cast<std::size_t>(i)] = static_cast<int>(group_labels.size());
    }
  for (int& lab : labels) lab = remap[static_cast<std::size_t>(lab - 1)];
  return GroupedSample(std::move(values), std::move(labels), std::move(group_labels));
}

struct TrueGap {
  double gd = 0.0;
  double J_global = 0.0;
  std::vector<double> J_groups;
};

// Population gap by quadrature of the measure's exact-index integral against
// the component quantiles and the mixture quantile.
inline TrueGap true_gap(const Mixture& mix, double Z, const MeasureSpec& m) {
  TrueGap out;
  for (int i = 0; i < mix.K(); ++i) {
    const auto& comp = mix.components()[static_cast<std::size_t>(i)];
    const double qi = dist_cdf(comp, Z);
    if (!(qi > 0.0 && qi < 1.0))
      throw DataError("HD0 violation: component " + std::to_string(i + 1) + " has G(Z) = " + std::to_string(qi));
    struct View {  // adapt a variant component to the quantile-distribution concept
      const ParamDist* d;
      double cdf(double x) const { return dist_cdf(*d, x); }
      double quantile(double u) const { return dist_quantile(*d, u); }
    } view{&comp};
    out.J_groups.push_back(exact_index(m, view, Z).value);
  }
  out.J_global = exact_index(m, mix, Z).value;
  KahanSum s;
  for (int i = 0; i < mix.K(); ++i)
    s.add(mix.p()[static_cast<std::size_t>(i)] * out.J_groups[static_cast<std::size_t>(i)]);
  out.gd = out.J_global - s.value();
  return out;
}

struct ExperimentConfig {
  Mixture mix{{1.0}, {ParamDist(Lognormal(0.0, 1.0))}};
  double Z = 1.0;
  MeasureSpec measure = measure_spec(MeasureId::sen);
  std::size_t n = 1000;
  std::size_t reps = 100;
  double level = 0.95;
  std::uint64_t seed = 0;
};

// Replications are independent (substream per index) and may run on several
// threads; per-replication outputs land in slots indexed by replication, and
// the reduction walks them in a fixed order, so results are byte-identical
// for any thread count.
inline SimResult run_experiment(const ExperimentConfig& cfg, unsigned threads = 1) {
  if (cfg.reps < 1) throw std::domain_error("run_experiment: reps must be >= 1");
  const TrueGap tg = true_gap(cfg.mix, cfg.Z, cfg.measure);
  const double z = normal_quantile(0.5 * (1.0 + cfg.level));
  const auto n = static_cast<double>(cfg.n);

  struct RepOut {
    double gd_n = 0.0;
    double theta_sq = 0.0;
    bool skipped = false;
  };
  std::vector<RepOut> slots(cfg.reps);

  auto worker = [&](std::size_t first, std::size_t step) {
    for (std::size_t r = first; r < cfg.reps; r += step) {
      GroupedSample sample = draw_grouped_sample(cfg.mix, cfg.n, substream_seed(cfg.seed, r));
      if (sample.K() != cfg.mix.K()) {  // a stratum drew no observations
        slots[r].skipped = true;
        continue;
      }
      const GapValue gv = gap(sample, cfg.Z, cfg.measure);
      const VarianceComponents vc = variance_components(sample, cfg.Z, cfg.measure);
      slots[r] = {gv.gd_n, vc.theta1_sq + vc.theta2_sq, false};
    }
  };
  const unsigned nt = std::max(1u, std::min<unsigned>(threads, std::thread::hardware_concurrency()));
  if (nt <= 1) {
    worker(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < nt; ++t) pool.emplace_back(worker, t, nt);
    for (auto& th : pool) th.join();
  }

  SimResult res;
  res.true_gd = tg.gd;
  KahanSum mean_plug, mean_gd, mean_norm;
  std::size_t cover = 0;
  std::vector<double> stud;
  for (std::size_t r = 0; r < cfg.reps; ++r) {
    if (slots[r].skipped) {
      ++res.skipped;
      continue;
    }
    const double gd_n = slots[r].gd_n, th = slots[r].theta_sq;
    const double half = z * std::sqrt(th / n);
    if (gd_n - half <= tg.gd && tg.gd <= gd_n + half) ++cover;
    const double gnorm = std::sqrt(n) * (gd_n - tg.gd);
    res.gd_samples.push_back(gnorm);
    stud.push_back(th > 0.0 ? gnorm / std::sqrt(th) : 0.0);
    mean_plug.add(th);
    mean_gd.add(gd_n);
    mean_norm.add(gnorm);
  }
  res.reps = res.gd_samples.size();
  if (res.reps == 0) throw DataError("run_experiment: every replication had an empty stratum");
  const auto m = static_cast<double>(res.reps);
  res.coverage = static_cast<double>(cover) / m;
  res.mean_plugin_theta_sq = mean_plug.value() / m;
  res.mean_gd_n = mean_gd.value() / m;
  const double gbar = mean_norm.value() / m;
  KahanSum ss;
  for (double g : res.gd_samples) ss.add((g - gbar) * (g - gbar));
  res.empirical_var = res.reps > 1 ? ss.value() / (m - 1.0) : 0.0;
  res.ks_stat = ks_statistic_normal(stud);
  res.ks_p = ks_pvalue(res.ks_stat, res.reps);
  KahanSum sm;
  for (double x : stud) sm.add(x);
  const double smean = sm.value() / m;
  std::vector<double> centered(stud);
  for (double& x : centered) x -= smean;
  res.ks_stat_centered = ks_statistic_normal(centered);
  res.ks_p_centered = ks_pvalue(res.ks_stat_centered, res.reps);
  return res;
}

// Key-value experiment file.  Keys: K, p, components, Z (number or
// quantile:t), measure, n, reps, level, seed.  '#' starts a comment.
inline ExperimentConfig parse_experiment_config(std::istream& in) {
  std::string line;
  int K = 0;
  std::vector<double> p;
  std::vector<ParamDist> comps;
  std::string zspec = "1";
  std::string measure = "sen";
  std::size_t n = 1000, reps = 100;
  double level = 0.95;
  std::uint64_t seed = 0;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw DataError("config line " + std::to_string(lineno) + ": expected key = value");
    std::string key = detail::trim(line.substr(0, eq));
    std::string val = detail::trim(line.substr(eq + 1));
    try {
      if (key == "K") K = std::stoi(val);
      else if (key == "p") {
        std::stringstream ss(val);
        double x;
        while (ss >> x) p.push_back(x);
      } else if (key == "components") {
        std::stringstream ss(val);
        std::string tok;
        while (ss >> tok) comps.push_back(parse_dist(tok));
      } else if (key == "Z") zspec = val;
      else if (key == "measure") measure = val;
      else if (key == "n") n = static_cast<std::size_t>(std::stoull(val));
      else if (key == "reps") reps = static_cast<std::size_t>(std::stoull(val));
      else if (key == "level") level = std::stod(val);
      else if (key == "seed") seed = std::stoull(val);
      else throw DataError("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    } catch (const DataError&) {
      throw;
    } catch (const UsageError&) {
      throw;
    } catch (const std::exception&) {
      throw DataError("config line " + std::to_string(lineno) + ": cannot parse value '" + val + "'");
    }
  }
  if (K <= 0) throw DataError("config: missing K");
  if (static_cast<int>(p.size()) != K) throw DataError("config: p must list K probabilities");
  if (static_cast<int>(comps.size()) != K) throw DataError("config: components must list K distributions");
  ExperimentConfig cfg{Mixture(p, comps), 1.0, parse_measure(measure), n, reps, level, seed};
  if (zspec.rfind("quantile:", 0) == 0) {
    const double t = std::stod(zspec.substr(9));
    if (!(t > 0.0 && t < 1.0)) throw DataError("config: quantile level must be in (0,1)");
    cfg.Z = cfg.mix.quantile(t);
  } else {
    cfg.Z = std::stod(zspec);
  }
  if (!(cfg.Z > 0.0)) throw DataError("config: Z must be positive");
  return cfg;
}

}  // namespace gpid
