#pragma once

#include <json.hpp>

#include "gpid/decomposition.hpp"
#include "gpid/montecarlo.hpp"

namespace gpid {

inline nlohmann::json to_json(const VarianceComponents& c) {
  return {{"A1", c.A1},
          {"A2", c.A2},
          {"A31", c.A31},
          {"A32", c.A32},
          {"B1", c.B1},
          {"B2", c.B2},
          {"B3", c.B3},
          {"F", c.F},
          {"M", c.M},
          {"H", c.H},
          {"theta1_sq", c.theta1_sq},
          {"theta2_sq", c.theta2_sq},
          {"theta3_sq", c.theta3_sq},
          {"theta1_clamped", c.theta1_clamped},
          {"hd0_warning", c.hd0_warning}};
}

inline nlohmann::json to_json(const GapReport& r) {
  nlohmann::json groups = nlohmann::json::array();
  for (const auto& g : r.group_indices)
    groups.push_back({{"label", g.label}, {"n_i", g.n_i}, {"index", g.index}});
  nlohmann::json j{{"measure", {{"id", measure_name(r.id)}, {"parameter", r.parameter}}},
                   {"Z", r.Z},
                   {"n", r.n},
                   {"level", r.level},
                   {"global_index", r.global_index},
                   {"group_indices", groups},
                   {"gd_n", r.gd_n},
                   {"components", to_json(r.components)},
                   {"ci_gd", {{"lo", r.ci_gd.lo}, {"hi", r.ci_gd.hi}}},
                   {"ci_gd0", {{"lo", r.ci_gd0.lo}, {"hi", r.ci_gd0.hi}}}};
  return j;
}

inline nlohmann::json to_json(const SimResult& s) {
  return {{"reps", s.reps},
          {"skipped", s.skipped},
          {"true_gd", s.true_gd},
          {"mean_gd_n", s.mean_gd_n},
          {"gd_samples", s.gd_samples},
          {"mean_plugin_theta_sq", s.mean_plugin_theta_sq},
          {"empirical_var", s.empirical_var},
          {"coverage", s.coverage},
          {"ks_stat", s.ks_stat},
          {"ks_p", s.ks_p},
          {"ks_stat_centered", s.ks_stat_centered},
          {"ks_p_centered", s.ks_p_centered}};
}

}  // namespace gpid
