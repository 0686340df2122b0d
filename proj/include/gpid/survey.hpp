#pragma once

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "gpid/core.hpp"
#include "gpid/empirical.hpp"

namespace gpid {

struct HouseholdRecord {
  double income = 0.0;       // currency units, >= 0
  double equiv_adults = 1.0; // adult-equivalents, > 0
  int group_label = 1;       // stratum id
};

// A survey sample after per-capita scaling, partitioned into K nonempty
// strata.  Stratum ids are contiguous 1..K (relabeled in order of first
// appearance in the input); the original labels are kept for reporting.
class GroupedSample {
 public:
  GroupedSample(std::vector<double> per_capita, std::vector<int> group_of, std::vector<int> original_labels)
      : incomes_(std::move(per_capita)), group_of_(std::move(group_of)), labels_(std::move(original_labels)) {
    if (incomes_.empty()) throw DataError("GroupedSample: empty sample");
    if (incomes_.size() != group_of_.size()) throw DataError("GroupedSample: income/group arrays misaligned");
    K_ = static_cast<int>(labels_.size());
    counts_.assign(static_cast<std::size_t>(K_), 0);
    for (std::size_t r = 0; r < group_of_.size(); ++r) {
      int g = group_of_[r];
      if (g < 1 || g > K_) throw DataError("GroupedSample: stratum id out of range at record " + std::to_string(r + 1));
      ++counts_[static_cast<std::size_t>(g - 1)];
    }
    for (int i = 0; i < K_; ++i)
      if (counts_[static_cast<std::size_t>(i)] == 0)
        throw DataError("GroupedSample: empty stratum " + std::to_string(labels_[static_cast<std::size_t>(i)]));
  }

  // Relabels arbitrary integer labels to contiguous 1..K by first appearance.
  static GroupedSample from_records(const std::vector<HouseholdRecord>& records) {
    std::vector<double> vals;
    std::vector<int> grp;
    std::vector<int> labels;
    std::map<int, int> remap;
    vals.reserve(records.size());
    grp.reserve(records.size());
    for (std::size_t r = 0; r < records.size(); ++r) {
      const auto& rec = records[r];
      if (!(rec.income >= 0.0))
        throw DataError("record " + std::to_string(r + 1) + ": negative or non-finite income");
      if (!(rec.equiv_adults > 0.0))
        throw DataError("record " + std::to_string(r + 1) + ": nonpositive equiv_adults");
      auto it = remap.find(rec.group_label);
      if (it == remap.end()) {
        it = remap.emplace(rec.group_label, static_cast<int>(labels.size()) + 1).first;
        labels.push_back(rec.group_label);
      }
      vals.push_back(rec.income / rec.equiv_adults);
      grp.push_back(it->second);
    }
    return GroupedSample(std::move(vals), std::move(grp), std::move(labels));
  }

  std::size_t n() const { return incomes_.size(); }
  int K() const { return K_; }
  const std::vector<double>& per_capita_incomes() const { return incomes_; }
  const std::vector<int>& group_of() const { return group_of_; }
  std::size_t n_i(int i) const { return counts_.at(static_cast<std::size_t>(i - 1)); }          // i in 1..K
  double p_hat(int i) const { return static_cast<double>(n_i(i)) / static_cast<double>(n()); }
  int label(int i) const { return labels_.at(static_cast<std::size_t>(i - 1)); }

  std::vector<double> group_values(int i) const {
    std::vector<double> out;
    out.reserve(n_i(i));
    for (std::size_t r = 0; r < incomes_.size(); ++r)
      if (group_of_[r] == i) out.push_back(incomes_[r]);
    return out;
  }

 private:
  std::vector<double> incomes_;
  std::vector<int> group_of_;
  std::vector<int> labels_;
  std::vector<std::size_t> counts_;
  int K_ = 0;
};

inline EmpiricalDist pooled_distribution(const GroupedSample& s) { return EmpiricalDist(s.per_capita_incomes()); }
inline EmpiricalDist group_distribution(const GroupedSample& s, int i) { return EmpiricalDist(s.group_values(i)); }

enum class SurveyFormat { csv, legacy_triple };

namespace detail {

inline std::string trim(std::string s) {
  const char* ws = " \t\r\n";
  auto b = s.find_first_not_of(ws);
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

inline double parse_double(const std::string& tok, std::size_t row, const char* what) {
  const std::string t = trim(tok);
  double v = 0.0;
  auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || p != t.data() + t.size())
    throw DataError("row " + std::to_string(row) + ": cannot parse " + std::string(what) + " '" + t + "'");
  return v;
}

inline int parse_label(const std::string& tok, std::size_t row) {
  const std::string t = trim(tok);
  int v = 0;
  auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || p != t.data() + t.size())
    throw DataError("row " + std::to_string(row) + ": cannot parse group label '" + t + "'");
  return v;
}

// Shortest exact decimal form; round-trips IEEE doubles bit-for-bit.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  double back = 0.0;
  auto [p, ec] = std::from_chars(buf, buf + std::string(buf).size(), back);
  (void)p;
  if (ec == std::errc() && back == v) {
    for (int prec = 1; prec < 17; ++prec) {
      char s[40];
      std::snprintf(s, sizeof s, "%.*g", prec, v);
      double b2 = 0.0;
      std::from_chars(s, s + std::string(s).size(), b2);
      if (b2 == v) return s;
    }
  }
  return buf;
}

}  // namespace detail

// CSV with header income,eq_adults,group; one record per line, '.' decimals.
inline GroupedSample load_survey_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("csv: empty input");
  {
    std::string h = detail::trim(line);
    h.erase(std::remove_if(h.begin(), h.end(), [](char c) { return c == ' ' || c == '\t'; }), h.end());
    if (h != "income,eq_adults,group")
      throw DataError("csv: expected header 'income,eq_adults,group', got '" + detail::trim(line) + "'");
  }
  std::vector<HouseholdRecord> recs;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    std::string t = detail::trim(line);
    if (t.empty()) continue;
    std::stringstream ss(t);
    std::string f1, f2, f3, extra;
    if (!std::getline(ss, f1, ',') || !std::getline(ss, f2, ',') || !std::getline(ss, f3, ','))
      throw DataError("row " + std::to_string(row) + ": expected 3 comma-separated fields");
    if (std::getline(ss, extra, ','))
      throw DataError("row " + std::to_string(row) + ": too many fields");
    HouseholdRecord r;
    r.income = detail::parse_double(f1, row, "income");
    r.equiv_adults = detail::parse_double(f2, row, "eq_adults");
    r.group_label = detail::parse_label(f3, row);
    if (!(r.income >= 0.0)) throw DataError("row " + std::to_string(row) + ": negative or non-finite income");
    if (!(r.equiv_adults > 0.0)) throw DataError("row " + std::to_string(row) + ": nonpositive eq_adults");
    recs.push_back(r);
  }
  if (recs.empty()) throw DataError("csv: no data rows");
  return GroupedSample::from_records(recs);
}

// The appendix's triple: whitespace-separated incomes, equivalent-adult
// factors, and integer labels, all of equal length.  Labels are capped at 15
// distinct values in this mode.
inline GroupedSample load_survey_legacy(std::istream& dep, std::istream& eq, std::istream& labels) {
  std::vector<double> incs, eqs;
  std::vector<int> labs;
  double v;
  while (dep >> v) incs.push_back(v);
  while (eq >> v) eqs.push_back(v);
  int l;
  while (labels >> l) labs.push_back(l);
  if (incs.empty()) throw DataError("legacy: empty income file");
  if (incs.size() != eqs.size() || incs.size() != labs.size())
    throw DataError("legacy: file lengths differ (income " + std::to_string(incs.size()) + ", eq " +
                    std::to_string(eqs.size()) + ", labels " + std::to_string(labs.size()) + ")");
  std::vector<HouseholdRecord> recs(incs.size());
  for (std::size_t r = 0; r < incs.size(); ++r) {
    if (labs[r] < 1 || labs[r] > 15)
      throw DataError("legacy: label " + std::to_string(labs[r]) + " at row " + std::to_string(r + 1) +
                      " outside 1..15");
    recs[r] = {incs[r], eqs[r], labs[r]};
  }
  return GroupedSample::from_records(recs);
}

inline GroupedSample load_survey(const std::string& path, SurveyFormat format) {
  if (format == SurveyFormat::csv) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open file " + path);
    return load_survey_csv(in);
  }
  throw UsageError("legacy format requires three paths; use load_survey(dep, eq, labels)");
}

inline GroupedSample load_survey(const std::string& dep_path, const std::string& eq_path,
                                 const std::string& labels_path) {
  std::ifstream d(dep_path), e(eq_path), l(labels_path);
  if (!d) throw DataError("cannot open file " + dep_path);
  if (!e) throw DataError("cannot open file " + eq_path);
  if (!l) throw DataError("cannot open file " + labels_path);
  return load_survey_legacy(d, e, l);
}

// Serialization writes the already-scaled per-capita incomes with unit
// equivalence factors, so load(save(x)) reproduces per_capita bit-for-bit.
inline void save_survey_csv(const GroupedSample& s, std::ostream& out) {
  out << "income,eq_adults,group\n";
  for (std::size_t r = 0; r < s.n(); ++r)
    out << detail::format_double(s.per_capita_incomes()[r]) << ",1," << s.label(s.group_of()[r]) << "\n";
}

inline void save_survey_legacy(const GroupedSample& s, std::ostream& dep, std::ostream& eq, std::ostream& labels) {
  for (std::size_t r = 0; r < s.n(); ++r) {
    dep << detail::format_double(s.per_capita_incomes()[r]) << "\n";
    eq << "1\n";
    labels << s.label(s.group_of()[r]) << "\n";
  }
}

}  // namespace gpid
