#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "dsim/core/errors.hpp"
#include "dsim/scenario/format.hpp"
#include "dsim/selection.hpp"

namespace dsim {

// Metrics of one region at the end of one step.
struct RegionStep {
  int mutations = 0;       // technologies financed this step
  int candidates = 0;      // ready technologies that stood for finance
  int top_count = 0;       // highest preference index in the tally (0: no round)
  int entrants = 0;        // candidates (mutations or diffused) that survived selection
  double productivity = 0.0;     // share-weighted
  double avg_profit_rate = 0.0;
  double population = 0.0;

  friend bool operator==(const RegionStep&, const RegionStep&) = default;
};

struct StepRecord {
  Step step = 0;  // 1-based: state after `step` periods
  std::vector<RegionStep> regions;

  friend bool operator==(const StepRecord&, const StepRecord&) = default;
};

struct RegionSummary {
  double pace = 0.0;
  long long total_mutations = 0;
  double final_population = 0.0;

  friend bool operator==(const RegionSummary&, const RegionSummary&) = default;
};

struct RunSummary {
  std::vector<RegionSummary> regions;
  double system_pace = 0.0;  // unweighted mean of regional paces
  long long total_mutations = 0;

  friend bool operator==(const RunSummary&, const RunSummary&) = default;
};

struct RunReport {
  std::string name;
  std::uint64_t seed = 0;
  Step horizon = 0;
  std::optional<std::uint64_t> replication;  // set for run_many members
  std::vector<std::string> region_names;
  std::vector<double> initial_productivity;
  std::vector<double> initial_population;
  std::vector<StepRecord> steps;
  RunSummary summary;

  std::vector<double> productivity_trace(std::size_t region) const {
    std::vector<double> trace;
    trace.reserve(steps.size() + 1);
    trace.push_back(initial_productivity.at(region));
    for (const auto& s : steps) trace.push_back(s.regions.at(region).productivity);
    return trace;
  }

  friend bool operator==(const RunReport&, const RunReport&) = default;
};

// Recomputes the summary from the initial state and the step records.
inline RunSummary summarize(const RunReport& report) {
  RunSummary s;
  const std::size_t n = report.region_names.size();
  s.regions.resize(n);
  double pace_sum = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    const auto trace = report.productivity_trace(r);
    s.regions[r].pace = pace_of_evolution(trace);
    long long muts = 0;
    for (const auto& step : report.steps) muts += step.regions[r].mutations;
    s.regions[r].total_mutations = muts;
    s.regions[r].final_population =
        report.steps.empty() ? report.initial_population[r] : report.steps.back().regions[r].population;
    pace_sum += s.regions[r].pace;
    s.total_mutations += muts;
  }
  s.system_pace = n ? pace_sum / static_cast<double>(n) : 0.0;
  return s;
}

inline void verify_report(const RunReport& report) {
  if (static_cast<Step>(report.steps.size()) != report.horizon) {
    throw Error("report has " + std::to_string(report.steps.size()) + " step records for horizon " +
                std::to_string(report.horizon));
  }
  if (summarize(report) != report.summary) throw Error("report summary does not match its step records");
}

// CSV with one row per (step, region). Shortest round-trip decimals, '\n'.
inline std::string to_csv(const RunReport& report) {
  using scn::format_real;
  std::string out = "step,region,mutations,productivity,avg_profit_rate,population\n";
  for (const auto& s : report.steps) {
    for (std::size_t r = 0; r < s.regions.size(); ++r) {
      const auto& m = s.regions[r];
      out += std::to_string(s.step) + "," + report.region_names[r] + "," + std::to_string(m.mutations) + "," +
             format_real(m.productivity) + "," + format_real(m.avg_profit_rate) + "," + format_real(m.population) + "\n";
    }
  }
  return out;
}

// Field-per-line report document in the scenario key-value syntax. The
// summary is checked against the step records before anything is written.
inline std::string to_report_document(const RunReport& report) {
  using scn::format_real;
  using scn::quote;
  verify_report(report);
  std::ostringstream os;
  os << "# run report\n";
  os << "report.name = " << quote(report.name) << "\n";
  os << "report.seed = " << report.seed << "\n";
  os << "report.horizon = " << report.horizon << "\n";
  if (report.replication) os << "report.replication = " << *report.replication << "\n";
  for (std::size_t r = 0; r < report.region_names.size(); ++r) {
    const std::string p = "region." + std::to_string(r) + ".";
    os << p << "name = " << quote(report.region_names[r]) << "\n";
    os << p << "initial_productivity = " << format_real(report.initial_productivity[r]) << "\n";
    os << p << "initial_population = " << format_real(report.initial_population[r]) << "\n";
  }
  for (const auto& s : report.steps) {
    for (std::size_t r = 0; r < s.regions.size(); ++r) {
      const auto& m = s.regions[r];
      const std::string p = "step." + std::to_string(s.step) + ".region." + std::to_string(r) + ".";
      os << p << "mutations = " << m.mutations << "\n";
      os << p << "candidates = " << m.candidates << "\n";
      os << p << "top_count = " << m.top_count << "\n";
      os << p << "entrants = " << m.entrants << "\n";
      os << p << "productivity = " << format_real(m.productivity) << "\n";
      os << p << "avg_profit_rate = " << format_real(m.avg_profit_rate) << "\n";
      os << p << "population = " << format_real(m.population) << "\n";
    }
  }
  for (std::size_t r = 0; r < report.summary.regions.size(); ++r) {
    const auto& m = report.summary.regions[r];
    const std::string p = "summary.region." + std::to_string(r) + ".";
    os << p << "pace = " << format_real(m.pace) << "\n";
    os << p << "total_mutations = " << m.total_mutations << "\n";
    os << p << "final_population = " << format_real(m.final_population) << "\n";
  }
  os << "summary.system_pace = " << format_real(report.summary.system_pace) << "\n";
  os << "summary.total_mutations = " << report.summary.total_mutations << "\n";
  return os.str();
}

namespace detail {

struct ReportReader {
  const scn::Document& doc;
  std::size_t pos = 0;

  const scn::Value& expect(const std::string& path) {
    if (pos >= doc.size() || doc[pos].path != path) {
      throw Error("report document: expected '" + path + "'" +
                  (pos < doc.size() ? " at line " + std::to_string(doc[pos].line) : std::string(" at end")));
    }
    return doc[pos++].value;
  }
  bool next_is(const std::string& path) const { return pos < doc.size() && doc[pos].path == path; }

  double real(const std::string& path) {
    double x = 0.0;
    const auto& v = expect(path);
    if (!scn::parse_real(v.text, x)) throw Error("report document: bad number at '" + path + "'");
    return x;
  }
  template <typename Int>
  Int integer(const std::string& path) {
    Int x{};
    const auto& v = expect(path);
    if (v.kind != scn::ValueKind::integer || !scn::parse_integer(v.text, x)) {
      throw Error("report document: bad integer at '" + path + "'");
    }
    return x;
  }
  std::string str(const std::string& path) { return expect(path).text; }
};

}  // namespace detail

// Reads a document written by to_report_document and re-verifies it.
inline RunReport parse_report_document(std::string_view text) {
  const scn::Document doc = scn::parse_document(text);
  detail::ReportReader in{doc};
  RunReport rep;
  rep.name = in.str("report.name");
  rep.seed = in.integer<std::uint64_t>("report.seed");
  rep.horizon = in.integer<Step>("report.horizon");
  if (in.next_is("report.replication")) rep.replication = in.integer<std::uint64_t>("report.replication");
  for (std::size_t r = 0; in.next_is("region." + std::to_string(r) + ".name"); ++r) {
    const std::string p = "region." + std::to_string(r) + ".";
    rep.region_names.push_back(in.str(p + "name"));
    rep.initial_productivity.push_back(in.real(p + "initial_productivity"));
    rep.initial_population.push_back(in.real(p + "initial_population"));
  }
  for (Step t = 1; t <= rep.horizon; ++t) {
    StepRecord s;
    s.step = t;
    for (std::size_t r = 0; r < rep.region_names.size(); ++r) {
      const std::string p = "step." + std::to_string(t) + ".region." + std::to_string(r) + ".";
      RegionStep m;
      m.mutations = in.integer<int>(p + "mutations");
      m.candidates = in.integer<int>(p + "candidates");
      m.top_count = in.integer<int>(p + "top_count");
      m.entrants = in.integer<int>(p + "entrants");
      m.productivity = in.real(p + "productivity");
      m.avg_profit_rate = in.real(p + "avg_profit_rate");
      m.population = in.real(p + "population");
      s.regions.push_back(m);
    }
    rep.steps.push_back(std::move(s));
  }
  rep.summary.regions.resize(rep.region_names.size());
  for (std::size_t r = 0; r < rep.region_names.size(); ++r) {
    const std::string p = "summary.region." + std::to_string(r) + ".";
    rep.summary.regions[r].pace = in.real(p + "pace");
    rep.summary.regions[r].total_mutations = in.integer<long long>(p + "total_mutations");
    rep.summary.regions[r].final_population = in.real(p + "final_population");
  }
  rep.summary.system_pace = in.real("summary.system_pace");
  rep.summary.total_mutations = in.integer<long long>("summary.total_mutations");
  if (in.pos != doc.size()) throw Error("report document: trailing entries");
  verify_report(rep);
  return rep;
}

}  // namespace dsim
