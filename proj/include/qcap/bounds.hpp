#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "qcap/models.hpp"

namespace qcap::bounds {

enum class BoundId { QGamma, QTheta, KappaNS, KappaPPTp, KappaNSPPTp, Upsilon, OneShotZeroErrorPPTp };

/// Identifiers as used in reports and on the command line: qGamma, qTheta,
/// kappaNS, kappaPPTp, kappaNSPPTp, upsilon, oneShotZeroErrorPPTp.
const char* to_string(BoundId id);
BoundId parse_bound_id(const std::string& s);
/// Comma-separated list; duplicates are dropped, order kept.
std::vector<BoundId> parse_bound_list(const std::string& s);
const std::vector<BoundId>& all_bound_ids();

struct SolverStat {
  int iterations = 0;  // IPM iterations; for κ bounds, the number of bisection solves
  double gap = 0.0;    // relative duality gap; for κ bounds, the final bracket width
};

struct Check {
  std::string name;
  bool passed = true;
  double margin = 0.0;  // slack of the inequality, negative when violated
};

struct BoundReport {
  std::string channel_name;
  int dim_in = 0;
  int dim_out = 0;
  std::vector<BoundId> requested;
  std::map<BoundId, double> values;
  std::map<BoundId, double> wall_times;  // seconds
  std::map<BoundId, SolverStat> solver_stats;
  std::map<BoundId, std::string> errors;  // bounds whose computation failed
  std::vector<Check> checks;

  bool has(BoundId id) const { return values.count(id) != 0; }
};

/// Computes each requested bound independently. A failing bound is recorded in
/// `errors` and does not stop the others. Cross-checks between available
/// values are attached as `checks`.
BoundReport report(const QuantumChannel& ch, const std::vector<BoundId>& requested,
                   const KappaSettings& settings = {});

/// Wall times vary between runs; leave them out for reproducible output.
std::string to_json(const BoundReport& r, bool include_wall_times = true);

enum class Family { NR };
Family parse_family(const std::string& s);

struct SweepRow {
  double parameter = 0.0;
  std::map<BoundId, double> values;
};

/// `steps` equally spaced points from `from` to `to` inclusive.
std::vector<double> linear_grid(double from, double to, int steps);

/// One row per grid point, sorted by parameter. Throws std::invalid_argument
/// for points outside the family's range ([0, 0.5] for nr) and SolverError if
/// a bound cannot be computed.
std::vector<SweepRow> sweep(Family family, std::vector<double> grid, const std::vector<BoundId>& requested,
                            const KappaSettings& settings = {});

/// Header `param,<id>,...`, 12 significant digits, '\n' line endings.
void write_csv(std::ostream& os, const std::vector<SweepRow>& rows, const std::vector<BoundId>& ids);
std::vector<SweepRow> read_csv(std::istream& is, std::vector<BoundId>* ids = nullptr);

enum class Suite { Duality, Additivity, Prop1, Theorem1, Theorem2, Lemma1, Ordering, GraphInvariance };

/// Suite names: duality, additivity, prop1, theorem1, theorem2, lemma1,
/// ordering, graph_invariance.
const char* to_string(Suite s);
Suite parse_suite(const std::string& s);
std::vector<Suite> parse_suite_list(const std::string& s);
const std::vector<Suite>& all_suites();

struct CaseResult {
  std::string name;
  bool passed = false;
  double observed = 0.0;   // the quantity compared against the threshold
  double threshold = 0.0;
  std::string detail;      // error message when the case could not be evaluated
};

struct SuiteResult {
  Suite suite = Suite::Duality;
  std::vector<CaseResult> cases;
  bool passed() const;
};

struct VerifyReport {
  std::uint64_t seed = 0;
  std::vector<SuiteResult> suites;
  bool passed() const;
};

struct VerifyOptions {
  int random_channels = 10;  // seeded channels with dimensions in {2, 3}
  KappaSettings settings;
};

/// Seeded random channels used by the suites: dimensions in {2, 3}, Kraus
/// rank in {1, 2, 3}, deterministic in (seed, index).
QuantumChannel suite_channel(std::uint64_t seed, int index);

VerifyReport verify_suite(const std::vector<Suite>& suites, std::uint64_t seed, const VerifyOptions& options = {});

std::string to_json(const VerifyReport& r);

}  // namespace qcap::bounds
