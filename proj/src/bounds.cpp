#include "qcap/bounds.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <istream>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "qcap/io.hpp"

namespace qcap::bounds {

namespace {

using nlohmann::json;

struct IdName {
  BoundId id;
  const char* name;
};

constexpr IdName kIdNames[] = {
    {BoundId::QGamma, "qGamma"},
    {BoundId::QTheta, "qTheta"},
    {BoundId::KappaNS, "kappaNS"},
    {BoundId::KappaPPTp, "kappaPPTp"},
    {BoundId::KappaNSPPTp, "kappaNSPPTp"},
    {BoundId::Upsilon, "upsilon"},
    {BoundId::OneShotZeroErrorPPTp, "oneShotZeroErrorPPTp"},
};

struct SuiteName {
  Suite suite;
  const char* name;
};

constexpr SuiteName kSuiteNames[] = {
    {Suite::Duality, "duality"},   {Suite::Additivity, "additivity"},
    {Suite::Prop1, "prop1"},       {Suite::Theorem1, "theorem1"},
    {Suite::Theorem2, "theorem2"}, {Suite::Lemma1, "lemma1"},
    {Suite::Ordering, "ordering"}, {Suite::GraphInvariance, "graph_invariance"},
};

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, ',')) {
    cur.erase(0, cur.find_first_not_of(" \t"));
    cur.erase(cur.find_last_not_of(" \t") + 1);
    if (!cur.empty()) out.push_back(cur);
  }
  return out;
}

SolverStat stat_of(const SolveInfo& info) { return {info.iterations, info.residuals.gap}; }

SolverStat stat_of(const KappaResult& k) { return {k.solves, k.hi - k.lo}; }

CodeClass code_of(BoundId id) {
  switch (id) {
    case BoundId::KappaNS: return CodeClass::NS;
    case BoundId::KappaNSPPTp: return CodeClass::NSandPPTp;
    default: return CodeClass::PPTp;
  }
}

// Computes one bound; κ^{PPTp} is shared between kappaPPTp and the one-shot value.
double compute(const QuantumChannel& ch, BoundId id, const KappaSettings& st, std::optional<KappaResult>& kappa_pptp,
               SolverStat& stat) {
  switch (id) {
    case BoundId::QGamma: {
      const GammaResult g = gamma(ch, Side::Both, st.solver);
      stat = stat_of(g.info);
      return g.q_gamma;
    }
    case BoundId::QTheta: {
      const CbNormResult c = cb_norm_pt(ch, st.solver);
      stat = stat_of(c.info);
      return c.q_theta;
    }
    case BoundId::Upsilon: {
      const UpsilonResult u = upsilon(kraus_support(ch), st.solver);
      stat = stat_of(u.info);
      return u.upsilon;
    }
    case BoundId::KappaPPTp:
    case BoundId::OneShotZeroErrorPPTp: {
      if (!kappa_pptp) kappa_pptp = kappa(ch, CodeClass::PPTp, st);
      stat = stat_of(*kappa_pptp);
      return id == BoundId::KappaPPTp ? kappa_pptp->kappa : kappa_pptp->one_shot;
    }
    case BoundId::KappaNS:
    case BoundId::KappaNSPPTp: {
      const KappaResult k = kappa(ch, code_of(id), st);
      stat = stat_of(k);
      return k.kappa;
    }
  }
  throw std::logic_error("unhandled bound identifier");
}

std::vector<std::string> names_of(const std::vector<BoundId>& ids) {
  std::vector<std::string> out;
  for (BoundId id : ids) out.emplace_back(to_string(id));
  return out;
}

template <class V>
json keyed(const std::map<BoundId, V>& m) {
  json out = json::object();
  for (const auto& [id, v] : m) out[to_string(id)] = v;
  return out;
}

double parse_double(const std::string& s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw std::invalid_argument("csv: malformed number '" + s + "'");
  }
  return v;
}

}  // namespace

const char* to_string(BoundId id) {
  for (const auto& e : kIdNames)
    if (e.id == id) return e.name;
  return "?";
}

BoundId parse_bound_id(const std::string& s) {
  for (const auto& e : kIdNames)
    if (s == e.name) return e.id;
  std::string known;
  for (const auto& e : kIdNames) known += std::string(known.empty() ? "" : ", ") + e.name;
  throw std::invalid_argument("unknown bound '" + s + "' (available: " + known + ")");
}

std::vector<BoundId> parse_bound_list(const std::string& s) {
  std::vector<BoundId> out;
  for (const auto& tok : split_commas(s)) {
    const BoundId id = parse_bound_id(tok);
    if (std::find(out.begin(), out.end(), id) == out.end()) out.push_back(id);
  }
  if (out.empty()) throw std::invalid_argument("empty bound list");
  return out;
}

const std::vector<BoundId>& all_bound_ids() {
  static const std::vector<BoundId> ids = [] {
    std::vector<BoundId> v;
    for (const auto& e : kIdNames) v.push_back(e.id);
    return v;
  }();
  return ids;
}

BoundReport report(const QuantumChannel& ch, const std::vector<BoundId>& requested, const KappaSettings& settings) {
  BoundReport r;
  r.channel_name = ch.name();
  r.dim_in = ch.dim_in();
  r.dim_out = ch.dim_out();
  r.requested = requested;
  std::optional<KappaResult> kappa_pptp;
  for (BoundId id : requested) {
    const auto t0 = std::chrono::steady_clock::now();
    try {
      SolverStat stat;
      r.values[id] = compute(ch, id, settings, kappa_pptp, stat);
      r.solver_stats[id] = stat;
    } catch (const std::exception& e) {
      r.errors[id] = e.what();
    }
    r.wall_times[id] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
  if (r.has(BoundId::QGamma) && r.has(BoundId::QTheta)) {
    const double m = r.values[BoundId::QTheta] + 2e-5 - r.values[BoundId::QGamma];
    r.checks.push_back({"qGamma <= qTheta", m >= 0.0, m});
  }
  if (r.has(BoundId::KappaPPTp) && r.has(BoundId::QGamma)) {
    const double m = r.values[BoundId::QGamma] + 1e-4 - std::log2(r.values[BoundId::KappaPPTp]);
    r.checks.push_back({"log2(kappaPPTp) <= qGamma", m >= 0.0, m});
  }
  return r;
}

std::string to_json(const BoundReport& r, bool include_wall_times) {
  json stats = json::object();
  for (const auto& [id, s] : r.solver_stats) stats[to_string(id)] = {{"iterations", s.iterations}, {"gap", s.gap}};
  json checks = json::array();
  for (const auto& c : r.checks) checks.push_back({{"name", c.name}, {"passed", c.passed}, {"margin", c.margin}});
  json doc = {{"channelName", r.channel_name},
                    {"dims", {r.dim_in, r.dim_out}},
                    {"requested", names_of(r.requested)},
                    {"values", keyed(r.values)},
                    {"wallTimes", keyed(r.wall_times)},
                    {"solverStats", stats},
                    {"errors", keyed(r.errors)},
                    {"checks", checks}};
  if (!include_wall_times) doc.erase("wallTimes");
  return doc.dump(2);
}

Family parse_family(const std::string& s) {
  if (s == "nr") return Family::NR;
  throw std::invalid_argument("unknown family '" + s + "' (available: nr)");
}

std::vector<double> linear_grid(double from, double to, int steps) {
  if (steps < 1) throw std::invalid_argument("grid needs at least one step");
  if (steps == 1) return {from};
  std::vector<double> g(steps);
  for (int i = 0; i < steps; ++i) g[i] = from + (to - from) * i / (steps - 1);
  g.back() = to;
  return g;
}

std::vector<SweepRow> sweep(Family family, std::vector<double> grid, const std::vector<BoundId>& requested,
                            const KappaSettings& settings) {
  (void)family;
  for (double r : grid) {
    if (!(r >= 0.0 && r <= 0.5)) throw std::invalid_argument("nr parameter must lie in [0, 0.5]");
  }
  std::sort(grid.begin(), grid.end());
  std::vector<SweepRow> rows;
  for (double r : grid) {
    const QuantumChannel ch = nr_channel(r);
    SweepRow row{r, {}};
    std::optional<KappaResult> kappa_pptp;
    for (BoundId id : requested) {
      SolverStat stat;
      row.values[id] = compute(ch, id, settings, kappa_pptp, stat);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_csv(std::ostream& os, const std::vector<SweepRow>& rows, const std::vector<BoundId>& ids) {
  os << "param";
  for (BoundId id : ids) os << ',' << to_string(id);
  os << '\n';
  for (const auto& row : rows) {
    os << io::format_number(row.parameter);
    for (BoundId id : ids) {
      const auto it = row.values.find(id);
      os << ',' << (it == row.values.end() ? std::string("nan") : io::format_number(it->second));
    }
    os << '\n';
  }
}

std::vector<SweepRow> read_csv(std::istream& is, std::vector<BoundId>* ids) {
  std::string line;
  if (!std::getline(is, line)) throw std::invalid_argument("csv: missing header");
  const auto head = split_commas(line);
  if (head.empty() || head[0] != "param") throw std::invalid_argument("csv: header must start with 'param'");
  std::vector<BoundId> cols;
  for (std::size_t i = 1; i < head.size(); ++i) cols.push_back(parse_bound_id(head[i]));
  std::vector<SweepRow> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto cells = split_commas(line);
    if (cells.size() != head.size()) throw std::invalid_argument("csv: row has wrong number of cells");
    SweepRow row{parse_double(cells[0]), {}};
    for (std::size_t i = 1; i < cells.size(); ++i) row.values[cols[i - 1]] = parse_double(cells[i]);
    rows.push_back(std::move(row));
  }
  if (ids) *ids = cols;
  return rows;
}

const char* to_string(Suite s) {
  for (const auto& e : kSuiteNames)
    if (e.suite == s) return e.name;
  return "?";
}

Suite parse_suite(const std::string& s) {
  for (const auto& e : kSuiteNames)
    if (s == e.name) return e.suite;
  std::string known;
  for (const auto& e : kSuiteNames) known += std::string(known.empty() ? "" : ", ") + e.name;
  throw std::invalid_argument("unknown suite '" + s + "' (available: " + known + ")");
}

std::vector<Suite> parse_suite_list(const std::string& s) {
  std::vector<Suite> out;
  for (const auto& tok : split_commas(s)) {
    const Suite v = parse_suite(tok);
    if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
  }
  if (out.empty()) throw std::invalid_argument("empty suite list");
  return out;
}

const std::vector<Suite>& all_suites() {
  static const std::vector<Suite> v = [] {
    std::vector<Suite> out;
    for (const auto& e : kSuiteNames) out.push_back(e.suite);
    return out;
  }();
  return v;
}

bool SuiteResult::passed() const {
  return std::all_of(cases.begin(), cases.end(), [](const CaseResult& c) { return c.passed; });
}

bool VerifyReport::passed() const {
  return std::all_of(suites.begin(), suites.end(), [](const SuiteResult& s) { return s.passed(); });
}

QuantumChannel suite_channel(std::uint64_t seed, int index) {
  // (dim_in, dim_out, kraus rank); full-rank 2->2 channels mostly have
  // trivial zero-error structure, so low ranks are over-represented
  static constexpr int kShapes[][3] = {{3, 2, 2}, {3, 3, 2}, {2, 2, 2}, {3, 2, 3}, {2, 3, 2}, {3, 3, 3}, {2, 2, 1}};
  const std::uint64_t s = seed * 1000 + static_cast<std::uint64_t>(index);
  std::mt19937_64 rng(s);
  const auto& shape = kShapes[std::uniform_int_distribution<int>(0, 6)(rng)];
  return random_channel(shape[0], shape[1], shape[2], s);
}

namespace {

// Case bookkeeping: an exception while evaluating a case marks it failed.
class SuiteRunner {
 public:
  explicit SuiteRunner(SuiteResult& out) : out_(out) {}

  template <class F>
  void run(const std::string& name, double threshold, F&& f) {
    CaseResult c;
    c.name = name;
    c.threshold = threshold;
    try {
      c.observed = f(c);
      c.passed = c.observed <= threshold;
    } catch (const std::exception& e) {
      c.passed = false;
      c.detail = e.what();
    }
    out_.cases.push_back(std::move(c));
  }

 private:
  SuiteResult& out_;
};

// A second channel whose joint Choi side with `n` stays within 36.
QuantumChannel partner(const QuantumChannel& n, std::uint64_t seed, int index) {
  const int side = n.dim_in() * n.dim_out();
  QuantumChannel m = suite_channel(seed, 5000 + index);
  if (side * m.dim_in() * m.dim_out() <= 36) return m;
  if (side <= 6) return random_channel(2, 3, 2, seed * 7919ULL + index);
  return random_channel(2, 2, 2, seed * 7919ULL + index);
}

std::vector<QuantumChannel> random_set(std::uint64_t seed, int count) {
  std::vector<QuantumChannel> out;
  for (int i = 0; i < count; ++i) out.push_back(suite_channel(seed, i));
  return out;
}

std::string fmt(double v) { return io::format_number(v); }

void duality_suite(SuiteRunner& run, std::uint64_t seed, const VerifyOptions& opt) {
  std::vector<QuantumChannel> chans = {identity_channel(2), werner_holevo(3), nr_channel(0.3), erasure_channel(2, 0.5)};
  for (auto& c : random_set(seed, opt.random_channels)) chans.push_back(std::move(c));
  const auto& st = opt.settings.solver;
  for (const auto& ch : chans) {
    run.run("gamma primal-dual " + ch.name(), 1e-6, [&](CaseResult&) {
      const GammaResult g = gamma(ch, Side::Both, st);
      return std::abs(g.gamma - *g.dual_mu) / std::max(1.0, std::abs(g.gamma));
    });
    for (double k : {1.5, 2.0}) {
      run.run("fidelity pptp primal-dual " + ch.name() + " k=" + fmt(k), 1e-6, [&](CaseResult&) {
        const FidelityResult f = fidelity(ch, k, CodeClass::PPTp, Side::Both, st);
        return std::abs(f.value - *f.dual_value);
      });
    }
  }
}

void additivity_suite(SuiteRunner& run, std::uint64_t seed, const VerifyOptions& opt) {
  std::vector<std::pair<QuantumChannel, QuantumChannel>> pairs = {
      {werner_holevo(3), identity_channel(2)}, {nr_channel(0.1), nr_channel(0.4)}};
  for (int i = 0; i < opt.random_channels; ++i) {
    QuantumChannel n = suite_channel(seed, i);
    QuantumChannel m = partner(n, seed, i);
    pairs.emplace_back(std::move(n), std::move(m));
  }
  const auto& st = opt.settings.solver;
  for (const auto& [n, m] : pairs) {
    run.run("gamma additivity " + n.name() + " x " + m.name(), 1e-5, [&](CaseResult&) {
      const double gn = gamma(n, Side::Primal, st).gamma;
      const double gm = gamma(m, Side::Primal, st).gamma;
      const double gj = gamma(tensor_channels(n, m), Side::Primal, st).gamma;
      return std::abs(gj - gn * gm) / (gn * gm);
    });
  }
}

void prop1_suite(SuiteRunner& run, std::uint64_t seed, const VerifyOptions& opt) {
  const std::vector<QuantumChannel> chans = {nr_channel(0.1), nr_channel(0.3),
                                             random_channel(2, 2, 2, seed * 31ULL + 1)};
  const QuantumChannel id2 = identity_channel(2);
  const auto& st = opt.settings.solver;
  for (const auto& ch : chans) {
    const QuantumChannel joint = tensor_channels(ch, id2);
    for (double k : {1.0, 1.2, 1.5}) {
      run.run("F(N x I2, 2k) = F(N, k) " + ch.name() + " k=" + fmt(k), 1e-5, [&](CaseResult&) {
        const double a = fidelity(joint, 2 * k, CodeClass::PPTp, Side::Primal, st).value;
        const double b = fidelity(ch, k, CodeClass::PPTp, Side::Primal, st).value;
        return std::abs(a - b);
      });
    }
  }
}

void theorem1_suite(SuiteRunner& run, std::uint64_t seed, const VerifyOptions& opt) {
  std::vector<QuantumChannel> chans = {werner_holevo(3), nr_channel(0.2)};
  for (auto& c : random_set(seed, opt.random_channels)) chans.push_back(std::move(c));
  const auto& st = opt.settings.solver;
  for (const auto& ch : chans) {
    const KrausSupport ks = kraus_support(ch);
    for (CodeClass code : {CodeClass::PPTp, CodeClass::NS, CodeClass::NSandPPTp}) {
      for (double k : {1.3, 1.7, 2.2, 2.9}) {
        run.run(std::string("F = 1 iff D = 0 ") + ch.name() + " " + to_string(code) + " k=" + fmt(k), 0.0,
                [&](CaseResult& c) {
                  const double f = fidelity(ch, k, code, Side::Primal, st).value;
                  const double d = deviation(ks, k, code, st);
                  c.detail = "F=" + fmt(f) + " D=" + fmt(d);
                  return (f >= 1.0 - 1e-6) == (d >= -1e-6) ? 0.0 : 1.0;
                });
      }
    }
  }
}

// The κ² = Υ comparison needs κ to sit within ~1e-4 of the threshold. The
// deviation falls off quadratically past the threshold, so the "D = 0"
// tolerance must be far below the default to get there.
KappaSettings tight(const KappaSettings& s) {
  KappaSettings t = s;
  t.solver.tol_gap = std::min(t.solver.tol_gap, 1e-10);
  t.solver.tol_feas = std::min(t.solver.tol_feas, 1e-10);
  t.eps_d = std::min(t.eps_d, 1e-9);
  return t;
}

void theorem2_suite(SuiteRunner& run, std::uint64_t seed, const VerifyOptions& opt) {
  std::vector<QuantumChannel> chans = {identity_channel(2), nr_channel(0.2)};
  for (auto& c : random_set(seed, opt.random_channels)) chans.push_back(std::move(c));
  const KappaSettings st = tight(opt.settings);
  for (const auto& ch : chans) {
    run.run("kappa_ns^2 = upsilon " + ch.name(), 1e-3, [&](CaseResult& c) {
      const double u = upsilon(kraus_support(ch), st.solver).upsilon;
      const double k = kappa(ch, CodeClass::NS, st).kappa;
      c.detail = "kappa=" + fmt(k) + " upsilon=" + fmt(u);
      return std::abs(k * k - u);
    });
  }
}

void lemma1_suite(SuiteRunner& run, std::uint64_t seed, const VerifyOptions& opt) {
  const auto& st = opt.settings.solver;
  for (int i = 0; i < opt.random_channels; ++i) {
    const QuantumChannel n1 = suite_channel(seed, 100 + i);
    const QuantumChannel n2 = partner(n1, seed, 100 + i);
    const double k = 1.0 + 0.25 * (i % 5);
    run.run("lemma1 " + n1.name() + " x " + n2.name() + " k=" + fmt(k), 1e-6, [&](CaseResult& c) {
      const Lemma1Values v = lemma1_check(n1, n2, k, st);
      c.detail = "lhs=" + fmt(v.lhs) + " mid=" + fmt(v.mid) + " rhs=" + fmt(v.rhs);
      return std::max(v.lhs - v.mid, v.mid - v.rhs);
    });
  }
}

void ordering_suite(SuiteRunner& run, std::uint64_t seed, const VerifyOptions& opt) {
  std::vector<QuantumChannel> chans = {identity_channel(2), identity_channel(3), werner_holevo(3),
                                       werner_holevo(4),   nr_channel(0.1),     nr_channel(0.3),
                                       erasure_channel(2, 0.5)};
  for (auto& c : random_set(seed, opt.random_channels)) chans.push_back(std::move(c));
  for (const auto& ch : chans) {
    run.run("log2 kappa_pptp <= qGamma <= qTheta " + ch.name(), 0.0, [&](CaseResult& c) {
      const double lk = std::log2(kappa(ch, CodeClass::PPTp, opt.settings).kappa);
      const double qg = gamma(ch, Side::Primal, opt.settings.solver).q_gamma;
      const double qt = cb_norm_pt(ch, opt.settings.solver).q_theta;
      c.detail = "log2kappa=" + fmt(lk) + " qGamma=" + fmt(qg) + " qTheta=" + fmt(qt);
      return std::max({lk - qg - 1e-5, qg - qt - 1e-5, 0.0});
    });
  }
}

void graph_invariance_suite(SuiteRunner& run, std::uint64_t seed, const VerifyOptions& opt) {
  const CMatrix one = CMatrix::Identity(2, 2);
  const std::vector<std::vector<CMatrix>> sets = {
      {one, pauli_x()},
      {one, pauli_x(), pauli_z()},
      {random_unitary(2, seed * 101ULL + 1), random_unitary(2, seed * 101ULL + 2)},
      {random_unitary(3, seed * 101ULL + 3), random_unitary(3, seed * 101ULL + 4)},
  };
  const double limit = 2.0 * opt.settings.tol_k;
  for (std::size_t s = 0; s < sets.size(); ++s) {
    const auto& us = sets[s];
    const int n = static_cast<int>(us.size());
    std::vector<std::vector<double>> probs = {std::vector<double>(n, 1.0 / n), {}, {}};
    for (int i = 0; i < n; ++i) {
      probs[1].push_back(i == 0 ? 0.7 : 0.3 / (n - 1));
      probs[2].push_back(i == 0 ? 0.1 : 0.9 / (n - 1));
    }
    for (CodeClass code : {CodeClass::PPTp, CodeClass::NS}) {
      run.run("kappa invariance set" + std::to_string(s) + " " + to_string(code), limit, [&](CaseResult& c) {
        double lo = 1e300, hi = -1e300;
        for (const auto& p : probs) {
          const double k = kappa(mixed_unitary(us, p), code, opt.settings).kappa;
          lo = std::min(lo, k);
          hi = std::max(hi, k);
        }
        c.detail = "kappa in [" + fmt(lo) + ", " + fmt(hi) + "]";
        return hi - lo;
      });
    }
  }
}

}  // namespace

VerifyReport verify_suite(const std::vector<Suite>& suites, std::uint64_t seed, const VerifyOptions& options) {
  VerifyReport rep;
  rep.seed = seed;
  for (Suite s : suites) {
    SuiteResult res;
    res.suite = s;
    SuiteRunner run(res);
    switch (s) {
      case Suite::Duality: duality_suite(run, seed, options); break;
      case Suite::Additivity: additivity_suite(run, seed, options); break;
      case Suite::Prop1: prop1_suite(run, seed, options); break;
      case Suite::Theorem1: theorem1_suite(run, seed, options); break;
      case Suite::Theorem2: theorem2_suite(run, seed, options); break;
      case Suite::Lemma1: lemma1_suite(run, seed, options); break;
      case Suite::Ordering: ordering_suite(run, seed, options); break;
      case Suite::GraphInvariance: graph_invariance_suite(run, seed, options); break;
    }
    rep.suites.push_back(std::move(res));
  }
  return rep;
}

std::string to_json(const VerifyReport& r) {
  json suites = json::array();
  for (const auto& s : r.suites) {
    json cases = json::array();
    for (const auto& c : s.cases) {
      cases.push_back({{"name", c.name},
                       {"passed", c.passed},
                       {"observed", c.observed},
                       {"threshold", c.threshold},
                       {"detail", c.detail}});
    }
    suites.push_back({{"suite", to_string(s.suite)}, {"passed", s.passed()}, {"cases", cases}});
  }
  const json doc = {{"seed", r.seed}, {"passed", r.passed()}, {"suites", suites}};
  return doc.dump(2);
}

}  // namespace qcap::bounds
