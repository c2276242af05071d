#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <ostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "qcap/bounds.hpp"
#include "qcap/io.hpp"

namespace qcap::cli {

namespace {

using nlohmann::json;

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

const char* const kChannelNames = "identity, erasure, werner, nr, mixed-unitary";

struct ChannelOptions {
  std::string name;
  std::string file;
  int dim = 2;
  double p = 0.5;
  double r = 0.0;
  CLI::Option* p_opt = nullptr;
  CLI::Option* r_opt = nullptr;
};

struct CommonOptions {
  std::string format = "text";
  std::string output;
  double tol_gap = 0.0;
  int max_iter = 0;
  CLI::Option* tol_opt = nullptr;
  CLI::Option* iter_opt = nullptr;
};

void add_channel_options(CLI::App* app, ChannelOptions& c) {
  auto* name = app->add_option("--channel", c.name, std::string("Built-in channel: ") + kChannelNames);
  auto* file = app->add_option("--channel-file", c.file, "Channel JSON file");
  name->excludes(file);
  app->add_option("--dim", c.dim, "Dimension for identity, erasure and werner")->capture_default_str();
  c.p_opt = app->add_option("--p", c.p, "Erasure probability");
  c.r_opt = app->add_option("--r", c.r, "Parameter of the nr family, 0 <= r <= 0.5");
}

void add_common_options(CLI::App* app, CommonOptions& c, const std::string& default_format) {
  c.format = default_format;
  app->add_option("--out", c.format, "Output format")
      ->check(CLI::IsMember({"text", "json", "csv"}))
      ->capture_default_str();
  app->add_option("--output", c.output, "Write to this file instead of standard output");
  c.tol_opt = app->add_option("--tol-gap", c.tol_gap, "Solver relative gap tolerance")
                  ->check(CLI::PositiveNumber);
  c.iter_opt = app->add_option("--max-iter", c.max_iter, "Solver iteration limit")->check(CLI::PositiveNumber);
}

QuantumChannel make_channel(const ChannelOptions& c) {
  if (c.name.empty() == c.file.empty()) {
    throw UsageError("exactly one of --channel or --channel-file is required");
  }
  if (!c.file.empty()) return io::load_channel_file(c.file);
  if (c.name == "identity") {
    if (c.dim < 1) throw UsageError("--dim must be at least 1");
    return identity_channel(c.dim);
  }
  if (c.name == "erasure") {
    if (c.dim < 1) throw UsageError("--dim must be at least 1");
    if (!c.p_opt->count()) throw UsageError("erasure needs --p");
    if (!(c.p >= 0.0 && c.p <= 1.0)) throw UsageError("--p must lie in [0, 1]");
    return erasure_channel(c.dim, c.p);
  }
  if (c.name == "werner") {
    if (c.dim < 2) throw UsageError("--dim must be at least 2 for werner");
    return werner_holevo(c.dim);
  }
  if (c.name == "nr") {
    if (!c.r_opt->count()) throw UsageError("nr needs --r");
    if (!(c.r >= 0.0 && c.r <= 0.5)) throw UsageError("--r must lie in [0, 0.5]");
    return nr_channel(c.r);
  }
  if (c.name == "mixed-unitary") {
    throw UsageError("mixed-unitary channels are loaded with --channel-file");
  }
  throw UsageError("unknown channel '" + c.name + "' (available: " + kChannelNames + ")");
}

KappaSettings settings_from(const CommonOptions& c) {
  KappaSettings s;
  if (const char* env = std::getenv("QCAP_SOLVER_TOL"); env && *env) {
    char* end = nullptr;
    const double v = std::strtod(env, &end);
    if (*end != '\0' || !(v > 0.0)) throw UsageError("QCAP_SOLVER_TOL must be a positive number");
    s.solver.tol_gap = v;
    s.solver.tol_feas = v;
  }
  if (c.tol_opt->count()) s.solver.tol_gap = c.tol_gap;
  if (c.iter_opt->count()) s.solver.max_iter = c.max_iter;
  return s;
}

std::string num(double v) { return io::format_number(v); }

// Thresholds match the cross-checks attached to bound reports.
std::string chain_line(const bounds::BoundReport& r) {
  using bounds::BoundId;
  auto get = [&](BoundId id) -> std::optional<double> {
    const auto it = r.values.find(id);
    if (it == r.values.end()) return std::nullopt;
    return id == BoundId::KappaPPTp ? std::log2(it->second) : it->second;
  };
  const auto lk = get(BoundId::KappaPPTp);
  const auto qg = get(BoundId::QGamma);
  const auto qt = get(BoundId::QTheta);
  auto show = [](const std::optional<double>& v) { return v ? num(*v) : std::string("n/a"); };
  auto mark = [](const std::optional<double>& a, const std::optional<double>& b, double tol) {
    if (!a || !b) return std::string("[n/a]");
    return std::string(*a <= *b + tol ? "[pass]" : "[FAIL]");
  };
  return "log2(kappa_pptp) <= Q_Gamma <= Q_Theta: " + show(lk) + " <= " + show(qg) + " <= " + show(qt) + "  " +
         mark(lk, qg, 1e-4) + " " + mark(qg, qt, 2e-5);
}

int cmd_bound(const ChannelOptions& chopt, const CommonOptions& com, const std::string& list, std::ostream& out,
              std::ostream& err) {
  const auto ids = bounds::parse_bound_list(list);
  const QuantumChannel ch = make_channel(chopt);
  const bounds::BoundReport r = bounds::report(ch, ids, settings_from(com));
  if (com.format == "json") {
    out << bounds::to_json(r, false) << '\n';
  } else if (com.format == "csv") {
    out << "bound,value\n";
    for (auto id : ids) {
      const auto it = r.values.find(id);
      out << bounds::to_string(id) << ',' << (it == r.values.end() ? "nan" : num(it->second)) << '\n';
    }
  } else {
    out << "channel " << r.channel_name << " (" << r.dim_in << " -> " << r.dim_out << ")\n";
    for (auto id : ids) {
      const auto it = r.values.find(id);
      out << bounds::to_string(id) << " = " << (it == r.values.end() ? "error" : num(it->second)) << '\n';
    }
    out << chain_line(r) << '\n';
  }
  for (const auto& [id, msg] : r.errors) err << "error: bound " << bounds::to_string(id) << " failed: " << msg << '\n';
  return r.errors.empty() ? kOk : kComputation;
}

int cmd_fidelity(const ChannelOptions& chopt, const CommonOptions& com, double k, const std::string& code_name,
                 bool dual, std::ostream& out) {
  const CodeClass code = parse_code_class(code_name);
  if (!(k >= 1.0)) throw UsageError("--k must be at least 1");
  const QuantumChannel ch = make_channel(chopt);
  const FidelityResult f = fidelity(ch, k, code, dual ? Side::Both : Side::Primal, settings_from(com).solver);
  if (com.format == "json") {
    json doc = {{"channel", ch.name()}, {"code", to_string(code)}, {"k", k}, {"value", f.value}};
    if (f.dual_value) doc["dualValue"] = *f.dual_value;
    out << doc.dump(2) << '\n';
  } else if (com.format == "csv") {
    out << "channel,code,k,value" << (dual ? ",dual" : "") << '\n';
    out << ch.name() << ',' << to_string(code) << ',' << num(k) << ',' << num(f.value);
    if (f.dual_value) out << ',' << num(*f.dual_value);
    out << '\n';
  } else {
    out << "F^" << to_string(code) << "(" << ch.name() << ", k=" << num(k) << ") = " << num(f.value) << '\n';
    if (f.dual_value) out << "dual = " << num(*f.dual_value) << '\n';
  }
  return kOk;
}

int cmd_kappa(const ChannelOptions& chopt, const CommonOptions& com, const std::string& code_name, double tol,
              bool tol_set, std::ostream& out) {
  const CodeClass code = parse_code_class(code_name);
  KappaSettings s = settings_from(com);
  if (tol_set) {
    if (!(tol > 0.0)) throw UsageError("--tol must be positive");
    s.tol_k = tol;
  }
  const QuantumChannel ch = make_channel(chopt);
  const KappaResult kr = kappa(ch, code, s);
  if (com.format == "json") {
    const json doc = {{"channel", ch.name()}, {"code", to_string(code)}, {"kappa", kr.kappa},
                      {"oneShot", kr.one_shot}, {"lo", kr.lo},          {"hi", kr.hi},
                      {"solves", kr.solves}};
    out << doc.dump(2) << '\n';
  } else if (com.format == "csv") {
    out << "channel,code,kappa,one_shot,lo,hi\n";
    out << ch.name() << ',' << to_string(code) << ',' << num(kr.kappa) << ',' << kr.one_shot << ',' << num(kr.lo)
        << ',' << num(kr.hi) << '\n';
  } else {
    out << "kappa^" << to_string(code) << "(" << ch.name() << ") = " << num(kr.kappa) << '\n';
    out << "one-shot = " << kr.one_shot << '\n';
    out << "bracket = [" << num(kr.lo) << ", " << num(kr.hi) << "]\n";
  }
  return kOk;
}

int cmd_sweep(const CommonOptions& com, const std::string& family, double from, double to, int steps,
              const std::string& list, std::ostream& out) {
  const auto fam = bounds::parse_family(family);
  const auto ids = bounds::parse_bound_list(list);
  if (steps < 1) throw UsageError("--steps must be at least 1");
  const auto rows = bounds::sweep(fam, bounds::linear_grid(from, to, steps), ids, settings_from(com));
  if (com.format == "json") {
    json arr = json::array();
    for (const auto& row : rows) {
      json values = json::object();
      for (const auto& [id, v] : row.values) values[bounds::to_string(id)] = v;
      arr.push_back({{"param", row.parameter}, {"values", values}});
    }
    out << arr.dump(2) << '\n';
  } else if (com.format == "csv") {
    bounds::write_csv(out, rows, ids);
  } else {
    auto print_row = [&](const std::vector<std::string>& cells) {
      for (std::size_t i = 0; i < cells.size(); ++i) {
        out << cells[i];
        if (i + 1 < cells.size()) out << std::string(std::max<std::size_t>(2, 20 - cells[i].size()), ' ');
      }
      out << '\n';
    };
    std::vector<std::string> head = {"param"};
    for (auto id : ids) head.emplace_back(bounds::to_string(id));
    print_row(head);
    for (const auto& row : rows) {
      std::vector<std::string> cells = {num(row.parameter)};
      for (auto id : ids) cells.push_back(num(row.values.at(id)));
      print_row(cells);
    }
  }
  return kOk;
}

int cmd_verify(const CommonOptions& com, const std::string& list, std::uint64_t seed, int random_channels,
               std::ostream& out) {
  const auto suites = list.empty() ? bounds::all_suites() : bounds::parse_suite_list(list);
  if (random_channels < 1) throw UsageError("--random-channels must be at least 1");
  bounds::VerifyOptions opt;
  opt.random_channels = random_channels;
  opt.settings = settings_from(com);
  const bounds::VerifyReport rep = bounds::verify_suite(suites, seed, opt);
  if (com.format == "json") {
    out << bounds::to_json(rep) << '\n';
  } else if (com.format == "csv") {
    out << "suite,case,passed,observed,threshold\n";
    for (const auto& s : rep.suites)
      for (const auto& c : s.cases)
        out << bounds::to_string(s.suite) << ",\"" << c.name << "\"," << (c.passed ? 1 : 0) << ','
            << num(c.observed) << ',' << num(c.threshold) << '\n';
  } else {
    for (const auto& s : rep.suites) {
      out << bounds::to_string(s.suite) << ": " << (s.passed() ? "PASS" : "FAIL") << " (" << s.cases.size()
          << " cases)\n";
      for (const auto& c : s.cases) {
        if (c.passed) continue;
        out << "  FAIL " << c.name << ": observed " << num(c.observed) << ", threshold " << num(c.threshold);
        if (!c.detail.empty()) out << " (" << c.detail << ")";
        out << '\n';
      }
    }
    out << "overall: " << (rep.passed() ? "PASS" : "FAIL") << " (seed " << seed << ")\n";
  }
  return rep.passed() ? kOk : kVerifyFailed;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"SDP bounds on quantum channel capacities", "qcap"};
  app.require_subcommand(1);

  // one option set per subcommand: the stored CLI::Option pointers are per app
  ChannelOptions chan_b, chan_f, chan_k;
  CommonOptions com_b, com_f, com_k, com_s, com_v;
  std::string bound_list;
  double k = 1.0;
  std::string code = "pptp";
  bool dual = false;
  double tol = 1e-4;
  std::string family = "nr";
  double from = 0.0, to = 0.5;
  int steps = 11;
  std::string suites;
  std::uint64_t seed = 42;
  int random_channels = 10;

  auto* bound = app.add_subcommand("bound", "Compute capacity bounds for one channel");
  add_channel_options(bound, chan_b);
  add_common_options(bound, com_b, "text");
  bound->add_option("--bounds", bound_list, "Comma-separated bound identifiers")->required();

  auto* fid = app.add_subcommand("fidelity", "Channel fidelity for code size k");
  add_channel_options(fid, chan_f);
  add_common_options(fid, com_f, "text");
  fid->add_option("--k", k, "Code dimension")->required();
  fid->add_option("--code", code, "ns | pptp | ns-pptp")->required();
  fid->add_flag("--dual", dual, "Also solve the dual program");

  auto* kap = app.add_subcommand("kappa", "Largest code size with perfect fidelity");
  add_channel_options(kap, chan_k);
  add_common_options(kap, com_k, "text");
  kap->add_option("--code", code, "ns | pptp | ns-pptp")->required();
  auto* tol_opt = kap->add_option("--tol", tol, "Bisection tolerance on k");

  auto* sw = app.add_subcommand("sweep", "Bounds along a channel family");
  add_common_options(sw, com_s, "csv");
  sw->add_option("--family", family, "Channel family (nr)")->capture_default_str();
  sw->add_option("--from", from, "First parameter")->capture_default_str();
  sw->add_option("--to", to, "Last parameter")->capture_default_str();
  sw->add_option("--steps", steps, "Number of grid points")->capture_default_str();
  sw->add_option("--bounds", bound_list, "Comma-separated bound identifiers")->required();

  auto* ver = app.add_subcommand("verify", "Run property suites on seeded channels");
  add_common_options(ver, com_v, "text");
  ver->add_option("--suites", suites, "Comma-separated suites (default: all)");
  ver->add_option("--seed", seed, "Seed for random channels")->capture_default_str();
  ver->add_option("--random-channels", random_channels, "Random channels per suite")->capture_default_str();

  try {
    app.parse(std::vector<std::string>(args.rbegin(), args.rend()));
  } catch (const CLI::ParseError& e) {
    const int code_ = app.exit(e, out, err);
    return code_ == 0 ? kOk : kUsage;
  }

  const CommonOptions& com = bound->parsed() ? com_b
                            : fid->parsed() ? com_f
                            : kap->parsed() ? com_k
                            : sw->parsed()  ? com_s
                                            : com_v;
  std::ofstream file;
  std::ostream* dest = &out;
  if (!com.output.empty()) {
    file.open(com.output);
    if (!file) {
      err << "error: cannot open '" << com.output << "' for writing\n";
      return kUsage;
    }
    dest = &file;
  }

  try {
    if (bound->parsed()) return cmd_bound(chan_b, com, bound_list, *dest, err);
    if (fid->parsed()) return cmd_fidelity(chan_f, com, k, code, dual, *dest);
    if (kap->parsed()) return cmd_kappa(chan_k, com, code, tol, tol_opt->count() > 0, *dest);
    if (sw->parsed()) return cmd_sweep(com, family, from, to, steps, bound_list, *dest);
    return cmd_verify(com, suites, seed, random_channels, *dest);
  } catch (const std::invalid_argument& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kComputation;
  }
}

}  // namespace qcap::cli
