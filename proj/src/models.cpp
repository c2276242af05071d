#include "qcap/models.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace qcap {

using lmi::Expr;
using lmi::Model;

const char* to_string(CodeClass c) {
  switch (c) {
    case CodeClass::NS:
      return "ns";
    case CodeClass::PPTp:
      return "pptp";
    case CodeClass::NSandPPTp:
      return "ns-pptp";
  }
  return "?";
}

CodeClass parse_code_class(const std::string& s) {
  if (s == "ns") return CodeClass::NS;
  if (s == "pptp") return CodeClass::PPTp;
  if (s == "ns-pptp") return CodeClass::NSandPPTp;
  throw std::invalid_argument("unknown code class '" + s + "' (expected ns, pptp or ns-pptp)");
}

bool has_ppt(CodeClass c) { return c != CodeClass::NS; }
bool has_ns(CodeClass c) { return c != CodeClass::PPTp; }

namespace {

std::string describe(const std::string& label, const sdp::SdpSolution& sol) {
  std::ostringstream os;
  os << label << ": solver returned " << sdp::to_string(sol.status) << " after " << sol.iterations
     << " iterations (gap " << sol.residuals.gap << ", primal residual " << sol.residuals.primal
     << ", dual residual " << sol.residuals.dual << ")";
  if (!sol.message.empty()) os << ": " << sol.message;
  return os.str();
}

}  // namespace

SolverError::SolverError(const std::string& label, const sdp::SdpSolution& sol)
    : std::runtime_error(describe(label, sol)), label_(label), status_(sol.status) {}

namespace {

// Solves and rejects anything short of an optimum. A best iterate from a stalled
// run is accepted when it already meets the tolerances loosened 100-fold, which
// happens on problems whose feasible set has no interior (e.g. NS codes at k = 1).
lmi::ModelSolution run(const lmi::Compiled& c, const sdp::SolverSettings& st, const std::string& label,
                       SolveInfo& info) {
  auto ms = c.solve(st);
  const auto& r = ms.raw.residuals;
  info = {ms.raw.status, ms.raw.iterations, r};
  if (ms.raw.status == sdp::SolveStatus::Optimal) return ms;
  const bool close = r.gap <= 100 * st.tol_gap && r.primal <= 100 * st.tol_feas && r.dual <= 100 * st.tol_feas;
  if (ms.raw.status != sdp::SolveStatus::Infeasible && close) return ms;
  throw SolverError(label, ms.raw);
}

lmi::ModelSolution run(const lmi::Compiled& c, const sdp::SolverSettings& st, const std::string& label) {
  SolveInfo info;
  return run(c, st, label, info);
}

void require_k(double k) {
  if (!(k >= 1.0) || !std::isfinite(k)) throw std::invalid_argument("code size k must be a finite number >= 1");
}

struct FidelityModel {
  Model m;
  lmi::Variable w, rho;
};

// Primal fidelity constraints; the caller sets the objective.
FidelityModel fidelity_constraints(BipartiteShape s, double k, CodeClass code) {
  FidelityModel f;
  f.w = f.m.hermitian(s.side(), "W");
  f.rho = f.m.hermitian(s.dA, "rho");
  const Expr w = f.m(f.w);
  const Expr r1 = f.m(f.rho).kron_identity_right(s.dB);
  f.m.psd(w, "W >= 0");
  f.m.psd(r1 - w, "rho x 1 - W >= 0");
  if (has_ppt(code)) {
    const Expr wt = w.partial_transpose(s, Subsystem::B);
    f.m.psd(r1 * (1.0 / k) - wt, "upper PPT");
    f.m.psd(r1 * (1.0 / k) + wt, "lower PPT");
  }
  if (has_ns(code)) f.m.equal(w.partial_trace(s, Subsystem::A), identity(s.dB) / (k * k), "NS");
  f.m.equal(f.m(f.rho).trace(), 1.0, "tr rho");
  return f;
}

}  // namespace

FidelityResult fidelity(const QuantumChannel& ch, double k, CodeClass code, Side side,
                        const sdp::SolverSettings& st) {
  return fidelity(choi(ch), k, code, side, st);
}

FidelityResult fidelity(const ChoiMatrix& j, double k, CodeClass code, Side side, const sdp::SolverSettings& st) {
  require_k(k);
  const BipartiteShape s = j.shape;
  FidelityResult res;
  if (side != Side::Dual) {
    auto f = fidelity_constraints(s, k, code);
    f.m.maximize(f.m(f.w).inner(j.matrix));
    const auto c = f.m.compile();
    const auto ms = run(c, st, std::string("fidelity primal (") + to_string(code) + ")", res.info);
    res.value = ms.value;
    res.w = c.value(f.w, ms.y_full);
    res.rho = c.value(f.rho, ms.y_full);
  }
  if (side != Side::Primal) {
    Model m;
    const auto mu = m.scalar("mu");
    const auto x = m.hermitian(s.side(), "X");
    const int n = s.side();
    Expr lhs = m(x) - Expr::constant(j.matrix);
    Expr marg = m(x).partial_trace(s, Subsystem::B);
    Expr obj = m(mu);
    std::optional<lmi::Variable> sb, y, v;
    m.psd(m(x), "X >= 0");
    if (has_ns(code)) {
      sb = m.hermitian(s.dB, "S_B");
      lhs = lhs + m(*sb).kron_identity_left(s.dA);
      obj = obj + m(*sb).trace() * (1.0 / (k * k));
    }
    if (has_ppt(code)) {
      y = m.hermitian(n, "Y");
      v = m.hermitian(n, "V");
      m.psd(m(*y), "Y >= 0");
      m.psd(m(*v), "V >= 0");
      lhs = lhs - (m(*y) - m(*v)).partial_transpose(s, Subsystem::B);
      marg = marg + (m(*y) + m(*v)).partial_trace(s, Subsystem::B) * (1.0 / k);
    }
    m.psd(lhs, "X + 1 x S_B - J - (Y - V)^TB >= 0");
    m.psd(m(mu).kron_identity_right(s.dA) - marg, "mu 1 - tr_B(...) >= 0");
    m.minimize(obj);
    const auto c = m.compile();
    SolveInfo info;
    const auto ms = run(c, st, std::string("fidelity dual (") + to_string(code) + ")", info);
    if (side == Side::Dual) {
      res.info = info;
      res.value = ms.value;
    }
    res.dual_value = ms.value;
    FidelityDual d;
    d.mu = c.value(mu, ms.y_full)(0, 0).real();
    d.x = c.value(x, ms.y_full);
    d.s_b = sb ? c.value(*sb, ms.y_full) : CMatrix::Zero(s.dB, s.dB);
    d.y = y ? c.value(*y, ms.y_full) : CMatrix::Zero(n, n);
    d.v = v ? c.value(*v, ms.y_full) : CMatrix::Zero(n, n);
    res.dual = std::move(d);
  }
  return res;
}

double deviation(const KrausSupport& ks, double k, CodeClass code, const sdp::SolverSettings& st) {
  require_k(k);
  const BipartiteShape s = ks.shape;
  auto f = fidelity_constraints(s, k, code);
  const Expr r1 = f.m(f.rho).kron_identity_right(s.dB);
  f.m.maximize(f.m(f.w).inner(ks.projector) - r1.inner(ks.projector));
  return run(f.m.compile(), st, std::string("deviation (") + to_string(code) + ")").value;
}

namespace {

// Bisection on k for the largest value with pred(k) true. `lo` must satisfy the
// predicate; hi is widened to hi_cap once if it also does.
KappaResult bisect_kappa(const std::function<bool(double)>& pred, double hi, double hi_cap, bool prescan,
                         CodeClass code, double tol_k) {
  KappaResult r;
  r.code = code;
  auto test = [&](double k) {
    ++r.solves;
    return pred(k);
  };
  double lo = 1.0;
  if (test(hi)) {
    if (hi_cap > hi && !test(hi_cap)) {
      lo = hi;
      hi = hi_cap;
    } else {
      std::ostringstream os;
      os << "kappa: perfect transmission still possible at the search cap k = " << std::max(hi, hi_cap);
      throw std::runtime_error(os.str());
    }
  }
  if (prescan) {
    // The zero set of the deviation is assumed to be an interval [1, κ]; check
    // it on a coarse grid before trusting bisection.
    constexpr int kGrid = 8;
    double first_false = hi;
    double last_true = lo;
    bool seen_false = false;
    for (int i = 1; i < kGrid; ++i) {
      const double k = lo + (hi - lo) * i / kGrid;
      const bool ok = test(k);
      if (ok && seen_false) {
        std::ostringstream os;
        os << "kappa: the set of k with zero deviation is not an interval (feasible again at k = " << k
           << "); use a grid scan instead";
        throw std::runtime_error(os.str());
      }
      if (ok) last_true = k;
      if (!ok && !seen_false) {
        seen_false = true;
        first_false = k;
      }
    }
    lo = last_true;
    hi = first_false;
  }
  while (hi - lo > tol_k) {
    const double mid = 0.5 * (lo + hi);
    (test(mid) ? lo : hi) = mid;
  }
  // An integer inside the bracket is tested directly so that integral κ values
  // are reported exactly.
  const double j = std::floor(hi);
  if (j > lo && j >= 1.0 && test(j)) lo = j;
  r.lo = lo;
  r.hi = hi;
  r.kappa = lo;
  r.one_shot = static_cast<int>(std::floor(lo));
  return r;
}

}  // namespace

KappaResult kappa(const QuantumChannel& ch, CodeClass code, const KappaSettings& st) {
  const auto ks = kraus_support(ch);
  auto pred = [&](double k) { return deviation(ks, k, code, st.solver) >= -st.eps_d; };
  double hi, cap;
  if (has_ppt(code)) {
    hi = gamma(ch, Side::Primal, st.solver).gamma + 1.0;
    cap = hi;
  } else {
    hi = ch.dim_in();
    cap = 2.0 * ch.dim_in();
  }
  return bisect_kappa(pred, hi, cap, has_ns(code), code, st.tol_k);
}

UpsilonResult upsilon(const KrausSupport& ks, const sdp::SolverSettings& st) {
  const BipartiteShape s = ks.shape;
  const int n = s.side();
  // tr P(S⊗1 - U) = 0 with S⊗1 - U ⪰ 0 holds exactly when S⊗1 - U = Q Z Q† for
  // an orthonormal basis Q of the kernel of P and some Z ⪰ 0.
  const auto es = hermitian_eig(ks.projector);
  std::vector<int> kernel;
  for (int i = 0; i < n; ++i) {
    if (es.values(i) < 0.5) kernel.push_back(i);
  }
  CMatrix q(n, static_cast<int>(kernel.size()));
  for (std::size_t i = 0; i < kernel.size(); ++i) q.col(i) = es.vectors.col(kernel[i]);

  Model m;
  const auto sv = m.hermitian(s.dA, "S");
  Expr u = m(sv).kron_identity_right(s.dB);
  std::optional<lmi::Variable> z;
  if (!kernel.empty()) {
    z = m.hermitian(static_cast<int>(kernel.size()), "Z");
    m.psd(m(*z), "Z >= 0");
    u = u - m(*z).sandwich(q, q.adjoint());
  }
  m.psd(u, "U >= 0");
  m.equal(u.partial_trace(s, Subsystem::A), identity(s.dB), "tr_A U");
  m.maximize(m(sv).trace());
  const auto c = m.compile();
  UpsilonResult res;
  const auto ms = run(c, st, "upsilon", res.info);
  res.upsilon = ms.value;
  res.s = c.value(sv, ms.y_full);
  res.u = kron(res.s, identity(s.dB));
  if (z) res.u -= q * c.value(*z, ms.y_full) * q.adjoint();
  res.kappa_ns = std::sqrt(std::max(0.0, res.upsilon));
  return res;
}

GammaResult gamma(const QuantumChannel& ch, Side side, const sdp::SolverSettings& st) {
  return gamma(choi(ch), side, st);
}

GammaResult gamma(const ChoiMatrix& j, Side side, const sdp::SolverSettings& st) {
  const BipartiteShape s = j.shape;
  const int n = s.side();
  GammaResult res;
  if (side != Side::Dual) {
    Model m;
    const auto r = m.hermitian(n, "R");
    const auto rho = m.hermitian(s.dA, "rho");
    const Expr r1 = m(rho).kron_identity_right(s.dB);
    const Expr rt = m(r).partial_transpose(s, Subsystem::B);
    m.psd(m(r), "R >= 0");
    m.psd(r1 - rt, "upper PPT");
    m.psd(r1 + rt, "lower PPT");
    m.equal(m(rho).trace(), 1.0, "tr rho");
    m.maximize(m(r).inner(j.matrix));
    const auto c = m.compile();
    const auto ms = run(c, st, "gamma primal", res.info);
    res.gamma = ms.value;
    res.r = c.value(r, ms.y_full);
    res.rho = c.value(rho, ms.y_full);
  }
  if (side != Side::Primal) {
    Model m;
    const auto mu = m.scalar("mu");
    const auto y = m.hermitian(n, "Y");
    const auto v = m.hermitian(n, "V");
    m.psd(m(y), "Y >= 0");
    m.psd(m(v), "V >= 0");
    m.psd((m(v) - m(y)).partial_transpose(s, Subsystem::B) - Expr::constant(j.matrix), "(V - Y)^TB >= J");
    m.psd(m(mu).kron_identity_right(s.dA) - (m(v) + m(y)).partial_trace(s, Subsystem::B), "tr_B(V + Y) <= mu");
    m.minimize(m(mu));
    const auto c = m.compile();
    SolveInfo info;
    const auto ms = run(c, st, "gamma dual", info);
    if (side == Side::Dual) {
      res.gamma = ms.value;
      res.info = info;
    }
    res.dual_mu = ms.value;
    res.dual_y = c.value(y, ms.y_full);
    res.dual_v = c.value(v, ms.y_full);
  }
  res.q_gamma = std::log2(res.gamma);
  return res;
}

CbNormResult cb_norm_pt(const QuantumChannel& ch, const sdp::SolverSettings& st) {
  const auto j = choi(ch);
  const BipartiteShape s = j.shape;
  const int n = s.side();
  const CMatrix jt = partial_transpose(j.matrix, s, Subsystem::B);
  Model m;
  const auto rho0 = m.hermitian(s.dA, "rho0");
  const auto rho1 = m.hermitian(s.dA, "rho1");
  const auto x = m.general(n, n, "X");
  m.psd(Expr::block2x2(m(rho0).kron_identity_right(s.dB), m(x), m(rho1).kron_identity_right(s.dB)),
        "[[rho0 x 1, X], [X^dag, rho1 x 1]] >= 0");
  m.equal(m(rho0).trace(), 1.0, "tr rho0");
  m.equal(m(rho1).trace(), 1.0, "tr rho1");
  // the compiled objective keeps the real part: Re tr(J^TB X)
  m.maximize(m(x).inner(jt));
  const auto c = m.compile();
  CbNormResult res;
  const auto ms = run(c, st, "cb norm", res.info);
  res.value = ms.value;
  res.q_theta = std::log2(res.value);
  res.x = c.value(x, ms.y_full);
  res.rho0 = c.value(rho0, ms.y_full);
  res.rho1 = c.value(rho1, ms.y_full);
  return res;
}

double deviation_tensor_identity(const KrausSupport& ks, int d, double k, const sdp::SolverSettings& st) {
  require_k(k);
  if (d < 2) throw std::invalid_argument("deviation_tensor_identity: d must be at least 2");
  // Invariance under U ⊗ Ū on the I_d factor lets us take
  //   W = W_a ⊗ 1 + W_b ⊗ Φ_d,  ρ = ρ_A ⊗ 1/d.
  // With Φ̂ = Φ_d/d and the swap F = Π_sym - Π_anti, every constraint splits
  // into blocks over Φ̂, 1 - Φ̂, Π_sym and Π_anti.
  const BipartiteShape s = ks.shape;
  Model m;
  const auto wa = m.hermitian(s.side(), "W_a");
  const auto wb = m.hermitian(s.side(), "W_b");
  const auto rho = m.hermitian(s.dA, "rho");
  const double dd = d;
  const Expr r1 = m(rho).kron_identity_right(s.dB) * (1.0 / dd);
  const Expr on_phi = m(wa) + m(wb) * dd;
  m.psd(m(wa), "W on 1 - phi");
  m.psd(on_phi, "W on phi");
  m.psd(r1 - m(wa), "rho x 1 - W on 1 - phi");
  m.psd(r1 - on_phi, "rho x 1 - W on phi");
  const Expr sym = (m(wa) + m(wb)).partial_transpose(s, Subsystem::B);
  const Expr anti = (m(wa) - m(wb)).partial_transpose(s, Subsystem::B);
  m.psd(r1 * (1.0 / k) - sym, "upper PPT sym");
  m.psd(r1 * (1.0 / k) + sym, "lower PPT sym");
  m.psd(r1 * (1.0 / k) - anti, "upper PPT anti");
  m.psd(r1 * (1.0 / k) + anti, "lower PPT anti");
  m.equal(m(rho).trace(), 1.0, "tr rho");
  m.maximize(on_phi.inner(ks.projector) - r1.inner(ks.projector));
  return run(m.compile(), st, "deviation of N x I_d").value;
}

KappaResult kappa_tensor_identity(const QuantumChannel& ch, int d, const KappaSettings& st) {
  const auto ks = kraus_support(ch);
  auto pred = [&](double k) { return deviation_tensor_identity(ks, d, k, st.solver) >= -st.eps_d; };
  // Γ is multiplicative and Γ(I_d) = d
  const double hi = d * gamma(ch, Side::Primal, st.solver).gamma + 1.0;
  return bisect_kappa(pred, hi, hi, false, CodeClass::PPTp, st.tol_k);
}

double kappa_activated(const QuantumChannel& ch, int d_max, const KappaSettings& st) {
  if (d_max < 2) throw std::invalid_argument("kappa_activated: d_max must be at least 2");
  if (ch.dim_in() * d_max > 12) {
    throw std::invalid_argument("kappa_activated: dim_in * d_max must not exceed 12");
  }
  double best = 0.0;
  for (int d = 2; d <= d_max; ++d) {
    const auto r = kappa_tensor_identity(ch, d, st);
    best = std::max(best, static_cast<double>(r.one_shot) / d);
  }
  return best;
}

double superactivation_bound(const QuantumChannel& a, const QuantumChannel& b, const sdp::SolverSettings& st) {
  return gamma(a, Side::Primal, st).q_gamma + gamma(b, Side::Primal, st).q_gamma;
}

Lemma1Values lemma1_check(const QuantumChannel& n1, const QuantumChannel& n2, double k,
                          const sdp::SolverSettings& st) {
  // Γ ≥ 1 for every channel; the clamp removes solver noise below 1
  const double g2 = std::max(1.0, gamma(n2, Side::Primal, st).gamma);
  Lemma1Values v;
  v.rhs = fidelity(n1, k, CodeClass::PPTp, Side::Primal, st).value;
  const double f2 = fidelity(n2, g2, CodeClass::PPTp, Side::Primal, st).value;
  v.lhs = v.rhs * f2;
  v.mid = fidelity(tensor_channels(n1, n2), k * g2, CodeClass::PPTp, Side::Primal, st).value;
  return v;
}

}  // namespace qcap
