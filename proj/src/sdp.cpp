#include "qcap/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <iostream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace qcap::sdp {

void SparseSymmetric::add(int block, int r, int c, double v) {
  if (v == 0.0) return;
  if (r > c) std::swap(r, c);
  entries.push_back({block, r, c, v});
}

void SparseSymmetric::compress() {
  std::sort(entries.begin(), entries.end(), [](const Entry& x, const Entry& y) {
    return std::tie(x.block, x.row, x.col) < std::tie(y.block, y.row, y.col);
  });
  std::vector<Entry> out;
  out.reserve(entries.size());
  for (const auto& e : entries) {
    if (!out.empty() && out.back().block == e.block && out.back().row == e.row &&
        out.back().col == e.col) {
      out.back().value += e.value;
    } else {
      out.push_back(e);
    }
  }
  std::erase_if(out, [](const Entry& e) { return e.value == 0.0; });
  entries = std::move(out);
}

void SdpProblem::validate() const {
  if (blocks.empty()) throw std::invalid_argument("SdpProblem: no blocks declared");
  for (int n : blocks) {
    if (n < 1) throw std::invalid_argument("SdpProblem: block sizes must be positive");
  }
  if (static_cast<Eigen::Index>(a.size()) != b.size()) {
    throw std::invalid_argument("SdpProblem: number of constraint matrices and b differ");
  }
  if (!names.empty() && names.size() != a.size()) {
    throw std::invalid_argument("SdpProblem: names must be empty or one per constraint");
  }
  auto check = [&](const SparseSymmetric& m, const char* what) {
    for (const auto& e : m.entries) {
      if (e.block < 0 || e.block >= static_cast<int>(blocks.size()) || e.row < 0 || e.col < 0 ||
          e.row >= blocks[e.block] || e.col >= blocks[e.block]) {
        std::ostringstream os;
        os << "SdpProblem: " << what << " entry (" << e.block << ", " << e.row << ", " << e.col
           << ") outside the block structure";
        throw std::invalid_argument(os.str());
      }
      if (!std::isfinite(e.value)) throw std::invalid_argument("SdpProblem: non-finite entry");
    }
  };
  check(c, "objective");
  for (const auto& ai : a) check(ai, "constraint");
}

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal:
      return "optimal";
    case SolveStatus::MaxIter:
      return "max-iter";
    case SolveStatus::NumericalFailure:
      return "numerical-failure";
    case SolveStatus::Infeasible:
      return "infeasible";
  }
  return "unknown";
}

double inner(const SparseSymmetric& m, const BlockMatrix& x) {
  double s = 0.0;
  for (const auto& e : m.entries) {
    const double w = e.row == e.col ? 1.0 : 2.0;
    s += w * e.value * x[e.block](e.row, e.col);
  }
  return s;
}

BlockMatrix to_dense(const SparseSymmetric& m, const std::vector<int>& blocks) {
  BlockMatrix out;
  out.reserve(blocks.size());
  for (int n : blocks) out.push_back(RMatrix::Zero(n, n));
  for (const auto& e : m.entries) {
    out[e.block](e.row, e.col) += e.value;
    if (e.row != e.col) out[e.block](e.col, e.row) += e.value;
  }
  return out;
}

namespace {

// in-place symmetrization; the temporary avoids reading m while it is written
void symmetrize(RMatrix& m) {
  RMatrix t = 0.5 * (m + m.transpose());
  m = std::move(t);
}

double dot(const BlockMatrix& x, const BlockMatrix& y) {
  double s = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) s += x[k].cwiseProduct(y[k]).sum();
  return s;
}

double max_abs(const BlockMatrix& x) {
  double m = 0.0;
  for (const auto& b : x) m = std::max(m, b.cwiseAbs().maxCoeff());
  return m;
}

struct FullEntry {
  int row;
  int col;
  double value;
};

// Constraint matrix restricted to one block, both triangle halves listed.
struct BlockUse {
  int constraint;
  std::vector<FullEntry> entries;
};

struct Pattern {
  std::vector<std::vector<BlockUse>> uses;  // per block
  int m = 0;
};

Pattern make_pattern(const SdpProblem& p, const std::vector<int>& active) {
  Pattern pat;
  pat.m = static_cast<int>(active.size());
  pat.uses.resize(p.blocks.size());
  for (int i = 0; i < pat.m; ++i) {
    std::vector<std::vector<FullEntry>> per_block(p.blocks.size());
    for (const auto& e : p.a[active[i]].entries) {
      per_block[e.block].push_back({e.row, e.col, e.value});
      if (e.row != e.col) per_block[e.block].push_back({e.col, e.row, e.value});
    }
    for (std::size_t k = 0; k < per_block.size(); ++k) {
      if (!per_block[k].empty()) pat.uses[k].push_back({i, std::move(per_block[k])});
    }
  }
  return pat;
}

RVector apply_a(const Pattern& pat, const BlockMatrix& x) {
  RVector out = RVector::Zero(pat.m);
  for (std::size_t k = 0; k < pat.uses.size(); ++k) {
    for (const auto& u : pat.uses[k]) {
      double s = 0.0;
      for (const auto& e : u.entries) s += e.value * x[k](e.row, e.col);
      out(u.constraint) += s;
    }
  }
  return out;
}

BlockMatrix apply_at(const Pattern& pat, const std::vector<int>& blocks, const RVector& y) {
  BlockMatrix out;
  for (int n : blocks) out.push_back(RMatrix::Zero(n, n));
  for (std::size_t k = 0; k < pat.uses.size(); ++k) {
    for (const auto& u : pat.uses[k]) {
      const double yi = y(u.constraint);
      if (yi == 0.0) continue;
      for (const auto& e : u.entries) out[k](e.row, e.col) += yi * e.value;
    }
  }
  return out;
}

// Gram matrix ⟨A_i, A_j⟩ built from shared sparse entries.
RMatrix gram(const SdpProblem& p) {
  const int m = p.num_constraints();
  std::unordered_map<std::uint64_t, std::vector<std::pair<int, double>>> by_entry;
  for (int i = 0; i < m; ++i) {
    for (const auto& e : p.a[i].entries) {
      const std::uint64_t key = (std::uint64_t(e.block) << 42) | (std::uint64_t(e.row) << 21) |
                                std::uint64_t(e.col);
      by_entry[key].push_back({i, e.value});
    }
  }
  RMatrix g = RMatrix::Zero(m, m);
  for (const auto& [key, list] : by_entry) {
    const bool diag = ((key >> 21) & ((1u << 21) - 1)) == (key & ((1u << 21) - 1));
    const double w = diag ? 1.0 : 2.0;
    for (const auto& [i, vi] : list) {
      for (const auto& [j, vj] : list) g(i, j) += w * vi * vj;
    }
  }
  return g;
}

// Returns indices of a maximal independent subset of constraints; the rest are
// appended to `dropped`.
std::vector<int> independent_rows(const SdpProblem& p, std::vector<int>& dropped) {
  const int m = p.num_constraints();
  std::vector<int> all(m);
  for (int i = 0; i < m; ++i) all[i] = i;
  if (m == 0) return all;
  const RMatrix g = gram(p);
  const double scale = g.diagonal().maxCoeff();
  if (scale <= 0.0) {
    dropped = all;
    return {};
  }
  const double tol = 1e-11 * scale;

  Eigen::LLT<RMatrix> llt(g);
  if (llt.info() == Eigen::Success) {
    const RVector piv = llt.matrixLLT().diagonal();
    if (piv.cwiseAbs2().minCoeff() > tol) return all;
  }

  // pivoted Cholesky
  RMatrix a = g;
  std::vector<int> perm = all;
  int rank = 0;
  for (int k = 0; k < m; ++k) {
    Eigen::Index q;
    a.diagonal().tail(m - k).maxCoeff(&q);
    q += k;
    if (a(q, q) <= tol) break;
    if (q != k) {
      a.row(k).swap(a.row(q));
      a.col(k).swap(a.col(q));
      std::swap(perm[k], perm[q]);
    }
    const double piv = std::sqrt(a(k, k));
    a(k, k) = piv;
    const int rest = m - k - 1;
    if (rest > 0) {
      a.col(k).tail(rest) /= piv;
      a.bottomRightCorner(rest, rest).selfadjointView<Eigen::Lower>().rankUpdate(
          a.col(k).tail(rest), -1.0);
      // keep the full symmetric trailing block for the next pivot search
      a.bottomRightCorner(rest, rest).triangularView<Eigen::StrictlyUpper>() =
          a.bottomRightCorner(rest, rest).transpose();
    }
    ++rank;
  }
  std::vector<int> keep(perm.begin(), perm.begin() + rank);
  std::sort(keep.begin(), keep.end());
  dropped.assign(perm.begin() + rank, perm.end());
  std::sort(dropped.begin(), dropped.end());
  return keep;
}

// Checks b_r against the combination expressing A_r in the kept rows.
bool dropped_consistent(const SdpProblem& p, const std::vector<int>& keep,
                        const std::vector<int>& dropped) {
  if (dropped.empty()) return true;
  const RMatrix g = gram(p);
  const int k = static_cast<int>(keep.size());
  RMatrix gk(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) gk(i, j) = g(keep[i], keep[j]);
  RVector bk(k);
  for (int i = 0; i < k; ++i) bk(i) = p.b(keep[i]);
  Eigen::LDLT<RMatrix> ldlt(gk);
  const double bscale = 1.0 + p.b.cwiseAbs().maxCoeff();
  for (int r : dropped) {
    RVector rhs(k);
    for (int i = 0; i < k; ++i) rhs(i) = g(keep[i], r);
    const RVector coef = k ? RVector(ldlt.solve(rhs)) : RVector();
    const double predicted = k ? coef.dot(bk) : 0.0;
    if (std::abs(predicted - p.b(r)) > 1e-8 * bscale) return false;
  }
  return true;
}

// Smallest α ≥ 0 making x + α dx singular, given chol(x) = l lᵀ.
double max_step(const RMatrix& l, const RMatrix& dx) {
  const auto tri = l.triangularView<Eigen::Lower>();
  RMatrix t = tri.solve(dx);
  t = tri.solve(t.transpose()).eval();
  symmetrize(t);
  Eigen::SelfAdjointEigenSolver<RMatrix> es(t, Eigen::EigenvaluesOnly);
  const double e = es.eigenvalues()(0);
  return e >= 0.0 ? std::numeric_limits<double>::infinity() : -1.0 / e;
}

struct Scaling {
  RMatrix l;    // chol(X)
  RMatrix q;    // eigenvectors of lᵀ S l
  RMatrix g;    // W = g gᵀ, gᵀ S g = diag(lam) = g⁻¹ X g⁻ᵀ
  RVector lam;
  RMatrix w;
  RMatrix s_inv;
  RMatrix ls;   // chol(S)
};

bool nt_scaling(const RMatrix& x, const RMatrix& s, Scaling& out) {
  Eigen::LLT<RMatrix> lx(x);
  Eigen::LLT<RMatrix> ls(s);
  if (lx.info() != Eigen::Success || ls.info() != Eigen::Success) return false;
  out.l = lx.matrixL();
  out.ls = ls.matrixL();
  RMatrix t = out.l.transpose() * s * out.l;
  symmetrize(t);
  Eigen::SelfAdjointEigenSolver<RMatrix> es(t);
  RVector omega = es.eigenvalues().cwiseMax(std::numeric_limits<double>::min());
  out.lam = omega.cwiseSqrt();
  out.q = es.eigenvectors();
  out.g = out.l * out.q * out.lam.cwiseSqrt().cwiseInverse().asDiagonal();
  out.w = out.g * out.g.transpose();
  out.s_inv = out.g * out.lam.cwiseInverse().asDiagonal() * out.g.transpose();
  return true;
}

struct Direction {
  RVector dy;
  BlockMatrix dx;
  BlockMatrix ds;
  double err = 0.0;  // max |A(ΔX) - rp|
};

// M_ij = ⟨A_i, W A_j W⟩
void form_schur(const Pattern& pat, const std::vector<int>& sizes, const std::vector<Scaling>& sc,
                RMatrix& schur) {
  schur.setZero();
  for (std::size_t k = 0; k < sizes.size(); ++k) {
    const auto& uses = pat.uses[k];
    const RMatrix& w = sc[k].w;
    const int n = sizes[k];
    RMatrix pj(n, n);
    for (std::size_t jj = 0; jj < uses.size(); ++jj) {
      pj.setZero();
      for (const auto& e : uses[jj].entries) pj.noalias() += e.value * w.col(e.row) * w.row(e.col);
      const int j = uses[jj].constraint;
      for (std::size_t ii = 0; ii <= jj; ++ii) {
        double v = 0.0;
        for (const auto& e : uses[ii].entries) v += e.value * pj(e.col, e.row);
        schur(uses[ii].constraint, j) += v;
      }
    }
  }
  // one triangle per block is filled and constraint order is the same in
  // every block, so the upper triangle holds everything
  schur.triangularView<Eigen::StrictlyLower>() = schur.transpose();
}

bool rows_cover(const std::vector<int>& sizes, int m) {
  long rows = 0;
  for (int n : sizes) rows += static_cast<long>(n) * (n + 1) / 2;
  return rows >= m;
}

// R with M = RᵀR, from a QR factorization of B whose columns are svec(Gᵀ A_i G).
// Forming M squares its condition number; near a degenerate optimum that loses
// the small eigenvalues entirely, while R keeps them.
RMatrix scaled_r_factor(const Pattern& pat, const std::vector<int>& sizes, const std::vector<Scaling>& sc) {
  int rows = 0;
  for (int n : sizes) rows += n * (n + 1) / 2;
  const int m = pat.m;
  RMatrix b = RMatrix::Zero(std::max(rows, m), m);
  const double r2 = std::sqrt(2.0);
  int offset = 0;
  for (std::size_t k = 0; k < sizes.size(); ++k) {
    const int n = sizes[k];
    const RMatrix& g = sc[k].g;
    RMatrix t(n, n);
    for (const auto& u : pat.uses[k]) {
      t.setZero();
      for (const auto& e : u.entries) t.noalias() += e.value * g.row(e.row).transpose() * g.row(e.col);
      int idx = offset;
      for (int j = 0; j < n; ++j) {
        b(idx++, u.constraint) = t(j, j);
        for (int i = j + 1; i < n; ++i) b(idx++, u.constraint) = r2 * t(i, j);
      }
    }
    offset += n * (n + 1) / 2;
  }
  Eigen::HouseholderQR<RMatrix> qr(b);
  RMatrix r = qr.matrixQR().topRows(m).triangularView<Eigen::Upper>();
  const double floor = 1e-14 * std::max(r.diagonal().cwiseAbs().maxCoeff(), 1e-300);
  for (int i = 0; i < m; ++i) {
    if (std::abs(r(i, i)) < floor) r(i, i) = r(i, i) < 0 ? -floor : floor;
  }
  return r;
}

}  // namespace

Residuals residuals(const SdpProblem& p, const SdpSolution& sol) {
  Residuals r;
  double pmax = 0.0;
  for (int i = 0; i < p.num_constraints(); ++i) {
    pmax = std::max(pmax, std::abs(inner(p.a[i], sol.x) - p.b(i)));
  }
  r.primal = pmax;
  BlockMatrix rd = to_dense(p.c, p.blocks);
  for (int i = 0; i < p.num_constraints(); ++i) {
    const double yi = sol.y(i);
    for (const auto& e : p.a[i].entries) {
      rd[e.block](e.row, e.col) -= yi * e.value;
      if (e.row != e.col) rd[e.block](e.col, e.row) -= yi * e.value;
    }
  }
  for (std::size_t k = 0; k < rd.size(); ++k) rd[k] -= sol.s[k];
  r.dual = max_abs(rd);
  const double pobj = inner(p.c, sol.x);
  const double dobj = p.b.dot(sol.y);
  r.gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj));
  return r;
}

SdpSolution solve(const SdpProblem& p, const SolverSettings& st) {
  p.validate();
  if (p.num_constraints() == 0) throw std::invalid_argument("solve: at least one constraint required");
  if (!(st.step_fraction > 0.0 && st.step_fraction < 1.0) || st.tol_gap <= 0.0 ||
      st.tol_feas <= 0.0 || st.max_iter <= 0) {
    throw std::invalid_argument("solve: invalid solver settings");
  }

  SdpSolution sol;
  const int nb = static_cast<int>(p.blocks.size());
  const std::vector<int>& sizes = p.blocks;
  int total_dim = 0;
  for (int n : sizes) total_dim += n;

  std::vector<int> dropped;
  const std::vector<int> active = independent_rows(p, dropped);
  sol.dropped = dropped;
  if (!dropped.empty()) {
    if (st.verbose) {
      std::cerr << "sdp: dropping " << dropped.size() << " linearly dependent constraint(s)\n";
    }
    if (!dropped_consistent(p, active, dropped)) {
      sol.status = SolveStatus::Infeasible;
      sol.message = "inconsistent linearly dependent equality constraints";
      sol.y = RVector::Zero(p.num_constraints());
      for (int n : sizes) {
        sol.x.push_back(RMatrix::Zero(n, n));
        sol.s.push_back(RMatrix::Zero(n, n));
      }
      sol.residuals = residuals(p, sol);
      return sol;
    }
  }
  const Pattern pat = make_pattern(p, active);
  const int m = pat.m;
  RVector b(m);
  for (int i = 0; i < m; ++i) b(i) = p.b(active[i]);
  const BlockMatrix c = to_dense(p.c, sizes);

  double cmax = 0.0;
  for (const auto& e : p.c.entries) cmax = std::max(cmax, std::abs(e.value));
  const double tau = 1.0 + std::max(b.cwiseAbs().maxCoeff(), cmax);

  BlockMatrix x, s;
  for (int n : sizes) {
    x.push_back(tau * RMatrix::Identity(n, n));
    s.push_back(tau * RMatrix::Identity(n, n));
  }
  RVector y = RVector::Zero(m);

  auto expand = [&](const RVector& yr) {
    RVector full = RVector::Zero(p.num_constraints());
    for (int i = 0; i < m; ++i) full(active[i]) = yr(i);
    return full;
  };

  struct Best {
    double score = std::numeric_limits<double>::infinity();
    BlockMatrix x, s;
    RVector y;
    int iter = 0;
  } best;

  std::vector<Scaling> sc(nb);
  RMatrix schur(m, m);
  RMatrix rfac;
  bool use_qr = false;
  const double gamma = st.step_fraction;
  SolveStatus status = SolveStatus::MaxIter;
  int iter = 0;

  for (;; ++iter) {
    const RVector rp = b - apply_a(pat, x);
    BlockMatrix rd = apply_at(pat, sizes, y);
    for (int k = 0; k < nb; ++k) rd[k] = c[k] - s[k] - rd[k];
    const double pobj = dot(c, x);
    const double dobj = b.dot(y);
    const double xs = dot(x, s);
    const double mu = xs / total_dim;
    const double pres = rp.size() ? rp.cwiseAbs().maxCoeff() : 0.0;
    const double dres = max_abs(rd);
    const double rel_gap = std::max(std::abs(pobj - dobj), std::abs(xs)) / (1.0 + std::abs(pobj));

    const double score = std::max({pres / st.tol_feas, dres / st.tol_feas, rel_gap / st.tol_gap});
    if (score < best.score) best = {score, x, s, y, iter};

    if (st.on_iterate) st.on_iterate({iter, pobj, dobj, pres, dres, mu});
    if (st.verbose) {
      std::cerr << std::scientific << std::setprecision(3) << "sdp it " << std::setw(3) << iter
                << " pobj " << pobj << " dobj " << dobj << " pres " << pres << " dres " << dres
                << " gap " << rel_gap << '\n';
    }
    if (pres <= st.tol_feas && dres <= st.tol_feas && rel_gap <= st.tol_gap) {
      status = SolveStatus::Optimal;
      break;
    }
    // divergence along an improving ray certifies infeasibility of the other side
    const double big = 1e10 * tau;
    if ((dobj > big && dres <= 1e-6 * (1.0 + max_abs(c))) || (pobj < -big && pres <= 1e-6 * tau)) {
      status = SolveStatus::Infeasible;
      sol.message = dobj > big ? "primal infeasible (dual unbounded)" : "dual infeasible (primal unbounded)";
      break;
    }
    if (iter >= st.max_iter) {
      status = SolveStatus::MaxIter;
      break;
    }

    bool ok = true;
    for (int k = 0; k < nb && ok; ++k) ok = nt_scaling(x[k], s[k], sc[k]);
    if (!ok) {
      status = SolveStatus::NumericalFailure;
      sol.message = "lost positive definiteness of an iterate";
      break;
    }

    Eigen::LLT<RMatrix> chol;
    if (!use_qr) {
      form_schur(pat, sizes, sc, schur);
      const double dscale = std::max(schur.diagonal().cwiseAbs().maxCoeff(), 1e-300);
      bool factored = false;
      for (double reg = 1e-12; reg <= 1e-6 * 1.0001; reg *= 10.0) {
        RMatrix mreg = schur;
        mreg.diagonal().array() += reg * dscale;
        chol.compute(mreg);
        if (chol.info() == Eigen::Success) {
          factored = true;
          break;
        }
      }
      if (!factored) {
        status = SolveStatus::NumericalFailure;
        sol.message = "Schur complement factorization failed";
        break;
      }
    } else {
      rfac = scaled_r_factor(pat, sizes, sc);
    }
    auto solve_m = [&](const RVector& r) -> RVector {
      if (!use_qr) return chol.solve(r);
      const RVector z = rfac.transpose().triangularView<Eigen::Lower>().solve(r);
      return rfac.triangularView<Eigen::Upper>().solve(z);
    };

    // W Rd W is shared by predictor and corrector
    BlockMatrix wrdw(nb);
    for (int k = 0; k < nb; ++k) wrdw[k] = sc[k].w * rd[k] * sc[k].w;
    const RVector a_wrdw = apply_a(pat, wrdw);

    auto direction = [&](const BlockMatrix& rc) {
      Direction d;
      const RVector rhs = rp - apply_a(pat, rc) + a_wrdw;
      d.dy = solve_m(rhs);
      // refinement against the unregularized matrix
      for (int r = 0; r < 3 && !use_qr; ++r) {
        const RVector res = rhs - schur * d.dy;
        if (res.cwiseAbs().maxCoeff() <= 1e-15 * (1.0 + rhs.cwiseAbs().maxCoeff())) break;
        d.dy += chol.solve(res);
      }
      d.ds = apply_at(pat, sizes, d.dy);
      d.dx.resize(nb);
      for (int k = 0; k < nb; ++k) {
        d.ds[k] = rd[k] - d.ds[k];
        d.dx[k] = rc[k] - sc[k].w * d.ds[k] * sc[k].w;
        symmetrize(d.dx[k]);
      }
      // refinement of the full Newton system: measure A(ΔX) - rp through the
      // same operator path that produced ΔX and correct along (δy, -A*δy, W A*δy W)
      for (int r = 0;; ++r) {
        const RVector e = rp - apply_a(pat, d.dx);
        d.err = e.size() ? e.cwiseAbs().maxCoeff() : 0.0;
        if (r == 2 || d.err <= 1e-3 * st.tol_feas) break;
        const RVector dy = solve_m(e);
        const BlockMatrix at = apply_at(pat, sizes, dy);
        d.dy += dy;
        for (int k = 0; k < nb; ++k) {
          d.ds[k] -= at[k];
          RMatrix corr = sc[k].w * at[k] * sc[k].w;
          d.dx[k] += 0.5 * (corr + corr.transpose());
        }
      }
      return d;
    };
    auto step_lengths = [&](const Direction& d, double& ap, double& ad) {
      double sx = std::numeric_limits<double>::infinity();
      double ss = std::numeric_limits<double>::infinity();
      for (int k = 0; k < nb; ++k) {
        sx = std::min(sx, max_step(sc[k].l, d.dx[k]));
        ss = std::min(ss, max_step(sc[k].ls, d.ds[k]));
      }
      ap = std::min(1.0, gamma * sx);
      ad = std::min(1.0, gamma * ss);
    };

    // predictor
    BlockMatrix rc(nb);
    for (int k = 0; k < nb; ++k) rc[k] = -x[k];
    auto accurate = [&](const BlockMatrix& rcv) {
      Direction d = direction(rcv);
      if (!use_qr && d.err > 0.1 * st.tol_feas && rows_cover(sizes, m)) {
        use_qr = true;
        rfac = scaled_r_factor(pat, sizes, sc);
        d = direction(rcv);
      }
      return d;
    };
    const Direction pred = accurate(rc);
    double ap = 0.0, ad = 0.0;
    step_lengths(pred, ap, ad);
    double mu_aff = 0.0;
    for (int k = 0; k < nb; ++k) {
      mu_aff += (x[k] + ap * pred.dx[k]).cwiseProduct(s[k] + ad * pred.ds[k]).sum();
    }
    mu_aff /= total_dim;
    const double expon = std::max(1.0, 3.0 * std::min(ap, ad) * std::min(ap, ad));
    const double sigma = std::clamp(std::pow(std::max(mu_aff, 0.0) / mu, expon), 0.0, 1.0);

    // corrector with the second-order term in NT-scaled coordinates
    for (int k = 0; k < nb; ++k) {
      const auto& z = sc[k];
      const RVector sq = z.lam.cwiseSqrt();
      const auto tri = z.l.triangularView<Eigen::Lower>();
      RMatrix xt = tri.solve(pred.dx[k]);
      xt = tri.solve(xt.transpose()).eval();
      // g⁻¹ = Λ^{1/2} Qᵀ L⁻¹
      xt = sq.asDiagonal() * (z.q.transpose() * xt * z.q) * sq.asDiagonal();
      const RMatrix dst = z.g.transpose() * pred.ds[k] * z.g;
      RMatrix h = xt * dst + dst * xt;
      const int n = sizes[k];
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) h(i, j) /= (z.lam(i) + z.lam(j));
      rc[k] = sigma * mu * z.s_inv - x[k] - z.g * h * z.g.transpose();
      symmetrize(rc[k]);
    }
    Direction corr = accurate(rc);
    step_lengths(corr, ap, ad);
    if (std::min(ap, ad) < 0.3) {
      // the second-order term can wreck the step once centrality is poor;
      // fall back to a plain, more strongly centred Newton step
      const double sig = std::max(sigma, 0.3);
      for (int k = 0; k < nb; ++k) rc[k] = sig * mu * sc[k].s_inv - x[k];
      Direction alt = accurate(rc);
      double ap2 = 0.0, ad2 = 0.0;
      step_lengths(alt, ap2, ad2);
      if (std::min(ap2, ad2) > std::min(ap, ad)) {
        corr = std::move(alt);
        ap = ap2;
        ad = ad2;
      }
    }
    // the eigenvalue-based step can still land on a numerically singular
    // iterate near the optimum; back off until a Cholesky succeeds
    auto stays_pd = [&](const BlockMatrix& base, const BlockMatrix& dir, double a) {
      for (int k = 0; k < nb; ++k) {
        RMatrix t = base[k] + a * dir[k];
        Eigen::LLT<RMatrix> f(0.5 * (t + t.transpose()));
        if (f.info() != Eigen::Success) return false;
      }
      return true;
    };
    for (int t = 0; t < 30 && !stays_pd(x, corr.dx, ap); ++t) ap *= 0.8;
    for (int t = 0; t < 30 && !stays_pd(s, corr.ds, ad); ++t) ad *= 0.8;
    for (int k = 0; k < nb; ++k) {
      x[k] += ap * corr.dx[k];
      s[k] += ad * corr.ds[k];
      symmetrize(x[k]);
      symmetrize(s[k]);
    }
    y += ad * corr.dy;
  }

  if (status == SolveStatus::MaxIter || status == SolveStatus::NumericalFailure) {
    x = best.x;
    s = best.s;
    y = best.y;
  }
  sol.status = status;
  sol.iterations = iter;
  sol.x = std::move(x);
  sol.s = std::move(s);
  sol.y = expand(y);
  sol.primal_value = inner(p.c, sol.x);
  sol.dual_value = p.b.dot(sol.y);
  sol.residuals = residuals(p, sol);
  return sol;
}

void write_sdpa(const SdpProblem& p, std::ostream& os) {
  os << "\"qcap problem: max b.y s.t. C - sum y_i A_i >= 0, written as SDPA with F0=-C, Fi=-Ai, c=-b\"\n";
  os << p.num_constraints() << " = mDIM\n" << p.blocks.size() << " = nBLOCK\n";
  for (std::size_t k = 0; k < p.blocks.size(); ++k) os << (k ? " " : "") << p.blocks[k];
  os << " = bLOCKsTRUCT\n";
  os << std::setprecision(17);
  for (int i = 0; i < p.num_constraints(); ++i) os << (i ? " " : "") << -p.b(i);
  os << '\n';
  auto dump = [&](int mat, const SparseSymmetric& s) {
    for (const auto& e : s.entries) {
      os << mat << ' ' << e.block + 1 << ' ' << e.row + 1 << ' ' << e.col + 1 << ' ' << -e.value << '\n';
    }
  };
  dump(0, p.c);
  for (int i = 0; i < p.num_constraints(); ++i) dump(i + 1, p.a[i]);
}

}  // namespace qcap::sdp
