#include "qcap/lmi.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace qcap::lmi {

SparseCMatrix SparseCMatrix::from_dense(const CMatrix& m, double drop) {
  SparseCMatrix s{static_cast<int>(m.rows()), static_cast<int>(m.cols()), {}};
  for (int c = 0; c < m.cols(); ++c) {
    for (int r = 0; r < m.rows(); ++r) {
      if (std::abs(m(r, c)) > drop) s.entries.push_back({r, c, m(r, c)});
    }
  }
  return s;
}

CMatrix SparseCMatrix::to_dense() const {
  CMatrix m = CMatrix::Zero(rows, cols);
  for (const auto& t : entries) m(t.row, t.col) += t.value;
  return m;
}

namespace {

// Sorts by (row, col) and sums duplicates.
void merge(std::vector<Triplet>& v) {
  std::sort(v.begin(), v.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  std::vector<Triplet> out;
  out.reserve(v.size());
  for (const auto& t : v) {
    if (!out.empty() && out.back().row == t.row && out.back().col == t.col) {
      out.back().value += t.value;
    } else {
      out.push_back(t);
    }
  }
  std::erase_if(out, [](const Triplet& t) { return t.value == Complex(0.0, 0.0); });
  v = std::move(out);
}

SparseCMatrix scaled(SparseCMatrix m, double s) {
  for (auto& t : m.entries) t.value *= s;
  return m;
}

}  // namespace

Expr::Expr(Variable v, int rows, int cols) : rows_(rows), cols_(cols) {
  terms_.push_back({v.id, 1.0, {}});
  constant_ = {rows, cols, {}};
}

Expr Expr::constant(const CMatrix& m) {
  Expr e;
  e.rows_ = static_cast<int>(m.rows());
  e.cols_ = static_cast<int>(m.cols());
  e.constant_ = SparseCMatrix::from_dense(m);
  return e;
}

Expr Expr::zero(int rows, int cols) {
  Expr e;
  e.rows_ = rows;
  e.cols_ = cols;
  e.constant_ = {rows, cols, {}};
  return e;
}

Expr Expr::operator+(const Expr& o) const {
  if (rows_ != o.rows_ || cols_ != o.cols_) {
    std::ostringstream os;
    os << "Expr: adding " << rows_ << "x" << cols_ << " to " << o.rows_ << "x" << o.cols_;
    throw DimensionError(os.str());
  }
  Expr e = *this;
  e.terms_.insert(e.terms_.end(), o.terms_.begin(), o.terms_.end());
  e.constant_.entries.insert(e.constant_.entries.end(), o.constant_.entries.begin(),
                             o.constant_.entries.end());
  return e;
}

Expr Expr::operator-(const Expr& o) const { return *this + o * -1.0; }

Expr Expr::operator*(double s) const {
  Expr e = *this;
  for (auto& t : e.terms_) t.coeff *= s;
  for (auto& t : e.constant_.entries) t.value *= s;
  return e;
}

Expr Expr::map(std::function<SparseCMatrix(const SparseCMatrix&)> f, int rows, int cols) const {
  auto op = std::make_shared<const LinearOp>(LinearOp{std::move(f)});
  Expr e;
  e.rows_ = rows;
  e.cols_ = cols;
  e.terms_ = terms_;
  for (auto& t : e.terms_) t.ops.push_back(op);
  e.constant_ = op->apply(constant_);
  return e;
}

Expr Expr::kron_identity_right(int d) const {
  return map(
      [d](const SparseCMatrix& m) {
        SparseCMatrix o{m.rows * d, m.cols * d, {}};
        o.entries.reserve(m.entries.size() * d);
        for (const auto& t : m.entries) {
          for (int k = 0; k < d; ++k) o.entries.push_back({t.row * d + k, t.col * d + k, t.value});
        }
        return o;
      },
      rows_ * d, cols_ * d);
}

Expr Expr::kron_identity_left(int d) const {
  return map(
      [d](const SparseCMatrix& m) {
        SparseCMatrix o{m.rows * d, m.cols * d, {}};
        for (const auto& t : m.entries) {
          for (int k = 0; k < d; ++k) {
            o.entries.push_back({k * m.rows + t.row, k * m.cols + t.col, t.value});
          }
        }
        return o;
      },
      rows_ * d, cols_ * d);
}

Expr Expr::partial_transpose(BipartiteShape s, Subsystem which) const {
  if (rows_ != s.side() || cols_ != s.side()) throw DimensionError("Expr::partial_transpose: shape mismatch");
  const int dB = s.dB;
  return map(
      [dB, which](const SparseCMatrix& m) {
        SparseCMatrix o{m.rows, m.cols, {}};
        o.entries.reserve(m.entries.size());
        for (const auto& t : m.entries) {
          const int a = t.row / dB, b = t.row % dB, a2 = t.col / dB, b2 = t.col % dB;
          if (which == Subsystem::B) {
            o.entries.push_back({a * dB + b2, a2 * dB + b, t.value});
          } else {
            o.entries.push_back({a2 * dB + b, a * dB + b2, t.value});
          }
        }
        return o;
      },
      rows_, cols_);
}

Expr Expr::partial_trace(BipartiteShape s, Subsystem traced) const {
  if (rows_ != s.side() || cols_ != s.side()) throw DimensionError("Expr::partial_trace: shape mismatch");
  const int dB = s.dB;
  const int out = traced == Subsystem::A ? s.dB : s.dA;
  return map(
      [dB, traced, out](const SparseCMatrix& m) {
        SparseCMatrix o{out, out, {}};
        for (const auto& t : m.entries) {
          const int a = t.row / dB, b = t.row % dB, a2 = t.col / dB, b2 = t.col % dB;
          if (traced == Subsystem::A && a == a2) o.entries.push_back({b, b2, t.value});
          if (traced == Subsystem::B && b == b2) o.entries.push_back({a, a2, t.value});
        }
        return o;
      },
      out, out);
}

Expr Expr::trace() const {
  if (rows_ != cols_) throw DimensionError("Expr::trace: not square");
  return map(
      [](const SparseCMatrix& m) {
        Complex s = 0.0;
        for (const auto& t : m.entries) {
          if (t.row == t.col) s += t.value;
        }
        return SparseCMatrix{1, 1, {{0, 0, s}}};
      },
      1, 1);
}

Expr Expr::inner(const CMatrix& w) const {
  if (w.rows() != cols_ || w.cols() != rows_) throw DimensionError("Expr::inner: shape mismatch");
  return map(
      [w](const SparseCMatrix& m) {
        Complex s = 0.0;
        for (const auto& t : m.entries) s += w(t.col, t.row) * t.value;
        return SparseCMatrix{1, 1, {{0, 0, s}}};
      },
      1, 1);
}

Expr Expr::adjoint() const {
  return map(
      [](const SparseCMatrix& m) {
        SparseCMatrix o{m.cols, m.rows, {}};
        o.entries.reserve(m.entries.size());
        for (const auto& t : m.entries) o.entries.push_back({t.col, t.row, std::conj(t.value)});
        return o;
      },
      cols_, rows_);
}

Expr Expr::sandwich(const CMatrix& left, const CMatrix& right) const {
  if (left.cols() != rows_ || right.rows() != cols_) throw DimensionError("Expr::sandwich: shape mismatch");
  const int r = static_cast<int>(left.rows());
  const int c = static_cast<int>(right.cols());
  return map(
      [left, right](const SparseCMatrix& m) {
        CMatrix out = CMatrix::Zero(left.rows(), right.cols());
        for (const auto& t : m.entries) out += t.value * left.col(t.row) * right.row(t.col);
        return SparseCMatrix::from_dense(out, 1e-15);
      },
      r, c);
}

Expr Expr::block2x2(const Expr& tl, const Expr& tr, const Expr& br) {
  const int n0 = tl.rows_;
  const int n1 = br.rows_;
  if (tl.cols_ != n0 || br.cols_ != n1 || tr.rows_ != n0 || tr.cols_ != n1) {
    throw DimensionError("Expr::block2x2: inconsistent block shapes");
  }
  const int n = n0 + n1;
  auto place = [n](int ro, int co) {
    return [n, ro, co](const SparseCMatrix& m) {
      SparseCMatrix o{n, n, {}};
      for (const auto& t : m.entries) o.entries.push_back({t.row + ro, t.col + co, t.value});
      return o;
    };
  };
  auto off = [n, n0](const SparseCMatrix& m) {
    SparseCMatrix o{n, n, {}};
    for (const auto& t : m.entries) {
      o.entries.push_back({t.row, n0 + t.col, t.value});
      o.entries.push_back({n0 + t.col, t.row, std::conj(t.value)});
    }
    return o;
  };
  return tl.map(place(0, 0), n, n) + tr.map(off, n, n) + br.map(place(n0, n0), n, n);
}

// ---------------------------------------------------------------------------

Variable Model::add(VarInfo::Kind kind, int rows, int cols, std::string name) {
  if (rows < 1 || cols < 1) throw DimensionError("Model: variable dimensions must be positive");
  vars_.push_back({kind, rows, cols, num_params(), std::move(name)});
  return Variable{static_cast<int>(vars_.size()) - 1};
}

namespace {

int param_count(int kind, int rows, int cols) {
  switch (kind) {
    case 0:
      return rows * rows;  // Hermitian
    case 1:
      return 2 * rows * cols;  // General
    default:
      return 1;
  }
}

// Basis element k of a variable's real parameterization.
// Hermitian: E_ii for the diagonal, then per i<j the pair E_ij + E_ji and
// i E_ij - i E_ji. General: E_ij and i E_ij, column-major. Scalar: [1].
SparseCMatrix basis(int kind, int rows, int cols, int k) {
  if (kind == 2) return {1, 1, {{0, 0, 1.0}}};
  if (kind == 1) {
    const int cell = k / 2;
    const int r = cell % rows, c = cell / rows;
    return {rows, cols, {{r, c, (k % 2) ? Complex(0, 1) : Complex(1, 0)}}};
  }
  const int n = rows;
  if (k < n) return {n, n, {{k, k, 1.0}}};
  const int pair = (k - n) / 2;
  const bool imag = (k - n) % 2;
  // unrank pair -> (i, j), i < j, row-major over the strict upper triangle
  int i = 0, rem = pair;
  while (rem >= n - 1 - i) {
    rem -= n - 1 - i;
    ++i;
  }
  const int j = i + 1 + rem;
  if (!imag) return {n, n, {{i, j, 1.0}, {j, i, 1.0}}};
  return {n, n, {{i, j, Complex(0, 1)}, {j, i, Complex(0, -1)}}};
}

SparseCMatrix apply_ops(const SparseCMatrix& m, const std::vector<std::shared_ptr<const LinearOp>>& ops) {
  SparseCMatrix cur = m;
  for (const auto& op : ops) cur = op->apply(cur);
  return cur;
}

// Real symmetric embedding of a Hermitian sparse matrix, upper triangle only.
void embed_upper(const std::vector<Triplet>& h, int n, int block, double sign, sdp::SparseSymmetric& out) {
  for (const auto& t : h) {
    const double re = sign * t.value.real();
    const double im = sign * t.value.imag();
    const int r = t.row, c = t.col;
    if (r <= c) {
      out.add(block, r, c, re);
      out.add(block, n + r, n + c, re);
    }
    out.add(block, r, n + c, -im);  // the Im block below the diagonal is the mirror
  }
}

}  // namespace

int Model::num_params() const {
  int n = 0;
  for (const auto& v : vars_) n += param_count(v.kind, v.rows, v.cols);
  return n;
}

Variable Model::hermitian(int n, std::string name) { return add(VarInfo::Hermitian, n, n, std::move(name)); }
Variable Model::general(int rows, int cols, std::string name) {
  return add(VarInfo::General, rows, cols, std::move(name));
}
Variable Model::scalar(std::string name) { return add(VarInfo::Scalar, 1, 1, std::move(name)); }

Expr Model::operator()(Variable v) const {
  const auto& info = vars_.at(v.id);
  return Expr(v, info.rows, info.cols);
}

int Model::psd(const Expr& e, std::string name) {
  if (e.rows() != e.cols()) throw DimensionError("Model::psd: expression is not square");
  lmis_.push_back({e, std::move(name)});
  return static_cast<int>(lmis_.size()) - 1;
}

void Model::equal(const Expr& e, const CMatrix& target, std::string name) {
  if (e.rows() != e.cols() || target.rows() != e.rows() || target.cols() != e.cols()) {
    throw DimensionError("Model::equal: shape mismatch");
  }
  equalities_.push_back({e, target, std::move(name)});
}

void Model::equal(const Expr& e, double target, std::string name) {
  equal(e, CMatrix::Constant(1, 1, target), std::move(name));
}

void Model::maximize(const Expr& e) {
  if (e.rows() != 1 || e.cols() != 1) throw DimensionError("Model::maximize: objective must be 1x1");
  objective_ = e;
  sense_ = 1.0;
}

void Model::minimize(const Expr& e) {
  if (e.rows() != 1 || e.cols() != 1) throw DimensionError("Model::minimize: objective must be 1x1");
  objective_ = e;
  sense_ = -1.0;
}

Compiled Model::compile() const {
  Compiled out;
  out.vars_ = vars_;
  out.sense_ = sense_;
  const int nfull = num_params();
  out.num_full_ = nfull;

  auto for_each_image = [&](const Expr& e, auto&& fn) {
    for (const auto& term : e.terms_) {
      const auto& v = vars_[term.var];
      const int cnt = param_count(v.kind, v.rows, v.cols);
      for (int k = 0; k < cnt; ++k) {
        SparseCMatrix img = apply_ops(basis(v.kind, v.rows, v.cols, k), term.ops);
        if (term.coeff != 1.0) img = scaled(std::move(img), term.coeff);
        fn(v.offset + k, img);
      }
    }
  };

  // LMIs -> blocks
  std::vector<sdp::SparseSymmetric> a_full(nfull);
  sdp::SparseSymmetric c;
  for (std::size_t l = 0; l < lmis_.size(); ++l) {
    const Expr& e = lmis_[l].expr;
    const int n = e.rows();
    const int block = static_cast<int>(l);
    out.lmi_sizes_.push_back(n);
    out.problem_.blocks.push_back(2 * n);

    std::vector<std::vector<Triplet>> per_param(nfull);
    std::vector<int> touched;
    for_each_image(e, [&](int k, const SparseCMatrix& img) {
      if (per_param[k].empty()) touched.push_back(k);
      per_param[k].insert(per_param[k].end(), img.entries.begin(), img.entries.end());
    });
    auto check_hermitian = [&](std::vector<Triplet>& t, const char* what) {
      merge(t);
      CMatrix probe = CMatrix::Zero(n, n);
      for (const auto& x : t) probe(x.row, x.col) += x.value;
      if (hermitian_defect(probe) > 1e-12 * std::max(1.0, max_abs(probe))) {
        std::ostringstream os;
        os << "Model::compile: LMI '" << lmis_[l].name << "' has a non-Hermitian " << what;
        throw NotHermitianError(os.str());
      }
    };
    for (int k : touched) {
      check_hermitian(per_param[k], "coefficient");
      embed_upper(per_param[k], n, block, -1.0, a_full[k]);
    }
    std::vector<Triplet> cst = e.constant_.entries;
    check_hermitian(cst, "constant");
    embed_upper(cst, n, block, 1.0, c);
  }
  for (auto& a : a_full) a.compress();

  // equalities -> dense rows
  std::vector<RVector> rows;
  std::vector<double> rhs;
  for (const auto& eq : equalities_) {
    const int n = eq.expr.rows();
    // component index: diag i -> i; pair (i<j) -> n + 2*rank + {0 re, 1 im}
    auto pair_rank = [n](int i, int j) { return i * (2 * n - i - 1) / 2 + (j - i - 1); };
    const int ncomp = n * n;
    RMatrix e = RMatrix::Zero(ncomp, nfull);
    RVector f(ncomp);
    for (int i = 0; i < n; ++i) f(i) = eq.target(i, i).real();
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        f(n + 2 * pair_rank(i, j)) = eq.target(i, j).real();
        f(n + 2 * pair_rank(i, j) + 1) = eq.target(i, j).imag();
      }
    }
    auto accumulate = [&](const SparseCMatrix& img, auto&& put) {
      for (const auto& t : img.entries) {
        if (t.row == t.col) {
          put(t.row, t.value.real());
        } else if (t.row < t.col) {
          const int base = n + 2 * pair_rank(t.row, t.col);
          put(base, t.value.real());
          put(base + 1, t.value.imag());
        }
      }
    };
    for_each_image(eq.expr, [&](int k, const SparseCMatrix& img) {
      accumulate(img, [&](int comp, double v) { e(comp, k) += v; });
    });
    accumulate(eq.expr.constant_, [&](int comp, double v) { f(comp) -= v; });
    for (int r = 0; r < ncomp; ++r) {
      rows.push_back(e.row(r).transpose());
      rhs.push_back(f(r));
    }
  }

  // objective
  out.b_full_ = RVector::Zero(nfull);
  for_each_image(objective_, [&](int k, const SparseCMatrix& img) {
    for (const auto& t : img.entries) out.b_full_(k) += sense_ * t.value.real();
  });
  for (const auto& t : objective_.constant_.entries) out.const_full_ += sense_ * t.value.real();

  // eliminate equalities by reduced row echelon form
  const int neq = static_cast<int>(rows.size());
  RMatrix e(neq, nfull);
  RVector f(neq);
  for (int r = 0; r < neq; ++r) {
    e.row(r) = rows[r].transpose();
    f(r) = rhs[r];
  }
  const double escale = neq ? std::max(1.0, e.cwiseAbs().maxCoeff()) : 1.0;
  const double ptol = 1e-10 * escale;
  std::vector<int> pivots;
  std::vector<char> is_pivot(nfull, 0);
  int prow = 0;
  for (int col = 0; col < nfull && prow < neq; ++col) {
    Eigen::Index best;
    const double mag = e.col(col).tail(neq - prow).cwiseAbs().maxCoeff(&best);
    if (mag <= ptol) continue;
    best += prow;
    e.row(prow).swap(e.row(best));
    std::swap(f(prow), f(best));
    const double piv = e(prow, col);
    e.row(prow) /= piv;
    f(prow) /= piv;
    for (int r = 0; r < neq; ++r) {
      if (r == prow) continue;
      const double factor = e(r, col);
      if (factor != 0.0) {
        e.row(r) -= factor * e.row(prow);
        f(r) -= factor * f(prow);
      }
    }
    pivots.push_back(col);
    is_pivot[col] = 1;
    ++prow;
  }
  for (int r = prow; r < neq; ++r) {
    if (std::abs(f(r)) > 1e-9 * std::max(1.0, f.cwiseAbs().maxCoeff())) {
      throw std::invalid_argument("Model::compile: inconsistent equality constraints");
    }
  }
  for (int k = 0; k < nfull; ++k) {
    if (!is_pivot[k]) out.free_.push_back(k);
  }
  const int np = static_cast<int>(pivots.size());
  const int nf = static_cast<int>(out.free_.size());
  out.pivots_ = pivots;
  out.pivot_rhs_ = f.head(np);
  out.pivot_coeff_.resize(np, nf);
  for (int j = 0; j < nf; ++j) out.pivot_coeff_.col(j) = e.col(out.free_[j]).head(np);
  out.pivot_coeff_ = out.pivot_coeff_.unaryExpr([&](double v) { return std::abs(v) <= 1e-15 ? 0.0 : v; });

  // substitute y_p = f_p - Σ_j F_pj y_j
  auto& prob = out.problem_;
  prob.a.resize(nf);
  prob.b.resize(nf);
  for (int j = 0; j < nf; ++j) {
    auto& aj = prob.a[j];
    aj = a_full[out.free_[j]];
    double bj = out.b_full_(out.free_[j]);
    for (int i = 0; i < np; ++i) {
      const double fij = out.pivot_coeff_(i, j);
      if (fij == 0.0) continue;
      for (const auto& en : a_full[pivots[i]].entries) aj.entries.push_back({en.block, en.row, en.col, -fij * en.value});
      bj -= fij * out.b_full_(pivots[i]);
    }
    aj.compress();
    prob.b(j) = bj;
  }
  out.offset_ = out.const_full_;
  for (int i = 0; i < np; ++i) {
    const double fi = out.pivot_rhs_(i);
    if (fi == 0.0) continue;
    for (const auto& en : a_full[pivots[i]].entries) c.entries.push_back({en.block, en.row, en.col, -fi * en.value});
    out.offset_ += out.b_full_(pivots[i]) * fi;
  }
  c.compress();
  prob.c = std::move(c);
  return out;
}

// ---------------------------------------------------------------------------

RVector Compiled::expand(const RVector& y) const {
  RVector full = RVector::Zero(num_full_);
  for (std::size_t j = 0; j < free_.size(); ++j) full(free_[j]) = y(j);
  if (!pivots_.empty()) {
    const RVector yp = pivot_rhs_ - pivot_coeff_ * y;
    for (std::size_t i = 0; i < pivots_.size(); ++i) full(pivots_[i]) = yp(i);
  }
  return full;
}

RVector Compiled::reduce(const RVector& y_full) const {
  RVector y(free_.size());
  for (std::size_t j = 0; j < free_.size(); ++j) y(j) = y_full(free_[j]);
  return y;
}

double Compiled::objective(const RVector& y_full) const {
  return sense_ * (b_full_.dot(y_full) + const_full_);
}

double Compiled::bound(const sdp::BlockMatrix& x) const {
  return sense_ * (sdp::inner(problem_.c, x) + offset_);
}

CMatrix Compiled::value(Variable v, const RVector& y_full) const {
  const auto& info = vars_.at(v.id);
  const int kind = static_cast<int>(info.kind);
  CMatrix m = CMatrix::Zero(info.rows, info.cols);
  const int cnt = param_count(kind, info.rows, info.cols);
  for (int k = 0; k < cnt; ++k) {
    const double yk = y_full(info.offset + k);
    if (yk == 0.0) continue;
    for (const auto& t : basis(kind, info.rows, info.cols, k).entries) m(t.row, t.col) += yk * t.value;
  }
  return m;
}

RVector Compiled::encode_full(const std::vector<CMatrix>& values) const {
  if (values.size() != vars_.size()) throw DimensionError("Compiled::encode_full: one value per variable required");
  RVector y = RVector::Zero(num_full_);
  for (std::size_t v = 0; v < vars_.size(); ++v) {
    const auto& info = vars_[v];
    const CMatrix& m = values[v];
    if (m.rows() != info.rows || m.cols() != info.cols) throw DimensionError("Compiled::encode_full: shape mismatch");
    const int kind = static_cast<int>(info.kind);
    const int cnt = param_count(kind, info.rows, info.cols);
    for (int k = 0; k < cnt; ++k) {
      const auto bk = basis(kind, info.rows, info.cols, k);
      const auto& t = bk.entries.front();
      // the first entry of each basis element carries either 1 or i
      const Complex entry = m(t.row, t.col);
      y(info.offset + k) = t.value.imag() != 0.0 ? entry.imag() : entry.real();
    }
  }
  return y;
}

CMatrix Compiled::multiplier(int index, const sdp::BlockMatrix& x) const {
  const int n = lmi_sizes_.at(index);
  const RMatrix& b = x.at(index);
  CMatrix z(n, n);
  z.real() = b.topLeftCorner(n, n) + b.bottomRightCorner(n, n);
  z.imag() = b.bottomLeftCorner(n, n) - b.topRightCorner(n, n);
  return 0.5 * (z + z.adjoint());
}

sdp::BlockMatrix Compiled::encode_multipliers(const std::vector<CMatrix>& zs) const {
  if (zs.size() != lmi_sizes_.size()) throw DimensionError("Compiled::encode_multipliers: one matrix per LMI required");
  sdp::BlockMatrix x;
  for (std::size_t l = 0; l < zs.size(); ++l) {
    const int n = lmi_sizes_[l];
    const CMatrix& z = zs[l];
    if (z.rows() != n || z.cols() != n) throw DimensionError("Compiled::encode_multipliers: shape mismatch");
    RMatrix b(2 * n, 2 * n);
    b.topLeftCorner(n, n) = z.real();
    b.bottomRightCorner(n, n) = z.real();
    b.bottomLeftCorner(n, n) = z.imag();
    b.topRightCorner(n, n) = -z.imag();
    x.push_back(0.5 * b);
  }
  return x;
}

sdp::BlockMatrix Compiled::slack(const RVector& y) const {
  sdp::BlockMatrix s = sdp::to_dense(problem_.c, problem_.blocks);
  for (int i = 0; i < problem_.num_constraints(); ++i) {
    for (const auto& e : problem_.a[i].entries) {
      s[e.block](e.row, e.col) -= y(i) * e.value;
      if (e.row != e.col) s[e.block](e.col, e.row) -= y(i) * e.value;
    }
  }
  return s;
}

ModelSolution Compiled::solve(const sdp::SolverSettings& settings) const {
  ModelSolution ms;
  ms.raw = sdp::solve(problem_, settings);
  ms.y_full = expand(ms.raw.y);
  ms.value = objective(ms.y_full);
  ms.bound = bound(ms.raw.x);
  return ms;
}

}  // namespace qcap::lmi
