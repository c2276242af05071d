#include "qcap/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace qcap {

BipartiteShape::BipartiteShape(int a, int b) : dA(a), dB(b) {
  if (a < 1 || b < 1) {
    throw DimensionError("bipartite dimensions must be positive");
  }
}

namespace {

void require_square_side(const CMatrix& m, int side, const char* what) {
  if (m.rows() != side || m.cols() != side) {
    std::ostringstream os;
    os << what << ": expected a " << side << "x" << side << " matrix, got " << m.rows() << "x"
       << m.cols();
    throw DimensionError(os.str());
  }
}

}  // namespace

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

CMatrix partial_trace(const CMatrix& m, BipartiteShape s, Subsystem traced) {
  require_square_side(m, s.side(), "partial_trace");
  if (traced == Subsystem::A) {
    CMatrix out = CMatrix::Zero(s.dB, s.dB);
    for (int a = 0; a < s.dA; ++a) {
      out += m.block(a * s.dB, a * s.dB, s.dB, s.dB);
    }
    return out;
  }
  CMatrix out(s.dA, s.dA);
  for (int a = 0; a < s.dA; ++a) {
    for (int c = 0; c < s.dA; ++c) {
      out(a, c) = m.block(a * s.dB, c * s.dB, s.dB, s.dB).trace();
    }
  }
  return out;
}

CMatrix partial_transpose(const CMatrix& m, BipartiteShape s, Subsystem which) {
  require_square_side(m, s.side(), "partial_transpose");
  CMatrix out(m.rows(), m.cols());
  const int dB = s.dB;
  for (int a = 0; a < s.dA; ++a) {
    for (int c = 0; c < s.dA; ++c) {
      if (which == Subsystem::B) {
        out.block(a * dB, c * dB, dB, dB) = m.block(a * dB, c * dB, dB, dB).transpose();
      } else {
        out.block(a * dB, c * dB, dB, dB) = m.block(c * dB, a * dB, dB, dB);
      }
    }
  }
  return out;
}

CMatrix permute_systems(const CMatrix& m, std::span<const int> dims, std::span<const int> perm) {
  const int k = static_cast<int>(dims.size());
  if (static_cast<int>(perm.size()) != k) {
    throw DimensionError("permute_systems: perm and dims differ in length");
  }
  int total = 1;
  for (int d : dims) total *= d;
  require_square_side(m, total, "permute_systems");
  std::vector<int> seen(k, 0);
  for (int p : perm) {
    if (p < 0 || p >= k || seen[p]++) throw DimensionError("permute_systems: invalid permutation");
  }

  // strides of the input factors (A-major)
  std::vector<int> in_stride(k, 1);
  for (int i = k - 2; i >= 0; --i) in_stride[i] = in_stride[i + 1] * dims[i + 1];
  std::vector<int> out_dims(k);
  for (int j = 0; j < k; ++j) out_dims[j] = dims[perm[j]];

  // map[out_index] = in_index
  std::vector<int> map(total);
  std::vector<int> digits(k, 0);
  for (int idx = 0; idx < total; ++idx) {
    int in = 0;
    for (int j = 0; j < k; ++j) in += digits[j] * in_stride[perm[j]];
    map[idx] = in;
    for (int j = k - 1; j >= 0; --j) {
      if (++digits[j] < out_dims[j]) break;
      digits[j] = 0;
    }
  }
  CMatrix out(total, total);
  for (int r = 0; r < total; ++r) {
    for (int c = 0; c < total; ++c) out(r, c) = m(map[r], map[c]);
  }
  return out;
}

double hermitian_defect(const CMatrix& m) {
  if (m.rows() != m.cols()) return std::numeric_limits<double>::infinity();
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

double max_abs(const CMatrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

Eigensystem hermitian_eig(const CMatrix& h, HermitianCheckTolerance tol) {
  if (h.rows() != h.cols()) throw DimensionError("hermitian_eig: matrix is not square");
  const double defect = hermitian_defect(h);
  if (defect > tol.tol) {
    std::ostringstream os;
    os << "hermitian_eig: input is not Hermitian (max |h - h^dagger| = " << defect << ")";
    throw NotHermitianError(os.str());
  }
  const CMatrix sym = 0.5 * (h + h.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(sym);
  return {es.eigenvalues(), es.eigenvectors()};
}

SignedParts positive_negative_parts(const CMatrix& h, HermitianCheckTolerance tol) {
  const auto es = hermitian_eig(h, tol);
  RVector pos = es.values.cwiseMax(0.0);
  RVector neg = (-es.values).cwiseMax(0.0);
  SignedParts out;
  out.positive = es.vectors * pos.asDiagonal() * es.vectors.adjoint();
  out.negative = es.vectors * neg.asDiagonal() * es.vectors.adjoint();
  return out;
}

CMatrix support_projector(const CMatrix& h, double rank_tol) {
  const auto es = hermitian_eig(h, {1e-8});
  const double top = es.values.size() ? es.values.maxCoeff() : 0.0;
  const double threshold = rank_tol * std::max(1.0, top);
  if (es.values.size() && es.values.minCoeff() < -10.0 * threshold) {
    std::ostringstream os;
    os << "support_projector: input has a significantly negative eigenvalue "
       << es.values.minCoeff();
    throw NotHermitianError(os.str());
  }
  CMatrix p = CMatrix::Zero(h.rows(), h.cols());
  for (Eigen::Index i = 0; i < es.values.size(); ++i) {
    if (es.values(i) > threshold) p += es.vectors.col(i) * es.vectors.col(i).adjoint();
  }
  return p;
}

CMatrix max_entangled(int d) {
  CVector phi = CVector::Zero(d * d);
  for (int i = 0; i < d; ++i) phi(i * d + i) = 1.0;
  return phi * phi.adjoint();
}

CMatrix swap_operator(int d) {
  CMatrix s = CMatrix::Zero(d * d, d * d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) s(i * d + j, j * d + i) = 1.0;
  }
  return s;
}

CMatrix identity(int d) { return CMatrix::Identity(d, d); }

}  // namespace qcap
