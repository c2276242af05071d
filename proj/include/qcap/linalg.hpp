#pragma once

#include <complex>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace qcap {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

/// Raised on shape mismatches between operands.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when an operation that requires a Hermitian (or PSD) input gets
/// something else.
class NotHermitianError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Dimensions of a bipartite system A⊗B, A-major ordering: index (iA, iB)
/// maps to iA * dB + iB.
struct BipartiteShape {
  int dA = 1;
  int dB = 1;

  BipartiteShape() = default;
  BipartiteShape(int a, int b);

  int side() const { return dA * dB; }
  bool operator==(const BipartiteShape&) const = default;
};

enum class Subsystem { A, B };

/// Absolute tolerance used when checking Hermiticity of inputs.
struct HermitianCheckTolerance {
  double tol = 1e-10;
};

CMatrix kron(const CMatrix& a, const CMatrix& b);

CMatrix partial_trace(const CMatrix& m, BipartiteShape shape, Subsystem traced);

CMatrix partial_transpose(const CMatrix& m, BipartiteShape shape, Subsystem which);

/// Reorders tensor factors. `dims[k]` is the dimension of factor k in the
/// input ordering; output factor j is input factor `perm[j]`. Applies to
/// operators (both row and column indices are permuted).
CMatrix permute_systems(const CMatrix& m, std::span<const int> dims, std::span<const int> perm);

/// Largest |m - m^†| entry.
double hermitian_defect(const CMatrix& m);

struct Eigensystem {
  RVector values;   // ascending
  CMatrix vectors;  // columns are eigenvectors
};

/// Throws NotHermitianError naming the max asymmetry when the input is not
/// Hermitian within tol.
Eigensystem hermitian_eig(const CMatrix& h, HermitianCheckTolerance tol = {});

struct SignedParts {
  CMatrix positive;
  CMatrix negative;
};

/// Jordan decomposition h = positive - negative with positive * negative = 0.
SignedParts positive_negative_parts(const CMatrix& h, HermitianCheckTolerance tol = {});

/// Default relative rank threshold for support detection.
inline constexpr double kDefaultRankTol = 1e-7;

/// Orthogonal projector onto the eigenspaces of h with eigenvalue above
/// rank_tol * max(1, λ_max). Eigenvalues below -10 * that threshold are
/// rejected.
CMatrix support_projector(const CMatrix& h, double rank_tol = kDefaultRankTol);

/// Unnormalized maximally entangled projector |Φ_d⟩⟨Φ_d|, |Φ_d⟩ = Σ_i |ii⟩.
CMatrix max_entangled(int d);

/// Σ_ij |ij⟩⟨ji| on C^d ⊗ C^d.
CMatrix swap_operator(int d);

CMatrix identity(int d);

/// Max-entry norm.
double max_abs(const CMatrix& m);

}  // namespace qcap
