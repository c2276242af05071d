#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "qcap/linalg.hpp"

// Dense primal-dual interior-point solver for small semidefinite programs in
// standard form
//
//   primal:  minimize ⟨C, X⟩  s.t. ⟨A_i, X⟩ = b_i,  X ⪰ 0
//   dual:    maximize b·y     s.t. Σ_i y_i A_i + S = C,  S ⪰ 0
//
// with X, S block diagonal over real symmetric blocks.
namespace qcap::sdp {

/// One stored entry of a block-diagonal symmetric matrix. Only row <= col is
/// stored; the (col, row) mirror is implied.
struct Entry {
  int block = 0;
  int row = 0;
  int col = 0;
  double value = 0.0;
};

struct SparseSymmetric {
  std::vector<Entry> entries;

  /// Adds v at (r, c) and implicitly (c, r); normalizes so row <= col.
  void add(int block, int r, int c, double v);
  /// Sorts entries and merges duplicates, dropping exact zeros.
  void compress();
};

using BlockMatrix = std::vector<RMatrix>;

struct SdpProblem {
  std::vector<int> blocks;
  SparseSymmetric c;
  std::vector<SparseSymmetric> a;
  RVector b;
  std::vector<std::string> names;

  int num_constraints() const { return static_cast<int>(a.size()); }
  /// Throws std::invalid_argument if entries fall outside the block structure
  /// or the sizes of a/b/names disagree.
  void validate() const;
};

/// Progress of one interior-point iteration, before its step is taken.
struct IterateInfo {
  int iteration = 0;
  double primal_objective = 0.0;  // ⟨C, X⟩
  double dual_objective = 0.0;    // b·y
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double mu = 0.0;  // ⟨X, S⟩ / n
};

struct SolverSettings {
  double tol_gap = 1e-8;
  double tol_feas = 1e-8;
  int max_iter = 100;
  double step_fraction = 0.98;
  bool verbose = false;
  /// Called once per iteration when set.
  std::function<void(const IterateInfo&)> on_iterate;
};

enum class SolveStatus { Optimal, MaxIter, NumericalFailure, Infeasible };

const char* to_string(SolveStatus s);

struct Residuals {
  double primal = 0.0;  // max_i |⟨A_i, X⟩ - b_i|
  double dual = 0.0;    // max |C - Σ y_i A_i - S|
  double gap = 0.0;     // |⟨C, X⟩ - b·y| / (1 + |⟨C, X⟩|)
};

struct SdpSolution {
  SolveStatus status = SolveStatus::NumericalFailure;
  double primal_value = 0.0;  // ⟨C, X⟩
  double dual_value = 0.0;    // b·y
  BlockMatrix x;
  RVector y;
  BlockMatrix s;
  int iterations = 0;
  Residuals residuals;
  /// Linearly dependent constraints removed before the solve.
  std::vector<int> dropped;
  std::string message;
};

SdpSolution solve(const SdpProblem& p, const SolverSettings& settings = {});

Residuals residuals(const SdpProblem& p, const SdpSolution& sol);

/// ⟨M, X⟩ for a sparse symmetric M.
double inner(const SparseSymmetric& m, const BlockMatrix& x);

/// Dense form of a sparse symmetric block matrix.
BlockMatrix to_dense(const SparseSymmetric& m, const std::vector<int>& blocks);

/// Writes the problem in SDPA sparse format. SDPA's primal is
/// min c·x s.t. Σ F_i x_i - F_0 ⪰ 0; our dual maps onto it with x = y,
/// c = -b, F_0 = -C, F_i = -A_i.
void write_sdpa(const SdpProblem& p, std::ostream& os);

}  // namespace qcap::sdp
