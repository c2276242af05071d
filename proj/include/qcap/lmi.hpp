#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "qcap/linalg.hpp"
#include "qcap/sdp.hpp"

// Modeling layer: affine expressions in complex matrix variables, Hermitian
// linear matrix inequalities and equalities. A Model compiles to the dual
// form of sdp::SdpProblem (max b·y s.t. C - Σ y_i A_i ⪰ 0), where every
// Hermitian LMI block of side n becomes a real symmetric block of side 2n via
// H ↦ [[Re H, -Im H], [Im H, Re H]]. Affine equalities are eliminated by
// substitution before the problem reaches the solver, so the y-side variables
// are always free.
namespace qcap::lmi {

struct Triplet {
  int row;
  int col;
  Complex value;
};

struct SparseCMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<Triplet> entries;

  static SparseCMatrix from_dense(const CMatrix& m, double drop = 0.0);
  CMatrix to_dense() const;
};

struct Variable {
  int id = -1;
};

/// Linear map between sparse matrices, with the output shape it produces.
struct LinearOp {
  std::function<SparseCMatrix(const SparseCMatrix&)> apply;
};

class Expr {
 public:
  Expr() = default;
  Expr(Variable v, int rows, int cols);
  static Expr constant(const CMatrix& m);
  static Expr zero(int rows, int cols);

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  Expr operator+(const Expr& o) const;
  Expr operator-(const Expr& o) const;
  Expr operator-() const { return (*this) * -1.0; }
  Expr operator*(double s) const;
  friend Expr operator*(double s, const Expr& e) { return e * s; }

  /// Applies a linear map to every term and to the constant.
  Expr map(std::function<SparseCMatrix(const SparseCMatrix&)> f, int rows, int cols) const;

  Expr kron_identity_right(int d) const;  // X ⊗ 1_d
  Expr kron_identity_left(int d) const;   // 1_d ⊗ X
  Expr partial_transpose(BipartiteShape s, Subsystem which) const;
  Expr partial_trace(BipartiteShape s, Subsystem traced) const;
  Expr trace() const;
  /// 1x1 expression tr(m X).
  Expr inner(const CMatrix& m) const;
  Expr adjoint() const;
  /// left · X · right for fixed dense matrices.
  Expr sandwich(const CMatrix& left, const CMatrix& right) const;

  /// [[tl, tr], [tr^†, br]]
  static Expr block2x2(const Expr& tl, const Expr& tr, const Expr& br);

 private:
  friend class Model;
  struct Term {
    int var;
    double coeff;
    std::vector<std::shared_ptr<const LinearOp>> ops;
  };
  int rows_ = 0;
  int cols_ = 0;
  std::vector<Term> terms_;
  SparseCMatrix constant_;
};

class Compiled;

class Model {
 public:
  Variable hermitian(int n, std::string name = {});
  /// Unconstrained complex rows x cols matrix.
  Variable general(int rows, int cols, std::string name = {});
  /// Real scalar.
  Variable scalar(std::string name = {});

  Expr operator()(Variable v) const;

  /// Adds expr ⪰ 0; expr must be square and Hermitian. Returns the LMI index.
  int psd(const Expr& e, std::string name = {});
  /// Adds expr == target for a Hermitian (or real 1x1) expression.
  void equal(const Expr& e, const CMatrix& target, std::string name = {});
  void equal(const Expr& e, double target, std::string name = {});
  /// Objective: a real 1x1 expression.
  void maximize(const Expr& e);
  void minimize(const Expr& e);

  Compiled compile() const;

 private:
  friend class Compiled;
  struct VarInfo {
    enum Kind { Hermitian, General, Scalar } kind;
    int rows;
    int cols;
    int offset;
    std::string name;
  };
  int num_params() const;
  Variable add(VarInfo::Kind kind, int rows, int cols, std::string name);
  std::vector<VarInfo> vars_;
  struct Lmi {
    Expr expr;
    std::string name;
  };
  std::vector<Lmi> lmis_;
  struct Equality {
    Expr expr;
    CMatrix target;
    std::string name;
  };
  std::vector<Equality> equalities_;
  Expr objective_ = Expr::zero(1, 1);
  double sense_ = 1.0;  // +1 maximize, -1 minimize
};

/// Result of solving a compiled model.
struct ModelSolution {
  sdp::SdpSolution raw;
  RVector y_full;      // all variable parameters, equalities restored
  double value = 0.0;  // objective from the variable side
  double bound = 0.0;  // objective from the multiplier side
};

class Compiled {
 public:
  const sdp::SdpProblem& problem() const { return problem_; }

  ModelSolution solve(const sdp::SolverSettings& settings = {}) const;

  /// Variable value from the full parameter vector.
  CMatrix value(Variable v, const RVector& y_full) const;
  /// Complex multiplier Z of LMI `index`, normalized so that ⟨Z, F⟩ = Re tr(Z F).
  CMatrix multiplier(int index, const sdp::BlockMatrix& x) const;

  /// Parameter vector (full and reduced) for given variable values; values
  /// must satisfy the equalities.
  RVector encode_full(const std::vector<CMatrix>& values) const;
  RVector reduce(const RVector& y_full) const;
  /// Standard-form X from LMI multipliers (one per psd() call, in order).
  sdp::BlockMatrix encode_multipliers(const std::vector<CMatrix>& z) const;
  /// S = C - Σ y_i A_i for a reduced y.
  sdp::BlockMatrix slack(const RVector& y) const;

  RVector expand(const RVector& y) const;
  /// Objective (in the model's own sense) for a full parameter vector.
  double objective(const RVector& y_full) const;
  /// Objective value implied by multipliers: sense * (⟨C, X⟩ + offset).
  double bound(const sdp::BlockMatrix& x) const;

  int num_lmis() const { return static_cast<int>(lmi_sizes_.size()); }
  int lmi_size(int index) const { return lmi_sizes_[index]; }

 private:
  friend class Model;
  sdp::SdpProblem problem_;
  std::vector<Model::VarInfo> vars_;
  std::vector<int> lmi_sizes_;  // complex side
  int num_full_ = 0;
  std::vector<int> free_;           // full index of reduced param j
  std::vector<int> pivots_;         // full index of eliminated param p
  RVector pivot_rhs_;               // f'_p
  RMatrix pivot_coeff_;             // F (pivots x free)
  RVector b_full_;                  // objective coefficients (model sense)
  double const_full_ = 0.0;         // objective constant (model sense)
  double offset_ = 0.0;             // constant of the maximization in the reduced problem
  double sense_ = 1.0;
};

}  // namespace qcap::lmi
