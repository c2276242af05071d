#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qcap/linalg.hpp"

namespace qcap {

class ChannelError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Maximum trace-preservation residual accepted by from_kraus.
inline constexpr double kTraceTol = 1e-8;

/// A CPTP map ρ ↦ Σ_k E_k ρ E_k^† with E_k of shape dim_out × dim_in.
class QuantumChannel {
 public:
  int dim_in() const { return dim_in_; }
  int dim_out() const { return dim_out_; }
  const std::vector<CMatrix>& kraus() const { return kraus_; }
  const std::string& name() const { return name_; }
  /// max |Σ E^†E - 1| measured at construction
  double tp_residual() const { return tp_residual_; }

  CMatrix apply(const CMatrix& rho) const;

 private:
  friend QuantumChannel from_kraus(std::vector<CMatrix> kraus, std::string name);
  int dim_in_ = 0;
  int dim_out_ = 0;
  std::vector<CMatrix> kraus_;
  std::string name_;
  double tp_residual_ = 0.0;
};

/// Validates dimensions and trace preservation (within kTraceTol).
QuantumChannel from_kraus(std::vector<CMatrix> kraus, std::string name = "channel");

/// Unnormalized Choi operator J_AB = Σ_ij |i⟩⟨j| ⊗ N(|i⟩⟨j|), reference system A first.
struct ChoiMatrix {
  CMatrix matrix;
  BipartiteShape shape;
};

ChoiMatrix choi(const QuantumChannel& ch);

/// Projector onto the support of the Choi matrix; determined by span{E_k}.
struct KrausSupport {
  CMatrix projector;
  BipartiteShape shape;
  int rank = 0;
};

KrausSupport kraus_support(const QuantumChannel& ch, double rank_tol = kDefaultRankTol);

/// Kraus operators obtained from the spectral decomposition of a Choi matrix.
std::vector<CMatrix> kraus_from_choi(const CMatrix& j, BipartiteShape shape, double rank_tol = 1e-12);

/// N ⊗ M. Input/output factors are ordered (N, M).
QuantumChannel tensor_channels(const QuantumChannel& n, const QuantumChannel& m);

/// Reorders kron(J_N, J_M) from A1 B1 A2 B2 into (A1 A2)(B1 B2), which is the
/// Choi matrix of tensor_channels(n, m).
CMatrix tensor_choi(const ChoiMatrix& jn, const ChoiMatrix& jm);

QuantumChannel identity_channel(int d);
/// ρ ↦ (1-p) ρ ⊕ p tr(ρ) |e⟩⟨e|, with the flag |e⟩ = |d⟩ adjoined (dim_out = d + 1).
QuantumChannel erasure_channel(int d, double p);
/// ρ ↦ (1 tr ρ - ρ^T) / (d - 1)
QuantumChannel werner_holevo(int d);
/// Qutrit-to-qubit family with E_0 = |0⟩⟨0| + √r |1⟩⟨1|, E_1 = √(1-r) |0⟩⟨1| + |1⟩⟨2|, 0 ≤ r ≤ 1/2.
QuantumChannel nr_channel(double r);
QuantumChannel mixed_unitary(const std::vector<CMatrix>& unitaries, const std::vector<double>& probs);
/// Kraus operators of a Haar-random isometry C^dim_in → C^dim_out ⊗ C^kraus_rank.
QuantumChannel random_channel(int dim_in, int dim_out, int kraus_rank, std::uint64_t seed);

/// Pauli matrices, handy for mixed-unitary constructions.
CMatrix pauli_x();
CMatrix pauli_y();
CMatrix pauli_z();

/// Haar-random unitary (QR of a complex Ginibre matrix with phase-fixed R).
CMatrix random_unitary(int d, std::uint64_t seed);

}  // namespace qcap
