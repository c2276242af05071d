#include "qcap/channels.hpp"

#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

namespace qcap {

CMatrix QuantumChannel::apply(const CMatrix& rho) const {
  if (rho.rows() != dim_in_ || rho.cols() != dim_in_) {
    throw DimensionError("QuantumChannel::apply: input has the wrong dimension");
  }
  CMatrix out = CMatrix::Zero(dim_out_, dim_out_);
  for (const auto& e : kraus_) out += e * rho * e.adjoint();
  return out;
}

QuantumChannel from_kraus(std::vector<CMatrix> kraus, std::string name) {
  if (kraus.empty()) throw ChannelError("from_kraus: empty Kraus list");
  const auto rows = kraus.front().rows();
  const auto cols = kraus.front().cols();
  if (rows < 1 || cols < 1) throw ChannelError("from_kraus: empty Kraus operator");
  CMatrix sum = CMatrix::Zero(cols, cols);
  for (const auto& e : kraus) {
    if (e.rows() != rows || e.cols() != cols) {
      throw ChannelError("from_kraus: Kraus operators do not share dimensions");
    }
    sum += e.adjoint() * e;
  }
  const double residual = max_abs(sum - CMatrix::Identity(cols, cols));
  if (residual > kTraceTol) {
    std::ostringstream os;
    os << "from_kraus: not trace preserving (max |sum E^dagger E - 1| = " << residual << ")";
    throw ChannelError(os.str());
  }
  QuantumChannel ch;
  ch.dim_in_ = static_cast<int>(cols);
  ch.dim_out_ = static_cast<int>(rows);
  ch.kraus_ = std::move(kraus);
  ch.name_ = std::move(name);
  ch.tp_residual_ = residual;
  return ch;
}

ChoiMatrix choi(const QuantumChannel& ch) {
  const int dA = ch.dim_in();
  const int dB = ch.dim_out();
  // |E⟫ = Σ_i |i⟩ ⊗ E|i⟩, J = Σ_k |E_k⟫⟪E_k|
  CMatrix j = CMatrix::Zero(dA * dB, dA * dB);
  CVector v(dA * dB);
  for (const auto& e : ch.kraus()) {
    for (int i = 0; i < dA; ++i) v.segment(i * dB, dB) = e.col(i);
    j += v * v.adjoint();
  }
  return {j, BipartiteShape(dA, dB)};
}

KrausSupport kraus_support(const QuantumChannel& ch, double rank_tol) {
  const auto j = choi(ch);
  KrausSupport ks;
  ks.projector = support_projector(j.matrix, rank_tol);
  ks.shape = j.shape;
  ks.rank = static_cast<int>(std::lround(ks.projector.trace().real()));
  return ks;
}

std::vector<CMatrix> kraus_from_choi(const CMatrix& j, BipartiteShape s, double rank_tol) {
  const auto es = hermitian_eig(j, {1e-9});
  const double top = std::max(1.0, es.values.maxCoeff());
  std::vector<CMatrix> kraus;
  for (Eigen::Index k = es.values.size() - 1; k >= 0; --k) {
    const double lam = es.values(k);
    if (lam <= rank_tol * top) continue;
    CMatrix e(s.dB, s.dA);
    for (int i = 0; i < s.dA; ++i) e.col(i) = std::sqrt(lam) * es.vectors.col(k).segment(i * s.dB, s.dB);
    kraus.push_back(std::move(e));
  }
  return kraus;
}

QuantumChannel tensor_channels(const QuantumChannel& n, const QuantumChannel& m) {
  std::vector<CMatrix> kraus;
  kraus.reserve(n.kraus().size() * m.kraus().size());
  for (const auto& a : n.kraus()) {
    for (const auto& b : m.kraus()) kraus.push_back(kron(a, b));
  }
  return from_kraus(std::move(kraus), n.name() + "⊗" + m.name());
}

CMatrix tensor_choi(const ChoiMatrix& jn, const ChoiMatrix& jm) {
  const int dims[] = {jn.shape.dA, jn.shape.dB, jm.shape.dA, jm.shape.dB};
  const int perm[] = {0, 2, 1, 3};
  return permute_systems(kron(jn.matrix, jm.matrix), dims, perm);
}

namespace {

void require(bool ok, const char* msg) {
  if (!ok) throw ChannelError(msg);
}

}  // namespace

QuantumChannel identity_channel(int d) {
  require(d >= 2, "identity_channel: d must be at least 2");
  return from_kraus({CMatrix::Identity(d, d)}, "identity" + std::to_string(d));
}

QuantumChannel erasure_channel(int d, double p) {
  require(d >= 2, "erasure_channel: d must be at least 2");
  require(p >= 0.0 && p <= 1.0, "erasure_channel: p must lie in [0, 1]");
  std::vector<CMatrix> kraus;
  if (p < 1.0) {
    CMatrix keep = CMatrix::Zero(d + 1, d);
    keep.topRows(d) = std::sqrt(1.0 - p) * CMatrix::Identity(d, d);
    kraus.push_back(keep);
  }
  if (p > 0.0) {
    for (int i = 0; i < d; ++i) {
      CMatrix flag = CMatrix::Zero(d + 1, d);
      flag(d, i) = std::sqrt(p);
      kraus.push_back(flag);
    }
  }
  std::ostringstream name;
  name << "erasure" << d << "(" << p << ")";
  return from_kraus(std::move(kraus), name.str());
}

QuantumChannel werner_holevo(int d) {
  require(d >= 2, "werner_holevo: d must be at least 2");
  const CMatrix j = (CMatrix::Identity(d * d, d * d) - swap_operator(d)) / double(d - 1);
  return from_kraus(kraus_from_choi(j, BipartiteShape(d, d)), "werner" + std::to_string(d));
}

QuantumChannel nr_channel(double r) {
  require(r >= 0.0 && r <= 0.5, "nr_channel: r must lie in [0, 0.5]");
  CMatrix e0 = CMatrix::Zero(2, 3);
  CMatrix e1 = CMatrix::Zero(2, 3);
  e0(0, 0) = 1.0;
  e0(1, 1) = std::sqrt(r);
  e1(0, 1) = std::sqrt(1.0 - r);
  e1(1, 2) = 1.0;
  std::ostringstream name;
  name << "nr(" << r << ")";
  return from_kraus({e0, e1}, name.str());
}

QuantumChannel mixed_unitary(const std::vector<CMatrix>& unitaries, const std::vector<double>& probs) {
  require(!unitaries.empty(), "mixed_unitary: no unitaries given");
  require(unitaries.size() == probs.size(), "mixed_unitary: one probability per unitary required");
  double total = 0.0;
  for (double p : probs) {
    require(p > 0.0, "mixed_unitary: probabilities must be strictly positive");
    total += p;
  }
  require(std::abs(total - 1.0) <= 1e-10, "mixed_unitary: probabilities must sum to 1");
  std::vector<CMatrix> kraus;
  for (std::size_t i = 0; i < unitaries.size(); ++i) {
    const auto& u = unitaries[i];
    require(u.rows() == u.cols(), "mixed_unitary: unitaries must be square");
    require(max_abs(u.adjoint() * u - CMatrix::Identity(u.rows(), u.cols())) <= 1e-9,
            "mixed_unitary: operator is not unitary");
    kraus.push_back(std::sqrt(probs[i]) * u);
  }
  return from_kraus(std::move(kraus), "mixed-unitary");
}

namespace {

// Ginibre matrix -> QR with R diagonal made positive.
CMatrix haar_isometry(int rows, int cols, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  CMatrix z(rows, cols);
  for (int c = 0; c < cols; ++c) {
    for (int r = 0; r < rows; ++r) z(r, c) = Complex(g(rng), g(rng));
  }
  Eigen::HouseholderQR<CMatrix> qr(z);
  CMatrix q = qr.householderQ() * CMatrix::Identity(rows, cols);
  const CMatrix& rr = qr.matrixQR();
  for (int c = 0; c < cols; ++c) {
    const Complex d = rr(c, c);
    const double a = std::abs(d);
    if (a > 0) q.col(c) *= d / a;
  }
  return q;
}

}  // namespace

CMatrix random_unitary(int d, std::uint64_t seed) {
  require(d >= 1, "random_unitary: d must be positive");
  std::mt19937_64 rng(seed);
  return haar_isometry(d, d, rng);
}

QuantumChannel random_channel(int dim_in, int dim_out, int kraus_rank, std::uint64_t seed) {
  require(dim_in >= 1 && dim_out >= 1, "random_channel: dimensions must be positive");
  require(kraus_rank >= 1 && kraus_rank <= dim_in * dim_out,
          "random_channel: kraus rank must lie in [1, dim_in * dim_out]");
  require(dim_out * kraus_rank >= dim_in,
          "random_channel: dim_out * kraus_rank must be at least dim_in");
  std::mt19937_64 rng(seed);
  const CMatrix v = haar_isometry(dim_out * kraus_rank, dim_in, rng);
  std::vector<CMatrix> kraus;
  for (int k = 0; k < kraus_rank; ++k) kraus.push_back(v.middleRows(k * dim_out, dim_out));
  std::ostringstream name;
  name << "random" << dim_in << "to" << dim_out << "r" << kraus_rank << "s" << seed;
  return from_kraus(std::move(kraus), name.str());
}

CMatrix pauli_x() {
  CMatrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

CMatrix pauli_y() {
  CMatrix m(2, 2);
  m << 0, Complex(0, -1), Complex(0, 1), 0;
  return m;
}

CMatrix pauli_z() {
  CMatrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

}  // namespace qcap
