#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include "qcap/channels.hpp"
#include "qcap/lmi.hpp"
#include "qcap/sdp.hpp"

namespace qcap {

enum class CodeClass { NS, PPTp, NSandPPTp };
enum class Side { Primal, Dual, Both };

const char* to_string(CodeClass c);
/// Parses "ns", "pptp", "ns-pptp" (case-sensitive).
CodeClass parse_code_class(const std::string& s);

bool has_ppt(CodeClass c);
bool has_ns(CodeClass c);

/// A model solve that did not reach an acceptable optimum.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& label, const sdp::SdpSolution& sol);
  const std::string& label() const { return label_; }
  sdp::SolveStatus status() const { return status_; }

 private:
  std::string label_;
  sdp::SolveStatus status_;
};

struct SolveInfo {
  sdp::SolveStatus status = sdp::SolveStatus::Optimal;
  int iterations = 0;
  sdp::Residuals residuals;
};

struct FidelityDual {
  double mu = 0.0;
  CMatrix s_b;  // zero when the code class has no NS constraint
  CMatrix x;
  CMatrix y;  // Y and V are zero without the PPTp constraint
  CMatrix v;
};

struct FidelityResult {
  double value = 0.0;
  CMatrix w;
  CMatrix rho;
  std::optional<double> dual_value;
  std::optional<FidelityDual> dual;
  SolveInfo info;
};

struct GammaResult {
  double gamma = 0.0;
  double q_gamma = 0.0;
  CMatrix r;
  CMatrix rho;
  std::optional<double> dual_mu;
  CMatrix dual_y;
  CMatrix dual_v;
  SolveInfo info;
};

struct CbNormResult {
  double value = 0.0;
  double q_theta = 0.0;
  CMatrix x;
  CMatrix rho0;
  CMatrix rho1;
  SolveInfo info;
};

struct UpsilonResult {
  double upsilon = 0.0;
  CMatrix u;
  CMatrix s;
  double kappa_ns = 0.0;
  SolveInfo info;
};

struct KappaSettings {
  double tol_k = 1e-4;
  double eps_d = 1e-7;  // deviation >= -eps_d counts as zero
  sdp::SolverSettings solver;
};

struct KappaResult {
  double kappa = 0.0;  // certified lower end of the bracket
  int one_shot = 0;    // floor(kappa)
  double lo = 0.0;
  double hi = 0.0;
  CodeClass code = CodeClass::PPTp;
  int solves = 0;
};

struct Lemma1Values {
  double lhs = 0.0;  // F(n1, k) · F(n2, Γ(n2))
  double mid = 0.0;  // F(n1 ⊗ n2, k Γ(n2))
  double rhs = 0.0;  // F(n1, k)
};

// Channel fidelity of k-dimensional transmission with codes of class `code`.
FidelityResult fidelity(const QuantumChannel& ch, double k, CodeClass code, Side side = Side::Primal,
                        const sdp::SolverSettings& settings = {});
FidelityResult fidelity(const ChoiMatrix& j, double k, CodeClass code, Side side = Side::Primal,
                        const sdp::SolverSettings& settings = {});

/// max tr P(W - ρ⊗1) over the fidelity constraints; zero iff perfect transmission at k.
double deviation(const KrausSupport& ks, double k, CodeClass code, const sdp::SolverSettings& settings = {});

KappaResult kappa(const QuantumChannel& ch, CodeClass code, const KappaSettings& settings = {});

UpsilonResult upsilon(const KrausSupport& ks, const sdp::SolverSettings& settings = {});

GammaResult gamma(const QuantumChannel& ch, Side side = Side::Both, const sdp::SolverSettings& settings = {});
GammaResult gamma(const ChoiMatrix& j, Side side = Side::Both, const sdp::SolverSettings& settings = {});

/// ‖J^{T_B}‖_cb with its optimal X, ρ0, ρ1.
CbNormResult cb_norm_pt(const QuantumChannel& ch, const sdp::SolverSettings& settings = {});

/// Deviation of N ⊗ I_d at code size k, from a model reduced by the isotropic
/// symmetry of the I_d factor. Equal to deviation(K(N ⊗ I_d), k, PPTp).
double deviation_tensor_identity(const KrausSupport& ks, int d, double k,
                                 const sdp::SolverSettings& settings = {});

/// κ^{PPTp}(N ⊗ I_d) via the reduced model.
KappaResult kappa_tensor_identity(const QuantumChannel& ch, int d, const KappaSettings& settings = {});

/// max over d in [2, d_max] of floor(κ^{PPTp}(N ⊗ I_d)) / d.
double kappa_activated(const QuantumChannel& ch, int d_max, const KappaSettings& settings = {});

/// Q_Γ(a) + Q_Γ(b), an upper bound on the quantum capacity of a ⊗ b.
double superactivation_bound(const QuantumChannel& a, const QuantumChannel& b,
                             const sdp::SolverSettings& settings = {});

Lemma1Values lemma1_check(const QuantumChannel& n1, const QuantumChannel& n2, double k,
                          const sdp::SolverSettings& settings = {});

}  // namespace qcap
