#include <doctest.h>

#include <cmath>

#include "qcap/models.hpp"
#include "test_util.hpp"

using namespace qcap;
using namespace qcap::testing;

namespace {

constexpr double kFeasTol = 1e-6;

// Checks the fidelity constraints for (W, ρ) at code size k by eigenvalues.
void check_fidelity_feasible(const CMatrix& w, const CMatrix& rho, BipartiteShape s, double k, CodeClass code,
                             double tol = kFeasTol) {
  const CMatrix r1 = kron(rho, identity(s.dB));
  CHECK(min_eig(w) >= -tol);
  CHECK(min_eig(r1 - w) >= -tol);
  CHECK(std::abs(rho.trace().real() - 1.0) <= tol);
  if (has_ppt(code)) {
    const CMatrix wt = partial_transpose(w, s, Subsystem::B);
    CHECK(min_eig(r1 / k - wt) >= -tol);
    CHECK(min_eig(r1 / k + wt) >= -tol);
  }
  if (has_ns(code)) {
    CHECK(max_abs(partial_trace(w, s, Subsystem::A) - identity(s.dB) / (k * k)) <= tol);
  }
}

// Checks the dual fidelity constraints and returns the dual objective.
double check_fidelity_dual(const FidelityDual& d, const ChoiMatrix& j, double k, CodeClass code) {
  const BipartiteShape s = j.shape;
  CMatrix lhs = d.x - j.matrix;
  CMatrix marg = partial_trace(d.x, s, Subsystem::B);
  if (has_ns(code)) lhs += kron(identity(s.dA), d.s_b);
  if (has_ppt(code)) {
    CHECK(min_eig(d.y) >= -kFeasTol);
    CHECK(min_eig(d.v) >= -kFeasTol);
    lhs -= partial_transpose(d.y - d.v, s, Subsystem::B);
    marg += partial_trace(d.y + d.v, s, Subsystem::B) / k;
  }
  CHECK(min_eig(d.x) >= -kFeasTol);
  CHECK(min_eig(lhs) >= -kFeasTol);
  CHECK(min_eig(d.mu * identity(s.dA) - marg) >= -kFeasTol);
  return d.mu + (has_ns(code) ? d.s_b.trace().real() / (k * k) : 0.0);
}

CMatrix werner_witness(int d) {
  return identity(d * d) / (d + 2.0) - swap_operator(d) * (2.0 / (d * (d + 2.0)));
}

}  // namespace

TEST_CASE("code class names") {
  CHECK(parse_code_class("ns") == CodeClass::NS);
  CHECK(parse_code_class("pptp") == CodeClass::PPTp);
  CHECK(parse_code_class("ns-pptp") == CodeClass::NSandPPTp);
  CHECK_THROWS_AS(parse_code_class("PPT"), std::invalid_argument);
  for (auto c : {CodeClass::NS, CodeClass::PPTp, CodeClass::NSandPPTp}) CHECK(parse_code_class(to_string(c)) == c);
}

TEST_CASE("fidelity is one at k = 1") {
  for (auto c : {CodeClass::NS, CodeClass::PPTp, CodeClass::NSandPPTp}) {
    for (const auto& ch : {nr_channel(0.3), erasure_channel(2, 0.5), random_channel(2, 2, 2, 11)}) {
      const auto r = fidelity(ch, 1.0, c);
      CHECK(std::abs(r.value - 1.0) <= 1e-7);
      check_fidelity_feasible(r.w, r.rho, choi(ch).shape, 1.0, c);
      CHECK(std::abs((r.w * choi(ch).matrix).trace().real() - r.value) <= 1e-7);
    }
  }
}

TEST_CASE("identity channel transmits d dimensions perfectly") {
  for (int d : {2, 3}) {
    // hand witness ρ = 1/d, W = Φ/d² is feasible for every class
    const CMatrix w = max_entangled(d) / double(d * d);
    const CMatrix rho = identity(d) / double(d);
    check_fidelity_feasible(w, rho, BipartiteShape(d, d), d, CodeClass::NSandPPTp, 1e-12);
    CHECK(std::abs((w * choi(identity_channel(d)).matrix).trace().real() - 1.0) <= 1e-12);
    for (auto c : {CodeClass::NS, CodeClass::PPTp, CodeClass::NSandPPTp}) {
      CHECK(std::abs(fidelity(identity_channel(d), d, c).value - 1.0) <= 1e-6);
    }
  }
  const double f = fidelity(identity_channel(2), 3.0, CodeClass::PPTp).value;
  CHECK(f < 1.0 - 1e-3);
  CHECK(f > 0.0);
}

TEST_CASE("Werner-Holevo witness at k = (d + 2)/d") {
  for (int d : {3, 4}) {
    const double k = (d + 2.0) / d;
    const CMatrix w = werner_witness(d);
    const CMatrix rho = identity(d) / double(d);
    const auto j = choi(werner_holevo(d));
    check_fidelity_feasible(w, rho, j.shape, k, CodeClass::PPTp, 1e-9);
    CHECK(std::abs((w * j.matrix).trace().real() - 1.0) <= 1e-9);
    CHECK(fidelity(werner_holevo(d), k, CodeClass::PPTp).value >= 1.0 - 1e-6);
  }
}

TEST_CASE("primal and dual fidelity agree with feasible certificates") {
  for (std::uint64_t seed : {3u, 4u}) {
    const auto ch = random_channel(2, 2, 2, seed);
    const auto j = choi(ch);
    for (auto c : {CodeClass::NS, CodeClass::PPTp, CodeClass::NSandPPTp}) {
      const auto r = fidelity(j, 1.7, c, Side::Both);
      REQUIRE(r.dual.has_value());
      check_fidelity_feasible(r.w, r.rho, j.shape, 1.7, c);
      const double dual_obj = check_fidelity_dual(*r.dual, j, 1.7, c);
      CHECK(std::abs(dual_obj - *r.dual_value) <= 1e-6);
      CHECK(std::abs(r.value - *r.dual_value) <= 1e-6 * (1.0 + std::abs(r.value)));
    }
  }
}

TEST_CASE("fidelity invariants") {
  const auto ch = random_channel(3, 2, 2, 21);
  double prev = 2.0;
  for (double k : {1.0, 1.3, 1.8, 2.5, 3.0}) {
    const double ns = fidelity(ch, k, CodeClass::NS).value;
    const double ppt = fidelity(ch, k, CodeClass::PPTp).value;
    const double both = fidelity(ch, k, CodeClass::NSandPPTp).value;
    for (double v : {ns, ppt, both}) {
      CHECK(v >= -1e-7);
      CHECK(v <= 1.0 + 1e-7);
    }
    CHECK(both <= std::min(ns, ppt) + 1e-6);
    CHECK(ppt <= prev + 1e-6);
    prev = ppt;
  }
  CHECK_THROWS_AS(fidelity(ch, 0.5, CodeClass::PPTp), std::invalid_argument);
  CHECK_THROWS_AS(fidelity(ch, std::nan(""), CodeClass::PPTp), std::invalid_argument);
}

TEST_CASE("deviation vanishes exactly up to kappa") {
  const auto ks = kraus_support(identity_channel(2));
  CHECK(deviation(ks, 2.0, CodeClass::PPTp) >= -1e-7);
  CHECK(deviation(ks, 2.0, CodeClass::NS) >= -1e-7);
  CHECK(deviation(ks, 2.5, CodeClass::PPTp) < -1e-3);
  CHECK(deviation(ks, 2.5, CodeClass::NS) < -1e-3);
  const auto wk = kraus_support(werner_holevo(3));
  CHECK(deviation(wk, 5.0 / 3.0, CodeClass::PPTp) >= -1e-7);
  CHECK(deviation(wk, 1.8, CodeClass::PPTp) < -1e-4);
}

TEST_CASE("kappa examples") {
  for (int d : {2, 3}) {
    const auto r = kappa(identity_channel(d), CodeClass::PPTp);
    CHECK(std::abs(r.kappa - d) <= 1e-9);
    CHECK(r.one_shot == d);
    CHECK(r.hi - r.lo <= 1e-4);
  }
  const auto w3 = kappa(werner_holevo(3), CodeClass::PPTp);
  CHECK(std::abs(w3.kappa - 5.0 / 3.0) <= 1e-4);
  CHECK(w3.lo <= 5.0 / 3.0 + 1e-6);
  CHECK(w3.one_shot == 1);
  const auto w4 = kappa(werner_holevo(4), CodeClass::PPTp);
  CHECK(std::abs(w4.kappa - 1.5) <= 1e-4);
  const auto ns = kappa(identity_channel(2), CodeClass::NSandPPTp);
  CHECK(std::abs(ns.kappa - 2.0) <= 1e-4);
}

TEST_CASE("upsilon certificate") {
  for (int d : {2, 3}) {
    const auto r = upsilon(kraus_support(identity_channel(d)));
    CHECK(std::abs(r.upsilon - d * d) <= 1e-6);
    CHECK(std::abs(r.kappa_ns - d) <= 1e-6);
  }
  for (const auto& ch : {werner_holevo(3), nr_channel(0.2), random_channel(2, 3, 2, 5)}) {
    const auto ks = kraus_support(ch);
    const auto r = upsilon(ks);
    const BipartiteShape s = ks.shape;
    const CMatrix gap = kron(r.s, identity(s.dB)) - r.u;
    CHECK(min_eig(r.u) >= -1e-6);
    CHECK(min_eig(gap) >= -1e-6);
    CHECK(std::abs((ks.projector * gap).trace().real()) <= 1e-6);
    CHECK(max_abs(partial_trace(r.u, s, Subsystem::A) - identity(s.dB)) <= 1e-6);
    CHECK(std::abs(r.s.trace().real() - r.upsilon) <= 1e-6);
    CHECK(r.upsilon >= 1.0 - 1e-6);
  }
}

TEST_CASE("Gamma of the identity with hand certificates") {
  for (int d : {2, 3}) {
    const auto j = choi(identity_channel(d));
    const BipartiteShape s = j.shape;
    const CMatrix rho = identity(d) / double(d);
    const CMatrix r = max_entangled(d) / double(d);
    const CMatrix rt = partial_transpose(r, s, Subsystem::B);
    CHECK(min_eig(r) >= -1e-12);
    CHECK(min_eig(kron(rho, identity(d)) - rt) >= -1e-12);
    CHECK(min_eig(kron(rho, identity(d)) + rt) >= -1e-12);
    CHECK(std::abs((r * j.matrix).trace().real() - d) <= 1e-12);
    const CMatrix f = swap_operator(d);
    const CMatrix v = (identity(d * d) + f) / 2.0;
    const CMatrix y = (identity(d * d) - f) / 2.0;
    CHECK(min_eig(v) >= -1e-12);
    CHECK(min_eig(y) >= -1e-12);
    CHECK(min_eig(partial_transpose(v - y, s, Subsystem::B) - j.matrix) >= -1e-12);
    CHECK(max_eig(partial_trace(v + y, s, Subsystem::B)) <= d + 1e-12);

    const auto g = gamma(identity_channel(d), Side::Both);
    CHECK(std::abs(g.gamma - d) <= 1e-6);
    REQUIRE(g.dual_mu.has_value());
    CHECK(std::abs(*g.dual_mu - d) <= 1e-6);
    CHECK(std::abs(g.q_gamma - std::log2(d)) <= 1e-6);
  }
}

TEST_CASE("Gamma solutions are feasible") {
  for (const auto& ch : {werner_holevo(3), random_channel(2, 2, 2, 8)}) {
    const auto j = choi(ch);
    const BipartiteShape s = j.shape;
    const auto g = gamma(j, Side::Both);
    const CMatrix r1 = kron(g.rho, identity(s.dB));
    const CMatrix rt = partial_transpose(g.r, s, Subsystem::B);
    CHECK(min_eig(g.r) >= -kFeasTol);
    CHECK(min_eig(r1 - rt) >= -kFeasTol);
    CHECK(min_eig(r1 + rt) >= -kFeasTol);
    CHECK(std::abs((g.r * j.matrix).trace().real() - g.gamma) <= 1e-6);
    CHECK(min_eig(g.dual_y) >= -kFeasTol);
    CHECK(min_eig(g.dual_v) >= -kFeasTol);
    CHECK(min_eig(partial_transpose(g.dual_v - g.dual_y, s, Subsystem::B) - j.matrix) >= -kFeasTol);
    CHECK(max_eig(partial_trace(g.dual_v + g.dual_y, s, Subsystem::B)) <= *g.dual_mu + kFeasTol);
    CHECK(std::abs(g.gamma - *g.dual_mu) <= 1e-6 * (1.0 + g.gamma));
  }
  CHECK(gamma(werner_holevo(3)).q_gamma >= std::log2(5.0 / 3.0) - 1e-6);
}

TEST_CASE("cb norm of the partially transposed Choi matrix") {
  const auto r = cb_norm_pt(identity_channel(2));
  CHECK(std::abs(r.value - 2.0) <= 1e-6);
  CHECK(std::abs(r.q_theta - 1.0) <= 1e-6);
  // hand witness ρ0 = ρ1 = 1/2, X = F/2 attains tr(Φ^TB X) = 2
  const BipartiteShape s(2, 2);
  const CMatrix x = swap_operator(2) / 2.0;
  const CMatrix half = identity(2) / 2.0;
  CMatrix big(8, 8);
  big << kron(half, identity(2)), x, x.adjoint(), kron(half, identity(2));
  CHECK(min_eig(big) >= -1e-12);
  CHECK(std::abs((partial_transpose(max_entangled(2), s, Subsystem::B) * x).trace().real() - 2.0) <= 1e-12);

  for (const auto& ch : {werner_holevo(3), nr_channel(0.25), random_channel(2, 2, 3, 9)}) {
    const auto c = cb_norm_pt(ch);
    const auto j = choi(ch);
    const int n = j.shape.side();
    CMatrix m(2 * n, 2 * n);
    m << kron(c.rho0, identity(j.shape.dB)), c.x, c.x.adjoint(), kron(c.rho1, identity(j.shape.dB));
    CHECK(min_eig(m) >= -kFeasTol);
    CHECK(std::abs((partial_transpose(j.matrix, j.shape, Subsystem::B) * c.x).trace().real() - c.value) <= 1e-6);
    CHECK(gamma(ch).q_gamma <= c.q_theta + 2e-5);
  }
}

TEST_CASE("activated kappa and tensor-identity reduction") {
  const KappaSettings st;
  CHECK(std::abs(kappa_activated(identity_channel(2), 3, st) - 2.0) <= 1e-9);
  CHECK(std::abs(kappa_activated(werner_holevo(3), 3, st) - 5.0 / 3.0) <= 1e-9);

  const auto nr = nr_channel(0.2);
  const auto ks = kraus_support(nr);
  const auto big = kraus_support(tensor_channels(nr, identity_channel(2)));
  for (double k : {2.0, 2.6, 3.2}) {
    CHECK(std::abs(deviation_tensor_identity(ks, 2, k) - deviation(big, k, CodeClass::PPTp)) <= 1e-6);
  }
  const double base = kappa(nr, CodeClass::PPTp).kappa;
  CHECK(std::abs(kappa_tensor_identity(nr, 2).kappa - 2.0 * base) <= 1e-3);
}

TEST_CASE("superactivation bound is additive in Q_Gamma") {
  CHECK(std::abs(superactivation_bound(identity_channel(2), identity_channel(2)) - 2.0) <= 1e-6);
  const auto a = nr_channel(0.1);
  const auto b = werner_holevo(3);
  const double joint = gamma(tensor_channels(a, identity_channel(2))).q_gamma;
  CHECK(std::abs(joint - (gamma(a).q_gamma + 1.0)) <= 1e-5);
  CHECK(std::abs(superactivation_bound(a, b) - (gamma(a).q_gamma + gamma(b).q_gamma)) <= 1e-9);
}

TEST_CASE("fidelity chain for tensor products") {
  const auto v = lemma1_check(identity_channel(2), identity_channel(2), 2.0);
  CHECK(std::abs(v.lhs - 1.0) <= 1e-6);
  CHECK(std::abs(v.mid - 1.0) <= 1e-6);
  CHECK(std::abs(v.rhs - 1.0) <= 1e-6);
  const auto w = lemma1_check(nr_channel(0.3), nr_channel(0.1), 1.4);
  CHECK(w.lhs <= w.mid + 1e-6);
  CHECK(w.mid <= w.rhs + 1e-6);
}
