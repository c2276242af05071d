#include <doctest.h>

#include <Eigen/SVD>

#include "qcap/lmi.hpp"
#include "test_util.hpp"

using namespace qcap;
using namespace qcap::lmi;
using namespace qcap::testing;

namespace {

// Objective tr(k f(X)) of a model evaluated at X = x0.
double evaluated(const CMatrix& x0, const std::function<Expr(const Expr&)>& f, const CMatrix& k) {
  Model m;
  const auto x = m.hermitian(static_cast<int>(x0.rows()));
  m.psd(m(x));
  m.maximize(f(m(x)).inner(k));
  const Compiled c = m.compile();
  return c.objective(c.encode_full({x0}));
}

}  // namespace

TEST_CASE("largest eigenvalue of a complex Hermitian matrix") {
  std::mt19937_64 rng(1);
  for (int t = 0; t < 5; ++t) {
    const CMatrix h = random_hermitian(3, rng);
    Model m;
    const auto x = m.hermitian(3, "X");
    m.psd(m(x));
    m.equal(m(x).trace(), 1.0);
    m.maximize(m(x).inner(h));
    const Compiled c = m.compile();
    const ModelSolution s = c.solve();
    REQUIRE(s.raw.status == sdp::SolveStatus::Optimal);
    CHECK(std::abs(s.value - max_eig(h)) <= 1e-7);
    CHECK(std::abs(s.bound - max_eig(h)) <= 1e-7);
    const CMatrix xv = c.value(x, s.y_full);
    CHECK(std::abs(xv.trace().real() - 1.0) <= 1e-9);
    CHECK(hermitian_defect(xv) <= 1e-12);
  }
}

TEST_CASE("minimization and multipliers") {
  // min tr X s.t. X ⪰ H, X ⪰ 0 equals tr H_+; the multiplier of X ⪰ H is the
  // projector onto the positive eigenspace
  std::mt19937_64 rng(2);
  const CMatrix h = random_hermitian(4, rng);
  const RVector ev = eigenvalues(h);
  double expected = 0.0;
  for (double v : ev) expected += std::max(v, 0.0);
  Model m;
  const auto x = m.hermitian(4);
  const int upper = m.psd(m(x) - Expr::constant(h), "X >= H");
  m.psd(m(x), "X >= 0");
  m.minimize(m(x).trace());
  const Compiled c = m.compile();
  const ModelSolution s = c.solve();
  REQUIRE(s.raw.status == sdp::SolveStatus::Optimal);
  CHECK(std::abs(s.value - expected) <= 1e-7);
  CHECK(std::abs(s.bound - expected) <= 1e-7);
  const CMatrix z = c.multiplier(upper, s.raw.x);
  CHECK(max_abs(z * z - z) <= 1e-4);
  CHECK(c.num_lmis() == 2);
  CHECK(c.lmi_size(upper) == 4);
}

TEST_CASE("trace norm through a general variable") {
  // max Re tr(C† X) s.t. [[1, X], [X†, 1]] ⪰ 0 equals the sum of singular values
  std::mt19937_64 rng(3);
  const CMatrix cm = random_complex(2, 3, rng);
  Model m;
  const auto x = m.general(2, 3);
  m.psd(Expr::block2x2(Expr::constant(identity(2)), m(x), Expr::constant(identity(3))));
  m.maximize(m(x).inner(cm.adjoint()));
  const ModelSolution s = m.compile().solve();
  REQUIRE(s.raw.status == sdp::SolveStatus::Optimal);
  CHECK(std::abs(s.value - Eigen::JacobiSVD<CMatrix>(cm).singularValues().sum()) <= 1e-7);
}

TEST_CASE("scalar variables") {
  Model m;
  const auto t = m.scalar("t");
  m.psd(Expr::constant(3.0 * identity(1)) - m(t));
  m.psd(Expr::constant(5.0 * identity(1)) - m(t));
  m.maximize(m(t));
  const Compiled c = m.compile();
  const ModelSolution s = c.solve();
  CHECK(std::abs(s.value - 3.0) <= 1e-7);
  CHECK(std::abs(c.value(t, s.y_full)(0, 0) - 3.0) <= 1e-7);
}

TEST_CASE("expression operators match dense linear algebra") {
  std::mt19937_64 rng(4);
  const BipartiteShape s(2, 3);
  const CMatrix x0 = random_hermitian(6, rng);
  const CMatrix k6 = random_hermitian(6, rng);
  const CMatrix k2 = random_hermitian(2, rng);
  const CMatrix k3 = random_hermitian(3, rng);
  const CMatrix k12 = random_hermitian(12, rng);
  const CMatrix l = random_complex(4, 6, rng);
  const CMatrix k4 = random_hermitian(4, rng);
  auto re_tr = [](const CMatrix& a, const CMatrix& b) { return (a * b).trace().real(); };

  CHECK(std::abs(evaluated(x0, [&](const Expr& e) { return e.partial_transpose(s, Subsystem::B); }, k6) -
                 re_tr(k6, partial_transpose(x0, s, Subsystem::B))) <= 1e-10);
  CHECK(std::abs(evaluated(x0, [&](const Expr& e) { return e.partial_trace(s, Subsystem::A); }, k3) -
                 re_tr(k3, partial_trace(x0, s, Subsystem::A))) <= 1e-10);
  CHECK(std::abs(evaluated(x0, [&](const Expr& e) { return e.partial_trace(s, Subsystem::B); }, k2) -
                 re_tr(k2, partial_trace(x0, s, Subsystem::B))) <= 1e-10);
  CHECK(std::abs(evaluated(x0, [&](const Expr& e) { return e.kron_identity_right(2); }, k12) -
                 re_tr(k12, kron(x0, identity(2)))) <= 1e-10);
  CHECK(std::abs(evaluated(x0, [&](const Expr& e) { return e.kron_identity_left(2); }, k12) -
                 re_tr(k12, kron(identity(2), x0))) <= 1e-10);
  CHECK(std::abs(evaluated(x0, [&](const Expr& e) { return e.sandwich(l, l.adjoint()); }, k4) -
                 re_tr(k4, l * x0 * l.adjoint())) <= 1e-10);
  CHECK(std::abs(evaluated(x0, [&](const Expr& e) { return (2.0 * e - e.adjoint()) * 0.5; }, k6) -
                 re_tr(k6, 0.5 * x0)) <= 1e-10);
}

TEST_CASE("encode and reduce round trip") {
  std::mt19937_64 rng(5);
  Model m;
  const auto x = m.hermitian(3);
  const auto g = m.general(2, 2);
  m.equal(m(x).trace(), 1.0);
  m.psd(m(x));
  m.maximize(m(x).inner(identity(3)));
  const Compiled c = m.compile();
  CMatrix xv = random_density(3, rng);
  const CMatrix gv = random_complex(2, 2, rng);
  const RVector full = c.encode_full({xv, gv});
  CHECK(max_abs(c.value(x, full) - xv) <= 1e-14);
  CHECK(max_abs(c.value(g, full) - gv) <= 1e-14);
  CHECK((c.expand(c.reduce(full)) - full).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("model errors") {
  Model m;
  const auto x = m.general(2, 2);
  const auto h = m.hermitian(2);
  CHECK_THROWS_AS(m.maximize(m(h)), DimensionError);
  CHECK_THROWS_AS(m(h) + m(h).kron_identity_right(2), DimensionError);
  CHECK_THROWS_AS(m.psd(m.operator()(m.general(2, 3))), DimensionError);
  m.psd(m(x));
  CHECK_THROWS_AS(m.compile(), NotHermitianError);
}
