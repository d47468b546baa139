#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <unsupported/Eigen/MatrixFunctions>

#include "doctest.h"
#include "emz/errors.hpp"
#include "emz/gibbs.hpp"
#include "emz/hypo.hpp"
#include "emz/rng.hpp"
#include "emz/spectral.hpp"

using namespace emz;

namespace {

GalerkinBasis make_basis(const Potential& pot, double beta, int nq, int np) {
  const double hw = suggested_halfwidth(pot, beta, nq);
  return GalerkinBasis(GibbsMeasure(pot, beta, hw, suggested_quad_nodes(nq)), nq, np);
}

// For the harmonic chain with u = {p} the correction form lives on span{q, p}:
// with a = <q,g>, b = <p,g> it equals (ab - a^2)/2 while ||(I-Pi)g|| ||g|| =
// |b| sqrt(a^2+b^2), so the tightest constant is the maximum over t = a/b of
// (t - t^2) / (2 sqrt(1 + t^2)), found here by golden section.
double harmonic_c4_oracle() {
  auto f = [](double t) { return 0.5 * (t - t * t) / std::sqrt(1.0 + t * t); };
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double lo = 0.0, hi = 1.0;
  double p1 = hi - gr * (hi - lo), p2 = lo + gr * (hi - lo);
  double f1 = f(p1), f2 = f(p2);
  for (int it = 0; it < 200; ++it) {
    if (f1 > f2) {
      hi = p2; p2 = p1; f2 = f1;
      p1 = hi - gr * (hi - lo); f1 = f(p1);
    } else {
      lo = p1; p1 = p2; f1 = f2;
      p2 = lo + gr * (hi - lo); f2 = f(p2);
    }
  }
  return std::max(f1, f2);
}

double kappa_formula(double delta, double eps, const HypoConstants& k, double c) {
  const double t1 = k.lambda_m - eps * (1.0 + c) * (1.0 + 0.5 / delta);
  const double t2 = eps * (k.lambda_M / (1.0 + k.lambda_M) - 0.5 * (1.0 + c) * delta);
  return std::min(t1, t2);
}

}  // namespace

TEST_CASE("coercivity constants: harmonic oracle values") {
  auto basis = make_basis(Potential::harmonic(1.0), 1.0, 16, 16);
  auto ops = assemble_operators(basis, 1.0);
  const Eigen::MatrixXd a = build_aux_a(ops);
  const HypoConstants k = estimate_constants(ops, a);

  // dissipative spectrum is gamma*j on Hermite degree j, so the restricted
  // minimum sits at the first excited mode
  CHECK(std::abs(k.lambda_m - 1.0) < 1e-8);
  // Gaussian Poincare constant: ||p f'(q)||^2 = beta^{-1} ||f'||^2 >= ||f - mean||^2
  CHECK(std::abs(k.lambda_M - 1.0) < 1e-6);
  CHECK(k.c1 >= 0.0);
  CHECK(k.c2 >= 0.0);
  CHECK(k.c3 == k.c1 + k.c2);
  CHECK(k.c4 == 0.0);  // no observables supplied

  // the auxiliary operator does not vanish on Ran(Pi): A^T q = -p/2 here, so
  // the shortcut ||A^T g|| <= ||(I-Pi)g|| fails by a quarter on unit vectors
  CHECK(k.chain_excess > 0.2);
  CHECK(!k.chain_bound_holds);

  auto basis_q = make_basis(Potential::quartic(1.0), 1.0, 10, 10);
  auto ops_q = assemble_operators(basis_q, 2.5);
  const HypoConstants kq = estimate_constants(ops_q, build_aux_a(ops_q));
  CHECK(std::abs(kq.lambda_m - 2.5) < 1e-8);
  CHECK(kq.lambda_M > 0.0);
}

TEST_CASE("mori correction: harmonic closed form and trivial cases") {
  auto basis = make_basis(Potential::harmonic(1.0), 1.0, 16, 16);
  auto ops = assemble_operators(basis, 1.0);
  const Eigen::MatrixXd a = build_aux_a(ops);
  auto mori = build_mori(ops, basis, {Observable::momentum()});

  const HypoConstants k = estimate_constants(ops, a, &mori);
  const double oracle = harmonic_c4_oracle();
  CHECK(std::abs(oracle - 0.112856) < 1e-4);
  CHECK(std::abs(k.c4 - oracle) < 1e-6);

  // the correction never enters without observables
  CHECK(estimate_constants(ops, a, nullptr).c4 == 0.0);
}

TEST_CASE("certificate search maximizes the two-term bound") {
  HypoConstants synth;
  synth.lambda_m = 1.0;
  synth.lambda_M = 1.0;
  synth.c1 = 0.5;
  synth.c2 = 0.5;
  synth.c3 = 1.0;
  synth.c4 = 0.0;

  // a positive point exists by direct evaluation
  CHECK(kappa_formula(0.25, 0.01, synth, 1.0) > 0.0);

  // independent dense scan of the same closed form
  double brute = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < 2000; ++i) {
    const double delta = 1e-6 * std::pow(1e7, i / 1999.0);
    for (int j = 0; j < 2000; ++j) {
      const double eps = 1e-8 * std::pow(1e8, j / 1999.0);
      if (eps >= 1.0) continue;
      brute = std::max(brute, kappa_formula(delta, eps, synth, 1.0));
    }
  }

  const HypoCertificate cert = certify(synth, CertTarget::K);
  CHECK(cert.success);
  CHECK(cert.kappa > 0.0);
  CHECK(cert.kappa >= brute - 1e-9);
  CHECK(std::abs(cert.kappa - brute) < 2e-3);
  CHECK(cert.epsilon > 0.0);
  CHECK(cert.epsilon < 1.0);
  CHECK(cert.delta > 0.0);
  CHECK(std::abs(cert.lambda_cert - cert.kappa / (1.0 + cert.epsilon)) < 1e-15);
  CHECK(std::abs(cert.c_cert - std::sqrt((1.0 + cert.epsilon) / (1.0 - cert.epsilon))) < 1e-15);

  SUBCASE("enlarging any boundedness constant never helps") {
    double prev = cert.lambda_cert;
    for (double c4 : {0.25, 1.0, 4.0}) {
      HypoConstants h = synth;
      h.c4 = c4;
      const double lam = certify(h, CertTarget::QKQ).lambda_cert;
      CHECK(lam <= prev + 1e-12);
      prev = lam;
    }
    prev = cert.lambda_cert;
    for (double c1 : {1.0, 2.0, 8.0}) {
      HypoConstants h = synth;
      h.c1 = c1;
      h.c3 = h.c1 + h.c2;
      const double lam = certify(h, CertTarget::K).lambda_cert;
      CHECK(lam <= prev + 1e-12);
      prev = lam;
    }
  }
}

TEST_CASE("certificates stay below measured gaps on the harmonic chain") {
  auto basis = make_basis(Potential::harmonic(1.0), 1.0, 16, 16);
  auto ops = assemble_operators(basis, 1.0);
  const Eigen::MatrixXd a = build_aux_a(ops);
  auto mori = build_mori(ops, basis, {Observable::momentum()});
  const HypoConstants k = estimate_constants(ops, a, &mori);

  const double gap_k = compute_spectrum(ops.K).gap;
  const HypoCertificate ck = certify(k, CertTarget::K, 200, 200, gap_k);
  CHECK(ck.success);
  CHECK(ck.lambda_cert > 0.0);
  CHECK(ck.lambda_cert <= 0.5 + 1e-8);
  CHECK(ck.lambda_cert <= gap_k + 1e-8);
  CHECK(ck.comparison_gap == gap_k);

  const double gap_q = compute_spectrum(build_qkq(ops, mori)).gap;
  const HypoCertificate cq = certify(k, CertTarget::QKQ, 200, 200, gap_q);
  CHECK(cq.success);
  CHECK(cq.lambda_cert <= gap_q + 1e-8);
  CHECK(cq.lambda_cert <= ck.lambda_cert);
}

TEST_CASE("quartic momentum coupling defeats the orthogonal certificate") {
  auto basis = make_basis(Potential::quartic(1.0), 1.0, 12, 12);
  auto ops = assemble_operators(basis, 1.0);
  const Eigen::MatrixXd a = build_aux_a(ops);

  auto mori_p = build_mori(ops, basis, {Observable::momentum()});
  const HypoConstants kp = estimate_constants(ops, a, &mori_p);
  CHECK(std::isinf(kp.c4));

  const HypoCertificate cert = certify(kp, CertTarget::QKQ);
  CHECK(!cert.success);
  CHECK(cert.kappa <= 0.0);
  CHECK(!cert.message.empty());
  // the full-generator certificate is untouched by the correction
  CHECK(certify(kp, CertTarget::K).success);

  auto mori_q = build_mori(ops, basis, {Observable::position()});
  const HypoConstants kq = estimate_constants(ops, a, &mori_q);
  CHECK(std::isfinite(kq.c4));
  CHECK(kq.c4 >= 0.0);
}

TEST_CASE("entropy decay obeys the certified envelope") {
  auto basis = make_basis(Potential::harmonic(1.0), 1.0, 16, 16);
  auto ops = assemble_operators(basis, 1.0);
  const Eigen::MatrixXd a = build_aux_a(ops);
  auto mori = build_mori(ops, basis, {Observable::momentum()});
  const HypoConstants k = estimate_constants(ops, a, &mori);
  const int n = basis.size();

  SUBCASE("zero start stays zero") {
    const EntropySeries es = entropy_monitor(ops, a, 0.3, Eigen::VectorXd::Zero(n),
                                             1.0, 0.1, CertTarget::K);
    CHECK(es.h.cwiseAbs().maxCoeff() == 0.0);
    CHECK(es.equivalence_ok);
  }

  SUBCASE("random starts, both flows") {
    const HypoCertificate ck = certify(k, CertTarget::K);
    const HypoCertificate cq = certify(k, CertTarget::QKQ);
    REQUIRE(ck.success);
    REQUIRE(cq.success);

    for (int trial = 0; trial < 10; ++trial) {
      CounterRng rng(977, static_cast<std::uint64_t>(trial));
      Eigen::VectorXd g0(n);
      for (int i = 0; i < n; ++i) g0(i) = rng.gaussian();

      for (const auto* cert : {&ck, &cq}) {
        const EntropySeries es =
            entropy_monitor(ops, a, cert->epsilon, g0, 3.0, 0.05, cert->target, &mori);
        CHECK(es.equivalence_ok);
        const double h0 = es.h(0);
        CHECK(h0 > 0.0);
        const double rate = 2.0 * cert->kappa / (1.0 + cert->epsilon);
        for (int m = 0; m < es.t.size(); ++m) {
          CHECK(es.h(m) <= h0 * std::exp(-rate * es.t(m)) * (1.0 + 1e-6));
          if (m > 0) CHECK(es.h(m) <= es.h(m - 1) * (1.0 + 1e-12));
        }
      }
    }
  }

  SUBCASE("series matches direct exponential propagation") {
    CounterRng rng(31, 0);
    Eigen::VectorXd g0(n);
    for (int i = 0; i < n; ++i) g0(i) = rng.gaussian();
    g0(0) = 0.0;
    const double eps = 0.3;
    const EntropySeries es = entropy_monitor(ops, a, eps, g0, 0.7, 0.07, CertTarget::K);
    const Eigen::VectorXd gt = ((0.7 * ops.K).exp() * g0).eval();
    const double h_direct = 0.5 * gt.squaredNorm() + eps * gt.dot(a * gt);
    CHECK(std::abs(es.h(es.h.size() - 1) - h_direct) < 1e-10 * std::max(1.0, h_direct));
  }
}

TEST_CASE("hypo argument validation") {
  auto basis = make_basis(Potential::harmonic(1.0), 1.0, 8, 8);
  auto ops = assemble_operators(basis, 1.0);
  const Eigen::MatrixXd a = build_aux_a(ops);
  const int n = basis.size();

  CHECK_THROWS_AS(entropy_monitor(ops, a, 1.0, Eigen::VectorXd::Zero(n), 1.0, 0.1,
                                  CertTarget::K),
                  DomainError);
  CHECK_THROWS_AS(entropy_monitor(ops, a, -0.1, Eigen::VectorXd::Zero(n), 1.0, 0.1,
                                  CertTarget::K),
                  DomainError);
  CHECK_THROWS_AS(entropy_monitor(ops, a, 0.5, Eigen::VectorXd::Zero(n + 1), 1.0, 0.1,
                                  CertTarget::K),
                  DomainError);
  CHECK_THROWS_AS(entropy_monitor(ops, a, 0.5, Eigen::VectorXd::Zero(n), 1.0, 0.0,
                                  CertTarget::K),
                  DomainError);
  CHECK_THROWS_AS(entropy_monitor(ops, a, 0.5, Eigen::VectorXd::Zero(n), 1.0, 0.1,
                                  CertTarget::QKQ),
                  ConfigError);

  CHECK_THROWS_AS(certify(HypoConstants{}, CertTarget::K, 1, 200), DomainError);

  // degenerate splits: no Hermite complement, or nothing beyond constants
  auto flat_p = make_basis(Potential::harmonic(1.0), 1.0, 8, 1);
  auto ops_p = assemble_operators(flat_p, 1.0);
  CHECK_THROWS_AS(estimate_constants(ops_p, build_aux_a(ops_p)), ConfigError);
  auto flat_q = make_basis(Potential::harmonic(1.0), 1.0, 1, 8);
  auto ops_q = assemble_operators(flat_q, 1.0);
  CHECK_THROWS_AS(estimate_constants(ops_q, build_aux_a(ops_q)), ConfigError);

  CHECK(to_string(CertTarget::K) == "K");
  CHECK(to_string(CertTarget::QKQ) == "QKQ");
}
