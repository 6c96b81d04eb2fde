#include <doctest.h>

#include <random>

#include "mfe/ltisim.hpp"

using namespace mfe;

namespace {

PolyMatrix scalar_poly(std::initializer_list<double> coeffs) {
  std::vector<Eigen::MatrixXd> c;
  for (double v : coeffs) c.push_back(Eigen::MatrixXd::Constant(1, 1, v));
  return PolyMatrix(std::move(c));
}

StateSpace first_order(double a) {  // 1/(z - a), discrete
  StateSpace ss;
  ss.time_domain = TimeDomain::kDiscrete;
  ss.h = 1.0;
  ss.A = Eigen::MatrixXd::Constant(1, 1, a);
  ss.B = Eigen::MatrixXd::Ones(1, 1);
  ss.C = Eigen::MatrixXd::Ones(1, 1);
  ss.D = Eigen::MatrixXd::Zero(1, 1);
  return ss;
}

}  // namespace

TEST_CASE("realize first-order lag") {
  // d = q + 1, P = [1]: A = [-1], B = [1], C = [1], D = [0]
  StateSpace ss = realize(scalar_poly({1.0, 1.0}), scalar_poly({1.0}), TimeDomain::kContinuous);
  CHECK(ss.A(0, 0) == doctest::Approx(-1.0));
  CHECK((ss.C * ss.B)(0, 0) == doctest::Approx(1.0));
  CHECK(ss.D(0, 0) == doctest::Approx(0.0));

  // d = q + 1, P = [q]: q/(q+1) = 1 - 1/(q+1): D = 1
  StateSpace hp = realize(scalar_poly({1.0, 1.0}), scalar_poly({0.0, 1.0}),
                          TimeDomain::kContinuous);
  CHECK(hp.D(0, 0) == doctest::Approx(1.0));
  CHECK((hp.C * hp.B)(0, 0) == doctest::Approx(-1.0));

  CHECK_THROWS_AS(realize(scalar_poly({1.0, 1.0}), scalar_poly({0.0, 0.0, 1.0}),
                          TimeDomain::kContinuous),
                  ImproperFilter);
}

TEST_CASE("realize matches direct evaluation on a frequency grid") {
  std::mt19937_64 rng(21);
  std::normal_distribution<double> gauss;
  std::vector<Eigen::MatrixXd> pc;
  for (int k = 0; k <= 2; ++k) {
    Eigen::MatrixXd m(2, 3);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 3; ++j) m(i, j) = gauss(rng);
    pc.push_back(m);
  }
  PolyMatrix p(pc);
  PolyMatrix d = scalar_poly({200.0 / 200, 30.0 / 200, 1.0 / 200});  // (q+10)(q+20)/200
  StateSpace ss = realize(d, p, TimeDomain::kContinuous);
  for (int i = 0; i < 64; ++i) {
    const double omega = std::pow(10.0, -2.0 + 4.0 * i / 63.0);
    const std::complex<double> jw(0.0, omega);
    Eigen::MatrixXcd expect = eval(p, jw) / eval(d, jw)(0, 0);
    Eigen::MatrixXcd got = freq_response(ss, jw);
    CHECK((got - expect).norm() < 1e-8 * std::max(1.0, expect.norm()));
  }
}

TEST_CASE("c2d_exact closed forms") {
  StateSpace integ;
  integ.time_domain = TimeDomain::kContinuous;
  integ.A = Eigen::MatrixXd::Zero(1, 1);
  integ.B = Eigen::MatrixXd::Ones(1, 1);
  integ.C = Eigen::MatrixXd::Ones(1, 1);
  integ.D = Eigen::MatrixXd::Zero(1, 1);
  StateSpace di = c2d_exact(integ, 0.25);
  CHECK(di.A(0, 0) == doctest::Approx(1.0));
  CHECK(di.B(0, 0) == doctest::Approx(0.25));

  StateSpace lag = integ;
  lag.A(0, 0) = -1.0;
  StateSpace dl = c2d_exact(lag, 1.0);
  CHECK(dl.A(0, 0) == doctest::Approx(std::exp(-1.0)));
  CHECK(dl.B(0, 0) == doctest::Approx(1.0 - std::exp(-1.0)));

  StateSpace dbl;
  dbl.time_domain = TimeDomain::kContinuous;
  dbl.A = (Eigen::MatrixXd(2, 2) << 0, 1, 0, 0).finished();
  dbl.B = (Eigen::MatrixXd(2, 1) << 0, 1).finished();
  dbl.C = Eigen::MatrixXd::Identity(2, 2);
  dbl.D = Eigen::MatrixXd::Zero(2, 1);
  const double h = 0.3;
  StateSpace dd = c2d_exact(dbl, h);
  CHECK(dd.A(0, 1) == doctest::Approx(h));
  CHECK(dd.B(0, 0) == doctest::Approx(h * h / 2));
  CHECK(dd.B(1, 0) == doctest::Approx(h));

  // stability is preserved
  CHECK(is_stable(dl));
}

TEST_CASE("simulate recursion") {
  StateSpace ss = first_order(0.5);
  Eigen::MatrixXd impulse = Eigen::MatrixXd::Zero(5, 1);
  impulse(0, 0) = 1.0;
  Eigen::MatrixXd y = simulate(ss, impulse, Eigen::VectorXd::Zero(1));
  // Markov parameters: D, CB, CAB, ...
  CHECK(y(0, 0) == doctest::Approx(0.0));
  CHECK(y(1, 0) == doctest::Approx(1.0));
  CHECK(y(2, 0) == doctest::Approx(0.5));
  CHECK(y(3, 0) == doctest::Approx(0.25));

  // zero input, zero state -> zero output
  CHECK(simulate(ss, Eigen::MatrixXd::Zero(4, 1), Eigen::VectorXd::Zero(1)).norm() == 0.0);

  // linearity
  std::mt19937_64 rng(9);
  std::normal_distribution<double> gauss;
  Eigen::MatrixXd u1(20, 1), u2(20, 1);
  for (int i = 0; i < 20; ++i) {
    u1(i, 0) = gauss(rng);
    u2(i, 0) = gauss(rng);
  }
  Eigen::MatrixXd sum = simulate(ss, u1 + u2, Eigen::VectorXd::Zero(1));
  Eigen::MatrixXd parts = simulate(ss, u1, Eigen::VectorXd::Zero(1)) +
                          simulate(ss, u2, Eigen::VectorXd::Zero(1));
  CHECK((sum - parts).norm() < 1e-10);
}

TEST_CASE("hinfF norm") {
  // discrete 1/(z - a): peak 1/(1-a) at omega = 0
  CHECK(hinfF_norm(first_order(0.6)) == doctest::Approx(2.5).epsilon(1e-4));

  // static gain
  StateSpace gain;
  gain.time_domain = TimeDomain::kDiscrete;
  gain.h = 1.0;
  gain.A = Eigen::MatrixXd::Zero(0, 0);
  gain.B = Eigen::MatrixXd::Zero(0, 2);
  gain.C = Eigen::MatrixXd::Zero(2, 0);
  gain.D = (Eigen::MatrixXd(2, 2) << 3, 0, 0, 4).finished();
  CHECK(hinfF_norm(gain) == doctest::Approx(5.0));

  // 1x2 row system: sup of sqrt(|T1|^2 + |T2|^2) cross-checked against a
  // dense scan of the squared Frobenius response
  StateSpace row;
  row.time_domain = TimeDomain::kDiscrete;
  row.h = 1.0;
  row.A = (Eigen::MatrixXd(2, 2) << 0.5, 0.1, 0.0, -0.3).finished();
  row.B = Eigen::MatrixXd::Identity(2, 2);
  row.C = (Eigen::MatrixXd(1, 2) << 1.0, 0.7).finished();
  row.D = (Eigen::MatrixXd(1, 2) << 0.2, 0.0).finished();
  double scan = 0.0;
  for (int i = 0; i <= 20000; ++i) {
    const double w = M_PI * i / 20000.0;
    scan = std::max(scan, freq_response_at(row, w).norm());
  }
  CHECK(hinfF_norm(row) == doctest::Approx(scan).epsilon(1e-4));

  StateSpace unstable = first_order(1.2);
  CHECK_THROWS_AS(hinfF_norm(unstable), UnstableSystem);
}

TEST_CASE("h2 norm") {
  // pure delay z^-1 has a single unit Markov parameter
  StateSpace delay = first_order(0.0);
  CHECK(h2_norm(delay) == doctest::Approx(1.0));

  const double a = 0.8;
  CHECK(h2_norm(first_order(a)) == doctest::Approx(1.0 / std::sqrt(1 - a * a)));

  StateSpace gain;
  gain.time_domain = TimeDomain::kDiscrete;
  gain.A = Eigen::MatrixXd::Zero(0, 0);
  gain.B = Eigen::MatrixXd::Zero(0, 2);
  gain.C = Eigen::MatrixXd::Zero(2, 0);
  gain.D = (Eigen::MatrixXd(2, 2) << 1, 2, 2, 1).finished();
  CHECK(h2_norm(gain) == doctest::Approx(std::sqrt(10.0)));
}

TEST_CASE("peak-to-peak bound") {
  StateSpace gain;
  gain.time_domain = TimeDomain::kDiscrete;
  gain.A = Eigen::MatrixXd::Zero(0, 0);
  gain.B = Eigen::MatrixXd::Zero(0, 2);
  gain.C = Eigen::MatrixXd::Zero(2, 0);
  gain.D = (Eigen::MatrixXd(2, 2) << 1, -2, 0.5, 0.25).finished();
  CHECK(peak_to_peak_bound(gain) == doctest::Approx(3.0));

  const double a = 0.7;
  // truncated-sum oracle at 1e5 terms
  double oracle = 0.0;
  double term = 1.0;
  for (int k = 0; k < 100000; ++k) {
    oracle += term;
    term *= a;
  }
  CHECK(peak_to_peak_bound(first_order(a)) == doctest::Approx(oracle).epsilon(1e-5));
}

TEST_CASE("minimal realization trims unobservable states") {
  // duplicate a stable mode through stacking the same system twice
  StateSpace ss = first_order(0.5);
  StateSpace dup = stack_outputs(ss, ss);
  dup.C.row(1) = dup.C.row(0);  // second output identical -> redundancy
  StateSpace mr = minimal_realization(dup);
  CHECK(mr.n_states() == 1);
  for (double w : {0.0, 0.5, 1.5}) {
    CHECK((freq_response_at(mr, w) - freq_response_at(dup, w)).norm() < 1e-9);
  }
}
