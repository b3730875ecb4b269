#include <stdexcept>
#include <cmath>
#include <vector>

#include "asgd/optim.hpp"
#include "asgd/rng.hpp"
#include "doctest.h"

using namespace asgd;

TEST_SUITE("optim") {

TEST_CASE("lr schedule endpoints") {
  LrScheduleSpec spec;
  spec.eta_max = 0.1;
  spec.eta_min = 0.001;
  spec.t_warmup = 100;
  spec.total_steps = 1000;
  spec.validate();

  CHECK(lr_at(spec, 0) == 0.0);
  CHECK(lr_at(spec, 50) == doctest::Approx(0.05));
  CHECK(lr_at(spec, 100) == doctest::Approx(0.1));           // cos(0) endpoint
  CHECK(lr_at(spec, 1000) == doctest::Approx(0.001));        // cos(pi) endpoint
  CHECK(lr_at(spec, 2000) == doctest::Approx(0.001));        // clamped past T
  CHECK(lr_at(spec, 550) == doctest::Approx(0.0505));        // midpoint of decay
}

TEST_CASE("lr schedule degenerate warmup and total") {
  LrScheduleSpec spec;
  spec.eta_max = 0.1;
  spec.eta_min = 0.001;
  spec.t_warmup = 0;
  spec.total_steps = 10;
  CHECK(lr_at(spec, 0) == doctest::Approx(0.1));
  CHECK(lr_at(spec, 10) == doctest::Approx(0.001));

  spec.t_warmup = 10;  // total == warmup: decay ratio clamps to 1
  CHECK(lr_at(spec, 10) == doctest::Approx(0.001));
}

TEST_CASE("inner sgd arithmetic") {
  std::vector<double> p{1.0};
  sgd_step(p, {2.0}, 0.0);
  CHECK(p[0] == 1.0);
  sgd_step(p, {2.0}, 0.1);
  CHECK(p[0] == doctest::Approx(0.8));

  std::vector<double> two{1.0}, one{1.0};
  sgd_step(two, {2.0}, 0.1);
  sgd_step(two, {2.0}, 0.1);
  sgd_step(one, {2.0}, 0.2);
  CHECK(two[0] == doctest::Approx(one[0]));

  CHECK_THROWS_AS(sgd_step(p, {1.0, 2.0}, 0.1), std::invalid_argument);
}

TEST_CASE("adamw first step and decay behavior") {
  SUBCASE("bias correction cancels at t = 1") {
    AdamWState st;
    st.weight_decay = 0.0;
    std::vector<double> p{0.0};
    st.step(p, {1.0}, 0.01);
    CHECK(std::abs(-p[0] - 0.01) <= 1e-7);  // update magnitude ~ lr
    CHECK(st.t == 1);
  }
  SUBCASE("zero gradient, zero decay: no motion") {
    AdamWState st;
    st.weight_decay = 0.0;
    std::vector<double> p{1.0};
    st.step(p, {0.0}, 0.1);
    CHECK(p[0] == 1.0);
  }
  SUBCASE("pure decoupled decay") {
    AdamWState st;  // default weight_decay 0.1
    std::vector<double> p{1.0};
    st.step(p, {0.0}, 0.1);
    CHECK(p[0] == doctest::Approx(0.99));
  }
}

TEST_CASE("outer nesterov worked example and limits") {
  OuterNesterov opt;
  opt.beta = 0.9;
  std::vector<double> p{0.0};
  opt.step(p, {1.0}, 0.1);
  CHECK(opt.m[0] == doctest::Approx(1.0));
  CHECK(p[0] == doctest::Approx(-0.19));  // -0.1 * (0.9*1 + 1)

  OuterNesterov plain;
  plain.beta = 0.0;
  std::vector<double> q{1.0};
  plain.step(q, {2.0}, 0.1);
  CHECK(q[0] == doctest::Approx(0.8));  // reduces to SGD

  OuterNesterov idle;
  std::vector<double> r{3.0};
  idle.step(r, {0.0}, 0.1);
  CHECK(r[0] == 3.0);
}

TEST_CASE("nesterov two-form identity") {
  // theta update via m_new equals the pre-update-m form of the textbook rule
  Rng rng(21);
  OuterNesterov opt;
  opt.beta = 0.7;
  std::vector<double> p{0.5};
  std::vector<double> m_old{0.0};
  for (int t = 0; t < 50; ++t) {
    const double g = rng.uniform(-1, 1);
    const double expected_step = 0.1 * (0.7 * 0.7 * m_old[0] + (1 + 0.7) * g);
    const double before = p[0];
    opt.step(p, {g}, 0.1);
    CHECK(before - p[0] == doctest::Approx(expected_step).epsilon(1e-12));
    m_old[0] = opt.m[0];
  }
}

TEST_CASE("outer momentum worked example and geometric limit") {
  OuterMomentum opt;
  opt.beta = 0.9;
  std::vector<double> p{0.0};
  opt.step(p, {1.0}, 0.1);
  CHECK(p[0] == doctest::Approx(-0.1));

  OuterMomentum plain;
  plain.beta = 0.0;
  std::vector<double> q{1.0};
  plain.step(q, {2.0}, 0.1);
  CHECK(q[0] == doctest::Approx(0.8));

  OuterMomentum limit;
  limit.beta = 0.9;
  std::vector<double> r{0.0};
  double last_step = 0.0;
  for (int t = 0; t < 200; ++t) {
    const double before = r[0];
    limit.step(r, {1.0}, 0.1);
    last_step = before - r[0];
  }
  CHECK(std::abs(last_step - 0.1 / (1.0 - 0.9)) <= 1e-6);
}

TEST_CASE("outer adam first step magnitude and sign") {
  OuterAdam opt;
  std::vector<double> p{0.0, 0.0, 0.0};
  const std::vector<double> g{1.0, -0.3, 0.002};
  opt.step(p, g, 0.05);
  for (int i = 0; i < 3; ++i) {
    CHECK(std::abs(std::abs(p[i]) - 0.05) <= 1e-4);  // |step| ~ eps at t = 1
    CHECK(p[i] * g[i] < 0.0);                        // opposite sign to g
  }
  OuterAdam idle;
  std::vector<double> q{1.0};
  idle.step(q, {0.0}, 0.05);
  CHECK(q[0] == 1.0);
}

TEST_CASE("delayed nesterov equals nesterov at N = 1") {
  Rng rng(5);
  for (double c : {0.0, 0.1, 1.0}) {
    DelayedNesterov dn;
    dn.n = 1;
    dn.c = c;
    dn.beta = 0.9;
    OuterNesterov nesterov;
    nesterov.beta = 0.9;
    std::vector<double> a{0.2, -0.4}, b{0.2, -0.4};
    for (int t = 0; t < 100; ++t) {
      const std::vector<double> g{rng.uniform(-1, 1), rng.uniform(-1, 1)};
      dn.step(a, g, 0.1);
      nesterov.step(b, g, 0.1);
      for (int i = 0; i < 2; ++i) CHECK(std::abs(a[i] - b[i]) <= 1e-12);
    }
  }
}

TEST_CASE("delayed nesterov hand-traced N = 2 flush") {
  DelayedNesterov dn;
  dn.n = 2;
  dn.c = 0.0;
  dn.beta = 0.9;
  std::vector<double> p{0.0};
  dn.step(p, {1.0}, 1.0);
  CHECK(p[0] == doctest::Approx(-0.5));  // between flushes: g/N only
  dn.step(p, {1.0}, 1.0);
  CHECK(p[0] == doctest::Approx(-1.9));  // flush: 0.9*1 + 0.5 on top
  CHECK(dn.t == 2);
  CHECK(dn.buffer[0] == 0.0);
}

TEST_CASE("delayed nesterov with c = 0 is plain SGD between flushes") {
  DelayedNesterov dn;
  dn.n = 4;
  dn.c = 0.0;
  dn.beta = 0.9;
  std::vector<double> p{0.0}, q{0.0};
  Rng rng(9);
  for (int t = 0; t < 3; ++t) {  // stop short of the flush
    const std::vector<double> g{rng.uniform(-1, 1)};
    dn.step(p, g, 0.2);
    sgd_step(q, g, 0.2 / 4.0);
    CHECK(p[0] == doctest::Approx(q[0]).epsilon(1e-15));
  }
}

TEST_CASE("delayed nesterov window conservation at c = 0") {
  // over one full window the parameter change is one aggregated Nesterov step
  DelayedNesterov dn;
  dn.n = 5;
  dn.c = 0.0;
  dn.beta = 0.8;
  std::vector<double> p{1.0, -2.0};
  Rng rng(13);
  for (int window = 0; window < 3; ++window) {
    const std::vector<double> before = p;
    std::vector<double> mean(2, 0.0);
    for (int i = 0; i < 5; ++i) {
      const std::vector<double> g{rng.uniform(-1, 1), rng.uniform(-1, 1)};
      for (int j = 0; j < 2; ++j) mean[j] += g[j] / 5.0;
      dn.step(p, g, 0.1);
    }
    for (int j = 0; j < 2; ++j) {
      const double expected = -0.1 * (0.8 * dn.m[j] + mean[j]);
      CHECK(p[j] - before[j] == doctest::Approx(expected).epsilon(1e-12));
    }
  }
}

TEST_CASE("delayed nesterov validates c against 1/N") {
  DelayedNesterov dn;
  dn.n = 4;
  dn.c = 0.5;
  std::vector<double> p{0.0};
  CHECK_THROWS_AS(dn.step(p, {1.0}, 0.1), std::invalid_argument);
}

TEST_CASE("poly discount scales by (1+staleness)^-exponent") {
  PseudoGradient g;
  g.delta = {2.0, -4.0};

  g.staleness = 0;
  CHECK(poly_discount(g).delta == g.delta);  // factor 1

  g.staleness = 3;
  const auto half = poly_discount(g);
  CHECK(half.delta[0] == doctest::Approx(1.0));
  CHECK(half.delta[1] == doctest::Approx(-2.0));

  g.staleness = 99;
  const auto tenth = poly_discount(g);
  CHECK(tenth.delta[0] == doctest::Approx(0.2));

  g.staleness = 1234;
  CHECK(poly_discount(g, 0.0).delta == g.delta);  // exponent 0 is the identity
}

TEST_CASE("staleness filter boundary and sentinel") {
  PseudoGradient g;
  g.delta = {1.0};
  g.staleness = 10;
  CHECK(staleness_filter(g, 10).has_value());
  g.staleness = 11;
  CHECK(!staleness_filter(g, 10).has_value());
  g.staleness = 1000000;
  CHECK(staleness_filter(g, kNoStalenessThreshold).has_value());
}

TEST_CASE("delay compensation worked example") {
  PseudoGradient g;
  g.delta = {1.0, 2.0};
  const std::vector<double> base{0.0, 0.0};
  const std::vector<double> now{0.1, 0.1};

  CHECK(delay_compensate(g, now, base, 0.0).delta == g.delta);
  CHECK(delay_compensate(g, base, base, 0.5).delta == g.delta);

  // 1 + 0.5 * 1^2 * 0.1 and 2 + 0.5 * 2^2 * 0.1
  const auto adjusted = delay_compensate(g, now, base, 0.5);
  CHECK(adjusted.delta[0] == doctest::Approx(1.05));
  CHECK(adjusted.delta[1] == doctest::Approx(2.2));

  const std::vector<double> wrong{0.1};
  CHECK_THROWS_AS(delay_compensate(g, wrong, base, 0.5), std::invalid_argument);
}

TEST_CASE("gradient buffer flushes the mean at capacity") {
  SUBCASE("capacity 1 flushes every push") {
    GradientBuffer buf;
    buf.capacity = 1;
    const auto out = buf.push({3.0, 4.0});
    REQUIRE(out.has_value());
    CHECK((*out)[0] == 3.0);
    CHECK(buf.size() == 0);
  }
  SUBCASE("capacity 2 averages") {
    GradientBuffer buf;
    buf.capacity = 2;
    CHECK(!buf.push({1.0}).has_value());
    const auto out = buf.push({3.0});
    REQUIRE(out.has_value());
    CHECK((*out)[0] == doctest::Approx(2.0));
  }
  SUBCASE("capacity 4 holds three items") {
    GradientBuffer buf;
    buf.capacity = 4;
    CHECK(!buf.push({1.0}).has_value());
    CHECK(!buf.push({2.0}).has_value());
    CHECK(!buf.push({3.0}).has_value());
    CHECK(buf.size() == 3);
  }
}

TEST_CASE("sequential nesterov closed form") {
  SUBCASE("hand expansion at beta = 0.5") {
    const auto out = sequential_nesterov_closed_form({0.0}, {1.0}, 0.5, 4);
    CHECK(out.m_final[0] == doctest::Approx(1.875).epsilon(1e-15));
    CHECK(out.total_step_over_eps[0] == doctest::Approx(7.0625).epsilon(1e-15));
  }
  SUBCASE("beta = 0 is four plain steps") {
    const auto out = sequential_nesterov_closed_form({0.3}, {2.0}, 0.0, 4);
    CHECK(out.m_final[0] == 2.0);
    CHECK(out.total_step_over_eps[0] == 8.0);
  }
  SUBCASE("matches four sequential applications") {
    Rng rng(77);
    for (double beta : {0.1, 0.5, 0.9}) {
      const std::vector<double> g{rng.uniform(-1, 1)};
      const std::vector<double> m0{rng.uniform(-1, 1)};
      OuterNesterov opt;
      opt.beta = beta;
      opt.m = m0;
      std::vector<double> p{0.0};
      for (int i = 0; i < 4; ++i) opt.step(p, g, 1.0);
      const auto closed = sequential_nesterov_closed_form(m0, g, beta, 4);
      CHECK(std::abs(-p[0] - closed.total_step_over_eps[0]) <= 1e-12);
      CHECK(std::abs(opt.m[0] - closed.m_final[0]) <= 1e-12);
    }
  }
  SUBCASE("other k values are rejected") {
    CHECK_THROWS_AS(sequential_nesterov_closed_form({0.0}, {1.0}, 0.5, 3),
                    std::invalid_argument);
  }
}

}  // TEST_SUITE
