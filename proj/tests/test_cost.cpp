#include <doctest.h>

#include "adrc/cost.hpp"

using namespace adrc;

TEST_CASE("CountingScalar tallies arithmetic") {
  CountingScalar::reset();
  CountingScalar a = 2.0, b = 3.0;
  CountingScalar c = a * b + a - b;
  CHECK(c.value() == 5.0);
  CHECK(CountingScalar::muls() == 1);
  CHECK(CountingScalar::adds() == 2);
  CHECK(!(a > b));
  CHECK(a < b);
  CountingScalar::reset();
  CHECK(CountingScalar::muls() == 0);
  CHECK(CountingScalar::adds() == 0);
}

TEST_CASE("closed-form per-step counts at the tabulated orders") {
  // n = 1
  CHECK(audit_formula(Impl::fbtf, 1) == OpCount{7, 6, 2});
  CHECK(audit_formula(Impl::state_space, 1) == OpCount{11, 10, 2});
  CHECK(error_based_tf_formula(1) == OpCount{7, 6, 4});
  // n = 2
  CHECK(audit_formula(Impl::fbtf, 2) == OpCount{10, 9, 3});
  CHECK(audit_formula(Impl::state_space, 2) == OpCount{19, 18, 3});
  CHECK(error_based_tf_formula(2) == OpCount{11, 10, 6});
  // spot check further up
  CHECK(audit_formula(Impl::fbtf, 5) == OpCount{19, 18, 6});
  CHECK(audit_formula(Impl::state_space, 5) == OpCount{55, 54, 6});
}

TEST_CASE("instrumented step reproduces the closed forms exactly") {
  for (int n = 1; n <= 8; ++n) {
    for (Impl impl : {Impl::fbtf, Impl::state_space}) {
      INFO(impl_name(impl), " n=", n);
      CHECK(audit(impl, n) == audit_formula(impl, n));
    }
  }
}

TEST_CASE("the minimum-footprint form never loses to the reference form") {
  for (int n = 1; n <= 12; ++n) {
    const OpCount f = audit_formula(Impl::fbtf, n);
    const OpCount s = audit_formula(Impl::state_space, n);
    CHECK(f.mul <= s.mul);
    CHECK(f.add <= s.add);
    CHECK(f.vars == s.vars);  // both need exactly n+1 persistent scalars
    // Storage beats the error-based form, which keeps 2n+2 variables.
    CHECK(f.vars < error_based_tf_formula(n).vars);
  }
}

TEST_CASE("impl_name") {
  CHECK(std::string(impl_name(Impl::fbtf)) == "fbtf");
  CHECK(std::string(impl_name(Impl::state_space)) == "state-space");
}
