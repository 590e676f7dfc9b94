#include "adrc/cost.hpp"

#include <stdexcept>

#include "adrc/design.hpp"
#include "adrc/runtime.hpp"

namespace adrc {

namespace {

// Generic, structure-free tuning point: no coefficient ends up 0 or 1, so
// the measured counts assume nothing about special values.
DesignSpec audit_spec(int n) {
  DesignSpec s;
  s.order = n;
  s.b0 = 2.0;
  s.T = 0.01;
  s.omega_cl = 3.0;
  s.k_eso = 2.0;
  return s;
}

}  // namespace

OpCount audit(Impl impl, int n) {
  if (n < 1) throw std::invalid_argument("audit: n must be >= 1");
  const DesignSpec spec = audit_spec(n);
  PassthroughLimiter<CountingScalar> limiter;  // limiter cost is excluded by convention
  const CountingScalar r(0.7), y(0.3);

  OpCount count;
  if (impl == Impl::fbtf) {
    FbtfController<CountingScalar> ctrl(fbtf_synthesize(spec));
    CountingScalar::reset();
    ctrl.step(r, y, limiter);
    count.vars = static_cast<std::int64_t>(ctrl.state().size());
  } else {
    SsController<CountingScalar> ctrl(design_eso(spec), spec);
    CountingScalar::reset();
    ctrl.step(r, y, limiter);
    count.vars = static_cast<std::int64_t>(ctrl.state().size());
  }
  count.mul = CountingScalar::muls();
  count.add = CountingScalar::adds();
  return count;
}

OpCount audit_formula(Impl impl, int n) {
  if (n < 1) throw std::invalid_argument("audit_formula: n must be >= 1");
  const std::int64_t nn = n;
  switch (impl) {
    case Impl::fbtf:
      return {3 * nn + 4, 3 * nn + 3, nn + 1};
    case Impl::state_space:
      return {nn * nn + 5 * nn + 5, nn * nn + 5 * nn + 4, nn + 1};
  }
  throw std::invalid_argument("audit_formula: unknown implementation");
}

OpCount error_based_tf_formula(int n) {
  const std::int64_t nn = n;
  return {4 * nn + 3, 4 * nn + 2, 2 * nn + 2};
}

const char* impl_name(Impl impl) {
  return impl == Impl::fbtf ? "fbtf" : "state-space";
}

}  // namespace adrc
