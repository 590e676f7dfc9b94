#ifndef ADRC_COST_HPP_
#define ADRC_COST_HPP_

#include <cstdint>
#include <string>

namespace adrc {

/// Arithmetic and storage footprint of one controller step.
/// Subtractions count as additions; vars counts persistent storage scalars.
struct OpCount {
  std::int64_t mul = 0;
  std::int64_t add = 0;
  std::int64_t vars = 0;

  bool operator==(const OpCount&) const = default;
};

enum class Impl {
  fbtf,         // transposed-DFII feedback-transfer-function form
  state_space,  // ESO + state feedback reference form
};

/// Scalar that tallies every multiplication and addition performed with it.
/// Counters are process-global; call reset() before a measurement.
class CountingScalar {
public:
  CountingScalar() = default;
  CountingScalar(double v) : v_(v) {}  // NOLINT: implicit by design

  friend CountingScalar operator+(CountingScalar a, CountingScalar b) {
    ++add_count_;
    return CountingScalar(a.v_ + b.v_);
  }
  friend CountingScalar operator-(CountingScalar a, CountingScalar b) {
    ++add_count_;
    return CountingScalar(a.v_ - b.v_);
  }
  friend CountingScalar operator*(CountingScalar a, CountingScalar b) {
    ++mul_count_;
    return CountingScalar(a.v_ * b.v_);
  }

  friend bool operator<(CountingScalar a, CountingScalar b) { return a.v_ < b.v_; }
  friend bool operator>(CountingScalar a, CountingScalar b) { return a.v_ > b.v_; }

  double value() const { return v_; }

  static void reset() { mul_count_ = add_count_ = 0; }
  static std::int64_t muls() { return mul_count_; }
  static std::int64_t adds() { return add_count_; }

private:
  double v_ = 0.0;
  static inline std::int64_t mul_count_ = 0;
  static inline std::int64_t add_count_ = 0;
};

// Executes one instrumented controller step (generic coefficients, no
// limiter) and reports the measured counts plus structural storage size.
OpCount audit(Impl impl, int n);

// Published closed-form counts, the expected values for audit().
OpCount audit_formula(Impl impl, int n);

// Closed-form counts of the error-based transfer-function implementation
// from prior work; documented in audit reports, not implemented here.
OpCount error_based_tf_formula(int n);

const char* impl_name(Impl impl);

}  // namespace adrc

#endif  // ADRC_COST_HPP_
