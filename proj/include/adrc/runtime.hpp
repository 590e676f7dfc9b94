#ifndef ADRC_RUNTIME_HPP_
#define ADRC_RUNTIME_HPP_

#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

#include "adrc/design.hpp"

namespace adrc {

template <class S>
struct StepResult {
  S u;      // unlimited controller output
  S u_lim;  // applied (limited) output
};

/// Combined magnitude and rate limiter. The rate clamp acts on the increment
/// first, then the magnitude clamp on the accumulated value; both share the
/// single state variable u_lim_prev.
template <class S>
class Limiter {
public:
  Limiter(S u_min, S u_max, S rate_max, S T)
      : u_min_(u_min), u_max_(u_max), max_step_(rate_max * T) {
    if (u_min > u_max)
      throw std::invalid_argument("Limiter: u_min must be <= u_max");
    if (!(rate_max > S(0)))
      throw std::invalid_argument("Limiter: rate_max must be > 0");
  }

  static Limiter unbounded() {
    const S inf = std::numeric_limits<S>::infinity();
    Limiter l(-inf, inf, inf, S(1));
    return l;
  }

  S limit(S u) {
    // When the rate bound is inactive the candidate is u itself, not
    // u_lim_prev + (u - u_lim_prev), so an unconstrained pass is exact.
    const S du = u - u_lim_prev_;
    S u_lim;
    if (du > max_step_)
      u_lim = u_lim_prev_ + max_step_;
    else if (du < -max_step_)
      u_lim = u_lim_prev_ - max_step_;
    else
      u_lim = u;
    if (u_lim > u_max_) u_lim = u_max_;
    if (u_lim < u_min_) u_lim = u_min_;
    u_lim_prev_ = u_lim;
    return u_lim;
  }

  // Force the limiter state (used by controller initialization).
  void reset(S u0) { u_lim_prev_ = u0; }

  S max_step() const { return max_step_; }
  S state() const { return u_lim_prev_; }

private:
  S u_min_;
  S u_max_;
  S max_step_;
  S u_lim_prev_{};
};

/// Pass-through stand-in used where limiter cost must be excluded
/// (cost audits) or no limitation is wanted.
template <class S>
struct PassthroughLimiter {
  S limit(S u) { return u; }
  void reset(S) {}
};

namespace detail {

template <class S>
std::vector<S> convert(const std::vector<double>& v) {
  std::vector<S> out;
  out.reserve(v.size());
  for (double x : v) out.push_back(S(x));
  return out;
}

}  // namespace detail

/// Minimum-footprint controller: transposed direct form II over the combined
/// feedback transfer functions. Persistent state is exactly the n+1 storage
/// variables x_1..x_{n+1}.
template <class S>
class FbtfController {
public:
  explicit FbtfController(const FbtfCoefficients& c, bool strict = false)
      : n_(c.order),
        alpha_(detail::convert<S>(c.alpha)),
        beta_(detail::convert<S>(c.beta)),
        gamma_(detail::convert<S>(c.gamma)),
        feedforward_(S(c.feedforward)),
        x_(c.order + 1, S{}),
        strict_(strict) {}

  // One control cycle: the five-step transposed-DFII update. The upper n
  // storage variables are traversed ascending so each x_i is rewritten only
  // after its previous-cycle value has been consumed as x_{i+1}.
  template <class L>
  StepResult<S> step(S r, S y, L& limiter) {
    require_started();
    S c = gamma_[0] * y + x_[0];
    S u = feedforward_ * r - c;
    S u_lim = limiter.limit(u);
    for (int i = 0; i < n_; ++i)
      x_[i] = x_[i + 1] - alpha_[i] * c + beta_[i] * u_lim + gamma_[i + 1] * y;
    x_[n_] = beta_[n_] * u_lim - alpha_[n_] * c;
    return {u, u_lim};
  }

  // Bumpless pre-enable tracking: one regular cycle with the output forced to
  // the externally applied u_star. Repeated calls converge to the
  // init_direct fixed point.
  template <class L>
  void init_tracking(S y, S u_star, L& limiter) {
    S c = gamma_[0] * y + x_[0];
    limiter.reset(u_star);
    for (int i = 0; i < n_; ++i)
      x_[i] = x_[i + 1] - alpha_[i] * c + beta_[i] * u_star + gamma_[i + 1] * y;
    x_[n_] = beta_[n_] * u_star - alpha_[n_] * c;
    started_ = true;
  }

  // One-shot initialization to the fixed point for constant (y, u_star):
  // storage variables are rebuilt bottom-up with fresh values.
  template <class L>
  void init_direct(S y, S u_star, L& limiter) {
    S c = feedforward_ * y - u_star;
    limiter.reset(u_star);
    x_[n_] = beta_[n_] * u_star - alpha_[n_] * c;
    for (int i = n_ - 1; i >= 0; --i)
      x_[i] = x_[i + 1] - alpha_[i] * c + beta_[i] * u_star + gamma_[i + 1] * y;
    started_ = true;
  }

  // Declare the zero state intentional (strict mode refuses to step
  // an unstarted controller).
  void start() { started_ = true; }

  int order() const { return n_; }
  const std::vector<S>& state() const { return x_; }

private:
  void require_started() {
    if (strict_ && !started_)
      throw std::logic_error("FbtfController: step before initialization");
    started_ = true;
  }

  int n_;
  std::vector<S> alpha_;  // alpha_1..alpha_{n+1}
  std::vector<S> beta_;   // beta_0..beta_n
  std::vector<S> gamma_;  // gamma_0..gamma_n
  S feedforward_;
  std::vector<S> x_;      // the n+1 storage variables
  bool strict_;
  bool started_ = false;
};

/// Reference state-space controller: current-observer ESO update plus state
/// feedback, with the limited output fed back to the observer.
template <class S>
class SsController {
public:
  SsController(const EsoDesign& d, const DesignSpec& spec, bool strict = false)
      : m_(spec.order + 1), strict_(strict) {
    A_.reserve(static_cast<std::size_t>(m_) * m_);
    for (int i = 0; i < m_; ++i)
      for (int j = 0; j < m_; ++j) A_.push_back(S(d.A_eso(i, j)));
    for (int i = 0; i < m_; ++i) b_.push_back(S(d.b_eso(i)));
    for (int i = 0; i < m_; ++i) l_.push_back(S(d.l(i)));
    // Feedback gains folded with 1/b0: g = [k^T 1] / b0.
    for (int i = 0; i < m_ - 1; ++i) g_.push_back(S(d.k(i) / spec.b0));
    g_.push_back(S(1.0 / spec.b0));
    feedforward_ = S(d.k(0) / spec.b0);
    xhat_.assign(m_, S{});
  }

  template <class L>
  StepResult<S> step(S r, S y, L& limiter) {
    require_started();
    std::vector<S> xnew(m_);
    for (int i = 0; i < m_; ++i) {
      S acc{};
      for (int j = 0; j < m_; ++j) acc = acc + A_[i * m_ + j] * xhat_[j];
      acc = acc + b_[i] * u_prev_;
      acc = acc + l_[i] * y;
      xnew[i] = acc;
    }
    xhat_ = xnew;
    S u = feedforward_ * r;
    for (int j = 0; j < m_; ++j) u = u - g_[j] * xhat_[j];
    S u_lim = limiter.limit(u);
    u_prev_ = u_lim;
    return {u, u_lim};
  }

  void start() { started_ = true; }

  int order() const { return m_ - 1; }
  const std::vector<S>& state() const { return xhat_; }

private:
  void require_started() {
    if (strict_ && !started_)
      throw std::logic_error("SsController: step before initialization");
    started_ = true;
  }

  int m_;
  std::vector<S> A_;  // A_eso, row-major
  std::vector<S> b_;  // b_eso
  std::vector<S> l_;
  std::vector<S> g_;  // [k^T 1] / b0
  S feedforward_;
  std::vector<S> xhat_;
  S u_prev_{};
  bool strict_;
  bool started_ = false;
};

}  // namespace adrc

#endif  // ADRC_RUNTIME_HPP_
