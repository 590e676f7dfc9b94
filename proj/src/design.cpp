#include "adrc/design.hpp"

#include <cmath>
#include <limits>

namespace adrc {

namespace {

double rel_diff(double a, double b) {
  const double scale = std::max({std::fabs(a), std::fabs(b), 1e-300});
  return std::fabs(a - b) / scale;
}

double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

}  // namespace

void DesignSpec::validate() const {
  if (order < 1) throw std::invalid_argument("DesignSpec: order must be >= 1");
  if (!(T > 0.0)) throw std::invalid_argument("DesignSpec: T must be > 0");
  if (!(omega_cl > 0.0))
    throw std::invalid_argument("DesignSpec: omega_cl must be > 0");
  if (!(k_eso > 0.0))
    throw std::invalid_argument("DesignSpec: k_eso must be > 0");
  if (b0 == 0.0 || !std::isfinite(b0))
    throw std::invalid_argument("DesignSpec: b0 must be nonzero and finite");
}

double DesignSpec::z_eso() const {
  double z = std::exp(-k_eso * omega_cl * T);
  if (z < 1e-12) z = 0.0;  // deadbeat
  return z;
}

std::vector<double> controller_gains(int n, double omega_cl) {
  if (n < 1) throw std::invalid_argument("controller_gains: n must be >= 1");
  if (!(omega_cl > 0.0))
    throw std::invalid_argument("controller_gains: omega_cl must be > 0");
  std::vector<double> k(n);
  for (int i = 1; i <= n; ++i) {
    const double binom = factorial(n) / (factorial(n - i + 1) * factorial(i - 1));
    k[i - 1] = binom * std::pow(omega_cl, n - i + 1);
  }
  return k;
}

std::pair<Eigen::MatrixXd, Eigen::VectorXd> zoh_discretize(int n, double b0,
                                                           double T) {
  if (n < 1) throw std::invalid_argument("zoh_discretize: n must be >= 1");
  if (!(T > 0.0)) throw std::invalid_argument("zoh_discretize: T must be > 0");
  const int m = n + 1;
  Eigen::MatrixXd A_d = Eigen::MatrixXd::Zero(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = i; j < m; ++j) A_d(i, j) = std::pow(T, j - i) / factorial(j - i);
  Eigen::VectorXd b_d = Eigen::VectorXd::Zero(m);
  for (int i = 1; i <= n; ++i)
    b_d(i - 1) = b0 * std::pow(T, n - i + 1) / factorial(n - i + 1);
  return {A_d, b_d};
}

namespace {

template <class Scalar>
struct ResolventT {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> charpoly;
  std::vector<Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>> M;
};

template <class Scalar>
ResolventT<Scalar> faddeev_impl(
    const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& A) {
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const int m = static_cast<int>(A.rows());
  ResolventT<Scalar> r;
  r.charpoly.setZero(m + 1);
  r.charpoly(m) = Scalar(1);
  r.M.reserve(m);
  Mat Mk = Mat::Identity(m, m);
  for (int k = 1; k <= m; ++k) {
    r.M.push_back(Mk);
    const Scalar ck = -(A * Mk).trace() / Scalar(k);
    r.charpoly(m - k) = ck;
    if (k < m) Mk = A * Mk + ck * Mat::Identity(m, m);
  }
  return r;
}

}  // namespace

Resolvent faddeev_leverrier(const Eigen::MatrixXd& A) {
  ResolventT<double> rt = faddeev_impl<double>(A);
  return {std::move(rt.charpoly), std::move(rt.M)};
}

Eigen::VectorXd binomial_poly(double root, int m) {
  // Expand (z - root)^m by repeated multiplication.
  Eigen::VectorXd p = Eigen::VectorXd::Zero(m + 1);
  p(0) = 1.0;
  for (int k = 0; k < m; ++k) {
    for (int d = k + 1; d >= 1; --d) p(d) = p(d - 1) - root * p(d);
    p(0) = -root * p(0);
  }
  return p;  // p(d) is the coefficient of z^d
}

namespace {

using LMat = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
using LVec = Eigen::Matrix<long double, Eigen::Dynamic, 1>;
using LRowVec = Eigen::Matrix<long double, 1, Eigen::Dynamic>;

long double lfactorial(int k) {
  long double f = 1.0L;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

// ZOH integrator-chain matrix for unit sample time: entry 1/(j-i)!.
LMat unit_chain_matrix(int m) {
  LMat A = LMat::Zero(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = i; j < m; ++j) A(i, j) = 1.0L / lfactorial(j - i);
  return A;
}

// Places every observer eigenvalue at z_eso = 1 - d for the unit-sample-time
// chain, via coefficient matching on the affine identity
//   det(zI - A + l m^T) = det(zI - A) + m^T adj(zI - A) l,   m^T = e_1^T A.
//
// The matching is posed in the shifted variable s = z - 1 where N = A - I is
// nilpotent: det(sI - N) = s^m, adj(sI - N) = sum_k N^k s^(m-1-k) with exact
// rational entries, and the right-hand side (s + d)^m - s^m has coefficients
// binom(m, p) d^(m-p) that keep full relative accuracy however close z_eso
// sits to 1. Component j of l scales like d^(j+1), so the unknowns are
// rescaled by those powers (and each row by its d^(m-p)); the resulting
// system is O(1) and well conditioned for any d in [0, 1].
LVec place_unit_chain(int m, long double d) {
  LMat N = LMat::Zero(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) N(i, j) = 1.0L / lfactorial(j - i);
  LRowVec mhat(m);
  for (int j = 0; j < m; ++j) mhat(j) = 1.0L / lfactorial(j);

  std::vector<long double> dp(m + 1);
  dp[0] = 1.0L;
  for (int k = 1; k <= m; ++k) dp[k] = dp[k - 1] * d;

  LMat sys = LMat::Zero(m, m);
  LVec rhs(m);
  LRowVec row = mhat;  // mhat^T N^k, advanced per iteration
  for (int k = 0; k < m; ++k) {
    const int p = m - 1 - k;  // row p matches the s^p coefficient
    for (int j = k; j < m; ++j) sys(p, j) = row(j) * dp[j - k];
    long double binom = 1.0L;
    for (int i = 1; i <= p; ++i) binom = binom * (m - i + 1) / i;
    rhs(p) = binom;
    if (k + 1 < m) row = row * N;
  }

  Eigen::FullPivLU<LMat> lu(sys);
  if (!lu.isInvertible()) {
    Eigen::JacobiSVD<LMat> svd(sys);
    const long double smax = svd.singularValues()(0);
    const long double smin = svd.singularValues()(m - 1);
    const double cond = smin > 0.0L
                            ? static_cast<double>(smax / smin)
                            : std::numeric_limits<double>::infinity();
    throw SingularSystemError(
        "observer_gain: pole-placement system is numerically singular "
        "(condition estimate " + std::to_string(cond) + ")",
        cond);
  }
  const LVec v = lu.solve(rhs);
  LVec lhat(m);
  for (int j = 0; j < m; ++j) lhat(j) = dp[j + 1] * v(j);
  return lhat;
}

}  // namespace

Eigen::VectorXd observer_gain(const Eigen::MatrixXd& A_d, double z_eso) {
  if (!(z_eso >= 0.0 && z_eso <= 1.0))
    throw std::invalid_argument("observer_gain: z_eso must be in (0, 1]");
  const int m = static_cast<int>(A_d.rows());

  // A_d comes from zoh_discretize, so it is similar to the unit-sample-time
  // chain through D = diag(T^0..T^(m-1)): the placement runs on the T-free
  // chain (where it is well conditioned for any sample time) and maps back
  // with l = D^{-1} lhat. The sample time is recovered from A_d(0, 1).
  const long double T = m > 1 ? static_cast<long double>(A_d(0, 1)) : 1.0L;
  const LVec lhat = place_unit_chain(m, 1.0L - static_cast<long double>(z_eso));
  Eigen::VectorXd l(m);
  long double Tp = 1.0L;
  for (int i = 0; i < m; ++i) {
    l(i) = static_cast<double>(lhat(i) / Tp);
    Tp *= T;
  }
  return l;
}

std::pair<Eigen::MatrixXd, Eigen::VectorXd> eso_matrices(
    const Eigen::MatrixXd& A_d, const Eigen::VectorXd& b_d,
    const Eigen::VectorXd& l) {
  if (A_d.rows() != A_d.cols() || A_d.rows() != b_d.size() ||
      b_d.size() != l.size())
    throw std::invalid_argument("eso_matrices: inconsistent shapes");
  // c^T = e_1, so c^T A_d is the first row and c^T b_d the first entry.
  Eigen::MatrixXd A_eso = A_d - l * A_d.row(0);
  Eigen::VectorXd b_eso = b_d - l * b_d(0);
  return {A_eso, b_eso};
}

EsoDesign design_eso(const DesignSpec& spec) {
  spec.validate();
  EsoDesign d;
  d.z_eso = spec.z_eso();
  std::tie(d.A_d, d.b_d) = zoh_discretize(spec.order, spec.b0, spec.T);
  d.l = observer_gain(d.A_d, d.z_eso);
  std::tie(d.A_eso, d.b_eso) = eso_matrices(d.A_d, d.b_d, d.l);
  const std::vector<double> k = controller_gains(spec.order, spec.omega_cl);
  d.k = Eigen::Map<const Eigen::VectorXd>(k.data(), k.size());
  return d;
}

FbtfCoefficients fbtf_synthesize(const DesignSpec& spec) {
  spec.validate();
  const int n = spec.order;
  const int m = n + 1;

  FbtfCoefficients c;
  c.order = n;
  c.T = spec.T;
  c.b0 = spec.b0;
  c.omega_cl = spec.omega_cl;
  c.z_eso = spec.z_eso();
  c.feedforward = std::pow(spec.omega_cl, n) / spec.b0;

  // The synthesis runs in T-normalized coordinates (similarity by
  // D = diag(T^0..T^n), see observer_gain): every intermediate stays O(1)
  // for omega_cl*T <= O(1), and b0 T^n cancels exactly between the gain row
  // w D^{-1} and the transformed input vector D b_eso. Intermediates are
  // carried in long double so the delivered coefficients are correct to a
  // few double ulps across the whole admissible parameter range.
  const LMat Ahat = unit_chain_matrix(m);
  const LVec lhat = place_unit_chain(m, 1.0L - static_cast<long double>(c.z_eso));
  const LMat Aeso_hat = Ahat - lhat * Ahat.row(0);

  // Denominator: det(I - z^-1 A_eso) = 1 + sum alpha_i z^-i, so alpha_i is
  // the z^(m-i) coefficient of the characteristic polynomial of A_eso
  // (invariant under the similarity).
  const ResolventT<long double> res = faddeev_impl<long double>(Aeso_hat);
  c.alpha.resize(m);
  for (int i = 1; i <= m; ++i)
    c.alpha[i - 1] = static_cast<double>(res.charpoly(m - i));

  // Numerators via adj(I - z^-1 A_eso) = sum_{i=0}^{n} M_{i+1} z^-i:
  // beta_i = (1/b0) [k^T 1] M_{i+1} b_eso and gamma_i likewise with l.
  const long double wT = static_cast<long double>(spec.omega_cl) *
                         static_cast<long double>(spec.T);
  LRowVec what(m);  // (b0 T^n) * [k^T 1]/b0 * D^{-1}
  long double binom = 1.0L;
  for (int i = 0; i < m; ++i) {
    long double pw = 1.0L;
    for (int k = 0; k < n - i; ++k) pw *= wT;
    what(i) = binom * pw;
    binom = binom * (n - i) / (i + 1.0L);
  }
  LVec bhat(m);  // (D b_eso) / (b0 T^n)
  for (int i = 0; i < n; ++i)
    bhat(i) = 1.0L / lfactorial(n - i) - lhat(i) / lfactorial(n);
  bhat(n) = -lhat(n) / lfactorial(n);

  long double Tn = 1.0L;
  for (int k = 0; k < n; ++k) Tn *= static_cast<long double>(spec.T);
  const long double gamma_scale = 1.0L / (static_cast<long double>(spec.b0) * Tn);
  c.beta.resize(m);
  c.gamma.resize(m);
  for (int i = 0; i < m; ++i) {
    c.beta[i] = static_cast<double>((what * res.M[i] * bhat).value());
    c.gamma[i] =
        static_cast<double>((what * res.M[i] * lhat).value() * gamma_scale);
  }

  for (double v : c.alpha)
    if (!std::isfinite(v))
      throw DesignError("fbtf_synthesize: coefficient overflow in alpha");
  for (double v : c.beta)
    if (!std::isfinite(v))
      throw DesignError("fbtf_synthesize: coefficient overflow in beta");
  for (double v : c.gamma)
    if (!std::isfinite(v))
      throw DesignError("fbtf_synthesize: coefficient overflow in gamma");
  return c;
}

FbtfCoefficients table1_closed_form(const DesignSpec& spec) {
  spec.validate();
  const int n = spec.order;
  if (n != 1 && n != 2)
    throw std::invalid_argument(
        "table1_closed_form: closed forms exist only for order 1 and 2");

  const double z = spec.z_eso();
  const double Tw = spec.T * spec.omega_cl;
  const double b0 = spec.b0;
  const double T = spec.T;

  FbtfCoefficients c;
  c.order = n;
  c.T = T;
  c.b0 = b0;
  c.omega_cl = spec.omega_cl;
  c.z_eso = z;

  const double z2 = z * z;
  const double z3 = z2 * z;
  // The gamma numerators contain polynomials in z that vanish to first or
  // second order at z = 1 (e.g. 1 - z - z^2 + z^3 = (1-z)^2 (1+z) up to
  // grouping); they are evaluated in factored form so the closed forms keep
  // full relative accuracy when z_eso sits close to 1.
  const double omz = 1.0 - z;
  if (n == 1) {
    c.alpha = {-2.0 * z, z2};
    c.beta = {Tw * z2 - omz * omz, -Tw * z2};
    c.gamma = {(Tw * omz * (1.0 + z) + omz * omz) / (b0 * T),
               -omz * (2.0 * Tw * z + omz) / (b0 * T)};
    c.feedforward = spec.omega_cl / b0;
  } else {
    const double omz3 = omz * omz * omz;
    const double opz3 = (1.0 + z) * (1.0 + z) * (1.0 + z);
    c.alpha = {-3.0 * z, 3.0 * z2, -z3};
    c.beta = {0.5 * (-Tw * z3 * (4.0 - Tw) + Tw * opz3 - omz3),
              0.5 * (-Tw * opz3 - omz3),
              0.5 * (Tw * z3 * (4.0 - Tw))};
    const double T2 = T * T;
    const double Tw2 = Tw * Tw;
    // 1 - z^3 = (1-z)(1+z+z^2); 1 - z - z^2 + z^3 = (1-z)^2 (1+z);
    // -1 + 3z^2 - 2z^3 = -(1-z)^2 (1+2z); 1 + 3z - 9z^2 + 5z^3 = (1-z)^2 (1+5z)
    c.gamma = {omz *
                   (Tw2 * (1.0 + z + z2) + 3.0 * Tw * omz * (1.0 + z) +
                    omz * omz) /
                   (b0 * T2),
               -omz *
                   (3.0 * Tw2 * z * (1.0 + z) + 4.0 * Tw * omz * (1.0 + 2.0 * z) +
                    2.0 * omz * omz) /
                   (b0 * T2),
               omz *
                   (3.0 * Tw2 * z2 + Tw * omz * (1.0 + 5.0 * z) + omz * omz) /
                   (b0 * T2)};
    c.feedforward = spec.omega_cl * spec.omega_cl / b0;
  }
  return c;
}

CoefficientReport validate_coefficients(const FbtfCoefficients& c,
                                        double rel_tol) {
  CoefficientReport rep;
  const int m = c.order + 1;
  double sum_alpha = 0.0, sum_beta = 0.0, sum_gamma = 0.0;
  double mag_alpha = 1.0, mag_beta = 0.0, mag_gamma = 0.0;
  for (double v : c.alpha) { sum_alpha += v; mag_alpha += std::fabs(v); }
  for (double v : c.beta) { sum_beta += v; mag_beta += std::fabs(v); }
  for (double v : c.gamma) { sum_gamma += v; mag_gamma += std::fabs(v); }
  const double one_plus_alpha = 1.0 + sum_alpha;

  // Each identity compares alternating sums. Close to z_eso = 1 the true sum
  // can sink many orders of magnitude below its summands, at which point no
  // double-precision evaluation can resolve it; mismatches below a few ulps
  // of the summand magnitude are therefore accepted alongside the relative
  // tolerance.
  auto check = [&](const std::string& name, double lhs, double rhs,
                   double summand_scale) {
    IdentityCheck ic;
    ic.name = name;
    ic.lhs = lhs;
    ic.rhs = rhs;
    ic.rel_error = rel_diff(lhs, rhs);
    const double floor = 64.0 * std::numeric_limits<double>::epsilon() *
                         summand_scale;
    ic.pass = ic.rel_error <= rel_tol || std::fabs(lhs - rhs) <= floor;
    rep.checks.push_back(ic);
  };

  check("denominator: 1 + sum(alpha) = (1 - z_eso)^(n+1)", one_plus_alpha,
        std::pow(1.0 - c.z_eso, m), mag_alpha);
  check("C_u DC gain: sum(beta) = -(1 + sum(alpha))", sum_beta,
        -one_plus_alpha, mag_beta + mag_alpha);
  check("C_y DC gain: sum(gamma) = feedforward * (1 + sum(alpha))", sum_gamma,
        c.feedforward * one_plus_alpha,
        mag_gamma + std::fabs(c.feedforward) * mag_alpha);

  if (c.omega_cl * c.T > 1.0)
    rep.warnings.push_back(
        "omega_cl * T > 1: sampling is slower than the desired closed-loop "
        "bandwidth");

  rep.pass = true;
  for (const auto& ic : rep.checks) rep.pass = rep.pass && ic.pass;
  return rep;
}

}  // namespace adrc
