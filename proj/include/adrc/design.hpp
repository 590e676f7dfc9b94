#ifndef ADRC_DESIGN_HPP_
#define ADRC_DESIGN_HPP_

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace adrc {

/// Thrown for any failure during design-time gain/coefficient computation.
class DesignError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Pole-placement system could not be solved; message carries a conditioning report.
class SingularSystemError : public DesignError {
public:
  SingularSystemError(const std::string& msg, double condition)
      : DesignError(msg), condition_(condition) {}
  double condition() const { return condition_; }

private:
  double condition_;
};

/// The five tuning inputs of a discrete-time linear ADRC design.
struct DesignSpec {
  int order = 1;         // plant order n (before extension by the disturbance state)
  double b0 = 1.0;       // plant input gain
  double T = 1.0;        // sample interval [s]
  double omega_cl = 1.0; // desired closed-loop bandwidth [rad/s]
  double k_eso = 1.0;    // observer bandwidth factor (relative to omega_cl)

  // Throws std::invalid_argument on violated invariants.
  void validate() const;

  // Observer pole location in z-domain, exp(-k_eso * omega_cl * T),
  // clamped to 0 below 1e-12 (deadbeat).
  double z_eso() const;
};

/// Discrete-time ESO design: ZOH matrices, observer gain, closed-loop
/// observer matrices and state-feedback gains.
struct EsoDesign {
  Eigen::MatrixXd A_d;
  Eigen::VectorXd b_d;
  Eigen::VectorXd l;
  Eigen::MatrixXd A_eso;
  Eigen::VectorXd b_eso;
  Eigen::VectorXd k; // k_1..k_n
  double z_eso = 1.0;
};

/// Deployable coefficient set of the feedback-transfer-function controller.
/// alpha holds alpha_1..alpha_{n+1}; beta and gamma hold indices 0..n.
struct FbtfCoefficients {
  int order = 1;
  std::vector<double> alpha;
  std::vector<double> beta;
  std::vector<double> gamma;
  double feedforward = 0.0; // k_1 / b0

  // Provenance copies of the tuning inputs.
  double T = 0.0;
  double b0 = 0.0;
  double omega_cl = 0.0;
  double z_eso = 1.0;
};

/// One checked identity of a coefficient set.
struct IdentityCheck {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double rel_error = 0.0;
  bool pass = false;
};

/// Validation summary for a synthesized coefficient set.
struct CoefficientReport {
  std::vector<IdentityCheck> checks;
  std::vector<std::string> warnings;
  bool pass = false;
};

// State-feedback gains k_i = n!/((n-i+1)! (i-1)!) * omega_cl^(n-i+1), i = 1..n.
std::vector<double> controller_gains(int n, double omega_cl);

// Exact ZOH discretization of the (n+1)-state integrator-chain ESO plant.
// A_d is unit-upper-triangular Toeplitz with T^(j-i)/(j-i)!; the last entry
// of b_d is zero (the disturbance state has no control input).
std::pair<Eigen::MatrixXd, Eigen::VectorXd> zoh_discretize(int n, double b0,
                                                           double T);

// Observer gain l placing all eigenvalues of A_d - l c^T A_d at z_eso.
// Solved by matching characteristic-polynomial coefficients, which are
// affine in l: det(zI - A_d + l m^T) = det(zI - A_d) + m^T adj(zI - A_d) l
// with m^T = c^T A_d (first row of A_d).
Eigen::VectorXd observer_gain(const Eigen::MatrixXd& A_d, double z_eso);

// A_eso = A_d - l c^T A_d, b_eso = b_d - l c^T b_d.
std::pair<Eigen::MatrixXd, Eigen::VectorXd> eso_matrices(
    const Eigen::MatrixXd& A_d, const Eigen::VectorXd& b_d,
    const Eigen::VectorXd& l);

// Full design pipeline: discretize, place observer poles, assemble.
EsoDesign design_eso(const DesignSpec& spec);

// Numeric synthesis of the FBTF coefficients for arbitrary order, via the
// Leverrier-Faddeev resolvent of A_eso. The structural one-sample delay of
// C_u is NOT folded into beta.
FbtfCoefficients fbtf_synthesize(const DesignSpec& spec);

// Literal evaluation of well-known closed forms for n = 1, 2; used as an
// independent cross-check of fbtf_synthesize.
FbtfCoefficients table1_closed_form(const DesignSpec& spec);

// DC-gain identity checks: 1 + sum(alpha) = (1 - z_eso)^(n+1),
// sum(beta) = -(1 + sum(alpha)), sum(gamma) = feedforward * (1 + sum(alpha)).
CoefficientReport validate_coefficients(const FbtfCoefficients& c,
                                        double rel_tol = 1e-9);

// Leverrier-Faddeev recursion on an m x m matrix: returns the monic
// characteristic polynomial (coefficient of z^p at index p) and the matrix
// coefficients M_1..M_m of adj(zI - A) = sum_k M_k z^(m-k).
struct Resolvent {
  Eigen::VectorXd charpoly;          // size m+1, charpoly(m) == 1
  std::vector<Eigen::MatrixXd> M;    // M[k-1] == M_k
};
Resolvent faddeev_leverrier(const Eigen::MatrixXd& A);

// Coefficients of (z - root)^m, index p = coefficient of z^p.
Eigen::VectorXd binomial_poly(double root, int m);

}  // namespace adrc

#endif  // ADRC_DESIGN_HPP_
