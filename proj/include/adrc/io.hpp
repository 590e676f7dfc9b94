#ifndef ADRC_IO_HPP_
#define ADRC_IO_HPP_

#include <iosfwd>
#include <string>

#include "adrc/design.hpp"
#include "adrc/sim.hpp"

namespace adrc::io {

/// Raised when a document fails schema validation (missing/invalid fields).
class SchemaError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Shortest decimal representation that round-trips the double exactly.
std::string format_double(double v);

// Coefficient file (JSON, schema_version "1"): order, T, b0, omega_cl,
// k_eso, z_eso, alpha, beta, gamma, feedforward.
struct CoefficientFile {
  FbtfCoefficients coeffs;
  double k_eso = 0.0;

  // The tuning inputs the file was generated from.
  DesignSpec spec() const {
    return {coeffs.order, coeffs.b0, coeffs.T, coeffs.omega_cl, k_eso};
  }
};
std::string coefficients_to_json(const FbtfCoefficients& c, double k_eso);
CoefficientFile coefficients_from_json(const std::string& text);

// Self-contained C header with the coefficient arrays and the step
// recurrence documented in comments; data only, no generated logic.
std::string coefficients_to_c_header(const FbtfCoefficients& c, double k_eso);

// Scenario file (JSON) mirroring the Scenario fields.
Scenario scenario_from_json(const std::string& text);

// CSV trace: header `k,t,r,y,y_true,u,u_lim,sat,dist`, one row per sample.
void write_trace_csv(std::ostream& out, const SimTrace& trace);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace adrc::io

#endif  // ADRC_IO_HPP_
