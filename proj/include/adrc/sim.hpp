#ifndef ADRC_SIM_HPP_
#define ADRC_SIM_HPP_

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "adrc/design.hpp"

namespace adrc {

/// Simulation blew up; index of the first non-finite sample is attached.
class DivergenceError : public std::runtime_error {
public:
  DivergenceError(const std::string& msg, std::int64_t sample)
      : std::runtime_error(msg), sample_(sample) {}
  std::int64_t sample() const { return sample_; }

private:
  std::int64_t sample_;
};

/// Piecewise-constant schedule: value at time t is the value of the last
/// point with time <= t (0 before the first point).
struct Schedule {
  std::vector<std::pair<double, double>> points;  // (time, value), time-sorted
  double at(double t) const;
};

struct LimiterConfig {
  double u_min = -std::numeric_limits<double>::infinity();
  double u_max = std::numeric_limits<double>::infinity();
  double rate_max = std::numeric_limits<double>::infinity();  // per second
};

struct PlantModel {
  enum class Variant { integrator_chain, buck_averaged };
  Variant variant = Variant::integrator_chain;

  // integrator_chain: y = x_1, dx_i/dt = x_{i+1}, dx_n/dt = b0*(u + d(t)).
  int n = 1;
  double b0 = 1.0;

  // buck_averaged: dv/dt = (i_L - v/R - i_load)/C, with i_L the delayed,
  // limited current command (the inner PCM loop idealized as a transport
  // delay handled by Scenario::loop_delay_samples).
  double C = 1e-4;  // farads
  double R = 100.0; // ohms
};

struct Scenario {
  double duration = 0.0;  // seconds
  double T = 0.0;         // controller sample interval

  DesignSpec controller;
  LimiterConfig limiter;

  Schedule setpoint;
  Schedule disturbance;  // load current (buck) or plant input disturbance

  double noise_sigma = 0.0;
  std::uint64_t seed = 0;
  int loop_delay_samples = 0;
  int substeps = 4;  // RK4 substeps per control period

  PlantModel plant;

  void validate() const;
};

struct SimRecord {
  std::int64_t k = 0;
  double t = 0.0;
  double r = 0.0;
  double y = 0.0;       // noisy measurement seen by the controller
  double y_true = 0.0;
  double u = 0.0;
  double u_lim = 0.0;
  bool limiter_active = false;  // true iff u != u_lim
  double disturbance = 0.0;
};

struct SimTrace {
  std::vector<SimRecord> records;
};

enum class ControllerKind { fbtf, state_space };
enum class Precision { single, double_ };

// Fixed-step closed loop: measure, add seeded Gaussian noise, run the
// controller, apply the (delayed) limited command, integrate the plant over
// one period with RK4. Deterministic for a given scenario and seed.
SimTrace simulate(const Scenario& scenario,
                  ControllerKind kind = ControllerKind::fbtf,
                  Precision precision = Precision::double_);

// First time after step_time from which y_true stays inside the settling
// window around the final setpoint; the window half-width is band times the
// step amplitude (band times max(1, |final|) for a zero-amplitude step).
// nullopt if the trace never settles.
std::optional<double> settling_time(const SimTrace& trace, double step_time,
                                    double band = 0.02);

// Deterministic counter-based Gaussian generator used for measurement noise
// (splitmix64 stream + Box-Muller); exposed for tests.
class NoiseGenerator {
public:
  explicit NoiseGenerator(std::uint64_t seed) : state_(seed) {}
  double gaussian();

private:
  std::uint64_t next_u64();
  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace adrc

#endif  // ADRC_SIM_HPP_
