#include "adrc/sim.hpp"

#include <cmath>
#include <deque>
#include <numbers>

#include "adrc/runtime.hpp"

namespace adrc {

double Schedule::at(double t) const {
  double v = 0.0;
  for (const auto& [time, value] : points) {
    if (time > t) break;
    v = value;
  }
  return v;
}

void Scenario::validate() const {
  if (!(duration > 0.0)) throw std::invalid_argument("Scenario: duration must be > 0");
  if (!(T > 0.0)) throw std::invalid_argument("Scenario: T must be > 0");
  if (T != controller.T)
    throw std::invalid_argument("Scenario: T must match the controller sample time");
  if (loop_delay_samples < 0)
    throw std::invalid_argument("Scenario: loop_delay_samples must be >= 0");
  if (substeps < 1) throw std::invalid_argument("Scenario: substeps must be >= 1");
  if (!(noise_sigma >= 0.0))
    throw std::invalid_argument("Scenario: noise_sigma must be >= 0");
  controller.validate();
  auto sorted = [](const Schedule& s) {
    for (std::size_t i = 1; i < s.points.size(); ++i)
      if (s.points[i].first < s.points[i - 1].first) return false;
    return true;
  };
  if (!sorted(setpoint) || !sorted(disturbance))
    throw std::invalid_argument("Scenario: schedules must be time-sorted");
}

std::uint64_t NoiseGenerator::next_u64() {
  state_ += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double NoiseGenerator::gaussian() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  if (u1 <= 0.0) u1 = 0x1.0p-53;
  const double u2 = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

namespace {

class Plant {
public:
  Plant(const PlantModel& model, const Schedule& disturbance)
      : model_(model), disturbance_(&disturbance) {
    state_.assign(
        model.variant == PlantModel::Variant::integrator_chain ? model.n : 1,
        0.0);
  }

  double output() const { return state_[0]; }

  // RK4 over [t, t + T] with the commanded input held constant.
  void integrate(double t, double T, double input, int substeps) {
    const double h = T / substeps;
    for (int s = 0; s < substeps; ++s) {
      const double ts = t + s * h;
      const auto k1 = derivative(ts, state_, input);
      const auto k2 = derivative(ts + h / 2, shifted(state_, k1, h / 2), input);
      const auto k3 = derivative(ts + h / 2, shifted(state_, k2, h / 2), input);
      const auto k4 = derivative(ts + h, shifted(state_, k3, h), input);
      for (std::size_t i = 0; i < state_.size(); ++i)
        state_[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
  }

private:
  static std::vector<double> shifted(const std::vector<double>& x,
                                     const std::vector<double>& dx, double h) {
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] + h * dx[i];
    return out;
  }

  std::vector<double> derivative(double t, const std::vector<double>& x,
                                 double input) const {
    std::vector<double> dx(x.size());
    if (model_.variant == PlantModel::Variant::integrator_chain) {
      for (std::size_t i = 0; i + 1 < x.size(); ++i) dx[i] = x[i + 1];
      dx.back() = model_.b0 * (input + disturbance_->at(t));
    } else {
      // Averaged buck output stage: commanded inductor current charges the
      // capacitor against the resistive base load and the current sink.
      dx[0] = (input - x[0] / model_.R - disturbance_->at(t)) / model_.C;
    }
    return dx;
  }

  PlantModel model_;
  const Schedule* disturbance_;
  std::vector<double> state_;
};

template <class S, class Controller>
SimTrace run_loop(const Scenario& sc, Controller& ctrl) {
  const auto n_samples = static_cast<std::int64_t>(std::llround(sc.duration / sc.T));
  Limiter<S> limiter(S(sc.limiter.u_min), S(sc.limiter.u_max),
                     S(sc.limiter.rate_max), S(sc.T));
  Plant plant(sc.plant, sc.disturbance);
  NoiseGenerator noise(sc.seed);
  std::deque<double> delay_line(sc.loop_delay_samples, 0.0);

  SimTrace trace;
  trace.records.reserve(n_samples);
  for (std::int64_t k = 0; k < n_samples; ++k) {
    const double t = k * sc.T;
    SimRecord rec;
    rec.k = k;
    rec.t = t;
    rec.y_true = plant.output();
    rec.y = rec.y_true +
            (sc.noise_sigma > 0.0 ? sc.noise_sigma * noise.gaussian() : 0.0);
    rec.r = sc.setpoint.at(t);
    rec.disturbance = sc.disturbance.at(t);

    const StepResult<S> out = ctrl.step(S(rec.r), S(rec.y), limiter);
    rec.u = static_cast<double>(out.u);
    rec.u_lim = static_cast<double>(out.u_lim);
    rec.limiter_active = !(out.u == out.u_lim);

    if (!std::isfinite(rec.y_true) || !std::isfinite(rec.u))
      throw DivergenceError(
          "simulate: non-finite state at sample " + std::to_string(k), k);

    double applied = rec.u_lim;
    if (sc.loop_delay_samples > 0) {
      delay_line.push_back(rec.u_lim);
      applied = delay_line.front();
      delay_line.pop_front();
    }
    plant.integrate(t, sc.T, applied, sc.substeps);
    trace.records.push_back(rec);
  }
  return trace;
}

template <class S>
SimTrace run_kind(const Scenario& sc, ControllerKind kind) {
  if (kind == ControllerKind::fbtf) {
    FbtfController<S> ctrl(fbtf_synthesize(sc.controller));
    return run_loop<S>(sc, ctrl);
  }
  SsController<S> ctrl(design_eso(sc.controller), sc.controller);
  return run_loop<S>(sc, ctrl);
}

}  // namespace

SimTrace simulate(const Scenario& scenario, ControllerKind kind,
                  Precision precision) {
  scenario.validate();
  return precision == Precision::single
             ? run_kind<float>(scenario, kind)
             : run_kind<double>(scenario, kind);
}

std::optional<double> settling_time(const SimTrace& trace, double step_time,
                                    double band) {
  if (trace.records.empty()) return std::nullopt;

  double r_before = 0.0;
  const double r_final = trace.records.back().r;
  for (const auto& rec : trace.records) {
    if (rec.t >= step_time) break;
    r_before = rec.r;
  }
  const double amplitude = std::fabs(r_final - r_before);
  const double half_width =
      band * (amplitude > 0.0 ? amplitude : std::max(1.0, std::fabs(r_final)));

  std::optional<double> last_outside;
  bool seen = false;
  for (const auto& rec : trace.records) {
    if (rec.t < step_time) continue;
    seen = true;
    if (std::fabs(rec.y_true - r_final) > half_width) last_outside = rec.t;
  }
  if (!seen) return std::nullopt;
  if (!last_outside) return 0.0;
  if (*last_outside >= trace.records.back().t) return std::nullopt;
  // Settled from the sample after the last excursion.
  for (const auto& rec : trace.records)
    if (rec.t > *last_outside) return rec.t - step_time;
  return std::nullopt;
}

}  // namespace adrc
