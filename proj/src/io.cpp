#include "adrc/io.hpp"

#include <charconv>
#include <fstream>
#include <ostream>
#include <sstream>

#include <json.hpp>

namespace adrc::io {

using nlohmann::json;

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string coefficients_to_json(const FbtfCoefficients& c, double k_eso) {
  json j;
  j["schema_version"] = "1";
  j["order"] = c.order;
  j["T"] = c.T;
  j["b0"] = c.b0;
  j["omega_cl"] = c.omega_cl;
  j["k_eso"] = k_eso;
  j["z_eso"] = c.z_eso;
  j["alpha"] = c.alpha;
  j["beta"] = c.beta;
  j["gamma"] = c.gamma;
  j["feedforward"] = c.feedforward;
  return j.dump(2) + "\n";
}

namespace {

const json& require(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end())
    throw SchemaError(std::string("missing key: ") + key);
  return *it;
}

std::vector<double> number_array(const json& j, const char* key,
                                 std::size_t expected) {
  const json& arr = require(j, key);
  if (!arr.is_array() || arr.size() != expected)
    throw SchemaError(std::string(key) + ": expected array of length " +
                      std::to_string(expected));
  std::vector<double> out;
  for (const auto& v : arr) {
    if (!v.is_number()) throw SchemaError(std::string(key) + ": non-numeric entry");
    out.push_back(v.get<double>());
  }
  return out;
}

json parse(const std::string& text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw SchemaError("invalid JSON");
  return j;
}

}  // namespace

CoefficientFile coefficients_from_json(const std::string& text) {
  const json j = parse(text);
  if (require(j, "schema_version").get<std::string>() != "1")
    throw SchemaError("unsupported schema_version");

  CoefficientFile f;
  f.coeffs.order = require(j, "order").get<int>();
  if (f.coeffs.order < 1) throw SchemaError("order must be >= 1");
  const auto m = static_cast<std::size_t>(f.coeffs.order) + 1;
  f.coeffs.T = require(j, "T").get<double>();
  f.coeffs.b0 = require(j, "b0").get<double>();
  f.coeffs.omega_cl = require(j, "omega_cl").get<double>();
  f.coeffs.z_eso = require(j, "z_eso").get<double>();
  f.coeffs.alpha = number_array(j, "alpha", m);
  f.coeffs.beta = number_array(j, "beta", m);
  f.coeffs.gamma = number_array(j, "gamma", m);
  f.coeffs.feedforward = require(j, "feedforward").get<double>();
  f.k_eso = require(j, "k_eso").get<double>();
  return f;
}

std::string coefficients_to_c_header(const FbtfCoefficients& c, double k_eso) {
  const int m = c.order + 1;
  std::ostringstream out;
  out << "/* Discrete-time ADRC feedback-transfer-function coefficients.\n"
      << " *\n"
      << " * Generated for order n = " << c.order
      << ", T = " << format_double(c.T) << " s, b0 = " << format_double(c.b0)
      << ",\n * omega_cl = " << format_double(c.omega_cl)
      << " rad/s, k_eso = " << format_double(k_eso)
      << " (z_eso = " << format_double(c.z_eso) << ").\n"
      << " *\n"
      << " * Controller step (transposed direct form II, storage x[0..n]):\n"
      << " *   c     = gamma[0]*y + x[0];\n"
      << " *   u     = ADRC_FEEDFORWARD*r - c;\n"
      << " *   u_lim = limit(u);                       (optional limiter)\n"
      << " *   for (i = 0; i < n; ++i)\n"
      << " *     x[i] = x[i+1] - alpha[i]*c + beta[i]*u_lim + gamma[i+1]*y;\n"
      << " *   x[n] = beta[n]*u_lim - alpha[n]*c;\n"
      << " */\n\n"
      << "#ifndef ADRC_COEFFS_H\n#define ADRC_COEFFS_H\n\n"
      << "#define ADRC_ORDER " << c.order << "\n\n"
      << "static const double ADRC_FEEDFORWARD = " << format_double(c.feedforward)
      << "; /* k1/b0 */\n\n";
  auto array = [&](const char* name, const std::vector<double>& v) {
    out << "static const double " << name << "[" << m << "] = {";
    for (int i = 0; i < m; ++i)
      out << (i ? ", " : "") << format_double(v[i]);
    out << "};\n";
  };
  array("ADRC_ALPHA", c.alpha);  // alpha_1..alpha_{n+1}
  array("ADRC_BETA", c.beta);    // beta_0..beta_n
  array("ADRC_GAMMA", c.gamma);  // gamma_0..gamma_n
  out << "\n#endif /* ADRC_COEFFS_H */\n";
  return out.str();
}

namespace {

Schedule schedule_from(const json& j, const char* key) {
  Schedule s;
  auto it = j.find(key);
  if (it == j.end()) return s;
  if (!it->is_array()) throw SchemaError(std::string(key) + ": expected array");
  for (const auto& p : *it) {
    if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number())
      throw SchemaError(std::string(key) + ": entries must be [time, value]");
    s.points.emplace_back(p[0].get<double>(), p[1].get<double>());
  }
  return s;
}

}  // namespace

Scenario scenario_from_json(const std::string& text) {
  const json j = parse(text);
  Scenario sc;
  sc.duration = require(j, "duration").get<double>();
  sc.T = require(j, "T").get<double>();

  const json& ctrl = require(j, "controller");
  sc.controller.order = require(ctrl, "order").get<int>();
  sc.controller.b0 = require(ctrl, "b0").get<double>();
  sc.controller.omega_cl = require(ctrl, "omega_cl").get<double>();
  sc.controller.k_eso = require(ctrl, "k_eso").get<double>();
  sc.controller.T = sc.T;

  if (auto it = j.find("limiter"); it != j.end()) {
    const json& lim = *it;
    if (lim.contains("u_min")) sc.limiter.u_min = lim["u_min"].get<double>();
    if (lim.contains("u_max")) sc.limiter.u_max = lim["u_max"].get<double>();
    if (lim.contains("rate_max")) sc.limiter.rate_max = lim["rate_max"].get<double>();
  }

  sc.setpoint = schedule_from(j, "setpoint");
  sc.disturbance = schedule_from(j, "disturbance");
  if (j.contains("noise_sigma")) sc.noise_sigma = j["noise_sigma"].get<double>();
  if (j.contains("seed")) sc.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("loop_delay_samples"))
    sc.loop_delay_samples = j["loop_delay_samples"].get<int>();
  if (j.contains("substeps")) sc.substeps = j["substeps"].get<int>();

  const json& plant = require(j, "plant");
  const std::string type = require(plant, "type").get<std::string>();
  if (type == "integrator_chain") {
    sc.plant.variant = PlantModel::Variant::integrator_chain;
    sc.plant.n = plant.contains("n") ? plant["n"].get<int>() : sc.controller.order;
    sc.plant.b0 = plant.contains("b0") ? plant["b0"].get<double>() : sc.controller.b0;
  } else if (type == "buck_averaged") {
    sc.plant.variant = PlantModel::Variant::buck_averaged;
    sc.plant.C = require(plant, "C").get<double>();
    sc.plant.R = require(plant, "R").get<double>();
  } else {
    throw SchemaError("plant.type must be integrator_chain or buck_averaged");
  }

  try {
    sc.validate();
  } catch (const std::invalid_argument& e) {
    throw SchemaError(e.what());
  }
  return sc;
}

void write_trace_csv(std::ostream& out, const SimTrace& trace) {
  out << "k,t,r,y,y_true,u,u_lim,sat,dist\n";
  for (const auto& rec : trace.records) {
    out << rec.k << ',' << format_double(rec.t) << ',' << format_double(rec.r)
        << ',' << format_double(rec.y) << ',' << format_double(rec.y_true)
        << ',' << format_double(rec.u) << ',' << format_double(rec.u_lim)
        << ',' << (rec.limiter_active ? 1 : 0) << ','
        << format_double(rec.disturbance) << '\n';
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open file for writing: " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace adrc::io
