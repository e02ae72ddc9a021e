#include "eapt/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace eapt {

namespace {

using nlohmann::json;
using Severity = Diagnostic::Severity;

constexpr int kMaxSystemQubits = 3;

class Checker {
 public:
  void error(std::string field, std::string message) {
    out.push_back({Severity::Error, std::move(field), std::move(message)});
  }
  void note(std::string field, std::string message) {
    out.push_back({Severity::Note, std::move(field), std::move(message)});
  }
  bool failed() const {
    for (const auto& d : out) {
      if (d.severity == Severity::Error) return true;
    }
    return false;
  }

  std::optional<double> rate(const json& v, const std::string& field, double max) {
    if (!v.is_number()) {
      error(field, "must be a number");
      return std::nullopt;
    }
    const double r = v.get<double>();
    if (!(r >= 0.0 && r <= max)) {
      std::ostringstream os;
      os << "must lie in [0, " << max << "], got " << r;
      error(field, os.str());
      return std::nullopt;
    }
    return r;
  }

  std::optional<std::int64_t> integer(const json& v, const std::string& field, std::int64_t min,
                                      std::int64_t max) {
    if (!v.is_number_integer()) {
      error(field, "must be an integer");
      return std::nullopt;
    }
    if (v.is_number_unsigned() && v.get<std::uint64_t>() > static_cast<std::uint64_t>(max)) {
      error(field, "must lie in [" + std::to_string(min) + ", " + std::to_string(max) + "]");
      return std::nullopt;
    }
    const auto i = v.get<std::int64_t>();
    if (i < min || i > max) {
      error(field, "must lie in [" + std::to_string(min) + ", " + std::to_string(max) + "], got " +
                       std::to_string(i));
      return std::nullopt;
    }
    return i;
  }

  std::vector<Diagnostic> out;
};

const std::set<std::string> kTopKeys = {"target",        "system_qubits", "noise",   "shots",
                                        "scaling_factors", "seed",        "bootstrap_resamples",
                                        "output_dir",    "threads",       "extrapolation",
                                        "save_datasets"};
const std::set<std::string> kNoiseKeys = {"single_qubit_depolarizing", "two_qubit_depolarizing",
                                          "amplitude_damping", "dephasing", "readout_error"};

int builtin_qubits(const std::string& target) {
  if (target == "cnot") return 2;
  if (target == "cascaded-cnot") return 3;
  return 0;
}

void parse_noise(const json& v, int n, ExperimentConfig& cfg, Checker& check) {
  cfg.noise_source = v;
  if (v.is_string()) {
    const auto name = v.get<std::string>();
    if (name == "none") {
      cfg.noise_preset = "none";
    } else if (name == "table1") {
      cfg.noise_preset = "table1";
      if (n >= 1 && n <= kMaxSystemQubits) cfg.noise = table1_noise(n);
    } else {
      check.error("noise", "unknown preset '" + name + "' (expected \"none\", \"table1\" or an object)");
    }
    return;
  }
  if (!v.is_object()) {
    check.error("noise", "must be a preset name or an object");
    return;
  }
  cfg.noise_preset = "custom";
  for (const auto& [key, value] : v.items()) {
    const std::string field = "noise." + key;
    if (!kNoiseKeys.count(key)) {
      check.error(field, "unknown key");
      continue;
    }
    if (key == "readout_error") {
      std::vector<double> rates;
      if (value.is_array()) {
        if (n >= 1 && value.size() != static_cast<std::size_t>(2 * n)) {
          check.error(field, "needs one rate per simulated qubit (" + std::to_string(2 * n) + "), got " +
                                 std::to_string(value.size()));
          continue;
        }
        for (std::size_t i = 0; i < value.size(); ++i) {
          if (auto r = check.rate(value[i], field + "[" + std::to_string(i) + "]", 0.5)) rates.push_back(*r);
        }
        if (rates.size() != value.size()) continue;
      } else if (auto r = check.rate(value, field, 0.5)) {
        rates.assign(std::max(2 * n, 1), *r);
      } else {
        continue;
      }
      if (std::any_of(rates.begin(), rates.end(), [](double r) { return r == 0.5; })) {
        check.error(field, "a readout error of 0.5 makes the confusion matrix singular");
        continue;
      }
      cfg.noise.readout = make_readout_confusion(rates);
      continue;
    }
    const auto r = check.rate(value, field, 1.0);
    if (!r) continue;
    if (key == "single_qubit_depolarizing") cfg.noise.single_qubit_depolarizing = *r;
    if (key == "two_qubit_depolarizing") cfg.noise.two_qubit_depolarizing = *r;
    if (key == "amplitude_damping") cfg.noise.amplitude_damping = *r;
    if (key == "dephasing") cfg.noise.dephasing = *r;
  }
}

void parse_scales(const json& v, ExperimentConfig& cfg, Checker& check) {
  if (!v.is_array() || v.empty()) {
    check.error("scaling_factors", "must be a non-empty array of odd integers");
    return;
  }
  std::vector<int> scales;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const std::string field = "scaling_factors[" + std::to_string(i) + "]";
    if (!v[i].is_number_integer()) {
      check.error(field, "must be an integer");
      return;
    }
    const auto s = v[i].get<std::int64_t>();
    if (s < 1 || s % 2 == 0 || s > 99) {
      check.error(field, "scaling factor " + std::to_string(s) +
                             " is not of the form s = 2n + 1 (odd, 1 <= s <= 99)");
      return;
    }
    if (!scales.empty() && s <= scales.back()) {
      check.error(field, "scaling factors must be strictly increasing");
      return;
    }
    scales.push_back(static_cast<int>(s));
  }
  cfg.scaling_factors = std::move(scales);
}

json matrix_echo(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back({m(i, j).real(), m(i, j).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

std::string Diagnostic::str() const {
  const char* level = severity == Severity::Error ? "error" : "note";
  return std::string(level) + ": " + (field.empty() ? "" : field + ": ") + message;
}

ConfigError::ConfigError(std::vector<Diagnostic> diagnostics)
    : std::runtime_error([&] {
        std::string msg = "invalid configuration";
        for (const auto& d : diagnostics) {
          if (d.severity == Severity::Error) msg += "\n  " + d.str();
        }
        return msg;
      }()),
      diagnostics_(std::move(diagnostics)) {}

bool ParsedConfig::ok() const {
  if (!config) return false;
  for (const auto& d : diagnostics) {
    if (d.severity == Severity::Error) return false;
  }
  return true;
}

ParsedConfig parse_config(const json& doc, const std::filesystem::path& base_dir) {
  Checker check;
  ExperimentConfig cfg;
  if (!doc.is_object()) {
    check.error("", "configuration must be a JSON object");
    return {std::nullopt, std::move(check.out)};
  }
  for (const auto& [key, value] : doc.items()) {
    if (!kTopKeys.count(key)) check.error(key, "unknown key");
  }

  // Target and qubit count first: other fields depend on n.
  Matrix custom;
  if (doc.contains("target")) {
    if (!doc["target"].is_string() || doc["target"].get<std::string>().empty()) {
      check.error("target", "must be \"cnot\", \"cascaded-cnot\", \"identity\" or a unitary file path");
    } else {
      cfg.target = doc["target"].get<std::string>();
    }
  }
  int implied = builtin_qubits(cfg.target);
  if (cfg.target != "identity" && implied == 0) {
    cfg.unitary_file = base_dir / cfg.target;
    try {
      custom = read_unitary_file(cfg.unitary_file);
      implied = qubit_count_for_dimension(custom.rows());
    } catch (const std::exception& e) {
      check.error("target", e.what());
    }
  }
  if (doc.contains("system_qubits")) {
    if (auto n = check.integer(doc["system_qubits"], "system_qubits", 1, 64)) {
      if (*n > kMaxSystemQubits) {
        check.error("system_qubits", std::to_string(*n) + " exceeds the simulator cap of " +
                                         std::to_string(kMaxSystemQubits) + " system qubits (" +
                                         std::to_string(2 * kMaxSystemQubits) + " simulated)");
      } else {
        cfg.system_qubits = static_cast<int>(*n);
        if (implied != 0 && implied != cfg.system_qubits) {
          check.error("system_qubits", "target '" + cfg.target + "' acts on " + std::to_string(implied) +
                                           " qubit(s), not " + std::to_string(*n));
        }
      }
    }
  } else if (implied != 0) {
    cfg.system_qubits = implied;
  } else if (cfg.target == "identity") {
    check.error("system_qubits", "required for the identity target");
  }
  const int n = cfg.system_qubits;

  if (doc.contains("noise")) parse_noise(doc["noise"], n, cfg, check);
  if (doc.contains("shots")) {
    const json& v = doc["shots"];
    if (v.is_string() && v.get<std::string>() == "exact") {
      cfg.shots.reset();
    } else if (auto s = check.integer(v, "shots", 1, std::int64_t{1} << 40)) {
      cfg.shots = *s;
    } else {
      check.out.back().message += " (or \"exact\")";
    }
  }
  if (doc.contains("scaling_factors")) parse_scales(doc["scaling_factors"], cfg, check);
  if (doc.contains("seed")) {
    const json& v = doc["seed"];
    if (v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
      cfg.seed = v.get<std::uint64_t>();
      cfg.seed_given = true;
    } else {
      check.error("seed", "must be a non-negative integer");
    }
  } else {
    check.note("seed", "not set; using the default seed 0 (reported in results)");
  }
  if (doc.contains("bootstrap_resamples")) {
    if (auto b = check.integer(doc["bootstrap_resamples"], "bootstrap_resamples", 0, 100000)) {
      cfg.bootstrap_resamples = static_cast<int>(*b);
    }
  }
  if (doc.contains("threads")) {
    if (auto t = check.integer(doc["threads"], "threads", 1, 256)) cfg.threads = static_cast<int>(*t);
  }
  if (doc.contains("output_dir")) {
    if (doc["output_dir"].is_string() && !doc["output_dir"].get<std::string>().empty()) {
      cfg.output_dir = base_dir / doc["output_dir"].get<std::string>();
    } else {
      check.error("output_dir", "must be a non-empty string");
    }
  } else {
    cfg.output_dir = base_dir / cfg.output_dir;
  }
  if (doc.contains("extrapolation")) {
    try {
      if (!doc["extrapolation"].is_string()) throw std::invalid_argument("must be a string");
      cfg.extrapolation = parse_extrapolation(doc["extrapolation"].get<std::string>());
    } catch (const std::exception& e) {
      check.error("extrapolation", e.what());
    }
  }
  if (cfg.extrapolation == ExtrapolationMethod::Quadratic && cfg.scaling_factors.size() < 3) {
    check.error("extrapolation", "quadratic extrapolation needs at least 3 scaling factors");
  }
  if (doc.contains("save_datasets")) {
    if (doc["save_datasets"].is_boolean()) {
      cfg.save_datasets = doc["save_datasets"].get<bool>();
    } else {
      check.error("save_datasets", "must be true or false");
    }
  }
  if (!check.failed()) {
    try {
      cfg.noise.validate();
    } catch (const std::exception& e) {
      check.error("noise", e.what());
    }
  }
  if (check.failed()) return {std::nullopt, std::move(check.out)};
  return {std::move(cfg), std::move(check.out)};
}

ParsedConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) return {std::nullopt, {{Severity::Error, "", "cannot read config file " + path.string()}}};
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    return {std::nullopt, {{Severity::Error, "", std::string("malformed JSON: ") + e.what()}}};
  }
  return parse_config(doc, path.parent_path());
}

ExperimentConfig require_config(const std::filesystem::path& path) {
  ParsedConfig parsed = load_config(path);
  if (!parsed.ok()) throw ConfigError(std::move(parsed.diagnostics));
  return std::move(*parsed.config);
}

Matrix read_unitary_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read unitary file " + path.string());
  long d = 0;
  if (!(in >> d) || d < 2 || d > (1 << kMaxSystemQubits) || (d & (d - 1)) != 0) {
    throw std::invalid_argument("unitary file " + path.string() + ": first line must be a dimension 2, 4 or 8");
  }
  Matrix u(d, d);
  for (long i = 0; i < d; ++i) {
    for (long j = 0; j < d; ++j) {
      std::string token;
      if (!(in >> token)) throw std::invalid_argument("unitary file " + path.string() + ": too few entries");
      const auto comma = token.find(',');
      try {
        if (comma == std::string::npos) throw std::invalid_argument("missing comma");
        std::size_t used_re = 0, used_im = 0;
        const double re = std::stod(token.substr(0, comma), &used_re);
        const double im = std::stod(token.substr(comma + 1), &used_im);
        if (used_re != comma || used_im != token.size() - comma - 1) throw std::invalid_argument("trailing text");
        u(i, j) = Complex(re, im);
      } catch (const std::exception&) {
        throw std::invalid_argument("unitary file " + path.string() + ": bad entry '" + token +
                                    "' (expected re,im)");
      }
    }
  }
  std::string extra;
  if (in >> extra) throw std::invalid_argument("unitary file " + path.string() + ": too many entries");
  const Matrix err = u.adjoint() * u - Matrix::Identity(d, d);
  if (err.cwiseAbs().maxCoeff() > 1e-10) {
    throw std::invalid_argument("unitary file " + path.string() + ": matrix is not unitary within 1e-10");
  }
  return u;
}

TargetProcess make_target(const ExperimentConfig& config) {
  if (config.target == "cnot") return TargetProcess::cnot();
  if (config.target == "cascaded-cnot") return TargetProcess::cascaded_cnot();
  if (config.target == "identity") return TargetProcess::identity(config.system_qubits);
  return TargetProcess::unitary(read_unitary_file(config.unitary_file), config.unitary_file.filename().string());
}

EaptOptions make_options(const ExperimentConfig& config) {
  EaptOptions o;
  o.noise = config.noise;
  o.shots = config.shots;
  o.scales = config.scaling_factors;
  o.seed = config.seed;
  o.bootstrap_resamples = config.bootstrap_resamples;
  o.threads = config.threads;
  o.extrapolation = config.extrapolation;
  o.keep_datasets = config.save_datasets;
  return o;
}

nlohmann::ordered_json config_echo(const ExperimentConfig& config) {
  nlohmann::ordered_json j;
  j["target"] = config.target;
  if (!config.unitary_file.empty()) j["target_unitary"] = matrix_echo(read_unitary_file(config.unitary_file));
  j["system_qubits"] = config.system_qubits;
  j["noise"] = config.noise_source;
  if (config.shots) {
    j["shots"] = *config.shots;
  } else {
    j["shots"] = "exact";
  }
  j["scaling_factors"] = config.scaling_factors;
  j["seed"] = config.seed;
  j["bootstrap_resamples"] = config.bootstrap_resamples;
  j["extrapolation"] = to_string(config.extrapolation);
  j["save_datasets"] = config.save_datasets;
  return j;
}

}  // namespace eapt
