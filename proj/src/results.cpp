#include "eapt/results.hpp"

#include <stdexcept>

namespace eapt {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

ordered_json estimate_json(const Estimate& e) {
  ordered_json j;
  j["value"] = e.value;
  j["stderr"] = e.stderr_;
  return j;
}

ordered_json optional_estimate(const std::optional<Estimate>& e) {
  return e ? estimate_json(*e) : ordered_json(nullptr);
}

ordered_json provenance_json(const std::optional<MitigatedDataset>& mit) {
  if (!mit) return nullptr;
  ordered_json j;
  j["scales"] = mit->scales;
  j["method"] = to_string(mit->method);
  ordered_json settings = ordered_json::array();
  for (const SettingProvenance& p : mit->provenance) {
    ordered_json s;
    s["setting"] = mit->data.record(p.setting).setting.label();
    s["slopes"] = p.slopes;
    s["clipped"] = p.clipped;
    s["max_clip"] = p.max_clip;
    settings.push_back(std::move(s));
  }
  j["settings"] = std::move(settings);
  return j;
}

void csv_row(std::string& out, const std::string& scale, const std::string& quantity, const Estimate& e) {
  out += scale + "," + quantity + "," + format_double(e.value) + "," + format_double(e.stderr_) + "\n";
}

}  // namespace

std::string format_double(double v) { return json(v).dump(); }

ordered_json matrix_to_json(const Matrix& m) {
  ordered_json rows = ordered_json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    ordered_json row = ordered_json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back({m(i, k).real(), m(i, k).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty()) throw std::invalid_argument("matrix: expected a non-empty array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    if (!j[i].is_array() || static_cast<Eigen::Index>(j[i].size()) != cols) {
      throw std::invalid_argument("matrix: ragged rows");
    }
    for (Eigen::Index k = 0; k < cols; ++k) {
      const json& e = j[i][k];
      if (!e.is_array() || e.size() != 2) throw std::invalid_argument("matrix: entries must be [re, im]");
      m(i, k) = Complex(e[0].get<double>(), e[1].get<double>());
    }
  }
  return m;
}

ordered_json dataset_to_json(const TomographyDataset& data) {
  ordered_json j;
  j["qubits"] = data.qubits();
  ordered_json records = ordered_json::array();
  for (const CountsRecord& r : data.records()) {
    ordered_json rec;
    rec["setting"] = r.setting.label();
    if (r.shots) {
      rec["shots"] = *r.shots;
    } else {
      rec["shots"] = "exact";
    }
    rec["frequencies"] = r.frequencies;
    rec["flagged"] = r.flagged;
    records.push_back(std::move(rec));
  }
  j["records"] = std::move(records);
  return j;
}

TomographyDataset dataset_from_json(const json& j) {
  std::vector<CountsRecord> records;
  for (const json& rec : j.at("records")) {
    std::optional<std::int64_t> shots;
    if (rec.at("shots").is_number_integer()) shots = rec["shots"].get<std::int64_t>();
    records.push_back(CountsRecord{MeasurementSetting::from_label(rec.at("setting").get<std::string>()), shots,
                                   rec.at("frequencies").get<std::vector<double>>(),
                                   rec.value("flagged", false)});
  }
  return TomographyDataset(j.at("qubits").get<int>(), std::move(records));
}

ordered_json results_to_json(const ExperimentConfig& config, const EaptResult& result) {
  ordered_json j;
  j["config"] = config_echo(config);
  j["target"] = result.target;
  j["system_qubits"] = result.qubits;
  j["circuit_executions"] = eapt_execution_count(result.qubits, result.per_scale.size());
  ordered_json scales = ordered_json::array();
  for (const ScaleResult& s : result.per_scale) {
    ordered_json e;
    e["scale"] = s.scale;
    e["state_fidelity"] = estimate_json(s.state_fidelity);
    e["gate_fidelity"] = optional_estimate(s.gate_fidelity);
    e["trace_preservation_error"] = s.trace_preservation_error;
    e["mle_iterations"] = s.mle_iterations;
    scales.push_back(std::move(e));
  }
  j["per_scale"] = std::move(scales);
  if (result.mitigated_state_fidelity) {
    ordered_json m;
    m["state_fidelity"] = estimate_json(*result.mitigated_state_fidelity);
    m["gate_fidelity"] = optional_estimate(result.mitigated_gate_fidelity);
    j["mitigated"] = std::move(m);
  } else {
    j["mitigated"] = nullptr;
  }
  j["choi"] = matrix_to_json(result.choi.matrix());
  ordered_json kraus = ordered_json::array();
  for (const Matrix& a : result.kraus.operators()) kraus.push_back(matrix_to_json(a));
  j["kraus"] = std::move(kraus);
  j["zne_provenance"] = {{"state", provenance_json(result.state_mitigation)},
                         {"process", provenance_json(result.process_mitigation)}};
  j["warnings"] = result.warnings;
  return j;
}

std::string fidelities_csv(const EaptResult& result) {
  std::string out = "scale,quantity,value,stderr\n";
  for (const ScaleResult& s : result.per_scale) {
    const std::string scale = std::to_string(s.scale);
    csv_row(out, scale, "state_fidelity", s.state_fidelity);
    if (s.gate_fidelity) csv_row(out, scale, "avg_gate_fidelity", *s.gate_fidelity);
  }
  if (result.mitigated_state_fidelity) csv_row(out, "mitigated", "state_fidelity", *result.mitigated_state_fidelity);
  if (result.mitigated_gate_fidelity) csv_row(out, "mitigated", "avg_gate_fidelity", *result.mitigated_gate_fidelity);
  return out;
}

ordered_json comparison_to_json(const ExperimentConfig& config, const ComparisonReport& report) {
  ordered_json j;
  j["config"] = config_echo(config);
  j["choi_distance"] = report.choi_distance;
  j["eapt"] = {{"avg_gate_fidelity", report.eapt_gate_fidelity ? ordered_json(*report.eapt_gate_fidelity) : nullptr},
               {"circuit_executions", report.eapt_executions},
               {"choi", matrix_to_json(report.eapt.choi.matrix())}};
  j["standard_qpt"] = {
      {"avg_gate_fidelity", report.qpt_gate_fidelity ? ordered_json(*report.qpt_gate_fidelity) : nullptr},
      {"circuit_executions", report.qpt_executions},
      {"chi", matrix_to_json(report.qpt_chi.coefficients())}};
  if (report.eapt_gate_fidelity && report.qpt_gate_fidelity) {
    j["avg_gate_fidelity_difference"] = *report.eapt_gate_fidelity - *report.qpt_gate_fidelity;
  } else {
    j["avg_gate_fidelity_difference"] = nullptr;
  }
  j["warnings"] = report.eapt.warnings;
  return j;
}

}  // namespace eapt
