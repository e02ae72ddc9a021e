#include "eapt/mitigation.hpp"

#include "eapt/circuits.hpp"
#include "eapt/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace eapt {

ZNESeries::ZNESeries(std::vector<std::pair<int, double>> points) : points_(std::move(points)) {
  if (points_.size() < 2) throw std::invalid_argument("ZNESeries: at least 2 points are required");
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const int s = points_[i].first;
    if (s < 1 || s % 2 == 0) {
      throw std::invalid_argument("ZNESeries: scaling factor " + std::to_string(s) + " is not odd and positive");
    }
    if (i > 0 && s <= points_[i - 1].first) {
      throw std::invalid_argument("ZNESeries: scaling factors must be strictly increasing");
    }
    if (!std::isfinite(points_[i].second)) throw std::invalid_argument("ZNESeries: non-finite value");
  }
}

ExtrapolationMethod parse_extrapolation(const std::string& name) {
  if (name == "linear") return ExtrapolationMethod::Linear;
  if (name == "quadratic") return ExtrapolationMethod::Quadratic;
  if (name == "richardson") return ExtrapolationMethod::Richardson;
  throw std::invalid_argument("unknown extrapolation method '" + name +
                              "' (expected linear, quadratic or richardson)");
}

std::string to_string(ExtrapolationMethod m) {
  switch (m) {
    case ExtrapolationMethod::Linear: return "linear";
    case ExtrapolationMethod::Quadratic: return "quadratic";
    case ExtrapolationMethod::Richardson: return "richardson";
  }
  return "unknown";
}

LinearFit fit_linear(const ZNESeries& series) {
  const auto& pts = series.points();
  const double n = static_cast<double>(pts.size());
  double mean_s = 0.0, mean_v = 0.0;
  for (const auto& [s, v] : pts) {
    mean_s += s;
    mean_v += v;
  }
  mean_s /= n;
  mean_v /= n;
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [s, v] : pts) {
    sxx += (s - mean_s) * (s - mean_s);
    sxy += (s - mean_s) * (v - mean_v);
  }
  const double slope = sxy / sxx;
  return LinearFit{mean_v - slope * mean_s, slope};
}

double extrapolate_linear(const ZNESeries& series) { return fit_linear(series).intercept; }

double extrapolate_polynomial(const ZNESeries& series, int degree) {
  const auto& pts = series.points();
  if (degree < 1) throw std::invalid_argument("extrapolate_polynomial: degree must be positive");
  if (static_cast<std::size_t>(degree) >= pts.size()) {
    throw std::invalid_argument("extrapolate_polynomial: degree " + std::to_string(degree) + " needs at least " +
                                std::to_string(degree + 1) + " points");
  }
  if (degree == 1) return extrapolate_linear(series);
  // Scale s into [0, 1] so the Vandermonde system stays well conditioned.
  const double scale = pts.back().first;
  Eigen::MatrixXd V(pts.size(), degree + 1);
  Eigen::VectorXd y(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double x = pts[i].first / scale;
    double power = 1.0;
    for (int k = 0; k <= degree; ++k) {
      V(i, k) = power;
      power *= x;
    }
    y(i) = pts[i].second;
  }
  const Eigen::VectorXd coeffs = V.colPivHouseholderQr().solve(y);
  return coeffs(0);
}

double extrapolate(const ZNESeries& series, ExtrapolationMethod method) {
  switch (method) {
    case ExtrapolationMethod::Linear: return extrapolate_linear(series);
    case ExtrapolationMethod::Quadratic: return extrapolate_polynomial(series, 2);
    case ExtrapolationMethod::Richardson: return extrapolate_polynomial(series, static_cast<int>(series.size()) - 1);
  }
  throw std::logic_error("extrapolate: unknown method");
}

MitigatedDataset mitigate_dataset(const std::map<int, TomographyDataset>& by_scale, ExtrapolationMethod method,
                                  const ReadoutModel* readout, int threads) {
  if (by_scale.size() < 2) throw std::invalid_argument("mitigate_dataset: at least 2 scaling factors are required");
  if (method == ExtrapolationMethod::Quadratic && by_scale.size() < 3) {
    throw std::invalid_argument("mitigate_dataset: quadratic extrapolation needs at least 3 scaling factors");
  }
  std::vector<int> scales;
  std::vector<TomographyDataset> sets;
  for (const auto& [s, data] : by_scale) {
    ScalingFactor::from_scale(s);
    scales.push_back(s);
    sets.push_back(readout ? rem_correct(data, *readout) : data);
  }
  const int n = sets.front().qubits();
  for (const auto& d : sets) {
    if (d.qubits() != n) throw std::invalid_argument("mitigate_dataset: datasets cover different qubit counts");
  }
  const std::size_t settings = sets.front().setting_count();
  const std::size_t outcomes = std::size_t{1} << n;

  std::vector<CountsRecord> records(settings, sets.front().records().front());
  std::vector<SettingProvenance> provenance(settings);
  parallel_for(settings, threads, [&](std::size_t k) {
    SettingProvenance prov;
    prov.setting = static_cast<std::uint32_t>(k);
    bool inherited_flag = false;
    for (const auto& d : sets) {
      prov.raw.push_back(d.records()[k].frequencies);
      inherited_flag = inherited_flag || d.records()[k].flagged;
    }
    std::vector<double> values(outcomes);
    for (std::size_t b = 0; b < outcomes; ++b) {
      std::vector<std::pair<int, double>> pts;
      for (std::size_t i = 0; i < scales.size(); ++i) pts.emplace_back(scales[i], prov.raw[i][b]);
      const ZNESeries series(std::move(pts));
      prov.slopes.push_back(fit_linear(series).slope);
      values[b] = extrapolate(series, method);
    }
    prov.extrapolated = values;
    for (double& v : values) {
      const double clipped = std::clamp(v, 0.0, 1.0);
      if (clipped != v) {
        prov.clipped = true;
        prov.max_clip = std::max(prov.max_clip, std::abs(clipped - v));
      }
      v = clipped;
    }
    const double total = std::accumulate(values.begin(), values.end(), 0.0);
    if (!(total > 0.0)) {
      throw std::domain_error("mitigate_dataset: setting " + sets.front().records()[k].setting.label() +
                              " extrapolated to an all-zero distribution");
    }
    for (double& v : values) v /= total;
    const CountsRecord& base = sets.front().records()[k];
    records[k] = CountsRecord{base.setting, std::nullopt, std::move(values),
                              inherited_flag || prov.max_clip > CountsRecord::kClipFlagThreshold};
    provenance[k] = std::move(prov);
  });
  return MitigatedDataset{TomographyDataset(n, std::move(records)), std::move(scales), method, std::move(provenance)};
}

}  // namespace eapt
