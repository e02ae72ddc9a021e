#pragma once

// Zero-noise extrapolation over tomography datasets taken at several noise
// scaling factors. Each outcome probability is extrapolated to s = 0
// independently, then every setting's distribution is clipped to [0, 1] and
// renormalized before it reaches the likelihood.

#include "eapt/tomography.hpp"

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace eapt {

/// (scaling factor, value) pairs with strictly increasing odd s.
class ZNESeries {
 public:
  explicit ZNESeries(std::vector<std::pair<int, double>> points);

  const std::vector<std::pair<int, double>>& points() const { return points_; }
  std::size_t size() const { return points_.size(); }

 private:
  std::vector<std::pair<int, double>> points_;
};

enum class ExtrapolationMethod {
  Linear,      ///< least-squares line, the default
  Quadratic,   ///< least-squares parabola, needs >= 3 points
  Richardson,  ///< interpolating polynomial through every point
};

ExtrapolationMethod parse_extrapolation(const std::string& name);
std::string to_string(ExtrapolationMethod m);

struct LinearFit {
  double intercept = 0.0;
  double slope = 0.0;
};

LinearFit fit_linear(const ZNESeries& series);
/// Intercept at s = 0 of the least-squares line.
double extrapolate_linear(const ZNESeries& series);
/// Intercept at s = 0 of the least-squares polynomial of the given degree.
double extrapolate_polynomial(const ZNESeries& series, int degree);
double extrapolate(const ZNESeries& series, ExtrapolationMethod method);

struct SettingProvenance {
  std::uint32_t setting = 0;
  /// raw[k][b]: outcome b at scales[k] (after readout correction, if any).
  std::vector<std::vector<double>> raw;
  /// Least-squares slope per outcome, reported for every method.
  std::vector<double> slopes;
  /// Extrapolated values before clipping.
  std::vector<double> extrapolated;
  bool clipped = false;
  /// Largest distance any entry moved when clipped into [0, 1].
  double max_clip = 0.0;
};

struct MitigatedDataset {
  TomographyDataset data;
  std::vector<int> scales;
  ExtrapolationMethod method = ExtrapolationMethod::Linear;
  std::vector<SettingProvenance> provenance;
};

/// Extrapolates `by_scale` (keyed by s) to zero noise. When `readout` is given,
/// each dataset is readout-corrected first.
MitigatedDataset mitigate_dataset(const std::map<int, TomographyDataset>& by_scale,
                                  ExtrapolationMethod method = ExtrapolationMethod::Linear,
                                  const ReadoutModel* readout = nullptr, int threads = 1);

}  // namespace eapt
