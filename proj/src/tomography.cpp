#include "eapt/tomography.hpp"

#include "eapt/parallel.hpp"
#include "eapt/pauli.hpp"
#include "eapt/random.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace eapt {

namespace {

std::uint32_t pow3(int n) {
  std::uint32_t r = 1;
  for (int i = 0; i < n; ++i) r *= 3;
  return r;
}

// Rotation taking the measured Pauli's eigenbasis onto the computational one
// (+1 eigenvector -> |0>).
const Matrix& basis_rotation(Basis b) {
  static const Matrix kX = [] {
    const double h = std::sqrt(0.5);
    Matrix m(2, 2);
    m << h, h, -h, h;  // RY(-pi/2)
    return m;
  }();
  static const Matrix kY = [] {
    const double h = std::sqrt(0.5);
    Matrix m(2, 2);
    m << Complex(h, 0), Complex(0, -h), Complex(0, -h), Complex(h, 0);  // RX(pi/2)
    return m;
  }();
  static const Matrix kZ = Matrix::Identity(2, 2);
  switch (b) {
    case Basis::X: return kX;
    case Basis::Y: return kY;
    case Basis::Z: return kZ;
  }
  throw std::logic_error("basis_rotation: unknown basis");
}

// Applies a 2x2 map along each qubit axis: p'[..j..] = sum_i p[..i..] M(i, j).
void apply_axis_maps(std::vector<double>& p, const std::vector<Eigen::Matrix2d>& maps, int n) {
  const std::size_t dim = p.size();
  const int limit = std::min<int>(n, static_cast<int>(maps.size()));
  for (int q = 0; q < limit; ++q) {
    const Eigen::Matrix2d& m = maps[q];
    const std::size_t bit = std::size_t{1} << (n - 1 - q);
    for (std::size_t i = 0; i < dim; ++i) {
      if (i & bit) continue;
      const double a = p[i], b = p[i | bit];
      p[i] = a * m(0, 0) + b * m(1, 0);
      p[i | bit] = a * m(0, 1) + b * m(1, 1);
    }
  }
}

int pauli_code(Basis b) { return static_cast<int>(b) + 1; }

}  // namespace

// ---- MeasurementSetting ---------------------------------------------------------

MeasurementSetting::MeasurementSetting(std::vector<Basis> bases) : bases_(std::move(bases)) {
  if (bases_.empty() || bases_.size() > 6) {
    throw std::out_of_range("MeasurementSetting: qubit count must be in [1, 6]");
  }
}

MeasurementSetting MeasurementSetting::from_index(std::uint32_t index, int qubits) {
  if (qubits < 1 || qubits > 6) throw std::out_of_range("MeasurementSetting: qubit count out of range");
  if (index >= pow3(qubits)) throw std::out_of_range("MeasurementSetting: index out of range");
  std::vector<Basis> bases(qubits);
  for (int q = qubits - 1; q >= 0; --q) {
    bases[q] = static_cast<Basis>(index % 3);
    index /= 3;
  }
  return MeasurementSetting(std::move(bases));
}

MeasurementSetting MeasurementSetting::from_label(const std::string& label) {
  std::vector<Basis> bases;
  for (char c : label) {
    switch (c) {
      case 'X': bases.push_back(Basis::X); break;
      case 'Y': bases.push_back(Basis::Y); break;
      case 'Z': bases.push_back(Basis::Z); break;
      default: throw std::invalid_argument("MeasurementSetting: bad label '" + label + "'");
    }
  }
  return MeasurementSetting(std::move(bases));
}

std::uint32_t MeasurementSetting::index() const {
  std::uint32_t idx = 0;
  for (Basis b : bases_) idx = idx * 3 + static_cast<std::uint32_t>(b);
  return idx;
}

std::string MeasurementSetting::label() const {
  std::string out;
  for (Basis b : bases_) out += "XYZ"[static_cast<int>(b)];
  return out;
}

// ---- TomographyDataset ------------------------------------------------------------

TomographyDataset::TomographyDataset(int qubits, std::vector<CountsRecord> records)
    : qubits_(qubits), records_(std::move(records)) {
  if (qubits < 1 || qubits > 6) throw std::out_of_range("TomographyDataset: qubit count out of range");
  const std::uint32_t expected = pow3(qubits);
  if (records_.size() != expected) {
    throw std::invalid_argument("TomographyDataset: expected " + std::to_string(expected) +
                                " settings, got " + std::to_string(records_.size()));
  }
  std::sort(records_.begin(), records_.end(), [](const CountsRecord& a, const CountsRecord& b) {
    return a.setting.index() < b.setting.index();
  });
  const std::size_t outcomes = std::size_t{1} << qubits;
  for (std::uint32_t i = 0; i < expected; ++i) {
    const CountsRecord& r = records_[i];
    if (r.setting.qubits() != qubits) {
      throw std::invalid_argument("TomographyDataset: setting width mismatch");
    }
    if (r.setting.index() != i) {
      throw std::invalid_argument("TomographyDataset: setting " + r.setting.label() +
                                  " duplicated or missing");
    }
    if (r.frequencies.size() != outcomes) {
      throw std::invalid_argument("TomographyDataset: record " + r.setting.label() +
                                  " has wrong outcome count");
    }
    double sum = 0.0;
    for (double f : r.frequencies) {
      if (!std::isfinite(f)) throw std::invalid_argument("TomographyDataset: non-finite frequency");
      if (f < -1e-12 && !r.flagged) {
        throw std::invalid_argument("TomographyDataset: negative frequency in unflagged record " +
                                    r.setting.label());
      }
      sum += f;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
      throw std::invalid_argument("TomographyDataset: record " + r.setting.label() +
                                  " frequencies do not sum to 1");
    }
  }
}

// ---- settings and counts ------------------------------------------------------

std::vector<MeasurementSetting> all_settings(int n) {
  if (n < 1 || n > 6) throw std::out_of_range("all_settings: n must be in [1, 6]");
  std::vector<MeasurementSetting> out;
  const std::uint32_t count = pow3(n);
  out.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) out.push_back(MeasurementSetting::from_index(i, n));
  return out;
}

std::vector<double> born_probabilities(const Matrix& rho, const MeasurementSetting& setting) {
  const int n = setting.qubits();
  if (rho.rows() != (Eigen::Index{1} << n) || rho.cols() != rho.rows()) {
    throw std::invalid_argument("born_probabilities: dimension mismatch");
  }
  Matrix rotated = rho;
  for (int q = 0; q < n; ++q) {
    if (setting.basis(q) == Basis::Z) continue;
    const int target[] = {q};
    apply_local(rotated, basis_rotation(setting.basis(q)), target, n);
  }
  std::vector<double> p(static_cast<std::size_t>(rho.rows()));
  for (Eigen::Index i = 0; i < rho.rows(); ++i) p[i] = std::max(0.0, rotated(i, i).real());
  return p;
}

std::vector<double> apply_confusion(const std::vector<double>& probabilities,
                                    const ReadoutModel& readout) {
  const int n = qubit_count_for_dimension(static_cast<Eigen::Index>(probabilities.size()));
  if (n < 1) throw std::invalid_argument("apply_confusion: outcome count is not 2^n");
  std::vector<double> out = probabilities;
  apply_axis_maps(out, readout.confusion, n);
  return out;
}

std::vector<double> sample_frequencies(const std::vector<double>& probabilities,
                                       std::int64_t shots, std::uint64_t seed) {
  if (shots <= 0) throw std::invalid_argument("sample_frequencies: shots must be positive");
  std::vector<double> cdf(probabilities.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < probabilities.size(); ++i) {
    acc += std::max(0.0, probabilities[i]);
    cdf[i] = acc;
  }
  if (!(acc > 0.0)) throw std::invalid_argument("sample_frequencies: empty distribution");
  std::vector<std::int64_t> counts(probabilities.size(), 0);
  Rng rng(seed);
  for (std::int64_t s = 0; s < shots; ++s) {
    const double u = rng.uniform() * acc;
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    if (it == cdf.end()) --it;
    ++counts[static_cast<std::size_t>(it - cdf.begin())];
  }
  std::vector<double> freq(probabilities.size());
  for (std::size_t i = 0; i < freq.size(); ++i) {
    freq[i] = static_cast<double>(counts[i]) / static_cast<double>(shots);
  }
  return freq;
}

CountsRecord simulate_counts(const Matrix& rho, const MeasurementSetting& setting,
                             std::optional<std::int64_t> shots, const ReadoutModel* readout,
                             std::uint64_t seed) {
  if (shots && *shots <= 0) throw std::invalid_argument("simulate_counts: shots must be positive");
  std::vector<double> p = born_probabilities(rho, setting);
  if (readout) p = apply_confusion(p, *readout);
  const double total = std::accumulate(p.begin(), p.end(), 0.0);
  for (double& v : p) v /= total;
  CountsRecord record{setting, shots, {}, false};
  record.frequencies = shots ? sample_frequencies(p, *shots, seed) : std::move(p);
  return record;
}

CountsRecord simulate_counts(const DensityMatrix& rho, const MeasurementSetting& setting,
                             std::optional<std::int64_t> shots, const ReadoutModel* readout,
                             std::uint64_t seed) {
  return simulate_counts(rho.matrix(), setting, shots, readout, seed);
}

TomographyDataset measure_all(const Matrix& rho, std::optional<std::int64_t> shots,
                              const ReadoutModel* readout, std::uint64_t seed, int threads) {
  const int n = qubit_count_for_dimension(rho.rows());
  if (n < 1 || n > 6) throw std::out_of_range("measure_all: state must have 1..6 qubits");
  const auto settings = all_settings(n);
  std::vector<CountsRecord> records(settings.size(), CountsRecord{settings[0], shots, {}, false});
  parallel_for(settings.size(), threads, [&](std::size_t k) {
    records[k] = simulate_counts(rho, settings[k], shots, readout, derive_seed(seed, {k}));
  });
  return TomographyDataset(n, std::move(records));
}

CountsRecord rem_correct(const CountsRecord& record, const ReadoutModel& readout) {
  std::vector<Eigen::Matrix2d> inverses;
  inverses.reserve(readout.confusion.size());
  for (const auto& c : readout.confusion) {
    if (std::abs(c.determinant()) < 1e-12) {
      throw std::domain_error("rem_correct: singular confusion matrix (error rate 0.5)");
    }
    inverses.push_back(c.inverse());
  }
  CountsRecord out = record;
  apply_axis_maps(out.frequencies, inverses, record.setting.qubits());
  double moved = 0.0;
  for (double& f : out.frequencies) {
    if (f < 0.0) {
      moved = std::max(moved, -f);
      f = 0.0;
    }
  }
  const double total = std::accumulate(out.frequencies.begin(), out.frequencies.end(), 0.0);
  if (!(total > 0.0)) throw std::domain_error("rem_correct: corrected distribution vanished");
  for (double& f : out.frequencies) f /= total;
  out.flagged = record.flagged || moved > CountsRecord::kClipFlagThreshold;
  return out;
}

TomographyDataset rem_correct(const TomographyDataset& data, const ReadoutModel& readout) {
  std::vector<CountsRecord> records;
  records.reserve(data.setting_count());
  for (const CountsRecord& r : data.records()) records.push_back(rem_correct(r, readout));
  return TomographyDataset(data.qubits(), std::move(records));
}

// ---- Stokes / linear inversion ------------------------------------------------

void walsh_hadamard(std::vector<double>& v) {
  const std::size_t n = v.size();
  for (std::size_t len = 1; len < n; len <<= 1) {
    for (std::size_t i = 0; i < n; i += 2 * len) {
      for (std::size_t j = i; j < i + len; ++j) {
        const double a = v[j], b = v[j + len];
        v[j] = a + b;
        v[j + len] = a - b;
      }
    }
  }
}

StokesVector stokes_from_dataset(const TomographyDataset& data) {
  const int n = data.qubits();
  const std::uint32_t strings = pauli_count(n);
  const std::size_t outcomes = std::size_t{1} << n;
  RealVector sum = RealVector::Zero(strings);
  Eigen::VectorXi hits = Eigen::VectorXi::Zero(strings);
  std::vector<double> w;
  for (const CountsRecord& r : data.records()) {
    w = r.frequencies;
    walsh_hadamard(w);  // w[mask] = <product of measured Paulis on mask>
    for (std::size_t mask = 0; mask < outcomes; ++mask) {
      std::uint32_t m = 0;
      for (int q = 0; q < n; ++q) {
        m <<= 2;
        if (mask & (std::size_t{1} << (n - 1 - q))) m |= pauli_code(r.setting.basis(q));
      }
      sum(m) += w[mask];
      ++hits(m);
    }
  }
  StokesVector s{n, RealVector(strings)};
  for (std::uint32_t m = 0; m < strings; ++m) {
    if (hits(m) == 0) throw std::invalid_argument("stokes_from_dataset: incomplete dataset");
    s.coefficients(m) = sum(m) / hits(m);
  }
  s.coefficients(0) = 1.0;
  return s;
}

Matrix linear_inversion(const StokesVector& s) {
  const int n = s.qubits;
  if (s.coefficients.size() != static_cast<Eigen::Index>(pauli_count(n))) {
    throw std::invalid_argument("linear_inversion: coefficient count is not 4^n");
  }
  const Eigen::Index d = Eigen::Index{1} << n;
  Matrix rho = Matrix::Zero(d, d);
  for (std::uint32_t m = 0; m < pauli_count(n); ++m) {
    if (s.coefficients(m) != 0.0) add_pauli(rho, PauliString::from_index(m, n), s.coefficients(m));
  }
  return rho / static_cast<double>(d);
}

}  // namespace eapt
