// Copyright 2026 The Privacy at Risk Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// Sampling-based sensitivity estimation for queries whose worst-case
// sensitivity is unknown or too pessimistic.
//
// Neighbouring datasets are drawn from a record pool that stands in for the
// data-generating distribution. The L1 change of the query across each pair
// is one draw of the sensitivity random variable; the empirical CDF of those
// draws gives the sampled sensitivity F_n^{-1}(gamma2).

#ifndef PAR_SENSITIVITY_ESTIMATION_H_
#define PAR_SENSITIVITY_ESTIMATION_H_

#include <cstdint>
#include <functional>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "Eigen/Dense"
#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "par/random.h"

namespace par {

// A numeric table as read from CSV: a header row and one row per record.
struct CsvTable {
  std::vector<std::string> header;
  Eigen::MatrixXd values;
};

absl::StatusOr<CsvTable> ReadCsv(std::istream& in);
absl::StatusOr<CsvTable> ReadCsvFile(const std::string& path);

// Records split into a target column and feature columns.
struct DataSource {
  Eigen::MatrixXd features;  // one row per record
  Eigen::VectorXd target;
  std::vector<std::string> feature_names;
  std::string target_name;

  std::int64_t num_records() const { return target.size(); }
  int num_features() const { return static_cast<int>(features.cols()); }

  // Checks that the target lies in [0, 1] and every feature row has
  // L2 norm at most 1 + 1e-9.
  absl::Status CheckNormalized() const;
};

// Min-max scales the target column into [0, 1] and scales every feature row
// to unit L2 norm. All-zero feature rows are kept as zero vectors.
absl::StatusOr<DataSource> Normalize(const CsvTable& raw, int target_column);

// Gaussian features with a linear target plus Gaussian noise; the result is
// raw (not yet normalized). Column 0 of the returned table is the target.
CsvTable GenerateRegressionData(std::int64_t num_records, int num_features,
                                std::uint64_t seed, double noise_sd = 0.1);

// A sampled dataset: the selected source rows and their values.
struct Dataset {
  std::vector<std::int64_t> rows;
  Eigen::MatrixXd features;
  Eigen::VectorXd target;
};

Dataset SelectRows(const DataSource& src, std::vector<std::int64_t> rows);

enum class QueryKind { kCount, kSum, kMean, kRidge };

struct QuerySpec {
  QueryKind kind = QueryKind::kCount;
  // Column read by sum/mean and by the count predicate; absent means the
  // target column.
  std::optional<int> column;
  // Count only records whose column value is >= threshold; absent counts
  // every record.
  std::optional<double> threshold;
  // Ridge regularization, must be positive.
  double lambda = 0.01;

  absl::Status Validate(const DataSource& src) const;
  // Output dimension k: the feature count for ridge, 1 otherwise.
  int OutputDimension(const DataSource& src) const;
};

// Evaluates the query. Ridge returns the minimizer of
//   (1/m) ||X w - y||^2 + lambda ||w||^2
// from the normal equations, failing if the solve residual exceeds 1e-8.
absl::StatusOr<Eigen::VectorXd> QueryEval(const QuerySpec& q,
                                          const Dataset& data);

// Two datasets of p records that share p - 1 rows (positions 0..p-2) and
// differ in the last row. Rows are drawn uniformly with replacement; the two
// final rows are distinct source rows.
absl::StatusOr<std::pair<Dataset, Dataset>> SampleNeighbourPair(
    const DataSource& src, int p, Rng& rng);

struct SamplingConfig {
  std::uint64_t seed = 0;
  int workers = 1;
};

// n draws of ||f(x) - f(y)||_1 over sampled neighbour pairs. Draw i belongs
// to chunk i / kSensitivityChunk, which uses its own derived stream, so the
// list depends only on the seed.
inline constexpr std::int64_t kSensitivityChunk = 256;
absl::StatusOr<std::vector<double>> SensitivitySamples(
    const DataSource& src, const QuerySpec& q, int p, std::int64_t n,
    const SamplingConfig& cfg);

class EmpiricalCdf {
 public:
  // Samples must be non-empty, finite and non-negative.
  static absl::StatusOr<EmpiricalCdf> Create(std::vector<double> samples);

  std::int64_t size() const { return static_cast<std::int64_t>(sorted_.size()); }
  const std::vector<double>& sorted_samples() const { return sorted_; }

  // F_n(x): fraction of samples <= x.
  double Evaluate(double x) const;

  // Smallest sample s with F_n(s) >= q, i.e. the ceil(q n)-th order
  // statistic, for q in (0, 1].
  absl::StatusOr<double> Quantile(double q) const;

  double Max() const { return sorted_.back(); }

  // sup_x |F_n(x) - cdf(x)| for a continuous reference CDF.
  double SupDistance(const std::function<double(double)>& cdf) const;

 private:
  explicit EmpiricalCdf(std::vector<double> sorted)
      : sorted_(std::move(sorted)) {}

  std::vector<double> sorted_;
};

// F_n^{-1}(gamma2).
absl::StatusOr<double> SampledSensitivity(const EmpiricalCdf& cdf,
                                          double gamma2);

// Ratio eta of true to sampled sensitivity. With `delta_true` this is
// delta_true / F_n^{-1}(gamma2); without it, 1 + rho / F_n^{-1}(1), taking
// the order constant in the O(rho / Delta*) bound to be 1.
absl::StatusOr<double> EtaEstimate(std::optional<double> delta_true,
                                   const EmpiricalCdf& cdf, double gamma2,
                                   double rho);

// Single-column CSV (header "sensitivity").
void WriteSamplesCsv(std::ostream& out, const std::vector<double>& samples);
// Two-column CSV (value, F_n) with one row per distinct sample value.
void WriteCdfCsv(std::ostream& out, const EmpiricalCdf& cdf);

}  // namespace par

#endif  // PAR_SENSITIVITY_ESTIMATION_H_
