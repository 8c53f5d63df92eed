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


#include "par/sensitivity_estimation.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include "absl/strings/string_view.h"

#include "absl/strings/ascii.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"
#include "par/internal/status_macros.h"

namespace par {
namespace {

std::vector<absl::string_view> SplitFields(absl::string_view line) {
  std::vector<absl::string_view> fields = absl::StrSplit(line, ',');
  for (absl::string_view& f : fields) f = absl::StripAsciiWhitespace(f);
  return fields;
}

double ColumnValue(const Dataset& data, const QuerySpec& q, Eigen::Index row) {
  return q.column.has_value() ? data.features(row, *q.column)
                              : data.target(row);
}

}  // namespace

absl::StatusOr<CsvTable> ReadCsv(std::istream& in) {
  CsvTable table;
  std::vector<std::vector<double>> rows;
  std::string line;
  std::int64_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    absl::string_view view = absl::StripAsciiWhitespace(line);
    if (view.empty() || view.front() == '#') continue;
    std::vector<absl::string_view> fields = SplitFields(view);
    if (table.header.empty()) {
      for (absl::string_view f : fields) table.header.emplace_back(f);
      continue;
    }
    if (fields.size() != table.header.size()) {
      return absl::InvalidArgumentError(absl::StrCat(
          "line ", line_number, ": expected ", table.header.size(),
          " fields, found ", fields.size()));
    }
    std::vector<double>& row = rows.emplace_back();
    for (absl::string_view f : fields) {
      double value;
      if (!absl::SimpleAtod(f, &value) || !std::isfinite(value)) {
        return absl::InvalidArgumentError(absl::StrCat(
            "line ", line_number, ": non-numeric value '", std::string(f), "'"));
      }
      row.push_back(value);
    }
  }
  if (table.header.empty()) {
    return absl::InvalidArgumentError("CSV input has no header row");
  }
  table.values.resize(static_cast<Eigen::Index>(rows.size()),
                      static_cast<Eigen::Index>(table.header.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < rows[r].size(); ++c) {
      table.values(r, c) = rows[r][c];
    }
  }
  return table;
}

absl::StatusOr<CsvTable> ReadCsvFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  return ReadCsv(in);
}

absl::Status DataSource::CheckNormalized() const {
  if (features.rows() != target.size()) {
    return absl::InvalidArgumentError("feature and target row counts differ");
  }
  for (Eigen::Index i = 0; i < target.size(); ++i) {
    if (!(target(i) >= 0.0 && target(i) <= 1.0)) {
      return absl::FailedPreconditionError(
          absl::StrCat("target of record ", i, " is outside [0, 1]"));
    }
    if (features.row(i).norm() > 1.0 + 1e-9) {
      return absl::FailedPreconditionError(
          absl::StrCat("feature norm of record ", i, " exceeds 1"));
    }
  }
  return absl::OkStatus();
}

absl::StatusOr<DataSource> Normalize(const CsvTable& raw, int target_column) {
  const Eigen::Index cols = raw.values.cols();
  if (target_column < 0 || target_column >= cols) {
    return absl::InvalidArgumentError(absl::StrCat(
        "target column ", target_column, " is out of range for ", cols,
        " columns"));
  }
  if (raw.values.rows() == 0) {
    return absl::InvalidArgumentError("data source has no records");
  }
  DataSource src;
  const Eigen::VectorXd target = raw.values.col(target_column);
  const double lo = target.minCoeff();
  const double hi = target.maxCoeff();
  if (!(hi > lo)) {
    return absl::FailedPreconditionError(
        "target column is constant and cannot be min-max scaled");
  }
  src.target = ((target.array() - lo) / (hi - lo)).matrix();
  src.features.resize(raw.values.rows(), cols - 1);
  for (Eigen::Index c = 0, out = 0; c < cols; ++c) {
    if (c == target_column) continue;
    src.features.col(out++) = raw.values.col(c);
    if (static_cast<std::size_t>(c) < raw.header.size()) {
      src.feature_names.push_back(raw.header[c]);
    }
  }
  if (static_cast<std::size_t>(target_column) < raw.header.size()) {
    src.target_name = raw.header[target_column];
  }
  for (Eigen::Index i = 0; i < src.features.rows(); ++i) {
    const double norm = src.features.row(i).norm();
    if (norm > 0.0) src.features.row(i) /= norm;
  }
  return src;
}

CsvTable GenerateRegressionData(std::int64_t num_records, int num_features,
                                std::uint64_t seed, double noise_sd) {
  Rng coefficient_rng(DeriveSeed(seed, 0));
  Eigen::VectorXd beta(num_features);
  for (int j = 0; j < num_features; ++j) beta(j) = coefficient_rng.Normal();

  CsvTable table;
  table.header.push_back("y");
  for (int j = 0; j < num_features; ++j) {
    table.header.push_back(absl::StrCat("x", j + 1));
  }
  table.values.resize(num_records, num_features + 1);
  Rng rng(DeriveSeed(seed, 1));
  for (std::int64_t i = 0; i < num_records; ++i) {
    double y = 0.0;
    for (int j = 0; j < num_features; ++j) {
      const double x = rng.Normal();
      table.values(i, j + 1) = x;
      y += beta(j) * x;
    }
    table.values(i, 0) = y + noise_sd * rng.Normal();
  }
  return table;
}

Dataset SelectRows(const DataSource& src, std::vector<std::int64_t> rows) {
  Dataset data;
  const auto n = static_cast<Eigen::Index>(rows.size());
  data.features.resize(n, src.features.cols());
  data.target.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    data.features.row(i) = src.features.row(rows[i]);
    data.target(i) = src.target(rows[i]);
  }
  data.rows = std::move(rows);
  return data;
}

absl::Status QuerySpec::Validate(const DataSource& src) const {
  if (column.has_value() && (*column < 0 || *column >= src.num_features())) {
    return absl::InvalidArgumentError(absl::StrCat(
        "query column ", *column, " is out of range for ",
        src.num_features(), " features"));
  }
  if (kind == QueryKind::kRidge) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
      return absl::InvalidArgumentError(
          absl::StrCat("ridge lambda must be positive, got ", lambda));
    }
    if (src.num_features() < 1) {
      return absl::InvalidArgumentError("ridge query needs feature columns");
    }
  }
  return absl::OkStatus();
}

int QuerySpec::OutputDimension(const DataSource& src) const {
  return kind == QueryKind::kRidge ? src.num_features() : 1;
}

absl::StatusOr<Eigen::VectorXd> QueryEval(const QuerySpec& q,
                                          const Dataset& data) {
  const Eigen::Index m = data.target.size();
  if (m == 0) return absl::InvalidArgumentError("dataset is empty");
  if (q.column.has_value() &&
      (*q.column < 0 || *q.column >= data.features.cols())) {
    return absl::InvalidArgumentError(
        absl::StrCat("query column ", *q.column, " is out of range"));
  }
  Eigen::VectorXd out(1);
  switch (q.kind) {
    case QueryKind::kCount: {
      double count = 0.0;
      for (Eigen::Index i = 0; i < m; ++i) {
        if (!q.threshold.has_value() || ColumnValue(data, q, i) >= *q.threshold) {
          count += 1.0;
        }
      }
      out(0) = count;
      return out;
    }
    case QueryKind::kSum:
    case QueryKind::kMean: {
      double sum = 0.0;
      for (Eigen::Index i = 0; i < m; ++i) sum += ColumnValue(data, q, i);
      out(0) = q.kind == QueryKind::kSum ? sum : sum / static_cast<double>(m);
      return out;
    }
    case QueryKind::kRidge: {
      if (!(q.lambda > 0.0)) {
        return absl::InvalidArgumentError("ridge lambda must be positive");
      }
      const Eigen::Index d = data.features.cols();
      const double inv_m = 1.0 / static_cast<double>(m);
      Eigen::MatrixXd normal = inv_m * data.features.transpose() * data.features;
      normal.diagonal().array() += q.lambda;
      const Eigen::VectorXd rhs = inv_m * data.features.transpose() * data.target;
      Eigen::VectorXd w = normal.ldlt().solve(rhs);
      const double residual = (normal * w - rhs).norm();
      if (!w.allFinite() || residual > 1e-8 * std::max(1.0, rhs.norm())) {
        return absl::InternalError(absl::StrCat(
            "ridge normal-equation residual ", residual, " exceeds 1e-8 (d=",
            d, ")"));
      }
      return w;
    }
  }
  return absl::InvalidArgumentError("unknown query kind");
}

absl::StatusOr<std::pair<Dataset, Dataset>> SampleNeighbourPair(
    const DataSource& src, int p, Rng& rng) {
  if (p < 2) {
    return absl::InvalidArgumentError(
        absl::StrCat("neighbouring datasets need p >= 2 records, got ", p));
  }
  const std::int64_t pool = src.num_records();
  if (pool < 2) {
    return absl::InvalidArgumentError(
        "data source needs at least two records to form neighbours");
  }
  std::vector<std::int64_t> rows(p);
  for (int i = 0; i < p - 1; ++i) {
    rows[i] = static_cast<std::int64_t>(rng.UniformIndex(pool));
  }
  const auto x_last = static_cast<std::int64_t>(rng.UniformIndex(pool));
  auto y_last = static_cast<std::int64_t>(rng.UniformIndex(pool - 1));
  if (y_last >= x_last) ++y_last;

  std::vector<std::int64_t> y_rows = rows;
  rows.back() = x_last;
  y_rows.back() = y_last;
  return std::pair<Dataset, Dataset>(SelectRows(src, std::move(rows)),
                                     SelectRows(src, std::move(y_rows)));
}

absl::StatusOr<std::vector<double>> SensitivitySamples(
    const DataSource& src, const QuerySpec& q, int p, std::int64_t n,
    const SamplingConfig& cfg) {
  if (n < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("sample count must be positive, got ", n));
  }
  if (cfg.workers < 1) {
    return absl::InvalidArgumentError("worker count must be positive");
  }
  PAR_RETURN_IF_ERROR(q.Validate(src));
  if (p < 2 || src.num_records() < 2) {
    // Surface the same error the sampler would give.
    Rng probe(0);
    return SampleNeighbourPair(src, p, probe).status();
  }

  std::vector<double> samples(n);
  const std::uint64_t chunks = (n + kSensitivityChunk - 1) / kSensitivityChunk;
  std::vector<absl::Status> chunk_status(chunks);
  RunChunked(chunks, cfg.workers, [&](std::uint64_t chunk) {
    Rng rng(DeriveSeed(cfg.seed, chunk));
    const std::int64_t begin = static_cast<std::int64_t>(chunk) * kSensitivityChunk;
    const std::int64_t end = std::min(n, begin + kSensitivityChunk);
    for (std::int64_t i = begin; i < end; ++i) {
      absl::StatusOr<std::pair<Dataset, Dataset>> pair =
          SampleNeighbourPair(src, p, rng);
      if (!pair.ok()) {
        chunk_status[chunk] = pair.status();
        return;
      }
      absl::StatusOr<Eigen::VectorXd> fx = QueryEval(q, pair->first);
      absl::StatusOr<Eigen::VectorXd> fy = QueryEval(q, pair->second);
      if (!fx.ok() || !fy.ok()) {
        chunk_status[chunk] = fx.ok() ? fy.status() : fx.status();
        return;
      }
      samples[i] = (*fx - *fy).lpNorm<1>();
    }
  });
  for (const absl::Status& s : chunk_status) PAR_RETURN_IF_ERROR(s);
  return samples;
}

absl::StatusOr<EmpiricalCdf> EmpiricalCdf::Create(std::vector<double> samples) {
  if (samples.empty()) {
    return absl::InvalidArgumentError("empirical CDF needs at least one sample");
  }
  for (double s : samples) {
    if (!std::isfinite(s) || s < 0.0) {
      return absl::InvalidArgumentError(absl::StrCat(
          "sensitivity samples must be finite and non-negative, got ", s));
    }
  }
  std::sort(samples.begin(), samples.end());
  return EmpiricalCdf(std::move(samples));
}

double EmpiricalCdf::Evaluate(double x) const {
  const auto below = std::upper_bound(sorted_.begin(), sorted_.end(), x);
  return static_cast<double>(below - sorted_.begin()) /
         static_cast<double>(sorted_.size());
}

absl::StatusOr<double> EmpiricalCdf::Quantile(double q) const {
  if (!(q > 0.0) || !(q <= 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("quantile level must lie in (0, 1], got ", q));
  }
  const std::int64_t n = size();
  const auto nd = static_cast<double>(n);
  auto rank = static_cast<std::int64_t>(std::ceil(q * nd));
  // q * n may round up across an integer; settle on the exact ceiling.
  while (rank > 1 && static_cast<double>(rank - 1) / nd >= q) --rank;
  while (rank < n && static_cast<double>(rank) / nd < q) ++rank;
  rank = std::clamp<std::int64_t>(rank, 1, n);
  return sorted_[rank - 1];
}

double EmpiricalCdf::SupDistance(
    const std::function<double(double)>& cdf) const {
  const auto nd = static_cast<double>(sorted_.size());
  double sup = 0.0;
  for (std::size_t i = 0; i < sorted_.size(); ++i) {
    const double f = cdf(sorted_[i]);
    sup = std::max({sup, std::abs(static_cast<double>(i + 1) / nd - f),
                    std::abs(static_cast<double>(i) / nd - f)});
  }
  return sup;
}

absl::StatusOr<double> SampledSensitivity(const EmpiricalCdf& cdf,
                                          double gamma2) {
  return cdf.Quantile(gamma2);
}

absl::StatusOr<double> EtaEstimate(std::optional<double> delta_true,
                                   const EmpiricalCdf& cdf, double gamma2,
                                   double rho) {
  if (delta_true.has_value()) {
    if (!(*delta_true > 0.0)) {
      return absl::InvalidArgumentError("true sensitivity must be positive");
    }
    PAR_ASSIGN_OR_RETURN(const double sampled, SampledSensitivity(cdf, gamma2));
    if (sampled == 0.0) {
      return absl::FailedPreconditionError(
          "sampled sensitivity is 0; eta is undefined");
    }
    return *delta_true / sampled;
  }
  if (!(rho > 0.0) || !(rho < 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("accuracy rho must lie in (0, 1), got ", rho));
  }
  if (cdf.Max() == 0.0) {
    return absl::FailedPreconditionError(
        "largest sampled sensitivity is 0; eta is undefined");
  }
  return 1.0 + rho / cdf.Max();
}

void WriteSamplesCsv(std::ostream& out, const std::vector<double>& samples) {
  out << "sensitivity\n" << std::setprecision(17);
  for (double s : samples) out << s << '\n';
}

void WriteCdfCsv(std::ostream& out, const EmpiricalCdf& cdf) {
  out << "value,cdf\n" << std::setprecision(17);
  const std::vector<double>& sorted = cdf.sorted_samples();
  const auto nd = static_cast<double>(sorted.size());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (i + 1 < sorted.size() && sorted[i + 1] == sorted[i]) continue;
    out << sorted[i] << ',' << static_cast<double>(i + 1) / nd << '\n';
  }
}

}  // namespace par
