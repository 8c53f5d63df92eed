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


#include "par/mechanism.h"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>

#include "absl/strings/str_cat.h"
#include "par/internal/status_macros.h"

namespace par {
namespace {

absl::Status CheckPositive(double value, const char* name) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    return absl::InvalidArgumentError(
        absl::StrCat(name, " must be positive and finite, got ", value));
  }
  return absl::OkStatus();
}

double TestRmse(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                const Eigen::VectorXd& w) {
  return std::sqrt((x * w - y).squaredNorm() / static_cast<double>(y.size()));
}

}  // namespace

double LaplaceFromUniform(double b, double u) {
  if (u < 0.5) return b * std::log(2.0 * u);
  return -b * std::log(2.0 * (1.0 - u));
}

double LaplaceSample(double b, Rng& rng) {
  return LaplaceFromUniform(b, rng.Uniform());
}

absl::StatusOr<LaplaceMechanism> LaplaceMechanism::Create(double sensitivity,
                                                          double eps0,
                                                          int dimension) {
  PAR_RETURN_IF_ERROR(CheckPositive(sensitivity, "sensitivity"));
  PAR_RETURN_IF_ERROR(CheckPositive(eps0, "eps0"));
  if (dimension < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("output dimension must be positive, got ", dimension));
  }
  return LaplaceMechanism(sensitivity, eps0, dimension);
}

absl::StatusOr<Eigen::VectorXd> LaplaceMechanism::Apply(
    const Eigen::VectorXd& true_output, Rng& rng) const {
  if (true_output.size() != dimension_) {
    return absl::InvalidArgumentError(
        absl::StrCat("mechanism expects ", dimension_, " coordinates, got ",
                     true_output.size()));
  }
  Eigen::VectorXd out = true_output;
  const double b = scale();
  for (Eigen::Index i = 0; i < out.size(); ++i) out(i) += LaplaceSample(b, rng);
  return out;
}

absl::StatusOr<double> ExpectedMae(double sensitivity, double eps) {
  PAR_RETURN_IF_ERROR(CheckPositive(sensitivity, "sensitivity"));
  PAR_RETURN_IF_ERROR(CheckPositive(eps, "eps"));
  return sensitivity / eps;
}

absl::StatusOr<double> Overlap(double eps1, double eps2, double sensitivity) {
  PAR_RETURN_IF_ERROR(CheckPositive(eps1, "eps1"));
  PAR_RETURN_IF_ERROR(CheckPositive(eps2, "eps2"));
  PAR_RETURN_IF_ERROR(CheckPositive(sensitivity, "sensitivity"));
  if (eps2 > eps1) std::swap(eps1, eps2);
  if (eps1 == eps2) return 1.0;
  // The densities cross at |x| = mu.
  const double mu = sensitivity * std::log(eps1 / eps2) / (eps1 - eps2);
  return 1.0 - (std::exp(-mu * eps2 / sensitivity) -
                std::exp(-mu * eps1 / sensitivity));
}

absl::StatusOr<RmseResult> RmseExperiment(const DataSource& src,
                                          const QuerySpec& ridge,
                                          const LaplaceMechanism& mechanism,
                                          const RmseConfig& cfg) {
  if (ridge.kind != QueryKind::kRidge) {
    return absl::InvalidArgumentError("RMSE harness needs a ridge query");
  }
  PAR_RETURN_IF_ERROR(ridge.Validate(src));
  if (cfg.runs < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("run count must be positive, got ", cfg.runs));
  }
  if (!(cfg.train_fraction > 0.0) || !(cfg.train_fraction < 1.0)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "train fraction must lie in (0, 1), got ", cfg.train_fraction));
  }
  if (cfg.workers < 1) {
    return absl::InvalidArgumentError("worker count must be positive");
  }
  if (mechanism.dimension() != src.num_features()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "mechanism dimension ", mechanism.dimension(),
        " does not match the ridge output dimension ", src.num_features()));
  }
  const std::int64_t n = src.num_records();
  const auto n_train = static_cast<std::int64_t>(
      std::floor(cfg.train_fraction * static_cast<double>(n)));
  if (n_train < 1 || n_train >= n) {
    return absl::InvalidArgumentError(absl::StrCat(
        "split of ", n, " records leaves an empty train or test part"));
  }

  // Fisher-Yates with the library stream so the split is platform-stable.
  std::vector<std::int64_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng split_rng(DeriveSeed(cfg.seed, 0));
  for (std::int64_t i = n - 1; i > 0; --i) {
    std::swap(order[i], order[split_rng.UniformIndex(i + 1)]);
  }
  const Dataset train = SelectRows(
      src, std::vector<std::int64_t>(order.begin(), order.begin() + n_train));
  const Dataset test = SelectRows(
      src, std::vector<std::int64_t>(order.begin() + n_train, order.end()));
  PAR_ASSIGN_OR_RETURN(const Eigen::VectorXd w, QueryEval(ridge, train));

  RmseResult result;
  result.noiseless_rmse = TestRmse(test.features, test.target, w);
  result.run_rmse.assign(cfg.runs, 0.0);
  RunChunked(cfg.runs, cfg.workers, [&](std::uint64_t run) {
    Rng rng(DeriveSeed(cfg.seed, run + 1));
    // Dimension was checked above, so Apply cannot fail.
    const Eigen::VectorXd noisy = *mechanism.Apply(w, rng);
    result.run_rmse[run] = TestRmse(test.features, test.target, noisy);
  });
  result.mean_rmse =
      std::accumulate(result.run_rmse.begin(), result.run_rmse.end(), 0.0) /
      cfg.runs;
  return result;
}

void WriteRmseCsv(std::ostream& out, double eps0, const RmseResult& result,
                  bool header) {
  if (header) out << "eps0,run,rmse\n";
  out << std::setprecision(17);
  for (std::size_t r = 0; r < result.run_rmse.size(); ++r) {
    out << eps0 << ',' << r << ',' << result.run_rmse[r] << '\n';
  }
}

}  // namespace par
