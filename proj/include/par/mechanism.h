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


// The Laplace mechanism, its utility metrics, and the ridge-regression RMSE
// harness.

#ifndef PAR_MECHANISM_H_
#define PAR_MECHANISM_H_

#include <cstdint>
#include <ostream>
#include <vector>

#include "Eigen/Dense"
#include "absl/status/statusor.h"
#include "par/random.h"
#include "par/sensitivity_estimation.h"

namespace par {

// Inverse CDF of Laplace(0, b) at u in (0, 1).
double LaplaceFromUniform(double b, double u);

// One Laplace(0, b) draw from a single uniform.
double LaplaceSample(double b, Rng& rng);

class LaplaceMechanism {
 public:
  static absl::StatusOr<LaplaceMechanism> Create(double sensitivity,
                                                 double eps0, int dimension);

  double sensitivity() const { return sensitivity_; }
  double eps0() const { return eps0_; }
  int dimension() const { return dimension_; }
  // b = sensitivity / eps0.
  double scale() const { return sensitivity_ / eps0_; }

  // true_output plus i.i.d. Laplace(scale()) noise on every coordinate.
  absl::StatusOr<Eigen::VectorXd> Apply(const Eigen::VectorXd& true_output,
                                        Rng& rng) const;

 private:
  LaplaceMechanism(double sensitivity, double eps0, int dimension)
      : sensitivity_(sensitivity), eps0_(eps0), dimension_(dimension) {}

  double sensitivity_;
  double eps0_;
  int dimension_;
};

// Expected absolute error per coordinate, sensitivity / eps.
absl::StatusOr<double> ExpectedMae(double sensitivity, double eps);

// Overlapping mass of the zero-mean Laplace densities with scales
// sensitivity / eps1 and sensitivity / eps2. Arguments may come in either
// order.
absl::StatusOr<double> Overlap(double eps1, double eps2, double sensitivity);

struct RmseConfig {
  int runs = 50;
  double train_fraction = 0.8;
  std::uint64_t seed = 0;
  int workers = 1;
};

struct RmseResult {
  double mean_rmse = 0.0;
  // Test RMSE of the unperturbed ridge fit.
  double noiseless_rmse = 0.0;
  std::vector<double> run_rmse;
};

// Splits the records once (seeded shuffle), fits ridge on the training part,
// and for each run perturbs the parameters with `mechanism` and measures RMSE
// on the test part. Run r draws noise from DeriveSeed(seed, r + 1).
absl::StatusOr<RmseResult> RmseExperiment(const DataSource& src,
                                          const QuerySpec& ridge,
                                          const LaplaceMechanism& mechanism,
                                          const RmseConfig& cfg);

// Rows "eps0,run,rmse" (header written when `header` is true).
void WriteRmseCsv(std::ostream& out, double eps0, const RmseResult& result,
                  bool header);

}  // namespace par

#endif  // PAR_MECHANISM_H_
