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


#include "par/montecarlo_oracle.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "absl/strings/str_cat.h"
#include "nlohmann/json.hpp"
#include "par/internal/status_macros.h"
#include "par/mechanism.h"

namespace par {
namespace {

struct Counts {
  std::int64_t kept = 0;
  std::int64_t hits = 0;
};

// Runs `draw(rng)` cfg.samples times in seeded chunks and sums the counts.
// `draw` returns {accepted, hit}.
template <typename Draw>
Counts CountChunked(const McConfig& cfg, const Draw& draw) {
  const std::uint64_t chunks = (cfg.samples + kMcChunk - 1) / kMcChunk;
  std::vector<Counts> per_chunk(chunks);
  RunChunked(chunks, cfg.workers, [&](std::uint64_t chunk) {
    Rng rng(DeriveSeed(cfg.seed, chunk));
    const std::int64_t begin = static_cast<std::int64_t>(chunk) * kMcChunk;
    const std::int64_t end = std::min(cfg.samples, begin + kMcChunk);
    Counts& c = per_chunk[chunk];
    for (std::int64_t i = begin; i < end; ++i) {
      const auto [accepted, hit] = draw(rng);
      c.kept += accepted;
      c.hits += hit;
    }
  });
  Counts total;
  for (const Counts& c : per_chunk) {
    total.kept += c.kept;
    total.hits += c.hits;
  }
  return total;
}

McEstimate Proportion(const Counts& counts, std::int64_t total) {
  McEstimate out;
  out.kept = counts.kept;
  out.total = total;
  if (counts.kept > 0) {
    const double p = static_cast<double>(counts.hits) / counts.kept;
    out.estimate = p;
    out.standard_error = std::sqrt(p * (1.0 - p) / counts.kept);
  }
  return out;
}

absl::Status CheckPositive(double value, const char* name) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    return absl::InvalidArgumentError(
        absl::StrCat(name, " must be positive, got ", value));
  }
  return absl::OkStatus();
}

}  // namespace

absl::Status McConfig::Validate() const {
  if (samples < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("sample count must be positive, got ", samples));
  }
  if (workers < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("worker count must be positive, got ", workers));
  }
  return absl::OkStatus();
}

double GammaSample(int k, Rng& rng) {
  double sum = 0.0;
  for (int i = 0; i < k; ++i) sum += rng.Exponential();
  return sum;
}

absl::StatusOr<McEstimate> McGamma1(double eps, double eps0, int k,
                                    const McConfig& cfg) {
  PAR_RETURN_IF_ERROR(cfg.Validate());
  PAR_RETURN_IF_ERROR(CheckPositive(eps0, "eps0"));
  if (!(eps >= 0.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("eps must be non-negative, got ", eps));
  }
  if (k < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("query dimension must be at least 1, got ", k));
  }
  const Counts counts = CountChunked(cfg, [&](Rng& rng) {
    const double t = std::abs(GammaSample(k, rng) - GammaSample(k, rng));
    return std::pair<int, int>(t <= eps0, t <= eps0 && t <= eps);
  });
  if (counts.kept < kMinKept) {
    return absl::ResourceExhaustedError(absl::StrCat(
        "only ", counts.kept, " of ", cfg.samples, " draws fell below eps0 = ",
        eps0, "; need at least ", kMinKept));
  }
  return Proportion(counts, cfg.samples);
}

absl::StatusOr<McEstimate> McGamma3(double eps, double eps0, int k,
                                    double eta, double gamma2,
                                    const McConfig& cfg) {
  PAR_RETURN_IF_ERROR(CheckPositive(eta, "eta"));
  if (!(gamma2 >= 0.0) || !(gamma2 <= 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("gamma2 must lie in [0, 1], got ", gamma2));
  }
  PAR_ASSIGN_OR_RETURN(McEstimate ratio, McGamma1(eps, eta * eps0, k, cfg));
  ratio.estimate *= gamma2;
  ratio.standard_error *= gamma2;
  return ratio;
}

absl::StatusOr<McEstimate> McMechanismLoss(double eps, double eps0,
                                           const Eigen::VectorXd& fx,
                                           const Eigen::VectorXd& fy,
                                           const McConfig& cfg) {
  PAR_RETURN_IF_ERROR(cfg.Validate());
  PAR_RETURN_IF_ERROR(CheckPositive(eps0, "eps0"));
  if (!(eps >= 0.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("eps must be non-negative, got ", eps));
  }
  if (fx.size() != fy.size() || fx.size() == 0) {
    return absl::InvalidArgumentError(
        "query outputs must be non-empty and of equal length");
  }
  const double sensitivity = (fx - fy).lpNorm<1>();
  if (!(sensitivity > 0.0)) {
    return absl::InvalidArgumentError(
        "query outputs coincide; the privacy loss is identically 0");
  }
  const double b = sensitivity / eps0;
  const Counts counts = CountChunked(cfg, [&](Rng& rng) {
    double loss = 0.0;
    for (Eigen::Index i = 0; i < fx.size(); ++i) {
      const double z = fx(i) + LaplaceSample(b, rng);
      loss += std::abs(fy(i) - z) - std::abs(fx(i) - z);
    }
    // |loss| <= ||fx - fy||_1 / b by the triangle inequality; clamp away
    // rounding so that eps = eps0 counts every draw.
    loss = std::clamp(loss / b, -eps0, eps0);
    return std::pair<int, int>(1, std::abs(loss) <= eps);
  });
  return Proportion(counts, cfg.samples);
}

absl::StatusOr<McEstimate> McCase2Validation(const DataSource& src,
                                             const QuerySpec& q, int p,
                                             double sampled_sensitivity,
                                             const McConfig& cfg) {
  PAR_RETURN_IF_ERROR(cfg.Validate());
  if (!(sampled_sensitivity >= 0.0)) {
    return absl::InvalidArgumentError(
        "sampled sensitivity must be non-negative");
  }
  PAR_ASSIGN_OR_RETURN(
      const std::vector<double> samples,
      SensitivitySamples(src, q, p, cfg.samples,
                         {.seed = cfg.seed, .workers = cfg.workers}));
  Counts counts;
  counts.kept = cfg.samples;
  for (double s : samples) counts.hits += s <= sampled_sensitivity;
  return Proportion(counts, cfg.samples);
}

absl::StatusOr<McEstimate> McOverlap(double eps1, double eps2,
                                     double sensitivity, const McConfig& cfg) {
  PAR_RETURN_IF_ERROR(cfg.Validate());
  PAR_RETURN_IF_ERROR(CheckPositive(eps1, "eps1"));
  PAR_RETURN_IF_ERROR(CheckPositive(eps2, "eps2"));
  PAR_RETURN_IF_ERROR(CheckPositive(sensitivity, "sensitivity"));
  const double b_narrow = sensitivity / std::max(eps1, eps2);
  const double b_wide = sensitivity / std::min(eps1, eps2);
  const std::uint64_t chunks = (cfg.samples + kMcChunk - 1) / kMcChunk;
  std::vector<std::pair<double, double>> sums(chunks);
  RunChunked(chunks, cfg.workers, [&](std::uint64_t chunk) {
    Rng rng(DeriveSeed(cfg.seed, chunk));
    const std::int64_t begin = static_cast<std::int64_t>(chunk) * kMcChunk;
    const std::int64_t end = std::min(cfg.samples, begin + kMcChunk);
    auto& [sum, sum_sq] = sums[chunk];
    for (std::int64_t i = begin; i < end; ++i) {
      const double x = std::abs(LaplaceSample(b_wide, rng));
      const double log_ratio =
          std::log(b_wide / b_narrow) - x / b_narrow + x / b_wide;
      const double w = std::exp(std::min(0.0, log_ratio));
      sum += w;
      sum_sq += w * w;
    }
  });
  double sum = 0.0;
  double sum_sq = 0.0;
  for (const auto& [s, s2] : sums) {
    sum += s;
    sum_sq += s2;
  }
  const double n = static_cast<double>(cfg.samples);
  McEstimate out;
  out.kept = cfg.samples;
  out.total = cfg.samples;
  out.estimate = sum / n;
  const double variance = std::max(0.0, sum_sq / n - out.estimate * out.estimate);
  out.standard_error = std::sqrt(variance / n);
  return out;
}

ValidationReport Compare(std::string target, double analytic,
                         const McEstimate& mc, double sigmas, double floor) {
  ValidationReport r;
  r.target = std::move(target);
  r.analytic = analytic;
  r.mc_estimate = mc.estimate;
  r.standard_error = mc.standard_error;
  r.gap = mc.estimate - analytic;
  r.pass = std::abs(r.gap) <= std::max(sigmas * mc.standard_error, floor);
  return r;
}

std::string ReportToJson(const ValidationReport& report) {
  nlohmann::ordered_json j;
  j["target"] = report.target;
  j["analytic"] = report.analytic;
  j["mc_estimate"] = report.mc_estimate;
  j["stderr"] = report.standard_error;
  j["gap"] = report.gap;
  j["pass"] = report.pass;
  return j.dump();
}

absl::StatusOr<ValidationReport> ReportFromJson(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    return absl::InvalidArgumentError("validation report is not a JSON object");
  }
  ValidationReport r;
  try {
    r.target = j.at("target").get<std::string>();
    r.analytic = j.at("analytic").get<double>();
    r.mc_estimate = j.at("mc_estimate").get<double>();
    r.standard_error = j.at("stderr").get<double>();
    r.gap = j.at("gap").get<double>();
    r.pass = j.at("pass").get<bool>();
  } catch (const nlohmann::json::exception& e) {
    return absl::InvalidArgumentError(
        absl::StrCat("malformed validation report: ", e.what()));
  }
  return r;
}

}  // namespace par
