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


#include "par/cli.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "nlohmann/json.hpp"
#include "par/composition.h"
#include "par/internal/status_macros.h"
#include "par/mechanism.h"
#include "par/sensitivity_estimation.h"

namespace par {
namespace {

using Json = nlohmann::ordered_json;

template <typename T>
std::optional<T> Flag(const CLI::Option* option, const T& value) {
  if (option->count() == 0) return std::nullopt;
  return value;
}

absl::Status Usage(std::string_view message) {
  return absl::InvalidArgumentError(std::string(message));
}

void Emit(std::ostream& out, const Json& j) { out << j.dump(2) << '\n'; }

absl::StatusOr<std::uint64_t> ResolveSeed(const CLI::Option* option,
                                          std::uint64_t value) {
  if (option->count() > 0) return value;
  const char* env = std::getenv("PAR_SEED");
  if (env == nullptr || *env == '\0') return 0;
  std::uint64_t seed = 0;
  if (!absl::SimpleAtoi(env, &seed)) {
    return Usage(absl::StrCat("PAR_SEED is not an unsigned integer: '", env,
                              "'"));
  }
  return seed;
}

struct RiskFlags {
  std::string risk_case = "1";
  std::string solve;
  double eps = 0, gamma = 0, eps0 = 0, rho = 0, eta = 0, gamma2 = 0;
  std::int64_t n = 0;
  int k = 1;
  CLI::Option *eps_opt, *gamma_opt, *eps0_opt, *rho_opt, *eta_opt,
      *gamma2_opt, *n_opt;
};

absl::StatusOr<RiskAssessment> ComputeRisk(const RiskFlags& f) {
  PAR_ASSIGN_OR_RETURN(const RiskCase risk_case, ParseRiskCase(f.risk_case));
  const auto eps = Flag(f.eps_opt, f.eps);
  const auto gamma = Flag(f.gamma_opt, f.gamma);
  const auto eps0 = Flag(f.eps0_opt, f.eps0);
  const auto rho = Flag(f.rho_opt, f.rho);
  const auto n = Flag(f.n_opt, f.n);
  const auto eta = Flag(f.eta_opt, f.eta);
  const auto gamma2 = Flag(f.gamma2_opt, f.gamma2);

  RiskAssessment a;
  a.risk_case = risk_case;
  switch (risk_case) {
    case RiskCase::kExplicit: {
      if (rho || n || eta || gamma2) {
        return Usage("--rho, --n, --eta and --gamma2 apply to cases 2 and 3");
      }
      if (f.solve == "eps0") {
        if (!eps || !gamma || eps0) {
          return Usage("--solve eps0 needs --eps and --gamma, not --eps0");
        }
        PAR_ASSIGN_OR_RETURN(const double solved,
                             Epsilon0ForTargetCase1(*eps, *gamma, f.k));
        a.epsilon = *eps;
        a.gamma = *gamma;
        a.eps0 = solved;
        break;
      }
      if (!eps0) return Usage("case 1 needs --eps0 (or --solve eps0)");
      if (eps.has_value() == gamma.has_value()) {
        return Usage("give exactly one of --eps and --gamma");
      }
      if ((f.solve == "eps" && eps) || (f.solve == "gamma" && gamma)) {
        return Usage("--solve names the flag that was given");
      }
      a.eps0 = *eps0;
      if (eps) {
        PAR_ASSIGN_OR_RETURN(a.gamma, Gamma1(*eps, *eps0, f.k));
        a.epsilon = *eps;
      } else {
        PAR_ASSIGN_OR_RETURN(const double solved,
                             EpsilonForGamma1(*gamma, *eps0, f.k));
        a.epsilon = solved;
        a.gamma = *gamma;
      }
      break;
    }
    case RiskCase::kImplicit: {
      if (!gamma2 || !rho || !n) {
        return Usage("case 2 needs --gamma2, --rho and --n");
      }
      if (gamma || eta || !f.solve.empty()) {
        return Usage("case 2 computes gamma; --gamma, --eta and --solve "
                     "do not apply");
      }
      PAR_ASSIGN_OR_RETURN(a.gamma, EmpiricalRiskBound(*gamma2, *rho, *n));
      a.epsilon = eps;
      a.eps0 = eps0;
      a.rho = rho;
      a.n_samples = n;
      break;
    }
    case RiskCase::kCoupled: {
      if (!eps || !gamma2 || !rho || !n || !eta) {
        return Usage("case 3 needs --eps, --gamma2, --rho, --n and --eta");
      }
      a.epsilon = eps;
      a.rho = rho;
      a.n_samples = n;
      a.eta = eta;
      if (f.solve == "eps0") {
        if (!gamma || eps0) {
          return Usage("--solve eps0 needs --gamma, not --eps0");
        }
        const double alpha = ProbabilisticTolerance(*rho, *n);
        PAR_ASSIGN_OR_RETURN(
            const double solved,
            Epsilon0ForTargetCase3(*eps, *gamma, *gamma2, alpha, *eta, f.k));
        a.gamma = *gamma;
        a.eps0 = solved;
        break;
      }
      if (!f.solve.empty() || gamma || !eps0) {
        return Usage("case 3 needs --eps0 and computes gamma "
                     "(or use --solve eps0 with --gamma)");
      }
      PAR_ASSIGN_OR_RETURN(const double g3,
                           Gamma3(*eps, *eps0, f.k, *eta, *gamma2));
      PAR_ASSIGN_OR_RETURN(a.gamma, EmpiricalRiskBound(g3, *rho, *n));
      a.eps0 = eps0;
      break;
    }
  }
  PAR_RETURN_IF_ERROR(a.Validate());
  return a;
}

struct DataFlags {
  std::string path;
  std::int64_t synthetic = 0;
  int features = 5;
  int target_column = 0;
  std::uint64_t data_seed = 0;
  CLI::Option *path_opt, *synthetic_opt;

  void Register(CLI::App* app) {
    path_opt = app->add_option("--data", path,
                               "numeric CSV with a header row");
    synthetic_opt = app->add_option(
        "--synthetic", synthetic,
        "generate this many synthetic regression records instead of --data");
    app->add_option("--features", features,
                    "feature count for --synthetic")->capture_default_str();
    app->add_option("--target-column", target_column,
                    "zero-based target column")->capture_default_str();
    app->add_option("--data-seed", data_seed,
                    "seed for --synthetic")->capture_default_str();
  }

  absl::StatusOr<DataSource> Load() const {
    if ((path_opt->count() > 0) == (synthetic_opt->count() > 0)) {
      return Usage("give exactly one of --data and --synthetic");
    }
    if (path_opt->count() > 0) {
      PAR_ASSIGN_OR_RETURN(const CsvTable table, ReadCsvFile(path));
      return Normalize(table, target_column);
    }
    if (synthetic < 2 || features < 1) {
      return Usage("--synthetic needs at least 2 records and 1 feature");
    }
    return Normalize(GenerateRegressionData(synthetic, features, data_seed), 0);
  }
};

struct QueryFlags {
  std::string kind = "mean";
  int column = 0;
  double threshold = 0;
  double lambda = 0.01;
  CLI::Option *column_opt, *threshold_opt;

  void Register(CLI::App* app) {
    app->add_option("--query", kind, "count, sum, mean or ridge")
        ->check(CLI::IsMember({"count", "sum", "mean", "ridge"}))
        ->capture_default_str();
    column_opt = app->add_option(
        "--column", column,
        "feature column for count/sum/mean (default: the target)");
    threshold_opt = app->add_option(
        "--threshold", threshold, "count records with value >= threshold");
    app->add_option("--lambda", lambda, "ridge regularization")
        ->capture_default_str();
  }

  QuerySpec Spec() const {
    QuerySpec q;
    if (kind == "count") q.kind = QueryKind::kCount;
    if (kind == "sum") q.kind = QueryKind::kSum;
    if (kind == "mean") q.kind = QueryKind::kMean;
    if (kind == "ridge") q.kind = QueryKind::kRidge;
    q.column = Flag(column_opt, column);
    q.threshold = Flag(threshold_opt, threshold);
    q.lambda = lambda;
    return q;
  }
};

struct SensitivityFlags {
  DataFlags data;
  QueryFlags query;
  int p = 0;
  std::int64_t n = 1000;
  double gamma2 = 0.9;
  double rho = 0, delta_true = 0;
  std::uint64_t seed = 0;
  int workers = 1;
  std::string format = "json";
  std::string samples_out;
  CLI::Option *rho_opt, *delta_true_opt, *seed_opt, *samples_out_opt;
};

absl::StatusOr<int> RunSensitivity(const SensitivityFlags& f,
                                   std::ostream& out) {
  PAR_ASSIGN_OR_RETURN(const DataSource src, f.data.Load());
  PAR_ASSIGN_OR_RETURN(const std::uint64_t seed,
                       ResolveSeed(f.seed_opt, f.seed));
  const QuerySpec q = f.query.Spec();
  PAR_ASSIGN_OR_RETURN(
      std::vector<double> samples,
      SensitivitySamples(src, q, f.p, f.n,
                         {.seed = seed, .workers = f.workers}));
  if (f.samples_out_opt->count() > 0) {
    std::ofstream file(f.samples_out);
    if (!file) {
      return absl::FailedPreconditionError(
          absl::StrCat("cannot write ", f.samples_out));
    }
    file << "# seed=" << seed << '\n';
    WriteSamplesCsv(file, samples);
  }
  PAR_ASSIGN_OR_RETURN(const EmpiricalCdf cdf,
                       EmpiricalCdf::Create(std::move(samples)));
  PAR_ASSIGN_OR_RETURN(const double sampled, SampledSensitivity(cdf, f.gamma2));

  if (f.format == "csv") {
    out << "# seed=" << seed << '\n';
    WriteCdfCsv(out, cdf);
    return kExitOk;
  }
  Json j;
  j["query"] = f.query.kind;
  j["p"] = f.p;
  j["n"] = f.n;
  j["gamma2"] = RoundSignificant(f.gamma2);
  j["seed"] = seed;
  j["sampled_sensitivity"] = sampled;
  j["max_sensitivity"] = cdf.Max();
  const auto rho = Flag(f.rho_opt, f.rho);
  const auto delta_true = Flag(f.delta_true_opt, f.delta_true);
  if (rho) {
    j["rho"] = *rho;
    j["tolerance"] = RoundSignificant(ProbabilisticTolerance(*rho, f.n));
  }
  if (rho || delta_true) {
    PAR_ASSIGN_OR_RETURN(const double eta,
                         EtaEstimate(delta_true, cdf, f.gamma2,
                                     rho.value_or(0.0)));
    j["eta"] = eta;
  }
  Emit(out, j);
  return kExitOk;
}

struct ComposeFlags {
  double eps0 = 0, eps = 0, gamma = 0;
  double delta = 1e-5;
  std::int64_t n_max = 50;
  int k = 1;
  std::string ledger;
  std::string format = "csv";
  CLI::Option *eps0_opt, *eps_opt, *gamma_opt, *ledger_opt;
};

absl::StatusOr<CompositionLedger> ReadLedger(const std::string& path,
                                             double delta) {
  PAR_ASSIGN_OR_RETURN(const CsvTable table, ReadCsvFile(path));
  auto column = [&](const std::string& name) -> absl::StatusOr<int> {
    const auto it = std::find(table.header.begin(), table.header.end(), name);
    if (it == table.header.end()) {
      return Usage(absl::StrCat("ledger is missing column '", name, "'"));
    }
    return static_cast<int>(it - table.header.begin());
  };
  PAR_ASSIGN_OR_RETURN(const int c_eps0, column("eps0"));
  PAR_ASSIGN_OR_RETURN(const int c_eps, column("eps"));
  PAR_ASSIGN_OR_RETURN(const int c_gamma, column("gamma"));
  CompositionLedger ledger;
  ledger.delta = delta;
  for (Eigen::Index r = 0; r < table.values.rows(); ++r) {
    ledger.entries.push_back({table.values(r, c_eps0), table.values(r, c_eps),
                              table.values(r, c_gamma)});
  }
  return ledger;
}

absl::StatusOr<int> RunCompose(const ComposeFlags& f, std::ostream& out) {
  if (f.ledger_opt->count() > 0) {
    if (f.eps0_opt->count() || f.eps_opt->count() || f.gamma_opt->count()) {
      return Usage("--ledger replaces --eps0, --eps and --gamma");
    }
    PAR_ASSIGN_OR_RETURN(const CompositionLedger ledger,
                         ReadLedger(f.ledger, f.delta));
    PAR_ASSIGN_OR_RETURN(const double total, ComposeLedger(ledger));
    Json j;
    j["mechanisms"] = ledger.entries.size();
    j["delta"] = ledger.delta;
    j["eps"] = total;
    Emit(out, j);
    return kExitOk;
  }
  if (f.eps0_opt->count() == 0) return Usage("compose needs --eps0 or --ledger");
  const auto eps_flag = Flag(f.eps_opt, f.eps);
  const auto gamma_flag = Flag(f.gamma_opt, f.gamma);
  if (!eps_flag && !gamma_flag) {
    return Usage("give --eps, --gamma or both");
  }
  double eps = 0, gamma = 0;
  if (eps_flag && gamma_flag) {
    eps = *eps_flag;
    gamma = *gamma_flag;
  } else if (eps_flag) {
    eps = *eps_flag;
    PAR_ASSIGN_OR_RETURN(gamma, Gamma1(eps, f.eps0, f.k));
  } else {
    gamma = *gamma_flag;
    PAR_ASSIGN_OR_RETURN(eps, EpsilonForGamma1(gamma, f.eps0, f.k));
  }
  PAR_ASSIGN_OR_RETURN(
      const std::vector<CompositionRow> rows,
      CompareCompositions(f.eps0, f.delta, f.n_max, eps, gamma));
  if (f.format == "csv") {
    out << "# eps0=" << f.eps0 << " eps=" << eps
        << " gamma=" << RoundSignificant(gamma) << " delta=" << f.delta << '\n';
    WriteCompositionCsv(out, rows);
    return kExitOk;
  }
  Json j;
  j["eps0"] = f.eps0;
  j["eps"] = eps;
  j["gamma"] = RoundSignificant(gamma);
  j["delta"] = f.delta;
  j["rows"] = Json::array();
  for (const CompositionRow& r : rows) {
    j["rows"].push_back(
        {{"n", r.n}, {"basic", r.basic}, {"advanced", r.advanced},
         {"par", r.par}});
  }
  Emit(out, j);
  return kExitOk;
}

struct BudgetFlags {
  double eps0 = 0, E = 0, c = 1, E_min = 0;
  std::int64_t N = 1;
  int k = 1;
  bool optimize = false;
  int curve = 0;
  double eps = 0, mae_max = 0, budget_cap = 0, gamma = 0, sensitivity = 1;
  CLI::Option *curve_opt, *eps_opt, *mae_opt, *cap_opt, *gamma_opt;
};

absl::StatusOr<int> RunBudget(const BudgetFlags& f, std::ostream& out) {
  const CostModelParams params{.E = f.E, .E_min = f.E_min, .c = f.c, .N = f.N};
  PAR_RETURN_IF_ERROR(params.Validate());
  const bool interval = f.mae_opt->count() > 0 || f.cap_opt->count() > 0;
  const int modes = f.optimize + (f.curve_opt->count() > 0) +
                    (f.eps_opt->count() > 0) + interval;
  if (modes != 1) {
    return Usage("choose one of --optimize, --curve, --eps or "
                 "--mae-max/--budget-cap");
  }
  if (f.optimize) {
    PAR_ASSIGN_OR_RETURN(const BudgetOptimum opt,
                         OptimizeBudget(f.eps0, params, f.k));
    out << BudgetOptimumToJson(f.eps0, opt) << '\n';
    return kExitOk;
  }
  if (f.curve_opt->count() > 0) {
    PAR_ASSIGN_OR_RETURN(const std::vector<BudgetCurvePoint> curve,
                         BudgetCurve(f.eps0, params, f.k, f.curve));
    WriteBudgetCurveCsv(out, curve);
    return kExitOk;
  }
  if (f.eps_opt->count() > 0) {
    PAR_ASSIGN_OR_RETURN(const double gamma, Gamma1(f.eps, f.eps0, f.k));
    PAR_ASSIGN_OR_RETURN(const double budget,
                         Budget(f.eps, f.eps0, params, f.k));
    PAR_ASSIGN_OR_RETURN(const double dp_budget, DpBudget(f.eps0, params));
    Json j;
    j["eps"] = f.eps;
    j["eps0"] = f.eps0;
    j["gamma"] = RoundSignificant(gamma);
    j["budget"] = RoundCents(budget);
    j["dp_budget"] = RoundCents(dp_budget);
    Emit(out, j);
    return kExitOk;
  }
  if (!f.mae_opt->count() || !f.cap_opt->count() || !f.gamma_opt->count()) {
    return Usage("the interval mode needs --mae-max, --budget-cap and --gamma");
  }
  PAR_ASSIGN_OR_RETURN(
      const EpsilonInterval range,
      EpsilonBounds(f.mae_max, f.budget_cap / static_cast<double>(f.N),
                    f.gamma, f.eps0, params, f.sensitivity));
  Json j;
  j["eps0"] = f.eps0;
  j["gamma"] = RoundSignificant(f.gamma);
  j["mae_max"] = f.mae_max;
  j["budget"] = RoundCents(f.budget_cap);
  j["lower"] = range.lower;
  j["upper"] = range.upper ? Json(*range.upper) : Json(nullptr);
  j["feasible"] = range.feasible;
  Emit(out, j);
  return range.feasible ? kExitOk : kExitFailure;
}

struct RmseFlags {
  DataFlags data;
  std::vector<double> eps0 = {0.1, 0.5, 1.0, 2.0, 5.0};
  int runs = 50;
  double lambda = 0.01;
  double train_fraction = 0.8;
  double sensitivity = 0;
  int p = 100;
  std::int64_t n = 1000;
  double gamma2 = 0.9;
  std::uint64_t seed = 0;
  int workers = 1;
  std::string format = "csv";
  CLI::Option *sensitivity_opt, *seed_opt;
};

absl::StatusOr<int> RunRmse(const RmseFlags& f, std::ostream& out) {
  PAR_ASSIGN_OR_RETURN(const DataSource src, f.data.Load());
  PAR_ASSIGN_OR_RETURN(const std::uint64_t seed,
                       ResolveSeed(f.seed_opt, f.seed));
  QuerySpec ridge;
  ridge.kind = QueryKind::kRidge;
  ridge.lambda = f.lambda;
  double sensitivity = f.sensitivity;
  if (f.sensitivity_opt->count() == 0) {
    PAR_ASSIGN_OR_RETURN(
        std::vector<double> samples,
        SensitivitySamples(src, ridge, f.p, f.n,
                           {.seed = DeriveSeed(seed, 0), .workers = f.workers}));
    PAR_ASSIGN_OR_RETURN(const EmpiricalCdf cdf,
                         EmpiricalCdf::Create(std::move(samples)));
    PAR_ASSIGN_OR_RETURN(sensitivity, SampledSensitivity(cdf, f.gamma2));
  }
  const RmseConfig cfg{.runs = f.runs,
                       .train_fraction = f.train_fraction,
                       .seed = seed,
                       .workers = f.workers};
  std::vector<RmseResult> results;
  for (double eps0 : f.eps0) {
    PAR_ASSIGN_OR_RETURN(
        const LaplaceMechanism m,
        LaplaceMechanism::Create(sensitivity, eps0, src.num_features()));
    PAR_ASSIGN_OR_RETURN(RmseResult r, RmseExperiment(src, ridge, m, cfg));
    results.push_back(std::move(r));
  }
  if (f.format == "csv") {
    out << "# seed=" << seed << " sensitivity=" << std::setprecision(17)
        << sensitivity << '\n';
    for (std::size_t i = 0; i < results.size(); ++i) {
      WriteRmseCsv(out, f.eps0[i], results[i], i == 0);
    }
    return kExitOk;
  }
  Json j;
  j["seed"] = seed;
  j["sensitivity"] = sensitivity;
  j["runs"] = f.runs;
  j["points"] = Json::array();
  for (std::size_t i = 0; i < results.size(); ++i) {
    j["points"].push_back({{"eps0", f.eps0[i]},
                           {"mean_rmse", results[i].mean_rmse},
                           {"noiseless_rmse", results[i].noiseless_rmse}});
  }
  Emit(out, j);
  return kExitOk;
}

ValidationReport Deterministic(std::string target, double expected,
                               double value, double tolerance) {
  return Compare(std::move(target), expected, McEstimate{.estimate = value},
                 4.0, tolerance);
}

absl::Status VerifyGamma1(const McConfig& cfg,
                          std::vector<ValidationReport>& reports) {
  constexpr std::pair<double, double> kPairs[] = {
      {0.08, 0.1}, {0.27, 0.5}, {0.42, 1.0}};
  std::uint64_t index = 0;
  for (int k : {1, 2, 5}) {
    for (const auto& [eps, eps0] : kPairs) {
      McConfig c = cfg;
      c.seed = DeriveSeed(cfg.seed, index++);
      PAR_ASSIGN_OR_RETURN(const double analytic, Gamma1(eps, eps0, k));
      PAR_ASSIGN_OR_RETURN(const McEstimate mc, McGamma1(eps, eps0, k, c));
      reports.push_back(Compare(absl::StrCat("gamma1 k=", k, " eps=", eps,
                                             " eps0=", eps0),
                                analytic, mc, 4.0, 0.005));
    }
  }
  return absl::OkStatus();
}

absl::Status VerifyOverlap(const McConfig& cfg,
                           std::vector<ValidationReport>& reports) {
  PAR_ASSIGN_OR_RETURN(const double analytic, Overlap(1.0, 0.6, 1.0));
  McConfig c = cfg;
  c.seed = DeriveSeed(cfg.seed, 100);
  PAR_ASSIGN_OR_RETURN(const McEstimate mc, McOverlap(1.0, 0.6, 1.0, c));
  reports.push_back(Compare("overlap eps1=1 eps2=0.6", analytic, mc, 4.0,
                            0.003));
  reports.push_back(
      Deterministic("overlap reference 0.81", 0.81, analytic, 0.005));
  return absl::OkStatus();
}

absl::Status VerifyComposition(std::vector<ValidationReport>& reports) {
  PAR_ASSIGN_OR_RETURN(const double advanced,
                       AdvancedComposition(0.1, 10, 1e-5));
  PAR_ASSIGN_OR_RETURN(const double par_zero,
                       ParComposition(0.1, 0.05, 0.0, 10, 1e-5));
  reports.push_back(Deterministic("composition gamma=0 equals advanced",
                                  advanced, par_zero, 1e-12));
  PAR_ASSIGN_OR_RETURN(const double point,
                       ParComposition(0.1, 0.08, 0.8, 10, 1e-5));
  reports.push_back(
      Deterministic("composition reference 1.5917", 1.5917, point, 1e-3));
  double worst = -std::numeric_limits<double>::infinity();
  for (int i = 1; i <= 20; ++i) {
    const double eps0 = 0.05 * i;
    for (int j = 0; j < 20; ++j) {
      const double gamma = j / 19.0;
      for (std::int64_t n : {1, 5, 10, 50, 100}) {
        PAR_ASSIGN_OR_RETURN(const double adv,
                             AdvancedComposition(eps0, n, 1e-5));
        PAR_ASSIGN_OR_RETURN(const double par,
                             ParComposition(eps0, 0.5 * eps0, gamma, n, 1e-5));
        worst = std::max(worst, par - adv);
      }
    }
  }
  reports.push_back(Deterministic("composition par <= advanced", 0.0,
                                  std::max(0.0, worst), 1e-12));
  return absl::OkStatus();
}

absl::Status VerifyCost(std::vector<ValidationReport>& reports) {
  const CostModelParams clinic{.E = 5500, .E_min = 0, .c = 1, .N = 100};
  PAR_ASSIGN_OR_RETURN(const double golden, EpsilonMin(0.5, clinic, 1));
  PAR_ASSIGN_OR_RETURN(const double stationary, EpsilonMinStationary(0.5));
  reports.push_back(Deterministic("cost eps_min search vs stationary point",
                                  stationary, golden, 1e-5));
  PAR_ASSIGN_OR_RETURN(const BudgetOptimum opt,
                       OptimizeBudget(0.5, clinic, 1));
  reports.push_back(
      Deterministic("cost dp budget 74434.40", 74434.40, opt.dp_budget, 0.01));
  reports.push_back(
      Deterministic("cost eps_min 0.274", 0.274, opt.eps_min, 0.001));
  reports.push_back(
      Deterministic("cost budget 37805.86", 37805.86, opt.budget, 1.0));
  reports.push_back(
      Deterministic("cost saving 36628.53", 36628.53, opt.saving, 2.0));
  return absl::OkStatus();
}

struct VerifyFlags {
  std::string target = "all";
  std::int64_t samples = 1'000'000;
  std::uint64_t seed = 0;
  int workers = 1;
  CLI::Option* seed_opt;
};

absl::StatusOr<int> RunVerify(const VerifyFlags& f, std::ostream& out) {
  PAR_ASSIGN_OR_RETURN(const std::uint64_t seed,
                       ResolveSeed(f.seed_opt, f.seed));
  const McConfig cfg{.samples = f.samples, .seed = seed, .workers = f.workers};
  PAR_ASSIGN_OR_RETURN(const std::vector<ValidationReport> reports,
                       RunVerification(f.target, cfg));
  Json j;
  j["seed"] = seed;
  j["samples"] = f.samples;
  j["reports"] = Json::array();
  bool pass = true;
  for (const ValidationReport& r : reports) {
    j["reports"].push_back(Json::parse(ReportToJson(r)));
    pass = pass && r.pass;
  }
  j["pass"] = pass;
  Emit(out, j);
  return pass ? kExitOk : kExitFailure;
}

struct SampleSizeFlags {
  double rho = 0, alpha = 0;
  std::int64_t n = 0;
  CLI::Option *alpha_opt, *n_opt;
};

absl::StatusOr<int> RunSampleSize(const SampleSizeFlags& f, std::ostream& out) {
  if ((f.alpha_opt->count() > 0) == (f.n_opt->count() > 0)) {
    return Usage("give exactly one of --alpha and --n");
  }
  Json j;
  j["rho"] = f.rho;
  if (f.alpha_opt->count() > 0) {
    PAR_ASSIGN_OR_RETURN(const std::int64_t n, SampleSizeFor(f.rho, f.alpha));
    j["alpha"] = RoundSignificant(f.alpha);
    j["n"] = n;
  } else {
    if (!(f.rho > 0.0) || f.n < 1) {
      return Usage("--rho must be positive and --n at least 1");
    }
    j["n"] = f.n;
    j["tolerance"] = RoundSignificant(ProbabilisticTolerance(f.rho, f.n));
  }
  Emit(out, j);
  return kExitOk;
}

int ReportStatus(const absl::Status& status, std::ostream& err) {
  err << "error: " << status.message() << '\n';
  return status.code() == absl::StatusCode::kInvalidArgument ? kExitUsage
                                                             : kExitFailure;
}

template <typename T>
std::optional<T> OptionalField(const Json& j, const char* name) {
  if (!j.contains(name) || j.at(name).is_null()) return std::nullopt;
  return j.at(name).get<T>();
}

}  // namespace

double RoundSignificant(double value, int digits) {
  if (value == 0.0 || !std::isfinite(value)) return value;
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.*g", digits, value);
  return std::strtod(buffer, nullptr);
}

double RoundCents(double value) {
  if (!std::isfinite(value)) return value;
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.2f", value);
  return std::strtod(buffer, nullptr);
}

std::string RiskAssessmentToJson(const RiskAssessment& a) {
  Json j;
  j["case"] = static_cast<int>(a.risk_case) + 1;
  j["case_name"] = std::string(RiskCaseName(a.risk_case));
  if (a.epsilon) j["eps"] = *a.epsilon;
  if (a.eps0) j["eps0"] = *a.eps0;
  j["gamma"] = RoundSignificant(a.gamma);
  j["violation_risk"] = RoundSignificant(a.violation_risk());
  if (a.rho) j["rho"] = *a.rho;
  if (a.n_samples) j["n"] = *a.n_samples;
  if (a.eta) j["eta"] = *a.eta;
  return j.dump(2);
}

absl::StatusOr<RiskAssessment> RiskAssessmentFromJson(const std::string& text) {
  const Json j = Json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    return absl::InvalidArgumentError("risk assessment is not a JSON object");
  }
  RiskAssessment a;
  try {
    const int risk_case = j.at("case").get<int>();
    PAR_ASSIGN_OR_RETURN(a.risk_case,
                         ParseRiskCase(std::to_string(risk_case)));
    a.epsilon = OptionalField<double>(j, "eps");
    a.eps0 = OptionalField<double>(j, "eps0");
    a.gamma = j.at("gamma").get<double>();
    a.rho = OptionalField<double>(j, "rho");
    a.n_samples = OptionalField<std::int64_t>(j, "n");
    a.eta = OptionalField<double>(j, "eta");
  } catch (const nlohmann::json::exception& e) {
    return absl::InvalidArgumentError(
        absl::StrCat("malformed risk assessment: ", e.what()));
  }
  PAR_RETURN_IF_ERROR(a.Validate());
  return a;
}

std::string BudgetOptimumToJson(double eps0, const BudgetOptimum& o) {
  Json j;
  j["eps0"] = eps0;
  j["eps_min"] = o.eps_min;
  j["gamma"] = RoundSignificant(o.gamma);
  j["budget"] = RoundCents(o.budget);
  j["dp_budget"] = RoundCents(o.dp_budget);
  j["saving"] = RoundCents(o.saving);
  return j.dump(2);
}

absl::StatusOr<BudgetOptimum> BudgetOptimumFromJson(const std::string& text) {
  const Json j = Json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    return absl::InvalidArgumentError("budget optimum is not a JSON object");
  }
  BudgetOptimum o;
  try {
    o.eps_min = j.at("eps_min").get<double>();
    o.gamma = j.at("gamma").get<double>();
    o.budget = j.at("budget").get<double>();
    o.dp_budget = j.at("dp_budget").get<double>();
    o.saving = j.at("saving").get<double>();
  } catch (const nlohmann::json::exception& e) {
    return absl::InvalidArgumentError(
        absl::StrCat("malformed budget optimum: ", e.what()));
  }
  return o;
}

absl::StatusOr<std::vector<ValidationReport>> RunVerification(
    const std::string& target, const McConfig& cfg) {
  PAR_RETURN_IF_ERROR(cfg.Validate());
  const bool all = target == "all";
  if (!all && target != "gamma1" && target != "overlap" &&
      target != "composition" && target != "cost") {
    return Usage(absl::StrCat("unknown verification target '", target, "'"));
  }
  std::vector<ValidationReport> reports;
  if (all || target == "gamma1") PAR_RETURN_IF_ERROR(VerifyGamma1(cfg, reports));
  if (all || target == "overlap") {
    PAR_RETURN_IF_ERROR(VerifyOverlap(cfg, reports));
  }
  if (all || target == "composition") {
    PAR_RETURN_IF_ERROR(VerifyComposition(reports));
  }
  if (all || target == "cost") PAR_RETURN_IF_ERROR(VerifyCost(reports));
  return reports;
}

int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err) {
  CLI::App app{"Privacy-at-risk calculations for the Laplace mechanism", "par"};
  app.require_subcommand(1);

  RiskFlags risk;
  CLI::App* risk_cmd =
      app.add_subcommand("risk", "privacy at risk for cases 1, 2 and 3");
  risk_cmd->add_option("--case", risk.risk_case, "1, 2 or 3")
      ->check(CLI::IsMember({"1", "2", "3", "explicit", "implicit", "coupled"}))
      ->capture_default_str();
  risk.eps_opt = risk_cmd->add_option("--eps", risk.eps, "privacy level eps");
  risk.gamma_opt =
      risk_cmd->add_option("--gamma", risk.gamma, "confidence gamma");
  risk.eps0_opt = risk_cmd->add_option("--eps0", risk.eps0,
                                       "privacy level of the noise");
  risk_cmd->add_option("--k", risk.k, "query dimension")->capture_default_str();
  risk_cmd->add_option("--solve", risk.solve, "eps, gamma or eps0")
      ->check(CLI::IsMember({"eps", "gamma", "eps0"}));
  risk.rho_opt = risk_cmd->add_option("--rho", risk.rho, "DKW accuracy");
  risk.n_opt = risk_cmd->add_option("--n", risk.n, "sensitivity samples");
  risk.eta_opt = risk_cmd->add_option("--eta", risk.eta, "coupling ratio");
  risk.gamma2_opt = risk_cmd->add_option("--gamma2", risk.gamma2,
                                         "sampled-sensitivity quantile");

  SampleSizeFlags size;
  CLI::App* size_cmd = app.add_subcommand(
      "sample-size", "DKW sample size for a tolerance, or the reverse");
  size_cmd->add_option("--rho", size.rho, "DKW accuracy")->required();
  size.alpha_opt =
      size_cmd->add_option("--alpha", size.alpha, "target tolerance");
  size.n_opt = size_cmd->add_option("--n", size.n, "sample count");

  SensitivityFlags sens;
  CLI::App* sens_cmd = app.add_subcommand(
      "sensitivity", "sampled sensitivity from neighbouring dataset pairs");
  sens.data.Register(sens_cmd);
  sens.query.Register(sens_cmd);
  sens_cmd->add_option("--p", sens.p, "records per dataset")->required();
  sens_cmd->add_option("--n", sens.n, "neighbour pairs")->capture_default_str();
  sens_cmd->add_option("--gamma2", sens.gamma2, "quantile level")
      ->capture_default_str();
  sens.rho_opt = sens_cmd->add_option("--rho", sens.rho, "DKW accuracy");
  sens.delta_true_opt = sens_cmd->add_option(
      "--delta-true", sens.delta_true, "known sensitivity, for eta");
  sens.seed_opt = sens_cmd->add_option("--seed", sens.seed, "master seed");
  sens_cmd->add_option("--workers", sens.workers, "threads")
      ->capture_default_str();
  sens_cmd->add_option("--format", sens.format, "json or csv (the CDF)")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
  sens.samples_out_opt = sens_cmd->add_option(
      "--samples-out", sens.samples_out, "also write the raw samples here");

  ComposeFlags comp;
  CLI::App* comp_cmd =
      app.add_subcommand("compose", "basic, advanced and PaR composition");
  comp.eps0_opt = comp_cmd->add_option("--eps0", comp.eps0, "per-step eps0");
  comp.eps_opt = comp_cmd->add_option("--eps", comp.eps, "per-step eps");
  comp.gamma_opt =
      comp_cmd->add_option("--gamma", comp.gamma, "per-step confidence");
  comp_cmd->add_option("--delta", comp.delta, "composition delta")
      ->capture_default_str();
  comp_cmd->add_option("--n-max", comp.n_max, "largest step count")
      ->capture_default_str();
  comp_cmd->add_option("--k", comp.k, "query dimension")->capture_default_str();
  comp.ledger_opt = comp_cmd->add_option(
      "--ledger", comp.ledger, "CSV with columns eps0, eps, gamma");
  comp_cmd->add_option("--format", comp.format, "csv or json")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();

  BudgetFlags budget;
  CLI::App* budget_cmd =
      app.add_subcommand("budget", "compensation budget under PaR");
  budget_cmd->add_option("--eps0", budget.eps0, "privacy level of the noise")
      ->required();
  budget_cmd->add_option("--E", budget.E, "compensation without privacy")
      ->required();
  budget_cmd->add_option("--c", budget.c, "cost scale")->capture_default_str();
  budget_cmd->add_option("--Emin", budget.E_min, "minimum compensation")
      ->capture_default_str();
  budget_cmd->add_option("--N", budget.N, "number of people")
      ->capture_default_str();
  budget_cmd->add_option("--k", budget.k, "query dimension")
      ->capture_default_str();
  budget_cmd->add_flag("--optimize", budget.optimize,
                       "cost-optimal eps and the saving over eps0");
  budget.curve_opt =
      budget_cmd->add_option("--curve", budget.curve, "CSV with this many points");
  budget.eps_opt =
      budget_cmd->add_option("--eps", budget.eps, "evaluate at this eps");
  budget.mae_opt = budget_cmd->add_option("--mae-max", budget.mae_max,
                                          "largest expected absolute error");
  budget.cap_opt = budget_cmd->add_option("--budget-cap", budget.budget_cap,
                                          "total budget for all N people");
  budget.gamma_opt = budget_cmd->add_option(
      "--gamma", budget.gamma, "confidence for the interval mode");
  budget_cmd->add_option("--sensitivity", budget.sensitivity,
                         "query sensitivity for --mae-max")
      ->capture_default_str();

  VerifyFlags verify;
  CLI::App* verify_cmd =
      app.add_subcommand("verify", "Monte Carlo and reference checks");
  verify_cmd->add_option("--target", verify.target,
                         "gamma1, overlap, composition, cost or all")
      ->check(CLI::IsMember({"gamma1", "overlap", "composition", "cost", "all"}))
      ->capture_default_str();
  verify_cmd->add_option("--samples", verify.samples, "draws per estimate")
      ->capture_default_str();
  verify.seed_opt =
      verify_cmd->add_option("--seed", verify.seed, "master seed");
  verify_cmd->add_option("--workers", verify.workers, "threads")
      ->capture_default_str();

  RmseFlags rmse;
  CLI::App* rmse_cmd = app.add_subcommand(
      "rmse", "test RMSE of Laplace-perturbed ridge regression");
  rmse.data.Register(rmse_cmd);
  rmse_cmd->add_option("--eps0", rmse.eps0, "privacy levels")
      ->delimiter(',')
      ->capture_default_str();
  rmse_cmd->add_option("--runs", rmse.runs, "runs per level")
      ->capture_default_str();
  rmse_cmd->add_option("--lambda", rmse.lambda, "ridge regularization")
      ->capture_default_str();
  rmse_cmd->add_option("--train-fraction", rmse.train_fraction,
                       "share of records used for training")
      ->capture_default_str();
  rmse.sensitivity_opt = rmse_cmd->add_option(
      "--sensitivity", rmse.sensitivity,
      "noise sensitivity (default: sampled with --p, --n, --gamma2)");
  rmse_cmd->add_option("--p", rmse.p, "records per sampled dataset")
      ->capture_default_str();
  rmse_cmd->add_option("--n", rmse.n, "neighbour pairs")->capture_default_str();
  rmse_cmd->add_option("--gamma2", rmse.gamma2, "quantile level")
      ->capture_default_str();
  rmse.seed_opt = rmse_cmd->add_option("--seed", rmse.seed, "master seed");
  rmse_cmd->add_option("--workers", rmse.workers, "threads")
      ->capture_default_str();
  rmse_cmd->add_option("--format", rmse.format, "csv or json")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  absl::StatusOr<int> code = absl::InternalError("no subcommand ran");
  if (risk_cmd->parsed()) {
    absl::StatusOr<RiskAssessment> a = ComputeRisk(risk);
    if (a.ok()) {
      out << RiskAssessmentToJson(*a) << '\n';
      code = kExitOk;
    } else {
      code = a.status();
    }
  } else if (size_cmd->parsed()) {
    code = RunSampleSize(size, out);
  } else if (sens_cmd->parsed()) {
    code = RunSensitivity(sens, out);
  } else if (comp_cmd->parsed()) {
    code = RunCompose(comp, out);
  } else if (budget_cmd->parsed()) {
    code = RunBudget(budget, out);
  } else if (verify_cmd->parsed()) {
    code = RunVerify(verify, out);
  } else if (rmse_cmd->parsed()) {
    code = RunRmse(rmse, out);
  }
  if (!code.ok()) return ReportStatus(code.status(), err);
  return *code;
}

}  // namespace par
