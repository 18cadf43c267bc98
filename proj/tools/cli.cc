// Copyright 2026 The PATE Accounting Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cli.h"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_split.h"
#include "absl/strings/string_view.h"
#include "canonical_json.h"
#include "json.hpp"
#include "pate/accountant.h"
#include "pate/histogram.h"
#include "pate/mechanisms.h"
#include "pate/random_source.h"
#include "pate/simulation.h"
#include "pate/smooth_sensitivity.h"
#include "pate/votes_io.h"

#ifndef PATE_VERSION
#define PATE_VERSION "unknown"
#endif
#ifndef PATE_BUILD_TYPE
#define PATE_BUILD_TYPE "unknown"
#endif

namespace pate::tools {
namespace {

using nlohmann::json;

struct MechanismFlags {
  std::string mechanism;
  double sigma = 0.0;
  double gamma = 0.0;
  double threshold = 0.0;
  double sigma1 = 0.0;
  double sigma2 = 0.0;
  double confidence = 0.0;
  std::string student_probs;
};

struct AggregateFlags {
  std::string votes;
  MechanismFlags mech;
  uint64_t seed = 0;
  std::string out;
};

struct AnalyzeFlags {
  std::string votes;
  MechanismFlags mech;
  std::string outcomes;
  double delta = 1e-5;
  std::string orders;
  std::string out;
};

struct SmoothSensFlags {
  std::string votes;
  double sigma = 0.0;
  double order = 0.0;
  double beta = 0.0;
  std::string out;
};

struct SanitizeFlags {
  std::string report;
  double order = 0.0;
  double beta = 0.0;
  double sigma_ss = 0.0;
  uint64_t seed = 0;
  std::string out;
};

struct SimulateFlags {
  std::string preset = "glyph-like";
  std::string model;
  int64_t queries = 1000;
  uint64_t seed = 0;
  std::string grid;
  std::string out;
  std::string votes_out;
};

int ExitCodeFor(const absl::Status& status) {
  switch (status.code()) {
    case absl::StatusCode::kOk:
      return kExitOk;
    case absl::StatusCode::kInvalidArgument:
    case absl::StatusCode::kNotFound:
    case absl::StatusCode::kOutOfRange:
      return kExitInvalidInput;
    case absl::StatusCode::kFailedPrecondition:
      return kExitRefused;
    default:
      return kExitInternal;
  }
}

absl::Status Invalid(absl::string_view message) {
  return absl::InvalidArgumentError(message);
}

absl::Status WriteOutput(const std::string& path, const std::string& content,
                         std::ostream& out) {
  if (path.empty()) {
    out << content;
    return absl::OkStatus();
  }
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) return absl::NotFoundError(absl::StrCat("cannot write ", path));
  file << content;
  if (!file) return absl::InternalError(absl::StrCat("failed writing ", path));
  return absl::OkStatus();
}

absl::StatusOr<std::vector<double>> ParseOrders(const std::string& text) {
  std::vector<double> orders;
  for (absl::string_view field :
       absl::StrSplit(text, ',', absl::SkipWhitespace())) {
    double value;
    if (!absl::SimpleAtod(field, &value)) {
      return Invalid(absl::StrCat("bad Renyi order '", field, "'"));
    }
    orders.push_back(value);
  }
  return orders;
}

absl::StatusOr<Mechanism> ParseMechanismFlag(const std::string& name) {
  std::optional<Mechanism> m = ParseMechanism(name);
  if (!m) {
    return Invalid(absl::StrCat(
        "unknown mechanism '", name,
        "'; expected lnmax, gnmax, confident or interactive"));
  }
  return *m;
}

struct LoadedVotes {
  std::vector<std::string> ids;
  std::vector<VoteHistogram> votes;
};

absl::StatusOr<LoadedVotes> LoadVotes(const std::string& path) {
  absl::StatusOr<std::vector<VoteRecord>> records = ReadVotesCsv(path);
  if (!records.ok()) {
    return absl::Status(records.status().code(),
                        absl::StrCat(path, ": ", records.status().message()));
  }
  if (records->empty()) return Invalid(absl::StrCat(path, ": no queries"));
  LoadedVotes loaded;
  for (VoteRecord& r : *records) {
    loaded.ids.push_back(std::move(r.query_id));
    loaded.votes.push_back(std::move(r.histogram));
  }
  return loaded;
}

absl::StatusOr<std::vector<std::vector<double>>> LoadStudentProbs(
    const std::string& path, const LoadedVotes& votes) {
  if (path.empty()) {
    return Invalid("interactive aggregation requires --student-probs");
  }
  absl::StatusOr<std::vector<ProbabilityRecord>> records =
      ReadProbabilitiesCsv(path);
  if (!records.ok()) {
    return absl::Status(records.status().code(),
                        absl::StrCat(path, ": ", records.status().message()));
  }
  if (records->size() != votes.votes.size()) {
    return Invalid(absl::StrCat(path, ": ", records->size(),
                                " rows for ", votes.votes.size(), " queries"));
  }
  std::vector<std::vector<double>> probs;
  for (size_t k = 0; k < records->size(); ++k) {
    if ((*records)[k].query_id != votes.ids[k]) {
      return Invalid(absl::StrCat(path, ": row ", k + 1, " has query_id '",
                                  (*records)[k].query_id, "', expected '",
                                  votes.ids[k], "'"));
    }
    probs.push_back(std::move((*records)[k].probabilities));
  }
  return probs;
}

absl::StatusOr<std::vector<bool>> LoadOutcomes(const std::string& path,
                                               const LoadedVotes& votes) {
  absl::StatusOr<std::string> text = ReadFileToString(path);
  if (!text.ok()) return text.status();
  std::vector<bool> answered;
  int line_number = 0;
  for (absl::string_view line : absl::StrSplit(*text, '\n')) {
    ++line_number;
    if (line.empty() || line == "query_id,outcome,label") continue;
    std::vector<absl::string_view> fields = absl::StrSplit(line, ',');
    if (fields.size() != 3) {
      return Invalid(absl::StrCat(path, ": line ", line_number,
                                  ": expected query_id,outcome,label"));
    }
    const size_t k = answered.size();
    if (k >= votes.ids.size() || fields[0] != votes.ids[k]) {
      return Invalid(absl::StrCat(path, ": line ", line_number,
                                  ": query_id does not match the votes file"));
    }
    if (fields[1] != "teacher" && fields[1] != "reinforce" &&
        fields[1] != "none") {
      return Invalid(absl::StrCat(path, ": line ", line_number,
                                  ": unknown outcome '", fields[1], "'"));
    }
    answered.push_back(fields[1] == "teacher");
  }
  if (answered.size() != votes.ids.size()) {
    return Invalid(absl::StrCat(path, ": ", answered.size(),
                                " outcomes for ", votes.ids.size(),
                                " queries"));
  }
  return answered;
}

absl::StatusOr<AnalysisConfig> BuildAnalysisConfig(const MechanismFlags& f,
                                                   double delta,
                                                   const std::string& orders) {
  absl::StatusOr<Mechanism> mechanism = ParseMechanismFlag(f.mechanism);
  if (!mechanism.ok()) return mechanism.status();
  AnalysisConfig config;
  config.mechanism = *mechanism;
  config.sigma = f.sigma;
  config.gamma = f.gamma;
  config.threshold = f.threshold;
  config.sigma1 = f.sigma1;
  config.sigma2 = f.sigma2;
  config.delta = delta;
  if (!orders.empty()) {
    absl::StatusOr<std::vector<double>> values = ParseOrders(orders);
    if (!values.ok()) return values.status();
    absl::StatusOr<OrderGrid> grid = OrderGrid::Create(*std::move(values));
    if (!grid.ok()) return grid.status();
    config.orders = *std::move(grid);
  }
  if (absl::Status s = config.Validate(); !s.ok()) return s;
  return config;
}

json MechanismConfigJson(const AnalysisConfig& c) {
  json j;
  j["mechanism"] = std::string(MechanismName(c.mechanism));
  j["sigma"] = c.sigma;
  j["gamma"] = c.gamma;
  j["threshold"] = c.threshold;
  j["sigma1"] = c.sigma1;
  j["sigma2"] = c.sigma2;
  return j;
}

absl::Status RunAggregate(const AggregateFlags& f, std::ostream& out) {
  absl::StatusOr<Mechanism> mechanism = ParseMechanismFlag(f.mech.mechanism);
  if (!mechanism.ok()) return mechanism.status();
  ConfidentConfig confident{.threshold = f.mech.threshold,
                            .sigma1 = f.mech.sigma1,
                            .sigma2 = f.mech.sigma2};
  InteractiveConfig interactive{.threshold = f.mech.threshold,
                                .gamma = f.mech.confidence,
                                .sigma1 = f.mech.sigma1,
                                .sigma2 = f.mech.sigma2,
                                .num_teachers = 1};
  switch (*mechanism) {
    case Mechanism::kGnMax:
      if (!(f.mech.sigma > 0.0)) return Invalid("gnmax requires --sigma > 0");
      break;
    case Mechanism::kLnMax:
      if (!(f.mech.gamma > 0.0)) return Invalid("lnmax requires --gamma > 0");
      break;
    case Mechanism::kConfident:
      if (absl::Status s = confident.Validate(); !s.ok()) return s;
      break;
    case Mechanism::kInteractive:
      if (absl::Status s = interactive.Validate(); !s.ok()) return s;
      break;
  }

  absl::StatusOr<LoadedVotes> votes = LoadVotes(f.votes);
  if (!votes.ok()) return votes.status();
  std::vector<std::vector<double>> probs;
  if (*mechanism == Mechanism::kInteractive) {
    absl::StatusOr<std::vector<std::vector<double>>> p =
        LoadStudentProbs(f.mech.student_probs, *votes);
    if (!p.ok()) return p.status();
    probs = *std::move(p);
  }

  std::string csv = "query_id,outcome,label\n";
  for (size_t k = 0; k < votes->votes.size(); ++k) {
    const VoteHistogram& h = votes->votes[k];
    RandomSource rng = RandomSource::ForQuery(f.seed, k);
    absl::StatusOr<AggregationOutcome> outcome;
    switch (*mechanism) {
      case Mechanism::kGnMax: {
        absl::StatusOr<int> label = GnMax(h, f.mech.sigma, rng);
        if (!label.ok()) return label.status();
        outcome = AggregationOutcome::TeacherLabel(*label);
        break;
      }
      case Mechanism::kLnMax: {
        absl::StatusOr<int> label = LnMax(h, f.mech.gamma, rng);
        if (!label.ok()) return label.status();
        outcome = AggregationOutcome::TeacherLabel(*label);
        break;
      }
      case Mechanism::kConfident:
        outcome = ConfidentGnMax(h, confident, rng);
        break;
      case Mechanism::kInteractive:
        interactive.num_teachers = h.num_teachers();
        outcome = InteractiveGnMax(h, probs[k], interactive, rng);
        break;
    }
    if (!outcome.ok()) {
      return Invalid(absl::StrCat("query '", votes->ids[k],
                                  "': ", outcome.status().message()));
    }
    absl::StrAppend(&csv, votes->ids[k], ",",
                    std::string(OutcomeName(outcome->kind)), ",",
                    outcome->label, "\n");
  }
  return WriteOutput(f.out, csv, out);
}

absl::Status RunAnalyze(const AnalyzeFlags& f, std::ostream& out) {
  absl::StatusOr<AnalysisConfig> config =
      BuildAnalysisConfig(f.mech, f.delta, f.orders);
  if (!config.ok()) return config.status();
  const bool thresholded = config->mechanism == Mechanism::kConfident ||
                           config->mechanism == Mechanism::kInteractive;
  if (!f.outcomes.empty() && !thresholded) {
    return Invalid("--outcomes only applies to confident and interactive");
  }

  absl::StatusOr<LoadedVotes> votes = LoadVotes(f.votes);
  if (!votes.ok()) return votes.status();
  AnalysisInputs inputs;
  inputs.votes = votes->votes;
  if (config->mechanism == Mechanism::kInteractive) {
    absl::StatusOr<std::vector<std::vector<double>>> p =
        LoadStudentProbs(f.mech.student_probs, *votes);
    if (!p.ok()) return p.status();
    inputs.student_probs = *std::move(p);
  }
  if (!f.outcomes.empty()) {
    absl::StatusOr<std::vector<bool>> answered =
        LoadOutcomes(f.outcomes, *votes);
    if (!answered.ok()) return answered.status();
    inputs.answered = *std::move(answered);
  }

  absl::StatusOr<RunReport> report = AnalyzeRun(inputs, *config);
  if (!report.ok()) return report.status();

  const std::span<const double> orders = config->orders.values();
  json j;
  j["schema_version"] = kSchemaVersion;
  j["command"] = "analyze";
  json cfg = MechanismConfigJson(*config);
  cfg["delta"] = config->delta;
  cfg["orders"] = std::vector<double>(orders.begin(), orders.end());
  cfg["votes"] = f.votes;
  cfg["student_probs"] = f.mech.student_probs;
  cfg["outcomes"] = f.outcomes;
  cfg["accounting"] = f.outcomes.empty() ? "expected" : "realized";
  j["config"] = std::move(cfg);

  json per_query = json::array();
  for (size_t k = 0; k < report->per_query.size(); ++k) {
    const QueryCost& c = report->per_query[k];
    json q;
    q["id"] = votes->ids[k];
    q["counts"] = std::vector<int64_t>(votes->votes[k].counts().begin(),
                                       votes->votes[k].counts().end());
    q["q"] = c.q;
    q["log_q"] = c.log_q;
    q["answer_weight"] = c.answer_weight;
    q["eps_by_order"] = c.epsilon;
    q["data_dependent"] = c.data_dependent;
    per_query.push_back(std::move(q));
  }
  j["per_query"] = std::move(per_query);
  json curve = json::object();
  for (size_t i = 0; i < orders.size(); ++i) {
    curve[absl::StrFormat("%.17g", orders[i])] = report->curve.epsilon()[i];
  }
  j["curve"] = std::move(curve);
  j["dp"] = {{"epsilon", report->dp.epsilon},
             {"delta", report->dp.delta},
             {"order", report->dp.order}};
  j["num_queries"] = report->per_query.size();
  j["expected_answered"] = report->expected_answered;
  j["external_formula"] = report->external_formula;
  return WriteOutput(f.out, CanonicalJson(j), out);
}

json ConditionsJson(const ConditionReport& c) {
  return {{"ok", c.ok()},
          {"monotone_cost", c.monotone_cost},
          {"monotone_cost_min_diff", c.monotone_cost_min_diff},
          {"monotone_cost_argmin_q", c.monotone_cost_argmin_q},
          {"constant_above_q0", c.constant_above_q0},
          {"monotone_delta", c.monotone_delta},
          {"monotone_delta_min_diff", c.monotone_delta_min_diff},
          {"monotone_delta_argmin_q", c.monotone_delta_argmin_q},
          {"upper_bound_below_one", c.upper_bound_below_one}};
}

// Reason the smooth sensitivity analysis may not be used, or empty.
std::string RefusalReason(const GnmaxSensitivity& sens,
                          const ConditionReport& conditions,
                          const std::set<int64_t>& ensemble_sizes) {
  if (!conditions.ok()) {
    return "the cost function fails the monotonicity conditions for this "
           "(sigma, order)";
  }
  for (int64_t n : ensemble_sizes) {
    if (!sens.GuardHolds(n)) {
      return absl::StrCat("q0 = ", sens.q0(),
                          " is below q of a unanimous histogram with ", n,
                          " teachers");
    }
  }
  return "";
}

absl::Status RunSmoothSens(const SmoothSensFlags& f, std::ostream& out,
                           bool& refused) {
  if (!(f.sigma > 0.0)) return Invalid("--sigma must be positive");
  if (!(f.order > 1.0)) return Invalid("--order must be > 1");
  const double beta = f.beta > 0.0 ? f.beta : 0.4 / f.order;
  absl::StatusOr<LoadedVotes> votes = LoadVotes(f.votes);
  if (!votes.ok()) return votes.status();
  absl::StatusOr<GnmaxSensitivity> sens = GnmaxSensitivity::Create(
      f.sigma, f.order, votes->votes.front().num_classes());
  if (!sens.ok()) return sens.status();

  const ConditionReport conditions = sens->CheckConditions();
  std::set<int64_t> sizes;
  for (const VoteHistogram& h : votes->votes) sizes.insert(h.num_teachers());
  const std::string reason = RefusalReason(*sens, conditions, sizes);

  json j;
  j["schema_version"] = kSchemaVersion;
  j["command"] = "smooth-sens";
  j["config"] = {{"votes", f.votes},
                 {"sigma", f.sigma},
                 {"order", f.order},
                 {"beta", beta}};
  j["q0"] = sens->q0();
  j["q1"] = sens->q1();
  j["conditions"] = ConditionsJson(conditions);
  j["refused"] = !reason.empty();
  if (!reason.empty()) {
    j["reason"] = reason;
    refused = true;
    return WriteOutput(f.out, CanonicalJson(j), out);
  }

  std::vector<DistanceSeries> series;
  json per_query = json::array();
  double total = 0.0;
  for (size_t k = 0; k < votes->votes.size(); ++k) {
    const VoteHistogram& h = votes->votes[k];
    absl::StatusOr<DistanceSeries> s = sens->Series(h);
    if (!s.ok()) return s.status();
    const double q = ComputeQ(h, f.sigma).q;
    const double cost = sens->RdpCost(q);
    total += cost;
    const DistanceSeries one[] = {*s};
    per_query.push_back({{"id", votes->ids[k]},
                         {"q", q},
                         {"rdp", cost},
                         {"stop_distance", s->values.size() - 1},
                         {"smooth_sensitivity", SumSmoothSensitivity(one, beta)}});
    series.push_back(*std::move(s));
  }
  j["per_query"] = std::move(per_query);
  j["total_rdp"] = total;
  j["sum_smooth_sensitivity"] = SumSmoothSensitivity(series, beta);
  return WriteOutput(f.out, CanonicalJson(j), out);
}

// Reads a required member, failing with a schema error otherwise.
template <typename T>
absl::StatusOr<T> Member(const json& j, const std::string& path,
                         std::initializer_list<const char*> keys) {
  const json* node = &j;
  for (const char* key : keys) {
    if (!node->is_object() || !node->contains(key)) {
      return Invalid(absl::StrCat("report lacks ", path));
    }
    node = &(*node)[key];
  }
  try {
    return node->get<T>();
  } catch (const json::exception&) {
    return Invalid(absl::StrCat("report field ", path, " has the wrong type"));
  }
}

absl::Status RunSanitize(const SanitizeFlags& f, std::ostream& out,
                         bool& refused) {
  absl::StatusOr<std::string> text = ReadFileToString(f.report);
  if (!text.ok()) return text.status();
  json report = json::parse(*text, nullptr, /*allow_exceptions=*/false);
  if (report.is_discarded()) {
    return Invalid(absl::StrCat(f.report, " is not valid JSON"));
  }

  absl::StatusOr<std::string> mech_name =
      Member<std::string>(report, "config.mechanism", {"config", "mechanism"});
  if (!mech_name.ok()) return mech_name.status();
  absl::StatusOr<Mechanism> mechanism = ParseMechanismFlag(*mech_name);
  if (!mechanism.ok()) return mechanism.status();
  if (*mechanism == Mechanism::kLnMax) {
    return Invalid("sanitize supports the Gaussian mechanisms only");
  }
  const bool thresholded = *mechanism != Mechanism::kGnMax;
  absl::StatusOr<double> sigma = Member<double>(
      report, thresholded ? "config.sigma2" : "config.sigma",
      {"config", thresholded ? "sigma2" : "sigma"});
  if (!sigma.ok()) return sigma.status();
  absl::StatusOr<double> sigma1 = 0.0;
  if (thresholded) {
    sigma1 = Member<double>(report, "config.sigma1", {"config", "sigma1"});
    if (!sigma1.ok()) return sigma1.status();
  }
  absl::StatusOr<double> order = Member<double>(report, "dp.order", {"dp", "order"});
  if (!order.ok()) return order.status();
  if (f.order != 0.0) {
    if (!(f.order > 1.0)) return Invalid("--order must be > 1");
    *order = f.order;
  }
  absl::StatusOr<double> delta = Member<double>(report, "dp.delta", {"dp", "delta"});
  if (!delta.ok()) return delta.status();
  absl::StatusOr<double> dp_epsilon =
      Member<double>(report, "dp.epsilon", {"dp", "epsilon"});
  if (!dp_epsilon.ok()) return dp_epsilon.status();
  if (!report.contains("per_query") || !report["per_query"].is_array() ||
      report["per_query"].empty()) {
    return Invalid("report lacks per_query entries");
  }

  std::vector<VoteHistogram> votes;
  std::vector<double> weights;
  std::vector<double> qs;
  for (size_t k = 0; k < report["per_query"].size(); ++k) {
    const json& entry = report["per_query"][k];
    const std::string where = absl::StrCat("per_query[", k, "]");
    absl::StatusOr<double> q = Member<double>(entry, where + ".q", {"q"});
    if (!q.ok()) return q.status();
    absl::StatusOr<std::vector<int64_t>> counts =
        Member<std::vector<int64_t>>(entry, where + ".counts", {"counts"});
    if (!counts.ok()) return counts.status();
    absl::StatusOr<double> weight =
        Member<double>(entry, where + ".answer_weight", {"answer_weight"});
    if (!weight.ok()) return weight.status();
    if (*weight != 0.0 && *weight != 1.0) {
      return Invalid(
          "sanitize needs realized outcomes for threshold mechanisms; rerun "
          "analyze with --outcomes");
    }
    absl::StatusOr<VoteHistogram> h = VoteHistogram::Create(*counts);
    if (!h.ok()) {
      return Invalid(absl::StrCat(where, ": ", h.status().message()));
    }
    if (!votes.empty() && h->num_classes() != votes.front().num_classes()) {
      return Invalid(absl::StrCat(where, " has a different number of classes"));
    }
    votes.push_back(*std::move(h));
    weights.push_back(*weight);
    qs.push_back(*q);
  }

  const double beta = f.beta > 0.0 ? f.beta : 0.4 / *order;
  const double sigma_ss =
      f.sigma_ss > 0.0 ? f.sigma_ss : 3.0 * std::sqrt((*order + 1.0) / *dp_epsilon);
  GnssParams params{
      .order = *order, .beta = beta, .sigma_ss = sigma_ss, .delta = *delta};
  if (absl::Status s = params.Validate(); !s.ok()) return s;

  absl::StatusOr<GnmaxSensitivity> sens =
      GnmaxSensitivity::Create(*sigma, *order, votes.front().num_classes());
  if (!sens.ok()) return sens.status();
  const ConditionReport conditions = sens->CheckConditions();
  std::set<int64_t> sizes;
  for (const VoteHistogram& h : votes) sizes.insert(h.num_teachers());
  const std::string reason = RefusalReason(*sens, conditions, sizes);

  const double threshold_cost =
      thresholded ? ThresholdCheckRdp(*order, *sigma1) : 0.0;
  json j;
  j["schema_version"] = kSchemaVersion;
  j["command"] = "sanitize";
  j["config"] = {{"report", f.report},
                 {"order", *order},
                 {"beta", beta},
                 {"sigma_ss", sigma_ss},
                 {"seed", f.seed}};
  if (!reason.empty()) {
    double independent = 0.0;
    for (double w : weights) {
      independent += threshold_cost + w * GaussianRdpBound(*order, *sigma);
    }
    j["refused"] = true;
    j["reason"] = reason;
    j["data_independent"] = {
        {"epsilon", independent + std::log(1.0 / *delta) / (*order - 1.0)},
        {"order", *order},
        {"delta", *delta}};
    refused = true;
    return WriteOutput(f.out, CanonicalJson(j), out);
  }

  std::vector<DistanceSeries> series;
  double value = 0.0;
  for (size_t k = 0; k < votes.size(); ++k) {
    value += threshold_cost + weights[k] * sens->RdpCost(qs[k]);
    if (weights[k] == 0.0) continue;
    absl::StatusOr<DistanceSeries> s = sens->Series(votes[k]);
    if (!s.ok()) return s.status();
    series.push_back(*std::move(s));
  }
  const double ss = SumSmoothSensitivity(series, beta);
  RandomSource rng(f.seed);
  absl::StatusOr<SanitizedCost> released = GnssRelease(value, ss, params, rng);
  if (!released.ok()) return released.status();

  j["refused"] = false;
  j["sanitized_epsilon"] = released->epsilon();
  j["surcharge"] = released->gnss_rdp;
  j["beta"] = released->beta;
  j["sigma_ss"] = released->sigma_ss;
  j["order"] = *order;
  j["delta"] = *delta;
  j["delta_term"] = released->delta_term;
  return WriteOutput(f.out, CanonicalJson(j), out);
}

absl::StatusOr<json> ReadJsonFile(const std::string& path) {
  absl::StatusOr<std::string> text = ReadFileToString(path);
  if (!text.ok()) return text.status();
  json j = json::parse(*text, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded() || !j.is_object()) {
    return Invalid(absl::StrCat(path, " is not a JSON object"));
  }
  return j;
}

absl::Status CheckKeys(const json& j, const std::string& what,
                       std::initializer_list<const char*> allowed) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* key : allowed) known = known || it.key() == key;
    if (!known) {
      return Invalid(absl::StrCat("unknown ", what, " key '", it.key(), "'"));
    }
  }
  return absl::OkStatus();
}

absl::StatusOr<SweepGrid> ParseGrid(const json& j) {
  if (absl::Status s =
          CheckKeys(j, "grid",
                    {"mechanisms", "noise", "threshold_fractions",
                     "sigma1_ratio", "ensemble_sizes", "delta"});
      !s.ok()) {
    return s;
  }
  SweepGrid grid;
  try {
    if (j.contains("mechanisms")) {
      grid.mechanisms.clear();
      for (const std::string& name : j["mechanisms"].get<std::vector<std::string>>()) {
        absl::StatusOr<Mechanism> m = ParseMechanismFlag(name);
        if (!m.ok()) return m.status();
        grid.mechanisms.push_back(*m);
      }
    }
    if (j.contains("noise")) grid.noise = j["noise"].get<std::vector<double>>();
    if (j.contains("threshold_fractions")) {
      grid.threshold_fractions =
          j["threshold_fractions"].get<std::vector<double>>();
    }
    if (j.contains("sigma1_ratio")) grid.sigma1_ratio = j["sigma1_ratio"].get<double>();
    if (j.contains("ensemble_sizes")) {
      grid.ensemble_sizes = j["ensemble_sizes"].get<std::vector<int64_t>>();
    }
    if (j.contains("delta")) grid.delta = j["delta"].get<double>();
  } catch (const json::exception& e) {
    return Invalid(absl::StrCat("bad grid: ", e.what()));
  }
  return grid;
}

absl::StatusOr<EnsembleModel> ParseModel(const json& j) {
  if (absl::Status s = CheckKeys(j, "model",
                                 {"n_teachers", "num_classes",
                                  "teacher_accuracy", "accuracy_spread",
                                  "class_weights", "mislabel_rate"});
      !s.ok()) {
    return s;
  }
  EnsembleModel model;
  try {
    model.n_teachers = j.at("n_teachers").get<int64_t>();
    model.num_classes = j.at("num_classes").get<int>();
    model.teacher_accuracy = j.at("teacher_accuracy").get<double>();
    model.accuracy_spread = j.value("accuracy_spread", 0.0);
    model.mislabel_rate = j.value("mislabel_rate", 0.0);
    model.class_weights =
        j.contains("class_weights")
            ? j["class_weights"].get<std::vector<double>>()
            : EnsembleModel::UniformWeights(std::max(model.num_classes, 1));
  } catch (const json::exception& e) {
    return Invalid(absl::StrCat("bad model: ", e.what()));
  }
  return model;
}

absl::Status RunSimulate(const SimulateFlags& f, std::ostream& out) {
  EnsembleModel model;
  if (f.preset == "glyph-like") {
    model = EnsembleModel::GlyphLike();
  } else if (f.preset == "mnist-like") {
    model = EnsembleModel::MnistLike();
  } else {
    if (f.model.empty()) return Invalid("--preset custom requires --model");
    absl::StatusOr<json> j = ReadJsonFile(f.model);
    if (!j.ok()) return j.status();
    absl::StatusOr<EnsembleModel> parsed = ParseModel(*j);
    if (!parsed.ok()) return parsed.status();
    model = *std::move(parsed);
  }
  if (absl::Status s = model.Validate(); !s.ok()) return s;

  SweepGrid grid;
  if (!f.grid.empty()) {
    absl::StatusOr<json> j = ReadJsonFile(f.grid);
    if (!j.ok()) return j.status();
    absl::StatusOr<SweepGrid> parsed = ParseGrid(*j);
    if (!parsed.ok()) return parsed.status();
    grid = *std::move(parsed);
  }
  grid.num_queries = f.queries;
  if (absl::Status s = grid.Validate(); !s.ok()) return s;

  if (!f.votes_out.empty()) {
    absl::StatusOr<GeneratedVotes> generated =
        GenerateVotes(model, f.queries, f.seed);
    if (!generated.ok()) return generated.status();
    std::vector<VoteRecord> records;
    for (size_t k = 0; k < generated->votes.size(); ++k) {
      records.push_back({absl::StrCat(k), generated->votes[k]});
    }
    if (absl::Status s = WriteOutput(f.votes_out, FormatVotesCsv(records), out);
        !s.ok()) {
      return s;
    }
  }

  absl::StatusOr<std::vector<SweepCell>> cells = Sweep(model, grid, f.seed);
  if (!cells.ok()) return cells.status();
  return WriteOutput(f.out, FormatSweepCsv(*cells), out);
}

void AddMechanismOptions(CLI::App* cmd, MechanismFlags& m) {
  cmd->add_option("--mechanism", m.mechanism,
                  "lnmax, gnmax, confident or interactive")
      ->required();
  cmd->add_option("--sigma", m.sigma, "GNMax noise standard deviation");
  cmd->add_option("--gamma", m.gamma, "LNMax inverse Laplace scale");
  cmd->add_option("--threshold", m.threshold, "Threshold T");
  cmd->add_option("--sigma1", m.sigma1, "Threshold-check noise");
  cmd->add_option("--sigma2", m.sigma2, "Answer noise");
  cmd->add_option("--confidence", m.confidence,
                  "Interactive: student confidence needed to reinforce");
  cmd->add_option("--student-probs", m.student_probs,
                  "Interactive: CSV of student class probabilities");
}

}  // namespace

int Run(int argc, const char* const* argv, std::ostream& out,
        std::ostream& err) {
  CLI::App app("Private aggregation of teacher votes and its privacy accounting",
               "pate");
  app.set_version_flag("--version",
                       std::string("pate " PATE_VERSION " (" PATE_BUILD_TYPE
                                   ", " __VERSION__ ")"));
  app.require_subcommand(1);

  AggregateFlags aggregate;
  CLI::App* agg = app.add_subcommand("aggregate", "Label queries with a mechanism");
  agg->add_option("--votes", aggregate.votes, "Vote histogram CSV")->required();
  AddMechanismOptions(agg, aggregate.mech);
  agg->add_option("--seed", aggregate.seed, "Root seed")->envname("PATE_SEED");
  agg->add_option("--out", aggregate.out, "Output CSV (default stdout)");

  AnalyzeFlags analyze;
  CLI::App* ana = app.add_subcommand("analyze", "Data-dependent RDP accounting");
  ana->add_option("--votes", analyze.votes, "Vote histogram CSV")->required();
  AddMechanismOptions(ana, analyze.mech);
  ana->add_option("--outcomes", analyze.outcomes,
                  "Realized outcomes CSV from aggregate");
  ana->add_option("--delta", analyze.delta, "Target delta");
  ana->add_option("--orders", analyze.orders, "Comma-separated Renyi orders");
  ana->add_option("--out", analyze.out, "Output JSON (default stdout)");

  SmoothSensFlags smooth;
  CLI::App* ss = app.add_subcommand("smooth-sens",
                                    "Smooth sensitivity of the privacy cost");
  ss->add_option("--votes", smooth.votes, "Vote histogram CSV")->required();
  ss->add_option("--sigma", smooth.sigma, "GNMax noise")->required();
  ss->add_option("--order", smooth.order, "Renyi order")->required();
  ss->add_option("--beta", smooth.beta, "Smoothness (default 0.4/order)");
  ss->add_option("--out", smooth.out, "Output JSON (default stdout)");

  SanitizeFlags sanitize;
  CLI::App* san = app.add_subcommand("sanitize",
                                     "Publish an analyze report's cost via GNSS");
  san->add_option("--report", sanitize.report, "JSON from analyze")->required();
  san->add_option("--order", sanitize.order,
                  "Renyi order to release at (default: the report's dp.order)");
  san->add_option("--beta", sanitize.beta, "Smoothness (default 0.4/order)");
  san->add_option("--sigma-ss", sanitize.sigma_ss,
                  "GNSS noise multiplier (default 3 sqrt((order+1)/eps))");
  san->add_option("--seed", sanitize.seed, "Seed")->envname("PATE_SEED");
  san->add_option("--out", sanitize.out, "Output JSON (default stdout)");

  SimulateFlags simulate;
  CLI::App* sim = app.add_subcommand("simulate", "Synthetic privacy/utility sweep");
  sim->add_option("--preset", simulate.preset, "Ensemble model")
      ->check(CLI::IsMember({"glyph-like", "mnist-like", "custom"}));
  sim->add_option("--model", simulate.model, "Model JSON for --preset custom");
  sim->add_option("--queries", simulate.queries, "Queries per cell");
  sim->add_option("--seed", simulate.seed, "Root seed")->envname("PATE_SEED");
  sim->add_option("--grid", simulate.grid, "Sweep grid JSON");
  sim->add_option("--out", simulate.out, "Output CSV (default stdout)");
  sim->add_option("--votes-out", simulate.votes_out,
                  "Also write the generated votes as CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInvalidInput;
  }

  absl::Status status;
  bool refused = false;
  try {
    if (agg->parsed()) {
      status = RunAggregate(aggregate, out);
    } else if (ana->parsed()) {
      status = RunAnalyze(analyze, out);
    } else if (ss->parsed()) {
      status = RunSmoothSens(smooth, out, refused);
    } else if (san->parsed()) {
      status = RunSanitize(sanitize, out, refused);
    } else if (sim->parsed()) {
      status = RunSimulate(simulate, out);
    }
  } catch (const std::exception& e) {
    status = absl::InternalError(e.what());
  }
  if (!status.ok()) {
    err << "pate: " << status.message() << "\n";
    return ExitCodeFor(status);
  }
  if (refused) {
    err << "pate: smooth sensitivity release refused\n";
    return kExitRefused;
  }
  return kExitOk;
}

int Run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const std::string& a : args) argv.push_back(a.c_str());
  return Run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace pate::tools
