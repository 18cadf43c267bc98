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

// CSV ingestion for teacher votes and student predictions.
//
// One query per row: `query_id,c_0,c_1,...,c_{m-1}`. A header row is
// optional and is recognized by a non-numeric first field on the first
// non-empty line. Blank lines are ignored. Every row must carry the same
// number of classes.

#ifndef PATE_VOTES_IO_H_
#define PATE_VOTES_IO_H_

#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "pate/histogram.h"

namespace pate {

struct VoteRecord {
  std::string query_id;
  VoteHistogram histogram;
};

struct ProbabilityRecord {
  std::string query_id;
  std::vector<double> probabilities;
};

absl::StatusOr<std::vector<VoteRecord>> ParseVotesCsv(std::string_view text);
absl::StatusOr<std::vector<VoteRecord>> ReadVotesCsv(const std::string& path);

// Student class probabilities, same layout as the vote file. Rows must sum to
// 1 within 1e-9.
absl::StatusOr<std::vector<ProbabilityRecord>> ParseProbabilitiesCsv(
    std::string_view text);
absl::StatusOr<std::vector<ProbabilityRecord>> ReadProbabilitiesCsv(
    const std::string& path);

// Writes a header row followed by one row per record.
std::string FormatVotesCsv(const std::vector<VoteRecord>& records);

absl::StatusOr<std::string> ReadFileToString(const std::string& path);

}  // namespace pate

#endif  // PATE_VOTES_IO_H_
