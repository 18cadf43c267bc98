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

#include "pate/votes_io.h"

#include <cmath>
#include <fstream>
#include <sstream>

#include "absl/status/status.h"
#include "absl/strings/ascii.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"
#include "absl/strings/string_view.h"

namespace pate {
namespace {

struct RawRow {
  int line_number;
  std::string query_id;
  std::vector<absl::string_view> fields;
};

// Splits `text` into data rows, dropping blank lines and an optional header.
absl::StatusOr<std::vector<RawRow>> SplitRows(std::string_view text) {
  std::vector<RawRow> rows;
  int line_number = 0;
  bool first = true;
  for (absl::string_view line : absl::StrSplit(absl::string_view(text.data(), text.size()), '\n')) {
    ++line_number;
    line = absl::StripAsciiWhitespace(line);
    if (line.empty()) continue;
    std::vector<absl::string_view> fields = absl::StrSplit(line, ',');
    for (auto& f : fields) f = absl::StripAsciiWhitespace(f);
    if (first) {
      first = false;
      bool numeric = fields.size() > 1;
      for (size_t i = 1; i < fields.size(); ++i) {
        double unused;
        numeric = numeric && absl::SimpleAtod(fields[i], &unused);
      }
      if (!numeric) continue;
    }
    if (fields.size() < 3) {
      return absl::InvalidArgumentError(
          absl::StrCat("line ", line_number,
                       ": expected query_id followed by at least 2 class "
                       "columns, got ",
                       fields.size(), " fields"));
    }
    if (fields[0].empty()) {
      return absl::InvalidArgumentError(
          absl::StrCat("line ", line_number, ": empty query_id"));
    }
    RawRow row{line_number, std::string(fields[0]), {}};
    row.fields.assign(fields.begin() + 1, fields.end());
    rows.push_back(std::move(row));
  }
  for (const RawRow& row : rows) {
    if (row.fields.size() != rows.front().fields.size()) {
      return absl::InvalidArgumentError(absl::StrCat(
          "line ", row.line_number, ": expected ", rows.front().fields.size(),
          " class columns (as on line ", rows.front().line_number, "), got ",
          row.fields.size()));
    }
  }
  return rows;
}

}  // namespace

absl::StatusOr<std::string> ReadFileToString(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    return absl::NotFoundError(absl::StrCat("cannot open ", path));
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

absl::StatusOr<std::vector<VoteRecord>> ParseVotesCsv(std::string_view text) {
  absl::StatusOr<std::vector<RawRow>> rows = SplitRows(text);
  if (!rows.ok()) return rows.status();
  std::vector<VoteRecord> records;
  records.reserve(rows->size());
  for (const RawRow& row : *rows) {
    std::vector<int64_t> counts;
    counts.reserve(row.fields.size());
    for (size_t i = 0; i < row.fields.size(); ++i) {
      int64_t value;
      if (!absl::SimpleAtoi(row.fields[i], &value) || value < 0) {
        return absl::InvalidArgumentError(
            absl::StrCat("line ", row.line_number, ": column ", i + 1,
                         " is not a non-negative integer: '", row.fields[i],
                         "'"));
      }
      counts.push_back(value);
    }
    absl::StatusOr<VoteHistogram> h = VoteHistogram::Create(std::move(counts));
    if (!h.ok()) {
      return absl::InvalidArgumentError(
          absl::StrCat("line ", row.line_number, ": ", h.status().message()));
    }
    records.push_back({row.query_id, *std::move(h)});
  }
  return records;
}

absl::StatusOr<std::vector<VoteRecord>> ReadVotesCsv(const std::string& path) {
  absl::StatusOr<std::string> text = ReadFileToString(path);
  if (!text.ok()) return text.status();
  return ParseVotesCsv(*text);
}

absl::StatusOr<std::vector<ProbabilityRecord>> ParseProbabilitiesCsv(
    std::string_view text) {
  absl::StatusOr<std::vector<RawRow>> rows = SplitRows(text);
  if (!rows.ok()) return rows.status();
  std::vector<ProbabilityRecord> records;
  records.reserve(rows->size());
  for (const RawRow& row : *rows) {
    ProbabilityRecord record{row.query_id, {}};
    double sum = 0.0;
    for (size_t i = 0; i < row.fields.size(); ++i) {
      double p;
      if (!absl::SimpleAtod(row.fields[i], &p) || !(p >= 0.0 && p <= 1.0)) {
        return absl::InvalidArgumentError(
            absl::StrCat("line ", row.line_number, ": column ", i + 1,
                         " is not a probability: '", row.fields[i], "'"));
      }
      record.probabilities.push_back(p);
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
      return absl::InvalidArgumentError(absl::StrCat(
          "line ", row.line_number, ": probabilities sum to ", sum));
    }
    records.push_back(std::move(record));
  }
  return records;
}

absl::StatusOr<std::vector<ProbabilityRecord>> ReadProbabilitiesCsv(
    const std::string& path) {
  absl::StatusOr<std::string> text = ReadFileToString(path);
  if (!text.ok()) return text.status();
  return ParseProbabilitiesCsv(*text);
}

std::string FormatVotesCsv(const std::vector<VoteRecord>& records) {
  std::string out = "query_id";
  const int m = records.empty() ? 0 : records.front().histogram.num_classes();
  for (int i = 0; i < m; ++i) absl::StrAppend(&out, ",c_", i);
  out += '\n';
  for (const VoteRecord& r : records) {
    out += r.query_id;
    for (int64_t c : r.histogram.counts()) absl::StrAppend(&out, ",", c);
    out += '\n';
  }
  return out;
}

}  // namespace pate
