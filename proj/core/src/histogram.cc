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

#include "pate/histogram.h"

#include <algorithm>
#include <numeric>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"

namespace pate {

absl::StatusOr<VoteHistogram> VoteHistogram::Create(
    std::vector<int64_t> counts) {
  if (counts.size() < 2) {
    return absl::InvalidArgumentError(
        absl::StrCat("a vote histogram needs at least 2 classes, got ",
                     counts.size()));
  }
  int64_t total = 0;
  for (size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] < 0) {
      return absl::InvalidArgumentError(
          absl::StrCat("vote count for class ", i, " is negative: ",
                       counts[i]));
    }
    total += counts[i];
  }
  if (total < 1) {
    return absl::InvalidArgumentError("a vote histogram needs at least 1 vote");
  }
  return VoteHistogram(std::move(counts), total);
}

int VoteHistogram::ArgMax() const {
  return static_cast<int>(std::max_element(counts_.begin(), counts_.end()) -
                          counts_.begin());
}

std::vector<int64_t> VoteHistogram::SortedDescending() const {
  std::vector<int64_t> sorted(counts_.begin(), counts_.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  return sorted;
}

std::vector<int> DescendingOrder(std::span<const int64_t> counts) {
  std::vector<int> order(counts.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return counts[a] > counts[b]; });
  return order;
}

int64_t MoveDistance(std::span<const int64_t> a, std::span<const int64_t> b) {
  int64_t up = 0;
  int64_t down = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i] > b[i]) {
      down += a[i] - b[i];
    } else {
      up += b[i] - a[i];
    }
  }
  return std::max(up, down);
}

absl::StatusOr<int64_t> Distance(const VoteHistogram& a,
                                 const VoteHistogram& b) {
  if (a.num_classes() != b.num_classes()) {
    return absl::InvalidArgumentError(
        absl::StrCat("class count mismatch: ", a.num_classes(), " vs ",
                     b.num_classes()));
  }
  return MoveDistance(a.counts(), b.counts());
}

std::vector<int64_t> PrefixSums(std::span<const int64_t> counts) {
  std::vector<int64_t> sorted(counts.begin(), counts.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  std::vector<int64_t> sums;
  sums.reserve(sorted.size() > 0 ? sorted.size() - 1 : 0);
  int64_t running = 0;
  for (size_t j = 1; j < sorted.size(); ++j) {
    running += sorted[0] - sorted[j];
    sums.push_back(running);
  }
  return sums;
}

std::vector<int64_t> PrefixSums(const VoteHistogram& h) {
  return PrefixSums(h.counts());
}

bool DominatesCounts(std::span<const int64_t> a, std::span<const int64_t> b) {
  const std::vector<int64_t> sa = PrefixSums(a);
  const std::vector<int64_t> sb = PrefixSums(b);
  for (size_t i = 0; i < sa.size(); ++i) {
    if (sa[i] < sb[i]) return false;
  }
  return true;
}

absl::StatusOr<bool> Dominates(const VoteHistogram& a, const VoteHistogram& b) {
  if (a.num_classes() != b.num_classes()) {
    return absl::InvalidArgumentError(
        absl::StrCat("class count mismatch: ", a.num_classes(), " vs ",
                     b.num_classes()));
  }
  return DominatesCounts(a.counts(), b.counts());
}

}  // namespace pate
