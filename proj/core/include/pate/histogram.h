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

#ifndef PATE_HISTOGRAM_H_
#define PATE_HISTOGRAM_H_

#include <cstdint>
#include <span>
#include <vector>

#include "absl/status/statusor.h"

namespace pate {

// Per-class teacher vote counts for a single student query.
//
// Always holds at least two classes and at least one vote. Counts are
// integers; the real-valued relaxation used when reasoning about smooth
// sensitivity never crosses this API.
class VoteHistogram {
 public:
  static absl::StatusOr<VoteHistogram> Create(std::vector<int64_t> counts);

  std::span<const int64_t> counts() const { return counts_; }
  int64_t count(int cls) const { return counts_[cls]; }
  int num_classes() const { return static_cast<int>(counts_.size()); }
  int64_t num_teachers() const { return total_; }

  // Class with the most votes; the lowest index wins ties.
  int ArgMax() const;
  int64_t MaxCount() const { return counts_[ArgMax()]; }

  // Counts sorted in descending order.
  std::vector<int64_t> SortedDescending() const;

  friend bool operator==(const VoteHistogram&, const VoteHistogram&) = default;

 private:
  VoteHistogram(std::vector<int64_t> counts, int64_t total)
      : counts_(std::move(counts)), total_(total) {}

  std::vector<int64_t> counts_;
  int64_t total_;
};

// Class indices ordered by descending count, ties by ascending index.
std::vector<int> DescendingOrder(std::span<const int64_t> counts);

// Smallest number of unit moves turning `a` into `b`:
//   max(sum_{a_i > b_i} (a_i - b_i), sum_{a_i < b_i} (b_i - a_i)).
// Operates on raw count vectors so analysis code can measure distances to
// vectors that are not valid histograms (e.g. all zeros).
int64_t MoveDistance(std::span<const int64_t> a, std::span<const int64_t> b);

absl::StatusOr<int64_t> Distance(const VoteHistogram& a,
                                 const VoteHistogram& b);

// S_2..S_m with S_i = sum_{j <= i} (n^(1) - n^(j)) over the counts sorted in
// descending order. The returned vector has m - 1 entries; entry k holds
// S_{k+2}.
std::vector<int64_t> PrefixSums(std::span<const int64_t> counts);
std::vector<int64_t> PrefixSums(const VoteHistogram& h);

// Dominance partial order: a dominates b iff S_i(a) >= S_i(b) for all i > 1.
bool DominatesCounts(std::span<const int64_t> a, std::span<const int64_t> b);
absl::StatusOr<bool> Dominates(const VoteHistogram& a, const VoteHistogram& b);

}  // namespace pate

#endif  // PATE_HISTOGRAM_H_
