// Copyright 2026 The ERACL Authors
// SPDX-License-Identifier: Apache-2.0
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

// Evaluation for relation extraction: micro F1, Ign F1, macro F1 and its
// frequency-restricted variants, frequency-cluster F1, and document-level
// subsampling for limited-data runs.

#ifndef ERACL_METRICS_H_
#define ERACL_METRICS_H_

#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "eracl/corpus.h"

namespace eracl {

struct Fact {
  int doc = 0;
  int head = 0;
  int relation = 0;
  int tail = 0;
  auto operator<=>(const Fact&) const = default;
};

using PredictionSet = std::set<Fact>;

struct Prf {
  int64_t correct = 0;
  int64_t predicted = 0;
  int64_t gold = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// From counts; zero denominators give zero.
Prf MakePrf(int64_t correct, int64_t predicted, int64_t gold);

Prf MicroPrf(const PredictionSet& pred, const PredictionSet& gold);
double MicroF1(const PredictionSet& pred, const PredictionSet& gold);

// (head name, relation id, tail name) facts of a training corpus, over all
// mention surface combinations.
class TrainFacts {
 public:
  TrainFacts() = default;
  explicit TrainFacts(const Corpus& train);

  void Add(const std::string& head, const std::string& relation,
           const std::string& tail);
  bool Contains(const std::string& head, const std::string& relation,
                const std::string& tail) const;
  // Whether `fact` of `eval` (relation indices in `scheme`) was seen in
  // training under any mention names of its entities.
  bool Contains(const Fact& fact, const Corpus& eval,
                const RelationScheme& scheme) const;
  size_t size() const { return facts_.size(); }

 private:
  std::set<std::tuple<std::string, std::string, std::string>> facts_;
};

// Correct predictions that are shared with training are removed from both
// the numerator and the precision denominator; recall keeps |gold|.
double IgnF1(const PredictionSet& pred, const PredictionSet& gold,
             const std::function<bool(const Fact&)>& in_train);

struct RelationPrf {
  Prf prf;
  // Absent when the relation has neither gold nor predicted instances.
  std::optional<double> f1;
};

std::vector<RelationPrf> PerRelationPrf(const PredictionSet& pred,
                                        const PredictionSet& gold,
                                        int num_relations);

enum class UndefinedF1Policy { kExclude, kAsZero };

// Unweighted mean of the defined per-relation F1 values.
std::optional<double> MacroF1(std::span<const std::optional<double>> f1,
                              UndefinedF1Policy policy = UndefinedF1Policy::kExclude);
// Restricted to relations with train frequency < threshold.
std::optional<double> MacroAt(std::span<const std::optional<double>> f1,
                              std::span<const int64_t> train_freqs,
                              int64_t threshold,
                              UndefinedF1Policy policy = UndefinedF1Policy::kExclude);
// Mean over an explicit relation subset.
std::optional<double> MacroOver(std::span<const std::optional<double>> f1,
                                std::span<const int> relations,
                                UndefinedF1Policy policy = UndefinedF1Policy::kExclude);

inline constexpr int kNumClusters = 10;

// Sizes of `clusters` contiguous groups over n items; earlier groups take
// the remainder, so 96 splits as six tens then four nines.
std::vector<int> ClusterSizes(int n, int clusters = kNumClusters);
// Relations sorted by train frequency descending (ties by index), split per
// ClusterSizes, mean F1 within each cluster.
std::vector<std::optional<double>> ClusterF1(
    std::span<const std::optional<double>> f1,
    std::span<const int64_t> train_freqs,
    UndefinedF1Policy policy = UndefinedF1Policy::kExclude);

// Uniform document subsample of round(fraction * n) documents, kept in
// original order.
Corpus Subsample(const Corpus& corpus, double fraction, uint64_t seed);

struct MetricReport {
  Prf micro;
  double ign_f1 = 0.0;
  std::optional<double> macro, macro_500, macro_200, macro_100;
  std::vector<RelationPrf> per_relation;
  std::vector<std::optional<double>> cluster_f1;  // empty with < 10 relations

  std::string ToJson(const RelationScheme& scheme) const;
  std::string PerRelationCsv(const RelationScheme& scheme) const;
  std::string ClusterCsv() const;
};

MetricReport BuildReport(const PredictionSet& pred, const PredictionSet& gold,
                         const std::function<bool(const Fact&)>& in_train,
                         std::span<const int64_t> train_freqs,
                         int num_relations,
                         UndefinedF1Policy policy = UndefinedF1Policy::kExclude);

// Gold facts of a corpus with relation ids resolved through `scheme`;
// facts with unknown relations are dropped.
PredictionSet GoldFacts(const Corpus& corpus, const RelationScheme& scheme);

}  // namespace eracl

#endif  // ERACL_METRICS_H_
