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

#include "eracl/metrics.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "eracl/error.h"
#include "eracl/random.h"
#include "json.hpp"

namespace eracl {

Prf MakePrf(int64_t correct, int64_t predicted, int64_t gold) {
  Prf p;
  p.correct = correct;
  p.predicted = predicted;
  p.gold = gold;
  p.precision = predicted > 0 ? static_cast<double>(correct) / predicted : 0.0;
  p.recall = gold > 0 ? static_cast<double>(correct) / gold : 0.0;
  p.f1 = p.precision + p.recall > 0.0
             ? 2.0 * p.precision * p.recall / (p.precision + p.recall)
             : 0.0;
  return p;
}

Prf MicroPrf(const PredictionSet& pred, const PredictionSet& gold) {
  int64_t correct = 0;
  for (const Fact& f : pred) correct += gold.count(f);
  return MakePrf(correct, static_cast<int64_t>(pred.size()),
                 static_cast<int64_t>(gold.size()));
}

double MicroF1(const PredictionSet& pred, const PredictionSet& gold) {
  return MicroPrf(pred, gold).f1;
}

TrainFacts::TrainFacts(const Corpus& train) {
  for (const auto& doc : train.documents) {
    for (const auto& pair : doc.labels) {
      for (const auto& hm : doc.entities[pair.head].mentions) {
        for (const auto& tm : doc.entities[pair.tail].mentions) {
          for (const auto& r : pair.relations) Add(hm.surface, r, tm.surface);
        }
      }
    }
  }
}

void TrainFacts::Add(const std::string& head, const std::string& relation,
                     const std::string& tail) {
  facts_.emplace(head, relation, tail);
}

bool TrainFacts::Contains(const std::string& head, const std::string& relation,
                          const std::string& tail) const {
  return facts_.count({head, relation, tail}) > 0;
}

bool TrainFacts::Contains(const Fact& fact, const Corpus& eval,
                          const RelationScheme& scheme) const {
  const RawDocument& doc = eval.documents.at(fact.doc);
  const std::string& r = scheme.id(fact.relation);
  for (const auto& hm : doc.entities.at(fact.head).mentions) {
    for (const auto& tm : doc.entities.at(fact.tail).mentions) {
      if (Contains(hm.surface, r, tm.surface)) return true;
    }
  }
  return false;
}

double IgnF1(const PredictionSet& pred, const PredictionSet& gold,
             const std::function<bool(const Fact&)>& in_train) {
  int64_t correct = 0;
  int64_t correct_shared = 0;
  for (const Fact& f : pred) {
    if (!gold.count(f)) continue;
    ++correct;
    if (in_train && in_train(f)) ++correct_shared;
  }
  const int64_t pred_denominator =
      static_cast<int64_t>(pred.size()) - correct_shared;
  return MakePrf(correct - correct_shared, pred_denominator,
                 static_cast<int64_t>(gold.size()))
      .f1;
}

std::vector<RelationPrf> PerRelationPrf(const PredictionSet& pred,
                                        const PredictionSet& gold,
                                        int num_relations) {
  std::vector<int64_t> correct(num_relations, 0), npred(num_relations, 0),
      ngold(num_relations, 0);
  for (const Fact& f : pred) {
    Check(f.relation >= 0 && f.relation < num_relations,
          "prediction relation out of range");
    ++npred[f.relation];
    if (gold.count(f)) ++correct[f.relation];
  }
  for (const Fact& f : gold) {
    Check(f.relation >= 0 && f.relation < num_relations,
          "gold relation out of range");
    ++ngold[f.relation];
  }
  std::vector<RelationPrf> out(num_relations);
  for (int r = 0; r < num_relations; ++r) {
    out[r].prf = MakePrf(correct[r], npred[r], ngold[r]);
    if (npred[r] > 0 || ngold[r] > 0) out[r].f1 = out[r].prf.f1;
  }
  return out;
}

namespace {

std::optional<double> MeanOf(std::span<const std::optional<double>> f1,
                             const std::vector<int>& relations,
                             UndefinedF1Policy policy) {
  double sum = 0.0;
  int count = 0;
  for (int r : relations) {
    if (f1[r].has_value()) {
      sum += *f1[r];
      ++count;
    } else if (policy == UndefinedF1Policy::kAsZero) {
      ++count;
    }
  }
  if (count == 0) return std::nullopt;
  return sum / count;
}

}  // namespace

std::optional<double> MacroF1(std::span<const std::optional<double>> f1,
                              UndefinedF1Policy policy) {
  std::vector<int> all(f1.size());
  std::iota(all.begin(), all.end(), 0);
  return MeanOf(f1, all, policy);
}

std::optional<double> MacroAt(std::span<const std::optional<double>> f1,
                              std::span<const int64_t> train_freqs,
                              int64_t threshold, UndefinedF1Policy policy) {
  Check(threshold > 0, "Macro@N threshold must be positive", ErrorKind::kUsage);
  Check(f1.size() == train_freqs.size(), "frequency table size mismatch");
  std::vector<int> selected;
  for (size_t r = 0; r < f1.size(); ++r) {
    if (train_freqs[r] < threshold) selected.push_back(static_cast<int>(r));
  }
  return MeanOf(f1, selected, policy);
}

std::optional<double> MacroOver(std::span<const std::optional<double>> f1,
                                std::span<const int> relations,
                                UndefinedF1Policy policy) {
  return MeanOf(f1, std::vector<int>(relations.begin(), relations.end()),
                policy);
}

std::vector<int> ClusterSizes(int n, int clusters) {
  Check(clusters > 0 && n >= clusters, "need at least one item per cluster",
        ErrorKind::kValidation);
  std::vector<int> sizes(clusters, n / clusters);
  for (int i = 0; i < n % clusters; ++i) ++sizes[i];
  return sizes;
}

std::vector<std::optional<double>> ClusterF1(
    std::span<const std::optional<double>> f1,
    std::span<const int64_t> train_freqs, UndefinedF1Policy policy) {
  const int n = static_cast<int>(f1.size());
  Check(static_cast<size_t>(n) == train_freqs.size(),
        "frequency table size mismatch");
  Check(n >= kNumClusters, "cluster F1 needs at least 10 relations",
        ErrorKind::kValidation);
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return train_freqs[a] > train_freqs[b];
  });
  std::vector<std::optional<double>> out;
  size_t offset = 0;
  for (int size : ClusterSizes(n)) {
    std::vector<int> members(order.begin() + offset,
                             order.begin() + offset + size);
    out.push_back(MeanOf(f1, members, policy));
    offset += size;
  }
  return out;
}

Corpus Subsample(const Corpus& corpus, double fraction, uint64_t seed) {
  Check(fraction > 0.0 && fraction <= 1.0, "fraction must be in (0, 1]",
        ErrorKind::kUsage);
  const size_t n = corpus.documents.size();
  const size_t k = static_cast<size_t>(std::llround(fraction * static_cast<double>(n)));
  std::vector<size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  Rng rng(DeriveSeed(seed, {0x5AB5ULL}));
  rng.Shuffle(idx);
  idx.resize(std::min(k, n));
  std::sort(idx.begin(), idx.end());
  Corpus out;
  out.documents.reserve(idx.size());
  for (size_t i : idx) out.documents.push_back(corpus.documents[i]);
  return out;
}

namespace {

nlohmann::json OptionalJson(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

std::string OptionalCsv(const std::optional<double>& v) {
  if (!v) return "";
  std::ostringstream ss;
  ss.precision(17);
  ss << *v;
  return ss.str();
}

}  // namespace

std::string MetricReport::ToJson(const RelationScheme& scheme) const {
  nlohmann::json j;
  j["micro_f1"] = micro.f1;
  j["precision"] = micro.precision;
  j["recall"] = micro.recall;
  j["ign_f1"] = ign_f1;
  j["macro"] = OptionalJson(macro);
  j["macro_500"] = OptionalJson(macro_500);
  j["macro_200"] = OptionalJson(macro_200);
  j["macro_100"] = OptionalJson(macro_100);
  nlohmann::json rel = nlohmann::json::array();
  for (size_t r = 0; r < per_relation.size(); ++r) {
    const auto& p = per_relation[r];
    rel.push_back({{"relation", scheme.id(static_cast<int>(r))},
                   {"precision", p.prf.precision},
                   {"recall", p.prf.recall},
                   {"f1", OptionalJson(p.f1)},
                   {"gold", p.prf.gold},
                   {"predicted", p.prf.predicted},
                   {"correct", p.prf.correct}});
  }
  j["per_relation"] = std::move(rel);
  nlohmann::json clusters = nlohmann::json::array();
  for (const auto& c : cluster_f1) clusters.push_back(OptionalJson(c));
  j["cluster_f1"] = std::move(clusters);
  return j.dump(2) + "\n";
}

std::string MetricReport::PerRelationCsv(const RelationScheme& scheme) const {
  std::ostringstream ss;
  ss.precision(17);
  ss << "relation,gold,predicted,correct,precision,recall,f1\n";
  for (size_t r = 0; r < per_relation.size(); ++r) {
    const auto& p = per_relation[r];
    ss << scheme.id(static_cast<int>(r)) << ',' << p.prf.gold << ','
       << p.prf.predicted << ',' << p.prf.correct << ',' << p.prf.precision
       << ',' << p.prf.recall << ',' << OptionalCsv(p.f1) << '\n';
  }
  return ss.str();
}

std::string MetricReport::ClusterCsv() const {
  std::ostringstream ss;
  ss << "cluster,f1\n";
  for (size_t i = 0; i < cluster_f1.size(); ++i) {
    ss << i << ',' << OptionalCsv(cluster_f1[i]) << '\n';
  }
  return ss.str();
}

MetricReport BuildReport(const PredictionSet& pred, const PredictionSet& gold,
                         const std::function<bool(const Fact&)>& in_train,
                         std::span<const int64_t> train_freqs,
                         int num_relations, UndefinedF1Policy policy) {
  Check(train_freqs.size() == static_cast<size_t>(num_relations),
        "frequency table size mismatch");
  MetricReport report;
  report.micro = MicroPrf(pred, gold);
  report.ign_f1 = IgnF1(pred, gold, in_train);
  report.per_relation = PerRelationPrf(pred, gold, num_relations);
  std::vector<std::optional<double>> f1;
  for (const auto& r : report.per_relation) f1.push_back(r.f1);
  report.macro = MacroF1(f1, policy);
  report.macro_500 = MacroAt(f1, train_freqs, 500, policy);
  report.macro_200 = MacroAt(f1, train_freqs, 200, policy);
  report.macro_100 = MacroAt(f1, train_freqs, 100, policy);
  if (num_relations >= kNumClusters) {
    report.cluster_f1 = ClusterF1(f1, train_freqs, policy);
  }
  return report;
}

PredictionSet GoldFacts(const Corpus& corpus, const RelationScheme& scheme) {
  PredictionSet gold;
  for (size_t d = 0; d < corpus.documents.size(); ++d) {
    for (const auto& pair : corpus.documents[d].labels) {
      for (const auto& r : pair.relations) {
        const int index = scheme.IndexOf(r);
        if (index >= 0) {
          gold.insert({static_cast<int>(d), pair.head, index, pair.tail});
        }
      }
    }
  }
  return gold;
}

}  // namespace eracl
