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

// Document-level relation extraction corpora: DocRED-schema ingestion and
// emission, entity-marker insertion, relation statistics and a synthetic
// long-tailed corpus generator.

#ifndef ERACL_CORPUS_H_
#define ERACL_CORPUS_H_

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace eracl {

struct Mention {
  int sentence_index = 0;
  int start = 0;  // inclusive token offset within the sentence
  int end = 0;    // exclusive
  std::string surface;
};

struct Entity {
  std::vector<Mention> mentions;
  std::string type;
};

// Relations are kept as the corpus' relation-id strings (e.g. "P17"), sorted
// and unique. An empty set only arises for generated negative pairs.
struct LabeledPair {
  int head = 0;
  int tail = 0;
  std::vector<std::string> relations;
};

struct RawDocument {
  std::string title;
  std::vector<std::vector<std::string>> sentences;
  std::vector<Entity> entities;
  std::vector<LabeledPair> labels;

  int NumTokens() const;
};

struct Corpus {
  std::vector<RawDocument> documents;

  size_t NumTriples() const;
};

// Throws Error(kValidation) naming the document title.
void ValidateDocument(const RawDocument& doc);

// Parses a JSON array of DocRED records. Syntax and schema errors report the
// offending record index; invariant violations report the document title.
Corpus ParseDocRed(std::string_view json_text);
Corpus LoadDocRed(const std::string& path);
// Canonical DocRED-schema JSON (one record per line inside the array).
std::string SerializeDocRed(const Corpus& corpus);
void SaveDocRed(const Corpus& corpus, const std::string& path);

// The relation inventory R. The threshold class is not part of it.
class RelationScheme {
 public:
  RelationScheme() = default;
  RelationScheme(std::vector<std::string> ids, std::vector<std::string> names);

  // Sorted relation ids observed in the corpus; names default to the ids.
  static RelationScheme FromCorpus(const Corpus& corpus);
  // JSON object of relation id -> readable name.
  static RelationScheme FromJson(std::string_view json_text);
  static RelationScheme Load(const std::string& path);
  std::string ToJson() const;

  int size() const { return static_cast<int>(ids_.size()); }
  const std::vector<std::string>& ids() const { return ids_; }
  const std::string& id(int index) const { return ids_[index]; }
  const std::string& name(int index) const { return names_[index]; }
  // -1 when unknown.
  int IndexOf(const std::string& id) const;
  bool Contains(const std::string& id) const { return IndexOf(id) >= 0; }

 private:
  std::vector<std::string> ids_;
  std::vector<std::string> names_;
  std::unordered_map<std::string, int> index_;
};

class Vocabulary {
 public:
  static constexpr int kPad = 0;
  static constexpr int kUnk = 1;
  // The single reserved entity-marker id.
  static constexpr int kMarker = 2;

  Vocabulary();
  explicit Vocabulary(std::vector<std::string> tokens);

  // Tokens seen at least `min_count` times, ordered by first occurrence.
  static Vocabulary Build(const Corpus& corpus, int min_count = 1);

  int size() const { return static_cast<int>(tokens_.size()); }
  int Id(const std::string& token) const;
  const std::string& Token(int id) const { return tokens_[id]; }
  const std::vector<std::string>& tokens() const { return tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> index_;
};

struct MarkedDocument {
  std::string title;
  std::vector<int> token_ids;
  // For every entity, the position of the start marker of each mention.
  std::vector<std::vector<int>> entity_markers;
  // For every entity, the position of the end marker of each mention.
  std::vector<std::vector<int>> entity_end_markers;

  int length() const { return static_cast<int>(token_ids.size()); }
};

// Flattens sentences and wraps every mention in marker tokens. Overlapping
// mentions and results longer than `max_length` are rejected.
MarkedDocument InsertMarkers(const RawDocument& doc, const Vocabulary& vocab,
                             int max_length);
// Inverse of marker insertion on ids; used to assert the round trip.
std::vector<int> StripMarkers(const MarkedDocument& doc);
std::vector<int> FlattenTokens(const RawDocument& doc,
                               const Vocabulary& vocab);

using FrequencyMap = std::map<std::string, int64_t>;

// Counts labelled (h, r, t) triples per relation id.
FrequencyMap RelationFrequencies(const Corpus& corpus);
// Frequencies for every scheme relation, zeros included, in scheme order.
std::vector<int64_t> SchemeFrequencies(const Corpus& corpus,
                                       const RelationScheme& scheme);
// {r : freq(r) < threshold}.
std::set<std::string> SelectAugmentSet(const FrequencyMap& freqs,
                                       int64_t threshold);

// Ordered pairs (h, t), h != t, that carry no label in the document.
std::vector<std::pair<int, int>> UnlabeledPairs(const RawDocument& doc);

struct SynthSpec {
  int num_documents = 200;
  int num_relations = 8;
  double zipf_exponent = 1.2;
  int entities_per_document = 5;
  int labels_per_document = 3;
  // Filler-word vocabulary size.
  int vocab_size = 200;
  int entity_names = 60;
  int filler_min = 1;
  int filler_max = 4;
  // Probability that a filler sentence carries a free-floating trigger word.
  double distractor_rate = 0.3;
  // Probability that a labelled pair gets a second relation.
  double multi_label_rate = 0.05;
  // Probability that a labelled pair's relation is replaced by a random one
  // (label noise, for distant-supervision stand-ins).
  double label_noise = 0.0;
};

// Deterministic per (spec, seed); every document draws from its own
// seed-derived stream. Throws Error(kUsage) for zero relations.
Corpus GenerateSynthetic(const SynthSpec& spec, uint64_t seed);
// "R0".."R{n-1}" with readable names.
RelationScheme SyntheticScheme(int num_relations);

// Splits documents into (first, second) with `first_fraction` of them,
// preserving order.
std::pair<Corpus, Corpus> SplitCorpus(const Corpus& corpus,
                                      double first_fraction);

}  // namespace eracl

#endif  // ERACL_CORPUS_H_
