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

#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "eracl/corpus.h"
#include "eracl/error.h"
#include "testing/fixtures.h"

namespace eracl {
namespace {

using testing::kTinyDocRed;

RawDocument SixTokenDoc() {
  RawDocument doc;
  doc.title = "six";
  doc.sentences = {{"a", "b", "c", "d", "e", "f"}};
  return doc;
}

TEST(LoadDocRed, ParsesHandcraftedRecord) {
  const Corpus corpus = ParseDocRed(kTinyDocRed);
  ASSERT_EQ(corpus.documents.size(), 1u);
  const RawDocument& doc = corpus.documents[0];
  EXPECT_EQ(doc.title, "Tiny");
  EXPECT_EQ(doc.sentences.size(), 2u);
  ASSERT_EQ(doc.entities.size(), 2u);
  EXPECT_EQ(doc.entities[1].mentions.size(), 2u);
  EXPECT_EQ(doc.entities[1].type, "ORG");
  ASSERT_EQ(doc.labels.size(), 1u);
  EXPECT_EQ(doc.labels[0].relations, std::vector<std::string>{"P112"});
  EXPECT_EQ(RelationFrequencies(corpus), (FrequencyMap{{"P112", 1}}));
}

TEST(LoadDocRed, EmptyListIsEmptyCorpus) {
  const Corpus corpus = ParseDocRed("[]");
  EXPECT_TRUE(corpus.documents.empty());
  EXPECT_TRUE(RelationFrequencies(corpus).empty());
  EXPECT_EQ(RelationScheme::FromCorpus(corpus).size(), 0);
}

TEST(LoadDocRed, MalformedJsonNamesRecordIndex) {
  const std::string text =
      std::string(R"([{"title": "ok", "sents": [["x"]], "vertexSet": []},)") +
      R"( {"title": "bad", "sents": [["y"]] "vertexSet": []}])";
  try {
    ParseDocRed(text);
    FAIL() << "expected a parse error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kParse);
    EXPECT_NE(std::string(e.what()).find("record 1"), std::string::npos)
        << e.what();
  }
}

TEST(LoadDocRed, OutOfRangeMentionNamesTitle) {
  const std::string text = R"([{"title": "Broken Doc", "sents": [["x", "y"]],
    "vertexSet": [[{"name": "x", "sent_id": 0, "pos": [1, 5], "type": "T"}]],
    "labels": []}])";
  try {
    ParseDocRed(text);
    FAIL() << "expected a validation error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kValidation);
    EXPECT_NE(std::string(e.what()).find("Broken Doc"), std::string::npos);
  }
}

TEST(LoadDocRed, LabelsWithSameEntityAreRejected) {
  const std::string text = R"([{"title": "Self", "sents": [["x", "y"]],
    "vertexSet": [[{"name": "x", "sent_id": 0, "pos": [0, 1], "type": "T"}]],
    "labels": [{"h": 0, "t": 0, "r": "P1", "evidence": []}]}])";
  EXPECT_THROW(ParseDocRed(text), Error);
}

TEST(LoadDocRed, SerializeRoundTrips) {
  const Corpus corpus = ParseDocRed(kTinyDocRed);
  const Corpus again = ParseDocRed(SerializeDocRed(corpus));
  EXPECT_EQ(SerializeDocRed(again), SerializeDocRed(corpus));
}

TEST(InsertMarkers, NoMentionsLeavesTokensUnchanged) {
  const RawDocument doc = SixTokenDoc();
  const Vocabulary vocab = Vocabulary::Build(Corpus{{doc}});
  const MarkedDocument marked = InsertMarkers(doc, vocab, 64);
  EXPECT_EQ(marked.token_ids, FlattenTokens(doc, vocab));
  EXPECT_TRUE(marked.entity_markers.empty());
}

TEST(InsertMarkers, SingleMentionOffsets) {
  RawDocument doc = SixTokenDoc();
  doc.entities.push_back({{{0, 2, 4, "c d"}}, "T"});
  const Vocabulary vocab = Vocabulary::Build(Corpus{{doc}});
  const MarkedDocument marked = InsertMarkers(doc, vocab, 64);
  EXPECT_EQ(marked.length(), 8);
  ASSERT_EQ(marked.entity_markers.size(), 1u);
  EXPECT_EQ(marked.entity_markers[0], std::vector<int>{2});
  EXPECT_EQ(marked.entity_end_markers[0], std::vector<int>{5});
  EXPECT_EQ(marked.token_ids[2], Vocabulary::kMarker);
  EXPECT_EQ(marked.token_ids[5], Vocabulary::kMarker);
}

TEST(InsertMarkers, AdjacentMentionsRoundTripSurfaces) {
  RawDocument doc = SixTokenDoc();
  doc.entities.push_back({{{0, 1, 3, "b c"}}, "T"});
  doc.entities.push_back({{{0, 3, 4, "d"}}, "T"});
  const Vocabulary vocab = Vocabulary::Build(Corpus{{doc}});
  const MarkedDocument marked = InsertMarkers(doc, vocab, 64);
  int markers = 0;
  for (int id : marked.token_ids) markers += id == Vocabulary::kMarker;
  EXPECT_EQ(markers, 4);
  for (size_t e = 0; e < doc.entities.size(); ++e) {
    const int start = marked.entity_markers[e][0];
    const int end = marked.entity_end_markers[e][0];
    std::string surface;
    for (int p = start + 1; p < end; ++p) {
      if (!surface.empty()) surface += ' ';
      surface += vocab.Token(marked.token_ids[p]);
    }
    EXPECT_EQ(surface, doc.entities[e].mentions[0].surface);
  }
}

TEST(InsertMarkers, RejectsOverlapAndOverflow) {
  RawDocument doc = SixTokenDoc();
  doc.entities.push_back({{{0, 1, 3, "b c"}}, "T"});
  doc.entities.push_back({{{0, 2, 4, "c d"}}, "T"});
  const Vocabulary vocab = Vocabulary::Build(Corpus{{doc}});
  EXPECT_THROW(InsertMarkers(doc, vocab, 64), Error);

  doc.entities.pop_back();
  try {
    InsertMarkers(doc, vocab, 7);
    FAIL() << "expected a length error";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("six"), std::string::npos);
  }
}

TEST(InsertMarkers, StripRestoresFlattenedTokens) {
  const Corpus corpus = GenerateSynthetic(testing::SmallSpec(), 5);
  const Vocabulary vocab = Vocabulary::Build(corpus);
  for (const auto& doc : corpus.documents) {
    const MarkedDocument marked = InsertMarkers(doc, vocab, 512);
    EXPECT_EQ(StripMarkers(marked), FlattenTokens(doc, vocab));
    for (const auto& starts : marked.entity_markers) {
      for (int p : starts) EXPECT_EQ(marked.token_ids[p], Vocabulary::kMarker);
    }
  }
}

TEST(RelationFrequencies, CountsTriples) {
  EXPECT_TRUE(RelationFrequencies(Corpus{}).empty());
  Corpus corpus = ParseDocRed(kTinyDocRed);
  corpus.documents.push_back(corpus.documents[0]);
  EXPECT_EQ(RelationFrequencies(corpus), (FrequencyMap{{"P112", 2}}));
}

TEST(RelationFrequencies, SumEqualsTripleCount) {
  for (uint64_t seed : {1, 2, 3}) {
    SynthSpec spec = testing::SmallSpec(30, 6);
    spec.multi_label_rate = 0.3;
    const Corpus corpus = GenerateSynthetic(spec, seed);
    int64_t sum = 0;
    for (const auto& [r, n] : RelationFrequencies(corpus)) sum += n;
    EXPECT_EQ(static_cast<size_t>(sum), corpus.NumTriples());
  }
}

TEST(SelectAugmentSet, ThresholdPolicy) {
  const FrequencyMap freqs{{"a", 10}, {"b", 150}, {"c", 600}};
  EXPECT_TRUE(SelectAugmentSet(freqs, 0).empty());
  EXPECT_EQ(SelectAugmentSet(freqs, 200), (std::set<std::string>{"a", "b"}));
}

TEST(SelectAugmentSet, MonotoneInThreshold) {
  const FrequencyMap freqs{{"a", 3}, {"b", 7}, {"c", 7}, {"d", 50}, {"e", 0}};
  for (int64_t t1 = 0; t1 < 60; t1 += 3) {
    for (int64_t t2 = t1; t2 < 60; t2 += 5) {
      const auto s1 = SelectAugmentSet(freqs, t1);
      const auto s2 = SelectAugmentSet(freqs, t2);
      EXPECT_TRUE(std::includes(s2.begin(), s2.end(), s1.begin(), s1.end()));
    }
  }
}

TEST(GenerateSynthetic, EmptyAndInvalidSpecs) {
  SynthSpec spec;
  spec.num_documents = 0;
  EXPECT_TRUE(GenerateSynthetic(spec, 1).documents.empty());
  spec.num_relations = 0;
  EXPECT_THROW(GenerateSynthetic(spec, 1), Error);
}

TEST(GenerateSynthetic, DeterministicForSeed) {
  SynthSpec spec;
  const std::string a = SerializeDocRed(GenerateSynthetic(spec, 7));
  const std::string b = SerializeDocRed(GenerateSynthetic(spec, 7));
  EXPECT_EQ(a, b);
  EXPECT_NE(a, SerializeDocRed(GenerateSynthetic(spec, 8)));
}

TEST(GenerateSynthetic, ZipfHeadOutnumbersTail) {
  SynthSpec spec;
  for (uint64_t seed : {1, 7, 11}) {
    const Corpus corpus = GenerateSynthetic(spec, seed);
    const auto freqs = SchemeFrequencies(corpus, SyntheticScheme(8));
    const int64_t most = *std::max_element(freqs.begin(), freqs.end());
    const int64_t least = *std::min_element(freqs.begin(), freqs.end());
    EXPECT_GE(most, 4 * least) << "seed " << seed;
  }
}

TEST(GenerateSynthetic, DocumentsValidate) {
  const Corpus corpus = GenerateSynthetic(SynthSpec{}, 3);
  for (const auto& doc : corpus.documents) {
    EXPECT_NO_THROW(ValidateDocument(doc));
    std::set<std::pair<int, int>> pairs;
    for (const auto& l : doc.labels) {
      EXPECT_TRUE(pairs.insert({l.head, l.tail}).second);
      EXPECT_FALSE(pairs.count({l.tail, l.head}));
    }
  }
}

TEST(RelationScheme, JsonRoundTrip) {
  const RelationScheme scheme = SyntheticScheme(3);
  const RelationScheme again = RelationScheme::FromJson(scheme.ToJson());
  EXPECT_EQ(again.ids(), scheme.ids());
  EXPECT_EQ(again.name(2), scheme.name(2));
  EXPECT_EQ(again.IndexOf("R1"), 1);
  EXPECT_EQ(again.IndexOf("nope"), -1);
}

TEST(UnlabeledPairs, ExcludesLabelledAndSelfPairs) {
  const Corpus corpus = ParseDocRed(kTinyDocRed);
  const auto pairs = UnlabeledPairs(corpus.documents[0]);
  ASSERT_EQ(pairs.size(), 1u);
  EXPECT_EQ(pairs[0], std::make_pair(1, 0));
}

}  // namespace
}  // namespace eracl
