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

#include "eracl/corpus.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "eracl/error.h"
#include "eracl/random.h"
#include "json.hpp"

namespace eracl {

using json = nlohmann::json;

int RawDocument::NumTokens() const {
  int n = 0;
  for (const auto& s : sentences) n += static_cast<int>(s.size());
  return n;
}

size_t Corpus::NumTriples() const {
  size_t n = 0;
  for (const auto& doc : documents) {
    for (const auto& pair : doc.labels) n += pair.relations.size();
  }
  return n;
}

void ValidateDocument(const RawDocument& doc) {
  auto fail = [&](const std::string& what) {
    throw Error(ErrorKind::kValidation,
                "document '" + doc.title + "': " + what);
  };
  const int num_sentences = static_cast<int>(doc.sentences.size());
  for (size_t e = 0; e < doc.entities.size(); ++e) {
    const Entity& entity = doc.entities[e];
    if (entity.mentions.empty()) {
      fail("entity " + std::to_string(e) + " has no mentions");
    }
    for (const Mention& m : entity.mentions) {
      if (m.sentence_index < 0 || m.sentence_index >= num_sentences) {
        fail("entity " + std::to_string(e) + " mention sentence index " +
             std::to_string(m.sentence_index) + " out of range");
      }
      const int len = static_cast<int>(doc.sentences[m.sentence_index].size());
      if (m.start < 0 || m.end > len || m.start >= m.end) {
        fail("entity " + std::to_string(e) + " mention span [" +
             std::to_string(m.start) + ", " + std::to_string(m.end) +
             ") invalid for sentence of length " + std::to_string(len));
      }
    }
  }
  const int num_entities = static_cast<int>(doc.entities.size());
  for (const LabeledPair& label : doc.labels) {
    if (label.head < 0 || label.head >= num_entities || label.tail < 0 ||
        label.tail >= num_entities) {
      fail("label entity index out of range");
    }
    if (label.head == label.tail) fail("label with head == tail");
  }
}

namespace {

// Counts top-level records so syntax errors can name the failing record.
class RecordLocator : public nlohmann::json_sax<json> {
 public:
  int records() const { return records_; }

  bool null() override { return true; }
  bool boolean(bool) override { return true; }
  bool number_integer(number_integer_t) override { return true; }
  bool number_unsigned(number_unsigned_t) override { return true; }
  bool number_float(number_float_t, const string_t&) override { return true; }
  bool string(string_t&) override { return true; }
  bool binary(binary_t&) override { return true; }
  bool start_object(std::size_t) override { return Open(); }
  bool key(string_t&) override { return true; }
  bool end_object() override { return Close(); }
  bool start_array(std::size_t) override { return Open(); }
  bool end_array() override { return Close(); }
  bool parse_error(std::size_t, const std::string&,
                   const nlohmann::detail::exception&) override {
    return false;
  }

 private:
  bool Open() {
    if (depth_ == 1) ++records_;
    ++depth_;
    return true;
  }
  bool Close() {
    --depth_;
    return true;
  }

  int depth_ = 0;
  int records_ = 0;
};

RawDocument ParseRecord(const json& record, size_t index) {
  auto fail = [&](const std::string& what) {
    throw Error(ErrorKind::kParse,
                "record " + std::to_string(index) + ": " + what);
  };
  if (!record.is_object()) fail("expected an object");
  RawDocument doc;
  try {
    doc.title = record.at("title").get<std::string>();
    for (const auto& sent : record.at("sents")) {
      doc.sentences.push_back(sent.get<std::vector<std::string>>());
    }
    for (const auto& vertex : record.at("vertexSet")) {
      Entity entity;
      for (const auto& m : vertex) {
        Mention mention;
        mention.surface = m.value("name", std::string());
        mention.sentence_index = m.at("sent_id").get<int>();
        const auto& pos = m.at("pos");
        if (!pos.is_array() || pos.size() != 2) fail("pos must be [start, end]");
        mention.start = pos[0].get<int>();
        mention.end = pos[1].get<int>();
        if (entity.type.empty()) entity.type = m.value("type", std::string());
        entity.mentions.push_back(std::move(mention));
      }
      doc.entities.push_back(std::move(entity));
    }
    std::map<std::pair<int, int>, std::set<std::string>> grouped;
    if (record.contains("labels")) {
      for (const auto& label : record.at("labels")) {
        const int h = label.at("h").get<int>();
        const int t = label.at("t").get<int>();
        grouped[{h, t}].insert(label.at("r").get<std::string>());
      }
    }
    for (auto& [ht, rels] : grouped) {
      doc.labels.push_back(
          {ht.first, ht.second, std::vector<std::string>(rels.begin(), rels.end())});
    }
  } catch (const json::exception& e) {
    fail(e.what());
  }
  return doc;
}

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kRuntime, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteFile(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kRuntime, "cannot write " + path);
  out << content;
}

}  // namespace

Corpus ParseDocRed(std::string_view json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    RecordLocator locator;
    json::sax_parse(json_text, &locator);
    const int record = std::max(0, locator.records() - 1);
    throw Error(ErrorKind::kParse, "malformed JSON in record " +
                                       std::to_string(record) + ": " +
                                       e.what());
  }
  if (!root.is_array()) {
    throw Error(ErrorKind::kParse, "DocRED file must be a JSON array");
  }
  Corpus corpus;
  corpus.documents.reserve(root.size());
  for (size_t i = 0; i < root.size(); ++i) {
    corpus.documents.push_back(ParseRecord(root[i], i));
    ValidateDocument(corpus.documents.back());
  }
  return corpus;
}

Corpus LoadDocRed(const std::string& path) { return ParseDocRed(ReadFile(path)); }

std::string SerializeDocRed(const Corpus& corpus) {
  std::string out = "[";
  for (size_t i = 0; i < corpus.documents.size(); ++i) {
    const RawDocument& doc = corpus.documents[i];
    json record;
    record["title"] = doc.title;
    record["sents"] = doc.sentences;
    json vertex_set = json::array();
    for (const Entity& entity : doc.entities) {
      json mentions = json::array();
      for (const Mention& m : entity.mentions) {
        mentions.push_back({{"name", m.surface},
                            {"sent_id", m.sentence_index},
                            {"pos", {m.start, m.end}},
                            {"type", entity.type}});
      }
      vertex_set.push_back(std::move(mentions));
    }
    record["vertexSet"] = std::move(vertex_set);
    json labels = json::array();
    for (const LabeledPair& pair : doc.labels) {
      for (const std::string& r : pair.relations) {
        labels.push_back({{"h", pair.head},
                          {"t", pair.tail},
                          {"r", r},
                          {"evidence", json::array()}});
      }
    }
    record["labels"] = std::move(labels);
    out += (i == 0 ? "\n" : ",\n");
    out += record.dump();
  }
  out += corpus.documents.empty() ? "]\n" : "\n]\n";
  return out;
}

void SaveDocRed(const Corpus& corpus, const std::string& path) {
  WriteFile(path, SerializeDocRed(corpus));
}

RelationScheme::RelationScheme(std::vector<std::string> ids,
                               std::vector<std::string> names)
    : ids_(std::move(ids)), names_(std::move(names)) {
  Check(ids_.size() == names_.size(), "relation ids/names size mismatch",
        ErrorKind::kValidation);
  for (size_t i = 0; i < ids_.size(); ++i) {
    Check(index_.emplace(ids_[i], static_cast<int>(i)).second,
          "duplicate relation id " + ids_[i], ErrorKind::kValidation);
  }
}

RelationScheme RelationScheme::FromCorpus(const Corpus& corpus) {
  std::set<std::string> ids;
  for (const auto& doc : corpus.documents) {
    for (const auto& pair : doc.labels) {
      ids.insert(pair.relations.begin(), pair.relations.end());
    }
  }
  std::vector<std::string> v(ids.begin(), ids.end());
  return RelationScheme(v, v);
}

RelationScheme RelationScheme::FromJson(std::string_view json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::kParse, std::string("relation scheme: ") + e.what());
  }
  Check(root.is_object(), "relation scheme must be a JSON object",
        ErrorKind::kParse);
  std::vector<std::string> ids, names;
  for (auto it = root.begin(); it != root.end(); ++it) {
    ids.push_back(it.key());
    names.push_back(it.value().is_string() ? it.value().get<std::string>()
                                           : it.key());
  }
  return RelationScheme(std::move(ids), std::move(names));
}

RelationScheme RelationScheme::Load(const std::string& path) {
  return FromJson(ReadFile(path));
}

std::string RelationScheme::ToJson() const {
  json root = json::object();
  for (size_t i = 0; i < ids_.size(); ++i) root[ids_[i]] = names_[i];
  return root.dump(2) + "\n";
}

int RelationScheme::IndexOf(const std::string& id) const {
  auto it = index_.find(id);
  return it == index_.end() ? -1 : it->second;
}

Vocabulary::Vocabulary() : Vocabulary(std::vector<std::string>{}) {}

Vocabulary::Vocabulary(std::vector<std::string> tokens) {
  tokens_ = {"[PAD]", "[UNK]", "[MARK]"};
  for (auto& t : tokens) {
    if (t == "[PAD]" || t == "[UNK]" || t == "[MARK]") continue;
    tokens_.push_back(std::move(t));
  }
  for (size_t i = 0; i < tokens_.size(); ++i) {
    index_.emplace(tokens_[i], static_cast<int>(i));
  }
}

Vocabulary Vocabulary::Build(const Corpus& corpus, int min_count) {
  std::unordered_map<std::string, int> counts;
  std::vector<std::string> order;
  for (const auto& doc : corpus.documents) {
    for (const auto& sent : doc.sentences) {
      for (const auto& tok : sent) {
        if (counts[tok]++ == 0) order.push_back(tok);
      }
    }
  }
  std::vector<std::string> kept;
  for (auto& tok : order) {
    if (counts[tok] >= min_count) kept.push_back(std::move(tok));
  }
  return Vocabulary(std::move(kept));
}

int Vocabulary::Id(const std::string& token) const {
  auto it = index_.find(token);
  return it == index_.end() ? kUnk : it->second;
}

std::vector<int> FlattenTokens(const RawDocument& doc,
                               const Vocabulary& vocab) {
  std::vector<int> ids;
  for (const auto& sent : doc.sentences) {
    for (const auto& tok : sent) ids.push_back(vocab.Id(tok));
  }
  return ids;
}

MarkedDocument InsertMarkers(const RawDocument& doc, const Vocabulary& vocab,
                             int max_length) {
  ValidateDocument(doc);
  std::vector<int> offsets(doc.sentences.size() + 1, 0);
  for (size_t s = 0; s < doc.sentences.size(); ++s) {
    offsets[s + 1] = offsets[s] + static_cast<int>(doc.sentences[s].size());
  }
  const int num_tokens = offsets.back();

  // Flattened spans tagged with (entity, mention).
  struct Span {
    int start, end, entity, mention;
  };
  std::vector<Span> spans;
  for (size_t e = 0; e < doc.entities.size(); ++e) {
    const auto& mentions = doc.entities[e].mentions;
    for (size_t m = 0; m < mentions.size(); ++m) {
      const int base = offsets[mentions[m].sentence_index];
      spans.push_back({base + mentions[m].start, base + mentions[m].end,
                       static_cast<int>(e), static_cast<int>(m)});
    }
  }
  std::sort(spans.begin(), spans.end(), [](const Span& a, const Span& b) {
    return a.start != b.start ? a.start < b.start : a.end < b.end;
  });
  for (size_t i = 1; i < spans.size(); ++i) {
    if (spans[i].start < spans[i - 1].end) {
      throw Error(ErrorKind::kValidation,
                  "document '" + doc.title +
                      "': overlapping mention spans at token " +
                      std::to_string(spans[i].start));
    }
  }
  const int length = num_tokens + 2 * static_cast<int>(spans.size());
  if (length > max_length) {
    throw Error(ErrorKind::kValidation,
                "document '" + doc.title + "': marked length " +
                    std::to_string(length) + " exceeds maximum " +
                    std::to_string(max_length));
  }

  MarkedDocument out;
  out.title = doc.title;
  out.token_ids.reserve(length);
  out.entity_markers.resize(doc.entities.size());
  out.entity_end_markers.resize(doc.entities.size());
  for (size_t e = 0; e < doc.entities.size(); ++e) {
    out.entity_markers[e].assign(doc.entities[e].mentions.size(), -1);
    out.entity_end_markers[e].assign(doc.entities[e].mentions.size(), -1);
  }
  const std::vector<int> flat = FlattenTokens(doc, vocab);
  size_t next = 0;
  for (int pos = 0; pos < num_tokens; ++pos) {
    if (next < spans.size() && spans[next].start == pos) {
      out.entity_markers[spans[next].entity][spans[next].mention] =
          static_cast<int>(out.token_ids.size());
      out.token_ids.push_back(Vocabulary::kMarker);
    }
    out.token_ids.push_back(flat[pos]);
    if (next < spans.size() && spans[next].end == pos + 1) {
      out.entity_end_markers[spans[next].entity][spans[next].mention] =
          static_cast<int>(out.token_ids.size());
      out.token_ids.push_back(Vocabulary::kMarker);
      ++next;
    }
  }
  return out;
}

std::vector<int> StripMarkers(const MarkedDocument& doc) {
  std::vector<int> out;
  for (int id : doc.token_ids) {
    if (id != Vocabulary::kMarker) out.push_back(id);
  }
  return out;
}

FrequencyMap RelationFrequencies(const Corpus& corpus) {
  FrequencyMap freqs;
  for (const auto& doc : corpus.documents) {
    for (const auto& pair : doc.labels) {
      for (const auto& r : pair.relations) ++freqs[r];
    }
  }
  return freqs;
}

std::vector<int64_t> SchemeFrequencies(const Corpus& corpus,
                                       const RelationScheme& scheme) {
  std::vector<int64_t> out(scheme.size(), 0);
  for (const auto& [id, count] : RelationFrequencies(corpus)) {
    const int index = scheme.IndexOf(id);
    if (index >= 0) out[index] = count;
  }
  return out;
}

std::set<std::string> SelectAugmentSet(const FrequencyMap& freqs,
                                       int64_t threshold) {
  std::set<std::string> out;
  for (const auto& [id, count] : freqs) {
    if (count < threshold) out.insert(id);
  }
  return out;
}

std::vector<std::pair<int, int>> UnlabeledPairs(const RawDocument& doc) {
  std::set<std::pair<int, int>> labeled;
  for (const auto& pair : doc.labels) labeled.insert({pair.head, pair.tail});
  std::vector<std::pair<int, int>> out;
  const int n = static_cast<int>(doc.entities.size());
  for (int h = 0; h < n; ++h) {
    for (int t = 0; t < n; ++t) {
      if (h != t && !labeled.count({h, t})) out.emplace_back(h, t);
    }
  }
  return out;
}

RelationScheme SyntheticScheme(int num_relations) {
  std::vector<std::string> ids, names;
  for (int r = 0; r < num_relations; ++r) {
    ids.push_back("R" + std::to_string(r));
    names.push_back("synthetic relation " + std::to_string(r));
  }
  return RelationScheme(std::move(ids), std::move(names));
}

namespace {

const char* const kEntityTypes[] = {"PER", "ORG", "LOC", "TIME", "NUM", "MISC"};

// Relation r is expressed by the ordered trigger pair (r_a, r_b) placed
// between the head and tail mention.
std::string TriggerA(int r) { return "ra" + std::to_string(r); }
std::string TriggerB(int r) { return "rb" + std::to_string(r); }

class ZipfSampler {
 public:
  ZipfSampler(int n, double exponent) : cdf_(n) {
    double total = 0.0;
    for (int k = 0; k < n; ++k) {
      total += std::pow(static_cast<double>(k + 1), -exponent);
      cdf_[k] = total;
    }
    for (double& c : cdf_) c /= total;
  }
  int Sample(Rng& rng) const {
    const double u = rng.Uniform();
    auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    return std::min(static_cast<int>(it - cdf_.begin()),
                    static_cast<int>(cdf_.size()) - 1);
  }

 private:
  std::vector<double> cdf_;
};

RawDocument GenerateDocument(const SynthSpec& spec, const ZipfSampler& zipf,
                             int index, Rng& rng) {
  RawDocument doc;
  doc.title = "synthetic-" + std::to_string(index);
  const int num_entities = std::max(2, spec.entities_per_document);

  // Distinct entity names within the document.
  std::vector<int> name_pool(std::max(spec.entity_names, num_entities));
  for (size_t i = 0; i < name_pool.size(); ++i) name_pool[i] = static_cast<int>(i);
  rng.Shuffle(name_pool);
  std::vector<std::string> names(num_entities);
  doc.entities.resize(num_entities);
  for (int e = 0; e < num_entities; ++e) {
    names[e] = "e" + std::to_string(name_pool[e]);
    doc.entities[e].type = kEntityTypes[rng.UniformInt(std::size(kEntityTypes))];
  }

  auto filler = [&](std::vector<std::string>& sent) {
    const int span = std::max(0, spec.filler_max - spec.filler_min) + 1;
    const int count = spec.filler_min + static_cast<int>(rng.UniformInt(span));
    for (int i = 0; i < count; ++i) {
      sent.push_back("w" + std::to_string(rng.UniformInt(spec.vocab_size)));
    }
  };

  // Sentences are built as token lists with mention placeholders; mentions
  // are recorded once sentence order is fixed.
  struct PendingMention {
    int entity, start;
  };
  struct PendingSentence {
    std::vector<std::string> tokens;
    std::vector<PendingMention> mentions;
  };
  std::vector<PendingSentence> pending;
  auto add_mention = [&](PendingSentence& s, int entity) {
    s.mentions.push_back({entity, static_cast<int>(s.tokens.size())});
    s.tokens.push_back(names[entity]);
  };

  // Labelled pairs.
  std::vector<std::pair<int, int>> all_pairs;
  for (int h = 0; h < num_entities; ++h) {
    for (int t = 0; t < num_entities; ++t) {
      if (h != t) all_pairs.emplace_back(h, t);
    }
  }
  rng.Shuffle(all_pairs);
  const int num_labels =
      std::min<int>(spec.labels_per_document, static_cast<int>(all_pairs.size()));
  std::vector<bool> mentioned(num_entities, false);
  std::set<std::pair<int, int>> used;
  for (int i = 0; i < num_labels; ++i) {
    auto [h, t] = all_pairs[i];
    // A pair and its reverse never both carry labels, so direction stays
    // recoverable from mention order.
    if (used.count({t, h})) continue;
    used.insert({h, t});
    std::set<int> relations;
    relations.insert(zipf.Sample(rng));
    if (rng.Bernoulli(spec.multi_label_rate)) relations.insert(zipf.Sample(rng));
    std::set<std::string> labels;
    for (int r : relations) {
      PendingSentence s;
      filler(s.tokens);
      add_mention(s, h);
      s.tokens.push_back(TriggerA(r));
      if (rng.Bernoulli(0.5)) {
        s.tokens.push_back("w" + std::to_string(rng.UniformInt(spec.vocab_size)));
      }
      s.tokens.push_back(TriggerB(r));
      add_mention(s, t);
      filler(s.tokens);
      pending.push_back(std::move(s));
      int label = r;
      if (rng.Bernoulli(spec.label_noise)) {
        label = static_cast<int>(rng.UniformInt(spec.num_relations));
      }
      labels.insert("R" + std::to_string(label));
    }
    mentioned[h] = mentioned[t] = true;
    doc.labels.push_back({h, t, std::vector<std::string>(labels.begin(), labels.end())});
  }

  // Every entity appears at least once; some get an extra mention.
  for (int e = 0; e < num_entities; ++e) {
    if (mentioned[e] && !rng.Bernoulli(0.3)) continue;
    PendingSentence s;
    filler(s.tokens);
    add_mention(s, e);
    if (rng.Bernoulli(spec.distractor_rate)) {
      const int r = static_cast<int>(rng.UniformInt(spec.num_relations));
      s.tokens.push_back(rng.Bernoulli(0.5) ? TriggerA(r) : TriggerB(r));
    }
    filler(s.tokens);
    pending.push_back(std::move(s));
  }

  rng.Shuffle(pending);
  for (size_t s = 0; s < pending.size(); ++s) {
    for (const auto& m : pending[s].mentions) {
      doc.entities[m.entity].mentions.push_back(
          {static_cast<int>(s), m.start, m.start + 1, names[m.entity]});
    }
    doc.sentences.push_back(std::move(pending[s].tokens));
  }
  std::sort(doc.labels.begin(), doc.labels.end(),
            [](const LabeledPair& a, const LabeledPair& b) {
              return std::pair(a.head, a.tail) < std::pair(b.head, b.tail);
            });
  return doc;
}

}  // namespace

Corpus GenerateSynthetic(const SynthSpec& spec, uint64_t seed) {
  Check(spec.num_relations > 0, "synthetic spec needs at least one relation",
        ErrorKind::kUsage);
  Check(spec.num_documents >= 0 && spec.vocab_size > 0 &&
            spec.entities_per_document >= 2 && spec.filler_min >= 0 &&
            spec.filler_max >= spec.filler_min,
        "invalid synthetic spec", ErrorKind::kUsage);
  const ZipfSampler zipf(spec.num_relations, spec.zipf_exponent);
  Corpus corpus;
  corpus.documents.reserve(spec.num_documents);
  for (int i = 0; i < spec.num_documents; ++i) {
    Rng rng(DeriveSeed(seed, {0x5E17ULL, static_cast<uint64_t>(i)}));
    corpus.documents.push_back(GenerateDocument(spec, zipf, i, rng));
  }
  return corpus;
}

std::pair<Corpus, Corpus> SplitCorpus(const Corpus& corpus,
                                      double first_fraction) {
  const size_t n = corpus.documents.size();
  const size_t k = std::min(
      n, static_cast<size_t>(std::llround(first_fraction * static_cast<double>(n))));
  Corpus a, b;
  a.documents.assign(corpus.documents.begin(), corpus.documents.begin() + k);
  b.documents.assign(corpus.documents.begin() + k, corpus.documents.end());
  return {std::move(a), std::move(b)};
}

}  // namespace eracl
