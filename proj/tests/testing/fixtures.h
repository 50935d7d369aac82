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

#ifndef ERACL_TESTS_TESTING_FIXTURES_H_
#define ERACL_TESTS_TESTING_FIXTURES_H_

#include <string>

#include "eracl/config.h"
#include "eracl/corpus.h"

namespace eracl::testing {

// Two sentences, two entities, one label.
inline constexpr const char* kTinyDocRed = R"([
  {"title": "Tiny",
   "sents": [["Alice", "founded", "Acme", "."], ["Acme", "grew", "."]],
   "vertexSet": [
     [{"name": "Alice", "sent_id": 0, "pos": [0, 1], "type": "PER"}],
     [{"name": "Acme", "sent_id": 0, "pos": [2, 3], "type": "ORG"},
      {"name": "Acme", "sent_id": 1, "pos": [0, 1], "type": "ORG"}]],
   "labels": [{"h": 0, "t": 1, "r": "P112", "evidence": [0]}]}
])";

// A model small enough for finite differences and second-scale training.
inline TrainConfig MicroConfig() {
  TrainConfig c;
  c.model_dim = 16;
  c.num_heads = 2;
  c.num_layers = 2;
  c.ffn_dim = 32;
  c.max_length = 64;
  c.bilinear_groups = 4;
  c.dropout = 0.1;
  c.batch_size = 2;
  c.lr_backbone = 1e-3;
  c.lr_head = 2e-3;
  c.cl_lr = 1e-3;
  c.cl_queue_size = 16;
  c.pretrain_epochs = 2;
  c.finetune_epochs = 2;
  return c;
}

inline SynthSpec SmallSpec(int docs = 12, int relations = 4) {
  SynthSpec s;
  s.num_documents = docs;
  s.num_relations = relations;
  s.entities_per_document = 4;
  s.labels_per_document = 2;
  s.vocab_size = 40;
  s.entity_names = 20;
  return s;
}

}  // namespace eracl::testing

#endif  // ERACL_TESTS_TESTING_FIXTURES_H_
