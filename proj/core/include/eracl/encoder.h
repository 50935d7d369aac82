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

// A small post-LN transformer encoder trained from scratch. It returns the
// final hidden states and the final block's per-head attention weights,
// which is all the relation encoder needs from a backbone.

#ifndef ERACL_ENCODER_H_
#define ERACL_ENCODER_H_

#include <cstdint>
#include <span>
#include <vector>

#include "eracl/autograd.h"
#include "eracl/corpus.h"
#include "eracl/params.h"
#include "eracl/random.h"

namespace eracl {

struct EncoderConfig {
  int vocab_size = 0;
  int model_dim = 64;
  int num_heads = 4;
  int num_layers = 4;
  int ffn_dim = 256;
  int max_length = 512;
  double dropout = 0.1;

  void Validate() const;
};

struct EncoderLayerParams {
  ag::Var wq, bq, wk, bk, wv, bv, wo, bo;
  ag::Var ln1_gain, ln1_bias;
  ag::Var ffn_w1, ffn_b1, ffn_w2, ffn_b2;
  ag::Var ln2_gain, ln2_bias;
};

struct EncoderParams {
  EncoderConfig config;
  ag::Var token_embedding;     // vocab x d
  ag::Var position_embedding;  // max_length x d
  ag::Var emb_ln_gain, emb_ln_bias;
  std::vector<EncoderLayerParams> layers;

  static EncoderParams Init(const EncoderConfig& config, uint64_t seed);
  std::vector<NamedParam> Parameters();
};

enum class Mode { kTrain, kEval };

struct EncodingOutput {
  ag::Var hidden;                  // l x d
  std::vector<ag::Var> attention;  // h entries of l x l, rows sum to one
};

// `rng` drives dropout and is only consulted in kTrain mode.
EncodingOutput Encode(const MarkedDocument& doc, const EncoderParams& params,
                      Mode mode, Rng* rng = nullptr);
EncodingOutput Encode(std::span<const int> token_ids,
                      const EncoderParams& params, Mode mode,
                      Rng* rng = nullptr);

ag::Var AverageAttentionHeads(std::span<const ag::Var> heads);
Matrix AverageAttentionHeads(std::span<const Matrix> heads);

}  // namespace eracl

#endif  // ERACL_ENCODER_H_
