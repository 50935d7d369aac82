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

#include "eracl/encoder.h"

#include <cmath>
#include <numeric>
#include <string>

#include "eracl/error.h"

namespace eracl {

using ag::Var;

void EncoderConfig::Validate() const {
  Check(vocab_size > 0, "encoder vocab_size must be positive",
        ErrorKind::kUsage);
  Check(model_dim > 0 && num_heads > 0 && model_dim % num_heads == 0,
        "encoder model_dim must be divisible by num_heads", ErrorKind::kUsage);
  Check(num_layers >= 1 && ffn_dim > 0 && max_length > 0,
        "invalid encoder dimensions", ErrorKind::kUsage);
  Check(dropout >= 0.0 && dropout < 1.0, "encoder dropout must be in [0, 1)",
        ErrorKind::kUsage);
}

EncoderParams EncoderParams::Init(const EncoderConfig& config, uint64_t seed) {
  config.Validate();
  Rng rng(DeriveSeed(seed, {0xE4C0DEULL}));
  const int d = config.model_dim;
  const double std = 0.02;
  auto weight = [&](int r, int c) { return Var::Parameter(RandomNormal(r, c, std, rng)); };
  auto zeros = [](int c) { return Var::Parameter(Matrix::Zero(1, c)); };
  auto ones = [](int c) { return Var::Parameter(Matrix::Ones(1, c)); };

  EncoderParams p;
  p.config = config;
  p.token_embedding = weight(config.vocab_size, d);
  // Sinusoidal start, rescaled to the token-embedding spread; still trained.
  Matrix positions(config.max_length, d);
  for (int pos = 0; pos < config.max_length; ++pos) {
    for (int j = 0; j < d; ++j) {
      const double freq = std::pow(10000.0, -static_cast<double>(j - j % 2) / d);
      const double angle = pos * freq;
      positions(pos, j) = std * std::sqrt(2.0) *
                          (j % 2 == 0 ? std::sin(angle) : std::cos(angle));
    }
  }
  p.position_embedding = Var::Parameter(positions);
  p.emb_ln_gain = ones(d);
  p.emb_ln_bias = zeros(d);
  for (int i = 0; i < config.num_layers; ++i) {
    EncoderLayerParams layer;
    layer.wq = weight(d, d);
    layer.bq = zeros(d);
    layer.wk = weight(d, d);
    layer.bk = zeros(d);
    layer.wv = weight(d, d);
    layer.bv = zeros(d);
    layer.wo = weight(d, d);
    layer.bo = zeros(d);
    layer.ln1_gain = ones(d);
    layer.ln1_bias = zeros(d);
    layer.ffn_w1 = weight(d, config.ffn_dim);
    layer.ffn_b1 = zeros(config.ffn_dim);
    layer.ffn_w2 = weight(config.ffn_dim, d);
    layer.ffn_b2 = zeros(d);
    layer.ln2_gain = ones(d);
    layer.ln2_bias = zeros(d);
    p.layers.push_back(std::move(layer));
  }
  return p;
}

std::vector<NamedParam> EncoderParams::Parameters() {
  constexpr auto kB = ParamGroup::kBackbone;
  std::vector<NamedParam> out = {
      {"encoder.token_embedding", &token_embedding, kB, true},
      {"encoder.position_embedding", &position_embedding, kB, true},
      {"encoder.emb_ln.gain", &emb_ln_gain, kB, false},
      {"encoder.emb_ln.bias", &emb_ln_bias, kB, false},
  };
  for (size_t i = 0; i < layers.size(); ++i) {
    const std::string pre = "encoder.layer" + std::to_string(i) + ".";
    EncoderLayerParams& l = layers[i];
    out.push_back({pre + "wq", &l.wq, kB, true});
    out.push_back({pre + "bq", &l.bq, kB, false});
    out.push_back({pre + "wk", &l.wk, kB, true});
    out.push_back({pre + "bk", &l.bk, kB, false});
    out.push_back({pre + "wv", &l.wv, kB, true});
    out.push_back({pre + "bv", &l.bv, kB, false});
    out.push_back({pre + "wo", &l.wo, kB, true});
    out.push_back({pre + "bo", &l.bo, kB, false});
    out.push_back({pre + "ln1.gain", &l.ln1_gain, kB, false});
    out.push_back({pre + "ln1.bias", &l.ln1_bias, kB, false});
    out.push_back({pre + "ffn.w1", &l.ffn_w1, kB, true});
    out.push_back({pre + "ffn.b1", &l.ffn_b1, kB, false});
    out.push_back({pre + "ffn.w2", &l.ffn_w2, kB, true});
    out.push_back({pre + "ffn.b2", &l.ffn_b2, kB, false});
    out.push_back({pre + "ln2.gain", &l.ln2_gain, kB, false});
    out.push_back({pre + "ln2.bias", &l.ln2_bias, kB, false});
  }
  return out;
}

namespace {

// Inverted dropout; identity when disabled.
Var Dropout(const Var& x, double rate, Mode mode, Rng* rng) {
  if (mode != Mode::kTrain || rate <= 0.0) return x;
  Check(rng != nullptr, "training-mode encode needs an RNG stream");
  const double keep_scale = 1.0 / (1.0 - rate);
  Matrix mask(x.rows(), x.cols());
  for (Eigen::Index i = 0; i < mask.size(); ++i) {
    mask.data()[i] = rng->Bernoulli(rate) ? 0.0 : keep_scale;
  }
  return ag::MulConst(x, mask);
}

Var Affine(const Var& x, const Var& w, const Var& b) {
  return ag::AddRow(ag::MatMul(x, w), b);
}

}  // namespace

EncodingOutput Encode(std::span<const int> token_ids,
                      const EncoderParams& params, Mode mode, Rng* rng) {
  const EncoderConfig& cfg = params.config;
  const int l = static_cast<int>(token_ids.size());
  Check(l > 0, "cannot encode an empty document", ErrorKind::kValidation);
  Check(l <= cfg.max_length,
        "document length " + std::to_string(l) + " exceeds encoder maximum " +
            std::to_string(cfg.max_length),
        ErrorKind::kValidation);
  for (int id : token_ids) {
    Check(id >= 0 && id < cfg.vocab_size, "token id outside encoder vocabulary",
          ErrorKind::kValidation);
  }
  std::vector<int> positions(l);
  std::iota(positions.begin(), positions.end(), 0);

  Var x = ag::Add(ag::GatherRows(params.token_embedding, token_ids),
                  ag::GatherRows(params.position_embedding, positions));
  x = ag::LayerNormRows(x, params.emb_ln_gain, params.emb_ln_bias);

  const int heads = cfg.num_heads;
  const int head_dim = cfg.model_dim / heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(head_dim));
  EncodingOutput out;
  for (size_t li = 0; li < params.layers.size(); ++li) {
    const EncoderLayerParams& layer = params.layers[li];
    const bool last = li + 1 == params.layers.size();
    Var q = Affine(x, layer.wq, layer.bq);
    Var k = Affine(x, layer.wk, layer.bk);
    Var v = Affine(x, layer.wv, layer.bv);
    std::vector<Var> head_outputs;
    head_outputs.reserve(heads);
    for (int h = 0; h < heads; ++h) {
      Var qh = ag::SliceCols(q, h * head_dim, head_dim);
      Var kh = ag::SliceCols(k, h * head_dim, head_dim);
      Var vh = ag::SliceCols(v, h * head_dim, head_dim);
      Var weights = ag::SoftmaxRows(ag::Scale(ag::MatMulNT(qh, kh), scale));
      if (last) out.attention.push_back(weights);
      head_outputs.push_back(
          ag::MatMul(Dropout(weights, cfg.dropout, mode, rng), vh));
    }
    Var attended = Affine(ag::ConcatCols(head_outputs), layer.wo, layer.bo);
    x = ag::LayerNormRows(ag::Add(x, attended), layer.ln1_gain, layer.ln1_bias);
    Var ffn = Affine(ag::Gelu(Affine(x, layer.ffn_w1, layer.ffn_b1)),
                     layer.ffn_w2, layer.ffn_b2);
    ffn = Dropout(ffn, cfg.dropout, mode, rng);
    x = ag::LayerNormRows(ag::Add(x, ffn), layer.ln2_gain, layer.ln2_bias);
  }
  out.hidden = x;
  return out;
}

EncodingOutput Encode(const MarkedDocument& doc, const EncoderParams& params,
                      Mode mode, Rng* rng) {
  try {
    return Encode(doc.token_ids, params, mode, rng);
  } catch (const Error& e) {
    throw Error(e.kind(), "document '" + doc.title + "': " + e.what());
  }
}

Var AverageAttentionHeads(std::span<const Var> heads) {
  return ag::MeanOf(heads);
}

Matrix AverageAttentionHeads(std::span<const Matrix> heads) {
  Check(!heads.empty(), "no attention heads to average");
  Matrix sum = heads[0];
  for (size_t i = 1; i < heads.size(); ++i) sum += heads[i];
  return sum / static_cast<double>(heads.size());
}

}  // namespace eracl
