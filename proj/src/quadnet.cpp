/*
 * Copyright 2026 The QFE Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "qfe/quadnet.hpp"

#include <chrono>
#include <string>

#include "qfe/errors.hpp"

namespace qfe {
namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

void check_keys(std::span<const FunctionalKey> keys, const QuadModel& model) {
  if (keys.size() != model.classes()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "infer: " + std::to_string(keys.size()) + " keys for " +
                    std::to_string(model.classes()) + " classes");
  }
  for (std::size_t c = 0; c < keys.size(); ++c) {
    if (!(keys[c].form == QuadraticForm::diagonal(model.diag[c]))) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "infer: key " + std::to_string(c) + " was not issued for this model");
    }
  }
}

}  // namespace

FunctionClass input_function_class(const QuadModel& model) {
  return FunctionClass{model.augmented_dim(), model.quant.input_max(), model.quant.input_max(),
                       std::int64_t{1} << (model.quant.bits - 1)};
}

ProjectionPair model_projection(const QuadModel& model) {
  return ProjectionPair{model.projection, model.projection};
}

std::vector<std::int64_t> augment_input(std::span<const std::int64_t> x) {
  std::vector<std::int64_t> out;
  out.reserve(x.size() + 1);
  out.push_back(1);
  out.insert(out.end(), x.begin(), x.end());
  return out;
}

std::vector<FunctionalKey> keygen_model(const GroupContext& group, const MasterSecretKey& msk,
                                        const QuadModel& model) {
  model.validate();
  if (msk.dim() != model.augmented_dim()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "keygen_model: key dimension " + std::to_string(msk.dim()) +
                    ", model expects " + std::to_string(model.augmented_dim()));
  }
  // (Ps, Pt) is shared by every class.
  auto [ps, pt] = project_secret(msk, model_projection(model));
  const MasterSecretKey projected{std::move(ps), std::move(pt)};
  std::vector<FunctionalKey> keys;
  keys.reserve(model.classes());
  for (const auto& d : model.diag) {
    keys.push_back(keygen(group, projected, QuadraticForm::diagonal(d)));
  }
  return keys;
}

Ciphertext encrypt_input(const PublicKey& pk, std::span<const std::int64_t> x,
                         const FunctionClass& fc, RandomSource& rng) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] < 0 || x[i] > fc.bound_x) {
      throw Error(ErrorCode::kOutOfBound,
                  "encrypt_input: pixel " + std::to_string(i) + " = " + std::to_string(x[i]) +
                      " outside [0, " + std::to_string(fc.bound_x) + "]");
    }
  }
  const auto xa = augment_input(x);
  return encrypt(pk, xa, xa, fc, rng);
}

PairingCache build_pairing_cache(const GroupContext& group, const Ciphertext& projected) {
  PairingCache cache;
  cache.c_gamma = projected.c_gamma;
  cache.cross_terms.reserve(projected.dim());
  for (std::size_t k = 0; k < projected.dim(); ++k) {
    const std::pair<G1, G2> pairs[2] = {{projected.a[k][0], projected.b[k][0]},
                                        {projected.a[k][1], projected.b[k][1]}};
    cache.cross_terms.push_back(group.multi_pair(pairs));
  }
  return cache;
}

std::vector<GT> combine_scores(const GroupContext& group, const PairingCache& cache,
                               std::span<const FunctionalKey> keys, const QuadModel& model) {
  check_keys(keys, model);
  if (cache.cross_terms.size() != model.hidden()) {
    throw Error(ErrorCode::kDimensionMismatch, "combine: cache width differs from model d");
  }
  std::vector<GT> out;
  out.reserve(keys.size());
  for (std::size_t c = 0; c < keys.size(); ++c) {
    GT acc = group.pair(cache.c_gamma, keys[c].k);
    const auto& d = model.diag[c];
    for (std::size_t k = 0; k < d.size(); ++k) {
      if (d[k] != 0) acc *= group.exp(cache.cross_terms[k], d[k]);
    }
    out.push_back(acc);
  }
  return out;
}

ScoreVector decode_scores(const DlogTable& table, std::span<const GT> scores) {
  ScoreVector out;
  out.reserve(scores.size());
  for (const auto& s : scores) out.push_back(table.solve(s));
  return out;
}

ScoreVector infer_encrypted(const PublicKey& pk, const Ciphertext& ct,
                            std::span<const FunctionalKey> keys, const QuadModel& model,
                            const DlogTable& table, InferTimings* timings) {
  model.validate();
  if (ct.dim() != model.augmented_dim()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "infer: ciphertext dimension " + std::to_string(ct.dim()) +
                    ", model expects " + std::to_string(model.augmented_dim()));
  }
  if (table.bound() < model.score_bound) {
    throw Error(ErrorCode::kInvalidArgument,
                "infer: dlog table bound " + std::to_string(table.bound()) +
                    " below model score bound " + std::to_string(model.score_bound));
  }
  check_keys(keys, model);
  const GroupContext& group = pk.group;
  InferTimings local;

  auto t0 = Clock::now();
  const ProjectedCiphertext projected =
      project(group, ct, model_projection(model), input_function_class(model));
  local.projection_ms = ms_since(t0);

  t0 = Clock::now();
  const PairingCache cache = build_pairing_cache(group, projected.ct);
  local.pairing_ms = ms_since(t0);

  t0 = Clock::now();
  const std::vector<GT> in_group = combine_scores(group, cache, keys, model);
  local.combine_ms = ms_since(t0);

  t0 = Clock::now();
  ScoreVector scores = decode_scores(table, in_group);
  local.dlog_ms = ms_since(t0);

  if (timings != nullptr) *timings = local;
  return scores;
}

std::vector<BigInt> infer_plaintext_oracle(const QuadModel& model,
                                           std::span<const std::int64_t> x) {
  if (x.size() != model.n) {
    throw Error(ErrorCode::kDimensionMismatch, "oracle: input length differs from model n");
  }
  const auto xa = augment_input(x);
  std::vector<BigInt> hidden(model.hidden());
  for (std::size_t k = 0; k < model.hidden(); ++k) {
    BigInt acc = 0;
    for (std::size_t j = 0; j < xa.size(); ++j) {
      acc += BigInt(static_cast<long>(model.projection(k, j))) * BigInt(static_cast<long>(xa[j]));
    }
    hidden[k] = acc;
  }
  std::vector<BigInt> out;
  out.reserve(model.classes());
  for (const auto& d : model.diag) {
    BigInt z = 0;
    for (std::size_t k = 0; k < d.size(); ++k) z += BigInt(static_cast<long>(d[k])) * hidden[k] * hidden[k];
    out.push_back(z);
  }
  return out;
}

std::size_t argmax(std::span<const std::int64_t> scores) {
  if (scores.empty()) throw Error(ErrorCode::kInvalidArgument, "argmax: empty score vector");
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i) {
    if (scores[i] > scores[best]) best = i;
  }
  return best;
}

}  // namespace qfe
