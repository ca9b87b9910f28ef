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

#ifndef QFE_QUADNET_HPP_
#define QFE_QUADNET_HPP_

// Encrypted evaluation of the private quadratic network
//   q_i(x) = (P x')^T D_i (P x'),  x' = (1, x),  D_i diagonal.
//
// One ciphertext of (x', x') serves every class. Inference projects it once
// by (P, P), pairs each hidden unit once (2d pairings, shared by all
// classes), then per class pairs g1^gamma with the class key and raises the
// cached hidden-unit terms to the diagonal coefficients.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "qfe/dlog.hpp"
#include "qfe/group.hpp"
#include "qfe/model.hpp"
#include "qfe/projection.hpp"
#include "qfe/scheme.hpp"

namespace qfe {

using ScoreVector = std::vector<std::int64_t>;

// Class of the bias-augmented input: dimension n+1, entries in
// [0, input_max], coefficients bounded by the weight range.
FunctionClass input_function_class(const QuadModel& model);

ProjectionPair model_projection(const QuadModel& model);

// (1, x)
std::vector<std::int64_t> augment_input(std::span<const std::int64_t> x);

// Key i is projected_keygen(msk, (P, P), diag(D_i)).
std::vector<FunctionalKey> keygen_model(const GroupContext& group, const MasterSecretKey& msk,
                                        const QuadModel& model);

// Encrypts (x', x'); x holds already-quantized pixels in [0, input_max].
Ciphertext encrypt_input(const PublicKey& pk, std::span<const std::int64_t> x,
                         const FunctionClass& fc, RandomSource& rng);

// Per-hidden-unit pairing products of a projected ciphertext:
// cross_terms[k] = e(g1^{a'_k}, g2^{b'_k}) as a 2-term inner product.
struct PairingCache {
  G1 c_gamma;
  std::vector<GT> cross_terms;
};

PairingCache build_pairing_cache(const GroupContext& group, const Ciphertext& projected);

// gT^{q_i(x)} for every class, from the cache. One pairing per class key.
std::vector<GT> combine_scores(const GroupContext& group, const PairingCache& cache,
                               std::span<const FunctionalKey> keys, const QuadModel& model);

ScoreVector decode_scores(const DlogTable& table, std::span<const GT> scores);

struct InferTimings {
  double projection_ms = 0;
  double pairing_ms = 0;
  double combine_ms = 0;
  double dlog_ms = 0;

  double evaluation_ms() const { return projection_ms + pairing_ms + combine_ms; }
};

ScoreVector infer_encrypted(const PublicKey& pk, const Ciphertext& ct,
                            std::span<const FunctionalKey> keys, const QuadModel& model,
                            const DlogTable& table, InferTimings* timings = nullptr);

// Exact integer evaluation of q_i(x) with no modular reduction.
std::vector<BigInt> infer_plaintext_oracle(const QuadModel& model,
                                           std::span<const std::int64_t> x);

// Smallest index attaining the maximum.
std::size_t argmax(std::span<const std::int64_t> scores);

}  // namespace qfe

#endif  // QFE_QUADNET_HPP_
