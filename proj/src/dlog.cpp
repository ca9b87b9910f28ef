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

#include "qfe/dlog.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <string>

#include <sodium.h>

#include "qfe/errors.hpp"

namespace qfe {
namespace {

constexpr char kTableMagic[4] = {'Q', 'D', 'L', 'T'};
constexpr std::uint32_t kTableVersion = 1;

// Uncounted power used to confirm hash hits; u < 2^32.
GT pow_u32(const GT& base, std::uint32_t u) {
  GT acc;
  for (int bit = 31; bit >= 0; --bit) {
    blst_fp12_cyclotomic_sqr(&acc.raw(), &acc.raw());
    if ((u >> bit) & 1U) acc *= base;
  }
  return acc;
}

std::uint64_t ceil_sqrt(std::uint64_t n) {
  auto r = std::uint64_t(std::sqrt(double(n)));
  while (r * r > n) --r;
  while (r * r < n) ++r;
  return r;
}

template <typename T>
void put_le(std::ostream& out, T v) {
  unsigned char buf[sizeof(T)];
  for (std::size_t i = 0; i < sizeof(T); ++i) buf[i] = static_cast<unsigned char>(std::uint64_t(v) >> (8 * i));
  out.write(reinterpret_cast<const char*>(buf), sizeof(T));
}

template <typename T>
T get_le(std::istream& in, const char* what) {
  unsigned char buf[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(buf), sizeof(T))) {
    throw Error(ErrorCode::kTruncated, std::string("dlog table: truncated ") + what);
  }
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) v |= std::uint64_t(buf[i]) << (8 * i);
  return static_cast<T>(v);
}

}  // namespace

std::size_t dlog_cap_from_env() {
  const char* raw = std::getenv("QFE_DLOG_CAP_MB");
  if (raw == nullptr || *raw == '\0') return kDefaultDlogCapBytes;
  char* end = nullptr;
  const unsigned long long mb = std::strtoull(raw, &end, 10);
  if (end == raw || *end != '\0') {
    throw Error(ErrorCode::kInvalidArgument,
                std::string("QFE_DLOG_CAP_MB is not an integer: ") + raw);
  }
  return std::size_t(mb) << 20;
}

std::uint64_t gt_table_key(const GT& x) {
  static const unsigned char kKey[crypto_shorthash_KEYBYTES] = {};
  const auto enc = x.encode();
  unsigned char out[crypto_shorthash_BYTES];
  crypto_shorthash(out, enc.data(), enc.size(), kKey);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= std::uint64_t(out[i]) << (8 * i);
  return v;
}

std::uint64_t DlogTable::baby_steps_for(std::int64_t bound) {
  if (bound < 0) throw Error(ErrorCode::kInvalidArgument, "dlog: negative bound");
  return ceil_sqrt(2 * std::uint64_t(bound) + 1);
}

std::size_t DlogTable::estimated_bytes(std::int64_t bound) {
  return std::size_t(baby_steps_for(bound)) * sizeof(Entry);
}

DlogTable::DlogTable(const GroupContext& group, std::int64_t bound)
    : group_(group), bound_(bound) {}

void DlogTable::init_steps() {
  const std::uint64_t span = 2 * std::uint64_t(bound_) + 1;
  windows_ = (span + m_ - 1) / m_;
  center_window_ = std::uint64_t(bound_) / m_;
  const GT& g = group_.gt();
  const GT g_m = pow_u32(g, std::uint32_t(m_));
  giant_down_ = g_m;
  giant_up_ = g_m.inverse();
  // bound - m*center < m, so the shift is a baby-step-sized power.
  center_shift_ = pow_u32(g, std::uint32_t(std::uint64_t(bound_) - m_ * center_window_));
}

DlogTable DlogTable::build(const GroupContext& group, std::int64_t bound,
                           std::size_t memory_cap_bytes) {
  const std::uint64_t m = baby_steps_for(bound);
  if (m > std::uint64_t(UINT32_MAX) || estimated_bytes(bound) > memory_cap_bytes) {
    throw Error(ErrorCode::kCapacity,
                "dlog: table for bound " + std::to_string(bound) + " needs " +
                    std::to_string(estimated_bytes(bound) >> 20) +
                    " MiB, cap is " + std::to_string(memory_cap_bytes >> 20) + " MiB");
  }
  DlogTable t(group, bound);
  t.m_ = m;
  t.entries_.resize(m);
  GT cur;
  const GT& g = group.gt();
  for (std::uint64_t u = 0; u < m; ++u) {
    t.entries_[u] = Entry{gt_table_key(cur), std::uint32_t(u)};
    cur *= g;
  }
  std::sort(t.entries_.begin(), t.entries_.end());
  t.init_steps();
  return t;
}

std::int64_t DlogTable::confirm(const GT& candidate, std::uint64_t window) const {
  const std::uint64_t key = gt_table_key(candidate);
  auto it = std::lower_bound(entries_.begin(), entries_.end(), Entry{key, 0});
  for (; it != entries_.end() && it->key == key; ++it) {
    const std::uint64_t shifted = it->value + m_ * window;
    if (shifted > 2 * std::uint64_t(bound_)) continue;
    if (pow_u32(group_.gt(), it->value) == candidate) {
      return std::int64_t(shifted) - bound_;
    }
  }
  return INT64_MIN;
}

std::int64_t DlogTable::solve(const GT& target) const {
  const GT start = target * center_shift_;
  if (auto z = confirm(start, center_window_); z != INT64_MIN) return z;

  GT up = start;
  GT down = start;
  for (std::uint64_t step = 1;; ++step) {
    const bool can_up = center_window_ + step < windows_;
    const bool can_down = step <= center_window_;
    if (!can_up && !can_down) break;
    if (can_up) {
      up *= giant_up_;
      if (auto z = confirm(up, center_window_ + step); z != INT64_MIN) return z;
    }
    if (can_down) {
      down *= giant_down_;
      if (auto z = confirm(down, center_window_ - step); z != INT64_MIN) return z;
    }
  }
  throw Error(ErrorCode::kOutOfRange,
              "dlog: no exponent in [-" + std::to_string(bound_) + ", " +
                  std::to_string(bound_) + "]");
}

void DlogTable::save(std::ostream& out) const {
  out.write(kTableMagic, sizeof(kTableMagic));
  put_le<std::uint32_t>(out, kTableVersion);
  put_le<std::int64_t>(out, bound_);
  put_le<std::uint64_t>(out, m_);
  for (const auto& e : entries_) {
    put_le<std::uint64_t>(out, e.key);
    put_le<std::uint32_t>(out, e.value);
  }
  if (!out) throw Error(ErrorCode::kIo, "dlog table: write failed");
}

DlogTable DlogTable::load(std::istream& in, const GroupContext& group) {
  char magic[4];
  if (!in.read(magic, sizeof(magic))) {
    throw Error(ErrorCode::kTruncated, "dlog table: truncated magic");
  }
  if (!std::equal(magic, magic + 4, kTableMagic)) {
    throw Error(ErrorCode::kBadMagic, "dlog table: bad magic");
  }
  if (get_le<std::uint32_t>(in, "version") != kTableVersion) {
    throw Error(ErrorCode::kVersionMismatch, "dlog table: unsupported version");
  }
  const auto bound = get_le<std::int64_t>(in, "bound");
  const auto m = get_le<std::uint64_t>(in, "baby-step count");
  if (bound < 0 || m != baby_steps_for(bound)) {
    throw Error(ErrorCode::kInvalidFormat, "dlog table: bound and baby-step count disagree");
  }
  DlogTable t(group, bound);
  t.m_ = m;
  t.entries_.resize(m);
  for (auto& e : t.entries_) {
    e.key = get_le<std::uint64_t>(in, "entries");
    e.value = get_le<std::uint32_t>(in, "entries");
    if (e.value >= m) {
      throw Error(ErrorCode::kInvalidFormat, "dlog table: entry value out of range");
    }
  }
  if (!std::is_sorted(t.entries_.begin(), t.entries_.end())) {
    throw Error(ErrorCode::kInvalidFormat, "dlog table: entries not sorted");
  }
  t.init_steps();
  return t;
}

}  // namespace qfe
