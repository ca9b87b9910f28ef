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

#ifndef QFE_DLOG_HPP_
#define QFE_DLOG_HPP_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <utility>
#include <vector>

#include "qfe/group.hpp"

namespace qfe {

// Default memory cap for a table; QFE_DLOG_CAP_MB overrides it.
inline constexpr std::size_t kDefaultDlogCapBytes = std::size_t{512} << 20;

// Reads QFE_DLOG_CAP_MB, falling back to kDefaultDlogCapBytes.
std::size_t dlog_cap_from_env();

// Baby-step giant-step table for logarithms base gT over [-bound, bound].
//
// Baby steps cover gT^u for u in [0, m), m = ceil(sqrt(2*bound + 1)), keyed by
// a 64-bit SipHash of the canonical GT encoding; hash hits are confirmed
// against the exact encoding before a result is returned. Writing
// z + bound = u + m*w, solve() scans giant-step windows w outwards from the
// window containing z = 0, so small outputs are found first and no more than
// m giant steps are ever taken.
//
// Independent of any key or ciphertext: one table serves every decryption
// whose output is known to lie in range. Read-only after build.
class DlogTable {
 public:
  struct Entry {
    std::uint64_t key;
    std::uint32_t value;
    bool operator<(const Entry& o) const {
      return key < o.key || (key == o.key && value < o.value);
    }
    bool operator==(const Entry&) const = default;
  };

  static DlogTable build(const GroupContext& group, std::int64_t bound,
                         std::size_t memory_cap_bytes = kDefaultDlogCapBytes);

  // Bytes a table for this bound occupies (used against the cap).
  static std::size_t estimated_bytes(std::int64_t bound);
  static std::uint64_t baby_steps_for(std::int64_t bound);

  // z in [-bound, bound] with gT^z == target; throws kOutOfRange otherwise.
  std::int64_t solve(const GT& target) const;

  std::int64_t bound() const { return bound_; }
  std::uint64_t baby_steps() const { return m_; }
  std::uint64_t giant_windows() const { return windows_; }

  // Versioned binary file: magic, version, bound, m, sorted (key, value).
  void save(std::ostream& out) const;
  static DlogTable load(std::istream& in, const GroupContext& group);

 private:
  DlogTable(const GroupContext& group, std::int64_t bound);
  void init_steps();
  std::int64_t confirm(const GT& candidate, std::uint64_t window) const;

  GroupContext group_;
  std::int64_t bound_ = 0;
  std::uint64_t m_ = 1;
  std::uint64_t windows_ = 1;
  std::uint64_t center_window_ = 0;
  std::vector<Entry> entries_;
  GT giant_up_;    // gT^{-m}: moves to window w+1
  GT giant_down_;  // gT^{m}:  moves to window w-1
  GT center_shift_;  // gT^{bound - m*center_window}
};

// Stable 64-bit key of a GT element (SipHash-2-4 of its canonical encoding
// under a fixed all-zero key).
std::uint64_t gt_table_key(const GT& x);

}  // namespace qfe

#endif  // QFE_DLOG_HPP_
