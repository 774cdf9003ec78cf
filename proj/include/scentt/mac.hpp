// SPDX-License-Identifier: Apache-2.0
//
// Memory-access controller built from toggle flip-flop frequency dividers.
//
// A binary tree of TFFs forms a feedback-free one-hot counter: each node
// absorbs every other pulse and forwards the rest to one of its children,
// alternating sides.  Walking the tree with decode-then-toggle semantics,
// the pulse issued on cycle c reaches leaf c mod 2^depth, and the bits read
// along the walk spell out the count.  The controller only ever needs three
// of those bits (read parity, write quarter, bank select) plus the half-period
// boundary pulse, so the tree prunes down to its leftmost ripple chain.

#ifndef SCENTT_MAC_HPP
#define SCENTT_MAC_HPP

#include <cstddef>
#include <vector>

#include "scentt/memsim.hpp"

namespace scentt::mac {

// Full divider tree, heap order (node 0 is the fastest stage).  step()
// consumes one clock pulse and returns the decoded one-hot position, which
// equals the number of previous pulses mod 2^depth; the first call returns 0.
class TffTree {
 public:
  explicit TffTree(unsigned depth);

  std::size_t step();
  unsigned depth() const { return depth_; }
  std::size_t period() const { return std::size_t{1} << depth_; }

 private:
  unsigned depth_;
  std::vector<bool> state_;
};

// Leftmost ripple chain of the tree: the only stages whose outputs the
// controller consumes.  Stage k receives a pulse exactly when the count is a
// multiple of 2^k, so the retained taps stay correct between visits.
class PrunedTffChain {
 public:
  struct Observation {
    bool parity = false;          // count bit 0: read-route select
    bool quarter_select = false;  // count bit depth-2: write-route select
    bool bank_select = false;     // count bit depth-1: which bank is writing
    bool top_pulse = false;       // slowest stage pulsed: count % 2^(depth-1) == 0
    bool operator==(const Observation&) const = default;
  };

  explicit PrunedTffChain(unsigned depth);

  Observation step();
  unsigned depth() const { return depth_; }

 private:
  unsigned depth_;
  std::vector<bool> state_;
};

// Everything the memories of one element need for one cycle.
struct TriggerSet {
  unsigned writing_bank = 0;
  unsigned reading_bank = 1;
  memsim::WriteRoute write{0, 1};
  memsim::ReadRoute read{0, 2};
  bool bank_flip = false;    // banks swap roles this cycle (never on cycle 0)
  bool csrm_trigger = true;  // twiddle memories rotate every cycle
  bool operator==(const TriggerSet&) const = default;
};

// Free-running trigger generator with period n cycles.  The full-tree and
// pruned variants produce identical TriggerSet streams; both must match the
// plain cycle-arithmetic schedule (the oracle in the tests).
class MacController {
 public:
  explicit MacController(std::size_t n, bool pruned = false);

  TriggerSet step();
  std::size_t n() const { return n_; }
  bool pruned() const { return pruned_; }
  std::size_t cycle() const { return cycle_; }

 private:
  std::size_t n_;
  unsigned depth_;
  bool pruned_;
  TffTree tree_;
  PrunedTffChain chain_;
  std::size_t cycle_ = 0;
};

// Triggers for one absolute cycle of one element's controller, by replay.
// Every element runs the same schedule relative to its own start cycle, so
// pe_index is only range-checked (it must name one of the log2(n) stages).
TriggerSet mac_triggers(std::size_t cycle, std::size_t pe_index, std::size_t n);

}  // namespace scentt::mac

#endif  // SCENTT_MAC_HPP
