// SPDX-License-Identifier: Apache-2.0

#include "scentt/mac.hpp"

#include <stdexcept>

#include "scentt/errors.hpp"

namespace scentt::mac {

TffTree::TffTree(unsigned depth) : depth_(depth) {
  if (depth == 0 || depth > 30) {
    throw std::invalid_argument("divider tree depth must lie in [1, 30]");
  }
  state_.assign((std::size_t{1} << depth) - 1, false);
}

std::size_t TffTree::step() {
  // Decode-then-toggle walk: the state read at level i is bit i of the count,
  // and the read bit steers the pulse to the matching child.
  std::size_t index = 0;
  std::size_t node = 0;
  for (unsigned level = 0; level < depth_; ++level) {
    const bool bit = state_[node];
    state_[node] = !bit;
    index |= static_cast<std::size_t>(bit) << level;
    node = 2 * node + 1 + (bit ? 1 : 0);
  }
  return index;
}

PrunedTffChain::PrunedTffChain(unsigned depth) : depth_(depth) {
  if (depth < 2 || depth > 30) {
    throw std::invalid_argument("pruned chain depth must lie in [2, 30]");
  }
  state_.assign(depth, false);
}

PrunedTffChain::Observation PrunedTffChain::step() {
  Observation obs;
  // Propagate the pulse up the chain.  Stage k (visited iff count bits
  // 0..k-1 are all zero) toggles and passes the pulse on only if it read 0;
  // a read of 1 would steer the pulse into a pruned subtree.
  for (unsigned level = 0; level < depth_; ++level) {
    const bool bit = state_[level];
    state_[level] = !bit;
    if (level + 1 == depth_) obs.top_pulse = true;
    if (bit) break;
  }
  // Post-walk, stage k has toggled floor(count / 2^k) + 1 times, so its
  // complement output reads exactly count bit k, every cycle.
  obs.parity = !state_[0];
  obs.quarter_select = !state_[depth_ - 2];
  obs.bank_select = !state_[depth_ - 1];
  return obs;
}

namespace {

TriggerSet triggers_from_bits(bool parity, bool quarter, bool bank,
                              bool boundary, std::size_t cycle) {
  TriggerSet t;
  t.writing_bank = bank ? 1 : 0;
  t.reading_bank = bank ? 0 : 1;
  t.write = quarter ? memsim::WriteRoute{2, 3} : memsim::WriteRoute{0, 1};
  t.read = parity ? memsim::ReadRoute{1, 3} : memsim::ReadRoute{0, 2};
  t.bank_flip = boundary && cycle > 0;
  t.csrm_trigger = true;
  return t;
}

}  // namespace

MacController::MacController(std::size_t n, bool pruned)
    : n_(n), depth_(0), pruned_(pruned), tree_(1), chain_(2) {
  if (n < 4 || (n & (n - 1)) != 0) {
    throw std::invalid_argument("controller size must be a power of two >= 4");
  }
  while ((std::size_t{1} << depth_) < n) ++depth_;
  tree_ = TffTree(depth_);
  chain_ = PrunedTffChain(depth_);
}

TriggerSet MacController::step() {
  TriggerSet t;
  if (pruned_) {
    const PrunedTffChain::Observation obs = chain_.step();
    t = triggers_from_bits(obs.parity, obs.quarter_select, obs.bank_select,
                           obs.top_pulse, cycle_);
  } else {
    const std::size_t index = tree_.step();
    t = triggers_from_bits((index & 1) != 0,
                           (index >> (depth_ - 2)) & 1,
                           (index >> (depth_ - 1)) & 1,
                           index % (n_ / 2) == 0, cycle_);
  }
  ++cycle_;
  return t;
}

TriggerSet mac_triggers(std::size_t cycle, std::size_t pe_index,
                        std::size_t n) {
  unsigned depth = 0;
  while ((std::size_t{1} << depth) < n) ++depth;
  if (n < 4 || (std::size_t{1} << depth) != n) {
    throw std::invalid_argument("controller size must be a power of two >= 4");
  }
  if (pe_index >= depth) {
    throw IndexOutOfRange("element index must name one of the transform stages");
  }
  MacController c(n);
  TriggerSet t;
  for (std::size_t i = 0; i <= cycle; ++i) t = c.step();
  return t;
}

}  // namespace scentt::mac
