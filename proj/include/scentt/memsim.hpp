// SPDX-License-Identifier: Apache-2.0

/// @file memsim.hpp
/// @brief Behavioral model of the shift-register coefficient memory.
///
/// Each processing element owns two ping-pong coefficient banks; a bank is
/// four first-in-first-out shift queues of n/4 words. Address layout for the
/// stage-k element: rotate the 7-bit (generally log2(n)-bit) coefficient slot
/// index left by k, then the rotated value's most and least significant bits
/// select the queue (queue = 2*msb + lsb) and the middle bits select the
/// queue slot. Writes route the even-port word to queue 0 or 2 and the odd-
/// port word to queue 1 or 3 (first-quarter cycles use 0/1, the rest 2/3);
/// reads alternate between the (0,2) and (1,3) head pairs. Under this
/// schedule the pair popped at read cycle c always has rotated addresses
/// (c, c + n/2), which is what makes the access pattern identical per stage.

#ifndef SCENTT_MEMSIM_HPP
#define SCENTT_MEMSIM_HPP

#include <cstddef>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "scentt/modmath.hpp"

namespace scentt::memsim {

/// Queue/slot coordinates of one word inside a bank.
struct QueueSlotRef {
  unsigned queue = 0;      // 0..3
  std::size_t slot = 0;    // 0 .. n/4 - 1, 0 = written first (nearest head)
  bool operator==(const QueueSlotRef& o) const {
    return queue == o.queue && slot == o.slot;
  }
};

/// Bank coordinates of coefficient-slot `index` for the stage-`stage` layout.
/// `log2n` is the address width; throws IndexOutOfRange for index >= 2^log2n.
QueueSlotRef layout_address(std::size_t index, unsigned stage, unsigned log2n);

/// Queues receiving the even-port (di0) and odd-port (di1) words at write
/// cycle `cycle` (0 .. n/2 - 1). Throws CycleOutOfRange beyond that.
struct WriteRoute {
  unsigned di0_queue = 0;  // 0 or 2
  unsigned di1_queue = 1;  // 1 or 3
  bool operator==(const WriteRoute& o) const {
    return di0_queue == o.di0_queue && di1_queue == o.di1_queue;
  }
};
WriteRoute write_schedule(std::size_t cycle, std::size_t n);

/// Queue pair whose heads are popped at read cycle `cycle` (0 .. n/2 - 1).
struct ReadRoute {
  unsigned low_queue = 0;   // 0 or 1 (rotated-address msb clear)
  unsigned high_queue = 2;  // low_queue + 2
  bool operator==(const ReadRoute& o) const {
    return low_queue == o.low_queue && high_queue == o.high_queue;
  }
};
ReadRoute read_schedule(std::size_t cycle, std::size_t n);

/// strict: protocol violations throw; permissive: they are reported to the
/// event sink and the operation yields zero words.
enum class GuardMode { strict, permissive };

/// Memory trace event, forwarded to an optional observer.
struct MemEvent {
  enum class Op {
    write,
    read,
    bank_flip,
    csrm_rotate,
    underflow,
    overflow,
    collision
  };
  Op op;
  unsigned queue;  // queue id, or 0 when not queue-specific
  Word word;
};
using EventSink = std::function<void(const MemEvent&)>;

/// Fixed-length first-in-first-out shift register. A trigger shifts every
/// resident word one stage toward the head, loads the optional input at the
/// tail, and emits the word that occupied the head.
class SrmQueue {
 public:
  explicit SrmQueue(std::size_t stages);

  std::optional<Word> tick(std::optional<Word> in);

  std::size_t stages() const { return slots_.size(); }
  std::size_t occupancy() const { return occupancy_; }
  const std::optional<Word>& slot(std::size_t i) const { return slots_[i]; }

 private:
  std::vector<std::optional<Word>> slots_;  // [0] = head
  std::size_t occupancy_ = 0;
};

/// One ping-pong half: four queues plus the fill/drain state machine.
/// A bank accepting writes flips to reading as soon as it holds all n words;
/// a bank drained of all n words flips back to writing.
class CoefficientBank {
 public:
  enum class Mode { writing, reading };

  CoefficientBank(std::size_t n, GuardMode guard = GuardMode::strict,
                  EventSink sink = nullptr);

  /// Route one (di0, di1) pair per the write schedule at the current fill
  /// cycle. Strict mode throws OverflowDetected when the bank is not
  /// accepting writes.
  void write_pair(Word di0, Word di1);

  /// Pop the scheduled head pair for the current read cycle; first element is
  /// the low queue (rotated-address msb clear). Strict mode throws
  /// UnderflowDetected when the bank holds no readable data.
  std::pair<Word, Word> read_pair();

  /// Apply an externally supplied routing (trigger-level interface). The
  /// routes must be consistent with the broadcast wiring: di0 can only latch
  /// into queues 0/2, di1 into 1/3, and reads must pair (0,2) or (1,3);
  /// anything else raises CollisionDetected (two words would merge).
  void write_routed(const WriteRoute& route, Word di0, Word di1);
  std::pair<Word, Word> read_routed(const ReadRoute& route);

  Mode mode() const { return mode_; }
  std::size_t fill_cycle() const { return fill_cycle_; }
  std::size_t read_cycle() const { return read_cycle_; }
  std::size_t n() const { return n_; }
  const SrmQueue& queue(unsigned q) const { return queues_[q]; }

 private:
  bool violation(MemEvent::Op op, const char* msg);

  std::size_t n_;
  GuardMode guard_;
  EventSink sink_;
  std::vector<SrmQueue> queues_;
  Mode mode_ = Mode::writing;
  std::size_t fill_cycle_ = 0;
  std::size_t read_cycle_ = 0;
};

/// Trigger bundle for one bank cycle; at most one side may be active.
struct BankTriggers {
  std::optional<WriteRoute> write;
  std::optional<ReadRoute> read;
};

/// Free-function form of the trigger-level interface.
std::optional<std::pair<Word, Word>> bank_tick(
    CoefficientBank& bank, const BankTriggers& triggers,
    std::optional<std::pair<Word, Word>> inputs);

/// Circular twiddle store of 2^stage words (33-bit companions included, hence
/// the double-word element type). Loading is gated by an explicit load window
/// so circulating contents can never be corrupted by stray writes.
class Csrm {
 public:
  explicit Csrm(std::size_t stages, EventSink sink = nullptr);

  void begin_load();
  void load_word(DWord w);
  void end_load();

  /// Rotate once and return the word that was at the head. After a full load,
  /// trigger t returns loaded word (t mod stages).
  DWord tick();

  bool load_mode() const { return load_mode_; }
  std::size_t stages() const { return slots_.size(); }
  std::size_t loaded() const { return loaded_; }

 private:
  std::vector<DWord> slots_;
  std::size_t head_ = 0;
  std::size_t loaded_ = 0;
  bool load_mode_ = false;
  EventSink sink_;
};

/// Free-function form matching the bank interface.
DWord csrm_tick(Csrm& c);

}  // namespace scentt::memsim

#endif  // SCENTT_MEMSIM_HPP
