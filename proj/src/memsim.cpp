// SPDX-License-Identifier: Apache-2.0

#include "scentt/memsim.hpp"

#include <cassert>
#include <stdexcept>

namespace scentt::memsim {

QueueSlotRef layout_address(std::size_t index, unsigned stage, unsigned log2n) {
  if (log2n < 2 || log2n > 63) {
    throw std::invalid_argument("address width must lie in [2, 63]");
  }
  if (index >= (std::size_t{1} << log2n)) {
    throw IndexOutOfRange("coefficient index exceeds the address space");
  }
  const Word r = modmath::rotate_left_bits(static_cast<Word>(index), stage, log2n);
  const unsigned msb = static_cast<unsigned>((r >> (log2n - 1)) & 1);
  const unsigned lsb = static_cast<unsigned>(r & 1);
  QueueSlotRef ref;
  ref.queue = 2 * msb + lsb;
  ref.slot = static_cast<std::size_t>((r >> 1) & ((Word{1} << (log2n - 2)) - 1));
  return ref;
}

WriteRoute write_schedule(std::size_t cycle, std::size_t n) {
  if (cycle >= n / 2) {
    throw CycleOutOfRange("write cycle exceeds n/2 - 1");
  }
  // First quarter of the fill goes to the low queue pair, the rest to the
  // high pair; the even input port can only reach queues 0/2, the odd 1/3.
  if (cycle < n / 4) {
    return {0, 1};
  }
  return {2, 3};
}

ReadRoute read_schedule(std::size_t cycle, std::size_t n) {
  if (cycle >= n / 2) {
    throw CycleOutOfRange("read cycle exceeds n/2 - 1");
  }
  if (cycle % 2 == 0) {
    return {0, 2};
  }
  return {1, 3};
}

// ---- SrmQueue --------------------------------------------------------------

SrmQueue::SrmQueue(std::size_t stages) : slots_(stages) {
  if (stages == 0) {
    throw std::invalid_argument("queue must have at least one stage");
  }
}

std::optional<Word> SrmQueue::tick(std::optional<Word> in) {
  std::optional<Word> departing = slots_.front();
  for (std::size_t i = 0; i + 1 < slots_.size(); ++i) {
    slots_[i] = slots_[i + 1];
  }
  slots_.back() = in;
  if (departing) --occupancy_;
  if (in) ++occupancy_;
  return departing;
}

// ---- CoefficientBank -------------------------------------------------------

CoefficientBank::CoefficientBank(std::size_t n, GuardMode guard, EventSink sink)
    : n_(n), guard_(guard), sink_(std::move(sink)) {
  if (n < 4 || (n & (n - 1)) != 0) {
    throw std::invalid_argument("bank size must be a power of two >= 4");
  }
  queues_.reserve(4);
  for (unsigned q = 0; q < 4; ++q) {
    queues_.emplace_back(n / 4);
  }
}

bool CoefficientBank::violation(MemEvent::Op op, const char* msg) {
  if (sink_) sink_({op, 0, 0});
  if (op == MemEvent::Op::collision) {
    // Trigger combinations that would merge two words are structural misuse,
    // not a data condition; they throw regardless of guard mode.
    throw CollisionDetected(msg);
  }
  if (guard_ == GuardMode::strict) {
    if (op == MemEvent::Op::overflow) throw OverflowDetected(msg);
    throw UnderflowDetected(msg);
  }
  return false;
}

void CoefficientBank::write_pair(Word di0, Word di1) {
  if (mode_ != Mode::writing) {
    violation(MemEvent::Op::overflow, "write trigger on a full bank");
    return;
  }
  write_routed(write_schedule(fill_cycle_, n_), di0, di1);
}

void CoefficientBank::write_routed(const WriteRoute& route, Word di0,
                                   Word di1) {
  if ((route.di0_queue != 0 && route.di0_queue != 2) ||
      route.di1_queue != route.di0_queue + 1) {
    violation(MemEvent::Op::collision,
              "write routing outside the broadcast wiring");
  }
  if (mode_ != Mode::writing) {
    violation(MemEvent::Op::overflow, "write trigger on a full bank");
    return;
  }
  const auto lost0 = queues_[route.di0_queue].tick(di0);
  const auto lost1 = queues_[route.di1_queue].tick(di1);
  if (sink_) {
    sink_({MemEvent::Op::write, route.di0_queue, di0});
    sink_({MemEvent::Op::write, route.di1_queue, di1});
  }
  if (lost0 || lost1) {
    violation(MemEvent::Op::overflow, "word shifted out of a full queue");
  }
  ++fill_cycle_;
  if (fill_cycle_ == n_ / 2) {
    mode_ = Mode::reading;
    read_cycle_ = 0;
    if (sink_) sink_({MemEvent::Op::bank_flip, 0, 0});
  }
}

std::pair<Word, Word> CoefficientBank::read_pair() {
  if (mode_ != Mode::reading) {
    if (!violation(MemEvent::Op::underflow, "read trigger on a filling bank")) {
      return {0, 0};
    }
  }
  return read_routed(read_schedule(read_cycle_, n_));
}

std::pair<Word, Word> CoefficientBank::read_routed(const ReadRoute& route) {
  if (route.low_queue > 1 || route.high_queue != route.low_queue + 2) {
    violation(MemEvent::Op::collision,
              "read routing would merge words from a sibling queue pair");
  }
  if (mode_ != Mode::reading) {
    if (!violation(MemEvent::Op::underflow, "read trigger on a filling bank")) {
      return {0, 0};
    }
  }
  auto low = queues_[route.low_queue].tick(std::nullopt);
  auto high = queues_[route.high_queue].tick(std::nullopt);
  if (!low || !high) {
    // The shift already happened; in permissive mode the schedule still
    // advances and the missing words read back as zero.
    violation(MemEvent::Op::underflow, "read trigger on an empty queue");
  }
  const Word lo = low.value_or(0);
  const Word hi = high.value_or(0);
  if (sink_) {
    sink_({MemEvent::Op::read, route.low_queue, lo});
    sink_({MemEvent::Op::read, route.high_queue, hi});
  }
  ++read_cycle_;
  if (read_cycle_ == n_ / 2) {
    mode_ = Mode::writing;
    fill_cycle_ = 0;
    read_cycle_ = 0;
    if (sink_) sink_({MemEvent::Op::bank_flip, 0, 0});
  }
  return {lo, hi};
}

std::optional<std::pair<Word, Word>> bank_tick(
    CoefficientBank& bank, const BankTriggers& triggers,
    std::optional<std::pair<Word, Word>> inputs) {
  if (triggers.write && triggers.read) {
    throw CollisionDetected("bank triggered for write and read in one cycle");
  }
  if (triggers.write) {
    if (!inputs) {
      throw ScheduleViolation("write trigger without input words");
    }
    bank.write_routed(*triggers.write, inputs->first, inputs->second);
    return std::nullopt;
  }
  if (triggers.read) {
    return bank.read_routed(*triggers.read);
  }
  return std::nullopt;
}

// ---- Csrm ------------------------------------------------------------------

Csrm::Csrm(std::size_t stages, EventSink sink)
    : slots_(stages, 0), sink_(std::move(sink)) {
  if (stages == 0) {
    throw std::invalid_argument("twiddle store must have at least one stage");
  }
}

void Csrm::begin_load() {
  load_mode_ = true;
  loaded_ = 0;
  head_ = 0;
}

void Csrm::load_word(DWord w) {
  if (!load_mode_) {
    // The load gate is closed; honoring the write would corrupt circulating
    // data, which the hardware's load control makes impossible.
    throw std::logic_error("twiddle load outside the load window");
  }
  if (loaded_ >= slots_.size()) {
    throw OverflowDetected("twiddle load past the store capacity");
  }
  slots_[loaded_++] = w;
}

void Csrm::end_load() {
  if (!load_mode_) {
    throw std::logic_error("load window is not open");
  }
  if (loaded_ != slots_.size()) {
    throw std::logic_error("twiddle store only partially loaded");
  }
  load_mode_ = false;
}

DWord Csrm::tick() {
  if (load_mode_) {
    throw ScheduleViolation("twiddle rotation triggered during loading");
  }
  const DWord v = slots_[head_];
  head_ = (head_ + 1) % slots_.size();
  if (sink_) sink_({MemEvent::Op::csrm_rotate, 0, static_cast<Word>(v)});
  return v;
}

DWord csrm_tick(Csrm& c) { return c.tick(); }

}  // namespace scentt::memsim
