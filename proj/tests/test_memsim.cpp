// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <set>
#include <vector>

#include "doctest.h"
#include "scentt/errors.hpp"
#include "scentt/memsim.hpp"

using namespace scentt;
using namespace scentt::modmath;
using namespace scentt::memsim;

// ===== address layout =====

TEST_CASE("layout_address frozen values") {
  CHECK(layout_address(5, 0, 7) == QueueSlotRef{1, 2});
  CHECK(layout_address(64, 1, 7) == QueueSlotRef{1, 0});
  CHECK(layout_address(0, 0, 7) == QueueSlotRef{0, 0});
  CHECK(layout_address(127, 0, 7) == QueueSlotRef{3, 31});
}

TEST_CASE("layout_address is a bijection at every stage") {
  for (unsigned stage = 0; stage < 7; ++stage) {
    std::set<std::pair<unsigned, std::size_t>> seen;
    for (std::size_t i = 0; i < 128; ++i) {
      const auto ref = layout_address(i, stage, 7);
      CHECK(ref.queue < 4);
      CHECK(ref.slot < 32);
      seen.insert({ref.queue, ref.slot});
    }
    CHECK(seen.size() == 128);
  }
}

TEST_CASE("layout_address rejects out-of-range indices") {
  CHECK_THROWS_AS(layout_address(128, 0, 7), IndexOutOfRange);
  CHECK_THROWS_AS(layout_address(16, 1, 4), IndexOutOfRange);
}

TEST_CASE("read pairs differ in exactly one original index bit") {
  // stage k pops rotated addresses (c, c + n/2); their pre-rotation indices
  // must differ in bit log2n-1-k only: that bit is what the stage combines.
  const unsigned s = 7;
  for (unsigned k = 0; k < s; ++k) {
    for (std::size_t c = 0; c < 64; ++c) {
      const Word lo = rotate_left_bits(static_cast<Word>(c), s - k, s);
      const Word hi = rotate_left_bits(static_cast<Word>(c + 64), s - k, s);
      CHECK((lo ^ hi) == (Word(1) << (s - 1 - k)));
    }
  }
}

// ===== routing schedules =====

TEST_CASE("write_schedule splits the fill in quarters") {
  for (std::size_t c = 0; c < 32; ++c)
    CHECK(write_schedule(c, 128) == WriteRoute{0, 1});
  for (std::size_t c = 32; c < 64; ++c)
    CHECK(write_schedule(c, 128) == WriteRoute{2, 3});
  CHECK_THROWS_AS(write_schedule(64, 128), CycleOutOfRange);
}

TEST_CASE("read_schedule alternates queue pairs") {
  for (std::size_t c = 0; c < 64; ++c) {
    const auto r = read_schedule(c, 128);
    CHECK(r == (c % 2 == 0 ? ReadRoute{0, 2} : ReadRoute{1, 3}));
    CHECK(r.high_queue == r.low_queue + 2);
  }
  CHECK_THROWS_AS(read_schedule(64, 128), CycleOutOfRange);
}

// ===== shift queue =====

TEST_CASE("SrmQueue delays by its length and preserves order") {
  SrmQueue q(3);
  CHECK(q.tick(Word{10}) == std::nullopt);
  CHECK(q.tick(Word{11}) == std::nullopt);
  CHECK(q.tick(Word{12}) == std::nullopt);
  CHECK(q.occupancy() == 3);
  CHECK(q.tick(Word{13}) == Word{10});  // inserted at t=0, emerges at t=3
  CHECK(q.tick(std::nullopt) == Word{11});
  CHECK(q.tick(std::nullopt) == Word{12});
  CHECK(q.tick(std::nullopt) == Word{13});
  CHECK(q.tick(std::nullopt) == std::nullopt);
  CHECK(q.occupancy() == 0);
}

TEST_CASE("SrmQueue tolerates gaps between words") {
  SrmQueue q(2);
  CHECK(q.tick(Word{7}) == std::nullopt);
  CHECK(q.tick(std::nullopt) == std::nullopt);
  CHECK(q.tick(Word{8}) == Word{7});
  CHECK(q.tick(std::nullopt) == std::nullopt);
  CHECK(q.tick(std::nullopt) == Word{8});
}

// ===== coefficient bank =====

namespace {

// Feed a bank exactly the schedule the datapath would: at write cycle c the
// two incoming words carry rotated addresses 2c and 2c+1. Values are the
// original coefficient indices so reads can be checked by pure bit math.
void fill_identity(CoefficientBank& bank, unsigned stage, unsigned log2n) {
  const std::size_t n = static_cast<std::size_t>(1) << log2n;
  for (std::size_t c = 0; c < n / 2; ++c) {
    const Word di0 = rotate_left_bits(static_cast<Word>(2 * c),
                                      log2n - stage, log2n);
    const Word di1 = rotate_left_bits(static_cast<Word>(2 * c + 1),
                                      log2n - stage, log2n);
    bank.write_pair(di0, di1);
  }
}

}  // namespace

TEST_CASE("bank fill/drain reproduces the constant-geometry pop order") {
  for (unsigned log2n : {3u, 4u}) {
    const std::size_t n = static_cast<std::size_t>(1) << log2n;
    for (unsigned stage = 0; stage < log2n; ++stage) {
      CoefficientBank bank(n);
      fill_identity(bank, stage, log2n);
      CHECK(bank.mode() == CoefficientBank::Mode::reading);
      for (std::size_t c = 0; c < n / 2; ++c) {
        const auto [lo, hi] = bank.read_pair();
        CHECK(lo == rotate_left_bits(static_cast<Word>(c), log2n - stage,
                                     log2n));
        CHECK(hi == rotate_left_bits(static_cast<Word>(c + n / 2),
                                     log2n - stage, log2n));
      }
      CHECK(bank.mode() == CoefficientBank::Mode::writing);  // drained
    }
  }
}

TEST_CASE("bank emits flip events at both role changes") {
  std::vector<MemEvent::Op> ops;
  CoefficientBank bank(8, GuardMode::strict,
                       [&](const MemEvent& e) { ops.push_back(e.op); });
  fill_identity(bank, 0, 3);
  for (int c = 0; c < 4; ++c) bank.read_pair();
  const auto flips = std::count(ops.begin(), ops.end(), MemEvent::Op::bank_flip);
  CHECK(flips == 2);
  CHECK(std::count(ops.begin(), ops.end(), MemEvent::Op::write) == 8);
  CHECK(std::count(ops.begin(), ops.end(), MemEvent::Op::read) == 8);
}

TEST_CASE("strict bank guards underflow and overflow") {
  CoefficientBank bank(8);
  CHECK_THROWS_AS(bank.read_pair(), UnderflowDetected);  // nothing written
  fill_identity(bank, 0, 3);
  // full and in reading mode: another write is a hazard
  CHECK_THROWS_AS(bank.write_pair(1, 2), OverflowDetected);
}

TEST_CASE("permissive bank reports and substitutes zeros") {
  std::vector<MemEvent::Op> ops;
  CoefficientBank bank(8, GuardMode::permissive,
                       [&](const MemEvent& e) { ops.push_back(e.op); });
  const auto [lo, hi] = bank.read_pair();
  CHECK(lo == 0);
  CHECK(hi == 0);
  CHECK(std::count(ops.begin(), ops.end(), MemEvent::Op::underflow) >= 1);
}

TEST_CASE("routed interface rejects merging routes") {
  CoefficientBank bank(8);
  // di0 may never land in an odd queue
  CHECK_THROWS_AS(bank.write_routed(WriteRoute{1, 3}, 1, 2),
                  CollisionDetected);
  CHECK_THROWS_AS(bank.write_routed(WriteRoute{0, 2}, 1, 2),
                  CollisionDetected);
  fill_identity(bank, 0, 3);
  CHECK_THROWS_AS(bank.read_routed(ReadRoute{0, 1}), CollisionDetected);
}

TEST_CASE("bank_tick trigger contract") {
  CoefficientBank bank(8);
  BankTriggers both;
  both.write = write_schedule(0, 8);
  both.read = read_schedule(0, 8);
  CHECK_THROWS_AS(bank_tick(bank, both, std::pair<Word, Word>{1, 2}),
                  CollisionDetected);
  BankTriggers write_only;
  write_only.write = write_schedule(0, 8);
  CHECK_THROWS_AS(bank_tick(bank, write_only, std::nullopt),
                  ScheduleViolation);
  CHECK(bank_tick(bank, write_only, std::pair<Word, Word>{1, 2}) ==
        std::nullopt);
  BankTriggers idle;
  CHECK(bank_tick(bank, idle, std::nullopt) == std::nullopt);
}

// ===== circular twiddle store =====

TEST_CASE("Csrm circulates with its load period") {
  Csrm c(4);
  c.begin_load();
  for (DWord w : {10, 11, 12, 13}) c.load_word(w);
  c.end_load();
  for (int round = 0; round < 3; ++round)
    for (DWord want : {10, 11, 12, 13}) CHECK(c.tick() == want);
}

TEST_CASE("Csrm guards its load window") {
  Csrm c(2);
  CHECK_THROWS_AS(c.load_word(1), std::logic_error);
  c.begin_load();
  c.load_word(1);
  CHECK_THROWS_AS(c.tick(), ScheduleViolation);
  c.load_word(2);
  CHECK_THROWS_AS(c.load_word(3), OverflowDetected);  // already full
  c.end_load();
  CHECK(c.tick() == 1);
}

TEST_CASE("Csrm emits rotate events") {
  int rotations = 0;
  Csrm c(2, [&](const MemEvent& e) {
    if (e.op == MemEvent::Op::csrm_rotate) ++rotations;
  });
  c.begin_load();
  c.load_word(5);
  c.load_word(6);
  c.end_load();
  c.tick();
  c.tick();
  CHECK(rotations == 2);
}
