// SPDX-License-Identifier: Apache-2.0

/// @file reference.hpp
/// @brief Golden transform implementations used as oracles by the simulator.
///
/// Everything here computes with the plain double-width reduction
/// (modmath::mul_mod), deliberately avoiding the Shoup and Barrett datapaths
/// so that differential tests against the cycle model exercise two genuinely
/// independent arithmetic routes.

#ifndef SCENTT_REFERENCE_HPP
#define SCENTT_REFERENCE_HPP

#include <cstddef>
#include <vector>

#include "scentt/modmath.hpp"

namespace scentt::reference {

using modmath::ModulusContext;
using modmath::Order;
using modmath::Polynomial;

/// O(n^2) evaluation of the transform straight from its defining sum:
/// out[r] = sum_i a[i] * omega^(r*i). Natural order in, natural order out.
Polynomial dft_bruteforce(const Polynomial& a, const ModulusContext& ctx);

/// Radix-2 decimation-in-time transform: natural-order input, stages pair
/// elements at distances n/2, n/4, ..., 1 (the constant-geometry stage order),
/// bit-reversed intermediate storage, output normalized to natural order.
Polynomial ntt_ct(const Polynomial& a, const ModulusContext& ctx);

/// Inverse transform (same stage structure over omega^-1, scaled by 1/n).
Polynomial intt(const Polynomial& a, const ModulusContext& ctx);

/// Negacyclic product via psi-weighting: requires q = 1 (mod 2n) so that a
/// square root psi of omega exists (psi is then automatically a primitive
/// 2n-th root). Throws NoPsiExists otherwise.
Polynomial negacyclic_mul(const Polynomial& a, const Polynomial& b,
                          const ModulusContext& ctx);

/// The deterministically chosen weight root: smallest square root of omega.
Word find_psi(const ModulusContext& ctx);

/// One butterfly as executed at some stage of ntt_ct.
struct ButterflyRecord {
  std::size_t slot_a;        // base slot (pair bit clear)
  std::size_t slot_b;        // slot_a + 2^(s-1-stage)
  Word a_in, b_in;
  std::size_t tw_exponent;   // omega power consumed
  Word tw;
  Word a_out, b_out;
};

/// All butterflies of one stage, in slot-scan generation order.
struct StageSnapshot {
  std::vector<ButterflyRecord> butterflies;
};

/// Transform result plus the complete per-stage butterfly record.
struct NttTrace {
  Polynomial output;
  std::vector<StageSnapshot> stages;
};

/// ntt_ct with full instrumentation; the snapshots are the oracle against
/// which the streaming pipeline's consumed-butterfly multisets are compared.
NttTrace ntt_ct_traced(const Polynomial& a, const ModulusContext& ctx);

/// One twiddle as consumed by the stage-k processing element.
struct TwiddleEntry {
  Word tw;
  DWord tw_shoup;
  std::size_t exponent;
};

/// The 2^stage twiddle words PE_stage cycles through, in consumption order:
/// entry t is the value used at read cycles c with c mod 2^stage == t.
/// Derived by symbolic simulation of the instrumented reference transform
/// mapped through the constant-geometry read schedule (read cycle c touches
/// the butterfly whose base slot is rotate-right(c, stage)).
std::vector<TwiddleEntry> twiddle_schedule(std::size_t stage,
                                           const ModulusContext& ctx);

}  // namespace scentt::reference

#endif  // SCENTT_REFERENCE_HPP
