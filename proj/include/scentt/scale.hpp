// SPDX-License-Identifier: Apache-2.0

/// @file scale.hpp
/// @brief Composing large transforms from fixed-size passes, plus cost and
/// parameter estimates for the workloads that need them.

#ifndef SCENTT_SCALE_HPP
#define SCENTT_SCALE_HPP

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "scentt/modmath.hpp"

namespace scentt::scale {

using modmath::ModulusContext;
using modmath::Polynomial;

/// A length-m transform pass: natural-order input to natural-order
/// evaluations under the supplied context.
using Kernel =
    std::function<Polynomial(const Polynomial&, const ModulusContext&)>;

/// Four-step decomposition of an n = m*m point transform: column passes,
/// a pointwise root-power correction, then row passes, every pass length m
/// and delegated to `kernel`. The sub-context's root is the big root raised
/// to the m-th power, so the result matches the direct n-point transform
/// exactly. Requires natural-order input of length ctx.n with ctx.n an even
/// power of two (throws SizeMismatch otherwise).
Polynomial four_step_ntt(const Polynomial& a, const ModulusContext& ctx,
                         const Kernel& kernel);

/// Cycle budget for an n_big-point transform built from 128-point passes.
/// Each pass occupies a 64-cycle issue window; `lanes` engines run passes in
/// parallel; the two matrix phases (columns, rows) each cover n_big / 128
/// passes. Inter-phase reorder traffic is assumed to overlap compute and is
/// not billed; `flush_cycles` covers draining the engines between phases.
struct BigTransformCost {
  std::size_t n_big = 0;
  unsigned lanes = 1;
  std::size_t flush_cycles = 0;
  std::size_t cycles_no_flush = 0;
  std::size_t cycles = 0;  // cycles_no_flush + flush_cycles
  double clock_period_ps = 0.0;
  double wall_ns_no_flush = 0.0;
  double wall_ns = 0.0;
};

BigTransformCost big_ntt_cycles(std::size_t n_big, unsigned lanes,
                                std::size_t flush_cycles = 400,
                                double clock_period_ps = 29.4);

/// Throughput estimate for one key-switch at a given level count, assuming
/// 2600 cycles per level and the recorded arithmetic-unit census.
struct KeyswitchCost {
  unsigned levels = 0;
  std::size_t cycles = 0;
  long long ps_per_op = 0;      // cycles * clock period, nearest picosecond
  long long ops_per_s = 0;      // headline integer rate, from ps_per_op
  double ops_per_s_exact = 0.0; // 1e12 / (cycles * clock period), unrounded
  unsigned ntt_modules = 90;
  unsigned multipliers = 302;
  unsigned adders = 150;

  double speedup_over(long long baseline_ops_per_s) const;
};

KeyswitchCost keyswitch_estimate(unsigned levels = 8,
                                 double clock_period_ps = 29.4118);

/// Ring dimension check for a security target: n must reach
/// (lambda + 110) / 7.2 * log2(P * q_L).
struct SecurityCheck {
  bool satisfied = false;
  double required_n = 0.0;
  double margin = 0.0;  // n - required_n, negative when unsatisfied
};

SecurityCheck ckks_security_check(std::size_t n, double lambda,
                                  double log_pql);

/// Residue-number-system split of x across pairwise coprime moduli.
/// Throws NotCoprime if any pair shares a factor, OutOfRange if x does not
/// fit the combined range.
std::vector<Word> rns_decompose(Word x, const std::vector<Word>& moduli);

/// Inverse of rns_decompose via incremental (Garner) reconstruction.
Word rns_reconstruct(const std::vector<Word>& residues,
                     const std::vector<Word>& moduli);

}  // namespace scentt::scale

#endif  // SCENTT_SCALE_HPP
