// SPDX-License-Identifier: Apache-2.0

#include "scentt/scale.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "scentt/errors.hpp"

namespace scentt::scale {

namespace {

using modmath::Order;

// Extended-gcd inverse; unlike modmath::inv_mod this does not assume a
// prime modulus, only gcd(a, m) == 1.
Word coprime_inverse(Word a, Word m) {
  using S = __int128;
  S old_r = static_cast<S>(a % m), r = m;
  S old_s = 1, s = 0;
  while (r != 0) {
    S q = old_r / r;
    S tmp = old_r - q * r;
    old_r = r;
    r = tmp;
    tmp = old_s - q * s;
    old_s = s;
    s = tmp;
  }
  if (old_r != 1) throw NotCoprime("no modular inverse exists");
  S inv = old_s % static_cast<S>(m);
  if (inv < 0) inv += m;
  return static_cast<Word>(inv);
}

// Validates an RNS basis and returns the combined modulus.
DWord check_basis(const std::vector<Word>& moduli) {
  if (moduli.empty())
    throw std::invalid_argument("RNS basis must not be empty");
  DWord product = 1;
  for (std::size_t i = 0; i < moduli.size(); ++i) {
    if (moduli[i] < 2)
      throw std::invalid_argument("RNS moduli must be at least 2");
    for (std::size_t j = i + 1; j < moduli.size(); ++j)
      if (std::gcd(moduli[i], moduli[j]) != 1)
        throw NotCoprime("RNS moduli must be pairwise coprime");
    product *= moduli[i];
    if (product > static_cast<DWord>(~static_cast<Word>(0)))
      throw std::invalid_argument("combined RNS modulus must fit 64 bits");
  }
  return product;
}

}  // namespace

Polynomial four_step_ntt(const Polynomial& a, const ModulusContext& ctx,
                         const Kernel& kernel) {
  if (a.order != Order::natural)
    throw ContextMismatch("four-step input must be in natural order");
  if (a.size() != ctx.n)
    throw ContextMismatch("four-step input length does not match context");
  if (ctx.n < 4 || ctx.log2n % 2 != 0)
    throw SizeMismatch(
        "four-step needs a transform length that is the square of a power "
        "of two");
  const std::size_t m = static_cast<std::size_t>(1) << (ctx.log2n / 2);
  const ModulusContext sub = modmath::make_context_with_root(
      ctx.q, m, modmath::pow_mod(ctx.omega, m, ctx.q));

  // Column passes: element i2*m + i1 belongs to column i1. The extra
  // twiddle omega^(i1*k1) stitches the two factorization levels together.
  std::vector<std::vector<Word>> col(m);
  std::vector<Word> gather(m);
  for (std::size_t i1 = 0; i1 < m; ++i1) {
    for (std::size_t i2 = 0; i2 < m; ++i2) gather[i2] = a[i2 * m + i1];
    Polynomial c = kernel(Polynomial(gather, Order::natural), sub);
    if (c.size() != m)
      throw SizeMismatch("kernel returned a pass of the wrong length");
    col[i1].resize(m);
    for (std::size_t k1 = 0; k1 < m; ++k1)
      col[i1][k1] =
          modmath::mul_mod(c[k1], ctx.twiddles[(i1 * k1) % ctx.n], ctx.q);
  }

  Polynomial out(ctx.n, Order::natural);
  for (std::size_t k1 = 0; k1 < m; ++k1) {
    for (std::size_t i1 = 0; i1 < m; ++i1) gather[i1] = col[i1][k1];
    Polynomial r = kernel(Polynomial(gather, Order::natural), sub);
    if (r.size() != m)
      throw SizeMismatch("kernel returned a pass of the wrong length");
    for (std::size_t k2 = 0; k2 < m; ++k2) out[k1 + m * k2] = r[k2];
  }
  return out;
}

BigTransformCost big_ntt_cycles(std::size_t n_big, unsigned lanes,
                                std::size_t flush_cycles,
                                double clock_period_ps) {
  if (n_big == 0 || (n_big & (n_big - 1)) != 0 || n_big % 128 != 0)
    throw std::invalid_argument(
        "big transform length must be a power of two divisible by 128");
  if (lanes == 0 || 64 % lanes != 0)
    throw std::invalid_argument("lane count must divide the issue window");
  if (clock_period_ps <= 0.0)
    throw std::invalid_argument("clock period must be positive");

  BigTransformCost cost;
  cost.n_big = n_big;
  cost.lanes = lanes;
  cost.flush_cycles = flush_cycles;
  cost.clock_period_ps = clock_period_ps;
  const std::size_t passes_per_phase = n_big / 128;
  const std::size_t cycles_per_pass = 64 / lanes;
  cost.cycles_no_flush = 2 * passes_per_phase * cycles_per_pass;
  cost.cycles = cost.cycles_no_flush + flush_cycles;
  cost.wall_ns_no_flush =
      static_cast<double>(cost.cycles_no_flush) * clock_period_ps / 1000.0;
  cost.wall_ns = static_cast<double>(cost.cycles) * clock_period_ps / 1000.0;
  return cost;
}

double KeyswitchCost::speedup_over(long long baseline_ops_per_s) const {
  if (baseline_ops_per_s <= 0)
    throw std::invalid_argument("baseline rate must be positive");
  return static_cast<double>(ops_per_s) /
         static_cast<double>(baseline_ops_per_s);
}

KeyswitchCost keyswitch_estimate(unsigned levels, double clock_period_ps) {
  if (levels == 0)
    throw std::invalid_argument("key switching needs at least one level");
  if (clock_period_ps <= 0.0)
    throw std::invalid_argument("clock period must be positive");
  KeyswitchCost cost;
  cost.levels = levels;
  cost.cycles = static_cast<std::size_t>(2600) * levels;
  // Headline integer rate: the per-operation time is settled to the nearest
  // whole picosecond first, then divided into one second. The exact rate is
  // kept alongside; it scales linearly in the period where the rounded
  // figure cannot.
  const double ps_exact = static_cast<double>(cost.cycles) * clock_period_ps;
  cost.ps_per_op = std::llround(ps_exact);
  cost.ops_per_s = 1'000'000'000'000LL / cost.ps_per_op;
  cost.ops_per_s_exact = 1e12 / ps_exact;
  return cost;
}

SecurityCheck ckks_security_check(std::size_t n, double lambda,
                                  double log_pql) {
  if (lambda <= 0.0 || log_pql <= 0.0)
    throw std::invalid_argument(
        "security target and modulus size must be positive");
  SecurityCheck check;
  check.required_n = (lambda + 110.0) / 7.2 * log_pql;
  check.margin = static_cast<double>(n) - check.required_n;
  check.satisfied = check.margin >= 0.0;
  return check;
}

std::vector<Word> rns_decompose(Word x, const std::vector<Word>& moduli) {
  const DWord product = check_basis(moduli);
  if (static_cast<DWord>(x) >= product)
    throw OutOfRange("value exceeds the combined RNS range");
  std::vector<Word> residues(moduli.size());
  for (std::size_t i = 0; i < moduli.size(); ++i) residues[i] = x % moduli[i];
  return residues;
}

Word rns_reconstruct(const std::vector<Word>& residues,
                     const std::vector<Word>& moduli) {
  check_basis(moduli);
  if (residues.size() != moduli.size())
    throw SizeMismatch("residue count does not match the RNS basis");
  for (std::size_t i = 0; i < moduli.size(); ++i)
    if (residues[i] >= moduli[i])
      throw OutOfRange("residue not reduced modulo its channel");

  // Garner: lift channel by channel, keeping the partial value exact.
  Word x = residues[0];
  Word partial_modulus = moduli[0];
  for (std::size_t i = 1; i < moduli.size(); ++i) {
    const Word mi = moduli[i];
    const Word delta = (residues[i] + mi - x % mi) % mi;
    const Word t = modmath::mul_mod(
        delta, coprime_inverse(partial_modulus % mi, mi), mi);
    x = static_cast<Word>(static_cast<DWord>(partial_modulus) * t + x);
    partial_modulus *= mi;
  }
  return x;
}

}  // namespace scentt::scale
