// SPDX-License-Identifier: Apache-2.0

#include "scentt/reference.hpp"

#include <algorithm>
#include <cassert>

namespace scentt::reference {

using modmath::bit_reverse;
using modmath::mul_mod;

namespace {

void check_input(const Polynomial& a, const ModulusContext& ctx) {
  if (a.size() != ctx.n) {
    throw ContextMismatch("polynomial size does not match context size");
  }
  if (a.order != Order::natural) {
    throw ContextMismatch("transform input must be in natural order");
  }
  for (Word c : a.coeffs) {
    if (c >= ctx.q) {
      throw ContextMismatch("coefficient not reduced mod q");
    }
  }
}

// Core decimation-in-time loop. Stage k pairs slots at distance 2^(s-1-k);
// the block with high bits j consumes omega^(2^(s-1-k) * bit_reverse(j, k)).
// `invert` selects the omega^-1 twiddles (exponent negated mod n).
// Leaves the result in bit-reversed slot order inside `v`.
void ct_stages(std::vector<Word>& v, const ModulusContext& ctx, bool invert,
               std::vector<StageSnapshot>* trace) {
  const std::size_t n = ctx.n;
  const unsigned s = ctx.log2n;
  const Word q = ctx.q;
  for (unsigned k = 0; k < s; ++k) {
    const std::size_t stride = n >> (k + 1);
    StageSnapshot* snap = nullptr;
    if (trace) {
      trace->emplace_back();
      snap = &trace->back();
      snap->butterflies.reserve(n / 2);
    }
    for (std::size_t j = 0; j < (std::size_t{1} << k); ++j) {
      std::size_t exponent = stride * bit_reverse(j, k);
      if (invert && exponent != 0) exponent = n - exponent;
      const Word w = ctx.twiddles[exponent];
      for (std::size_t off = 0; off < stride; ++off) {
        const std::size_t p = (j << (s - k)) | off;
        const std::size_t p2 = p + stride;
        const Word a_in = v[p];
        const Word b_in = v[p2];
        const Word t = mul_mod(b_in, w, q);
        const Word a_out = a_in + t >= q ? a_in + t - q : a_in + t;
        const Word b_out = a_in >= t ? a_in - t : a_in + q - t;
        v[p] = a_out;
        v[p2] = b_out;
        if (snap) {
          snap->butterflies.push_back(
              {p, p2, a_in, b_in, exponent, w, a_out, b_out});
        }
      }
    }
  }
}

Polynomial unscramble(const std::vector<Word>& v, const ModulusContext& ctx) {
  Polynomial out(ctx.n, Order::natural);
  for (std::size_t i = 0; i < ctx.n; ++i) {
    out[i] = v[bit_reverse(i, ctx.log2n)];
  }
  return out;
}

}  // namespace

Polynomial dft_bruteforce(const Polynomial& a, const ModulusContext& ctx) {
  check_input(a, ctx);
  const std::size_t n = ctx.n;
  // Narrow moduli allow batching 256 partial products before reducing; wide
  // moduli (w > 32) must reduce every term to keep the accumulator in range.
  const bool reduce_each = ctx.w > 32;
  Polynomial out(n, Order::natural);
  for (std::size_t r = 0; r < n; ++r) {
    DWord acc = 0;
    for (std::size_t i = 0; i < n; ++i) {
      acc += static_cast<DWord>(a[i]) * ctx.twiddles[(r * i) % n];
      if (reduce_each || (i & 0xff) == 0xff) acc %= ctx.q;
    }
    out[r] = static_cast<Word>(acc % ctx.q);
  }
  return out;
}

Polynomial ntt_ct(const Polynomial& a, const ModulusContext& ctx) {
  check_input(a, ctx);
  std::vector<Word> v = a.coeffs;
  ct_stages(v, ctx, false, nullptr);
  return unscramble(v, ctx);
}

NttTrace ntt_ct_traced(const Polynomial& a, const ModulusContext& ctx) {
  check_input(a, ctx);
  NttTrace result;
  std::vector<Word> v = a.coeffs;
  ct_stages(v, ctx, false, &result.stages);
  result.output = unscramble(v, ctx);
  return result;
}

Polynomial intt(const Polynomial& a, const ModulusContext& ctx) {
  check_input(a, ctx);
  std::vector<Word> v = a.coeffs;
  ct_stages(v, ctx, true, nullptr);
  Polynomial out = unscramble(v, ctx);
  for (Word& c : out.coeffs) {
    c = mul_mod(c, ctx.n_inv, ctx.q);
  }
  return out;
}

Word find_psi(const ModulusContext& ctx) {
  if (ctx.n < 2) {
    throw NoPsiExists("negacyclic weighting needs n >= 2");
  }
  if ((ctx.q - 1) % (2 * ctx.n) != 0) {
    throw NoPsiExists("q - 1 is not divisible by 2n; no weight root exists");
  }
  // Take the smallest primitive 2n-th root r. rho = r^2 generates the order-n
  // subgroup, so omega = rho^t for some t; then r^t squares to omega, and any
  // square root of omega is automatically a primitive 2n-th root (its order
  // divides 2n but not n because omega^(n/2) = -1).
  const Word g = modmath::smallest_generator(ctx.q);
  const Word r = modmath::pow_mod(g, (ctx.q - 1) / (2 * ctx.n), ctx.q);
  const Word rho = mul_mod(r, r, ctx.q);
  Word cur = 1;
  for (std::size_t t = 0; t < ctx.n; ++t) {
    if (cur == ctx.omega) {
      const Word psi = modmath::pow_mod(r, static_cast<Word>(t), ctx.q);
      return std::min(psi, ctx.q - psi);
    }
    cur = mul_mod(cur, rho, ctx.q);
  }
  throw NoPsiExists("omega not found in the order-n subgroup");
}

Polynomial negacyclic_mul(const Polynomial& a, const Polynomial& b,
                          const ModulusContext& ctx) {
  check_input(a, ctx);
  check_input(b, ctx);
  const Word psi = find_psi(ctx);
  const Word psi_inv = modmath::inv_mod(psi, ctx.q);
  const std::size_t n = ctx.n;
  Polynomial wa(n, Order::natural), wb(n, Order::natural);
  Word wpow = 1;
  std::vector<Word> weights(n);
  for (std::size_t i = 0; i < n; ++i) {
    weights[i] = wpow;
    wpow = mul_mod(wpow, psi, ctx.q);
  }
  for (std::size_t i = 0; i < n; ++i) {
    wa[i] = mul_mod(a[i], weights[i], ctx.q);
    wb[i] = mul_mod(b[i], weights[i], ctx.q);
  }
  Polynomial fa = ntt_ct(wa, ctx);
  Polynomial fb = ntt_ct(wb, ctx);
  Polynomial prod(n, Order::natural);
  for (std::size_t i = 0; i < n; ++i) {
    prod[i] = mul_mod(fa[i], fb[i], ctx.q);
  }
  Polynomial out = intt(prod, ctx);
  Word upow = 1;
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = mul_mod(out[i], upow, ctx.q);
    upow = mul_mod(upow, psi_inv, ctx.q);
  }
  return out;
}

std::vector<TwiddleEntry> twiddle_schedule(std::size_t stage,
                                           const ModulusContext& ctx) {
  if (stage >= ctx.log2n) {
    throw IndexOutOfRange("stage index exceeds the stage count");
  }
  // Symbolic pass: run the instrumented transform on the zero polynomial and
  // index stage `stage`'s records by base slot, then walk the read schedule.
  // Read cycle c pops the pair whose rotated addresses are (c, c + n/2), i.e.
  // base slot rotate-right(c, stage); its twiddle repeats with period
  // 2^stage, so cycles 0 .. 2^stage - 1 enumerate the resident words.
  const NttTrace trace = ntt_ct_traced(Polynomial(ctx.n), ctx);
  const StageSnapshot& snap = trace.stages[stage];
  std::vector<std::size_t> exponent_at_slot(ctx.n, 0);
  for (const ButterflyRecord& r : snap.butterflies) {
    exponent_at_slot[r.slot_a] = r.tw_exponent;
  }
  const unsigned s = ctx.log2n;
  std::vector<TwiddleEntry> sched;
  sched.reserve(std::size_t{1} << stage);
  for (std::size_t c = 0; c < (std::size_t{1} << stage); ++c) {
    const std::size_t base_slot = modmath::rotate_left_bits(
        static_cast<Word>(c), s - static_cast<unsigned>(stage), s);
    const std::size_t e = exponent_at_slot[base_slot];
    sched.push_back({ctx.twiddles[e], ctx.shoup_twiddles[e], e});
  }
  return sched;
}

}  // namespace scentt::reference
