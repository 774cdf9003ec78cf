// SPDX-License-Identifier: Apache-2.0

#include "scentt/modmath.hpp"

#include <algorithm>
#include <cassert>

namespace scentt::modmath {

namespace {

// High and low 128-bit halves of a full 256-bit product.
struct Wide256 {
  DWord hi;
  DWord lo;
};

Wide256 mul_wide(DWord a, DWord b) {
  const DWord mask = (static_cast<DWord>(1) << 64) - 1;
  const DWord a0 = a & mask, a1 = a >> 64;
  const DWord b0 = b & mask, b1 = b >> 64;
  const DWord p00 = a0 * b0;
  const DWord p01 = a0 * b1;
  const DWord p10 = a1 * b0;
  const DWord p11 = a1 * b1;
  const DWord mid = (p00 >> 64) + (p01 & mask) + (p10 & mask);
  Wide256 r;
  r.lo = (mid << 64) | (p00 & mask);
  r.hi = p11 + (p01 >> 64) + (p10 >> 64) + (mid >> 64);
  return r;
}

// floor(a * b / 2^shift) for shift in (0, 256); result must fit 128 bits.
DWord mul_shift(DWord a, DWord b, unsigned shift) {
  const Wide256 p = mul_wide(a, b);
  if (shift >= 128) {
    return shift == 128 ? p.hi : (p.hi >> (shift - 128));
  }
  return (p.hi << (128 - shift)) | (p.lo >> shift);
}

DWord pow_mod_dword(DWord base, Word exp, Word q) {
  DWord result = 1;
  DWord b = base % q;
  while (exp) {
    if (exp & 1) result = (result * b) % q;
    b = (b * b) % q;
    exp >>= 1;
  }
  return result;
}

std::vector<Word> prime_factors(Word n) {
  std::vector<Word> factors;
  for (Word p = 2; p * p <= n; p += (p == 2 ? 1 : 2)) {
    if (n % p == 0) {
      factors.push_back(p);
      while (n % p == 0) n /= p;
    }
  }
  if (n > 1) factors.push_back(n);
  return factors;
}

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

unsigned log2_exact(std::size_t n) {
  unsigned k = 0;
  while ((std::size_t{1} << k) < n) ++k;
  return k;
}

void fill_tables(ModulusContext& ctx) {
  ctx.twiddles.resize(ctx.n);
  ctx.shoup_twiddles.resize(ctx.n);
  Word cur = 1;
  for (std::size_t j = 0; j < ctx.n; ++j) {
    ctx.twiddles[j] = cur;
    ctx.shoup_twiddles[j] = shoup_precompute(cur, ctx);
    cur = mul_mod(cur, ctx.omega, ctx.q);
  }
  ctx.omega_inv = ctx.n > 1 ? ctx.twiddles[ctx.n - 1] : 1;
  ctx.n_inv = inv_mod(static_cast<Word>(ctx.n % ctx.q), ctx.q);
  if (ctx.w == 64) {
    // 2^128 = k*q + r with r >= 1 for odd q, so floor((2^128 - 1)/q) = k.
    ctx.barrett_mu = ~static_cast<DWord>(0) / ctx.q;
  } else {
    ctx.barrett_mu = (static_cast<DWord>(1) << (2 * ctx.w)) / ctx.q;
  }
}

void validate_parameters(Word q, std::size_t n, unsigned w, unsigned beta) {
  if (n == 0 || !is_power_of_two(n)) {
    throw std::invalid_argument("transform size must be a power of two");
  }
  if (w < 4 || w > 64) {
    throw std::invalid_argument("word width must lie in [4, 64]");
  }
  if (beta != w + 1) {
    throw std::invalid_argument("companion width must equal word width + 1");
  }
  if (w < 64 && q >= (Word{1} << (w - 1))) {
    throw ModulusTooLarge("modulus does not fit the datapath: q >= 2^(w-1)");
  }
  if (w == 64 && q >= (Word{1} << 63)) {
    throw ModulusTooLarge("modulus does not fit the datapath: q >= 2^63");
  }
  if (q < 3 || !is_prime(q)) {
    throw NotPrime("modulus is not an odd prime");
  }
}

}  // namespace

Word bit_reverse(Word i, unsigned bits) {
  assert(bits <= 63);
  assert(bits == 63 || i < (Word{1} << bits));
  Word r = 0;
  for (unsigned b = 0; b < bits; ++b) {
    r = (r << 1) | ((i >> b) & 1);
  }
  return r;
}

Word rotate_left_bits(Word i, unsigned k, unsigned bits) {
  assert(bits >= 1 && bits <= 63);
  assert(i < (Word{1} << bits));
  const unsigned s = k % bits;
  if (s == 0) return i;
  const Word mask = (Word{1} << bits) - 1;
  return ((i << s) | (i >> (bits - s))) & mask;
}

bool is_prime(Word n) {
  if (n < 2) return false;
  for (Word p : {Word{2}, Word{3}, Word{5}, Word{7}, Word{11}, Word{13},
                 Word{17}, Word{19}, Word{23}, Word{29}, Word{31}, Word{37}}) {
    if (n % p == 0) return n == p;
  }
  Word d = n - 1;
  unsigned r = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++r;
  }
  // These witnesses decide primality for every n < 3.3e24, so for all 64 bits.
  for (Word a : {Word{2}, Word{3}, Word{5}, Word{7}, Word{11}, Word{13},
                 Word{17}, Word{19}, Word{23}, Word{29}, Word{31}, Word{37}}) {
    DWord x = pow_mod_dword(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool witness = true;
    for (unsigned i = 1; i < r; ++i) {
      x = (x * x) % n;
      if (x == n - 1) {
        witness = false;
        break;
      }
    }
    if (witness) return false;
  }
  return true;
}

Word pow_mod(Word base, Word exp, Word q) {
  return static_cast<Word>(pow_mod_dword(base, exp, q));
}

Word inv_mod(Word a, Word q) {
  assert(a % q != 0);
  return pow_mod(a % q, q - 2, q);
}

Word smallest_generator(Word q) {
  const std::vector<Word> factors = prime_factors(q - 1);
  for (Word g = 2; g < q; ++g) {
    bool ok = true;
    for (Word p : factors) {
      if (pow_mod(g, (q - 1) / p, q) == 1) {
        ok = false;
        break;
      }
    }
    if (ok) return g;
  }
  throw NoRootExists("no generator found (modulus not prime?)");
}

ModulusContext make_context(Word q, std::size_t n, unsigned w, unsigned beta) {
  validate_parameters(q, n, w, beta);
  ModulusContext ctx;
  ctx.q = q;
  ctx.n = n;
  ctx.w = w;
  ctx.beta = beta;
  ctx.log2n = log2_exact(n);
  if (n == 1) {
    ctx.omega = 1;
  } else {
    if ((q - 1) % n != 0) {
      throw NoRootExists("q - 1 is not divisible by the transform size");
    }
    const Word g = smallest_generator(q);
    const Word root = pow_mod(g, (q - 1) / static_cast<Word>(n), q);
    // All primitive n-th roots are root^k for k coprime to n; n is a power of
    // two, so k runs over the odd residues. Take the smallest value.
    Word best = root;
    const Word step = mul_mod(root, root, q);
    Word cur = root;
    for (std::size_t k = 3; k < n; k += 2) {
      cur = mul_mod(cur, step, q);
      if (cur < best) best = cur;
    }
    ctx.omega = best;
  }
  fill_tables(ctx);
  return ctx;
}

ModulusContext make_context_with_root(Word q, std::size_t n, Word omega,
                                      unsigned w, unsigned beta) {
  validate_parameters(q, n, w, beta);
  if (omega == 0 || omega >= q) {
    throw std::invalid_argument("root must lie in [1, q)");
  }
  if (pow_mod(omega, static_cast<Word>(n), q) != 1 ||
      (n > 1 && pow_mod(omega, static_cast<Word>(n / 2), q) == 1)) {
    throw NoRootExists("supplied value is not a primitive n-th root");
  }
  ModulusContext ctx;
  ctx.q = q;
  ctx.n = n;
  ctx.w = w;
  ctx.beta = beta;
  ctx.log2n = log2_exact(n);
  ctx.omega = omega;
  fill_tables(ctx);
  return ctx;
}

Word mod_add(Word a, Word b, const ModulusContext& ctx) {
  assert(a < ctx.q && b < ctx.q);
  Word r = a + b;
  if (r >= ctx.q) r -= ctx.q;
  return r;
}

Word mod_sub(Word a, Word b, const ModulusContext& ctx) {
  assert(a < ctx.q && b < ctx.q);
  Word r = a - b;
  if (a < b) r += ctx.q;
  return r;
}

DWord shoup_precompute(Word b, const ModulusContext& ctx) {
  assert(b < ctx.q);
  return (static_cast<DWord>(b) << ctx.beta) / ctx.q;
}

DWord shoup_mul_unreduced(Word a, Word b, DWord b_prime,
                          const ModulusContext& ctx) {
  assert(a < ctx.q && b < ctx.q);
  // t underestimates the true quotient by at most one, so the remainder
  // candidate a*b - t*q stays within [0, 2q).
  const DWord t = mul_shift(a, b_prime, ctx.beta);
  return static_cast<DWord>(a) * b - t * ctx.q;
}

Word shoup_mul(Word a, Word b, DWord b_prime, const ModulusContext& ctx) {
  DWord r = shoup_mul_unreduced(a, b, b_prime, ctx);
  if (r >= ctx.q) r -= ctx.q;
  return static_cast<Word>(r);
}

Word barrett_mul(Word a, Word b, const ModulusContext& ctx) {
  assert(a < ctx.q && b < ctx.q);
  const DWord x = static_cast<DWord>(a) * b;
  const DWord t = mul_shift(x, ctx.barrett_mu, 2 * ctx.w);
  DWord r = x - t * ctx.q;
  if (r >= ctx.q) r -= ctx.q;
  if (r >= ctx.q) r -= ctx.q;
  return static_cast<Word>(r);
}

}  // namespace scentt::modmath
