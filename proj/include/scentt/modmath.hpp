// SPDX-License-Identifier: Apache-2.0

/// @file modmath.hpp
/// @brief Modular arithmetic kernels and transform parameter contexts.
///
/// Supplies the word-level building blocks every other component relies on:
/// deterministic primality testing, primitive-root discovery, the two modular
/// multiplier variants implemented by the hardware model (Shoup with a
/// precomputed companion word, Barrett with a precomputed reciprocal), and the
/// bit-manipulation helpers used by the constant-geometry address algebra.

#ifndef SCENTT_MODMATH_HPP
#define SCENTT_MODMATH_HPP

#include <cstddef>
#include <cstdint>
#include <vector>

#include "scentt/errors.hpp"

namespace scentt {

using Word = std::uint64_t;
using DWord = unsigned __int128;

namespace modmath {

/// Coefficient ordering of a Polynomial's storage.
enum class Order { natural, bit_reversed, pipeline };

/// A polynomial over Z_q[x], dense coefficient vector plus an order tag.
struct Polynomial {
  std::vector<Word> coeffs;
  Order order = Order::natural;

  Polynomial() = default;
  explicit Polynomial(std::size_t n, Order o = Order::natural)
      : coeffs(n, 0), order(o) {}
  Polynomial(std::vector<Word> c, Order o) : coeffs(std::move(c)), order(o) {}

  std::size_t size() const { return coeffs.size(); }
  Word& operator[](std::size_t i) { return coeffs[i]; }
  const Word& operator[](std::size_t i) const { return coeffs[i]; }
  bool operator==(const Polynomial& other) const {
    return coeffs == other.coeffs && order == other.order;
  }
};

/// Immutable transform parameter set: modulus, size, root and derived tables.
///
/// Invariants (established by make_context / make_context_with_root):
///  - q is prime, q < 2^(w-1), q = 1 (mod n);
///  - omega is a primitive n-th root of unity (omega^n = 1, omega^(n/2) != 1);
///  - twiddles[j] = omega^j for j in [0, n);
///  - shoup_twiddles[j] = floor(twiddles[j] * 2^beta / q), each < 2^beta;
///  - omega * omega_inv = 1 and n * n_inv = 1 (mod q).
struct ModulusContext {
  Word q = 0;
  std::size_t n = 0;
  unsigned w = 32;
  unsigned beta = 33;
  Word omega = 0;
  Word omega_inv = 0;
  Word n_inv = 0;
  std::vector<Word> twiddles;
  std::vector<DWord> shoup_twiddles;
  DWord barrett_mu = 0;  // floor(2^(2w) / q)
  unsigned log2n = 0;
};

// ---- bit manipulation ------------------------------------------------------

/// Reverse the low `bits` bits of `i`. Requires i < 2^bits and bits <= 63.
Word bit_reverse(Word i, unsigned bits);

/// Rotate the low `bits` bits of `i` left by `k` positions (k may exceed bits).
Word rotate_left_bits(Word i, unsigned k, unsigned bits);

// ---- number theory ---------------------------------------------------------

/// Deterministic Miller-Rabin primality test, valid for all 64-bit inputs.
bool is_prime(Word n);

/// base^exp mod q via square-and-multiply.
Word pow_mod(Word base, Word exp, Word q);

/// Multiplicative inverse mod prime q (Fermat). Requires a != 0 mod q.
Word inv_mod(Word a, Word q);

/// Plain double-width product reduction; the multiplier-independent reference.
inline Word mul_mod(Word a, Word b, Word q) {
  return static_cast<Word>((static_cast<DWord>(a) * b) % q);
}

// ---- context construction --------------------------------------------------

/// Build a context for an n-point transform mod q (n a power of two).
///
/// The root is chosen deterministically as the smallest primitive n-th root of
/// unity in [0, q), found by locating the smallest generator of Z_q^* and
/// minimising over its n-th-root coset. Throws NotPrime, ModulusTooLarge
/// (q >= 2^(w-1)) or NoRootExists (q != 1 mod n).
ModulusContext make_context(Word q, std::size_t n, unsigned w = 32,
                            unsigned beta = 33);

/// Same context construction with a caller-supplied root (validated).
/// Needed when composing transforms whose sub-roots are fixed powers of a
/// larger root rather than the lexicographically smallest choice.
ModulusContext make_context_with_root(Word q, std::size_t n, Word omega,
                                      unsigned w = 32, unsigned beta = 33);

/// Smallest generator of the multiplicative group of Z_q (q prime).
Word smallest_generator(Word q);

// ---- modular operations ----------------------------------------------------

/// (a + b) mod q with a single conditional correction. Requires a, b < q.
Word mod_add(Word a, Word b, const ModulusContext& ctx);

/// (a - b) mod q with a single conditional correction. Requires a, b < q.
Word mod_sub(Word a, Word b, const ModulusContext& ctx);

/// Companion word for Shoup multiplication: floor(b * 2^beta / q).
DWord shoup_precompute(Word b, const ModulusContext& ctx);

/// Shoup product before the final conditional subtraction; lies in [0, 2q).
DWord shoup_mul_unreduced(Word a, Word b, DWord b_prime,
                          const ModulusContext& ctx);

/// a * b mod q using the precomputed companion of b (one conditional subtract).
Word shoup_mul(Word a, Word b, DWord b_prime, const ModulusContext& ctx);

/// a * b mod q via Barrett reduction (at most two conditional subtractions).
Word barrett_mul(Word a, Word b, const ModulusContext& ctx);

}  // namespace modmath
}  // namespace scentt

#endif  // SCENTT_MODMATH_HPP
