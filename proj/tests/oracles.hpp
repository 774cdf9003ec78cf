// SPDX-License-Identifier: Apache-2.0

// Independent oracles for the test suite. Everything here is computed the
// slow, obvious way (schoolbook loops, plain counters, exhaustive search) so
// the library under test never verifies itself.

#ifndef SCENTT_TESTS_ORACLES_HPP
#define SCENTT_TESTS_ORACLES_HPP

#include <algorithm>
#include <cstdint>
#include <functional>
#include <queue>
#include <random>
#include <utility>
#include <vector>

#include "scentt/mac.hpp"
#include "scentt/memsim.hpp"

namespace oracles {

using U64 = std::uint64_t;
using U128 = unsigned __int128;

// ===== plain modular arithmetic =====

inline U64 naive_mulmod(U64 a, U64 b, U64 q) {
  return static_cast<U64>(static_cast<U128>(a) * b % q);
}

inline U64 naive_powmod(U64 base, U64 exp, U64 q) {
  U64 acc = 1 % q;
  for (U64 i = 0; i < exp; ++i) acc = naive_mulmod(acc, base, q);
  return acc;
}

// Direct evaluation of the transform definition, one power at a time.
inline std::vector<U64> naive_dft(const std::vector<U64>& a, U64 q,
                                  U64 omega) {
  const std::size_t n = a.size();
  std::vector<U64> out(n, 0);
  for (std::size_t k = 0; k < n; ++k) {
    U128 acc = 0;
    for (std::size_t i = 0; i < n; ++i)
      acc += static_cast<U128>(a[i]) *
             naive_powmod(omega, static_cast<U64>(i * k % n), q);
    out[k] = static_cast<U64>(acc % q);
  }
  return out;
}

// ===== schoolbook convolutions =====

inline std::vector<U64> schoolbook_cyclic(const std::vector<U64>& a,
                                          const std::vector<U64>& b, U64 q) {
  const std::size_t n = a.size();
  std::vector<U64> out(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (a[i] == 0) continue;
    for (std::size_t j = 0; j < n; ++j)
      out[(i + j) % n] = static_cast<U64>(
          (out[(i + j) % n] + static_cast<U128>(a[i]) * b[j]) % q);
  }
  return out;
}

// Products wrapping past x^(n-1) come back negated: x^n = -1.
inline std::vector<U64> schoolbook_negacyclic(const std::vector<U64>& a,
                                              const std::vector<U64>& b,
                                              U64 q) {
  const std::size_t n = a.size();
  std::vector<U64> out(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (a[i] == 0) continue;
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t k = (i + j) % n;
      const U64 term = naive_mulmod(a[i], b[j], q);
      if (i + j < n)
        out[k] = (out[k] + term) % q;
      else
        out[k] = (out[k] + q - term) % q;
    }
  }
  return out;
}

// ===== controller trigger schedule =====

// What the memory-access controller must emit at a given cycle, read off a
// plain binary counter instead of flip-flop state walks.
inline scentt::mac::TriggerSet trigger_table(std::size_t cycle,
                                             std::size_t n) {
  std::size_t d = 0;
  while ((static_cast<std::size_t>(1) << d) < n) ++d;
  const std::size_t c = cycle % n;
  scentt::mac::TriggerSet t;
  t.writing_bank = static_cast<unsigned>((c >> (d - 1)) & 1);
  t.reading_bank = 1u - t.writing_bank;
  const bool upper_quarter = ((c >> (d - 2)) & 1) != 0;
  t.write = upper_quarter ? scentt::memsim::WriteRoute{2, 3}
                          : scentt::memsim::WriteRoute{0, 1};
  const bool odd = (c & 1) != 0;
  t.read = odd ? scentt::memsim::ReadRoute{1, 3}
               : scentt::memsim::ReadRoute{0, 2};
  t.bank_flip = cycle > 0 && cycle % (n / 2) == 0;
  t.csrm_trigger = true;
  return t;
}

// ===== small-DAG slot search =====

struct TinyDag {
  std::size_t nodes = 0;
  std::vector<std::pair<std::size_t, std::size_t>> edges;
};

// Minimum DFF total over every feasible slot assignment, by exhaustive
// enumeration. Slots are confined to windows that provably still contain an
// optimum: earliest start below, nodes - 1 minus the longest downstream
// chain above (empty levels can always be squeezed out).
inline std::size_t min_dffs_exhaustive(const TinyDag& g, unsigned k) {
  const std::size_t v_count = g.nodes;
  if (v_count == 0) return 0;
  std::vector<std::vector<std::size_t>> preds(v_count), succs(v_count);
  std::vector<std::size_t> indeg(v_count, 0);
  for (auto [s, d] : g.edges) {
    preds[d].push_back(s);
    succs[s].push_back(d);
    ++indeg[d];
  }
  std::vector<std::size_t> topo;
  std::queue<std::size_t> ready;
  for (std::size_t v = 0; v < v_count; ++v)
    if (indeg[v] == 0) ready.push(v);
  while (!ready.empty()) {
    const std::size_t v = ready.front();
    ready.pop();
    topo.push_back(v);
    for (std::size_t d : succs[v])
      if (--indeg[d] == 0) ready.push(d);
  }
  std::vector<std::size_t> asap(v_count, 0), tail(v_count, 0);
  for (std::size_t v : topo)
    for (std::size_t d : succs[v]) asap[d] = std::max(asap[d], asap[v] + 1);
  for (auto it = topo.rbegin(); it != topo.rend(); ++it)
    for (std::size_t d : succs[*it])
      tail[*it] = std::max(tail[*it], tail[d] + 1);

  std::vector<std::size_t> slot(v_count, 0);
  std::size_t best = static_cast<std::size_t>(-1);
  const auto span_cost = [k](std::size_t delta) {
    return (delta + k - 1) / k - 1;
  };
  const std::function<void(std::size_t, std::size_t)> walk =
      [&](std::size_t pos, std::size_t cost) {
        if (cost >= best) return;
        if (pos == topo.size()) {
          best = cost;
          return;
        }
        const std::size_t v = topo[pos];
        std::size_t lo = asap[v];
        for (std::size_t p : preds[v]) lo = std::max(lo, slot[p] + 1);
        const std::size_t hi = (v_count - 1) - tail[v];
        for (std::size_t s = lo; s <= hi; ++s) {
          std::size_t added = 0;
          for (std::size_t p : preds[v]) added += span_cost(s - slot[p]);
          slot[v] = s;
          walk(pos + 1, cost + added);
        }
      };
  walk(0, 0);
  return best;
}

// Layered random DAG; every non-source node gets at least one predecessor so
// nothing floats free.
inline TinyDag random_dag(std::size_t nodes, std::mt19937_64& rng,
                          double extra_edge_prob = 0.25) {
  TinyDag g;
  g.nodes = nodes;
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  for (std::size_t v = 1; v < nodes; ++v) {
    std::uniform_int_distribution<std::size_t> pick(0, v - 1);
    g.edges.emplace_back(pick(rng), v);
    while (coin(rng) < extra_edge_prob) {
      const std::size_t u = pick(rng);
      g.edges.emplace_back(u, v);
      if (g.edges.size() > nodes * 4) break;
    }
  }
  return g;
}

inline std::vector<U64> random_coeffs(std::size_t n, U64 q,
                                      std::mt19937_64& rng) {
  std::uniform_int_distribution<U64> dist(0, q - 1);
  std::vector<U64> out(n);
  for (auto& x : out) x = dist(rng);
  return out;
}

}  // namespace oracles

#endif  // SCENTT_TESTS_ORACLES_HPP
