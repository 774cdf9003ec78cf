// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <fstream>
#include <random>
#include <sstream>
#include <tuple>

#include "doctest.h"
#include "oracles.hpp"
#include "scentt/errors.hpp"
#include "scentt/modmath.hpp"
#include "scentt/pipesim.hpp"
#include "scentt/reference.hpp"

using namespace scentt;
using namespace scentt::modmath;
using namespace scentt::pipesim;

namespace {

std::vector<Polynomial> random_inputs(std::size_t count,
                                      const SimConfig& cfg,
                                      std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Polynomial> polys;
  for (std::size_t i = 0; i < count; ++i)
    polys.emplace_back(oracles::random_coeffs(cfg.n, cfg.q, rng),
                       Order::natural);
  return polys;
}

}  // namespace

// ===== latency accounting =====

TEST_CASE("desk-scale latency report") {
  const auto cfg = SimConfig::desk();  // n=8, q=17, l_bu=5, l_mem=4
  const auto report = latency_report(cfg);
  CHECK(report.num_pes == 3);
  for (std::size_t c : report.per_pe_cycles) CHECK(c == 9);
  CHECK(report.total_latency_cycles == 27);
  CHECK(report.initiation_interval == 4);
}

TEST_CASE("full-scale latency report") {
  const SimConfig cfg;  // n=128 defaults
  const auto report = latency_report(cfg);
  CHECK(report.num_pes == 7);
  for (std::size_t c : report.per_pe_cycles) CHECK(c == 148);
  CHECK(report.total_latency_cycles == 1036);
  CHECK(report.initiation_interval == 64);
  CHECK(report.tw_load_cycles == 64);
  CHECK(report.latency_ns == doctest::Approx(30.4584).epsilon(1e-9));
  CHECK(report.throughput_ntt_per_s == doctest::Approx(531.25e6));
}

TEST_CASE("cost report serializations carry the headline numbers") {
  const auto report = latency_report(SimConfig{});
  const std::string json = report.to_json();
  CHECK(json.find("1036") != std::string::npos);
  CHECK(json.find("initiation_interval") != std::string::npos);
  const std::string csv = report.to_csv();
  CHECK(csv.find("1036") != std::string::npos);
}

// ===== functional equivalence =====

TEST_CASE("pipeline output equals reference transform at desk scale") {
  const auto cfg = SimConfig::desk();
  const auto ctx = make_context(cfg.q, cfg.n);
  const auto inputs = random_inputs(6, cfg, 101);
  const auto perm = derive_output_permutation(cfg);
  const auto result = run_pipeline(inputs, cfg);
  REQUIRE(result.outputs.size() == inputs.size());
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    CHECK(result.outputs[i].order == Order::pipeline);
    CHECK(to_natural(result.outputs[i], perm) ==
          reference::ntt_ct(inputs[i], ctx));
  }
}

TEST_CASE("pipeline output equals reference transform at n=128") {
  const SimConfig cfg;
  const auto ctx = make_context(cfg.q, cfg.n);
  const auto inputs = random_inputs(4, cfg, 102);
  const auto perm = derive_output_permutation(cfg);
  const auto result = run_pipeline(inputs, cfg);
  for (std::size_t i = 0; i < inputs.size(); ++i)
    CHECK(to_natural(result.outputs[i], perm) ==
          reference::ntt_ct(inputs[i], ctx));
}

TEST_CASE("raw output order is the bit-reversal permutation") {
  for (std::size_t n : {8u, 16u, 128u}) {
    SimConfig cfg = n == 8 ? SimConfig::desk() : SimConfig{};
    cfg.n = n;
    if (cfg.l_mem < n / 2) cfg.l_mem = n / 2;
    unsigned s = 0;
    while ((1u << s) < n) ++s;
    const auto perm = derive_output_permutation(cfg);
    REQUIRE(perm.size() == n);
    for (std::size_t pos = 0; pos < n; ++pos)
      CHECK(perm[pos] == bit_reverse(static_cast<Word>(pos), s));
  }
}

// ===== timing properties =====

TEST_CASE("measured latency and interval match the report") {
  for (bool desk : {true, false}) {
    const SimConfig cfg = desk ? SimConfig::desk() : SimConfig{};
    const auto report = latency_report(cfg);
    const auto result = run_pipeline(random_inputs(3, cfg, 103), cfg);
    REQUIRE(result.report.measured_latency_cycles.has_value());
    REQUIRE(result.report.measured_initiation_interval.has_value());
    CHECK(*result.report.measured_latency_cycles ==
          report.total_latency_cycles);
    CHECK(*result.report.measured_initiation_interval ==
          report.initiation_interval);
    CHECK(result.report.transforms_completed == 3);
  }
}

TEST_CASE("initiation interval is n/2 regardless of latency constants") {
  SimConfig cfg = SimConfig::desk();
  cfg.l_bu = 3;
  cfg.l_mem = 7;  // longer than the minimum fill
  const auto ctx = make_context(cfg.q, cfg.n);
  const auto inputs = random_inputs(5, cfg, 104);
  const auto perm = derive_output_permutation(cfg);
  const auto result = run_pipeline(inputs, cfg);
  CHECK(*result.report.measured_initiation_interval == cfg.n / 2);
  for (std::size_t i = 0; i < inputs.size(); ++i)
    CHECK(to_natural(result.outputs[i], perm) ==
          reference::ntt_ct(inputs[i], ctx));
}

TEST_CASE("idle gaps between transforms do not corrupt results") {
  SimConfig cfg = SimConfig::desk();
  cfg.idle_gap = 3;
  const auto ctx = make_context(cfg.q, cfg.n);
  const auto inputs = random_inputs(4, cfg, 105);
  const auto perm = derive_output_permutation(cfg);
  const auto result = run_pipeline(inputs, cfg);
  REQUIRE(result.outputs.size() == 4);
  for (std::size_t i = 0; i < inputs.size(); ++i)
    CHECK(to_natural(result.outputs[i], perm) ==
          reference::ntt_ct(inputs[i], ctx));
}

// ===== traces and taps =====

TEST_CASE("traces are byte-stable across runs") {
  SimConfig cfg = SimConfig::desk();
  cfg.record_trace = true;
  const auto inputs = random_inputs(2, cfg, 106);
  std::ostringstream first, second;
  run_pipeline(inputs, cfg).trace.write_ndjson(first);
  run_pipeline(inputs, cfg).trace.write_ndjson(second);
  CHECK(first.str() == second.str());
  CHECK(first.str().find("\"event\"") != std::string::npos);
  CHECK(first.str().find("output") != std::string::npos);
}

TEST_CASE("per-element taps match the reference stage records") {
  SimConfig cfg;
  cfg.n = 16;
  cfg.l_mem = 8;
  cfg.l_bu = 6;
  cfg.record_taps = true;
  const auto ctx = make_context(cfg.q, cfg.n);
  const auto inputs = random_inputs(1, cfg, 107);

  Pipeline pipe(cfg);
  for (std::size_t c = 0; c < cfg.n / 2; ++c)
    pipe.tick(std::pair<Word, Word>{inputs[0][2 * c], inputs[0][2 * c + 1]});
  while (pipe.outputs().empty()) pipe.tick(std::nullopt);

  const auto trace = reference::ntt_ct_traced(inputs[0], ctx);
  using Tap = std::tuple<Word, Word, Word>;
  for (std::size_t pe = 0; pe < 4; ++pe) {
    std::vector<Tap> got, want;
    for (const auto& t : pipe.taps(pe)) got.emplace_back(t.a_in, t.b_in, t.tw);
    for (const auto& b : trace.stages[pe].butterflies)
      want.emplace_back(b.a_in, b.b_in, b.tw);
    std::sort(got.begin(), got.end());
    std::sort(want.begin(), want.end());
    CHECK(got == want);  // same work, possibly different issue order
  }
}

// ===== configuration =====

TEST_CASE("config file round trip") {
  const char* path = "pipesim_cfg_roundtrip.txt";
  {
    std::ofstream out(path);
    out << "# comment line\n"
        << "n = 16\n"
        << "q = 257\n"
        << "l_bu = 11\n"
        << "l_mem = 9\n"
        << "guard = permissive\n"
        << "record_trace = true\n"
        << "idle_gap = 2\n"
        << "clock_period_ps = 30.5\n";
  }
  const auto cfg = SimConfig::from_file(path);
  CHECK(cfg.n == 16);
  CHECK(cfg.q == 257);
  CHECK(cfg.l_bu == 11);
  CHECK(cfg.l_mem == 9);
  CHECK(cfg.guard == memsim::GuardMode::permissive);
  CHECK(cfg.record_trace);
  CHECK(cfg.idle_gap == 2);
  CHECK(cfg.clock_period_ps == doctest::Approx(30.5));
}

TEST_CASE("config rejects unknown keys and bad shapes") {
  const char* path = "pipesim_cfg_bad.txt";
  {
    std::ofstream out(path);
    out << "frequency = 12\n";
  }
  CHECK_THROWS_AS(SimConfig::from_file(path), std::invalid_argument);

  SimConfig slow;
  slow.l_mem = 10;  // below the n/2 fill floor for n=128
  CHECK_THROWS_AS(validate(slow), std::invalid_argument);
  SimConfig odd;
  odd.n = 24;
  CHECK_THROWS_AS(validate(odd), std::invalid_argument);
}

TEST_CASE("per-element memory latencies") {
  const char* path = "pipesim_cfg_per_pe.txt";
  {
    std::ofstream out(path);
    out << "n = 8\nq = 17\nl_bu = 5\n"
        << "l_mem_per_pe = 4, 5, 6\n";
  }
  const auto cfg = SimConfig::from_file(path);
  REQUIRE(cfg.l_mem_per_pe.size() == 3);
  CHECK(cfg.mem_latency(0) == 4);
  CHECK(cfg.mem_latency(2) == 6);
  const auto ctx = make_context(cfg.q, cfg.n);
  const auto inputs = random_inputs(3, cfg, 108);
  const auto perm = derive_output_permutation(cfg);
  const auto result = run_pipeline(inputs, cfg);
  for (std::size_t i = 0; i < inputs.size(); ++i)
    CHECK(to_natural(result.outputs[i], perm) ==
          reference::ntt_ct(inputs[i], ctx));
  // uneven latencies stretch the pipe but keep the issue rate
  CHECK(*result.report.measured_initiation_interval == cfg.n / 2);
}

TEST_CASE("pipeline rejects mismatched inputs") {
  const auto cfg = SimConfig::desk();
  Polynomial wrong_size(4, Order::natural);
  CHECK_THROWS_AS(run_pipeline({wrong_size}, cfg), ContextMismatch);
  Polynomial wrong_order(8, Order::bit_reversed);
  CHECK_THROWS_AS(run_pipeline({wrong_order}, cfg), ContextMismatch);
  Polynomial unreduced(8, Order::natural);
  unreduced[0] = 17;
  CHECK_THROWS_AS(run_pipeline({unreduced}, cfg), ContextMismatch);
}

TEST_CASE("to_natural refuses non-pipeline-order input") {
  const auto cfg = SimConfig::desk();
  const auto perm = derive_output_permutation(cfg);
  Polynomial natural(8, Order::natural);
  CHECK_THROWS_AS(to_natural(natural, perm), ContextMismatch);
}
