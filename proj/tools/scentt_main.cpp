// SPDX-License-Identifier: Apache-2.0

// Command-line front end: simulation runs, oracle verification, phase
// assignment, and cost reports, all as JSON for scripting.

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "scentt/errors.hpp"
#include "scentt/modmath.hpp"
#include "scentt/phaseclk.hpp"
#include "scentt/pipesim.hpp"
#include "scentt/reference.hpp"
#include "scentt/scale.hpp"

namespace {

using scentt::Word;

constexpr std::uint64_t kDefaultSeed = 0x5ce0a11ce5ULL;
constexpr long long kBaselineKeyswitchOpsPerS = 2616;  // published FPGA rate

std::uint64_t pick_seed(bool flag_given, std::uint64_t flag_value) {
  if (flag_given) return flag_value;
  if (const char* env = std::getenv("SCE_NTT_SEED"))
    return std::strtoull(env, nullptr, 0);
  return kDefaultSeed;
}

scentt::modmath::Polynomial random_poly(std::size_t n, Word q,
                                        std::mt19937_64& rng) {
  std::uniform_int_distribution<Word> dist(0, q - 1);
  scentt::modmath::Polynomial p(n, scentt::modmath::Order::natural);
  for (std::size_t i = 0; i < n; ++i) p[i] = dist(rng);
  return p;
}

int emit_error(const std::string& what) {
  std::cout << nlohmann::json{{"error", what}}.dump() << "\n";
  return 1;
}

int run_verify_ntt(std::size_t n, Word q, std::size_t cases,
                   std::uint64_t seed) {
  scentt::pipesim::SimConfig cfg;
  cfg.n = n;
  cfg.q = q;
  if (cfg.l_mem < n / 2) cfg.l_mem = n / 2;  // bank fill sets the floor
  const auto ctx = scentt::modmath::make_context(q, n);

  std::mt19937_64 rng(seed);
  std::vector<scentt::modmath::Polynomial> inputs;
  inputs.reserve(cases);
  for (std::size_t i = 0; i < cases; ++i)
    inputs.push_back(random_poly(n, q, rng));

  const auto perm = scentt::pipesim::derive_output_permutation(cfg);
  const auto result = scentt::pipesim::run_pipeline(inputs, cfg);
  std::size_t failures = 0;
  for (std::size_t i = 0; i < cases; ++i) {
    const auto got = scentt::pipesim::to_natural(result.outputs[i], perm);
    const auto want = scentt::reference::ntt_ct(inputs[i], ctx);
    if (!(got == want)) ++failures;
  }

  nlohmann::json report{{"command", "verify ntt"}, {"n", n},     {"q", q},
                        {"cases", cases},          {"seed", seed},
                        {"failures", failures},    {"ok", failures == 0}};
  std::cout << report.dump(2) << "\n";
  return failures == 0 ? 0 : 1;
}

int run_sim(const std::string& config_path, const std::string& trace_path,
            std::size_t transforms, std::uint64_t seed) {
  auto cfg = scentt::pipesim::SimConfig::from_file(config_path);
  if (!trace_path.empty()) cfg.record_trace = true;

  std::mt19937_64 rng(seed);
  std::vector<scentt::modmath::Polynomial> inputs;
  inputs.reserve(transforms);
  for (std::size_t i = 0; i < transforms; ++i)
    inputs.push_back(random_poly(cfg.n, cfg.q, rng));

  const auto result = scentt::pipesim::run_pipeline(inputs, cfg);
  if (!trace_path.empty()) {
    std::ofstream out(trace_path);
    if (!out) return emit_error("cannot open trace file: " + trace_path);
    result.trace.write_ndjson(out);
  }
  std::cout << result.report.to_json() << "\n";
  return 0;
}

int run_phase_assign(const std::string& graph_path, unsigned k,
                     const std::string& method, const std::string& csv_path) {
  const auto graph = scentt::phaseclk::GateGraph::from_edge_list_file(graph_path);
  scentt::phaseclk::Method m = scentt::phaseclk::Method::lp_relax_round;
  if (method == "greedy_asap") m = scentt::phaseclk::Method::greedy_asap;
  if (method == "exact_small") m = scentt::phaseclk::Method::exact_small;
  const auto assignment = scentt::phaseclk::assign_phases(graph, k, m);
  const auto hold = scentt::phaseclk::check_hold_safe(graph, assignment);
  if (!hold.ok())
    return emit_error("assignment fails hold check on " +
                      std::to_string(hold.violations.size()) + " edges");
  if (!csv_path.empty()) {
    std::ofstream out(csv_path);
    if (!out) return emit_error("cannot open csv file: " + csv_path);
    out << assignment.to_csv(graph);
  }
  std::cout << assignment.to_json(graph) << "\n";
  return 0;
}

int run_cost_big_ntt(std::size_t n_big, unsigned lanes, std::size_t flush,
                     double period_ps) {
  const auto cost = scentt::scale::big_ntt_cycles(n_big, lanes, flush,
                                                  period_ps);
  nlohmann::json j{{"n_big", cost.n_big},
                   {"lanes", cost.lanes},
                   {"cycles", cost.cycles},
                   {"cycles_no_flush", cost.cycles_no_flush},
                   {"flush_cycles", cost.flush_cycles},
                   {"clock_period_ps", cost.clock_period_ps},
                   {"wall_ns", cost.wall_ns},
                   {"wall_ns_no_flush", cost.wall_ns_no_flush},
                   {"note", "inter-phase reorder cycles excluded"}};
  std::cout << j.dump(2) << "\n";
  return 0;
}

int run_cost_keyswitch(unsigned levels, double period_ps) {
  const auto cost = scentt::scale::keyswitch_estimate(levels, period_ps);
  nlohmann::json j{
      {"levels", cost.levels},
      {"cycles", cost.cycles},
      {"ps_per_op", cost.ps_per_op},
      {"ops_per_s_exact", cost.ops_per_s_exact},
      {"ops_per_s", cost.ops_per_s},
      {"ntt_modules", cost.ntt_modules},
      {"multipliers", cost.multipliers},
      {"adders", cost.adders},
      {"baseline_ops_per_s", kBaselineKeyswitchOpsPerS},
      {"speedup_over_baseline",
       cost.speedup_over(kBaselineKeyswitchOpsPerS)}};
  std::cout << j.dump(2) << "\n";
  return 0;
}

int run_cost_table4() {
  const scentt::pipesim::SimConfig cfg;
  const auto report = scentt::pipesim::latency_report(cfg);
  const auto big = scentt::scale::big_ntt_cycles(16384, 1);
  const auto ks = scentt::scale::keyswitch_estimate();

  std::printf("pipeline: n=%zu q=%llu stages=%zu\n", report.n,
              static_cast<unsigned long long>(report.q), report.num_pes);
  std::printf("latency: %zu cycles at %.1f ps -> %.4f ns\n",
              report.total_latency_cycles, report.clock_period_ps,
              report.latency_ns);
  std::printf("throughput: %.2fM NTT/s at %.0f GHz issue, interval %zu\n",
              report.throughput_ntt_per_s / 1e6, report.clock_freq_ghz,
              report.initiation_interval);
  std::printf("twiddle preload: %zu cycles, overlapped\n",
              report.tw_load_cycles);
  std::printf(
      "big transform %zu points: %zu cycles with flush, %zu without "
      "(%.2f ns, reorder excluded)\n",
      big.n_big, big.cycles, big.cycles_no_flush, big.wall_ns_no_flush);
  std::printf("key switch (%u levels): %zu cycles, %lld ops/s\n", ks.levels,
              ks.cycles, ks.ops_per_s);
  std::printf("units: %u transform engines, %u multipliers, %u adders\n",
              ks.ntt_modules, ks.multipliers, ks.adders);
  std::printf("speedup over %lld ops/s baseline: %.1fx\n",
              kBaselineKeyswitchOpsPerS,
              ks.speedup_over(kBaselineKeyswitchOpsPerS));
  return 0;
}

int run_params_check(std::size_t n, double lambda, double log_pql) {
  const auto check = scentt::scale::ckks_security_check(n, lambda, log_pql);
  nlohmann::json j{{"n", n},
                   {"lambda", lambda},
                   {"log_pql", log_pql},
                   {"required_n", check.required_n},
                   {"margin", check.margin},
                   {"satisfied", check.satisfied}};
  std::cout << j.dump(2) << "\n";
  return check.satisfied ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"software model and verification harness for a pipelined "
               "constant-geometry NTT engine"};
  app.require_subcommand(1);

  // verify ntt
  auto* verify = app.add_subcommand("verify", "compare modules to oracles");
  verify->require_subcommand(1);
  auto* verify_ntt = verify->add_subcommand(
      "ntt", "stream random transforms through the pipeline model and "
             "compare each against the exact reference");
  std::size_t vn = 128;
  Word vq = 2013265921ULL;
  std::size_t vcases = 100;
  std::uint64_t vseed = 0;
  verify_ntt->add_option("--n", vn, "transform length (power of two)");
  verify_ntt->add_option("--q", vq, "prime modulus");
  verify_ntt->add_option("--cases", vcases, "number of random cases");
  auto* vseed_opt = verify_ntt->add_option("--seed", vseed, "RNG seed");

  // sim run
  auto* sim = app.add_subcommand("sim", "cycle-accurate pipeline simulation");
  sim->require_subcommand(1);
  auto* sim_run = sim->add_subcommand("run", "run transforms from a config");
  std::string sim_config;
  std::string sim_trace;
  std::size_t sim_transforms = 1;
  std::uint64_t sseed = 0;
  sim_run->add_option("--config", sim_config, "key=value config file")
      ->required();
  sim_run->add_option("--trace", sim_trace, "write NDJSON event trace here");
  sim_run->add_option("--transforms", sim_transforms,
                      "number of back-to-back transforms");
  auto* sseed_opt = sim_run->add_option("--seed", sseed, "RNG seed");

  // phase assign
  auto* phase = app.add_subcommand("phase", "clock-phase assignment");
  phase->require_subcommand(1);
  auto* phase_assign =
      phase->add_subcommand("assign", "assign slots/phases to a gate graph");
  std::string graph_path;
  unsigned pk = 1;
  std::string method = "lp_relax_round";
  std::string csv_path;
  phase_assign->add_option("--graph", graph_path, "edge-list file")
      ->required();
  phase_assign->add_option("--k", pk, "number of clock phases");
  phase_assign
      ->add_option("--method", method, "assignment method")
      ->check(CLI::IsMember({"lp_relax_round", "greedy_asap", "exact_small"}));
  phase_assign->add_option("--csv", csv_path, "also write gate,slot,phase CSV");

  // cost
  auto* cost = app.add_subcommand("cost", "cycle and throughput reports");
  cost->require_subcommand(1);
  auto* cost_big = cost->add_subcommand("big-ntt",
                                        "large transform cycle budget");
  std::size_t bn = 16384;
  unsigned blanes = 1;
  std::size_t bflush = 400;
  double bperiod = 29.4;
  cost_big->add_option("--n-big", bn, "transform length, multiple of 128");
  cost_big->add_option("--lanes", blanes, "parallel engines");
  cost_big->add_option("--flush", bflush, "inter-phase flush cycles");
  cost_big->add_option("--period", bperiod, "clock period in ps");
  auto* cost_ks = cost->add_subcommand("keyswitch",
                                       "key-switch throughput estimate");
  unsigned klevels = 8;
  double kperiod = 29.4118;
  cost_ks->add_option("--levels", klevels, "modulus levels");
  cost_ks->add_option("--period", kperiod, "clock period in ps");
  auto* cost_table = cost->add_subcommand(
      "table4", "one-page latency/throughput summary of the default engine");

  // params check
  auto* params = app.add_subcommand("params", "parameter selection checks");
  params->require_subcommand(1);
  auto* params_check =
      params->add_subcommand("check", "ring-dimension security inequality");
  std::size_t cn = 0;
  double clambda = 0.0, clogpql = 0.0;
  params_check->add_option("--n", cn, "ring dimension")->required();
  params_check->add_option("--lambda", clambda, "security target in bits")
      ->required();
  params_check->add_option("--logpql", clogpql, "log2 of the full modulus")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (verify_ntt->parsed())
      return run_verify_ntt(vn, vq, vcases,
                            pick_seed(vseed_opt->count() > 0, vseed));
    if (sim_run->parsed())
      return run_sim(sim_config, sim_trace, sim_transforms,
                     pick_seed(sseed_opt->count() > 0, sseed));
    if (phase_assign->parsed())
      return run_phase_assign(graph_path, pk, method, csv_path);
    if (cost_big->parsed())
      return run_cost_big_ntt(bn, blanes, bflush, bperiod);
    if (cost_ks->parsed()) return run_cost_keyswitch(klevels, kperiod);
    if (cost_table->parsed()) return run_cost_table4();
    if (params_check->parsed()) return run_params_check(cn, clambda, clogpql);
  } catch (const std::exception& e) {
    return emit_error(e.what());
  }
  return 2;
}
