// SPDX-License-Identifier: Apache-2.0

/// @file pipesim.hpp
/// @brief Cycle-accurate model of the streaming constant-geometry transform.
///
/// The datapath is a chain of log2(n) processing elements. Each element owns
/// two ping-pong coefficient banks, two circular twiddle stores (value and
/// Shoup companion) and a deep butterfly pipeline. An element absorbs two
/// coefficients per cycle into its writing bank; the moment a bank holds all
/// n words it flips to reading and drains itself over the next n/2 cycles,
/// one head pair per cycle. The popped pair rides a fixed-length delay (the
/// portion of the memory latency not hidden by the fill) plus the butterfly
/// pipeline, then hands off to the next element in the same cycle. Back to
/// back transforms therefore stream at an initiation interval of n/2 cycles
/// while each element contributes l_mem + l_bu cycles of latency.

#ifndef SCENTT_PIPESIM_HPP
#define SCENTT_PIPESIM_HPP

#include <cstddef>
#include <deque>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "scentt/memsim.hpp"
#include "scentt/modmath.hpp"

namespace scentt::pipesim {

using modmath::ModulusContext;
using modmath::Order;
using modmath::Polynomial;

/// Everything that parameterizes one simulation.
///
/// l_mem is the per-element memory latency in cycles and must be at least
/// n/2: the first n/2 cycles of it are the bank fill, the remainder is
/// modeled as an output delay line. Defaults reproduce the recorded design
/// point (128 points, 79-cycle butterfly, 69-cycle memory, 29.4 ps period).
/// The clock frequency used for throughput reporting is an independent knob.
struct SimConfig {
  std::size_t n = 128;
  Word q = 2013265921;  // 15 * 2^27 + 1
  unsigned w = 32;
  unsigned beta = 33;
  unsigned l_bu = 79;
  unsigned l_mem = 69;
  std::vector<unsigned> l_mem_per_pe;  // empty: uniform l_mem
  double clock_period_ps = 29.4;
  double clock_freq_ghz = 34.0;
  std::size_t flush_cycles_per_stage = 200;
  memsim::GuardMode guard = memsim::GuardMode::strict;
  bool record_trace = false;
  bool record_taps = false;
  std::size_t idle_gap = 0;  // idle cycles inserted between streamed inputs

  unsigned mem_latency(std::size_t pe) const {
    return l_mem_per_pe.empty() ? l_mem : l_mem_per_pe.at(pe);
  }

  /// Hand-checkable 8-point configuration (q=17, 5-cycle butterfly,
  /// 4-cycle memory: 3 elements of 9 cycles each).
  static SimConfig desk();

  /// Parse a flat "key = value" text file ('#' starts a comment). Unknown
  /// keys throw std::invalid_argument.
  static SimConfig from_file(const std::string& path);
};

/// Throws std::invalid_argument when the configuration is not simulable.
void validate(const SimConfig& cfg);

/// One trace record; serialized as one NDJSON object per line.
struct TraceEvent {
  std::size_t cycle = 0;
  int pe = 0;
  std::string event;
  Word value = 0;
};

struct PipelineTrace {
  std::vector<TraceEvent> events;

  void write_ndjson(std::ostream& os) const;
};

/// Derived cycle accounting plus measurements filled in by an actual run.
/// Twiddle loading happens once before streaming begins and is excluded from
/// the steady-state figures; its cost (n/2 cycles, the largest twiddle
/// store, all elements loading in parallel) is reported separately.
struct CostReport {
  std::size_t n = 0;
  Word q = 0;
  std::size_t num_pes = 0;
  unsigned l_bu = 0;
  std::vector<unsigned> l_mem;
  std::vector<unsigned> per_pe_cycles;  // l_bu + l_mem[k]
  std::size_t total_latency_cycles = 0;
  std::size_t initiation_interval = 0;  // n/2
  std::size_t tw_load_cycles = 0;
  double clock_period_ps = 0.0;
  double clock_freq_ghz = 0.0;
  double latency_ns = 0.0;
  double throughput_ntt_per_s = 0.0;
  std::size_t flush_cycles_per_stage = 0;
  std::optional<std::size_t> measured_latency_cycles;
  std::optional<std::size_t> measured_initiation_interval;
  std::size_t transforms_completed = 0;

  std::string to_json() const;
  std::string to_csv() const;
};

/// Pure arithmetic version of the accounting (no simulation).
CostReport latency_report(const SimConfig& cfg);

/// Butterfly operands as consumed by one element (differential-test tap).
struct ButterflyTap {
  Word a_in = 0;
  Word b_in = 0;
  Word tw = 0;
  bool operator==(const ButterflyTap&) const = default;
};

/// The streaming datapath. Drive it one cycle at a time with tick(); an
/// absent input models a low valid bit on the first element's input ports.
class Pipeline {
 public:
  explicit Pipeline(const SimConfig& cfg);

  // Trace sinks capture `this`; the object must stay put.
  Pipeline(const Pipeline&) = delete;
  Pipeline& operator=(const Pipeline&) = delete;

  /// Advance one global cycle, optionally presenting one (di0, di1) pair.
  void tick(std::optional<std::pair<Word, Word>> input);

  std::size_t cycle() const { return cycle_; }
  const ModulusContext& context() const { return ctx_; }
  const SimConfig& config() const { return cfg_; }

  /// Completed transforms, in emission order, coefficients in the raw
  /// pipeline output order (order tag Order::pipeline).
  const std::vector<Polynomial>& outputs() const { return outputs_; }

  const PipelineTrace& trace() const { return trace_; }

  /// Chronological butterfly operands per element (record_taps only).
  const std::vector<ButterflyTap>& taps(std::size_t pe) const;

  std::optional<std::size_t> first_input_cycle() const {
    return first_input_cycle_;
  }
  /// Cycle of the first output word of each completed/started transform.
  const std::vector<std::size_t>& output_start_cycles() const {
    return output_start_cycles_;
  }

 private:
  struct Slot {
    Word a = 0;
    Word b = 0;
    bool valid = false;
  };
  struct Pe {
    std::vector<memsim::CoefficientBank> banks;
    memsim::Csrm tw;
    memsim::Csrm twp;
    unsigned write_target = 0;
    std::deque<unsigned> drain_queue;  // banks currently draining, oldest first
    std::vector<Slot> ring;            // delay line + butterfly pipeline
    std::size_t ring_head = 0;
    std::vector<ButterflyTap> taps;
  };

  std::optional<std::pair<Word, Word>> step_pe(
      std::size_t k, std::optional<std::pair<Word, Word>> in);
  void record(std::size_t pe, const char* event, Word value);

  SimConfig cfg_;
  ModulusContext ctx_;
  std::vector<Pe> pes_;
  std::size_t cycle_ = 0;
  std::vector<Polynomial> outputs_;
  std::vector<Word> pending_;
  PipelineTrace trace_;
  std::optional<std::size_t> first_input_cycle_;
  std::vector<std::size_t> output_start_cycles_;
};

struct RunResult {
  std::vector<Polynomial> outputs;  // pipeline order
  PipelineTrace trace;
  CostReport report;
};

/// Stream every input polynomial through a fresh pipeline (cfg.idle_gap idle
/// cycles between transforms), drain, and report. Inputs must be natural
/// order, reduced, of size cfg.n; throws ContextMismatch otherwise and
/// ScheduleViolation if the pipeline fails to drain.
RunResult run_pipeline(const std::vector<Polynomial>& inputs,
                       const SimConfig& cfg);

/// Fixed bijection P mapping raw output position to natural transform index
/// (natural[P[pos]] = raw[pos]). Computed by a discrete-log probe on a delta
/// input and cross-checked for input independence on random polynomials;
/// throws NotAPermutation if either check fails.
std::vector<std::size_t> derive_output_permutation(const SimConfig& cfg);

/// Reorder a raw pipeline output into natural order using that bijection.
Polynomial to_natural(const Polynomial& pipeline_out,
                      const std::vector<std::size_t>& p_out);

}  // namespace scentt::pipesim

#endif  // SCENTT_PIPESIM_HPP
