// SPDX-License-Identifier: Apache-2.0

#include "scentt/pipesim.hpp"

#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "json.hpp"
#include "scentt/reference.hpp"

namespace scentt::pipesim {

namespace {

unsigned log2_exact(std::size_t n) {
  unsigned s = 0;
  while ((std::size_t{1} << s) < n) ++s;
  return s;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

unsigned long long parse_uint(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  unsigned long long r = 0;
  try {
    r = std::stoull(v, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != v.size() || v.empty()) {
    throw std::invalid_argument("config key '" + key +
                                "' needs an unsigned integer, got '" + v + "'");
  }
  return r;
}

double parse_double(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  double r = 0.0;
  try {
    r = std::stod(v, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != v.size() || v.empty()) {
    throw std::invalid_argument("config key '" + key + "' needs a number");
  }
  return r;
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "1" || v == "true" || v == "yes") return true;
  if (v == "0" || v == "false" || v == "no") return false;
  throw std::invalid_argument("config key '" + key + "' needs a boolean");
}

void check_natural_input(const Polynomial& p, const ModulusContext& ctx) {
  if (p.size() != ctx.n) {
    throw ContextMismatch("input polynomial size does not match the pipeline");
  }
  if (p.order != Order::natural) {
    throw ContextMismatch("pipeline input must be in natural order");
  }
  for (Word c : p.coeffs) {
    if (c >= ctx.q) throw ContextMismatch("input coefficient not reduced");
  }
}

}  // namespace

SimConfig SimConfig::desk() {
  SimConfig c;
  c.n = 8;
  c.q = 17;
  c.l_bu = 5;
  c.l_mem = 4;
  return c;
}

SimConfig SimConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("cannot open config file: " + path);
  }
  SimConfig cfg;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  " is not 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key == "n") {
      cfg.n = static_cast<std::size_t>(parse_uint(key, val));
    } else if (key == "q") {
      cfg.q = static_cast<Word>(parse_uint(key, val));
    } else if (key == "w") {
      cfg.w = static_cast<unsigned>(parse_uint(key, val));
    } else if (key == "beta") {
      cfg.beta = static_cast<unsigned>(parse_uint(key, val));
    } else if (key == "l_bu") {
      cfg.l_bu = static_cast<unsigned>(parse_uint(key, val));
    } else if (key == "l_mem") {
      cfg.l_mem = static_cast<unsigned>(parse_uint(key, val));
    } else if (key == "l_mem_per_pe") {
      cfg.l_mem_per_pe.clear();
      std::stringstream ss(val);
      std::string item;
      while (std::getline(ss, item, ',')) {
        cfg.l_mem_per_pe.push_back(
            static_cast<unsigned>(parse_uint(key, trim(item))));
      }
    } else if (key == "clock_period_ps") {
      cfg.clock_period_ps = parse_double(key, val);
    } else if (key == "clock_freq_ghz") {
      cfg.clock_freq_ghz = parse_double(key, val);
    } else if (key == "flush_cycles_per_stage") {
      cfg.flush_cycles_per_stage = static_cast<std::size_t>(parse_uint(key, val));
    } else if (key == "guard") {
      if (val == "strict") {
        cfg.guard = memsim::GuardMode::strict;
      } else if (val == "permissive") {
        cfg.guard = memsim::GuardMode::permissive;
      } else {
        throw std::invalid_argument("guard must be strict or permissive");
      }
    } else if (key == "record_trace") {
      cfg.record_trace = parse_bool(key, val);
    } else if (key == "record_taps") {
      cfg.record_taps = parse_bool(key, val);
    } else if (key == "idle_gap") {
      cfg.idle_gap = static_cast<std::size_t>(parse_uint(key, val));
    } else {
      throw std::invalid_argument("unknown config key '" + key + "'");
    }
  }
  return cfg;
}

void validate(const SimConfig& cfg) {
  if (cfg.n < 4 || (cfg.n & (cfg.n - 1)) != 0) {
    throw std::invalid_argument("n must be a power of two >= 4");
  }
  const unsigned s = log2_exact(cfg.n);
  if (!cfg.l_mem_per_pe.empty() && cfg.l_mem_per_pe.size() != s) {
    throw std::invalid_argument("l_mem_per_pe needs one entry per stage");
  }
  if (cfg.l_bu < 1) {
    throw std::invalid_argument("butterfly pipeline depth must be >= 1");
  }
  for (unsigned k = 0; k < s; ++k) {
    // The first n/2 cycles of the memory latency are the bank fill itself;
    // anything shorter cannot be realized by a full-bank drain schedule.
    if (cfg.mem_latency(k) < cfg.n / 2) {
      throw std::invalid_argument("l_mem must be at least n/2");
    }
  }
  if (cfg.clock_period_ps <= 0.0 || cfg.clock_freq_ghz <= 0.0) {
    throw std::invalid_argument("clock parameters must be positive");
  }
}

void PipelineTrace::write_ndjson(std::ostream& os) const {
  for (const TraceEvent& e : events) {
    nlohmann::json j{{"cycle", e.cycle},
                     {"pe", e.pe},
                     {"event", e.event},
                     {"value", e.value}};
    os << j.dump() << '\n';
  }
}

std::string CostReport::to_json() const {
  nlohmann::json j;
  j["n"] = n;
  j["q"] = q;
  j["num_pes"] = num_pes;
  j["l_bu"] = l_bu;
  j["l_mem"] = l_mem;
  j["per_pe_cycles"] = per_pe_cycles;
  j["total_latency_cycles"] = total_latency_cycles;
  j["initiation_interval"] = initiation_interval;
  j["tw_load_cycles"] = tw_load_cycles;
  j["clock_period_ps"] = clock_period_ps;
  j["clock_freq_ghz"] = clock_freq_ghz;
  j["latency_ns"] = latency_ns;
  j["throughput_ntt_per_s"] = throughput_ntt_per_s;
  j["flush_cycles_per_stage"] = flush_cycles_per_stage;
  if (measured_latency_cycles) {
    j["measured_latency_cycles"] = *measured_latency_cycles;
  }
  if (measured_initiation_interval) {
    j["measured_initiation_interval"] = *measured_initiation_interval;
  }
  j["transforms_completed"] = transforms_completed;
  return j.dump(2);
}

std::string CostReport::to_csv() const {
  std::ostringstream os;
  os << "n,q,num_pes,l_bu,l_mem,total_latency_cycles,initiation_interval,"
        "tw_load_cycles,clock_period_ps,clock_freq_ghz,latency_ns,"
        "throughput_ntt_per_s,measured_latency_cycles,"
        "measured_initiation_interval,transforms_completed\n";
  os << n << ',' << q << ',' << num_pes << ',' << l_bu << ',';
  for (std::size_t i = 0; i < l_mem.size(); ++i) {
    os << (i ? ";" : "") << l_mem[i];
  }
  os << ',' << total_latency_cycles << ',' << initiation_interval << ','
     << tw_load_cycles << ',' << clock_period_ps << ',' << clock_freq_ghz
     << ',' << latency_ns << ',' << throughput_ntt_per_s << ',';
  if (measured_latency_cycles) os << *measured_latency_cycles;
  os << ',';
  if (measured_initiation_interval) os << *measured_initiation_interval;
  os << ',' << transforms_completed << '\n';
  return os.str();
}

CostReport latency_report(const SimConfig& cfg) {
  validate(cfg);
  CostReport r;
  r.n = cfg.n;
  r.q = cfg.q;
  const unsigned s = log2_exact(cfg.n);
  r.num_pes = s;
  r.l_bu = cfg.l_bu;
  for (unsigned k = 0; k < s; ++k) {
    const unsigned lm = cfg.mem_latency(k);
    r.l_mem.push_back(lm);
    r.per_pe_cycles.push_back(cfg.l_bu + lm);
    r.total_latency_cycles += cfg.l_bu + lm;
  }
  r.initiation_interval = cfg.n / 2;
  r.tw_load_cycles = cfg.n / 2;  // largest twiddle store, loaded in parallel
  r.clock_period_ps = cfg.clock_period_ps;
  r.clock_freq_ghz = cfg.clock_freq_ghz;
  r.latency_ns =
      static_cast<double>(r.total_latency_cycles) * cfg.clock_period_ps / 1e3;
  r.throughput_ntt_per_s =
      cfg.clock_freq_ghz * 1e9 / static_cast<double>(cfg.n / 2);
  r.flush_cycles_per_stage = cfg.flush_cycles_per_stage;
  return r;
}

// ---- Pipeline --------------------------------------------------------------

Pipeline::Pipeline(const SimConfig& cfg) : cfg_(cfg) {
  validate(cfg_);
  ctx_ = modmath::make_context(cfg_.q, cfg_.n, cfg_.w, cfg_.beta);
  const unsigned s = ctx_.log2n;
  pes_.reserve(s);
  for (unsigned k = 0; k < s; ++k) {
    memsim::EventSink csrm_sink = nullptr;
    if (cfg_.record_trace) {
      csrm_sink = [this, k](const memsim::MemEvent& ev) {
        trace_.events.push_back(
            {cycle_, static_cast<int>(k), "csrm_rotate", ev.word});
      };
    }
    const std::size_t csrm_stages = std::size_t{1} << k;
    Pe pe{.banks = {},
          .tw = memsim::Csrm(csrm_stages, std::move(csrm_sink)),
          .twp = memsim::Csrm(csrm_stages, nullptr),
          .write_target = 0,
          .drain_queue = {},
          .ring = {},
          .ring_head = 0,
          .taps = {}};
    pe.banks.reserve(2);
    for (unsigned b = 0; b < 2; ++b) {
      memsim::EventSink bank_sink = nullptr;
      if (cfg_.record_trace) {
        bank_sink = [this, k, b](const memsim::MemEvent& ev) {
          using Op = memsim::MemEvent::Op;
          std::string name;
          Word value = ev.word;
          switch (ev.op) {
            case Op::write: name = "write_q" + std::to_string(ev.queue); break;
            case Op::read: name = "read_q" + std::to_string(ev.queue); break;
            case Op::bank_flip:
              name = "bank_flip";
              value = b;
              break;
            case Op::underflow: name = "underflow"; break;
            case Op::overflow: name = "overflow"; break;
            case Op::collision: name = "collision"; break;
            case Op::csrm_rotate: name = "csrm_rotate"; break;
          }
          trace_.events.push_back(
              {cycle_, static_cast<int>(k), std::move(name), value});
        };
      }
      pe.banks.emplace_back(cfg_.n, cfg_.guard, std::move(bank_sink));
    }
    // Delay line (memory latency beyond the fill) plus butterfly pipeline.
    pe.ring.assign(cfg_.mem_latency(k) - cfg_.n / 2 + cfg_.l_bu, Slot{});
    const auto sched = reference::twiddle_schedule(k, ctx_);
    pe.tw.begin_load();
    pe.twp.begin_load();
    for (const reference::TwiddleEntry& e : sched) {
      pe.tw.load_word(static_cast<DWord>(e.tw));
      pe.twp.load_word(e.tw_shoup);
    }
    pe.tw.end_load();
    pe.twp.end_load();
    pes_.push_back(std::move(pe));
  }
}

void Pipeline::record(std::size_t pe, const char* event, Word value) {
  trace_.events.push_back({cycle_, static_cast<int>(pe), event, value});
}

std::optional<std::pair<Word, Word>> Pipeline::step_pe(
    std::size_t k, std::optional<std::pair<Word, Word>> in) {
  Pe& pe = pes_[k];

  // Read-burst side first: a bank that filled during the write phase of the
  // previous cycle begins draining now.
  Slot issued;
  if (!pe.drain_queue.empty()) {
    const unsigned b = pe.drain_queue.front();
    const auto [a_in, b_in] = pe.banks[b].read_pair();
    if (pe.banks[b].mode() == memsim::CoefficientBank::Mode::writing) {
      pe.drain_queue.pop_front();  // that pop drained the bank
    }
    const Word tw = static_cast<Word>(pe.tw.tick());
    const DWord twp = pe.twp.tick();
    const Word t = modmath::shoup_mul(b_in, tw, twp, ctx_);
    issued.a = modmath::mod_add(a_in, t, ctx_);
    issued.b = modmath::mod_sub(a_in, t, ctx_);
    issued.valid = true;
    if (cfg_.record_taps) pe.taps.push_back({a_in, b_in, tw});
    if (cfg_.record_trace) record(k, "bu_issue", tw);
  }

  Slot out = pe.ring[pe.ring_head];
  pe.ring[pe.ring_head] = issued;
  pe.ring_head = (pe.ring_head + 1) % pe.ring.size();

  // Write side: absorb the upstream pair (valid-in low when absent).
  if (in) {
    memsim::CoefficientBank& bank = pe.banks[pe.write_target];
    bank.write_pair(in->first, in->second);
    if (bank.mode() == memsim::CoefficientBank::Mode::reading) {
      pe.drain_queue.push_back(pe.write_target);
      pe.write_target ^= 1u;
    }
  }

  if (out.valid) return std::make_pair(out.a, out.b);
  return std::nullopt;
}

void Pipeline::tick(std::optional<std::pair<Word, Word>> input) {
  if (input && !first_input_cycle_) first_input_cycle_ = cycle_;
  std::optional<std::pair<Word, Word>> carry = input;
  for (std::size_t k = 0; k < pes_.size(); ++k) {
    carry = step_pe(k, carry);
  }
  if (carry) {
    if (pending_.empty()) output_start_cycles_.push_back(cycle_);
    pending_.push_back(carry->first);
    pending_.push_back(carry->second);
    if (cfg_.record_trace) {
      record(pes_.size() - 1, "output", carry->first);
      record(pes_.size() - 1, "output", carry->second);
    }
    if (pending_.size() == cfg_.n) {
      outputs_.emplace_back(std::move(pending_), Order::pipeline);
      pending_.clear();
    }
  }
  ++cycle_;
}

const std::vector<ButterflyTap>& Pipeline::taps(std::size_t pe) const {
  return pes_.at(pe).taps;
}

RunResult run_pipeline(const std::vector<Polynomial>& inputs,
                       const SimConfig& cfg) {
  Pipeline p(cfg);
  for (const Polynomial& poly : inputs) {
    check_natural_input(poly, p.context());
  }
  for (const Polynomial& poly : inputs) {
    for (std::size_t c = 0; c < cfg.n / 2; ++c) {
      p.tick(std::make_pair(poly[2 * c], poly[2 * c + 1]));
    }
    for (std::size_t g = 0; g < cfg.idle_gap; ++g) p.tick(std::nullopt);
  }
  CostReport rep = latency_report(cfg);
  const std::size_t cap =
      p.cycle() + rep.total_latency_cycles + 4 * cfg.n + 64;
  while (p.outputs().size() < inputs.size()) {
    if (p.cycle() > cap) {
      throw ScheduleViolation("pipeline failed to drain its outputs");
    }
    p.tick(std::nullopt);
  }
  rep.transforms_completed = p.outputs().size();
  const auto& starts = p.output_start_cycles();
  if (p.first_input_cycle() && !starts.empty()) {
    rep.measured_latency_cycles = starts.front() - *p.first_input_cycle();
  }
  if (starts.size() >= 2) {
    rep.measured_initiation_interval = starts[1] - starts[0];
  }
  return {p.outputs(), p.trace(), std::move(rep)};
}

std::vector<std::size_t> derive_output_permutation(const SimConfig& cfg) {
  SimConfig probe = cfg;
  probe.record_trace = false;
  probe.record_taps = false;
  const ModulusContext ctx =
      modmath::make_context(probe.q, probe.n, probe.w, probe.beta);

  // Probe 1: a delta at index 1 transforms to the n distinct powers of
  // omega, so each raw output position identifies its natural index by
  // discrete log against the twiddle table.
  Polynomial delta(ctx.n, Order::natural);
  delta[1] = 1;
  const RunResult res = run_pipeline({delta}, probe);
  std::unordered_map<Word, std::size_t> dlog;
  dlog.reserve(ctx.n);
  for (std::size_t e = 0; e < ctx.n; ++e) dlog.emplace(ctx.twiddles[e], e);
  std::vector<std::size_t> perm(ctx.n);
  std::vector<bool> seen(ctx.n, false);
  const Polynomial& raw = res.outputs.at(0);
  for (std::size_t pos = 0; pos < ctx.n; ++pos) {
    const auto it = dlog.find(raw[pos]);
    if (it == dlog.end() || seen[it->second]) {
      throw NotAPermutation("raw output order is not a bijection");
    }
    seen[it->second] = true;
    perm[pos] = it->second;
  }

  // Probe 2: the same bijection must explain arbitrary inputs.
  std::mt19937_64 rng(0x5ce0a11ce5u);
  std::uniform_int_distribution<Word> dist(0, ctx.q - 1);
  for (int trial = 0; trial < 3; ++trial) {
    Polynomial x(ctx.n, Order::natural);
    for (std::size_t i = 0; i < ctx.n; ++i) x[i] = dist(rng);
    const Polynomial expect = reference::ntt_ct(x, ctx);
    const RunResult rr = run_pipeline({x}, probe);
    const Polynomial& got = rr.outputs.at(0);
    for (std::size_t pos = 0; pos < ctx.n; ++pos) {
      if (got[pos] != expect[perm[pos]]) {
        throw NotAPermutation("raw output order depends on input data");
      }
    }
  }
  return perm;
}

Polynomial to_natural(const Polynomial& pipeline_out,
                      const std::vector<std::size_t>& p_out) {
  if (pipeline_out.order != Order::pipeline ||
      pipeline_out.size() != p_out.size()) {
    throw ContextMismatch("not a raw pipeline output of matching size");
  }
  Polynomial out(pipeline_out.size(), Order::natural);
  for (std::size_t pos = 0; pos < p_out.size(); ++pos) {
    out[p_out[pos]] = pipeline_out[pos];
  }
  return out;
}

}  // namespace scentt::pipesim
