// SPDX-License-Identifier: Apache-2.0

/// @file phaseclk.hpp
/// @brief Clock-phase assignment over gate-level DAGs.
///
/// Every gate gets an integer time slot; each wire u -> v must satisfy
/// slot(v) >= slot(u) + 1 so the consumer always captures strictly after the
/// producer launches (hold safety). With k clock phases a gate's phase is
/// slot mod k, one full period re-times k slots, and a wire spanning d slots
/// therefore needs ceil(d / k) - 1 path-balancing DFFs. The objective is to
/// pick slots minimizing the total DFF count; larger k absorbs imbalance in
/// phase offsets instead of registers at the price of base-frequency / k
/// throughput.

#ifndef SCENTT_PHASECLK_HPP
#define SCENTT_PHASECLK_HPP

#include <cstddef>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

namespace scentt::phaseclk {

enum class GateKind { logic, input, output };

struct Gate {
  std::string name;
  GateKind kind = GateKind::logic;
};

struct Edge {
  std::size_t src = 0;
  std::size_t dst = 0;
};

/// Directed gate-connection graph; must be acyclic to be schedulable.
class GateGraph {
 public:
  /// Returns the gate's index, declaring it (kind logic) if new.
  std::size_t add_gate(const std::string& name,
                       GateKind kind = GateKind::logic);
  void add_edge(const std::string& src, const std::string& dst);

  /// Text form, one statement per line: "input NAME", "output NAME" declare
  /// endpoint gates, "SRC DST" adds a wire (gates auto-declared as logic).
  /// '#' starts a comment.
  static GateGraph from_edge_list(std::istream& in);
  static GateGraph from_edge_list_file(const std::string& path);

  const std::vector<Gate>& gates() const { return gates_; }
  const std::vector<Edge>& edges() const { return edges_; }
  std::size_t size() const { return gates_.size(); }
  const std::vector<std::size_t>& out_edges(std::size_t v) const {
    return out_[v];
  }
  const std::vector<std::size_t>& in_edges(std::size_t v) const {
    return in_[v];
  }

  /// Topological order of gate indices; throws CyclicGraph.
  std::vector<std::size_t> topo_order() const;

  /// Earliest feasible slot per gate (longest path from any source).
  std::vector<std::size_t> asap_slots() const;

 private:
  std::vector<Gate> gates_;
  std::vector<Edge> edges_;
  std::vector<std::vector<std::size_t>> out_;
  std::vector<std::vector<std::size_t>> in_;
  std::unordered_map<std::string, std::size_t> index_;
};

enum class Method { lp_relax_round, greedy_asap, exact_small };

struct PhaseAssignment {
  unsigned k = 1;
  std::vector<std::size_t> slot;       // per gate
  std::vector<std::size_t> edge_dffs;  // per edge, aligned with graph.edges()
  std::size_t total_dffs = 0;

  unsigned phase(std::size_t gate) const {
    return static_cast<unsigned>(slot[gate] % k);
  }

  std::string to_json(const GateGraph& g) const;
  std::string to_csv(const GateGraph& g) const;  // gate,slot,phase rows
};

/// DFFs needed on a wire spanning `delta` slots under k phases.
inline std::size_t dffs_for_span(std::size_t delta, unsigned k) {
  return (delta + k - 1) / k - 1;
}

/// Slot assignment minimizing total DFFs.
///
/// lp_relax_round: drops the ceil() from the objective, leaving the linear
/// program min sum(slot(v) - slot(u)) over the hold constraints, and solves
/// it exactly as a minimum-cost flow (the LP is integral, so rounding is the
/// identity). The slots are independent of k, which makes the resulting DFF
/// totals monotone in k, and at k = 1 the relaxation is the true objective,
/// so that case is solved to optimality.
/// greedy_asap: every gate at its earliest slot.
/// exact_small: branch-and-bound over slot windows, exact for any k;
/// refuses graphs above 20 gates (std::invalid_argument).
///
/// Throws CyclicGraph for cyclic inputs and InfeasibleK for k = 0.
PhaseAssignment assign_phases(const GateGraph& g, unsigned k,
                              Method method = Method::lp_relax_round);

struct HoldReport {
  struct Violation {
    std::size_t edge = 0;
    std::string what;
  };
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
};

/// Re-verifies hold safety from scratch: slot(v) > slot(u) on every wire,
/// and distinct phases whenever the span is below one full period.
HoldReport check_hold_safe(const GateGraph& g, const PhaseAssignment& a);

/// Steady-state throughput with k phases dividing one base-rate clock.
double throughput_of(unsigned k, double base_freq);

}  // namespace scentt::phaseclk

#endif  // SCENTT_PHASECLK_HPP
