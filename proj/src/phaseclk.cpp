// SPDX-License-Identifier: Apache-2.0

#include "scentt/phaseclk.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <limits>
#include <queue>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "scentt/errors.hpp"

namespace scentt::phaseclk {

namespace {

struct Dsu {
  std::vector<std::size_t> parent;
  explicit Dsu(std::size_t n) : parent(n) {
    for (std::size_t i = 0; i < n; ++i) parent[i] = i;
  }
  std::size_t find(std::size_t v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  }
  void unite(std::size_t a, std::size_t b) { parent[find(a)] = find(b); }
};

// Shifting a whole weakly-connected component never changes any span, so
// anchor each component's earliest gate at slot zero.
void normalize_components(const GateGraph& g, std::vector<long long>& slot) {
  Dsu dsu(g.size());
  for (const auto& e : g.edges()) dsu.unite(e.src, e.dst);
  std::vector<long long> lo(g.size(), std::numeric_limits<long long>::max());
  for (std::size_t v = 0; v < g.size(); ++v) {
    std::size_t r = dsu.find(v);
    lo[r] = std::min(lo[r], slot[v]);
  }
  for (std::size_t v = 0; v < g.size(); ++v) slot[v] -= lo[dsu.find(v)];
}

PhaseAssignment finalize(const GateGraph& g, unsigned k,
                         std::vector<std::size_t> slots) {
  PhaseAssignment a;
  a.k = k;
  a.slot = std::move(slots);
  a.edge_dffs.reserve(g.edges().size());
  for (const auto& e : g.edges()) {
    if (a.slot[e.dst] <= a.slot[e.src])
      throw std::logic_error("phase assignment violates hold ordering");
    std::size_t d = dffs_for_span(a.slot[e.dst] - a.slot[e.src], k);
    a.edge_dffs.push_back(d);
    a.total_dffs += d;
  }
  return a;
}

// Exact minimizer of sum(slot(dst) - slot(src)) subject to every span >= 1.
//
// The LP dual is a minimum-cost flow: route one unit along each wire's
// direction requirement, infinite capacities, cost -1 per residual step.
// Successive shortest augmenting paths over reduced costs keep all node
// potentials integral, and at termination the negated potentials are an
// optimal slot vector (complementary slackness on both residual directions).
std::vector<std::size_t> lp_optimal_slots(const GateGraph& g) {
  const std::size_t V = g.size();
  const auto& edges = g.edges();
  const std::size_t E = edges.size();
  const long long INF = std::numeric_limits<long long>::max() / 4;

  auto asap = g.asap_slots();  // also rejects cyclic graphs
  std::vector<long long> p(V);
  for (std::size_t v = 0; v < V; ++v) p[v] = -static_cast<long long>(asap[v]);

  std::vector<long long> excess(V, 0);
  for (const auto& e : edges) {
    ++excess[e.src];
    --excess[e.dst];
  }
  std::vector<long long> flow(E, 0);

  std::vector<long long> d(V);
  std::vector<std::size_t> parent_edge(V);
  std::vector<int> parent_dir(V);
  while (true) {
    std::size_t s = V;
    for (std::size_t v = 0; v < V; ++v)
      if (excess[v] > 0) {
        s = v;
        break;
      }
    if (s == V) break;

    std::fill(d.begin(), d.end(), INF);
    std::fill(parent_dir.begin(), parent_dir.end(), 0);
    using Item = std::pair<long long, std::size_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
    d[s] = 0;
    pq.push({0, s});
    while (!pq.empty()) {
      auto [dist, u] = pq.top();
      pq.pop();
      if (dist != d[u]) continue;
      for (std::size_t ei : g.out_edges(u)) {
        std::size_t v2 = edges[ei].dst;
        long long rc = -1 + p[u] - p[v2];
        if (d[u] + rc < d[v2]) {
          d[v2] = d[u] + rc;
          parent_edge[v2] = ei;
          parent_dir[v2] = 1;
          pq.push({d[v2], v2});
        }
      }
      for (std::size_t ei : g.in_edges(u)) {
        if (flow[ei] <= 0) continue;  // residual arc exists only with flow
        std::size_t v2 = edges[ei].src;
        long long rc = 1 + p[u] - p[v2];
        if (d[u] + rc < d[v2]) {
          d[v2] = d[u] + rc;
          parent_edge[v2] = ei;
          parent_dir[v2] = -1;
          pq.push({d[v2], v2});
        }
      }
    }

    std::size_t t = V;
    for (std::size_t v = 0; v < V; ++v)
      if (excess[v] < 0 && d[v] < INF && (t == V || d[v] < d[t])) t = v;
    if (t == V) throw std::logic_error("phase LP: no demand reachable");

    long long delta = std::min(excess[s], -excess[t]);
    for (std::size_t v = t; v != s;) {
      std::size_t ei = parent_edge[v];
      if (parent_dir[v] < 0) {
        delta = std::min(delta, flow[ei]);
        v = edges[ei].dst;
      } else {
        v = edges[ei].src;
      }
    }
    for (std::size_t v = t; v != s;) {
      std::size_t ei = parent_edge[v];
      if (parent_dir[v] < 0) {
        flow[ei] -= delta;
        v = edges[ei].dst;
      } else {
        flow[ei] += delta;
        v = edges[ei].src;
      }
    }
    excess[s] -= delta;
    excess[t] += delta;
    for (std::size_t v = 0; v < V; ++v) p[v] += std::min(d[v], d[t]);
  }

  std::vector<long long> slot(V);
  for (std::size_t v = 0; v < V; ++v) slot[v] = -p[v];
  normalize_components(g, slot);
  return {slot.begin(), slot.end()};
}

PhaseAssignment exact_search(const GateGraph& g, unsigned k) {
  const std::size_t V = g.size();
  if (V > 20)
    throw std::invalid_argument("exact_small handles at most 20 gates");
  PhaseAssignment best = finalize(g, k, lp_optimal_slots(g));
  if (V == 0) return best;

  auto order = g.topo_order();
  const auto& edges = g.edges();
  // Longest path down to any sink; caps each gate's slot window.
  std::vector<std::size_t> tail(V, 0);
  for (auto it = order.rbegin(); it != order.rend(); ++it)
    for (std::size_t ei : g.out_edges(*it))
      tail[*it] = std::max(tail[*it], tail[edges[ei].dst] + 1);
  // An optimal schedule always fits in V slots: an empty slot between a
  // component's first and last occupied one can be squeezed out without
  // growing any span.
  const std::size_t horizon = V - 1;

  std::vector<std::size_t> cur(V, 0);
  std::function<void(std::size_t, std::size_t)> place =
      [&](std::size_t pos, std::size_t cost) {
        if (cost >= best.total_dffs) return;  // incumbent already as good
        if (pos == V) {
          best = finalize(g, k, cur);
          return;
        }
        std::size_t v = order[pos];
        std::size_t lb = 0;
        for (std::size_t ei : g.in_edges(v))
          lb = std::max(lb, cur[edges[ei].src] + 1);
        std::size_t ub = horizon - tail[v];
        for (std::size_t t = lb; t <= ub; ++t) {
          std::size_t added = 0;
          for (std::size_t ei : g.in_edges(v))
            added += dffs_for_span(t - cur[edges[ei].src], k);
          cur[v] = t;
          place(pos + 1, cost + added);
        }
      };
  place(0, 0);

  std::vector<long long> slot(best.slot.begin(), best.slot.end());
  normalize_components(g, slot);
  return finalize(g, k, {slot.begin(), slot.end()});
}

}  // namespace

std::size_t GateGraph::add_gate(const std::string& name, GateKind kind) {
  auto it = index_.find(name);
  if (it != index_.end()) {
    Gate& existing = gates_[it->second];
    if (kind != GateKind::logic) {
      if (existing.kind != GateKind::logic && existing.kind != kind)
        throw std::invalid_argument("gate '" + name +
                                    "' declared both input and output");
      existing.kind = kind;
    }
    return it->second;
  }
  gates_.push_back({name, kind});
  out_.emplace_back();
  in_.emplace_back();
  index_.emplace(name, gates_.size() - 1);
  return gates_.size() - 1;
}

void GateGraph::add_edge(const std::string& src, const std::string& dst) {
  std::size_t a = add_gate(src);
  std::size_t b = add_gate(dst);
  edges_.push_back({a, b});
  out_[a].push_back(edges_.size() - 1);
  in_[b].push_back(edges_.size() - 1);
}

GateGraph GateGraph::from_edge_list(std::istream& in) {
  GateGraph g;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos)
      line.erase(hash);
    std::istringstream ls(line);
    std::vector<std::string> tok;
    for (std::string t; ls >> t;) tok.push_back(t);
    if (tok.empty()) continue;
    if (tok.size() != 2)
      throw std::invalid_argument("edge list line " + std::to_string(lineno) +
                                  ": expected two tokens");
    if (tok[0] == "input")
      g.add_gate(tok[1], GateKind::input);
    else if (tok[0] == "output")
      g.add_gate(tok[1], GateKind::output);
    else
      g.add_edge(tok[0], tok[1]);
  }
  return g;
}

GateGraph GateGraph::from_edge_list_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open graph file: " + path);
  return from_edge_list(in);
}

std::vector<std::size_t> GateGraph::topo_order() const {
  std::vector<std::size_t> indeg(size(), 0);
  for (const auto& e : edges_) ++indeg[e.dst];
  std::vector<std::size_t> order;
  order.reserve(size());
  std::queue<std::size_t> ready;
  for (std::size_t v = 0; v < size(); ++v)
    if (indeg[v] == 0) ready.push(v);
  while (!ready.empty()) {
    std::size_t v = ready.front();
    ready.pop();
    order.push_back(v);
    for (std::size_t ei : out_[v])
      if (--indeg[edges_[ei].dst] == 0) ready.push(edges_[ei].dst);
  }
  if (order.size() != size())
    throw CyclicGraph("gate graph contains a combinational cycle");
  return order;
}

std::vector<std::size_t> GateGraph::asap_slots() const {
  std::vector<std::size_t> slot(size(), 0);
  for (std::size_t v : topo_order())
    for (std::size_t ei : out_[v])
      slot[edges_[ei].dst] = std::max(slot[edges_[ei].dst], slot[v] + 1);
  return slot;
}

std::string PhaseAssignment::to_json(const GateGraph& g) const {
  nlohmann::json j;
  j["k"] = k;
  j["total_dffs"] = total_dffs;
  j["gates"] = nlohmann::json::array();
  for (std::size_t v = 0; v < g.size(); ++v)
    j["gates"].push_back({{"name", g.gates()[v].name},
                          {"slot", slot[v]},
                          {"phase", phase(v)}});
  j["edges"] = nlohmann::json::array();
  for (std::size_t ei = 0; ei < g.edges().size(); ++ei)
    j["edges"].push_back({{"src", g.gates()[g.edges()[ei].src].name},
                          {"dst", g.gates()[g.edges()[ei].dst].name},
                          {"dffs", edge_dffs[ei]}});
  return j.dump(2);
}

std::string PhaseAssignment::to_csv(const GateGraph& g) const {
  std::ostringstream out;
  out << "gate,slot,phase\n";
  for (std::size_t v = 0; v < g.size(); ++v)
    out << g.gates()[v].name << ',' << slot[v] << ',' << phase(v) << '\n';
  return out.str();
}

PhaseAssignment assign_phases(const GateGraph& g, unsigned k, Method method) {
  if (k == 0) throw InfeasibleK("phase count must be at least 1");
  switch (method) {
    case Method::greedy_asap:
      return finalize(g, k, g.asap_slots());
    case Method::lp_relax_round:
      return finalize(g, k, lp_optimal_slots(g));
    case Method::exact_small:
      return exact_search(g, k);
  }
  throw std::invalid_argument("unknown assignment method");
}

HoldReport check_hold_safe(const GateGraph& g, const PhaseAssignment& a) {
  if (a.slot.size() != g.size())
    throw SizeMismatch("assignment does not cover the graph");
  HoldReport report;
  for (std::size_t ei = 0; ei < g.edges().size(); ++ei) {
    const Edge& e = g.edges()[ei];
    if (a.slot[e.dst] <= a.slot[e.src]) {
      report.violations.push_back(
          {ei, "consumer captures no later than producer launches"});
      continue;
    }
    std::size_t span = a.slot[e.dst] - a.slot[e.src];
    if (span < a.k && a.phase(e.dst) == a.phase(e.src))
      report.violations.push_back(
          {ei, "same phase with span below one period"});
  }
  return report;
}

double throughput_of(unsigned k, double base_freq) {
  if (k == 0) throw InfeasibleK("phase count must be at least 1");
  return base_freq / static_cast<double>(k);
}

}  // namespace scentt::phaseclk
