#include "gradpush/graph.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "gradpush/errors.hpp"
#include "gradpush/rng.hpp"

namespace gradpush {

DirectedGraph::DirectedGraph(int n, std::vector<std::vector<int>> out_neighbors)
    : n_(n), out_(std::move(out_neighbors)) {
  if (n <= 0) throw ValidationError("DirectedGraph: node count must be positive");
  if (static_cast<int>(out_.size()) != n)
    throw ValidationError("DirectedGraph: adjacency size does not match node count");
  in_.assign(n, {});
  for (int i = 0; i < n_; ++i) {
    auto& nbrs = out_[i];
    for (int j : nbrs) {
      if (j < 0 || j >= n_)
        throw ValidationError("DirectedGraph: out-neighbor index out of range");
    }
    nbrs.push_back(i);  // self-loop, deduplicated below
    std::sort(nbrs.begin(), nbrs.end());
    nbrs.erase(std::unique(nbrs.begin(), nbrs.end()), nbrs.end());
    for (int j : nbrs) in_[j].push_back(i);
  }
  // out_ was filled in node order, so each in-list is already sorted.
}

bool DirectedGraph::is_regular() const {
  int d = out_degree(0);
  for (int i = 0; i < n_; ++i) {
    if (out_degree(i) != d || in_degree(i) != d) return false;
  }
  return true;
}

DirectedGraph DirectedGraph::edge_union(const DirectedGraph& a, const DirectedGraph& b) {
  if (a.node_count() != b.node_count())
    throw ValidationError("edge_union: node counts differ");
  std::vector<std::vector<int>> out(a.node_count());
  for (int i = 0; i < a.node_count(); ++i) {
    out[i] = a.out_neighbors(i);
    out[i].insert(out[i].end(), b.out_neighbors(i).begin(), b.out_neighbors(i).end());
  }
  return DirectedGraph(a.node_count(), std::move(out));
}

namespace {

// Visits everything reachable from node 0 along the given adjacency.
int reachable_count(const DirectedGraph& g, bool forward) {
  int n = g.node_count();
  std::vector<char> seen(n, 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  int count = 1;
  while (!stack.empty()) {
    int u = stack.back();
    stack.pop_back();
    const auto& nbrs = forward ? g.out_neighbors(u) : g.in_neighbors(u);
    for (int v : nbrs) {
      if (!seen[v]) {
        seen[v] = 1;
        ++count;
        stack.push_back(v);
      }
    }
  }
  return count;
}

}  // namespace

bool is_strongly_connected(const DirectedGraph& g) {
  int n = g.node_count();
  return reachable_count(g, true) == n && reachable_count(g, false) == n;
}

GraphSequence::GraphSequence(int n, Supplier supplier, std::optional<int> declared_B,
                             bool time_invariant, std::string name)
    : n_(n),
      supplier_(std::move(supplier)),
      declared_B_(declared_B),
      time_invariant_(time_invariant),
      name_(std::move(name)) {
  if (time_invariant_) cached_ = std::make_shared<const DirectedGraph>(supplier_(0));
}

DirectedGraph GraphSequence::at(std::uint64_t t) const {
  if (cached_) return *cached_;
  return supplier_(t);
}

ConnectivityReport check_B_strong_connectivity(const GraphSequence& seq, int B,
                                               std::uint64_t horizon) {
  if (B <= 0) throw ValidationError("B-strong-connectivity: B must be positive");
  if (horizon < static_cast<std::uint64_t>(B))
    throw ValidationError("B-strong-connectivity: horizon must be at least B");
  std::uint64_t windows = horizon / static_cast<std::uint64_t>(B);
  for (std::uint64_t k = 0; k < windows; ++k) {
    DirectedGraph window = seq.at(k * B);
    for (int j = 1; j < B; ++j)
      window = DirectedGraph::edge_union(window, seq.at(k * B + j));
    if (!is_strongly_connected(window))
      return {false, static_cast<std::int64_t>(k)};
  }
  return {true, -1};
}

GraphSequence generate_cycle_plus_random(int n, std::uint64_t seed) {
  if (n < 2) throw ValidationError("cycle_plus_random: need at least 2 nodes");
  auto supplier = [n, seed](std::uint64_t t) {
    std::vector<std::vector<int>> out(n);
    for (int i = 0; i < n; ++i) {
      Rng rng{seed, t, static_cast<std::uint64_t>(i)};
      int random_nbr = static_cast<int>(rng.bounded(static_cast<std::uint64_t>(n)));
      out[i] = {(i + 1) % n, random_nbr};  // self-loop added by the constructor
    }
    return DirectedGraph(n, std::move(out));
  };
  return GraphSequence(n, supplier, 1, false, "cycle_plus_random");
}

GraphSequence generate_alternating_stars(int n, int hub_a, int hub_b) {
  if (n < 2) throw ValidationError("alternating_stars: need at least 2 nodes");
  if (hub_a == hub_b) throw ValidationError("alternating_stars: hubs must differ");
  if (hub_a < 0 || hub_a >= n || hub_b < 0 || hub_b >= n)
    throw ValidationError("alternating_stars: hub index out of range");
  auto supplier = [n, hub_a, hub_b](std::uint64_t t) {
    int hub = (t % 2 == 0) ? hub_a : hub_b;
    std::vector<std::vector<int>> out(n);
    for (int i = 0; i < n; ++i) {
      if (i == hub) {
        out[i].resize(n);
        for (int j = 0; j < n; ++j) out[i][j] = j;
      } else {
        out[i] = {hub};
      }
    }
    return DirectedGraph(n, std::move(out));
  };
  return GraphSequence(n, supplier, 1, false, "alternating_stars");
}

GraphSequence static_sequence(DirectedGraph g, std::string name) {
  int n = g.node_count();
  auto shared = std::make_shared<const DirectedGraph>(std::move(g));
  auto supplier = [shared](std::uint64_t) { return *shared; };
  std::optional<int> B;
  if (is_strongly_connected(*shared)) B = 1;
  return GraphSequence(n, supplier, B, true, std::move(name));
}

GraphSequence generate_complete(int n) {
  if (n < 1) throw ValidationError("complete: need at least 1 node");
  std::vector<std::vector<int>> out(n);
  for (int i = 0; i < n; ++i) {
    out[i].resize(n);
    for (int j = 0; j < n; ++j) out[i][j] = j;
  }
  auto seq = static_sequence(DirectedGraph(n, std::move(out)), "complete");
  return seq;
}

GraphSequence generate_ring(int n) {
  if (n < 1) throw ValidationError("ring: need at least 1 node");
  std::vector<std::vector<int>> out(n);
  for (int i = 0; i < n; ++i) out[i] = {(i + 1) % n};
  return static_sequence(DirectedGraph(n, std::move(out)), "ring");
}

GraphSequence load_edge_list_sequence(const std::string& path, int n) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open edge-list file: " + path);
  std::vector<std::vector<std::pair<int, int>>> edges_by_t;
  std::string line;
  std::uint64_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    std::int64_t t;
    int src, dst;
    if (!(ss >> t)) continue;  // blank line
    if (!(ss >> src >> dst) || t < 0)
      throw ValidationError("edge-list " + path + ": malformed line " +
                            std::to_string(lineno));
    if (src < 0 || src >= n || dst < 0 || dst >= n)
      throw ValidationError("edge-list " + path + ": node index out of range at line " +
                            std::to_string(lineno));
    if (static_cast<std::size_t>(t) >= edges_by_t.size())
      edges_by_t.resize(static_cast<std::size_t>(t) + 1);
    edges_by_t[static_cast<std::size_t>(t)].emplace_back(src, dst);
  }
  if (edges_by_t.empty())
    throw ValidationError("edge-list " + path + ": no edges found");

  auto graphs = std::make_shared<std::vector<DirectedGraph>>();
  graphs->reserve(edges_by_t.size());
  for (const auto& edges : edges_by_t) {
    std::vector<std::vector<int>> out(n);
    for (auto [src, dst] : edges) out[src].push_back(dst);
    graphs->emplace_back(n, std::move(out));
  }
  std::uint64_t period = graphs->size();
  auto supplier = [graphs, period](std::uint64_t t) { return (*graphs)[t % period]; };
  return GraphSequence(n, supplier, std::nullopt, period == 1, "edge_list");
}

}  // namespace gradpush
