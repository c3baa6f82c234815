#ifndef GRADPUSH_GRAPH_HPP
#define GRADPUSH_GRAPH_HPP

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace gradpush {

/// Directed graph on nodes 0..n-1. Every node is an in- and out-neighbor of
/// itself; adjacency is stored with the self-loop explicit so out_degree(i)
/// counts it, which is the convention the mixing weights 1/d_j rely on.
class DirectedGraph {
public:
  /// Builds from out-adjacency lists. Lists are deduplicated and sorted, and
  /// the self-loop is inserted when missing. Throws ValidationError on an
  /// out-of-range node index.
  DirectedGraph(int n, std::vector<std::vector<int>> out_neighbors);

  int node_count() const { return n_; }
  int out_degree(int i) const { return static_cast<int>(out_[i].size()); }
  int in_degree(int i) const { return static_cast<int>(in_[i].size()); }
  const std::vector<int>& out_neighbors(int i) const { return out_[i]; }
  const std::vector<int>& in_neighbors(int i) const { return in_[i]; }

  /// True iff all in-degrees and out-degrees equal one common value
  /// (self-loops counted).
  bool is_regular() const;

  bool operator==(const DirectedGraph& other) const {
    return n_ == other.n_ && out_ == other.out_;
  }

  /// Union of edge sets; both graphs must share the node count.
  static DirectedGraph edge_union(const DirectedGraph& a, const DirectedGraph& b);

private:
  int n_;
  std::vector<std::vector<int>> out_;
  std::vector<std::vector<int>> in_;
};

/// True iff every node reaches every node along directed paths
/// (forward + reverse BFS from node 0).
bool is_strongly_connected(const DirectedGraph& g);

/// Time-indexed supplier of graphs. Deterministic: the same t always yields
/// the same graph, so random families are replayable without stored history.
class GraphSequence {
public:
  using Supplier = std::function<DirectedGraph(std::uint64_t)>;

  GraphSequence(int n, Supplier supplier, std::optional<int> declared_B,
                bool time_invariant, std::string name);

  int node_count() const { return n_; }
  DirectedGraph at(std::uint64_t t) const;
  std::optional<int> declared_B() const { return declared_B_; }
  bool time_invariant() const { return time_invariant_; }
  const std::string& name() const { return name_; }

private:
  int n_;
  Supplier supplier_;
  std::optional<int> declared_B_;
  bool time_invariant_;
  std::string name_;
  std::shared_ptr<const DirectedGraph> cached_;  // only for time-invariant sequences
};

struct ConnectivityReport {
  bool connected = false;
  // First window index k whose union graph E_B(k) is not strongly connected;
  // -1 when all windows pass.
  std::int64_t first_failing_window = -1;
};

/// Unions E(kB)..E((k+1)B-1) for every complete window inside [0, horizon)
/// and checks strong connectivity of each union graph.
ConnectivityReport check_B_strong_connectivity(const GraphSequence& seq, int B,
                                               std::uint64_t horizon);

inline bool verify_B_strong_connectivity(const GraphSequence& seq, int B,
                                         std::uint64_t horizon) {
  return check_B_strong_connectivity(seq, B, horizon).connected;
}

// Generators. All are deterministic functions of their arguments.

/// Every node points at itself, the next node on a fixed cycle, and one
/// uniformly random node resampled independently at each step.
/// B=1 by construction: the fixed cycle alone is strongly connected.
GraphSequence generate_cycle_plus_random(int n, std::uint64_t seed);

/// Even t: undirected star centered at hub_a; odd t: star at hub_b.
GraphSequence generate_alternating_stars(int n, int hub_a, int hub_b);

/// The same graph at every t.
GraphSequence static_sequence(DirectedGraph g, std::string name = "static");

/// Complete graph with self-loops.
GraphSequence generate_complete(int n);

/// Directed cycle i -> i+1 (mod n) with self-loops.
GraphSequence generate_ring(int n);

/// Parses an edge-list file: one `t src dst` triple per line, 0-indexed,
/// '#' comments and blank lines ignored. Self-loops are added if absent.
/// The sequence repeats with period max_t+1 past the last listed time.
GraphSequence load_edge_list_sequence(const std::string& path, int n);

}  // namespace gradpush

#endif
