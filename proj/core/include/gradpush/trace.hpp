#ifndef GRADPUSH_TRACE_HPP
#define GRADPUSH_TRACE_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace gradpush {

/// One logged metric value. Network-level metrics (consensus residual, max
/// iterate norm, perturbation norms) use node = -1.
struct TraceRecord {
  int run = 0;
  std::int64_t t = 0;
  int node = -1;
  std::string metric;
  double value = 0.0;
};

/// Metrics from a single run, in logging order (t non-decreasing).
struct RunTrace {
  int run_index = 0;
  bool diverged = false;
  std::vector<TraceRecord> records;

  void log(std::int64_t t, int node, std::string metric, double value) {
    records.push_back({run_index, t, node, std::move(metric), value});
  }
};

/// A batch of runs plus header comments carried through the CSV.
struct TraceBundle {
  std::vector<std::string> comments;  // emitted as "# ..." lines before the header
  std::vector<RunTrace> runs;

  std::size_t record_count() const;
  bool any_diverged() const;
};

/// Collects every record of the given metric at time t (all runs, all nodes).
std::vector<double> metric_values_at(const TraceBundle& traces,
                                     const std::string& metric, std::int64_t t);

/// Values of a (metric, node) pair across runs at time t.
std::vector<double> metric_values_at(const TraceBundle& traces,
                                     const std::string& metric, std::int64_t t,
                                     int node);

/// Sorted distinct time indices carrying the given metric.
std::vector<std::int64_t> metric_times(const TraceBundle& traces,
                                       const std::string& metric);

/// Sorted distinct node ids carrying the given metric.
std::vector<int> metric_nodes(const TraceBundle& traces, const std::string& metric);

/// Writes `run,t,node,metric,value` rows sorted by (run, t, node, metric),
/// values with 17 significant digits, LF line endings. Comment lines go
/// first, prefixed with "# ". Re-emitting a parsed file is byte-identical.
void emit_csv(const TraceBundle& traces, const std::string& path);

/// Renders the CSV into a string (emit_csv writes exactly these bytes).
std::string render_csv(const TraceBundle& traces);

/// Parses a CSV produced by emit_csv. Strict: exact header, 5 fields per row.
TraceBundle parse_csv(const std::string& path);

}  // namespace gradpush

#endif
