#include "gradpush/trace.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "gradpush/errors.hpp"

namespace gradpush {

std::size_t TraceBundle::record_count() const {
  std::size_t n = 0;
  for (const auto& r : runs) n += r.records.size();
  return n;
}

bool TraceBundle::any_diverged() const {
  for (const auto& r : runs)
    if (r.diverged) return true;
  return false;
}

std::vector<double> metric_values_at(const TraceBundle& traces,
                                     const std::string& metric, std::int64_t t) {
  std::vector<double> out;
  for (const auto& run : traces.runs)
    for (const auto& rec : run.records)
      if (rec.t == t && rec.metric == metric) out.push_back(rec.value);
  return out;
}

std::vector<double> metric_values_at(const TraceBundle& traces,
                                     const std::string& metric, std::int64_t t,
                                     int node) {
  std::vector<double> out;
  for (const auto& run : traces.runs)
    for (const auto& rec : run.records)
      if (rec.t == t && rec.node == node && rec.metric == metric)
        out.push_back(rec.value);
  return out;
}

std::vector<std::int64_t> metric_times(const TraceBundle& traces,
                                       const std::string& metric) {
  std::set<std::int64_t> seen;
  for (const auto& run : traces.runs)
    for (const auto& rec : run.records)
      if (rec.metric == metric) seen.insert(rec.t);
  return {seen.begin(), seen.end()};
}

std::vector<int> metric_nodes(const TraceBundle& traces, const std::string& metric) {
  std::set<int> seen;
  for (const auto& run : traces.runs)
    for (const auto& rec : run.records)
      if (rec.metric == metric) seen.insert(rec.node);
  return {seen.begin(), seen.end()};
}

namespace {

const char kHeader[] = "run,t,node,metric,value";

std::string format_value(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

bool record_order(const TraceRecord& a, const TraceRecord& b) {
  if (a.run != b.run) return a.run < b.run;
  if (a.t != b.t) return a.t < b.t;
  if (a.node != b.node) return a.node < b.node;
  return a.metric < b.metric;
}

}  // namespace

std::string render_csv(const TraceBundle& traces) {
  std::vector<const TraceRecord*> rows;
  rows.reserve(traces.record_count());
  for (const auto& run : traces.runs)
    for (const auto& rec : run.records) rows.push_back(&rec);
  std::stable_sort(rows.begin(), rows.end(),
                   [](const TraceRecord* a, const TraceRecord* b) {
                     return record_order(*a, *b);
                   });

  std::string out;
  out.reserve(rows.size() * 48 + 64);
  for (const auto& c : traces.comments) {
    out += "# ";
    out += c;
    out += '\n';
  }
  out += kHeader;
  out += '\n';
  for (const TraceRecord* r : rows) {
    out += std::to_string(r->run);
    out += ',';
    out += std::to_string(r->t);
    out += ',';
    out += std::to_string(r->node);
    out += ',';
    out += r->metric;
    out += ',';
    out += format_value(r->value);
    out += '\n';
  }
  return out;
}

void emit_csv(const TraceBundle& traces, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("emit_csv: cannot open for writing: " + path);
  std::string body = render_csv(traces);
  out.write(body.data(), static_cast<std::streamsize>(body.size()));
  if (!out) throw IoError("emit_csv: write failed: " + path);
}

TraceBundle parse_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("parse_csv: cannot open: " + path);

  TraceBundle bundle;
  std::map<int, std::size_t> run_slot;
  std::string line;
  std::size_t lineno = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!header_seen) {
      if (line.rfind("# ", 0) == 0) {
        bundle.comments.push_back(line.substr(2));
        continue;
      }
      if (line != kHeader)
        throw ValidationError("parse_csv: bad header at line " + std::to_string(lineno) +
                              " in " + path);
      header_seen = true;
      continue;
    }
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string field;
    TraceRecord rec;
    try {
      std::getline(ss, field, ',');
      rec.run = std::stoi(field);
      std::getline(ss, field, ',');
      rec.t = std::stoll(field);
      std::getline(ss, field, ',');
      rec.node = std::stoi(field);
      std::getline(ss, rec.metric, ',');
      if (!std::getline(ss, field))
        throw ValidationError("missing value field");
      std::size_t pos = 0;
      rec.value = std::stod(field, &pos);
      if (pos != field.size()) throw ValidationError("trailing junk in value");
    } catch (const std::exception&) {
      throw ValidationError("parse_csv: malformed row at line " + std::to_string(lineno) +
                            " in " + path);
    }
    auto it = run_slot.find(rec.run);
    if (it == run_slot.end()) {
      it = run_slot.emplace(rec.run, bundle.runs.size()).first;
      bundle.runs.push_back(RunTrace{rec.run, false, {}});
    }
    bundle.runs[it->second].records.push_back(std::move(rec));
  }
  if (!header_seen) throw ValidationError("parse_csv: missing header in " + path);
  return bundle;
}

}  // namespace gradpush
