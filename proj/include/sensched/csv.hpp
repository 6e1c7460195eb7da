#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sensched/harness.hpp"

namespace sensched {

/// Minimal RFC-4180 writer: CRLF line endings, quoting only where required.
class CsvWriter {
  public:
    /// Opens `path` for writing (truncates). Throws config_error on failure.
    explicit CsvWriter(const std::string& path);
    ~CsvWriter();
    CsvWriter(const CsvWriter&) = delete;
    CsvWriter& operator=(const CsvWriter&) = delete;

    void row(const std::vector<std::string>& fields);

    /// Shortest round-trip decimal form of a double ("%.17g").
    static std::string number(double v);
    static std::string integer(std::int64_t v);

  private:
    struct Impl;
    Impl* impl_;
};

/// Comparison table: method,N,budget,J_total,nodes_visited,relaxations_solved,
/// wall_ms,schedule. The schedule field joins 1-based sensor picks with
/// semicolons. wall_ms stays empty unless include_timing — timings vary
/// between runs and would break byte-identical output for equal seeds.
void emit_csv(const ComparisonReport& report, const std::string& path,
              bool include_timing = false);

/// Same table for several reports (e.g. a horizon sweep): one header, then
/// every report's rows in order.
void emit_csv(const std::vector<ComparisonReport>& reports, const std::string& path,
              bool include_timing = false);

/// Tracking-error table: method,k,rmse_position with one row per method and
/// time step.
void emit_csv(const RmseReport& report, const std::string& path);

}  // namespace sensched
