#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "sparsegof/simulation.hpp"
#include "sparsegof/tables.hpp"

namespace sparsegof {

inline constexpr int kSchemaVersion = 1;

/// Shortest decimal string that parses back to the same double.
std::string format_double(double v);

/// Table CSV: a header row of column labels whose first field is blank or
/// "rows", then one row per table row (label, then nonnegative integers).
ContingencyTable parse_table_csv(std::istream& in);
ContingencyTable read_table_csv(const std::string& path);
void write_table_csv(std::ostream& out, const ContingencyTable& table);

/// Numbers separated by commas, whitespace or newlines; '#' starts a comment.
std::vector<double> parse_number_list(std::istream& in);
std::vector<double> read_number_file(const std::string& path);
std::vector<std::int64_t> read_counts_file(const std::string& path);

nlohmann::json to_json(const TestReport& report);
TestReport test_report_from_json(const nlohmann::json& j);
/// One row per statistic plus a trailing combined-decision row.
void write_test_report_csv(std::ostream& out, const TestReport& report);

nlohmann::json to_json(const SimulationReport& report);
/// Per-alpha rejection-rate table.
void write_simulation_csv(std::ostream& out, const SimulationReport& report);
/// Columns: replicate, c, Q, G, RC23, Qab, Gab, applicable.
void write_records_csv(std::ostream& out, const std::vector<ReplicateRecord>& records);
/// Columns: c, count, q95_Q, q95_Qab, q95_G, q95_Gab, q95_RC23, threshold.
void write_quantiles_csv(std::ostream& out, const SimulationReport& report);

}  // namespace sparsegof
