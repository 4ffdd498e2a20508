// tables.hpp — reproduction of the published reference tables behind the
// `tables` CLI command, with per-row PASS/FLAG verdicts and discrepancy notes.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pacbound/classic.hpp"

namespace pacbound {

enum class TableId {
  table1,  // region mass required for a given confidence improvement
  table2,  // region mass required for a given bound decrease
  table3,  // sample growth required for a given bound decrease
};

std::string to_string(TableId id);
TableId table_id_from_string(const std::string& name);

struct TableSpec {
  TableId id = TableId::table1;
  std::int64_t m = 100;  // table3 defaults to 1000
  double delta = 0.05;
  double r_hat = 0.05;
  double loss_range = 1.0;
  std::vector<double> decreases = {10, 20, 30, 50, 75};  // percent
};

TableSpec default_table_spec(TableId id);

struct TableRow {
  double decrease_pct = 0.0;
  double computed = 0.0;
  std::optional<double> published;  // reference value, when one exists
  std::optional<double> companion;  // table2: the confidence-route value
  std::optional<double> abs_diff;   // |computed - published|
  bool pass = false;                // FLAG when false
  std::string note;
};

struct TableReport {
  TableSpec spec;
  double tolerance = 0.0;  // PASS threshold on |computed - published|
  std::vector<TableRow> rows;
  std::vector<std::string> findings;  // discrepancies worth reporting
};

// Published columns only attach when the requested parameters match the
// reference parameters the published values were computed for.
TableReport reproduce_table(const TableSpec& spec);

}  // namespace pacbound
