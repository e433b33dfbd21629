#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cubesettle {

// Checks the cost model against its bundled reference figures: the gas
// schedules (table1), the per-rate data prices (table2), the amortised
// per-datum price grid (fig2a), and the standalone cost curves for the two
// oracle strategies (fig2b, fig2c).

struct ReproRow {
  std::string label;
  double computed{};
  double published{};
  double rel_err{};
  double tolerance{};
  bool pass{};
};

struct ReproResult {
  std::string which;
  std::vector<ReproRow> rows;
  bool pass = true;
};

// which: table1 | table2 | fig2a | fig2b | fig2c
ReproResult reproduce(const std::string& which);

std::vector<std::string> reproduce_targets();

void print_repro(std::ostream& out, const ReproResult& result);

}  // namespace cubesettle
