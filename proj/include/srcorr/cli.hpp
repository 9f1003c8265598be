#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace srcorr::cli {

enum ExitCode : int { kOk = 0, kValidation = 1, kVerdictFailed = 2, kResourceCap = 3 };

using Cell = std::variant<double, long long, std::string>;

/// A self-describing output table: config metadata plus named columns.
struct Table {
    std::vector<std::pair<std::string, std::string>> config;
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
    std::vector<std::string> notes;  ///< trailing "# key: value" lines (verdicts, skipped routes)
};

void write_csv(std::ostream& os, const Table& t);
void write_json(std::ostream& os, const Table& t);
/// Parses what write_csv produced. Numeric cells come back as double,
/// everything else as string.
Table read_csv(std::istream& is);

/// Runs the command line; output goes to --out or `out`, diagnostics to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace srcorr::cli
