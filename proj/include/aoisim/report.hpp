#pragma once

#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "aoisim/config.hpp"

namespace aoisim {

inline constexpr const char* kToolVersion = "aoisim 0.1.0";

// Deterministic shortest-ish formatting used for every CSV number.
std::string format_double(double v);

// A column-ordered result table; cell values keep their JSON types so the
// JSON output stays typed while CSV applies the canonical formatting.
struct Table {
    std::vector<std::string> columns;
    std::vector<nlohmann::json> rows;  // objects keyed by column name

    void add_row(nlohmann::json row) { rows.push_back(std::move(row)); }
};

using Metadata = std::vector<std::pair<std::string, std::string>>;

// CSV: "# key=value" comment lines, a header row, one line per row.
// JSON: {"metadata": {...}, "rows": [...]}.
void write_table(const Table& table, const Metadata& metadata, OutputFormat format,
                 std::ostream& os);

// Writes to the path ("-" means stdout); throws IoError on failure.
void write_output(const Table& table, const Metadata& metadata, OutputFormat format,
                  const std::string& path);

}  // namespace aoisim
