#include "aoisim/report.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>

namespace aoisim {

namespace {

std::string csv_cell(const nlohmann::json& v) {
    if (v.is_null())
        return "";
    if (v.is_string()) {
        const std::string& s = v.get_ref<const std::string&>();
        if (s.find_first_of(",\"\n") == std::string::npos)
            return s;
        std::string quoted = "\"";
        for (char ch : s) {
            if (ch == '"')
                quoted += '"';
            quoted += ch;
        }
        quoted += '"';
        return quoted;
    }
    if (v.is_number_float())
        return format_double(v.get<double>());
    return v.dump();  // integers, booleans
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

void write_table(const Table& table, const Metadata& metadata, OutputFormat format,
                 std::ostream& os) {
    if (format == OutputFormat::Csv) {
        for (const auto& [key, value] : metadata)
            os << "# " << key << "=" << value << "\n";
        for (size_t i = 0; i < table.columns.size(); ++i)
            os << (i ? "," : "") << table.columns[i];
        os << "\n";
        for (const nlohmann::json& row : table.rows) {
            for (size_t i = 0; i < table.columns.size(); ++i) {
                if (i)
                    os << ",";
                if (row.contains(table.columns[i]))
                    os << csv_cell(row.at(table.columns[i]));
            }
            os << "\n";
        }
        return;
    }
    nlohmann::json doc;
    nlohmann::json meta = nlohmann::json::object();
    for (const auto& [key, value] : metadata)
        meta[key] = value;
    doc["metadata"] = meta;
    doc["rows"] = table.rows;
    os << doc.dump(2) << "\n";
}

void write_output(const Table& table, const Metadata& metadata, OutputFormat format,
                  const std::string& path) {
    if (path == "-") {
        write_table(table, metadata, format, std::cout);
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot open output file: " + path);
    write_table(table, metadata, format, out);
    if (!out)
        throw IoError("failed writing output file: " + path);
}

}  // namespace aoisim
