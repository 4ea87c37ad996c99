#pragma once

#include <string>
#include <vector>

namespace reisda {

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t column(const std::string& name) const;  // throws if absent
    bool has_column(const std::string& name) const;
};

// RFC-4180 reader: quoted fields, embedded separators/newlines, CRLF input.
CsvTable read_csv(const std::string& path);
CsvTable parse_csv(const std::string& text);

// Writer quotes only where required and uses '\n' line ends and '.' decimals.
std::string format_csv(const CsvTable& table);
void write_csv(const std::string& path, const CsvTable& table);

// shortest round-trip decimal representation
std::string format_double(double v);
double parse_double(const std::string& s);  // throws InvalidInputError on junk

void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

}  // namespace reisda
