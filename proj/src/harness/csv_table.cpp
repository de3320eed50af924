#include "marginlab/harness/csv_table.hpp"

#include "marginlab/core/errors.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace marginlab {

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

std::size_t CsvTable::column(const std::string& name) const {
    for (std::size_t c = 0; c < header_.size(); ++c)
        if (header_[c] == name) return c;
    throw std::out_of_range("csv column '" + name + "' not found");
}

double CsvTable::number(std::size_t row, std::size_t col) const {
    const std::string& s = cell(row, col);
    if (s == "nan") return std::nan("");
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0') throw ParseError(row + 2, "cell '" + s + "' is not a number");
    return v;
}

std::string CsvTable::format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

CsvTable::RowBuilder& CsvTable::RowBuilder::operator<<(const std::string& s) {
    cells_.push_back(s);
    return *this;
}
CsvTable::RowBuilder& CsvTable::RowBuilder::operator<<(double v) { return *this << format_number(v); }
CsvTable::RowBuilder& CsvTable::RowBuilder::operator<<(std::size_t v) { return *this << std::to_string(v); }
CsvTable::RowBuilder& CsvTable::RowBuilder::operator<<(int v) { return *this << std::to_string(v); }
CsvTable::RowBuilder& CsvTable::RowBuilder::operator<<(bool v) { return *this << std::string(v ? "1" : "0"); }

CsvTable::RowBuilder::~RowBuilder() noexcept(false) {
    if (std::uncaught_exceptions() == 0) table_.add_row(std::move(cells_));
}

void CsvTable::add_row(std::vector<std::string> cells) {
    if (cells.size() != header_.size())
        throw std::invalid_argument("csv row has " + std::to_string(cells.size()) + " cells, header has " +
                                    std::to_string(header_.size()));
    rows_.push_back(std::move(cells));
}

namespace {

void write_field(std::string& out, const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) {
        out += s;
        return;
    }
    out += '"';
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
}

void write_record(std::string& out, const std::vector<std::string>& cells) {
    for (std::size_t c = 0; c < cells.size(); ++c) {
        if (c) out += ',';
        write_field(out, cells[c]);
    }
    out += "\r\n";
}

}  // namespace

std::string CsvTable::to_string() const {
    std::string out;
    write_record(out, header_);
    for (const auto& r : rows_) write_record(out, r);
    return out;
}

void CsvTable::write(const std::filesystem::path& path) const {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    f << to_string();
}

CsvTable CsvTable::parse(const std::string& text) {
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> record;
    std::string field;
    bool quoted = false;
    bool field_started = false;
    std::size_t line = 1;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                if (c == '\n') ++line;
                field += c;
            }
            continue;
        }
        switch (c) {
            case '"':
                if (field_started && !field.empty()) throw ParseError(line, "quote inside unquoted field");
                quoted = true;
                field_started = true;
                break;
            case ',':
                record.push_back(std::move(field));
                field.clear();
                field_started = false;
                break;
            case '\r': break;
            case '\n':
                record.push_back(std::move(field));
                field.clear();
                field_started = false;
                records.push_back(std::move(record));
                record.clear();
                ++line;
                break;
            default:
                field += c;
                field_started = true;
        }
    }
    if (quoted) throw ParseError(line, "unterminated quoted field");
    if (field_started || !record.empty()) {
        record.push_back(std::move(field));
        records.push_back(std::move(record));
    }
    if (records.empty()) throw ParseError(1, "empty csv");
    CsvTable t(std::move(records.front()));
    for (std::size_t r = 1; r < records.size(); ++r) {
        if (records[r].size() != t.header_.size()) throw ParseError(r + 1, "ragged csv row");
        t.rows_.push_back(std::move(records[r]));
    }
    return t;
}

CsvTable CsvTable::read(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot read " + path.string());
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse(ss.str());
}

}  // namespace marginlab
