#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace marginlab {

// In-memory RFC 4180 table: CRLF line ends, fields quoted only when they
// contain a comma, quote, CR or LF. Numbers are written with %.17g so a
// double survives a write/read round trip exactly.
class CsvTable {
public:
    CsvTable() = default;
    explicit CsvTable(std::vector<std::string> header);

    const std::vector<std::string>& header() const noexcept { return header_; }
    std::size_t rows() const noexcept { return rows_.size(); }
    std::size_t column(const std::string& name) const;  // throws std::out_of_range
    const std::string& cell(std::size_t row, std::size_t col) const { return rows_.at(row).at(col); }
    double number(std::size_t row, std::size_t col) const;

    class RowBuilder {
    public:
        explicit RowBuilder(CsvTable& table) : table_(table) {}
        RowBuilder& operator<<(const std::string& s);
        RowBuilder& operator<<(const char* s) { return *this << std::string(s); }
        RowBuilder& operator<<(double v);
        RowBuilder& operator<<(std::size_t v);
        RowBuilder& operator<<(int v);
        RowBuilder& operator<<(bool v);
        ~RowBuilder() noexcept(false);

    private:
        CsvTable& table_;
        std::vector<std::string> cells_;
    };
    // Usage: table.row() << a << b << c;  the row is committed at end of statement.
    RowBuilder row() { return RowBuilder(*this); }
    void add_row(std::vector<std::string> cells);

    std::string to_string() const;
    void write(const std::filesystem::path& path) const;
    static CsvTable parse(const std::string& text);
    static CsvTable read(const std::filesystem::path& path);

    static std::string format_number(double v);

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

}  // namespace marginlab
