#include "marginlab/core/csv_io.hpp"

#include "marginlab/core/errors.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

namespace marginlab {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::optional<double> parse_number(std::string_view cell) {
    cell = trim(cell);
    if (cell.empty()) return std::nullopt;
    if (cell.front() == '+') cell.remove_prefix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (ec != std::errc() || ptr != cell.data() + cell.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(',', start);
        if (pos == std::string_view::npos) {
            cells.push_back(line.substr(start));
            break;
        }
        cells.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return cells;
}

}  // namespace

Dataset parse_csv(std::istream& in, LabelKind kind) {
    std::vector<double> features;
    std::vector<double> labels;
    std::size_t columns = 0;
    std::size_t line_no = 0;
    bool first_row = true;
    std::size_t max_class = 0;
    std::string line;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view row = trim(line);
        if (row.empty()) continue;
        const auto cells = split(row);
        std::vector<double> values;
        values.reserve(cells.size());
        bool numeric = true;
        for (auto c : cells) {
            const auto v = parse_number(c);
            if (!v) {
                numeric = false;
                break;
            }
            values.push_back(*v);
        }
        if (first_row) {
            first_row = false;
            columns = cells.size();
            if (columns < 2) throw ParseError(line_no, "need at least one feature column and a label column");
            if (!numeric) continue;  // header
        }
        if (cells.size() != columns)
            throw ParseError(line_no, "expected " + std::to_string(columns) + " columns, found " +
                                          std::to_string(cells.size()));
        if (!numeric) throw ParseError(line_no, "non-numeric cell");
        const double y = values.back();
        switch (kind) {
            case LabelKind::binary:
                if (y != 1.0 && y != -1.0) throw ParseError(line_no, "binary label must be -1 or +1");
                break;
            case LabelKind::multiclass:
                if (y < 0.0 || y != std::floor(y)) throw ParseError(line_no, "class label must be a non-negative integer");
                max_class = std::max(max_class, static_cast<std::size_t>(y));
                break;
            case LabelKind::regression: break;
        }
        features.insert(features.end(), values.begin(), values.end() - 1);
        labels.push_back(y);
    }
    if (labels.empty()) throw ParseError(line_no == 0 ? 1 : line_no, "no data rows");
    const std::size_t num_classes = kind == LabelKind::multiclass ? std::max<std::size_t>(2, max_class + 1) : 0;
    return Dataset::from_rows(columns - 1, std::move(features), std::move(labels), kind, num_classes);
}

Dataset load_csv(const std::filesystem::path& path, LabelKind kind) {
    std::ifstream in(path);
    if (!in) throw ParseError(0, "cannot open " + path.string());
    return parse_csv(in, kind);
}

}  // namespace marginlab
