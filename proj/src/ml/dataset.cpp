#include "tml2/error.hpp"
#include "tml2/ml.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>

namespace tml2::ml {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_cells(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    while (true) {
        auto comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            cells.push_back(trim(line.substr(start)));
            return cells;
        }
        cells.push_back(trim(line.substr(start, comma - start)));
        start = comma + 1;
    }
}

std::optional<double> parse_number(std::string_view cell) {
    if (cell.empty()) return std::nullopt;
    if (cell.front() == '+') cell.remove_prefix(1);
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
    if (ec != std::errc{} || ptr != cell.data() + cell.size() || !std::isfinite(value)) return std::nullopt;
    return value;
}

}  // namespace

Matrix Dataset::features() const {
    Matrix x;
    x.reserve(rows.size());
    for (const auto& row : rows) x.emplace_back(row.begin(), row.end() - 1);
    return x;
}

Vector Dataset::labels() const {
    Vector y;
    y.reserve(rows.size());
    for (const auto& row : rows) y.push_back(row.back());
    return y;
}

Dataset parse_dataset(std::string_view text, const std::vector<std::string>& features,
                      const std::string& label, std::string_view source_name) {
    const std::string where(source_name);
    std::vector<std::string_view> lines;
    for (std::size_t start = 0; start <= text.size();) {
        auto nl = text.find('\n', start);
        if (nl == std::string_view::npos) nl = text.size();
        lines.push_back(text.substr(start, nl - start));
        start = nl + 1;
    }
    while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
    if (lines.empty()) throw Error("E-SCHEMA", where + ": missing header line");

    const auto header = split_cells(lines.front());
    std::unordered_map<std::string_view, std::size_t> column_of;
    for (std::size_t j = 0; j < header.size(); ++j) {
        if (!column_of.emplace(header[j], j).second)
            throw Error("E-SCHEMA", where + ": duplicate header name '" + std::string(header[j]) + "'");
    }

    std::vector<std::string> wanted = features;
    wanted.push_back(label);
    std::vector<std::size_t> source_column;
    for (const auto& name : wanted) {
        auto it = column_of.find(name);
        if (it == column_of.end()) throw Error("E-SCHEMA", where + ": missing column '" + name + "'");
        for (auto c : source_column) {
            if (c == it->second) throw Error("E-SCHEMA", where + ": column '" + name + "' requested twice");
        }
        source_column.push_back(it->second);
    }

    Dataset data;
    data.columns = wanted;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (trim(lines[i]).empty()) continue;
        const auto cells = split_cells(lines[i]);
        if (cells.size() != header.size()) {
            throw Error("E-PARSE", where + ":" + std::to_string(i + 1) + ": expected " +
                                       std::to_string(header.size()) + " cells, found " +
                                       std::to_string(cells.size()));
        }
        Vector parsed(cells.size());
        for (std::size_t j = 0; j < cells.size(); ++j) {
            auto value = parse_number(cells[j]);
            if (!value) {
                throw Error("E-PARSE", where + ":" + std::to_string(i + 1) + ":" + std::to_string(j + 1) +
                                           ": not a number: '" + std::string(cells[j]) + "'");
            }
            parsed[j] = *value;
        }
        Vector row;
        row.reserve(source_column.size());
        for (auto c : source_column) row.push_back(parsed[c]);
        data.rows.push_back(std::move(row));
    }
    if (data.rows.empty()) throw Error("E-SCHEMA", where + ": no data rows");
    return data;
}

Dataset load_dataset(const std::filesystem::path& path, const std::vector<std::string>& features,
                     const std::string& label) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("E-IO", "cannot read dataset '" + path.string() + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_dataset(buffer.str(), features, label, path.string());
}

ScalerParams fit_scaler(const Matrix& x) {
    ScalerParams scaler;
    if (x.empty()) return scaler;
    const std::size_t d = x.front().size();
    const auto n = static_cast<double>(x.size());
    scaler.mean.assign(d, 0.0);
    scaler.scale.assign(d, 0.0);
    for (const auto& row : x)
        for (std::size_t j = 0; j < d; ++j) scaler.mean[j] += row[j];
    for (auto& m : scaler.mean) m /= n;
    for (const auto& row : x) {
        for (std::size_t j = 0; j < d; ++j) {
            const double diff = row[j] - scaler.mean[j];
            scaler.scale[j] += diff * diff;
        }
    }
    for (auto& s : scaler.scale) {
        s = std::sqrt(s / n);
        if (s == 0.0) s = 1.0;
    }
    return scaler;
}

Vector apply_scaler(const ScalerParams& scaler, std::span<const double> x) {
    Vector out(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) out[j] = (x[j] - scaler.mean[j]) / scaler.scale[j];
    return out;
}

Matrix apply_scaler(const ScalerParams& scaler, const Matrix& x) {
    Matrix out;
    out.reserve(x.size());
    for (const auto& row : x) out.push_back(apply_scaler(scaler, std::span<const double>(row)));
    return out;
}

}  // namespace tml2::ml
