#include "corrnoise/result_io.hpp"

#include "corrnoise/errors.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

namespace corrnoise {

namespace {

constexpr std::size_t kColumns = 11;

template <class T>
std::string optional_field(const std::optional<T>& v) {
    if (!v) return {};
    if constexpr (std::is_same_v<T, int>) {
        return std::to_string(*v);
    } else {
        return format_number(*v);
    }
}

std::optional<double> parse_double(const std::string& field, const char* column) {
    if (field.empty()) return std::nullopt;
    if (field == "inf") return HUGE_VAL;
    if (field == "-inf") return -HUGE_VAL;
    if (field == "nan") return std::nan("");
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc() || ptr != field.data() + field.size()) {
        throw InputError(std::string("CSV column ") + column + ": '" + field + "' is not a number");
    }
    return value;
}

std::optional<int> parse_int(const std::string& field, const char* column) {
    if (field.empty()) return std::nullopt;
    int value = 0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc() || ptr != field.data() + field.size()) {
        throw InputError(std::string("CSV column ") + column + ": '" + field + "' is not an integer");
    }
    return value;
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> fields;
    std::string current;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(current);
            current.clear();
        } else if (c != '\r') {
            current.push_back(c);
        }
    }
    fields.push_back(current);
    return fields;
}

} // namespace

std::string format_number(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value, std::chars_format::general, 17);
    return std::string(buf.data(), res.ptr);
}

std::string to_csv_line(const ResultRow& row) {
    if (row.scenario.find(',') != std::string::npos || row.extra.find(',') != std::string::npos) {
        throw ContractError("CSV text fields must not contain commas");
    }
    std::string line = row.scenario;
    for (const auto& f : {optional_field(row.n_spins), optional_field(row.xi), optional_field(row.t),
                          optional_field(row.site), optional_field(row.sz), optional_field(row.abs_sx),
                          optional_field(row.purity), optional_field(row.quality), optional_field(row.fidelity)}) {
        line += ',';
        line += f;
    }
    line += ',';
    line += row.extra;
    return line;
}

void write_csv(std::ostream& out, const std::vector<ResultRow>& rows) {
    out << kCsvHeader << '\n';
    for (const auto& r : rows) out << to_csv_line(r) << '\n';
}

ResultRow parse_csv_line(const std::string& line) {
    const auto f = split(line);
    if (f.size() != kColumns) {
        throw InputError("CSV row has " + std::to_string(f.size()) + " fields, expected " +
                         std::to_string(kColumns) + ": " + line);
    }
    ResultRow r;
    r.scenario = f[0];
    r.n_spins = parse_int(f[1], "N");
    r.xi = parse_double(f[2], "xi");
    r.t = parse_double(f[3], "t");
    r.site = parse_int(f[4], "site");
    r.sz = parse_double(f[5], "sz");
    r.abs_sx = parse_double(f[6], "abs_sx");
    r.purity = parse_double(f[7], "purity");
    r.quality = parse_double(f[8], "quality");
    r.fidelity = parse_double(f[9], "fidelity");
    r.extra = f[10];
    return r;
}

std::vector<ResultRow> read_csv(std::istream& in) {
    std::string header;
    if (!std::getline(in, header)) throw InputError("CSV input is empty");
    if (!header.empty() && header.back() == '\r') header.pop_back();
    if (header != kCsvHeader) {
        const auto got = split(header);
        const auto want = split(kCsvHeader);
        for (std::size_t i = 0; i < want.size(); ++i) {
            if (i >= got.size() || got[i] != want[i])
                throw InputError("CSV header is missing column '" + want[i] + "'");
        }
        throw InputError("CSV header has unexpected extra columns");
    }
    std::vector<ResultRow> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        rows.push_back(parse_csv_line(line));
    }
    return rows;
}

std::optional<std::string> extra_value(const std::string& extra, const std::string& key) {
    std::stringstream ss(extra);
    std::string item;
    while (std::getline(ss, item, ';')) {
        const auto eq = item.find('=');
        if (eq != std::string::npos && item.substr(0, eq) == key) return item.substr(eq + 1);
    }
    return std::nullopt;
}

} // namespace corrnoise
