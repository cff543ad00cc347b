// result_io.hpp — Long-format CSV rows shared by every scenario:
//
//   scenario,N,xi,t,site,sz,abs_sx,purity,quality,fidelity,extra
//
// Absent fields are written empty. Sites are 1-based. `extra` carries
// scenario-specific `key=value` pairs separated by ';' and never contains a
// comma. Numbers are written with 17 significant digits (trailing zeros
// dropped), so every value round-trips exactly.

#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace corrnoise {

struct ResultRow {
    std::string scenario;
    std::optional<int> n_spins;
    std::optional<double> xi;
    std::optional<double> t;
    std::optional<int> site;
    std::optional<double> sz;
    std::optional<double> abs_sx;
    std::optional<double> purity;
    std::optional<double> quality;
    std::optional<double> fidelity;
    std::string extra;

    bool operator==(const ResultRow&) const = default;
};

inline constexpr const char* kCsvHeader = "scenario,N,xi,t,site,sz,abs_sx,purity,quality,fidelity,extra";

std::string format_number(double value);
std::string to_csv_line(const ResultRow& row);
void write_csv(std::ostream& out, const std::vector<ResultRow>& rows);

// Throws InputError naming the offending line or the missing column.
ResultRow parse_csv_line(const std::string& line);
std::vector<ResultRow> read_csv(std::istream& in);

// Value of `key` inside an extra field, if present.
std::optional<std::string> extra_value(const std::string& extra, const std::string& key);

} // namespace corrnoise
