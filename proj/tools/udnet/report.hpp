#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "json.hpp"

namespace udnet::cli {

using ojson = nlohmann::ordered_json;

inline constexpr const char* kClosedForm = "closed-form";
inline constexpr const char* kQuadrature = "quadrature";
inline constexpr const char* kMc = "mc";
inline constexpr const char* kPlancherel = "plancherel";

struct Num {
    double value = 0.0;
    std::string provenance;
    std::optional<double> std_error;
};

// a bare double is an echoed input (grid coordinate), not a computed number
using Field = std::variant<Num, std::string, bool, long long, double>;

struct Record {
    std::vector<std::pair<std::string, Field>> fields;

    Record& num(const std::string& k, double v, const char* prov) {
        fields.emplace_back(k, Num{v, prov, std::nullopt});
        return *this;
    }
    Record& mc(const std::string& k, double v, double se) {
        fields.emplace_back(k, Num{v, kMc, se});
        return *this;
    }
    Record& str(const std::string& k, std::string v) {
        fields.emplace_back(k, std::move(v));
        return *this;
    }
    Record& flag(const std::string& k, bool v) {
        fields.emplace_back(k, v);
        return *this;
    }
    Record& input(const std::string& k, double v) {
        fields.emplace_back(k, v);
        return *this;
    }
    Record& integer(const std::string& k, long long v) {
        fields.emplace_back(k, v);
        return *this;
    }
};

struct Report {
    std::string command;
    ojson config = ojson::object();
    std::vector<Record> rows;
    // CSV columns to emit even when there are no rows (name, is_numeric)
    std::vector<std::pair<std::string, bool>> columns;
};

// Shortest round-trip decimal; "inf", "-inf", "nan" for non-finite values.
std::string format_double(double v);

void write_json(std::ostream& out, const Report& r);
void write_csv(std::ostream& out, const Report& r);

}  // namespace udnet::cli
