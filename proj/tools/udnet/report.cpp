#include "report.hpp"

#include <charconv>
#include <cmath>
#include <set>

namespace udnet::cli {

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

namespace {

ojson number_json(double v) {
    if (std::isfinite(v)) return v;
    return format_double(v);
}

ojson field_json(const Field& f) {
    if (const auto* n = std::get_if<Num>(&f)) {
        ojson j = {{"value", number_json(n->value)}, {"provenance", n->provenance}};
        if (n->std_error) j["std_error"] = number_json(*n->std_error);
        return j;
    }
    if (const auto* s = std::get_if<std::string>(&f)) return *s;
    if (const auto* b = std::get_if<bool>(&f)) return *b;
    if (const auto* x = std::get_if<double>(&f)) return number_json(*x);
    return std::get<long long>(f);
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string o = "\"";
    for (char c : s) {
        if (c == '"') o += '"';
        o += c;
    }
    return o + "\"";
}

std::string config_cell(const ojson& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_float()) return format_double(v.get<double>());
    if (v.is_null()) return "";
    return v.dump();
}

}  // namespace

void write_json(std::ostream& out, const Report& r) {
    ojson j;
    j["command"] = r.command;
    j["config"] = r.config;
    ojson rows = ojson::array();
    for (const auto& rec : r.rows) {
        ojson o = ojson::object();
        for (const auto& [k, f] : rec.fields) o[k] = field_json(f);
        rows.push_back(std::move(o));
    }
    j["results"] = std::move(rows);
    out << j.dump(2) << '\n';
}

void write_csv(std::ostream& out, const Report& r) {
    // column layout: config.* first, then result fields in first-seen order;
    // a numeric field k expands to k, k.provenance and (for mc) k.std_error
    struct Col {
        std::string key;
        bool numeric;
        bool has_se;
    };
    std::vector<Col> cols;
    std::set<std::string> seen;
    for (const auto& [k, numeric] : r.columns) {
        cols.push_back({k, numeric, false});
        seen.insert(k);
    }
    for (const auto& rec : r.rows)
        for (const auto& [k, f] : rec.fields)
            if (seen.insert(k).second) cols.push_back({k, std::holds_alternative<Num>(f), false});
    for (auto& c : cols)
        for (const auto& rec : r.rows)
            for (const auto& [k, f] : rec.fields)
                if (k == c.key)
                    if (const auto* n = std::get_if<Num>(&f); n && (n->std_error || n->provenance == kMc)) c.has_se = true;

    std::vector<std::string> header;
    for (const auto& [k, v] : r.config.items()) header.push_back("config." + k);
    for (const auto& c : cols) {
        header.push_back(c.key);
        if (c.numeric) header.push_back(c.key + ".provenance");
        if (c.has_se) header.push_back(c.key + ".std_error");
    }
    auto write_line = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out << ',';
            out << csv_escape(cells[i]);
        }
        out << '\n';
    };
    write_line(header);
    std::vector<std::string> cfg;
    for (const auto& [k, v] : r.config.items()) cfg.push_back(config_cell(v));
    for (const auto& rec : r.rows) {
        std::vector<std::string> cells = cfg;
        for (const auto& c : cols) {
            const Field* found = nullptr;
            for (const auto& [k, f] : rec.fields)
                if (k == c.key) found = &f;
            std::string v, prov, se;
            if (found) {
                if (const auto* n = std::get_if<Num>(found)) {
                    v = format_double(n->value);
                    prov = n->provenance;
                    if (n->std_error) se = format_double(*n->std_error);
                } else if (const auto* s = std::get_if<std::string>(found)) {
                    v = *s;
                } else if (const auto* b = std::get_if<bool>(found)) {
                    v = *b ? "true" : "false";
                } else if (const auto* x = std::get_if<double>(found)) {
                    v = format_double(*x);
                } else {
                    v = std::to_string(std::get<long long>(*found));
                }
            }
            cells.push_back(v);
            if (c.numeric) cells.push_back(prov);
            if (c.has_se) cells.push_back(se);
        }
        write_line(cells);
    }
}

}  // namespace udnet::cli
