#include "orbita/report.hpp"

#include <cmath>
#include <cstdio>

namespace orbita::report {

namespace {

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) {
        return s;
    }
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') {
            out += '"';
        }
        out += ch;
    }
    out += '"';
    return out;
}

std::string cell(const nlohmann::json& v) {
    if (v.is_number()) {
        return format_number(v.get<double>());
    }
    if (v.is_string()) {
        return v.get<std::string>();
    }
    if (v.is_boolean()) {
        return v.get<bool>() ? "true" : "false";
    }
    if (v.is_array()) {
        std::string joined;
        for (const auto& item : v) {
            if (!joined.empty()) {
                joined += ',';
            }
            joined += cell(item);
        }
        return joined;
    }
    return v.dump();
}

void write_pairs(const char* header, const std::vector<std::pair<std::string, nlohmann::json>>& pairs,
                 std::ostream& out) {
    out << header << ",value\n";
    for (const auto& [key, value] : pairs) {
        out << csv_field(key) << ',' << csv_field(cell(value)) << '\n';
    }
}

nlohmann::json number(double v) {
    if (std::isfinite(v)) {
        return v;
    }
    return format_number(v);
}

}  // namespace

const char* to_string(Status s) {
    switch (s) {
        case Status::pass:
            return "PASS";
        case Status::fail:
            return "FAIL";
        case Status::not_applicable:
            return "N/A";
    }
    return "?";
}

std::string format_number(double v) {
    if (std::isnan(v)) {
        return "nan";
    }
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void Report::input(std::string key, nlohmann::json value) { inputs.emplace_back(std::move(key), std::move(value)); }

void Report::note(std::string key, nlohmann::json value) { summary.emplace_back(std::move(key), std::move(value)); }

void Report::check_at_most(std::string name, double value, double threshold) {
    verdicts.push_back({std::move(name), value, "<=", threshold, value <= threshold ? Status::pass : Status::fail, ""});
}

void Report::check_above(std::string name, double value, double threshold) {
    verdicts.push_back({std::move(name), value, ">", threshold, value > threshold ? Status::pass : Status::fail, ""});
}

void Report::not_applicable(std::string name, std::string why) {
    verdicts.push_back({std::move(name), std::nan(""), "", std::nan(""), Status::not_applicable, std::move(why)});
}

bool Report::failed() const {
    for (const auto& v : verdicts) {
        if (v.status == Status::fail) {
            return true;
        }
    }
    return false;
}

void write_csv(const Report& r, std::ostream& out) {
    if (!r.columns.empty()) {
        for (std::size_t i = 0; i < r.columns.size(); ++i) {
            out << (i ? "," : "") << csv_field(r.columns[i]);
        }
        out << '\n';
        for (const auto& row : r.rows) {
            for (std::size_t i = 0; i < row.size(); ++i) {
                out << (i ? "," : "") << format_number(row[i]);
            }
            out << '\n';
        }
        out << '\n';
    }
    std::vector<std::pair<std::string, nlohmann::json>> inputs{{"experiment", r.experiment}};
    inputs.insert(inputs.end(), r.inputs.begin(), r.inputs.end());
    write_pairs("input", inputs, out);
    out << '\n';
    write_pairs("summary", r.summary, out);
    out << '\n';
    out << "verdict,value,op,threshold,status,note\n";
    for (const auto& v : r.verdicts) {
        const bool na = v.status == Status::not_applicable;
        out << csv_field(v.name) << ',' << (na ? "" : format_number(v.value)) << ',' << v.op << ','
            << (na ? "" : format_number(v.threshold)) << ',' << to_string(v.status) << ',' << csv_field(v.note)
            << '\n';
    }
}

nlohmann::json to_json(const Report& r) {
    nlohmann::json j;
    j["experiment"] = r.experiment;
    j["inputs"] = nlohmann::json::object();
    for (const auto& [key, value] : r.inputs) {
        j["inputs"][key] = value;
    }
    j["columns"] = r.columns;
    j["rows"] = nlohmann::json::array();
    for (const auto& row : r.rows) {
        nlohmann::json jr = nlohmann::json::array();
        for (double v : row) {
            jr.push_back(number(v));
        }
        j["rows"].push_back(std::move(jr));
    }
    j["summary"] = nlohmann::json::object();
    for (const auto& [key, value] : r.summary) {
        j["summary"][key] = value.is_number() ? number(value.get<double>()) : value;
    }
    j["verdicts"] = nlohmann::json::array();
    for (const auto& v : r.verdicts) {
        nlohmann::json jv{{"name", v.name}, {"status", to_string(v.status)}};
        if (v.status == Status::not_applicable) {
            jv["note"] = v.note;
        } else {
            jv["value"] = number(v.value);
            jv["op"] = v.op;
            jv["threshold"] = number(v.threshold);
        }
        j["verdicts"].push_back(std::move(jv));
    }
    j["wall_time"] = r.wall_time;
    return j;
}

void write_json(const Report& r, std::ostream& out) { out << to_json(r).dump(2) << '\n'; }

}  // namespace orbita::report
