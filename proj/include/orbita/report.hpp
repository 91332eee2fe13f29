#ifndef ORBITA_REPORT_HPP
#define ORBITA_REPORT_HPP

// Experiment reports: input echo, a numeric table, summary values and
// verdicts, written as sectioned CSV or as a single JSON document.

#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace orbita::report {

enum class Status { pass, fail, not_applicable };

const char* to_string(Status s);

/// A verdict keeps the measured value, the comparison and the threshold, so
/// the status can be recomputed from the written file.
struct Verdict {
    std::string name;
    double value = 0.0;
    std::string op;  ///< "<=" or ">"
    double threshold = 0.0;
    Status status = Status::not_applicable;
    std::string note;
};

struct Report {
    std::string experiment;
    std::vector<std::pair<std::string, nlohmann::json>> inputs;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    std::vector<std::pair<std::string, nlohmann::json>> summary;
    std::vector<Verdict> verdicts;
    double wall_time = 0.0;  ///< seconds; JSON only, so CSV stays reproducible

    void input(std::string key, nlohmann::json value);
    void note(std::string key, nlohmann::json value);

    /// Records value <= threshold.
    void check_at_most(std::string name, double value, double threshold);
    /// Records value > threshold.
    void check_above(std::string name, double value, double threshold);
    void not_applicable(std::string name, std::string why);

    bool failed() const;
};

/// Sections (table, inputs, summary, verdicts) separated by blank lines,
/// each with its own header row. Numbers use 17 significant digits.
void write_csv(const Report& r, std::ostream& out);

nlohmann::json to_json(const Report& r);
void write_json(const Report& r, std::ostream& out);

/// %.17g, so the text reads back to the same double. nan and inf are spelled out.
std::string format_number(double v);

}  // namespace orbita::report

#endif  // ORBITA_REPORT_HPP
