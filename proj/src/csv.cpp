#include "sensched/csv.hpp"

#include <cstdio>
#include <fstream>

#include "sensched/errors.hpp"

namespace sensched {

struct CsvWriter::Impl {
    std::ofstream out;
    std::string path;
};

CsvWriter::CsvWriter(const std::string& path) : impl_(new Impl) {
    impl_->path = path;
    impl_->out.open(path, std::ios::binary | std::ios::trunc);
    if (!impl_->out) {
        delete impl_;
        throw config_error("cannot open " + path + " for writing");
    }
}

CsvWriter::~CsvWriter() {
    impl_->out.flush();
    delete impl_;
}

namespace {

bool needs_quoting(const std::string& field) {
    return field.find_first_of(",\"\r\n") != std::string::npos;
}

std::string quoted(const std::string& field) {
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

}  // namespace

void CsvWriter::row(const std::vector<std::string>& fields) {
    std::string line;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) line += ',';
        line += needs_quoting(fields[i]) ? quoted(fields[i]) : fields[i];
    }
    line += "\r\n";
    impl_->out << line;
    if (!impl_->out) throw config_error("write failed on " + impl_->path);
}

std::string CsvWriter::number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string CsvWriter::integer(std::int64_t v) { return std::to_string(v); }

namespace {

std::string schedule_field(const Schedule& schedule) {
    std::string out;
    for (int k = 0; k < schedule.horizon(); ++k) {
        if (k) out += ';';
        out += std::to_string(schedule.pick(k) + 1);  // 1-based sensor numbering
    }
    return out;
}

}  // namespace

namespace {

void comparison_rows(CsvWriter& csv, const ComparisonReport& report, bool include_timing) {
    for (const MethodRun& run : report.methods) {
        std::string wall_ms;
        if (include_timing) {
            char buf[64];
            std::snprintf(buf, sizeof(buf), "%.3f", run.stats.wall_time.count() * 1e3);
            wall_ms = buf;
        }
        csv.row({method_name(run.method), CsvWriter::integer(report.horizon),
                 CsvWriter::number(report.budget), CsvWriter::number(run.J_total),
                 CsvWriter::integer(run.stats.nodes_visited),
                 CsvWriter::integer(run.stats.relaxations_solved), wall_ms,
                 schedule_field(run.schedule)});
    }
}

const std::vector<std::string> kComparisonHeader = {
    "method",        "N",       "budget",  "J_total",
    "nodes_visited", "relaxations_solved", "wall_ms", "schedule"};

}  // namespace

void emit_csv(const ComparisonReport& report, const std::string& path, bool include_timing) {
    CsvWriter csv(path);
    csv.row(kComparisonHeader);
    comparison_rows(csv, report, include_timing);
}

void emit_csv(const std::vector<ComparisonReport>& reports, const std::string& path,
              bool include_timing) {
    CsvWriter csv(path);
    csv.row(kComparisonHeader);
    for (const ComparisonReport& report : reports)
        comparison_rows(csv, report, include_timing);
}

void emit_csv(const RmseReport& report, const std::string& path) {
    CsvWriter csv(path);
    csv.row({"method", "k", "rmse_position"});
    for (const RmseSeries& series : report.methods)
        for (std::size_t k = 0; k < series.rmse_position.size(); ++k)
            csv.row({method_name(series.method), CsvWriter::integer(static_cast<int>(k) + 1),
                     CsvWriter::number(series.rmse_position[k])});
}

}  // namespace sensched
