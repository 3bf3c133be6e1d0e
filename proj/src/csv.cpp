#include "t2fnn/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <locale>
#include <stdexcept>
#include <system_error>

namespace t2fnn {

std::string format_double(double v) {
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

double parse_double(std::string_view text) {
    if (text == "nan")
        return std::nan("");
    if (text == "inf")
        return INFINITY;
    if (text == "-inf")
        return -INFINITY;
    double v = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    if (!text.empty() && text.front() == '+')
        ++first;
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc{} || res.ptr != last || first == last)
        throw std::invalid_argument("not a number: '" + std::string(text) + "'");
    return v;
}

CsvWriter::CsvWriter(std::ostream& out, std::initializer_list<std::string_view> header)
    : out_(out), columns_(header.size()) {
    for (const auto h : header)
        cell(h);
    end_row();
}

void CsvWriter::sep() {
    if (in_row_++ > 0)
        out_ << ',';
}

CsvWriter& CsvWriter::cell(double v) {
    sep();
    out_ << format_double(v);
    return *this;
}

CsvWriter& CsvWriter::cell(std::int64_t v) {
    sep();
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    out_.write(buf, res.ptr - buf);
    return *this;
}

CsvWriter& CsvWriter::cell(std::string_view v) {
    sep();
    out_ << v;
    return *this;
}

void CsvWriter::end_row() {
    if (in_row_ != columns_)
        throw std::logic_error("CSV row has " + std::to_string(in_row_) + " cells, header has " +
                               std::to_string(columns_));
    out_ << '\n';
    in_row_ = 0;
}

void write_plant_trace(std::ostream& out, const std::vector<PlantSample>& samples) {
    CsvWriter w(out, {"k", "t", "u", "y"});
    for (const auto& s : samples) {
        w.cell(s.k).cell(s.t).cell(s.u).cell(s.y);
        w.end_row();
    }
}

void write_trace(std::ostream& out, const std::vector<TraceRow>& rows) {
    CsvWriter w(out, {"k", "t", "u", "y", "y_n", "e", "alpha", "q"});
    for (const auto& r : rows) {
        w.cell(r.k).cell(r.t).cell(r.u).cell(r.y).cell(r.y_n).cell(r.e).cell(r.alpha).cell(r.q);
        w.end_row();
    }
}

void write_epochs(std::ostream& out, const ExperimentReport& report) {
    CsvWriter w(out, {"run", "epoch", "train_rmse", "alpha", "q", "guard_hits", "sigma_projections",
                      "q_saturations", "degenerate_firings", "max_k_residual"});
    for (const auto& run : report.runs)
        for (const auto& e : run.epochs) {
            w.cell(e.run).cell(e.epoch).cell(e.train_rmse).cell(e.alpha).cell(e.q).cell(e.guard_hits);
            w.cell(e.sigma_projections).cell(e.q_saturations).cell(e.degenerate_firings).cell(e.max_k_residual);
            w.end_row();
        }
}

void write_summary(std::ostream& out, const ExperimentReport& report) {
    // The header literal is the schema; keep the two in sync.
    out << kSummaryHeader << '\n';
    const auto& c = report.config;
    out << learner_name(c.learner) << ',' << plant_name(c.plant) << ',' << c.runs << ',' << report.failed_runs << ','
        << c.epochs << ',' << format_double(report.train.mean) << ',' << format_double(report.train.std) << ','
        << format_double(report.test.mean) << ',' << format_double(report.test.std) << ','
        << format_double(report.frozen.mean) << ',' << format_double(report.frozen.std) << '\n';
}

void write_compare(std::ostream& out, const std::vector<ExperimentReport>& reports) {
    out << kCompareHeader << '\n';
    for (const auto& r : reports) {
        out << learner_name(r.config.learner) << ',' << format_double(r.train.mean) << "±"
            << format_double(r.train.std) << ',' << format_double(r.test.mean) << "±" << format_double(r.test.std)
            << ',' << format_double(r.wall_seconds) << ',' << r.config.runs << '\n';
    }
}

namespace {

std::ofstream open_out(const std::filesystem::path& p) {
    std::ofstream f(p, std::ios::binary);
    if (!f)
        throw std::runtime_error("cannot open " + p.string() + " for writing");
    f.imbue(std::locale::classic());
    return f;
}

} // namespace

void write_report_files(const std::filesystem::path& dir, const ExperimentReport& report) {
    std::filesystem::create_directories(dir);
    {
        auto f = open_out(dir / "trace.csv");
        write_trace(f, report.runs.empty() ? std::vector<TraceRow>{} : report.runs.front().trace);
    }
    {
        auto f = open_out(dir / "epochs.csv");
        write_epochs(f, report);
    }
    {
        auto f = open_out(dir / "summary.csv");
        write_summary(f, report);
    }
}

} // namespace t2fnn
