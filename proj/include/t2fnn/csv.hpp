#pragma once

// Locale-independent CSV emission. Doubles are written with 17 significant
// digits so every value round-trips exactly.

#include "t2fnn/harness.hpp"
#include "t2fnn/plants.hpp"

#include <filesystem>
#include <initializer_list>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace t2fnn {

std::string format_double(double v);
/// Inverse of format_double; throws std::invalid_argument.
double parse_double(std::string_view text);

class CsvWriter {
public:
    CsvWriter(std::ostream& out, std::initializer_list<std::string_view> header);

    CsvWriter& cell(double v);
    CsvWriter& cell(std::int64_t v);
    CsvWriter& cell(std::size_t v) { return cell(static_cast<std::int64_t>(v)); }
    CsvWriter& cell(std::string_view v);
    void end_row();

private:
    void sep();

    std::ostream& out_;
    std::size_t columns_;
    std::size_t in_row_ = 0;
};

inline constexpr std::string_view kSummaryHeader =
    "learner,plant,runs,failed_runs,epochs,train_rmse_mean,train_rmse_std,test_rmse_mean,test_rmse_std,"
    "frozen_rmse_mean,frozen_rmse_std";
inline constexpr std::string_view kCompareHeader = "learner,train_rmse,test_rmse,wall_clock_s,runs";

void write_plant_trace(std::ostream& out, const std::vector<PlantSample>& samples);
void write_trace(std::ostream& out, const std::vector<TraceRow>& rows);
void write_epochs(std::ostream& out, const ExperimentReport& report);
void write_summary(std::ostream& out, const ExperimentReport& report);
/// One row per report: learner, "mean±std" train and test RMSE, wall-clock, runs.
void write_compare(std::ostream& out, const std::vector<ExperimentReport>& reports);

/// Writes trace.csv, epochs.csv and summary.csv under `dir` (created if needed).
void write_report_files(const std::filesystem::path& dir, const ExperimentReport& report);

} // namespace t2fnn
