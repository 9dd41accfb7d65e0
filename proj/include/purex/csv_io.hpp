#pragma once

// CSV interchange: per-trial records and aggregate summaries. Headers are
// fixed; readers reject any other header and report line/field context.

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "purex/experiment.hpp"

namespace purex {

inline constexpr std::string_view kTrialHeader =
    "algorithm,family,n,k,mode,trial,seed,total_samples,correct,capped,wall_time_ns";
inline constexpr std::string_view kSummaryHeader =
    "algorithm,family,n,k,mode,trials,mean_samples,stderr_samples,accuracy,capped";

void write_trials_csv(std::ostream& out, std::span<const TrialRecord> records);
void write_trials_csv(const std::filesystem::path& path, std::span<const TrialRecord> records);
std::vector<TrialRecord> read_trials_csv(std::istream& in);
std::vector<TrialRecord> read_trials_csv(const std::filesystem::path& path);

void write_summary_csv(std::ostream& out, std::span<const SummaryRow> rows);
void write_summary_csv(const std::filesystem::path& path, std::span<const SummaryRow> rows);
std::vector<SummaryRow> read_summary_csv(std::istream& in);

}  // namespace purex
