#include "purex/csv_io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

#include <fmt/format.h>
#include <fmt/ostream.h>

namespace purex {

namespace {

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    fields.push_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

[[noreturn]] void field_error(std::size_t line, std::string_view column, std::string_view value) {
  throw std::runtime_error(fmt::format("csv line {}, field '{}': cannot parse '{}'", line, column, value));
}

template <typename T>
T parse_number(std::string_view s, std::size_t line, std::string_view column) {
  T value{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size()) field_error(line, column, s);
  return value;
}

bool parse_flag(std::string_view s, std::size_t line, std::string_view column) {
  if (s == "1") return true;
  if (s == "0") return false;
  field_error(line, column, s);
}

std::string_view strip_cr(std::string_view s) {
  if (!s.empty() && s.back() == '\r') s.remove_suffix(1);
  return s;
}

// Reads the header and data lines; calls `row` with (line number, fields).
template <typename RowFn>
void read_csv(std::istream& in, std::string_view header, RowFn&& row) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("csv: missing header line");
  const auto got = strip_cr(line);
  if (got != header) {
    const auto want_cols = split(header);
    const auto got_cols = split(got);
    for (std::size_t i = 0; i < want_cols.size(); ++i) {
      if (i >= got_cols.size() || got_cols[i] != want_cols[i]) {
        throw std::runtime_error(fmt::format("csv header: expected column '{}' at position {}, found '{}'",
                                             want_cols[i], i, i < got_cols.size() ? got_cols[i] : ""));
      }
    }
    throw std::runtime_error(fmt::format("csv header: unexpected extra column '{}'", got_cols[want_cols.size()]));
  }
  const std::size_t columns = split(header).size();
  std::size_t number = 1;
  while (std::getline(in, line)) {
    ++number;
    const auto text = strip_cr(line);
    if (text.empty()) continue;
    const auto fields = split(text);
    if (fields.size() != columns) {
      throw std::runtime_error(fmt::format("csv line {}: expected {} fields, found {}", number, columns, fields.size()));
    }
    row(number, fields);
  }
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(fmt::format("cannot open '{}' for writing", path.string()));
  return out;
}

}  // namespace

void write_trials_csv(std::ostream& out, std::span<const TrialRecord> records) {
  out << kTrialHeader << '\n';
  for (const auto& r : records) {
    fmt::print(out, "{},{},{},{},{},{},{},{},{},{},{}\n", r.algorithm, r.family, r.n, r.k, mode_name(r.mode), r.trial,
               r.seed, r.total_samples, r.correct ? 1 : 0, r.capped ? 1 : 0, r.wall_time_ns);
  }
}

void write_trials_csv(const std::filesystem::path& path, std::span<const TrialRecord> records) {
  auto out = open_out(path);
  write_trials_csv(out, records);
}

std::vector<TrialRecord> read_trials_csv(std::istream& in) {
  std::vector<TrialRecord> records;
  read_csv(in, kTrialHeader, [&](std::size_t line, const std::vector<std::string_view>& f) {
    TrialRecord r;
    r.algorithm = std::string(f[0]);
    r.family = std::string(f[1]);
    r.n = parse_number<std::size_t>(f[2], line, "n");
    r.k = parse_number<std::size_t>(f[3], line, "k");
    try {
      r.mode = parse_mode(f[4]);
    } catch (const std::invalid_argument&) {
      field_error(line, "mode", f[4]);
    }
    r.trial = parse_number<std::uint64_t>(f[5], line, "trial");
    r.seed = parse_number<std::uint64_t>(f[6], line, "seed");
    r.total_samples = parse_number<std::uint64_t>(f[7], line, "total_samples");
    r.correct = parse_flag(f[8], line, "correct");
    r.capped = parse_flag(f[9], line, "capped");
    r.wall_time_ns = parse_number<std::int64_t>(f[10], line, "wall_time_ns");
    records.push_back(std::move(r));
  });
  return records;
}

std::vector<TrialRecord> read_trials_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(fmt::format("cannot open '{}'", path.string()));
  return read_trials_csv(in);
}

void write_summary_csv(std::ostream& out, std::span<const SummaryRow> rows) {
  out << kSummaryHeader << '\n';
  for (const auto& r : rows) {
    fmt::print(out, "{},{},{},{},{},{},{},{},{},{}\n", r.algorithm, r.family, r.n, r.k, r.mode, r.trials,
               r.mean_samples, r.stderr_samples, r.accuracy, r.capped);
  }
}

void write_summary_csv(const std::filesystem::path& path, std::span<const SummaryRow> rows) {
  auto out = open_out(path);
  write_summary_csv(out, rows);
}

std::vector<SummaryRow> read_summary_csv(std::istream& in) {
  std::vector<SummaryRow> rows;
  read_csv(in, kSummaryHeader, [&](std::size_t line, const std::vector<std::string_view>& f) {
    SummaryRow r;
    r.algorithm = std::string(f[0]);
    r.family = std::string(f[1]);
    r.n = parse_number<std::size_t>(f[2], line, "n");
    r.k = parse_number<std::size_t>(f[3], line, "k");
    r.mode = std::string(f[4]);
    r.trials = parse_number<std::uint64_t>(f[5], line, "trials");
    r.mean_samples = parse_number<double>(f[6], line, "mean_samples");
    r.stderr_samples = parse_number<double>(f[7], line, "stderr_samples");
    r.accuracy = parse_number<double>(f[8], line, "accuracy");
    r.capped = parse_number<std::uint64_t>(f[9], line, "capped");
    rows.push_back(std::move(r));
  });
  return rows;
}

}  // namespace purex
