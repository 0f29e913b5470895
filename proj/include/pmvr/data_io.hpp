#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "pmvr/benchmarks.hpp"
#include "pmvr/metrics.hpp"

namespace pmvr {

enum class SentinelPolicy { kError, kDrop };

struct FrenchLoadOptions {
  SentinelPolicy sentinel = SentinelPolicy::kError;
  /// Skip text lines before the first table. When false, any non-data line
  /// ahead of the table is an error.
  bool skip_preamble = true;
};

/// Line accounting for one file; parsed + skipped + rejected == total_lines.
struct FrenchLoadReport {
  std::size_t total_lines = 0;
  std::size_t parsed = 0;
  std::size_t skipped = 0;   ///< blank, preamble, header, footer and later tables
  std::size_t rejected = 0;  ///< sentinel rows dropped by policy
  std::vector<std::string> rejections;  ///< "line N: reason"
  char delimiter = ',';                 ///< ',' or ' ' for whitespace
};

struct FrenchTable {
  PortfolioData data;  ///< percent values divided by 100
  std::vector<std::string> dates;
  FrenchLoadReport report;
};

/// Reads the first table of a Kenneth French industry-portfolio file, comma or
/// whitespace delimited (detected per file).
FrenchTable load_french_csv(const std::filesystem::path& path, const FrenchLoadOptions& options = {});
FrenchTable parse_french_csv(const std::string& text, const FrenchLoadOptions& options = {},
                             const std::string& source = "memory");

/// `iter,stage,seconds,sfo,lmo,objective,fw_gap,grad_map,beta,opt_gap`
extern const char* const kTraceHeader;

std::string format_double(double v);
std::string trace_to_csv(const std::vector<TraceRow>& rows);
std::vector<TraceRow> trace_from_csv(const std::string& text);
void write_trace_csv(const std::vector<TraceRow>& rows, const std::filesystem::path& path);
std::vector<TraceRow> read_trace_csv(const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace pmvr
