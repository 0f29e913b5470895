#include "pmvr/data_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "pmvr/error.hpp"

namespace pmvr {

const char* const kTraceHeader = "iter,stage,seconds,sfo,lmo,objective,fw_gap,grad_map,beta,opt_gap";

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view line, char delim) {
  std::vector<std::string_view> out;
  if (delim == ',') {
    std::size_t start = 0;
    while (true) {
      const auto pos = line.find(',', start);
      out.push_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
      if (pos == std::string_view::npos) break;
      start = pos + 1;
    }
    while (!out.empty() && out.back().empty()) out.pop_back();  // trailing commas
    return out;
  }
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    if (i >= line.size()) break;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (c < '0' || c > '9') return false;
  return true;
}

bool parse_double(std::string_view s, double& out) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return false;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size() && std::isfinite(out);
}

bool parse_u64(std::string_view s, std::uint64_t& out) {
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return !s.empty() && res.ec == std::errc() && res.ptr == s.data() + s.size();
}

bool is_sentinel(double v) {
  return std::abs(v + 99.99) < 1e-9 || std::abs(v + 999.0) < 1e-9;
}

// First token of a line under either delimiter.
std::string_view leading_token(std::string_view line) {
  const auto t = trim(line);
  const auto end = t.find_first_of(", \t");
  return t.substr(0, end);
}

char detect_delimiter(const std::vector<std::string_view>& lines) {
  for (auto line : lines)
    if (all_digits(leading_token(line))) return line.find(',') != std::string_view::npos ? ',' : ' ';
  return ',';
}

std::vector<std::string_view> split_lines(const std::string& text) {
  std::vector<std::string_view> lines;
  std::string_view all(text);
  std::size_t start = 0;
  while (start < all.size()) {
    const auto pos = all.find('\n', start);
    if (pos == std::string_view::npos) {
      lines.push_back(all.substr(start));
      break;
    }
    lines.push_back(all.substr(start, pos - start));
    start = pos + 1;
  }
  return lines;
}

}  // namespace

FrenchTable parse_french_csv(const std::string& text, const FrenchLoadOptions& options,
                             const std::string& source) {
  const auto lines = split_lines(text);
  FrenchTable table;
  FrenchLoadReport& rep = table.report;
  rep.total_lines = lines.size();
  rep.delimiter = detect_delimiter(lines);

  enum class Phase { kBefore, kInTable, kAfter } phase = Phase::kBefore;
  std::vector<std::string> header;
  std::vector<double> values;
  std::size_t d = 0;

  for (std::size_t n = 0; n < lines.size(); ++n) {
    const std::size_t line_no = n + 1;
    const auto tokens = split(lines[n], rep.delimiter);
    const bool data_line = !tokens.empty() && all_digits(tokens.front());
    if (!data_line || phase == Phase::kAfter) {
      ++rep.skipped;
      if (phase == Phase::kInTable) phase = Phase::kAfter;
      if (phase != Phase::kBefore || tokens.empty()) continue;
      std::vector<std::string> names;
      bool numeric = false;
      for (auto t : tokens) {
        double v;
        if (t.empty()) continue;
        if (parse_double(t, v)) numeric = true;
        names.emplace_back(t);
      }
      if (!numeric && names.size() >= 2) {
        header = std::move(names);
      } else if (!options.skip_preamble) {
        throw IoError(source + ": line " + std::to_string(line_no) +
                      ": unexpected text before the table");
      }
      continue;
    }
    const std::size_t fields = tokens.size() - 1;
    if (phase == Phase::kBefore) {
      d = fields;
      if (d == 0) throw IoError(source + ": line " + std::to_string(line_no) + ": no return fields");
      phase = Phase::kInTable;
    }
    if (fields != d)
      throw IoError(source + ": line " + std::to_string(line_no) + ": expected " +
                    std::to_string(d) + " return fields, got " + std::to_string(fields));
    std::vector<double> row(d);
    bool sentinel = false;
    for (std::size_t j = 0; j < d; ++j) {
      if (!parse_double(tokens[j + 1], row[j]))
        throw IoError(source + ": line " + std::to_string(line_no) + ", column " +
                      std::to_string(j + 2) + ": malformed numeric field '" +
                      std::string(tokens[j + 1]) + "'");
      if (is_sentinel(row[j])) sentinel = true;
    }
    if (sentinel) {
      const std::string reason =
          "line " + std::to_string(line_no) + ": missing-value sentinel (-99.99 or -999)";
      if (options.sentinel == SentinelPolicy::kError)
        throw IoError(source + ": " + reason + "; use the drop policy to skip such rows");
      ++rep.rejected;
      rep.rejections.push_back(reason);
      continue;
    }
    ++rep.parsed;
    table.dates.emplace_back(tokens.front());
    for (double v : row) values.push_back(v / 100.0);
  }
  if (rep.parsed == 0) throw IoError(source + ": no usable data rows");
  if (header.size() != d) header.clear();
  table.data = make_portfolio_data(Point::matrix(rep.parsed, d, std::move(values)),
                                   std::move(header), source);
  return table;
}

FrenchTable load_french_csv(const std::filesystem::path& path, const FrenchLoadOptions& options) {
  return parse_french_csv(read_text_file(path), options, path.string());
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string trace_to_csv(const std::vector<TraceRow>& rows) {
  std::string out = kTraceHeader;
  out += '\n';
  for (const auto& r : rows) {
    out += std::to_string(r.iter) + ',' + std::to_string(r.stage) + ',' + format_double(r.seconds) +
           ',' + std::to_string(r.sfo) + ',' + std::to_string(r.lmo) + ',' +
           format_double(r.objective) + ',' + format_double(r.fw_gap) + ',' +
           format_double(r.grad_map) + ',' + format_double(r.beta) + ',';
    if (r.opt_gap) out += format_double(*r.opt_gap);
    out += '\n';
  }
  return out;
}

std::vector<TraceRow> trace_from_csv(const std::string& text) {
  const auto lines = split_lines(text);
  if (lines.empty() || trim(lines.front()) != kTraceHeader)
    throw IoError("trace csv: header mismatch, expected '" + std::string(kTraceHeader) + "'");
  std::vector<TraceRow> rows;
  for (std::size_t n = 1; n < lines.size(); ++n) {
    if (trim(lines[n]).empty()) continue;
    std::vector<std::string_view> f;
    std::size_t start = 0;
    const std::string_view line = trim(lines[n]);
    while (true) {
      const auto pos = line.find(',', start);
      f.push_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
      if (pos == std::string_view::npos) break;
      start = pos + 1;
    }
    const std::string where = "trace csv line " + std::to_string(n + 1);
    if (f.size() != 10) throw IoError(where + ": expected 10 fields");
    TraceRow r;
    std::uint64_t stage = 0;
    bool ok = parse_u64(f[0], r.iter) && parse_u64(f[1], stage) && parse_double(f[2], r.seconds) &&
              parse_u64(f[3], r.sfo) && parse_u64(f[4], r.lmo) && parse_double(f[5], r.objective) &&
              parse_double(f[6], r.fw_gap) && parse_double(f[7], r.grad_map) &&
              parse_double(f[8], r.beta);
    if (ok && !f[9].empty()) {
      double g;
      ok = parse_double(f[9], g);
      r.opt_gap = g;
    }
    if (!ok) throw IoError(where + ": malformed field");
    r.stage = static_cast<std::uint32_t>(stage);
    rows.push_back(r);
  }
  return rows;
}

void write_trace_csv(const std::vector<TraceRow>& rows, const std::filesystem::path& path) {
  write_text_file(path, trace_to_csv(rows));
}

std::vector<TraceRow> read_trace_csv(const std::filesystem::path& path) {
  return trace_from_csv(read_text_file(path));
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("error reading " + path.string());
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create " + path.parent_path().string() + ": " + ec.message());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  out.flush();
  if (!out) throw IoError("error writing " + path.string());
}

}  // namespace pmvr
