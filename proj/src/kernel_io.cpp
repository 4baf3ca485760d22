#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "besovop/error.hpp"
#include "besovop/kernel.hpp"

namespace besovop {
namespace {

constexpr std::string_view kMagic = "KERNEL v1";

void append_number(std::string& out, double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) throw Error(ErrorCode::FormatError, "cannot format value");
  out.append(buf, end);
}

[[noreturn]] void format_error(std::size_t line, std::size_t offset, const std::string& what) {
  throw Error(ErrorCode::FormatError,
              "line " + std::to_string(line) + ", offset " + std::to_string(offset) + ": " + what);
}

// Whitespace-separated tokens with their byte offsets in the line.
std::vector<std::pair<std::string_view, std::size_t>> tokens(std::string_view line) {
  std::vector<std::pair<std::string_view, std::size_t>> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
    if (i > start) out.emplace_back(line.substr(start, i - start), start);
  }
  return out;
}

template <class T>
T parse(std::string_view tok, std::size_t line, std::size_t offset) {
  T v{};
  const char* first = tok.data();
  const char* last = first + tok.size();
  if (!tok.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last) format_error(line, offset, "malformed number '" + std::string(tok) + "'");
  return v;
}

}  // namespace

void write_kernel(const std::string& path, const SampledKernel& kernel) {
  validate(kernel);
  std::string out;
  out.reserve(kernel.values.size() * 24 + 64);
  out += kMagic;
  out += '\n';
  out += std::to_string(kernel.grid_x.levels) + ' ' + std::to_string(kernel.grid_y.levels);
  for (double v : {kernel.grid_x.a, kernel.grid_x.b, kernel.grid_y.a, kernel.grid_y.b}) {
    out += ' ';
    append_number(out, v);
  }
  out += '\n';
  for (std::size_t i = 0; i < kernel.values.rows(); ++i) {
    const auto row = kernel.values.row(i);
    for (std::size_t m = 0; m < row.size(); ++m) {
      if (m) out += ' ';
      append_number(out, row[m]);
    }
    out += '\n';
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::FileNotFound, "cannot open '" + path + "' for writing");
  f << out;
  if (!f) throw Error(ErrorCode::FormatError, "write to '" + path + "' failed");
}

SampledKernel load_kernel(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::FileNotFound, "cannot open '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  const std::string text = ss.str();

  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string::npos) {
      // A kernel file always ends with a newline; anything else was cut short.
      format_error(lines.size() + 1, 0, "file ends without a newline (truncated)");
    }
    std::string_view line(text.data() + pos, nl - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    pos = nl + 1;
  }
  while (!lines.empty() && tokens(lines.back()).empty()) lines.pop_back();

  if (lines.empty() || tokens(lines[0]).size() != 2 || lines[0].substr(0, kMagic.size()) != kMagic)
    format_error(1, 0, "expected header 'KERNEL v1'");
  if (lines.size() < 2) format_error(2, 0, "missing grid line");
  const auto head = tokens(lines[1]);
  if (head.size() != 6) format_error(2, 0, "expected 'Jx Jy ax bx ay by'");
  SampledKernel k;
  k.grid_x.levels = parse<int>(head[0].first, 2, head[0].second);
  k.grid_y.levels = parse<int>(head[1].first, 2, head[1].second);
  k.grid_x.a = parse<double>(head[2].first, 2, head[2].second);
  k.grid_x.b = parse<double>(head[3].first, 2, head[3].second);
  k.grid_y.a = parse<double>(head[4].first, 2, head[4].second);
  k.grid_y.b = parse<double>(head[5].first, 2, head[5].second);
  if (k.grid_x.levels < 0 || k.grid_x.levels > 24 || k.grid_y.levels < 0 || k.grid_y.levels > 24)
    format_error(2, head[0].second, "grid levels must lie in [0, 24]");
  if (!(k.grid_x.b > k.grid_x.a) || !(k.grid_y.b > k.grid_y.a)) format_error(2, 0, "empty box");

  std::vector<double> data;
  std::size_t cols = 0;
  const std::size_t rows = lines.size() - 2;
  for (std::size_t r = 0; r < rows; ++r) {
    const std::size_t line_no = r + 3;
    const auto toks = tokens(lines[r + 2]);
    if (r == 0) cols = toks.size();
    if (toks.size() != cols || cols == 0)
      format_error(line_no, 0, "row has " + std::to_string(toks.size()) + " values, expected " + std::to_string(cols));
    for (const auto& [tok, off] : toks) data.push_back(parse<double>(tok, line_no, off));
  }
  // Full-width rows but fewer than announced: the file was cut short.
  if (cols == k.grid_y.point_count() && rows < k.grid_x.point_count())
    format_error(rows + 3, 0, "file ends after " + std::to_string(rows) + " of " +
                                  std::to_string(k.grid_x.point_count()) + " rows (truncated)");
  if (!is_power_of_two(rows) || !is_power_of_two(cols))
    throw Error(ErrorCode::NonPowerOfTwoGrid,
                "'" + path + "' holds a " + std::to_string(rows) + " x " + std::to_string(cols) + " grid");
  if (rows != k.grid_x.point_count() || cols != k.grid_y.point_count())
    format_error(2, 0, "grid line announces " + std::to_string(k.grid_x.point_count()) + " x " +
                           std::to_string(k.grid_y.point_count()) + " values, file holds " + std::to_string(rows) +
                           " x " + std::to_string(cols));
  k.values = Matrix(rows, cols);
  std::copy(data.begin(), data.end(), k.values.data().begin());
  k.label = path;
  validate(k);
  return k;
}

}  // namespace besovop
