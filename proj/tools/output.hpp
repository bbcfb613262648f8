#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace qmnls::cli {

/// %.17g, so values round-trip exactly.
std::string format_double(double v);

/// Rectangular CSV: every row must have as many cells as the header.
class CsvWriter {
public:
  CsvWriter(const std::filesystem::path& path, std::vector<std::string> header);

  CsvWriter& cell(double v);
  CsvWriter& cell(const std::string& v);
  CsvWriter& cell(std::size_t v);
  void end_row();

private:
  std::ofstream out_;
  std::filesystem::path path_;
  std::size_t width_;
  std::vector<std::string> row_;
};

void write_text(const std::filesystem::path& path, const std::string& text);

/// Appends timestamped lines to <out>/run.log.
class RunLog {
public:
  explicit RunLog(const std::filesystem::path& dir);
  void line(const std::string& msg);

private:
  std::ofstream out_;
};

}  // namespace qmnls::cli
