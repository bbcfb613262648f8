#include "output.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <stdexcept>

namespace qmnls::cli {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

CsvWriter::CsvWriter(const std::filesystem::path& path, std::vector<std::string> header)
    : out_(path), path_(path), width_(header.size()) {
  if (!out_) throw std::runtime_error("cannot write " + path.string());
  row_ = std::move(header);
  end_row();
}

CsvWriter& CsvWriter::cell(double v) {
  row_.push_back(format_double(v));
  return *this;
}

CsvWriter& CsvWriter::cell(const std::string& v) {
  row_.push_back(v);
  return *this;
}

CsvWriter& CsvWriter::cell(std::size_t v) {
  row_.push_back(std::to_string(v));
  return *this;
}

void CsvWriter::end_row() {
  if (row_.size() != width_)
    throw std::logic_error(path_.string() + ": row has " + std::to_string(row_.size()) + " cells, header has " +
                           std::to_string(width_));
  for (std::size_t i = 0; i < row_.size(); ++i) out_ << (i ? "," : "") << row_[i];
  out_ << '\n';
  row_.clear();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

RunLog::RunLog(const std::filesystem::path& dir) : out_(dir / "run.log", std::ios::app) {}

void RunLog::line(const std::string& msg) {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", &tm);
  out_ << stamp << ' ' << msg << '\n';
  out_.flush();
}

}  // namespace qmnls::cli
