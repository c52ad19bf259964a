#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <system_error>
#include <type_traits>
#include <vector>

#include "flowsched/error.hpp"

namespace flowsched::io {

// Shortest decimal text that reads back to the same double.
inline std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

class CsvWriter {
 public:
  explicit CsvWriter(const std::vector<std::string>& header) { row_strings(header); }

  CsvWriter& field(std::string_view s) {
    separate();
    const bool quote = s.find_first_of(",\"\n") != std::string_view::npos;
    if (!quote) {
      out_.append(s);
      return *this;
    }
    out_.push_back('"');
    for (char c : s) {
      if (c == '"') out_.push_back('"');
      out_.push_back(c);
    }
    out_.push_back('"');
    return *this;
  }
  CsvWriter& field(const std::string& s) { return field(std::string_view(s)); }
  CsvWriter& field(const char* s) { return field(std::string_view(s)); }
  CsvWriter& field(double x) { return field(std::string_view(format_double(x))); }
  CsvWriter& field(bool b) { return field(std::string_view(b ? "true" : "false")); }
  template <class Int>
    requires std::is_integral_v<Int>
  CsvWriter& field(Int n) { return field(std::string_view(std::to_string(n))); }

  void end_row() {
    out_.push_back('\n');
    fresh_ = true;
  }

  void row_strings(const std::vector<std::string>& cells) {
    for (const auto& c : cells) field(c);
    end_row();
  }

  const std::string& str() const { return out_; }

 private:
  void separate() {
    if (!fresh_) out_.push_back(',');
    fresh_ = false;
  }

  std::string out_;
  bool fresh_ = true;
};

// Writes to a temporary sibling and renames it over `path`, so readers never
// see a partial file.
inline void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error(ErrorKind::InvalidArgument, "cannot write " + tmp.string());
  }
  fs::rename(tmp, path, ec);
  if (ec) throw Error(ErrorKind::InvalidArgument, "cannot rename onto " + path.string() + ": " + ec.message());
}

}  // namespace flowsched::io
