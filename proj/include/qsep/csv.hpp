#pragma once
// qsep/csv.hpp — deterministic CSV output. Doubles are rendered with
// std::to_chars (shortest round-trip form), so files are byte-identical
// across runs and platforms for identical data; no locale, no padding.

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <system_error>
#include <vector>

#include "qsep/errors.hpp"

namespace qsep {

/// Shortest round-trip decimal form of a double (to_chars general format).
inline std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

class csv_writer {
 public:
  csv_writer(const std::filesystem::path& path, const std::vector<std::string>& header)
      : out_(path, std::ios::binary | std::ios::trunc) {
    if (!out_) throw config_error("csv_writer: cannot open " + path.string());
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (i) out_ << ',';
      out_ << header[i];
    }
    out_ << '\n';
    columns_ = header.size();
  }

  template <typename... Args>
  void row(const Args&... args) {
    if (sizeof...(args) != columns_)
      throw config_error("csv_writer: column count mismatch");
    std::size_t i = 0;
    ((write_field(args, i++)), ...);
    out_ << '\n';
  }

  void flush() { out_.flush(); }

 private:
  void write_field(double v, std::size_t i) {
    if (i) out_ << ',';
    out_ << format_double(v);
  }
  void write_field(const std::string& v, std::size_t i) {
    if (i) out_ << ',';
    out_ << v;
  }
  void write_field(const char* v, std::size_t i) {
    if (i) out_ << ',';
    out_ << v;
  }
  template <typename T>
  void write_field(T v, std::size_t i)
    requires std::is_integral_v<T>
  {
    if (i) out_ << ',';
    out_ << std::to_string(v);
  }

  std::ofstream out_;
  std::size_t columns_ = 0;
};

}  // namespace qsep
