#include "rsed/report.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <ostream>

namespace rsed {
namespace {

std::size_t display_width(const std::string& s) {
  return static_cast<std::size_t>(
      std::count_if(s.begin(), s.end(), [](char c) { return (static_cast<unsigned char>(c) & 0xC0) != 0x80; }));
}

void csv_cell(std::ostream& os, const std::string& cell) {
  if (cell.find_first_of(",\"\n\r") == std::string::npos) {
    os << cell;
    return;
  }
  os << '"';
  for (char c : cell) {
    if (c == '"') os << '"';
    os << c;
  }
  os << '"';
}

void csv_row(std::ostream& os, const std::vector<std::string>& row) {
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i) os << ',';
    csv_cell(os, row[i]);
  }
  os << '\n';
}

}  // namespace

void write_csv(std::ostream& os, const Table& t) {
  csv_row(os, t.header);
  for (const auto& r : t.rows) csv_row(os, r);
}

void write_text(std::ostream& os, const Table& t) {
  std::vector<std::size_t> width(t.header.size(), 0);
  const auto widen = [&width](const std::vector<std::string>& row) {
    if (row.size() > width.size()) width.resize(row.size(), 0);
    for (std::size_t i = 0; i < row.size(); ++i) width[i] = std::max(width[i], display_width(row[i]));
  };
  widen(t.header);
  for (const auto& r : t.rows) widen(r);
  const auto emit = [&](const std::vector<std::string>& row) {
    std::string line;
    for (std::size_t i = 0; i < row.size(); ++i) {
      line += row[i];
      if (i + 1 < row.size()) line.append(width[i] - display_width(row[i]) + 2, ' ');
    }
    os << line << '\n';
  };
  emit(t.header);
  std::size_t total = 0;
  for (std::size_t i = 0; i < width.size(); ++i) total += width[i] + (i + 1 < width.size() ? 2 : 0);
  os << std::string(total, '-') << '\n';
  for (const auto& r : t.rows) emit(r);
}

void write_table_files(const Table& t, const std::filesystem::path& stem) {
  auto csv_path = stem;
  csv_path += ".csv";
  auto txt_path = stem;
  txt_path += ".txt";
  std::ofstream csv(csv_path, std::ios::binary);
  std::ofstream txt(txt_path, std::ios::binary);
  if (!csv || !txt) throw DataError("cannot write table " + stem.string());
  write_csv(csv, t);
  write_text(txt, t);
}

std::string format_fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  // Avoid "-0.000" so equal values print identically.
  std::string s = buf;
  if (s.front() == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
  return s;
}

std::string format_ratio(const Ratio& r, int decimals) {
  return r ? format_fixed(*r, decimals) : std::string("NA");
}

}  // namespace rsed
