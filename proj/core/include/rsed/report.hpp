#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "rsed/types.hpp"

namespace rsed {

/// A rectangular table rendered both as CSV and as aligned text.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

/// RFC 4180 quoting for cells containing a comma, quote or newline.
void write_csv(std::ostream& os, const Table& t);
/// Left-aligned columns separated by two spaces; widths count UTF-8 code points.
void write_text(std::ostream& os, const Table& t);
/// Writes `<stem>.csv` and `<stem>.txt`.
void write_table_files(const Table& t, const std::filesystem::path& stem);

std::string format_fixed(double v, int decimals);
/// "NA" for an unset ratio.
std::string format_ratio(const Ratio& r, int decimals);

}  // namespace rsed
