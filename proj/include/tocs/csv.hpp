#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace tocs {

// Fixed formatting so identical runs give identical bytes.
std::string format_double(double v);
std::string format_bool(bool b);

std::uint64_t fnv1a(std::string_view text);
std::string hex64(std::uint64_t v);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add(std::vector<std::string> row) { rows.push_back(std::move(row)); }
};

// Comment line "# ..." first, then the header row, then the data.
void write_csv(std::ostream& os, const std::string& comment, const CsvTable& table);

}  // namespace tocs
