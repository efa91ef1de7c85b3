#ifndef FHILL_RECORDS_HPP
#define FHILL_RECORDS_HPP

#include <fstream>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "error.hpp"

namespace fhill {

inline constexpr int kRecordsFormatVersion = 1;

using MetaList = std::vector<std::pair<std::string, std::string>>;

/// Comma-separated records: `# key=value` header lines (format_version first),
/// then a column-name row, then one row per record.
inline void write_records(std::ostream& out, const MetaList& meta,
                          const std::vector<std::string>& columns,
                          const std::vector<std::vector<std::string>>& rows) {
  out << "# format_version=" << kRecordsFormatVersion << '\n';
  for (const auto& [k, v] : meta) out << "# " << k << '=' << v << '\n';
  auto emit = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out << ',';
      out << cells[i];
    }
    out << '\n';
  };
  emit(columns);
  for (const auto& r : rows) emit(r);
}

inline void write_records_file(const std::string& path, const MetaList& meta,
                               const std::vector<std::string>& columns,
                               const std::vector<std::vector<std::string>>& rows) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write records file '" + path + "'");
  write_records(out, meta, columns, rows);
  if (!out) throw IoError("failed writing records file '" + path + "'");
}

}  // namespace fhill

#endif  // FHILL_RECORDS_HPP
