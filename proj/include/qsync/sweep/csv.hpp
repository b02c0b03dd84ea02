#pragma once

#include <cstdio>
#include <string>
#include <utility>
#include <vector>

namespace qsync::sweep {

/// 12 significant digits, '.' separator; "nan", "inf", "-inf" for non-finite.
std::string format_number(double v);

struct Column {
    std::string name;
    std::string description;  ///< meaning and unit, echoed in the header
};

/// CSV file with a "# key = value" header, one flushed line per row.
///
/// With resume set, an existing file whose header matches byte for byte is
/// kept: complete rows are counted (rounded down to whole groups of
/// `row_group` rows), anything after them is cut, and writing continues at
/// the end. A header mismatch throws std::runtime_error.
class CsvSink {
public:
    CsvSink(const std::string& path, const std::vector<std::pair<std::string, std::string>>& header,
            const std::vector<Column>& columns, bool resume, std::size_t row_group = 1);
    ~CsvSink();
    CsvSink(const CsvSink&) = delete;
    CsvSink& operator=(const CsvSink&) = delete;

    /// Data rows already present when resuming.
    std::size_t rows_done() const { return rows_done_; }
    std::size_t columns() const { return width_; }

    void write(const std::vector<std::string>& fields);

    /// Header text exactly as written (comment lines plus the column line).
    static std::string header_text(const std::vector<std::pair<std::string, std::string>>& header,
                                   const std::vector<Column>& columns);

private:
    std::FILE* file_ = nullptr;
    bool owned_ = false;
    std::size_t width_ = 0;
    std::size_t rows_done_ = 0;
};

}  // namespace qsync::sweep
