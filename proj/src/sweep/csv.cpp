#include "qsync/sweep/csv.hpp"

#include <fmt/format.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace qsync::sweep {

std::string format_number(double v)
{
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (v == 0.0) return "0";  // no "-0"
    return fmt::format("{:.12g}", v);
}

std::string CsvSink::header_text(const std::vector<std::pair<std::string, std::string>>& header,
                                 const std::vector<Column>& columns)
{
    std::string out;
    for (const auto& [k, v] : header) out += "# " + k + " = " + v + "\n";
    for (const auto& c : columns) out += "# column." + c.name + " = " + c.description + "\n";
    for (std::size_t i = 0; i < columns.size(); ++i) out += (i ? "," : "") + columns[i].name;
    out += "\n";
    return out;
}

CsvSink::CsvSink(const std::string& path, const std::vector<std::pair<std::string, std::string>>& header,
                 const std::vector<Column>& columns, bool resume, std::size_t row_group)
    : width_(columns.size())
{
    const std::string head = header_text(header, columns);
    if (path == "-" || path.empty()) {
        if (resume) throw std::runtime_error("--resume needs an output file");
        file_ = stdout;
        std::fputs(head.c_str(), file_);
        std::fflush(file_);
        return;
    }

    namespace fs = std::filesystem;
    if (resume && fs::exists(path)) {
        std::ifstream in(path, std::ios::binary);
        std::stringstream ss;
        ss << in.rdbuf();
        const std::string existing = ss.str();
        if (existing.compare(0, head.size(), head) != 0)
            throw std::runtime_error("cannot resume '" + path + "': its header does not match this configuration");
        std::size_t pos = head.size();
        std::size_t complete = 0;
        std::size_t keep = pos;
        while (true) {
            const std::size_t nl = existing.find('\n', pos);
            if (nl == std::string::npos) break;
            ++complete;
            pos = nl + 1;
            if (complete % row_group == 0) keep = pos;
        }
        rows_done_ = (complete / row_group) * row_group;
        in.close();
        fs::resize_file(path, keep);
        file_ = std::fopen(path.c_str(), "ab");
        if (!file_) throw std::runtime_error("cannot open '" + path + "' for appending");
        owned_ = true;
        return;
    }

    file_ = std::fopen(path.c_str(), "wb");
    if (!file_) throw std::runtime_error("cannot open '" + path + "' for writing");
    owned_ = true;
    std::fputs(head.c_str(), file_);
    std::fflush(file_);
}

CsvSink::~CsvSink()
{
    if (owned_ && file_) std::fclose(file_);
}

void CsvSink::write(const std::vector<std::string>& fields)
{
    if (fields.size() != width_)
        throw std::logic_error("row has " + std::to_string(fields.size()) + " fields, expected " +
                               std::to_string(width_));
    std::string line;
    for (std::size_t i = 0; i < fields.size(); ++i) line += (i ? "," : "") + fields[i];
    line += '\n';
    if (std::fputs(line.c_str(), file_) < 0 || std::fflush(file_) != 0)
        throw std::runtime_error("write failed");
}

}  // namespace qsync::sweep
