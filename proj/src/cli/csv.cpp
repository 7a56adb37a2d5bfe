#include "pdem/cli/csv.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace pdem::cli {

std::string format_double(double value)
{
    if (value == 0.0) {
        return "0"; // also folds -0
    }
    std::array<char, 32> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    return std::string(buf.data(), res.ptr);
}

std::string format_fixed(double value, int decimals)
{
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value,
                                   std::chars_format::fixed, decimals);
    std::string out(buf.data(), res.ptr);
    if (out.front() == '-' && out.find_first_not_of("-0.") == std::string::npos) {
        out.erase(0, 1);
    }
    return out;
}

CsvWriter::CsvWriter(std::vector<std::string> header) : columns_(header.size())
{
    for (const auto& h : header) {
        cell(h);
    }
    end_row();
    rows_ = 0;
}

CsvWriter& CsvWriter::cell(std::string_view text)
{
    if (pending_ > 0) {
        text_ += ',';
    }
    text_ += text;
    ++pending_;
    return *this;
}

CsvWriter& CsvWriter::cell(double value)
{
    return cell(format_double(value));
}

CsvWriter& CsvWriter::cell(int value)
{
    return cell(std::to_string(value));
}

void CsvWriter::end_row()
{
    if (pending_ != columns_) {
        throw std::logic_error("CSV row has the wrong number of cells");
    }
    text_ += '\n';
    pending_ = 0;
    ++rows_;
}

void write_file(const std::string& path, const std::string& contents)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::runtime_error("cannot open '" + path + "' for writing");
    }
    out << contents;
    if (!out.flush()) {
        throw std::runtime_error("failed writing '" + path + "'");
    }
}

} // namespace pdem::cli
