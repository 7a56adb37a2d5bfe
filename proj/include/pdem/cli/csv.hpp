#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace pdem::cli {

// Shortest representation that parses back to the same double.
std::string format_double(double value);

// Fixed number of decimals, for comparisons at printed precision.
std::string format_fixed(double value, int decimals);

class CsvWriter {
public:
    explicit CsvWriter(std::vector<std::string> header);

    CsvWriter& cell(std::string_view text);
    CsvWriter& cell(double value);
    CsvWriter& cell(int value);
    void end_row();

    std::size_t rows() const { return rows_; }
    const std::string& str() const { return text_; }

private:
    std::size_t columns_;
    std::size_t pending_ = 0;
    std::size_t rows_ = 0;
    std::string text_;
};

// Writes the whole file at once; throws std::runtime_error on I/O failure.
void write_file(const std::string& path, const std::string& contents);

} // namespace pdem::cli
