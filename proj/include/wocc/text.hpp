#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wocc/error.hpp"
#include "wocc/time.hpp"

namespace wocc {

/// Splits one delimiter-separated row. Fields are whitespace-trimmed; quoting
/// is not supported since every field in these formats is an opaque token.
inline std::vector<std::string> split_row(std::string_view line, char delim)
{
    std::vector<std::string> fields;
    std::size_t pos = 0;
    while (true) {
        const auto next = line.find(delim, pos);
        const auto field = line.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos);
        fields.emplace_back(detail::trim(field));
        if (next == std::string_view::npos) break;
        pos = next + 1;
    }
    return fields;
}

/// "Association time" -> "association_time".
inline std::string normalize_column(std::string_view name)
{
    std::string out;
    for (char c : detail::trim(name)) {
        if (c == ' ' || c == '-' || c == '.') out.push_back('_');
        else out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    return out;
}

inline std::string join(std::span<const std::string> items, std::string_view sep = ",")
{
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out += sep;
        out += items[i];
    }
    return out;
}

/// Line-oriented reader that skips blank lines and tracks 1-based line numbers.
class RowReader {
public:
    RowReader(std::istream& in, char delim) : in_(in), delim_(delim) {}

    bool next(std::vector<std::string>& row)
    {
        std::string line;
        while (std::getline(in_, line)) {
            ++line_;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (detail::trim(line).empty()) continue;
            row = split_row(line, delim_);
            return true;
        }
        return false;
    }

    std::size_t line() const { return line_; }

private:
    std::istream& in_;
    char delim_;
    std::size_t line_ = 0;
};

/// Reads the header row and checks that it starts with `expected` (after
/// normalization). Extra trailing columns are allowed.
inline std::vector<std::string> read_header(RowReader& reader, std::span<const std::string> expected, std::string_view what)
{
    std::vector<std::string> row;
    if (!reader.next(row)) throw validation_error(std::string(what) + ": missing header row");
    std::vector<std::string> found;
    for (const auto& f : row) found.push_back(normalize_column(f));
    bool ok = found.size() >= expected.size();
    for (std::size_t i = 0; ok && i < expected.size(); ++i) ok = found[i] == expected[i];
    if (!ok)
        throw validation_error(std::string(what) + ": unexpected columns; expected [" + join(expected) + "], found [" +
                               join(found) + "]");
    return found;
}

inline std::optional<double> parse_double(std::string_view s)
{
    s = detail::trim(s);
    if (s.empty()) return std::nullopt;
    if (s.front() == '+') s.remove_prefix(1);
    double v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

inline std::optional<std::int64_t> parse_int(std::string_view s)
{
    s = detail::trim(s);
    if (s.empty()) return std::nullopt;
    if (s.front() == '+') s.remove_prefix(1);
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

/// Shortest round-trip decimal representation, locale independent.
inline std::string format_double(double v)
{
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

inline std::string format_fixed(double v, int precision)
{
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, precision);
    return std::string(buf, ptr);
}

inline void write_row(std::ostream& out, std::span<const std::string> fields, char delim = ',')
{
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out << delim;
        out << fields[i];
    }
    out << '\n';
}

inline void write_row(std::ostream& out, std::initializer_list<std::string> fields, char delim = ',')
{
    write_row(out, std::span<const std::string>(fields.begin(), fields.size()), delim);
}

} // namespace wocc
