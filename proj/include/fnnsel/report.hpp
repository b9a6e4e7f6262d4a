#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace fnnsel {

/// Shortest round-trip representation ("%.17g"); "nan" and "inf" spelled out.
std::string format_number(double value);

/// Quotes a CSV cell when it contains a comma, quote or newline.
std::string csv_cell(std::string_view text);

/// Structured text document made of `[section]` headers followed by
/// `key = value` lines or CSV tables.
///
/// The `[timing]` section is always written last, so two reports of the same
/// run agree byte for byte up to the `[timing]` line.
class Report {
public:
    void section(std::string_view name);
    void field(std::string_view key, std::string_view value);
    void field(std::string_view key, const char* value) { field(key, std::string_view(value)); }
    void field(std::string_view key, const std::string& value) { field(key, std::string_view(value)); }
    void field(std::string_view key, double value);
    void field(std::string_view key, std::size_t value);
    void field(std::string_view key, bool value);
    void table(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows);

    void timing(std::string_view key, double seconds);

    std::string str() const;

private:
    std::string body_;
    std::string timing_;
};

/// Part of a report that must be reproducible: everything before `[timing]`.
std::string_view deterministic_part(std::string_view report);

}  // namespace fnnsel
