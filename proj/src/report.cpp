#include "fnnsel/report.hpp"

#include <cmath>
#include <cstdio>

namespace fnnsel {

std::string format_number(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

std::string csv_cell(std::string_view text) {
    if (text.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(text);
    std::string out = "\"";
    for (char c : text) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

void Report::section(std::string_view name) {
    if (!body_.empty()) body_ += '\n';
    body_ += '[';
    body_ += name;
    body_ += "]\n";
}

void Report::field(std::string_view key, std::string_view value) {
    body_ += key;
    body_ += " = ";
    body_ += value;
    body_ += '\n';
}

void Report::field(std::string_view key, double value) { field(key, format_number(value)); }

void Report::field(std::string_view key, std::size_t value) { field(key, std::to_string(value)); }

void Report::field(std::string_view key, bool value) { field(key, std::string_view(value ? "true" : "false")); }

void Report::table(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows) {
    auto line = [this](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) body_ += ',';
            body_ += csv_cell(cells[i]);
        }
        body_ += '\n';
    };
    line(header);
    for (const auto& r : rows) line(r);
}

void Report::timing(std::string_view key, double seconds) {
    timing_ += key;
    timing_ += " = ";
    timing_ += format_number(seconds);
    timing_ += '\n';
}

std::string Report::str() const {
    std::string out = body_;
    if (!timing_.empty()) {
        if (!out.empty()) out += '\n';
        out += "[timing]\n";
        out += timing_;
    }
    return out;
}

std::string_view deterministic_part(std::string_view report) {
    constexpr std::string_view marker = "[timing]\n";
    if (report.starts_with(marker)) return report.substr(0, 0);
    const auto pos = report.find("\n[timing]\n");
    return pos == std::string_view::npos ? report : report.substr(0, pos + 1);
}

}  // namespace fnnsel
