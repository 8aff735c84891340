#pragma once

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace rearr {

// Minimal RFC 4180 writer: comma separated, CRLF-free (LF line ends are
// accepted by the RFC's readers and diff better), '.' decimal point via
// printf formatting, quoting only when a field needs it.
class CsvWriter {
public:
    explicit CsvWriter(const std::string& path) : out_(path, std::ios::binary) {
        if (!out_) throw std::runtime_error("cannot open CSV output: " + path);
    }

    void row(const std::vector<std::string>& fields) {
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i) out_ << ',';
            out_ << escape(fields[i]);
        }
        out_ << '\n';
    }

    static std::string num(double v) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return buf;
    }
    static std::string num(std::uint64_t v) { return std::to_string(v); }
    static std::string num(std::uint32_t v) { return std::to_string(v); }
    static std::string num(int v) { return std::to_string(v); }

private:
    static std::string escape(const std::string& f) {
        if (f.find_first_of(",\"\n") == std::string::npos) return f;
        std::string q = "\"";
        for (char c : f) {
            if (c == '"') q += "\"\"";
            else q += c;
        }
        q += '"';
        return q;
    }

    std::ofstream out_;
};

} // namespace rearr
