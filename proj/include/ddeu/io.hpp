#pragma once

// Output files. Numbers are written with 17 significant digits and every
// file carries the hash of the materialized config.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "ddeu/config.hpp"
#include "ddeu/errors.hpp"

namespace ddeu {

inline std::string fmt17(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace detail {

inline void emit_string(std::string& out, const std::string& s) {
    out += json(s).dump();
}

inline void emit(std::string& out, const json& j, int indent, int depth) {
    const std::string pad(static_cast<std::size_t>(indent * (depth + 1)), ' ');
    const std::string close(static_cast<std::size_t>(indent * depth), ' ');
    const char* nl = indent > 0 ? "\n" : "";
    switch (j.type()) {
        case json::value_t::object: {
            if (j.empty()) {
                out += "{}";
                return;
            }
            out += "{";
            out += nl;
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) {
                    out += ",";
                    out += nl;
                }
                first = false;
                out += pad;
                emit_string(out, it.key());
                out += indent > 0 ? ": " : ":";
                emit(out, it.value(), indent, depth + 1);
            }
            out += nl;
            out += close + "}";
            return;
        }
        case json::value_t::array: {
            if (j.empty()) {
                out += "[]";
                return;
            }
            // flat numeric arrays stay on one line
            bool flat = true;
            for (const auto& e : j) flat = flat && e.is_primitive();
            out += "[";
            bool first = true;
            for (const auto& e : j) {
                if (!first) out += flat ? ", " : ",";
                if (!flat) {
                    out += nl;
                    out += pad;
                }
                first = false;
                emit(out, e, indent, depth + 1);
            }
            if (!flat) {
                out += nl;
                out += close;
            }
            out += "]";
            return;
        }
        case json::value_t::number_float: {
            const double v = j.get<double>();
            out += std::isfinite(v) ? fmt17(v) : "null";
            return;
        }
        default: out += j.dump(); return;
    }
}

}  // namespace detail

inline std::string dump17(const json& j, int indent = 2) {
    std::string out;
    detail::emit(out, j, indent, 0);
    return out;
}

/// --out beats DDE_UNSTABLE_OUT, which beats the config value.
inline std::string resolve_output_dir(const RunConfig& cfg, const std::optional<std::string>& flag) {
    if (flag && !flag->empty()) return *flag;
    if (const char* env = std::getenv("DDE_UNSTABLE_OUT"); env && *env) return env;
    return cfg.output_dir;
}

inline std::filesystem::path prepare_output(const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Error(ErrorCode::Io, "cannot create " + dir + ": " + ec.message());
    return std::filesystem::path(dir);
}

inline void write_text(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + p.string());
    out << text;
    if (!out) throw Error(ErrorCode::Io, "write failed for " + p.string());
}

/// JSON object with the config hash added as the first key.
inline void write_json(const std::filesystem::path& p, const json& body, const std::string& hash) {
    json j;
    j["config_hash"] = hash;
    for (auto it = body.begin(); it != body.end(); ++it) j[it.key()] = it.value();
    write_text(p, dump17(j) + "\n");
}

/// CSV: a `# config_hash=` comment line, the header, then rows.
class CsvWriter {
public:
    CsvWriter(const std::string& hash, const std::string& header) {
        text_ = "# config_hash=" + hash + "\n" + header + "\n";
    }

    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) text_ += ',';
            text_ += cells[i];
        }
        text_ += '\n';
    }

    void row(const std::vector<double>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) text_ += ',';
            text_ += fmt17(cells[i]);
        }
        text_ += '\n';
    }

    const std::string& text() const { return text_; }
    void save(const std::filesystem::path& p) const { write_text(p, text_); }

private:
    std::string text_;
};

}  // namespace ddeu
