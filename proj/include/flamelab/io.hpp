#pragma once
// File output helpers for the command-line driver: tables that render to
// CSV or JSON with round-trip exact floats, SHA-256 checksums, and a sink
// that remembers everything it wrote so the run manifest can reference it.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include "flamelab/errors.hpp"

namespace flamelab {

// 17 significant digits round-trip every double exactly.
inline std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline std::string sha256_hex(std::string_view bytes) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(),
                   nullptr) != 1)
        throw NumericalError("sha256: digest failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 0xf];
    }
    return out;
}

// A cell is either text or a typed number so a table can serialize to CSV
// (formatted) and to JSON (native numbers) from one source of truth.
using Cell = std::variant<double, long long, std::string>;
using Row = std::vector<Cell>;

inline std::string cell_text(const Cell& c) {
    if (std::holds_alternative<double>(c))
        return format_double(std::get<double>(c));
    if (std::holds_alternative<long long>(c))
        return std::to_string(std::get<long long>(c));
    return std::get<std::string>(c);
}

struct Table {
    std::vector<std::string> columns;
    std::vector<Row> rows;

    void push(Row row) {
        if (row.size() != columns.size())
            throw ConfigError("table: row width does not match the header");
        rows.push_back(std::move(row));
    }

    std::string render_csv() const {
        std::string out;
        for (size_t i = 0; i < columns.size(); ++i) {
            if (i) out += ',';
            out += columns[i];
        }
        out += '\n';
        for (const auto& row : rows) {
            for (size_t i = 0; i < row.size(); ++i) {
                if (i) out += ',';
                out += cell_text(row[i]);
            }
            out += '\n';
        }
        return out;
    }

    std::string render_json() const {
        nlohmann::ordered_json arr = nlohmann::ordered_json::array();
        for (const auto& row : rows) {
            nlohmann::ordered_json obj;
            for (size_t i = 0; i < row.size(); ++i) {
                const Cell& c = row[i];
                if (std::holds_alternative<double>(c))
                    obj[columns[i]] = std::get<double>(c);
                else if (std::holds_alternative<long long>(c))
                    obj[columns[i]] = std::get<long long>(c);
                else
                    obj[columns[i]] = std::get<std::string>(c);
            }
            arr.push_back(std::move(obj));
        }
        return arr.dump(2) + "\n";
    }
};

inline void write_file(const std::filesystem::path& path,
                       std::string_view content) {
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open for writing: " + path.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw NumericalError("write failed: " + path.string());
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open for reading: " + path.string());
    return {std::istreambuf_iterator<char>(in),
            std::istreambuf_iterator<char>()};
}

struct WrittenFile {
    std::string name;
    std::size_t bytes = 0;
    std::string sha256;
};

// Serializes writes into one output directory and records name, size and
// checksum of each file for the manifest.
class ArtifactSink {
  public:
    explicit ArtifactSink(std::filesystem::path dir) : dir_(std::move(dir)) {
        std::filesystem::create_directories(dir_);
    }

    const std::filesystem::path& dir() const { return dir_; }
    const std::vector<WrittenFile>& written() const { return written_; }

    void write(const std::string& name, const std::string& content) {
        write_file(dir_ / name, content);
        written_.push_back({name, content.size(), sha256_hex(content)});
    }

    // Tables follow the configured format; everything else is JSON.
    void write_table(const std::string& stem, const Table& table,
                     const std::string& format) {
        if (format == "json")
            write(stem + ".json", table.render_json());
        else
            write(stem + ".csv", table.render_csv());
    }

  private:
    std::filesystem::path dir_;
    std::vector<WrittenFile> written_;
};

} // namespace flamelab
