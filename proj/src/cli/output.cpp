// Copyright 2026 The spinrsp Authors
// SPDX-License-Identifier: Apache-2.0

#include "spinrsp/cli/output.hpp"

#include <openssl/evp.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>

#include <json.hpp>

namespace spinrsp::cli {

namespace {

// Round to 12 significant digits so JSON and CSV carry the same value.
double round12(double value) { return std::stod(format_real(value)); }

nlohmann::ordered_json cell_json(const Cell& cell) {
    if (const auto* i = std::get_if<std::int64_t>(&cell)) return *i;
    if (const auto* d = std::get_if<double>(&cell)) {
        if (!std::isfinite(*d)) return nullptr;
        return round12(*d);
    }
    return nullptr;
}

std::string cell_csv(const Cell& cell) {
    if (const auto* i = std::get_if<std::int64_t>(&cell)) return std::to_string(*i);
    if (const auto* d = std::get_if<double>(&cell)) return format_real(*d);
    return {};
}

}  // namespace

std::string format_real(double value) {
    if (value == 0.0) return "0";  // no "-0"
    char buffer[32];
    std::snprintf(buffer, sizeof buffer, "%.12g", value);
    return buffer;
}

std::string render_csv(const Table& table) {
    std::string out;
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
        if (c > 0) out += ',';
        out += table.columns[c];
    }
    out += '\n';
    for (const auto& row : table.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c > 0) out += ',';
            out += cell_csv(row[c]);
        }
        out += '\n';
    }
    return out;
}

std::string render_json(const Table& table, const std::string& subcommand) {
    nlohmann::ordered_json doc;
    if (table.single_record && table.rows.size() == 1) {
        for (std::size_t c = 0; c < table.columns.size(); ++c) {
            doc[table.columns[c]] = cell_json(table.rows[0][c]);
        }
    } else {
        doc["subcommand"] = subcommand;
        doc["columns"] = table.columns;
        auto rows = nlohmann::ordered_json::array();
        for (const auto& row : table.rows) {
            auto record = nlohmann::ordered_json::array();
            for (const auto& cell : row) record.push_back(cell_json(cell));
            rows.push_back(std::move(record));
        }
        doc["rows"] = std::move(rows);
    }
    return doc.dump(1) + "\n";
}

std::string sha256_hex(const std::string& bytes) {
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int length = 0;
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
        EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
        EVP_DigestFinal_ex(ctx.get(), digest, &length) != 1) {
        throw IoError("SHA-256 computation failed");
    }
    static constexpr char kHex[] = "0123456789abcdef";
    std::string hex;
    for (unsigned int i = 0; i < length; ++i) {
        hex += kHex[digest[i] >> 4];
        hex += kHex[digest[i] & 0xf];
    }
    return hex;
}

void write_file_atomic(const std::string& path, const std::string& contents) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    const fs::path temp = target.string() + ".partial";
    {
        std::ofstream out(temp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open " + temp.string() + " for writing");
        out << contents;
        out.flush();
        if (!out) {
            out.close();
            std::error_code ignored;
            fs::remove(temp, ignored);
            throw IoError("write to " + temp.string() + " failed");
        }
    }
    std::error_code ec;
    fs::rename(temp, target, ec);
    if (ec) {
        std::error_code ignored;
        fs::remove(temp, ignored);
        throw IoError("cannot move output into place at " + path + ": " + ec.message());
    }
}

FileChecksum write_output(const Table& table, OutputFormat format, const std::string& path,
                          const std::string& subcommand) {
    if (table.rows.empty()) throw IoError("refusing to write an empty table");
    const std::string text = format == OutputFormat::kCsv ? render_csv(table) : render_json(table, subcommand);
    if (path == "-") {
        std::cout << text;
        std::cout.flush();
        if (!std::cout) throw IoError("write to stdout failed");
    } else {
        write_file_atomic(path, text);
    }
    return {path, sha256_hex(text)};
}

}  // namespace spinrsp::cli
