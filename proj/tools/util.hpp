#pragma once

#include "srmetrics/srmetrics.h"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <memory>
#include <stdexcept>
#include <string>
#include <system_error>
#include <thread>
#include <vector>

namespace cli {

// exit_code 1: input/validation problem; 2: internal failure.
struct CliError : std::runtime_error {
    int exit_code;
    explicit CliError(std::string message, int code = 1)
        : std::runtime_error(std::move(message)), exit_code(code) {}
};

inline void check(srm_status status) {
    if (status == SRM_OK) return;
    throw CliError(std::string(srm_status_name(status)) + ": " + srm_last_error(),
                   status == SRM_ERR_INTERNAL ? 2 : 1);
}

/* ---- C handle ownership ------------------------------------------------ */

struct FrameDeleter {
    void operator()(srm_frame* f) const { srm_frame_destroy(f); }
};
struct ConfigDeleter {
    void operator()(srm_config* c) const { srm_config_destroy(c); }
};
struct ErqaDeleter {
    void operator()(srm_erqa_result* r) const { srm_erqa_result_destroy(r); }
};
struct BtDeleter {
    void operator()(srm_bt_result* r) const { srm_bt_result_destroy(r); }
};
struct KmedoidsDeleter {
    void operator()(srm_kmedoids_result* r) const { srm_kmedoids_result_destroy(r); }
};

using FramePtr = std::unique_ptr<srm_frame, FrameDeleter>;
using ConfigPtr = std::unique_ptr<srm_config, ConfigDeleter>;
using ErqaPtr = std::unique_ptr<srm_erqa_result, ErqaDeleter>;
using BtPtr = std::unique_ptr<srm_bt_result, BtDeleter>;
using KmedoidsPtr = std::unique_ptr<srm_kmedoids_result, KmedoidsDeleter>;

inline FramePtr load_frame(const std::string& path) {
    srm_frame* frame = nullptr;
    check(srm_frame_load(path.c_str(), &frame));
    return FramePtr(frame);
}

/* ---- text helpers ------------------------------------------------------- */

inline std::string trim(const std::string& text) {
    const auto begin = text.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = text.find_last_not_of(" \t\r\n");
    return text.substr(begin, end - begin + 1);
}

// Shortest representation that round-trips the exact double.
inline std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

inline double parse_double(const std::string& text, const std::string& context) {
    double v{};
    const std::string t = trim(text);
    const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
    if (res.ec != std::errc{} || res.ptr != t.data() + t.size())
        throw CliError(context + ": not a number: '" + text + "'");
    return v;
}

inline long long parse_int(const std::string& text, const std::string& context) {
    long long v{};
    const std::string t = trim(text);
    const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
    if (res.ec != std::errc{} || res.ptr != t.data() + t.size())
        throw CliError(context + ": not an integer: '" + text + "'");
    return v;
}

/* ---- CSV ----------------------------------------------------------------- */

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

// Comma-separated, first line is the header, fields trimmed, blank lines
// skipped. Every row must match the header width.
inline CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CliError("cannot open '" + path + "'");
    CsvTable table;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        std::vector<std::string> fields;
        std::size_t start = 0;
        for (;;) {
            const auto comma = line.find(',', start);
            fields.push_back(trim(line.substr(start, comma - start)));
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        if (table.header.empty()) {
            table.header = std::move(fields);
        } else {
            if (fields.size() != table.header.size())
                throw CliError(path + ":" + std::to_string(line_no) + ": expected " +
                               std::to_string(table.header.size()) + " fields, got " +
                               std::to_string(fields.size()));
            table.rows.push_back(std::move(fields));
        }
    }
    if (table.header.empty()) throw CliError(path + ": empty file");
    return table;
}

/* ---- config file ----------------------------------------------------------- */

// Flat `key = value` lines; blank lines and #-comments allowed.
inline void apply_config_file(srm_config* config, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CliError("cannot open config file '" + path + "'");
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string text = trim(line);
        if (text.empty() || text[0] == '#') continue;
        const auto eq = text.find('=');
        if (eq == std::string::npos)
            throw CliError(path + ":" + std::to_string(line_no) + ": expected 'key = value'");
        const std::string key = trim(text.substr(0, eq));
        const std::string value = trim(text.substr(eq + 1));
        if (srm_config_set(config, key.c_str(), value.c_str()) != SRM_OK)
            throw CliError(path + ":" + std::to_string(line_no) + ": " + srm_last_error());
    }
}

inline void apply_overrides(srm_config* config, const std::vector<std::string>& sets) {
    for (const std::string& item : sets) {
        const auto eq = item.find('=');
        if (eq == std::string::npos)
            throw CliError("--set expects key=value, got '" + item + "'");
        const std::string key = trim(item.substr(0, eq));
        const std::string value = trim(item.substr(eq + 1));
        if (srm_config_set(config, key.c_str(), value.c_str()) != SRM_OK)
            throw CliError("--set " + item + ": " + srm_last_error());
    }
}

inline std::string config_value(const srm_config* config, const std::string& key) {
    char buf[128];
    check(srm_config_get(config, key.c_str(), buf, sizeof buf));
    return buf;
}

inline long long config_int(const srm_config* config, const std::string& key) {
    return parse_int(config_value(config, key), key);
}

inline double config_num(const srm_config* config, const std::string& key) {
    return parse_double(config_value(config, key), key);
}

/* ---- worker pool -------------------------------------------------------------- */

// Runs fn(i) for i in [0, count) on up to `jobs` threads. Failures are
// collected per index and the smallest failing index is reported, so error
// output does not depend on scheduling.
template <typename Fn>
void run_indexed(std::size_t count, unsigned jobs, Fn&& fn) {
    std::vector<std::string> errors(count);
    std::vector<int> codes(count, 0);
    auto attempt = [&](std::size_t i) {
        try {
            fn(i);
        } catch (const CliError& e) {
            errors[i] = e.what();
            codes[i] = e.exit_code;
        } catch (const std::exception& e) {
            errors[i] = e.what();
            codes[i] = 2;
        }
    };

    if (jobs <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) attempt(i);
    } else {
        const unsigned workers =
            static_cast<unsigned>(std::min<std::size_t>(jobs, count));
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> threads;
        threads.reserve(workers);
        for (unsigned t = 0; t < workers; ++t)
            threads.emplace_back([&] {
                for (;;) {
                    const std::size_t i = next.fetch_add(1);
                    if (i >= count) return;
                    attempt(i);
                }
            });
        for (auto& t : threads) t.join();
    }

    for (std::size_t i = 0; i < count; ++i)
        if (codes[i] != 0)
            throw CliError("frame " + std::to_string(i) + ": " + errors[i], codes[i]);
}

/* ---- output cleanup --------------------------------------------------------------- */

// Tracks files created by the running command; on failure they are removed
// so a nonzero exit never leaves partial outputs behind.
class OutputGuard {
  public:
    void track(const std::filesystem::path& path) { paths_.push_back(path); }
    void commit() { paths_.clear(); }
    ~OutputGuard() {
        std::error_code ec;
        for (const auto& p : paths_) std::filesystem::remove(p, ec);
    }

  private:
    std::vector<std::filesystem::path> paths_;
};

/* ---- directory listing --------------------------------------------------------------- */

// PNG files in the directory, sorted by filename.
inline std::vector<std::filesystem::path> list_pngs(const std::string& dir) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(dir)) throw CliError("'" + dir + "' is not a directory");
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        std::string ext = entry.path().extension().string();
        for (char& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        if (ext == ".png") files.push_back(entry.path());
    }
    if (files.empty()) throw CliError("no PNG files in '" + dir + "'");
    std::sort(files.begin(), files.end(),
              [](const fs::path& a, const fs::path& b) { return a.filename() < b.filename(); });
    return files;
}

} // namespace cli
