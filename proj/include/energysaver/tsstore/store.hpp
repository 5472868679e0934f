#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "energysaver/tsstore/document.hpp"

namespace energysaver::tsstore {

class StoreError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class AppendError : public std::runtime_error {
public:
    enum class Kind { NonMonotonic, Io };

    AppendError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

/// Append-only document store. One JSON-lines log per sensor under the data
/// directory plus an in-memory (ts_ms, offset) index rebuilt from the logs on
/// open. Appends are serialized; readers see a consistent committed prefix.
class Store {
public:
    static std::unique_ptr<Store> open(const std::filesystem::path& data_dir);
    ~Store();
    Store(const Store&) = delete;
    Store& operator=(const Store&) = delete;

    /// Durably appends one document. ts_ms must be strictly greater than the
    /// last stored ts_ms for that sensor; otherwise AppendError{NonMonotonic}.
    void append(const Document& doc);

    /// All documents with from_ms <= ts_ms < to_ms, ascending. Unknown sensor
    /// yields an empty list.
    std::vector<Document> query_range(std::string_view sensor, std::int64_t from_ms,
                                      std::int64_t to_ms) const;

    std::size_t count(std::string_view sensor) const;
    std::optional<Document> latest(std::string_view sensor) const;
    std::optional<std::int64_t> last_ts(std::string_view sensor) const;
    std::vector<std::string> sensors() const;

    /// Streams CSV (header + one row per document, ascending time) and
    /// returns the number of rows written, header excluded.
    std::size_t export_csv(std::string_view sensor, std::int64_t from_ms, std::int64_t to_ms,
                           std::ostream& out) const;

    const std::filesystem::path& dir() const { return dir_; }

    static constexpr std::string_view kCsvHeader =
        "timestamp,sensor_id,voltage,current,power,interval_s,energy_wh";

private:
    explicit Store(std::filesystem::path dir);

    struct Entry {
        std::int64_t ts_ms;
        std::uint64_t offset;  // line start
        std::uint32_t size;    // line length, newline excluded
    };

    struct Log {
        int write_fd = -1;
        int read_fd = -1;
        std::vector<Entry> index;
        std::uint64_t file_size = 0;
    };

    void load_existing_logs();
    void load_log(const std::filesystem::path& file, const std::string& sensor);
    Log& log_for_append(const std::string& sensor);
    std::vector<std::pair<Entry, int>> snapshot_range(std::string_view sensor, std::int64_t from_ms,
                                                      std::int64_t to_ms) const;
    std::string read_entry(const Entry& entry, int read_fd) const;
    std::filesystem::path log_path(std::string_view sensor) const;

    mutable std::mutex mu_;
    std::filesystem::path dir_;
    std::map<std::string, Log, std::less<>> logs_;
};

/// CSV cell formatting for floating-point values: up to six significant
/// digits, fixed notation (with a trailing .0 for integral values) inside
/// [1e-3, 1e7), exponent notation outside. Exposed for the export tests.
std::string csv_format_double(double value);

}  // namespace energysaver::tsstore
