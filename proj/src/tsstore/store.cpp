#include "energysaver/tsstore/store.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>

#include "energysaver/util/log.hpp"
#include "energysaver/util/time.hpp"

namespace energysaver::tsstore {

namespace fs = std::filesystem;

Store::Store(fs::path dir) : dir_(std::move(dir)) {}

Store::~Store() {
    std::lock_guard<std::mutex> lock(mu_);
    for (auto& [sensor, log] : logs_) {
        if (log.write_fd >= 0) ::close(log.write_fd);
        if (log.read_fd >= 0) ::close(log.read_fd);
    }
}

std::unique_ptr<Store> Store::open(const fs::path& data_dir) {
    std::error_code ec;
    fs::create_directories(data_dir, ec);
    if (ec) throw StoreError("cannot create data dir '" + data_dir.string() + "': " + ec.message());
    auto store = std::unique_ptr<Store>(new Store(data_dir));
    store->load_existing_logs();
    return store;
}

std::filesystem::path Store::log_path(std::string_view sensor) const {
    return dir_ / (std::string(sensor) + ".jsonl");
}

void Store::load_existing_logs() {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir_)) {
        if (entry.is_regular_file() && entry.path().extension() == ".jsonl")
            files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& file : files) {
        const std::string sensor = file.stem().string();
        if (!core::SensorId::valid(sensor)) {
            log::warnf("store: skipping '%s': stem is not a sensor id", file.string().c_str());
            continue;
        }
        load_log(file, sensor);
    }
}

void Store::load_log(const fs::path& file, const std::string& sensor) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw StoreError("cannot read '" + file.string() + "'");
    std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    in.close();

    Log log;
    std::uint64_t offset = 0;
    std::int64_t prev_ts = -1;
    std::size_t line_no = 0;
    while (offset < content.size()) {
        const std::size_t nl = content.find('\n', offset);
        if (nl == std::string::npos) {
            // Torn trailing line from an interrupted append; drop it.
            log::warnf("store: truncating partial trailing line in '%s'", file.string().c_str());
            if (::truncate(file.c_str(), static_cast<off_t>(offset)) != 0)
                throw StoreError("cannot truncate '" + file.string() + "': " + std::strerror(errno));
            content.resize(offset);
            break;
        }
        ++line_no;
        const std::string_view line(content.data() + offset, nl - offset);
        Document doc = Document::from_json_line(line);  // SchemaError propagates
        if (doc.sensor_id() != sensor)
            throw StoreError("log '" + file.string() + "' line " + std::to_string(line_no) +
                             " belongs to sensor '" + doc.sensor_id() + "'");
        if (doc.ts_ms() <= prev_ts)
            throw StoreError("log '" + file.string() + "' line " + std::to_string(line_no) +
                             " breaks ts_ms monotonicity");
        prev_ts = doc.ts_ms();
        log.index.push_back(Entry{doc.ts_ms(), offset, static_cast<std::uint32_t>(line.size())});
        offset = nl + 1;
    }
    log.file_size = offset;
    logs_.emplace(sensor, std::move(log));
}

Store::Log& Store::log_for_append(const std::string& sensor) {
    auto it = logs_.find(sensor);
    if (it == logs_.end()) it = logs_.emplace(sensor, Log{}).first;
    Log& log = it->second;
    if (log.write_fd < 0) {
        const fs::path path = log_path(sensor);
        log.write_fd = ::open(path.c_str(), O_WRONLY | O_CREAT | O_APPEND, 0644);
        if (log.write_fd < 0)
            throw AppendError(AppendError::Kind::Io,
                              "cannot open '" + path.string() + "': " + std::strerror(errno));
    }
    return log;
}

void Store::append(const Document& doc) {
    std::lock_guard<std::mutex> lock(mu_);
    Log& log = log_for_append(doc.sensor_id());
    if (!log.index.empty() && doc.ts_ms() <= log.index.back().ts_ms)
        throw AppendError(AppendError::Kind::NonMonotonic,
                          "append for '" + doc.sensor_id() + "' at ts_ms " +
                              std::to_string(doc.ts_ms()) + " is not after stored ts_ms " +
                              std::to_string(log.index.back().ts_ms));

    std::string line = doc.canonical();
    line.push_back('\n');
    const char* p = line.data();
    std::size_t left = line.size();
    while (left > 0) {
        const ssize_t n = ::write(log.write_fd, p, left);
        if (n < 0) {
            if (errno == EINTR) continue;
            throw AppendError(AppendError::Kind::Io,
                              std::string("append write failed: ") + std::strerror(errno));
        }
        p += n;
        left -= static_cast<std::size_t>(n);
    }
    log.index.push_back(Entry{doc.ts_ms(), log.file_size,
                              static_cast<std::uint32_t>(line.size() - 1)});
    log.file_size += line.size();
}

std::vector<std::pair<Store::Entry, int>> Store::snapshot_range(std::string_view sensor,
                                                                std::int64_t from_ms,
                                                                std::int64_t to_ms) const {
    if (from_ms > to_ms) throw StoreError("query range has from_ms > to_ms");
    std::vector<std::pair<Entry, int>> out;
    std::lock_guard<std::mutex> lock(mu_);
    const auto it = logs_.find(sensor);
    if (it == logs_.end()) return out;
    const Log& log = it->second;

    // The read fd is opened lazily; the file only ever grows.
    if (log.read_fd < 0) {
        const fs::path path = log_path(sensor);
        const int fd = ::open(path.c_str(), O_RDONLY);
        if (fd < 0) {
            if (log.index.empty()) return out;
            throw StoreError("cannot open '" + path.string() + "': " + std::strerror(errno));
        }
        const_cast<Log&>(log).read_fd = fd;
    }

    const auto cmp = [](const Entry& e, std::int64_t ts) { return e.ts_ms < ts; };
    auto lo = std::lower_bound(log.index.begin(), log.index.end(), from_ms, cmp);
    auto hi = std::lower_bound(log.index.begin(), log.index.end(), to_ms, cmp);
    out.reserve(static_cast<std::size_t>(hi - lo));
    for (auto e = lo; e != hi; ++e) out.emplace_back(*e, log.read_fd);
    return out;
}

std::string Store::read_entry(const Entry& entry, int read_fd) const {
    std::string line(entry.size, '\0');
    std::size_t done = 0;
    while (done < entry.size) {
        const ssize_t n = ::pread(read_fd, line.data() + done, entry.size - done,
                                  static_cast<off_t>(entry.offset + done));
        if (n < 0) {
            if (errno == EINTR) continue;
            throw StoreError(std::string("pread failed: ") + std::strerror(errno));
        }
        if (n == 0) throw StoreError("log shorter than index expects");
        done += static_cast<std::size_t>(n);
    }
    return line;
}

std::vector<Document> Store::query_range(std::string_view sensor, std::int64_t from_ms,
                                         std::int64_t to_ms) const {
    const auto entries = snapshot_range(sensor, from_ms, to_ms);
    std::vector<Document> docs;
    docs.reserve(entries.size());
    for (const auto& [entry, fd] : entries)
        docs.push_back(Document::from_json_line(read_entry(entry, fd)));
    return docs;
}

std::size_t Store::count(std::string_view sensor) const {
    std::lock_guard<std::mutex> lock(mu_);
    const auto it = logs_.find(sensor);
    return it == logs_.end() ? 0 : it->second.index.size();
}

std::optional<Document> Store::latest(std::string_view sensor) const {
    std::optional<std::int64_t> ts;
    {
        std::lock_guard<std::mutex> lock(mu_);
        const auto it = logs_.find(sensor);
        if (it == logs_.end() || it->second.index.empty()) return std::nullopt;
        ts = it->second.index.back().ts_ms;
    }
    auto docs = query_range(sensor, *ts, *ts + 1);
    if (docs.empty()) return std::nullopt;
    return std::move(docs.front());
}

std::optional<std::int64_t> Store::last_ts(std::string_view sensor) const {
    std::lock_guard<std::mutex> lock(mu_);
    const auto it = logs_.find(sensor);
    if (it == logs_.end() || it->second.index.empty()) return std::nullopt;
    return it->second.index.back().ts_ms;
}

std::vector<std::string> Store::sensors() const {
    std::lock_guard<std::mutex> lock(mu_);
    std::vector<std::string> out;
    out.reserve(logs_.size());
    for (const auto& [sensor, log] : logs_)
        if (!log.index.empty()) out.push_back(sensor);
    return out;
}

std::string csv_format_double(double value) {
    char buf[64];
    if (!std::isfinite(value)) {
        std::snprintf(buf, sizeof(buf), "%g", value);
        return buf;
    }
    const double a = std::abs(value);
    if (a == 0.0) return "0.0";
    if (a < 1e-3 || a >= 1e7) {
        std::snprintf(buf, sizeof(buf), "%.6g", value);
        return buf;
    }
    // Fixed notation with up to six fraction digits, trailing zeros trimmed
    // but one decimal kept so floats stay visibly floats.
    std::snprintf(buf, sizeof(buf), "%.6f", value);
    std::string s(buf);
    while (s.size() > 1 && s.back() == '0' && s[s.size() - 2] != '.') s.pop_back();
    return s;
}

namespace {

std::string csv_cell(const nlohmann::json& value) {
    if (value.is_number_float()) return csv_format_double(value.get<double>());
    if (value.is_number_integer() || value.is_number_unsigned())
        return std::to_string(value.get<std::int64_t>());
    if (value.is_boolean()) return value.get<bool>() ? "true" : "false";
    if (value.is_string()) return value.get<std::string>();
    return "";
}

}  // namespace

std::size_t Store::export_csv(std::string_view sensor, std::int64_t from_ms, std::int64_t to_ms,
                              std::ostream& out) const {
    static constexpr std::string_view kColumns[] = {
        core::kFieldVoltage, core::kFieldCurrent, core::kFieldPower,
        core::kFieldIntervalS, core::kFieldEnergyWh,
    };
    out << kCsvHeader << '\n';
    std::size_t rows = 0;
    const auto entries = snapshot_range(sensor, from_ms, to_ms);
    for (const auto& [entry, fd] : entries) {
        const Document doc = Document::from_json_line(read_entry(entry, fd));
        out << util::format_iso8601_ms(doc.ts_ms()) << ',' << doc.sensor_id();
        for (const auto& column : kColumns) {
            out << ',';
            const auto it = doc.fields().find(column);
            if (it != doc.fields().end()) out << csv_cell(*it);
        }
        out << '\n';
        if (!out) throw StoreError("csv export: sink write failed");
        ++rows;
    }
    return rows;
}

}  // namespace energysaver::tsstore
