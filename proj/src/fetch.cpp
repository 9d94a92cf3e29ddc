#include "rboost/fetch.hpp"

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>
#include <openssl/evp.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "rboost/csv.hpp"
#include "rboost/error.hpp"
#include "rboost/model_file.hpp"

namespace rboost {

namespace fs = std::filesystem;

namespace {

std::vector<std::string_view> split_on(std::string_view s, std::string_view delims) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && delims.find(s[i]) != std::string_view::npos) ++i;
        const std::size_t start = i;
        while (i < s.size() && delims.find(s[i]) == std::string_view::npos) ++i;
        if (i > start) out.push_back(s.substr(start, i - start));
    }
    return out;
}

// Keeps empty fields, unlike split_on.
std::vector<std::string_view> fields_of(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t end = line.find(sep, start);
        out.push_back(line.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start));
        if (end == std::string_view::npos) break;
        start = end + 1;
    }
    return out;
}

std::vector<std::string_view> lines_of(std::string_view text) {
    std::vector<std::string_view> out;
    for (auto line : split_on(text, "\n")) {
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        bool blank = true;
        for (char ch : line) blank = blank && (ch == ' ' || ch == '\t');
        if (!blank) out.push_back(line);
    }
    return out;
}

double number(std::string_view s, std::size_t line) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '"')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '"')) s.remove_suffix(1);
    double v = 0.0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size() || !std::isfinite(v)) {
        throw FormatError("raw line " + std::to_string(line) + ": not a number: '" + std::string(s) + "'");
    }
    return v;
}

struct Rows {
    std::vector<double> x;
    std::vector<double> y;
    std::size_t d = 0;

    void add(const std::vector<double>& features, double target, std::size_t line) {
        if (y.empty()) d = features.size();
        if (features.size() != d) {
            throw FormatError("raw line " + std::to_string(line) + ": expected " + std::to_string(d) +
                              " features, found " + std::to_string(features.size()));
        }
        x.insert(x.end(), features.begin(), features.end());
        y.push_back(target);
    }
    Dataset finish(Task task) {
        if (y.empty()) throw FormatError("raw file holds no rows");
        const std::size_t n = y.size();
        return Dataset(Matrix(n, d, std::move(x)), std::move(y), task);
    }
};

void expect_fields(std::size_t got, std::size_t want, std::size_t line) {
    if (got != want) {
        throw FormatError("raw line " + std::to_string(line) + ": expected " + std::to_string(want) +
                          " fields, found " + std::to_string(got));
    }
}

// 14 whitespace-separated numbers per record, possibly wrapped across lines.
Dataset convert_housing(std::string_view raw, Task task) {
    std::vector<double> all;
    std::size_t line_no = 0;
    for (auto line : lines_of(raw)) {
        ++line_no;
        for (auto tok : split_on(line, " \t")) all.push_back(number(tok, line_no));
    }
    if (all.size() % 14 != 0) throw FormatError("housing: value count is not a multiple of 14");
    Rows rows;
    for (std::size_t i = 0; i < all.size(); i += 14) {
        rows.add(std::vector<double>(all.begin() + static_cast<std::ptrdiff_t>(i),
                                     all.begin() + static_cast<std::ptrdiff_t>(i + 13)),
                 all[i + 13], i / 14 + 1);
    }
    return rows.finish(task);
}

// 34 numeric attributes, then 'g' (good, +1) or 'b' (bad, -1).
Dataset convert_ionosphere(std::string_view raw, Task task) {
    Rows rows;
    std::size_t line_no = 0;
    for (auto line : lines_of(raw)) {
        ++line_no;
        const auto f = fields_of(line, ',');
        expect_fields(f.size(), 35, line_no);
        std::vector<double> x;
        for (std::size_t j = 0; j < 34; ++j) x.push_back(number(f[j], line_no));
        if (f[34] != "g" && f[34] != "b") throw FormatError("ionosphere: unknown class '" + std::string(f[34]) + "'");
        rows.add(x, f[34] == "g" ? 1.0 : -1.0, line_no);
    }
    return rows.finish(task);
}

// Tab-separated with a header: row id, eight predictors, lpsa, train flag.
Dataset convert_prostate(std::string_view raw, Task task) {
    const auto lines = lines_of(raw);
    if (lines.empty()) throw FormatError("prostate: empty file");
    Rows rows;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto f = split_on(lines[i], " \t");
        expect_fields(f.size(), 11, i + 1);
        std::vector<double> x;
        for (std::size_t j = 1; j <= 8; ++j) x.push_back(number(f[j], i + 1));
        rows.add(x, number(f[9], i + 1), i + 1);
    }
    return rows.finish(task);
}

// Tab-separated with a header; ten predictors and the response Y last.
Dataset convert_diabetes(std::string_view raw, Task task) {
    const auto lines = lines_of(raw);
    if (lines.empty()) throw FormatError("diabetes: empty file");
    Rows rows;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto f = split_on(lines[i], " \t");
        expect_fields(f.size(), 11, i + 1);
        std::vector<double> x;
        for (std::size_t j = 0; j < 10; ++j) x.push_back(number(f[j], i + 1));
        rows.add(x, number(f[10], i + 1), i + 1);
    }
    return rows.finish(task);
}

// Sex coded M = 1, F = -1, I = 0; seven measurements; rings as target.
Dataset convert_abalone(std::string_view raw, Task task) {
    Rows rows;
    std::size_t line_no = 0;
    for (auto line : lines_of(raw)) {
        ++line_no;
        const auto f = fields_of(line, ',');
        expect_fields(f.size(), 9, line_no);
        std::vector<double> x;
        if (f[0] == "M") {
            x.push_back(1.0);
        } else if (f[0] == "F") {
            x.push_back(-1.0);
        } else if (f[0] == "I") {
            x.push_back(0.0);
        } else {
            throw FormatError("abalone: unknown sex code '" + std::string(f[0]) + "'");
        }
        for (std::size_t j = 1; j < 8; ++j) x.push_back(number(f[j], line_no));
        rows.add(x, number(f[8], line_no), line_no);
    }
    return rows.finish(task);
}

// 57 numeric attributes, then the 0/1 spam label (1 -> +1, 0 -> -1).
Dataset convert_spambase(std::string_view raw, Task task) {
    Rows rows;
    std::size_t line_no = 0;
    for (auto line : lines_of(raw)) {
        ++line_no;
        const auto f = fields_of(line, ',');
        expect_fields(f.size(), 58, line_no);
        std::vector<double> x;
        for (std::size_t j = 0; j < 57; ++j) x.push_back(number(f[j], line_no));
        const double label = number(f[57], line_no);
        if (label != 0.0 && label != 1.0) throw FormatError("spambase: label must be 0 or 1");
        rows.add(x, label == 1.0 ? 1.0 : -1.0, line_no);
    }
    return rows.finish(task);
}

// id, diagnosis (M -> +1, B -> -1), 30 numeric features.
Dataset convert_wdbc(std::string_view raw, Task task) {
    Rows rows;
    std::size_t line_no = 0;
    for (auto line : lines_of(raw)) {
        ++line_no;
        const auto f = fields_of(line, ',');
        expect_fields(f.size(), 32, line_no);
        if (f[1] != "M" && f[1] != "B") throw FormatError("wdbc: unknown diagnosis '" + std::string(f[1]) + "'");
        std::vector<double> x;
        for (std::size_t j = 2; j < 32; ++j) x.push_back(number(f[j], line_no));
        rows.add(x, f[1] == "M" ? 1.0 : -1.0, line_no);
    }
    return rows.finish(task);
}

Dataset convert_csv(std::string_view raw, Task task) {
    std::istringstream in{std::string(raw)};
    std::ostringstream warnings;
    try {
        return table_to_dataset(read_numeric_csv(in), task, warnings);
    } catch (const CsvError& e) {
        throw FormatError(e.what());
    }
}

using Converter = Dataset (*)(std::string_view, Task);

const std::map<std::string, Converter, std::less<>>& converters() {
    static const std::map<std::string, Converter, std::less<>> table{
        {"abalone", convert_abalone},   {"csv", convert_csv},         {"diabetes", convert_diabetes},
        {"housing", convert_housing},   {"ionosphere", convert_ionosphere}, {"prostate", convert_prostate},
        {"spambase", convert_spambase}, {"wdbc", convert_wdbc},
    };
    return table;
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const fs::path& path, std::string_view bytes) {
    const fs::path tmp = path.string() + ".part";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw std::runtime_error("cannot open '" + tmp.string() + "' for writing");
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!out) throw std::runtime_error("write to '" + tmp.string() + "' failed");
    }
    fs::rename(tmp, path);
}

std::string trim_copy(std::string s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
    std::size_t i = 0;
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    return s.substr(i);
}

}  // namespace

std::vector<DatasetSource> parse_source_table(std::istream& in) {
    std::vector<DatasetSource> table;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const auto f = split_on(line, " \t\r");
        if (f.empty()) continue;
        if (f.size() != 5) {
            throw FormatError("source table line " + std::to_string(line_no) + ": expected 5 fields, found " +
                              std::to_string(f.size()));
        }
        DatasetSource src;
        src.name = f[0];
        try {
            src.task = parse_task(f[1]);
        } catch (const InvalidInput& e) {
            throw FormatError("source table line " + std::to_string(line_no) + ": " + e.what());
        }
        src.format = f[2];
        if (!converters().contains(src.format)) {
            throw FormatError("source table line " + std::to_string(line_no) + ": unknown format '" + src.format +
                              "'");
        }
        if (f[3] != "-") src.sha256 = std::string(f[3]);
        src.url = f[4];
        table.push_back(std::move(src));
    }
    return table;
}

std::vector<DatasetSource> load_source_table(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open source table '" + path.string() + "'");
    return parse_source_table(in);
}

const DatasetSource& find_source(const std::vector<DatasetSource>& table, std::string_view name) {
    for (const auto& src : table) {
        if (src.name == name) return src;
    }
    std::string known;
    for (const auto& src : table) known += (known.empty() ? "" : ", ") + src.name;
    throw InvalidInput("unknown dataset '" + std::string(name) + "' (known: " + known + ")");
}

std::string sha256_hex(std::string_view bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
        throw std::runtime_error("sha256: digest failed");
    }
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 0xf];
    }
    return out;
}

std::string download(const std::string& url) {
    constexpr std::string_view file_scheme = "file://";
    if (url.starts_with(file_scheme)) {
        const fs::path path = url.substr(file_scheme.size());
        std::ifstream in(path, std::ios::binary);
        if (!in) throw NetworkError("cannot read '" + path.string() + "'");
        std::ostringstream buf;
        buf << in.rdbuf();
        return buf.str();
    }
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw NetworkError("unsupported URL '" + url + "'");
    const std::string scheme = url.substr(0, scheme_end);
    if (scheme != "http" && scheme != "https") throw NetworkError("unsupported URL scheme '" + scheme + "'");
    const auto path_start = url.find('/', scheme_end + 3);
    const std::string origin = url.substr(0, path_start);
    const std::string path = path_start == std::string::npos ? "/" : url.substr(path_start);

    httplib::Client client(origin);
    client.set_follow_location(true);
    client.set_connection_timeout(15);
    client.set_read_timeout(60);
    const auto res = client.Get(path);
    if (!res) throw NetworkError("GET " + url + " failed: " + httplib::to_string(res.error()));
    if (res->status != 200) throw NetworkError("GET " + url + " returned HTTP " + std::to_string(res->status));
    return res->body;
}

Dataset convert_raw(std::string_view format, std::string_view raw, Task task) {
    const auto it = converters().find(format);
    if (it == converters().end()) throw InvalidInput("unknown dataset format '" + std::string(format) + "'");
    return it->second(raw, task);
}

std::vector<std::string> known_formats() {
    std::vector<std::string> out;
    for (const auto& [name, fn] : converters()) out.push_back(name);
    return out;
}

FetchResult fetch_dataset(const std::vector<DatasetSource>& table, const FetchRequest& request) {
    const DatasetSource& src = find_source(table, request.name);
    fs::create_directories(request.cache_dir);
    fs::create_directories(request.out_dir);
    const fs::path raw_path = request.cache_dir / (src.name + ".raw");
    const fs::path digest_path = request.cache_dir / (src.name + ".sha256");

    std::optional<std::string> expected = src.sha256;
    if (!expected && fs::exists(digest_path)) expected = trim_copy(read_file(digest_path));

    FetchResult result;
    std::string raw;
    if (fs::exists(raw_path)) {
        raw = read_file(raw_path);
        if (expected && sha256_hex(raw) != *expected) {
            fs::remove(raw_path);
            throw ChecksumMismatch("cached " + raw_path.string() + " does not match sha256 " + *expected +
                                   "; file removed");
        }
        result.cache_hit = true;
    } else {
        raw = download(request.url_override.value_or(src.url));
        const std::string digest = sha256_hex(raw);
        if (expected && digest != *expected) {
            throw ChecksumMismatch("download of " + src.name + " has sha256 " + digest + ", expected " + *expected);
        }
        write_file(raw_path, raw);
    }
    if (!src.sha256 && !fs::exists(digest_path)) write_file(digest_path, sha256_hex(raw) + "\n");

    const Dataset data = convert_raw(src.format, raw, src.task);
    result.csv_path = request.out_dir / (src.name + ".csv");
    std::ostringstream csv;
    write_dataset_csv(csv, data);
    write_file(result.csv_path, csv.str());
    result.rows = data.size();
    result.features = data.dim();
    return result;
}

}  // namespace rboost
