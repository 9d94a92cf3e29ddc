#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "rboost/dataset.hpp"

namespace rboost {

class NetworkError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Downloaded or cached content does not match its expected SHA-256.
class ChecksumMismatch : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// One row of the dataset source table:
///
///     # name  task  format  sha256  url
///     housing regression housing - https://...
///
/// A sha256 of "-" means unpinned: the digest of the first download is
/// stored next to the cached file and enforced from then on.
struct DatasetSource {
    std::string name;
    Task task = Task::regression;
    std::string format;
    std::optional<std::string> sha256;
    std::string url;
};

std::vector<DatasetSource> parse_source_table(std::istream& in);
std::vector<DatasetSource> load_source_table(const std::filesystem::path& path);
const DatasetSource& find_source(const std::vector<DatasetSource>& table, std::string_view name);

/// Lowercase hex SHA-256.
std::string sha256_hex(std::string_view bytes);

/// Body of a file://, http:// or https:// URL. Throws NetworkError.
std::string download(const std::string& url);

/// Raw file contents in a named layout -> Dataset. Known formats: housing,
/// ionosphere, prostate, diabetes, abalone, spambase, wdbc, csv. Throws
/// FormatError on malformed content.
Dataset convert_raw(std::string_view format, std::string_view raw, Task task);
std::vector<std::string> known_formats();

struct FetchRequest {
    std::string name;
    std::optional<std::string> url_override;
    std::filesystem::path out_dir;
    std::filesystem::path cache_dir;
};

struct FetchResult {
    std::filesystem::path csv_path;
    std::size_t rows = 0;
    std::size_t features = 0;
    bool cache_hit = false;
};

/// Cache lookup -> download on miss -> checksum -> convert -> write
/// <out_dir>/<name>.csv. A cached file that fails its checksum is removed.
FetchResult fetch_dataset(const std::vector<DatasetSource>& table, const FetchRequest& request);

}  // namespace rboost
