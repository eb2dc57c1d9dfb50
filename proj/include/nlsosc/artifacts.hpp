#pragma once

#include "nlsosc/config.hpp"
#include "nlsosc/ground_family.hpp"
#include "nlsosc/linearization.hpp"
#include "nlsosc/reduced_dynamics.hpp"

#include <json.hpp>

#include <filesystem>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace nlsosc {

// Shortest round-trip decimal form; locale independent.
std::string format_double(double x);

// "# key: value" metadata lines (schema_version first), a header row, then rows.
class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, std::vector<std::string> columns,
              const std::vector<std::pair<std::string, std::string>>& meta = {});
    void row(const std::vector<double>& values);
    void close();

private:
    std::filesystem::path path_;
    std::string buffer_;
    std::size_t columns_;
};

struct CsvTable {
    std::vector<std::pair<std::string, std::string>> meta;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    std::vector<double> column(const std::string& name) const;
};
CsvTable read_csv(const std::filesystem::path& path);

// Writes via a temporary file and rename so concurrent readers never see partial files.
void write_text(const std::filesystem::path& path, const std::string& text);
void write_json(const std::filesystem::path& path, const nlohmann::json& j);
nlohmann::json read_json(const std::filesystem::path& path);

void write_doubles_le(const std::filesystem::path& path, const std::vector<double>& data);
std::vector<double> read_doubles_le(const std::filesystem::path& path);

// Family file: JSON with the q/d curves and either inline profiles or a float64 sidecar.
void save_family(const GroundStateFamily& family, const std::filesystem::path& json_path, bool sidecar);
GroundStateFamily load_family(const std::filesystem::path& json_path);

nlohmann::json kernel_table_json(const KernelTable& table);
KernelTable kernel_table_from_json(const nlohmann::json& j);

std::string fnv1a_hex(const std::string& text);

inline constexpr const char* kCacheEnv = "NLSOSC_CACHE_DIR";
std::filesystem::path cache_directory();

struct FamilyBundle {
    std::shared_ptr<const GroundStateFamily> family;
    CriticalPoint critical;
    KernelTable table;
    std::string key;
    bool from_cache = false;
};

// Family and kernel table for a spec, reused from the cache directory when the content hash matches.
FamilyBundle load_or_build(const FamilySpec& spec);

}  // namespace nlsosc
