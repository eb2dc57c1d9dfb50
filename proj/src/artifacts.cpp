#include "nlsosc/artifacts.hpp"

#include "nlsosc/error.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

namespace nlsosc {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Bumped whenever the numerics behind cached artifacts change.
constexpr const char* kCacheRevision = "family-v1";

std::string read_file(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::ConfigInvalid, "cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<double> node_field(const std::vector<FamilyNode>& nodes, double FamilyNode::*f)
{
    std::vector<double> out;
    for (const auto& n : nodes) out.push_back(n.*f);
    return out;
}

}  // namespace

std::string format_double(double x)
{
    std::array<char, 32> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
    return std::string(buf.data(), res.ptr);
}

CsvWriter::CsvWriter(const fs::path& path, std::vector<std::string> columns,
                     const std::vector<std::pair<std::string, std::string>>& meta)
    : path_(path), columns_(columns.size())
{
    buffer_ = "# schema_version: " + std::to_string(kSchemaVersion) + "\n";
    for (const auto& [k, v] : meta) buffer_ += "# " + k + ": " + v + "\n";
    for (std::size_t i = 0; i < columns.size(); ++i) buffer_ += (i ? "," : "") + columns[i];
    buffer_ += "\n";
}

void CsvWriter::row(const std::vector<double>& values)
{
    if (values.size() != columns_) fail(ErrorCode::ConfigInvalid, "CSV row width mismatch in " + path_.string());
    for (std::size_t i = 0; i < values.size(); ++i) buffer_ += (i ? "," : "") + format_double(values[i]);
    buffer_ += "\n";
}

void CsvWriter::close() { write_text(path_, buffer_); }

std::vector<double> CsvTable::column(const std::string& name) const
{
    for (std::size_t c = 0; c < columns.size(); ++c) {
        if (columns[c] != name) continue;
        std::vector<double> out;
        for (const auto& r : rows) out.push_back(r[c]);
        return out;
    }
    fail(ErrorCode::ConfigInvalid, "no column '" + name + "'");
}

CsvTable read_csv(const fs::path& path)
{
    std::istringstream in(read_file(path));
    CsvTable t;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            const auto colon = line.find(':');
            if (colon != std::string::npos)
                t.meta.emplace_back(line.substr(2, colon - 2), line.substr(std::min(line.size(), colon + 2)));
            continue;
        }
        std::vector<std::string> cells;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (t.columns.empty()) {
            t.columns = cells;
            continue;
        }
        std::vector<double> row;
        for (const auto& c : cells) row.push_back(std::strtod(c.c_str(), nullptr));
        t.rows.push_back(std::move(row));
    }
    return t;
}

void write_text(const fs::path& path, const std::string& text)
{
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ostringstream tag;
    tag << std::this_thread::get_id();
    const fs::path tmp = path.string() + ".tmp" + fnv1a_hex(tag.str()).substr(0, 6);
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) fail(ErrorCode::ConfigInvalid, "cannot write " + path.string());
        out << text;
    }
    fs::rename(tmp, path);
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

json read_json(const fs::path& path)
{
    try {
        return json::parse(read_file(path));
    } catch (const json::exception& e) {
        fail(ErrorCode::ConfigInvalid, path.string() + ": " + e.what());
    }
}

void write_doubles_le(const fs::path& path, const std::vector<double>& data)
{
    std::string bytes(data.size() * 8, '\0');
    for (std::size_t i = 0; i < data.size(); ++i) {
        std::uint64_t bits = std::bit_cast<std::uint64_t>(data[i]);
        for (int b = 0; b < 8; ++b) bytes[8 * i + b] = static_cast<char>((bits >> (8 * b)) & 0xffu);
    }
    write_text(path, bytes);
}

std::vector<double> read_doubles_le(const fs::path& path)
{
    const std::string bytes = read_file(path);
    if (bytes.size() % 8) fail(ErrorCode::ConfigInvalid, path.string() + ": truncated float64 sidecar");
    std::vector<double> out(bytes.size() / 8);
    for (std::size_t i = 0; i < out.size(); ++i) {
        std::uint64_t bits = 0;
        for (int b = 0; b < 8; ++b)
            bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[8 * i + b])) << (8 * b);
        out[i] = std::bit_cast<double>(bits);
    }
    return out;
}

void save_family(const GroundStateFamily& family, const fs::path& json_path, bool sidecar)
{
    const auto& nodes = family.nodes();
    const auto& opts = family.options();
    json j;
    j["schema_version"] = kSchemaVersion;
    j["artifact"] = "ground_state_family";
    j["nonlinearity"] = family.nonlinearity().label;
    j["grid"] = {{"r_max", family.grid().r_max()}, {"n_points", family.grid().size()}};
    j["solver"] = {{"tol", opts.tol}, {"max_newton", opts.max_newton}, {"tail_floor", opts.tail_floor}};
    j["omega"] = node_field(nodes, &FamilyNode::omega);
    j["q"] = node_field(nodes, &FamilyNode::q);
    j["dq"] = node_field(nodes, &FamilyNode::dq);
    j["d2q"] = node_field(nodes, &FamilyNode::d2q);
    j["energy"] = node_field(nodes, &FamilyNode::energy);
    j["d"] = node_field(nodes, &FamilyNode::d);
    j["residual"] = node_field(nodes, &FamilyNode::residual);
    try {
        const CriticalPoint cp = find_critical_frequency(family);
        j["omega_star"] = cp.omega_star;
        j["q_star"] = cp.q_star;
        j["d2q_star"] = cp.d2q_star;
    } catch (const Error&) {
        j["omega_star"] = nullptr;
    }
    if (sidecar) {
        std::vector<double> flat;
        flat.reserve(2 * nodes.size() * family.grid().size());
        for (const auto& n : nodes) flat.insert(flat.end(), n.phi.data(), n.phi.data() + n.phi.size());
        for (const auto& n : nodes) flat.insert(flat.end(), n.dphi.data(), n.dphi.data() + n.dphi.size());
        const fs::path bin = fs::path(json_path).replace_extension(".bin");
        write_doubles_le(bin, flat);
        j["profiles"] = {{"sidecar", bin.filename().string()},
                         {"layout", "phi[node][r] then dphi[node][r], float64 little-endian"}};
    } else {
        json phi = json::array(), dphi = json::array();
        for (const auto& n : nodes) {
            phi.push_back(std::vector<double>(n.phi.data(), n.phi.data() + n.phi.size()));
            dphi.push_back(std::vector<double>(n.dphi.data(), n.dphi.data() + n.dphi.size()));
        }
        j["profiles"] = {{"phi", phi}, {"dphi", dphi}};
    }
    write_json(json_path, j);
}

GroundStateFamily load_family(const fs::path& json_path)
{
    const json j = read_json(json_path);
    try {
        if (j.at("schema_version").get<int>() != kSchemaVersion)
            fail(ErrorCode::ConfigInvalid, json_path.string() + ": unsupported schema_version");
        const RadialGrid grid(j.at("grid").at("r_max").get<double>(), j.at("grid").at("n_points").get<int>());
        const Nonlinearity nl = Nonlinearity::from_label(j.at("nonlinearity").get<std::string>());
        GroundStateOptions opts;
        opts.tol = j.at("solver").at("tol").get<double>();
        opts.max_newton = j.at("solver").at("max_newton").get<int>();
        opts.tail_floor = j.at("solver").at("tail_floor").get<double>();
        const auto omega = j.at("omega").get<std::vector<double>>();
        const auto q = j.at("q").get<std::vector<double>>();
        const auto dq = j.at("dq").get<std::vector<double>>();
        const auto d2q = j.at("d2q").get<std::vector<double>>();
        const auto energy = j.at("energy").get<std::vector<double>>();
        const auto d = j.at("d").get<std::vector<double>>();
        const auto residual = j.at("residual").get<std::vector<double>>();
        const std::size_t m = omega.size();
        const int n = grid.size();
        std::vector<FamilyNode> nodes(m);
        const json& prof = j.at("profiles");
        std::vector<double> flat;
        if (prof.contains("sidecar")) {
            flat = read_doubles_le(json_path.parent_path() / prof.at("sidecar").get<std::string>());
            if (flat.size() != 2 * m * static_cast<std::size_t>(n))
                fail(ErrorCode::ConfigInvalid, json_path.string() + ": sidecar size mismatch");
        }
        for (std::size_t k = 0; k < m; ++k) {
            FamilyNode& f = nodes[k];
            f.omega = omega.at(k);
            f.q = q.at(k);
            f.dq = dq.at(k);
            f.d2q = d2q.at(k);
            f.energy = energy.at(k);
            f.d = d.at(k);
            f.residual = residual.at(k);
            if (!flat.empty()) {
                f.phi = Eigen::Map<const Vec>(flat.data() + k * n, n);
                f.dphi = Eigen::Map<const Vec>(flat.data() + (m + k) * n, n);
            } else {
                const auto p = prof.at("phi").at(k).get<std::vector<double>>();
                const auto dp = prof.at("dphi").at(k).get<std::vector<double>>();
                if (static_cast<int>(p.size()) != n || static_cast<int>(dp.size()) != n)
                    fail(ErrorCode::ConfigInvalid, json_path.string() + ": profile length mismatch");
                f.phi = Eigen::Map<const Vec>(p.data(), n);
                f.dphi = Eigen::Map<const Vec>(dp.data(), n);
            }
        }
        return GroundStateFamily(grid, nl, std::move(nodes), opts);
    } catch (const json::exception& e) {
        fail(ErrorCode::ConfigInvalid, json_path.string() + ": " + e.what());
    }
}

json kernel_table_json(const KernelTable& t)
{
    return {{"schema_version", kSchemaVersion},
            {"artifact", "kernel_table"},
            {"omega", t.omega},
            {"A", t.A},
            {"B", t.B},
            {"a", t.a},
            {"dq", t.dq},
            {"omega_star", t.omega_star},
            {"A_star", t.A_star},
            {"B_star", t.B_star}};
}

KernelTable kernel_table_from_json(const json& j)
{
    try {
        if (j.at("schema_version").get<int>() != kSchemaVersion)
            fail(ErrorCode::ConfigInvalid, "kernel table: unsupported schema_version");
        KernelTable t;
        t.omega = j.at("omega").get<std::vector<double>>();
        t.A = j.at("A").get<std::vector<double>>();
        t.B = j.at("B").get<std::vector<double>>();
        t.a = j.at("a").get<std::vector<double>>();
        t.dq = j.at("dq").get<std::vector<double>>();
        t.omega_star = j.at("omega_star").get<double>();
        t.A_star = j.at("A_star").get<double>();
        t.B_star = j.at("B_star").get<double>();
        return t;
    } catch (const json::exception& e) {
        fail(ErrorCode::ConfigInvalid, std::string("kernel table: ") + e.what());
    }
}

std::string fnv1a_hex(const std::string& text)
{
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

fs::path cache_directory()
{
    if (const char* env = std::getenv(kCacheEnv); env && *env) return env;
    if (const char* xdg = std::getenv("XDG_CACHE_HOME"); xdg && *xdg) return fs::path(xdg) / "nlsosc";
    if (const char* home = std::getenv("HOME"); home && *home) return fs::path(home) / ".cache" / "nlsosc";
    return fs::temp_directory_path() / "nlsosc-cache";
}

FamilyBundle load_or_build(const FamilySpec& spec)
{
    const GroundStateOptions opts;
    const json inputs = {{"revision", kCacheRevision},
                         {"nonlinearity", spec.nonlinearity},
                         {"r_max", spec.r_max},
                         {"n_points", spec.n_points},
                         {"omega_lo", spec.omega_lo},
                         {"omega_hi", spec.omega_hi},
                         {"n_omega", spec.n_omega},
                         {"kernel_halfwidth", spec.kernel_halfwidth},
                         {"n_kernel", spec.n_kernel},
                         {"tol", opts.tol},
                         {"max_newton", opts.max_newton},
                         {"tail_floor", opts.tail_floor}};
    FamilyBundle out;
    out.key = fnv1a_hex(inputs.dump());
    const fs::path dir = cache_directory();
    const fs::path fam_path = dir / ("family-" + out.key + ".json");
    const fs::path tab_path = dir / ("kernels-" + out.key + ".json");

    std::shared_ptr<GroundStateFamily> family;
    if (fs::exists(fam_path) && fs::exists(tab_path)) {
        try {
            family = std::make_shared<GroundStateFamily>(load_family(fam_path));
            out.table = kernel_table_from_json(read_json(tab_path));
            out.from_cache = true;
        } catch (const Error& e) {
            std::cerr << "warning: ignoring unreadable cache entry " << fam_path << ": " << e.what() << "\n";
            family.reset();
        }
    }
    if (!family) {
        const RadialGrid grid(spec.r_max, spec.n_points);
        family = std::make_shared<GroundStateFamily>(
            build_family(grid, Nonlinearity::from_label(spec.nonlinearity),
                         linspace(spec.omega_lo, spec.omega_hi, spec.n_omega), opts));
    }
    out.critical = find_critical_frequency(*family);
    if (!out.from_cache) {
        const double lo = std::max(family->omega_min(), out.critical.omega_star - spec.kernel_halfwidth);
        const double hi = std::min(family->omega_max(), out.critical.omega_star + spec.kernel_halfwidth);
        out.table = build_kernel_table(*family, lo, hi, spec.n_kernel);
        try {
            save_family(*family, fam_path, true);
            json tj = kernel_table_json(out.table);
            tj["inputs"] = inputs;
            write_json(tab_path, tj);
        } catch (const std::exception& e) {
            std::cerr << "warning: cache directory " << dir << " not writable: " << e.what() << "\n";
        }
    }
    out.family = family;
    return out;
}

}  // namespace nlsosc
