#include "ivr/io.hpp"

#include "ivr/errors.hpp"

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>

namespace ivr {

namespace {

std::ofstream open_out(const std::string& path, std::ios::openmode mode = std::ios::out)
{
    std::ofstream f(path, mode);
    if (!f)
        throw InvalidArgument("cannot write " + path);
    return f;
}

void write_header(std::ostream& os, const Provenance& prov)
{
    os << "# command: " << prov.command << "\n";
    os << "# config_hash: " << prov.config_hash << "\n";
    os << "# version: " << library_version() << "\n";
    for (const auto& [k, v] : prov.extra)
        os << "# " << k << ": " << v << "\n";
    for (const auto& [k, v] : prov.timings_s)
        os << "# time_" << k << "_s: " << format_number(v) << "\n";
}

constexpr std::uint64_t cache_magic = 0x3253455253455249ull; // "IRESRES2"

template <class T>
void put(std::ofstream& f, const T& v)
{
    f.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
bool get(std::ifstream& f, T& v)
{
    return static_cast<bool>(f.read(reinterpret_cast<char*>(&v), sizeof v));
}

} // namespace

nlohmann::json Provenance::to_json() const
{
    return {{"command", command}, {"config_hash", config_hash}, {"version", library_version()},
            {"extra", extra},     {"timings_s", timings_s}};
}

std::string library_version() { return "ivr 1.0.0"; }

std::string format_number(double v)
{
    char buf[40];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

void write_csv(const std::string& path, const Provenance& prov, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows)
{
    auto f = open_out(path);
    write_header(f, prov);
    for (std::size_t i = 0; i < header.size(); ++i)
        f << (i ? "," : "") << header[i];
    f << "\n";
    for (const auto& r : rows) {
        for (std::size_t i = 0; i < r.size(); ++i)
            f << (i ? "," : "") << format_number(r[i]);
        f << "\n";
    }
}

void write_csv_columns(const std::string& path, const Provenance& prov, const std::vector<std::string>& header,
                       const std::vector<Vec>& columns)
{
    const Eigen::Index n = columns.empty() ? 0 : columns.front().size();
    std::vector<std::vector<double>> rows(n, std::vector<double>(columns.size()));
    for (std::size_t c = 0; c < columns.size(); ++c) {
        if (columns[c].size() != n)
            throw InvalidArgument("write_csv_columns: ragged columns");
        for (Eigen::Index i = 0; i < n; ++i)
            rows[i][c] = columns[c](i);
    }
    write_csv(path, prov, header, rows);
}

void write_json(const std::string& path, const Provenance& prov, nlohmann::json body)
{
    body["provenance"] = prov.to_json();
    auto f = open_out(path);
    f << body.dump(2) << "\n";
}

void write_grid(const std::string& path, const Provenance& prov, const Vec& R1, const Vec& R2, const Mat& values)
{
    auto f = open_out(path);
    write_header(f, prov);
    f << "# rows: R1 (" << R1.size() << "), columns: R2 (" << R2.size() << ")\n";
    f << "R1";
    for (Eigen::Index i = 0; i < R1.size(); ++i)
        f << " " << format_number(R1(i));
    f << "\nR2";
    for (Eigen::Index j = 0; j < R2.size(); ++j)
        f << " " << format_number(R2(j));
    f << "\n";
    for (Eigen::Index i = 0; i < values.rows(); ++i) {
        for (Eigen::Index j = 0; j < values.cols(); ++j)
            f << (j ? " " : "") << format_number(values(i, j));
        f << "\n";
    }
}

void save_resonances(const std::string& path, const ResonanceSet& rs)
{
    const std::string tmp = path + ".tmp";
    {
        auto f = open_out(tmp, std::ios::binary);
        put(f, cache_magic);
        const std::int64_t nk = rs.a.rows(), nt = rs.a.cols(), solver_len = rs.solver.size();
        put(f, nk);
        put(f, nt);
        put(f, solver_len);
        f.write(rs.solver.data(), solver_len);
        f.write(reinterpret_cast<const char*>(rs.E.data()), nt * sizeof(double));
        f.write(reinterpret_cast<const char*>(rs.a.data()), nk * nt * sizeof(double));
        f.write(reinterpret_cast<const char*>(rs.C_abs.data()), nt * sizeof(double));
        f.write(reinterpret_cast<const char*>(rs.residual.data()), nt * sizeof(double));
        for (int it : rs.iterations)
            put(f, static_cast<std::int32_t>(it));
        const std::int64_t n_anchor = rs.anchor.size();
        put(f, n_anchor);
        for (int a : rs.anchor)
            put(f, static_cast<std::int32_t>(a));
        f.write(reinterpret_cast<const char*>(rs.offset.data()), rs.offset.size() * sizeof(double));
    }
    std::filesystem::rename(tmp, path);
}

std::optional<ResonanceSet> load_resonances(const std::string& path)
{
    std::ifstream f(path, std::ios::binary);
    if (!f)
        return std::nullopt;
    std::uint64_t magic = 0;
    std::int64_t nk = 0, nt = 0, solver_len = 0;
    if (!get(f, magic) || magic != cache_magic || !get(f, nk) || !get(f, nt) || !get(f, solver_len))
        return std::nullopt;
    if (nk < 0 || nt < 0 || solver_len < 0 || solver_len > 64)
        return std::nullopt;
    ResonanceSet rs;
    rs.solver.resize(solver_len);
    f.read(rs.solver.data(), solver_len);
    rs.E.resize(nt);
    rs.a.resize(nk, nt);
    rs.C_abs.resize(nt);
    rs.residual.resize(nt);
    f.read(reinterpret_cast<char*>(rs.E.data()), nt * sizeof(double));
    f.read(reinterpret_cast<char*>(rs.a.data()), nk * nt * sizeof(double));
    f.read(reinterpret_cast<char*>(rs.C_abs.data()), nt * sizeof(double));
    f.read(reinterpret_cast<char*>(rs.residual.data()), nt * sizeof(double));
    rs.iterations.resize(nt);
    for (auto& it : rs.iterations) {
        std::int32_t v = 0;
        if (!get(f, v))
            return std::nullopt;
        it = v;
    }
    std::int64_t n_anchor = 0;
    if (!get(f, n_anchor) || (n_anchor != 0 && n_anchor != nt))
        return std::nullopt;
    rs.anchor.resize(n_anchor);
    for (auto& a : rs.anchor) {
        std::int32_t v = 0;
        if (!get(f, v))
            return std::nullopt;
        a = v;
    }
    rs.offset.resize(n_anchor);
    f.read(reinterpret_cast<char*>(rs.offset.data()), n_anchor * sizeof(double));
    if (!f)
        return std::nullopt;
    return rs;
}

void ensure_directory(const std::string& dir)
{
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec)
        throw InvalidArgument("cannot create directory " + dir + ": " + ec.message());
}

} // namespace ivr
