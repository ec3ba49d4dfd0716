#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "error.hpp"
#include "grid.hpp"
#include "precond.hpp"
#include "solver.hpp"
#include "sparse.hpp"

namespace lpunwrap {

// ---------------------------------------------------------------------------
// PHM: "PHM1" | u32 width | u32 height | u8 kind | height*width f64, all LE

inline constexpr std::array<char, 4> kPhmMagic{'P', 'H', 'M', '1'};
inline constexpr std::size_t kPhmHeaderSize = 13;

struct PhmHeader {
    std::uint32_t width = 0;
    std::uint32_t height = 0;
    std::uint8_t kind = 0;  ///< 0 wrapped, 1 unwrapped
};

namespace detail {

inline void put_le(std::vector<unsigned char>& out, std::uint64_t v, int bytes) {
    for (int b = 0; b < bytes; ++b) out.push_back(static_cast<unsigned char>((v >> (8 * b)) & 0xffu));
}

inline std::uint64_t get_le(std::span<const unsigned char> in, std::size_t at, int bytes) {
    std::uint64_t v = 0;
    for (int b = 0; b < bytes; ++b) v |= static_cast<std::uint64_t>(in[at + b]) << (8 * b);
    return v;
}

inline std::vector<unsigned char> slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                     std::istreambuf_iterator<char>());
    if (in.bad()) throw IoError("read failed on '" + path.string() + "'");
    return bytes;
}

inline void dump(const std::filesystem::path& path, std::span<const unsigned char> bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failed on '" + path.string() + "'");
}

}  // namespace detail

inline std::vector<unsigned char> encode_phm(const PhaseMap& map) {
    std::vector<unsigned char> out;
    out.reserve(kPhmHeaderSize + 8 * map.size());
    out.insert(out.end(), kPhmMagic.begin(), kPhmMagic.end());
    detail::put_le(out, map.cols(), 4);
    detail::put_le(out, map.rows(), 4);
    out.push_back(map.kind() == PhaseKind::Wrapped ? 0 : 1);
    for (double v : map.values()) detail::put_le(out, std::bit_cast<std::uint64_t>(v), 8);
    return out;
}

inline PhaseMap decode_phm(std::span<const unsigned char> in) {
    using K = ParseError::Kind;
    if (in.size() < kPhmHeaderSize)
        throw ParseError(K::Truncated, in.size(), "PHM header needs 13 bytes");
    if (!std::equal(kPhmMagic.begin(), kPhmMagic.end(), in.begin()))
        throw ParseError(K::BadMagic, 0, "bad PHM magic");
    PhmHeader h;
    h.width = static_cast<std::uint32_t>(detail::get_le(in, 4, 4));
    h.height = static_cast<std::uint32_t>(detail::get_le(in, 8, 4));
    h.kind = in[12];
    if (h.width < 2) throw ParseError(K::BadHeader, 4, "PHM width must be >= 2");
    if (h.height < 2) throw ParseError(K::BadHeader, 8, "PHM height must be >= 2");
    if (h.kind > 1) throw ParseError(K::BadHeader, 12, "PHM kind byte must be 0 or 1");

    const std::size_t cells = static_cast<std::size_t>(h.width) * h.height;
    const std::size_t expected = kPhmHeaderSize + 8 * cells;
    if (in.size() < expected)
        throw ParseError(K::Truncated, in.size(),
                         "PHM payload truncated, expected " + std::to_string(expected) + " bytes");
    if (in.size() > expected) throw ParseError(K::BadHeader, expected, "trailing bytes after PHM payload");

    const bool wrapped = h.kind == 0;
    std::vector<double> values(cells);
    for (std::size_t c = 0; c < cells; ++c) {
        const std::size_t at = kPhmHeaderSize + 8 * c;
        const double v = std::bit_cast<double>(detail::get_le(in, at, 8));
        if (!std::isfinite(v)) throw ParseError(K::NonFinite, at, "non-finite value in cell " + std::to_string(c));
        if (wrapped && !in_wrapped_range(v))
            throw ParseError(K::RangeViolation, at,
                             "wrapped value outside (-pi, pi] in cell " + std::to_string(c));
        values[c] = v;
    }
    return PhaseMap(h.height, h.width, std::move(values),
                    wrapped ? PhaseKind::Wrapped : PhaseKind::Unwrapped);
}

inline PhaseMap read_phm(const std::filesystem::path& path) { return decode_phm(detail::slurp(path)); }

inline void write_phm(const PhaseMap& map, const std::filesystem::path& path) {
    detail::dump(path, encode_phm(map));
}

// ---------------------------------------------------------------------------
// PGM (P5, 8 bit) preview

/// Wrapped maps are scaled from (-pi, pi] onto 0..255. Unwrapped maps are
/// re-wrapped first when `rewrap` is set, otherwise stretched min..max.
inline void write_pgm(const PhaseMap& map, const std::filesystem::path& path, bool rewrap = true) {
    const auto v = map.values();
    std::vector<unsigned char> pixels(v.size());
    const bool phase_scale = map.kind() == PhaseKind::Wrapped || rewrap;
    if (phase_scale) {
        for (std::size_t c = 0; c < v.size(); ++c) {
            const double w = map.kind() == PhaseKind::Wrapped ? v[c] : wrap_scalar(v[c]);
            const long px = std::lround((w + kPi) / kTwoPi * 255.0);
            pixels[c] = static_cast<unsigned char>(std::clamp(px, 0L, 255L));
        }
    } else {
        const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
        const double range = *hi - *lo;
        for (std::size_t c = 0; c < v.size(); ++c) {
            const long px = range > 0.0 ? std::lround((v[c] - *lo) / range * 255.0) : 0L;
            pixels[c] = static_cast<unsigned char>(std::clamp(px, 0L, 255L));
        }
    }
    const std::string header =
        "P5\n" + std::to_string(map.cols()) + " " + std::to_string(map.rows()) + "\n255\n";
    std::vector<unsigned char> bytes(header.begin(), header.end());
    bytes.insert(bytes.end(), pixels.begin(), pixels.end());
    detail::dump(path, bytes);
}

// ---------------------------------------------------------------------------
// Matrix Market export (debugging aid)

inline void write_matrix_market(const SparseMatrix& a, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    std::size_t lower = 0;
    for (std::size_t i = 0; i < a.dim(); ++i)
        for (std::size_t k = a.row_begin(i); k < a.row_end(i); ++k)
            if (a.col_indices()[k] <= i) ++lower;
    out << "%%MatrixMarket matrix coordinate real symmetric\n";
    out << a.dim() << ' ' << a.dim() << ' ' << lower << '\n';
    char buf[64];
    for (std::size_t i = 0; i < a.dim(); ++i)
        for (std::size_t k = a.row_begin(i); k < a.row_end(i); ++k) {
            const std::size_t j = a.col_indices()[k];
            if (j > i) continue;
            std::snprintf(buf, sizeof buf, "%.17g", a.values()[k]);
            out << i + 1 << ' ' << j + 1 << ' ' << buf << '\n';
        }
    if (!out) throw IoError("write failed on '" + path.string() + "'");
}

// ---------------------------------------------------------------------------
// Benchmark CSV

struct BenchRecord {
    double scale = 0.0;
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::size_t nnz = 0;
    double density_pct = 0.0;
    PrecondKind preconditioner = PrecondKind::Identity;
    double p = 0.0;
    std::size_t outer_iters = 0;
    std::size_t inner_iters_total = 0;
    double precond_build_s = 0.0;
    double precond_build_pct = 0.0;
    double pcg_s = 0.0;
    double total_s = 0.0;
    double q_raw = 0.0;
    double q_mean_aligned = 0.0;
    ExitReason exit_reason = ExitReason::Tol;
    std::uint64_t seed = 0;
};

inline constexpr std::string_view kBenchCsvHeader =
    "scale,rows,cols,nnz,density_pct,preconditioner,p,outer_iters,inner_iters_total,"
    "precond_build_s,precond_build_pct,pcg_s,total_s,q_raw,q_mean_aligned,exit_reason,seed";

/// Columns that carry wall-clock measurements.
inline constexpr std::array<std::string_view, 4> kBenchTimingColumns{
    "precond_build_s", "precond_build_pct", "pcg_s", "total_s"};

inline std::string format_bench_row(const BenchRecord& r) {
    char buf[512];
    std::snprintf(buf, sizeof buf,
                  "%.2f,%zu,%zu,%zu,%.4f,%s,%.6g,%zu,%zu,%.10g,%.8f,%.10g,%.10g,%.10g,%.10g,%s,%llu",
                  r.scale, r.rows, r.cols, r.nnz, r.density_pct,
                  std::string(to_string(r.preconditioner)).c_str(), r.p, r.outer_iters,
                  r.inner_iters_total, r.precond_build_s, r.precond_build_pct, r.pcg_s, r.total_s,
                  r.q_raw, r.q_mean_aligned, std::string(to_string(r.exit_reason)).c_str(),
                  static_cast<unsigned long long>(r.seed));
    return buf;
}

inline ExitReason parse_exit_reason(std::string_view s) {
    if (s == "tol") return ExitReason::Tol;
    if (s == "kmax") return ExitReason::KMax;
    if (s == "breakdown") return ExitReason::Breakdown;
    throw InvalidInput("unknown exit reason '" + std::string(s) + "'");
}

inline BenchRecord parse_bench_row(std::string_view line) {
    std::vector<std::string> f;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            f.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur += ch;
        }
    }
    f.push_back(cur);
    if (f.size() != 17) throw InvalidInput("bench CSV row must have 17 fields, got " + std::to_string(f.size()));
    try {
        BenchRecord r;
        r.scale = std::stod(f[0]);
        r.rows = std::stoull(f[1]);
        r.cols = std::stoull(f[2]);
        r.nnz = std::stoull(f[3]);
        r.density_pct = std::stod(f[4]);
        r.preconditioner = parse_precond_kind(f[5]);
        r.p = std::stod(f[6]);
        r.outer_iters = std::stoull(f[7]);
        r.inner_iters_total = std::stoull(f[8]);
        r.precond_build_s = std::stod(f[9]);
        r.precond_build_pct = std::stod(f[10]);
        r.pcg_s = std::stod(f[11]);
        r.total_s = std::stod(f[12]);
        r.q_raw = std::stod(f[13]);
        r.q_mean_aligned = std::stod(f[14]);
        r.exit_reason = parse_exit_reason(f[15]);
        r.seed = std::stoull(f[16]);
        return r;
    } catch (const std::logic_error&) {
        throw InvalidInput("malformed bench CSV row: " + std::string(line));
    }
}

/// Appends one row, writing the header first if the file is new or empty.
inline void append_bench_csv(const BenchRecord& record, const std::filesystem::path& path) {
    std::error_code ec;
    const bool fresh = !std::filesystem::exists(path, ec) || std::filesystem::file_size(path, ec) == 0;
    std::ofstream out(path, std::ios::app);
    if (!out) throw IoError("cannot open '" + path.string() + "' for appending");
    if (fresh) out << kBenchCsvHeader << '\n';
    out << format_bench_row(record) << '\n';
    if (!out) throw IoError("write failed on '" + path.string() + "'");
}

inline std::vector<BenchRecord> read_bench_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
    std::vector<BenchRecord> rows;
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (header) {
            header = false;
            if (line.rfind("scale,", 0) == 0) continue;
        }
        if (line.empty()) continue;
        rows.push_back(parse_bench_row(line));
    }
    return rows;
}

}  // namespace lpunwrap
