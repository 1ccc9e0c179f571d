#pragma once

// Matrix and label I/O plus input preparation: CSV and raw binary matrices
// with bit-exact round-trips, row normalization, visualization-space layout
// generation, and reproducible pool shuffling.

#include "elmvis/common.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <random>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

namespace elmvis {

enum class MatrixFormat { Csv, RawF64 };

struct MatrixFile {
    std::string path;
    MatrixFormat format = MatrixFormat::Csv;
};

// Extension-based: .raw/.f64/.bin are binary, everything else is CSV text.
inline MatrixFormat infer_format(std::string_view path) {
    const auto dot = path.rfind('.');
    if (dot == std::string_view::npos)
        return MatrixFormat::Csv;
    const std::string_view ext = path.substr(dot);
    if (ext == ".raw" || ext == ".f64" || ext == ".bin")
        return MatrixFormat::RawF64;
    return MatrixFormat::Csv;
}

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

// Positions in messages are 1-based.
inline double parse_double(std::string_view token, const std::string& path, std::size_t line,
                           std::size_t column) {
    const std::string_view t = trim(token);
    double value = 0.0;
    const auto [end, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
    if (ec != std::errc{} || end != t.data() + t.size())
        throw ParseError(path + ":" + std::to_string(line) + ": column " + std::to_string(column) +
                         ": not a number: '" + std::string(t) + "'");
    if (!std::isfinite(value))
        throw ParseError(path + ":" + std::to_string(line) + ": column " + std::to_string(column) +
                         ": non-finite value");
    return value;
}

inline long parse_long(std::string_view token, const std::string& path, std::size_t line,
                       std::size_t column) {
    const std::string_view t = trim(token);
    long value = 0;
    const auto [end, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
    if (ec != std::errc{} || end != t.data() + t.size())
        throw ParseError(path + ":" + std::to_string(line) + ": column " + std::to_string(column) +
                         ": not an integer: '" + std::string(t) + "'");
    return value;
}

inline std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    for (;;) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.push_back(line.substr(start));
            return fields;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

inline std::uint64_t load_u64_le(const unsigned char* bytes) {
    std::uint64_t value = 0;
    for (int i = 7; i >= 0; --i)
        value = (value << 8) | bytes[i];
    return value;
}

inline void store_u64_le(std::uint64_t value, unsigned char* bytes) {
    for (int i = 0; i < 8; ++i) {
        bytes[i] = static_cast<unsigned char>(value & 0xff);
        value >>= 8;
    }
}

inline Matrix load_matrix_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ParseError(path + ": cannot open file");

    std::vector<double> values;
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty())
            throw ParseError(path + ":" + std::to_string(line_no) + ": empty line");
        const auto fields = split_fields(line);
        if (rows == 0) {
            cols = fields.size();
        } else if (fields.size() != cols) {
            throw ParseError(path + ":" + std::to_string(line_no) + ": expected " +
                             std::to_string(cols) + " fields, found " +
                             std::to_string(fields.size()));
        }
        for (std::size_t c = 0; c < fields.size(); ++c)
            values.push_back(parse_double(fields[c], path, line_no, c + 1));
        ++rows;
    }
    if (rows == 0)
        throw ParseError(path + ": empty matrix");

    Matrix out(static_cast<Index>(rows), static_cast<Index>(cols));
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c)
            out(static_cast<Index>(r), static_cast<Index>(c)) = values[r * cols + c];
    return out;
}

inline Matrix load_matrix_raw(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ParseError(path + ": cannot open file");

    unsigned char header[16];
    if (!in.read(reinterpret_cast<char*>(header), sizeof(header)))
        throw ParseError(path + ": truncated header");
    const std::uint64_t rows = load_u64_le(header);
    const std::uint64_t cols = load_u64_le(header + 8);
    if (rows == 0 || cols == 0)
        throw ParseError(path + ": empty matrix");
    if (rows > (1u << 30) || cols > (1u << 30) || rows * cols > (1u << 30))
        throw ParseError(path + ": implausible dimensions");

    const std::size_t count = static_cast<std::size_t>(rows * cols);
    std::vector<unsigned char> payload(count * 8);
    if (!in.read(reinterpret_cast<char*>(payload.data()),
                 static_cast<std::streamsize>(payload.size())))
        throw ParseError(path + ": truncated payload");
    if (in.peek() != std::ifstream::traits_type::eof())
        throw ParseError(path + ": trailing bytes after payload");

    Matrix out(static_cast<Index>(rows), static_cast<Index>(cols));
    for (std::size_t i = 0; i < count; ++i) {
        const double value = std::bit_cast<double>(load_u64_le(payload.data() + i * 8));
        if (!std::isfinite(value))
            throw ParseError(path + ": non-finite value at row " +
                             std::to_string(i / cols + 1) + ", column " +
                             std::to_string(i % cols + 1));
        out(static_cast<Index>(i / cols), static_cast<Index>(i % cols)) = value;
    }
    return out;
}

} // namespace detail

// Row-major matrix of finite reals. CSV: headerless, comma-separated
// decimals. Raw: two little-endian uint64 dimensions (rows, cols) followed
// by little-endian 8-byte floats in row-major order.
inline Matrix load_matrix(const MatrixFile& file) {
    return file.format == MatrixFormat::Csv ? detail::load_matrix_csv(file.path)
                                            : detail::load_matrix_raw(file.path);
}

inline Matrix load_matrix(const std::string& path) {
    return load_matrix({path, infer_format(path)});
}

inline void save_matrix(const Matrix& m, const MatrixFile& file) {
    if (m.rows() < 1 || m.cols() < 1)
        throw ArgumentError("save_matrix: empty matrix");

    if (file.format == MatrixFormat::Csv) {
        std::ofstream out(file.path);
        if (!out)
            throw DataError(file.path + ": cannot open for writing");
        for (Index r = 0; r < m.rows(); ++r) {
            for (Index c = 0; c < m.cols(); ++c) {
                if (c > 0)
                    out << ',';
                out << format_double(m(r, c));
            }
            out << '\n';
        }
        if (!out)
            throw DataError(file.path + ": write failed");
        return;
    }

    std::ofstream out(file.path, std::ios::binary);
    if (!out)
        throw DataError(file.path + ": cannot open for writing");
    unsigned char buf[8];
    detail::store_u64_le(static_cast<std::uint64_t>(m.rows()), buf);
    out.write(reinterpret_cast<const char*>(buf), 8);
    detail::store_u64_le(static_cast<std::uint64_t>(m.cols()), buf);
    out.write(reinterpret_cast<const char*>(buf), 8);
    for (Index r = 0; r < m.rows(); ++r)
        for (Index c = 0; c < m.cols(); ++c) {
            detail::store_u64_le(std::bit_cast<std::uint64_t>(m(r, c)), buf);
            out.write(reinterpret_cast<const char*>(buf), 8);
        }
    if (!out)
        throw DataError(file.path + ": write failed");
}

inline void save_matrix(const Matrix& m, const std::string& path) {
    save_matrix(m, {path, infer_format(path)});
}

// Scales every row to unit Euclidean norm; the similarity criterion then
// measures cosine alignment between data rows and their reconstructions.
inline Matrix normalize_rows(const Matrix& x) {
    Matrix out = x;
    for (Index r = 0; r < out.rows(); ++r) {
        const double norm = out.row(r).norm();
        if (norm == 0.0)
            throw DataError("normalize_rows: row " + std::to_string(r) + " has zero norm");
        out.row(r) /= norm;
    }
    return out;
}

enum class LayoutKind { Grid, Normal, Uniform };

struct VisLayout {
    LayoutKind kind = LayoutKind::Grid;
    Index dims = 2;
    double extent = 1.0;
};

// Smallest side with side^dims >= n.
inline Index grid_side(Index n, Index dims) {
    if (n < 1 || dims < 1)
        throw ArgumentError("grid_side: n and dims must be >= 1");
    for (Index side = 1;; ++side) {
        long long power = 1;
        for (Index d = 0; d < dims; ++d) {
            power *= side;
            if (power >= n)
                return side;  // partial product suffices: the full power only grows
        }
    }
}

// Deterministic coordinates for n visualization positions. Grid: evenly
// spaced points covering [-extent, extent]^dims, row-major lexicographic
// with dimension 0 varying slowest, truncated to n; ignores the seed.
// Normal: entries drawn N(0, extent^2). Uniform: entries in [-extent, extent].
inline Matrix make_layout(const VisLayout& layout, Index n, std::uint64_t seed) {
    if (n < 1)
        throw ArgumentError("make_layout: need at least one point");
    if (layout.dims < 1)
        throw ArgumentError("make_layout: dims must be >= 1");
    if (!(layout.extent > 0.0))
        throw ArgumentError("make_layout: extent must be positive");

    Matrix out(n, layout.dims);
    if (layout.kind == LayoutKind::Grid) {
        const Index side = grid_side(n, layout.dims);
        for (Index p = 0; p < n; ++p) {
            Index rest = p;
            for (Index d = layout.dims - 1; d >= 0; --d) {
                const Index digit = rest % side;
                rest /= side;
                out(p, d) = side == 1 ? 0.0
                                      : -layout.extent + 2.0 * layout.extent *
                                                             static_cast<double>(digit) /
                                                             static_cast<double>(side - 1);
            }
        }
        return out;
    }

    std::mt19937_64 rng(seed);
    if (layout.kind == LayoutKind::Normal) {
        std::normal_distribution<double> dist(0.0, layout.extent);
        for (Index r = 0; r < n; ++r)
            for (Index c = 0; c < layout.dims; ++c)
                out(r, c) = dist(rng);
    } else {
        std::uniform_real_distribution<double> dist(-layout.extent, layout.extent);
        for (Index r = 0; r < n; ++r)
            for (Index c = 0; c < layout.dims; ++c)
                out(r, c) = dist(rng);
    }
    return out;
}

struct ShuffleResult {
    Matrix rows;
    std::vector<Index> perm;  // rows.row(i) == input.row(perm[i]); ground truth for scoring
};

// Fisher-Yates with an explicit generator so the permutation is reproducible
// bit-for-bit on a given platform.
inline ShuffleResult shuffle_rows(const Matrix& x, std::uint64_t seed) {
    ShuffleResult result;
    result.perm.resize(static_cast<std::size_t>(x.rows()));
    std::iota(result.perm.begin(), result.perm.end(), Index{0});

    std::mt19937_64 rng(seed);
    for (Index i = x.rows() - 1; i > 0; --i) {
        std::uniform_int_distribution<Index> pick(0, i);
        std::swap(result.perm[static_cast<std::size_t>(i)],
                  result.perm[static_cast<std::size_t>(pick(rng))]);
    }

    result.rows.resize(x.rows(), x.cols());
    for (Index i = 0; i < x.rows(); ++i)
        result.rows.row(i) = x.row(result.perm[static_cast<std::size_t>(i)]);
    return result;
}

// k-dimensional indicator rows; class codes carry unit norm by construction.
inline Matrix one_hot(const std::vector<long>& labels, Index k) {
    if (labels.empty())
        throw ArgumentError("one_hot: empty label sequence");
    if (k < 1)
        throw ArgumentError("one_hot: class count must be >= 1");
    Matrix out = Matrix::Zero(static_cast<Index>(labels.size()), k);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] < 0 || labels[i] >= k)
            throw ArgumentError("one_hot: label " + std::to_string(labels[i]) + " at row " +
                                std::to_string(i) + " outside [0, " + std::to_string(k) + ")");
        out(static_cast<Index>(i), static_cast<Index>(labels[i])) = 1.0;
    }
    return out;
}

// One integer label per line.
inline std::vector<long> load_labels(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ParseError(path + ": cannot open file");
    std::vector<long> labels;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        labels.push_back(detail::parse_long(line, path, line_no, 1));
    }
    if (labels.empty())
        throw ParseError(path + ": empty label file");
    return labels;
}

// Two integer columns per line; a leading non-numeric header line is
// skipped, so previously written order files load back directly.
inline std::vector<std::pair<Index, Index>> load_index_pairs(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ParseError(path + ": cannot open file");
    std::vector<std::pair<Index, Index>> pairs;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view trimmed = detail::trim(line);
        if (line_no == 1 && !trimmed.empty() && (trimmed[0] < '0' || trimmed[0] > '9') &&
            trimmed[0] != '-')
            continue;  // header
        const auto fields = detail::split_fields(line);
        if (fields.size() != 2)
            throw ParseError(path + ":" + std::to_string(line_no) + ": expected 2 fields, found " +
                             std::to_string(fields.size()));
        pairs.emplace_back(detail::parse_long(fields[0], path, line_no, 1),
                           detail::parse_long(fields[1], path, line_no, 2));
    }
    if (pairs.empty())
        throw ParseError(path + ": no index pairs");
    return pairs;
}

inline void save_order_csv(const std::string& path,
                           const std::vector<std::pair<Index, Index>>& rows) {
    std::ofstream out(path);
    if (!out)
        throw DataError(path + ": cannot open for writing");
    out << "position,sample_index\n";
    for (const auto& [position, sample] : rows)
        out << position << ',' << sample << '\n';
    if (!out)
        throw DataError(path + ": write failed");
}

} // namespace elmvis
