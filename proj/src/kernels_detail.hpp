#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>

#include "icl/embedding.hpp"
#include "icl/errors.hpp"
#include "icl/kernels.hpp"

// Per-element bodies shared by the serial and OpenMP lanes. Keeping the
// arithmetic in one place is what makes the two lanes bit-identical.
namespace icl::kernels::detail {

// NaN marks a zero-norm row; the caller turns it into an error outside any
// parallel region (throwing from inside an omp loop would terminate).
inline double cosine_or_nan(std::span<const double> v, std::span<const double> query,
                            double query_sqnorm) {
    const double dot = icl::detail::dot(query, v);
    const double nv = icl::detail::squared_norm(v);
    if (nv == 0.0 || query_sqnorm == 0.0) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    return std::clamp(dot / (std::sqrt(query_sqnorm) * std::sqrt(nv)), -1.0, 1.0);
}

inline double euclidean(std::span<const double> v, std::span<const double> point) {
    return std::sqrt(icl::detail::squared_distance(point, v));
}

// Partial pairwise sum for row i: sum_{j>i} (1 - cos(row_i, row_j)).
inline double pairwise_partial_or_nan(MatrixView m, std::span<const std::size_t> rows,
                                      std::size_t i) {
    const auto vi = m.row(rows[i]);
    const double ni = icl::detail::squared_norm(vi);
    if (ni == 0.0) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    double acc = 0.0;
    for (std::size_t j = i + 1; j < rows.size(); ++j) {
        const auto vj = m.row(rows[j]);
        const double nj = icl::detail::squared_norm(vj);
        if (nj == 0.0) {
            return std::numeric_limits<double>::quiet_NaN();
        }
        const double sim = std::clamp(
            icl::detail::dot(vi, vj) / (std::sqrt(ni) * std::sqrt(nj)), -1.0, 1.0);
        acc += 1.0 - sim;
    }
    return acc;
}

inline void check_dims(MatrixView m, std::span<const double> v, const char* what) {
    if (v.size() != m.dim) {
        throw DataError(std::string(what) + ": dimension mismatch: " +
                        std::to_string(v.size()) + " vs " + std::to_string(m.dim));
    }
}

[[noreturn]] inline void throw_zero_norm(std::span<const std::size_t> rows,
                                         std::span<const double> out) {
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (std::isnan(out[i])) {
            throw DataError("zero-norm embedding at row " + std::to_string(rows[i]));
        }
    }
    throw DataError("zero-norm embedding");
}

} // namespace icl::kernels::detail
