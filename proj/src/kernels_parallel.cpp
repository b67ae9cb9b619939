#include <cmath>
#include <cstdint>
#include <vector>

#include "icl/kernels.hpp"
#include "kernels_detail.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace icl::kernels {

namespace parallel {

void cosine_scores(MatrixView m, std::span<const std::size_t> rows,
                   std::span<const double> query, std::span<double> out) {
    detail::check_dims(m, query, "cosine_scores");
    const double qn = icl::detail::squared_norm(query);
    if (qn == 0.0) {
        throw DataError("zero-norm query vector");
    }
    const auto n = static_cast<std::int64_t>(rows.size());
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) {
        out[i] = detail::cosine_or_nan(m.row(rows[i]), query, qn);
    }
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (std::isnan(out[i])) {
            detail::throw_zero_norm(rows, out);
        }
    }
}

void euclidean_distances(MatrixView m, std::span<const std::size_t> rows,
                         std::span<const double> point, std::span<double> out) {
    detail::check_dims(m, point, "euclidean_distances");
    const auto n = static_cast<std::int64_t>(rows.size());
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) {
        out[i] = detail::euclidean(m.row(rows[i]), point);
    }
}

double pairwise_cosine_distance_mean(MatrixView m, std::span<const std::size_t> rows) {
    if (rows.size() < 2) {
        throw DataError("pairwise cosine distance needs at least 2 vectors");
    }
    // One partial slot per i; the final combine is serial in ascending i so
    // the result matches the serial kernel for any thread count.
    std::vector<double> partials(rows.size() - 1, 0.0);
    const auto n = static_cast<std::int64_t>(partials.size());
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t i = 0; i < n; ++i) {
        partials[i] = detail::pairwise_partial_or_nan(m, rows, static_cast<std::size_t>(i));
    }
    double total = 0.0;
    for (const double partial : partials) {
        if (std::isnan(partial)) {
            throw DataError("zero-norm embedding in pairwise distance");
        }
        total += partial;
    }
    const double count = static_cast<double>(rows.size());
    return total / (count * (count - 1.0) / 2.0);
}

} // namespace parallel

namespace {

// Scans smaller than this run serially; fork/join overhead dominates below it.
constexpr std::size_t kParallelThreshold = 1u << 14;

bool use_parallel(std::size_t work_items) {
#ifdef _OPENMP
    return work_items >= kParallelThreshold;
#else
    (void)work_items;
    return false;
#endif
}

} // namespace

bool openmp_enabled() {
#ifdef _OPENMP
    return true;
#else
    return false;
#endif
}

void cosine_scores(MatrixView m, std::span<const std::size_t> rows,
                   std::span<const double> query, std::span<double> out) {
    if (use_parallel(rows.size() * m.dim)) {
        parallel::cosine_scores(m, rows, query, out);
    } else {
        serial::cosine_scores(m, rows, query, out);
    }
}

void euclidean_distances(MatrixView m, std::span<const std::size_t> rows,
                         std::span<const double> point, std::span<double> out) {
    if (use_parallel(rows.size() * m.dim)) {
        parallel::euclidean_distances(m, rows, point, out);
    } else {
        serial::euclidean_distances(m, rows, point, out);
    }
}

double pairwise_cosine_distance_mean(MatrixView m, std::span<const std::size_t> rows) {
    const std::size_t pairs = rows.size() < 2 ? 0 : rows.size() * (rows.size() - 1) / 2;
    if (use_parallel(pairs * m.dim)) {
        return parallel::pairwise_cosine_distance_mean(m, rows);
    }
    return serial::pairwise_cosine_distance_mean(m, rows);
}

} // namespace icl::kernels
