#include <cmath>

#include "icl/kernels.hpp"
#include "kernels_detail.hpp"

namespace icl::kernels::serial {

void cosine_scores(MatrixView m, std::span<const std::size_t> rows,
                   std::span<const double> query, std::span<double> out) {
    detail::check_dims(m, query, "cosine_scores");
    const double qn = icl::detail::squared_norm(query);
    if (qn == 0.0) {
        throw DataError("zero-norm query vector");
    }
    for (std::size_t i = 0; i < rows.size(); ++i) {
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
    for (std::size_t i = 0; i < rows.size(); ++i) {
        out[i] = detail::euclidean(m.row(rows[i]), point);
    }
}

double pairwise_cosine_distance_mean(MatrixView m, std::span<const std::size_t> rows) {
    if (rows.size() < 2) {
        throw DataError("pairwise cosine distance needs at least 2 vectors");
    }
    // Partials are combined in ascending i so the parallel lane can match.
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
        const double partial = detail::pairwise_partial_or_nan(m, rows, i);
        if (std::isnan(partial)) {
            throw DataError("zero-norm embedding in pairwise distance");
        }
        total += partial;
    }
    const double n = static_cast<double>(rows.size());
    return total / (n * (n - 1.0) / 2.0);
}

} // namespace icl::kernels::serial
