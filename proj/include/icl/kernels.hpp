#pragma once

#include <cstddef>
#include <span>

namespace icl::kernels {

/// Non-owning row-major view over an embedding matrix.
struct MatrixView {
    const double* data = nullptr;
    std::size_t rows = 0;
    std::size_t dim = 0;

    std::span<const double> row(std::size_t r) const { return {data + r * dim, dim}; }
};

// Serial reference kernels. These are the ground truth the parallel lane is
// tested against, and the fallback when OpenMP is unavailable. Each output
// element is produced by one fixed-order accumulation, so the parallel lane
// can reproduce results bit for bit.
namespace serial {

/// out[i] = clamped cosine similarity between `query` and m.row(rows[i]).
/// Throws DataError naming the row on a zero-norm vector.
void cosine_scores(MatrixView m, std::span<const std::size_t> rows,
                   std::span<const double> query, std::span<double> out);

/// out[i] = L2 distance between m.row(rows[i]) and `point`.
void euclidean_distances(MatrixView m, std::span<const std::size_t> rows,
                         std::span<const double> point, std::span<double> out);

/// Mean over unordered pairs of (1 - cosine similarity); needs >= 2 rows.
double pairwise_cosine_distance_mean(MatrixView m, std::span<const std::size_t> rows);

} // namespace serial

// OpenMP lane. Parallelism is across output slots only (one writer per slot,
// inner accumulations stay serial), so results are identical to the serial
// kernels for any thread count.
namespace parallel {

void cosine_scores(MatrixView m, std::span<const std::size_t> rows,
                   std::span<const double> query, std::span<double> out);
void euclidean_distances(MatrixView m, std::span<const std::size_t> rows,
                         std::span<const double> point, std::span<double> out);
double pairwise_cosine_distance_mean(MatrixView m, std::span<const std::size_t> rows);

} // namespace parallel

// Dispatchers: pick the parallel lane for scans large enough to amortize the
// fork/join cost, the serial lane otherwise. Output is identical either way.
void cosine_scores(MatrixView m, std::span<const std::size_t> rows,
                   std::span<const double> query, std::span<double> out);
void euclidean_distances(MatrixView m, std::span<const std::size_t> rows,
                         std::span<const double> point, std::span<double> out);
double pairwise_cosine_distance_mean(MatrixView m, std::span<const std::size_t> rows);

/// True when the library was compiled with OpenMP support.
bool openmp_enabled();

} // namespace icl::kernels
