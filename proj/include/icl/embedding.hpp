#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace icl {

namespace detail {

// The batch kernels reuse these accumulation loops verbatim so that scanning
// a matrix and scoring one pair produce bit-identical doubles.
inline double dot(std::span<const double> a, std::span<const double> b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        acc += a[i] * b[i];
    }
    return acc;
}

inline double squared_norm(std::span<const double> a) {
    double acc = 0.0;
    for (const double v : a) {
        acc += v * v;
    }
    return acc;
}

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
    }
    return acc;
}

} // namespace detail

/// Cosine similarity, clamped to [-1, 1] to absorb rounding. Throws DataError
/// on dimension mismatch or a zero-norm argument.
double cosine_similarity(std::span<const double> a, std::span<const double> b);

/// Componentwise mean of a non-empty set of same-dimension vectors.
std::vector<double> centroid(const std::vector<std::span<const double>>& vs);

/// L2 distance. Throws DataError on dimension mismatch.
double euclidean_distance(std::span<const double> a, std::span<const double> b);

/// Immutable id -> vector map stored as one row-major matrix of doubles.
/// Safe for unlimited concurrent readers once built.
class EmbeddingStore {
public:
    EmbeddingStore() = default;

    /// Builds a store from parallel id/row data. `data` is row-major with
    /// `ids.size() * dim` entries; components must be finite.
    static EmbeddingStore make(std::size_t dim, std::vector<std::string> ids,
                               std::vector<double> data);

    /// Loads either on-disk format (binary is detected by its magic bytes)
    /// and keeps exactly `expected_ids`; extra entries are dropped with a
    /// warning, missing ones are an error.
    static EmbeddingStore load(const std::string& path,
                               const std::vector<std::string>& expected_ids,
                               bool normalize = false);

    std::size_t dim() const { return dim_; }
    std::size_t size() const { return ids_.size(); }
    bool contains(const std::string& id) const { return row_of_.count(id) != 0; }

    /// Throws DataError naming the id when absent.
    std::span<const double> vector_of(const std::string& id) const;
    std::size_t row_index(const std::string& id) const;

    const std::string& id_at(std::size_t row) const { return ids_[row]; }
    std::span<const double> row(std::size_t r) const {
        return {data_.data() + r * dim_, dim_};
    }
    const double* data() const { return data_.data(); }

    /// Scales every vector to unit norm. Throws DataError on a zero vector.
    void normalize();

    void write_text(std::ostream& out) const;
    void write_binary(std::ostream& out) const;

private:
    std::size_t dim_ = 0;
    std::vector<double> data_;
    std::vector<std::string> ids_;
    std::unordered_map<std::string, std::size_t> row_of_;
};

} // namespace icl
