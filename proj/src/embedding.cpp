#include "icl/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iostream>
#include <ostream>
#include <unordered_set>

#include <json.hpp>

#include "icl/errors.hpp"

namespace icl {

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr char kBinaryMagic[4] = {'I', 'C', 'L', 'E'};

void require_same_dim(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw DataError("vector dimension mismatch: " + std::to_string(a.size()) +
                        " vs " + std::to_string(b.size()));
    }
}

std::uint32_t read_u32(std::istream& in) {
    unsigned char buf[4];
    in.read(reinterpret_cast<char*>(buf), 4);
    return static_cast<std::uint32_t>(buf[0]) | (static_cast<std::uint32_t>(buf[1]) << 8) |
           (static_cast<std::uint32_t>(buf[2]) << 16) | (static_cast<std::uint32_t>(buf[3]) << 24);
}

std::uint16_t read_u16(std::istream& in) {
    unsigned char buf[2];
    in.read(reinterpret_cast<char*>(buf), 2);
    return static_cast<std::uint16_t>(buf[0] | (buf[1] << 8));
}

void write_u32(std::ostream& out, std::uint32_t v) {
    const unsigned char buf[4] = {
        static_cast<unsigned char>(v & 0xFF),
        static_cast<unsigned char>((v >> 8) & 0xFF),
        static_cast<unsigned char>((v >> 16) & 0xFF),
        static_cast<unsigned char>((v >> 24) & 0xFF),
    };
    out.write(reinterpret_cast<const char*>(buf), 4);
}

void write_u16(std::ostream& out, std::uint16_t v) {
    const unsigned char buf[2] = {
        static_cast<unsigned char>(v & 0xFF),
        static_cast<unsigned char>((v >> 8) & 0xFF),
    };
    out.write(reinterpret_cast<const char*>(buf), 2);
}

float read_f32(std::istream& in) {
    const std::uint32_t bits = read_u32(in);
    float f;
    std::memcpy(&f, &bits, sizeof(f));
    return f;
}

void write_f32(std::ostream& out, float f) {
    std::uint32_t bits;
    std::memcpy(&bits, &f, sizeof(bits));
    write_u32(out, bits);
}

struct RawEntry {
    std::string id;
    std::vector<double> values;
};

std::vector<RawEntry> read_text_entries(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open embeddings file: " + path);
    }
    std::vector<RawEntry> entries;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        bool blank = true;
        for (const char c : line) {
            if (!std::isspace(static_cast<unsigned char>(c))) {
                blank = false;
                break;
            }
        }
        if (blank) {
            continue;
        }
        ordered_json record;
        try {
            record = ordered_json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw DataError(path + ":" + std::to_string(line_no) +
                            ": malformed embedding record: " + e.what());
        }
        if (!record.is_object() || !record.contains("id") || !record.contains("vector")) {
            throw DataError(path + ":" + std::to_string(line_no) +
                            ": expected an object with \"id\" and \"vector\"");
        }
        RawEntry entry;
        if (!record["id"].is_string()) {
            throw DataError(path + ":" + std::to_string(line_no) + ": \"id\" must be a string");
        }
        entry.id = record["id"].get<std::string>();
        const auto& vec = record["vector"];
        if (!vec.is_array() || vec.empty()) {
            throw DataError(path + ":" + std::to_string(line_no) +
                            ": \"vector\" must be a non-empty array");
        }
        entry.values.reserve(vec.size());
        for (const auto& v : vec) {
            if (!v.is_number()) {
                throw DataError(path + ":" + std::to_string(line_no) +
                                ": non-numeric vector component for id \"" + entry.id + "\"");
            }
            entry.values.push_back(v.get<double>());
        }
        entries.push_back(std::move(entry));
    }
    return entries;
}

std::vector<RawEntry> read_binary_entries(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError("cannot open embeddings file: " + path);
    }
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kBinaryMagic, 4) != 0) {
        throw DataError(path + ": bad magic bytes, not an embedding file");
    }
    const std::uint32_t dim = read_u32(in);
    const std::uint32_t count = read_u32(in);
    if (!in || dim == 0) {
        throw DataError(path + ": invalid header");
    }
    std::vector<RawEntry> entries;
    entries.reserve(count);
    for (std::uint32_t r = 0; r < count; ++r) {
        const std::uint16_t id_len = read_u16(in);
        std::string id(id_len, '\0');
        in.read(id.data(), id_len);
        RawEntry entry;
        entry.id = std::move(id);
        entry.values.reserve(dim);
        for (std::uint32_t d = 0; d < dim; ++d) {
            entry.values.push_back(static_cast<double>(read_f32(in)));
        }
        if (!in) {
            throw DataError(path + ": truncated at record " + std::to_string(r));
        }
        entries.push_back(std::move(entry));
    }
    return entries;
}

bool sniff_binary(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError("cannot open embeddings file: " + path);
    }
    char magic[4] = {0, 0, 0, 0};
    in.read(magic, 4);
    return in && std::memcmp(magic, kBinaryMagic, 4) == 0;
}

} // namespace

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
    require_same_dim(a, b);
    const double dot_ab = detail::dot(a, b);
    const double na = detail::squared_norm(a);
    const double nb = detail::squared_norm(b);
    if (na == 0.0 || nb == 0.0) {
        throw DataError("zero-norm vector in cosine similarity");
    }
    const double sim = dot_ab / (std::sqrt(na) * std::sqrt(nb));
    return std::clamp(sim, -1.0, 1.0);
}

std::vector<double> centroid(const std::vector<std::span<const double>>& vs) {
    if (vs.empty()) {
        throw DataError("centroid of an empty set");
    }
    const std::size_t dim = vs.front().size();
    std::vector<double> mean(dim, 0.0);
    for (const auto& v : vs) {
        if (v.size() != dim) {
            throw DataError("vector dimension mismatch in centroid");
        }
        for (std::size_t i = 0; i < dim; ++i) {
            mean[i] += v[i];
        }
    }
    const double inv = 1.0 / static_cast<double>(vs.size());
    for (double& m : mean) {
        m *= inv;
    }
    return mean;
}

double euclidean_distance(std::span<const double> a, std::span<const double> b) {
    require_same_dim(a, b);
    return std::sqrt(detail::squared_distance(a, b));
}

EmbeddingStore EmbeddingStore::make(std::size_t dim, std::vector<std::string> ids,
                                    std::vector<double> data) {
    if (dim == 0) {
        throw DataError("embedding dimension must be positive");
    }
    if (data.size() != ids.size() * dim) {
        throw DataError("embedding data size does not match ids * dim");
    }
    for (const double v : data) {
        if (!std::isfinite(v)) {
            throw DataError("non-finite embedding component");
        }
    }
    EmbeddingStore store;
    store.dim_ = dim;
    store.data_ = std::move(data);
    store.ids_ = std::move(ids);
    store.row_of_.reserve(store.ids_.size());
    for (std::size_t r = 0; r < store.ids_.size(); ++r) {
        if (!store.row_of_.emplace(store.ids_[r], r).second) {
            throw DataError("duplicate embedding id \"" + store.ids_[r] + "\"");
        }
    }
    return store;
}

EmbeddingStore EmbeddingStore::load(const std::string& path,
                                    const std::vector<std::string>& expected_ids,
                                    bool normalize) {
    const auto entries = sniff_binary(path) ? read_binary_entries(path)
                                            : read_text_entries(path);
    std::unordered_set<std::string> expected(expected_ids.begin(), expected_ids.end());

    std::size_t dim = 0;
    std::vector<std::string> ids;
    std::vector<double> data;
    std::unordered_set<std::string> kept;
    std::size_t dropped = 0;
    for (const auto& entry : entries) {
        if (dim == 0) {
            dim = entry.values.size();
        } else if (entry.values.size() != dim) {
            throw DataError(path + ": inconsistent dimension for id \"" + entry.id +
                            "\": " + std::to_string(entry.values.size()) + " vs " +
                            std::to_string(dim));
        }
        if (expected.find(entry.id) == expected.end()) {
            ++dropped;
            continue;
        }
        if (!kept.insert(entry.id).second) {
            throw DataError(path + ": duplicate embedding id \"" + entry.id + "\"");
        }
        for (const double v : entry.values) {
            if (!std::isfinite(v)) {
                throw DataError(path + ": non-finite component for id \"" + entry.id + "\"");
            }
        }
        ids.push_back(entry.id);
        data.insert(data.end(), entry.values.begin(), entry.values.end());
    }
    if (dropped > 0) {
        std::cerr << "warning: " << path << ": ignored " << dropped
                  << " embedding entr" << (dropped == 1 ? "y" : "ies")
                  << " not referenced by the run\n";
    }
    if (kept.size() != expected.size()) {
        std::string missing;
        std::size_t missing_count = 0;
        std::unordered_set<std::string> reported;
        for (const auto& id : expected_ids) {
            if (kept.find(id) == kept.end() && reported.insert(id).second) {
                ++missing_count;
                if (missing_count <= 5) {
                    if (!missing.empty()) {
                        missing += ", ";
                    }
                    missing += "\"" + id + "\"";
                }
            }
        }
        throw DataError(path + ": missing embeddings for " + std::to_string(missing_count) +
                        " id(s): " + missing + (missing_count > 5 ? ", ..." : ""));
    }
    auto store = make(dim, std::move(ids), std::move(data));
    if (normalize) {
        store.normalize();
    }
    return store;
}

std::span<const double> EmbeddingStore::vector_of(const std::string& id) const {
    return row(row_index(id));
}

std::size_t EmbeddingStore::row_index(const std::string& id) const {
    const auto it = row_of_.find(id);
    if (it == row_of_.end()) {
        throw DataError("no embedding for id \"" + id + "\"");
    }
    return it->second;
}

void EmbeddingStore::normalize() {
    for (std::size_t r = 0; r < ids_.size(); ++r) {
        double* v = data_.data() + r * dim_;
        const double nsq = detail::squared_norm({v, dim_});
        if (nsq == 0.0) {
            throw DataError("cannot normalize zero vector for id \"" + ids_[r] + "\"");
        }
        const double inv = 1.0 / std::sqrt(nsq);
        for (std::size_t i = 0; i < dim_; ++i) {
            v[i] *= inv;
        }
    }
}

void EmbeddingStore::write_text(std::ostream& out) const {
    for (std::size_t r = 0; r < ids_.size(); ++r) {
        ordered_json record;
        record["id"] = ids_[r];
        record["vector"] = std::vector<double>(data_.begin() + r * dim_,
                                               data_.begin() + (r + 1) * dim_);
        out << record.dump() << '\n';
    }
}

void EmbeddingStore::write_binary(std::ostream& out) const {
    out.write(kBinaryMagic, 4);
    write_u32(out, static_cast<std::uint32_t>(dim_));
    write_u32(out, static_cast<std::uint32_t>(ids_.size()));
    for (std::size_t r = 0; r < ids_.size(); ++r) {
        if (ids_[r].size() > 0xFFFF) {
            throw DataError("embedding id too long for binary format: \"" + ids_[r] + "\"");
        }
        write_u16(out, static_cast<std::uint16_t>(ids_[r].size()));
        out.write(ids_[r].data(), static_cast<std::streamsize>(ids_[r].size()));
        for (std::size_t i = 0; i < dim_; ++i) {
            write_f32(out, static_cast<float>(data_[r * dim_ + i]));
        }
    }
}

} // namespace icl
