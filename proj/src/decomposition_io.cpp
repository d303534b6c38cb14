// Copyright 2026 The relaxtyp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "relaxtyp/decomposition_io.hpp"

#include <array>
#include <cstring>
#include <fstream>

#include "relaxtyp/errors.hpp"

namespace relaxtyp {

namespace {

constexpr std::array<char, 4> kMagic{'R', 'T', 'S', 'D'};
constexpr std::uint32_t kVersion = 1;

class Fnv1a {
public:
    void bytes(const void* data, size_t n)
    {
        const auto* p = static_cast<const unsigned char*>(data);
        for (size_t i = 0; i < n; ++i) {
            state_ = (state_ ^ p[i]) * 0x100000001b3ULL;
        }
    }
    template <class T>
    void value(const T& v)
    {
        bytes(&v, sizeof(T));
    }
    void matrix(const CMatrix& m)
    {
        value(static_cast<std::int64_t>(m.rows()));
        value(static_cast<std::int64_t>(m.cols()));
        bytes(m.data(), sizeof(Complex) * static_cast<size_t>(m.size()));
    }
    std::uint64_t digest() const { return state_; }

private:
    std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

template <class T>
void put(std::ofstream& out, const T& v)
{
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
bool get(std::ifstream& in, T& v)
{
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    return static_cast<bool>(in);
}

void put_matrix(std::ofstream& out, const CMatrix& m)
{
    for (Index i = 0; i < m.rows(); ++i) {
        for (Index j = 0; j < m.cols(); ++j) {
            put(out, m(i, j));
        }
    }
}

bool get_matrix(std::ifstream& in, CMatrix& m, Index d)
{
    m.resize(d, d);
    for (Index i = 0; i < d; ++i) {
        for (Index j = 0; j < d; ++j) {
            if (!get(in, m(i, j))) {
                return false;
            }
        }
    }
    return true;
}

} // namespace

std::uint64_t model_hash(const LindbladModel& model, const DecomposeOptions& options)
{
    Fnv1a h;
    h.value(kVersion);
    h.value(static_cast<std::int64_t>(model.dim));
    h.matrix(model.hamiltonian);
    h.value(static_cast<std::int64_t>(model.jumps.size()));
    for (const auto& j : model.jumps) {
        h.matrix(j);
    }
    h.value(static_cast<std::int32_t>(options.normalization));
    h.value(static_cast<std::int64_t>(options.max_modes));
    h.value(options.zero_tol);
    h.value(static_cast<std::int32_t>(options.splitter.has_value()));
    if (options.splitter) {
        h.matrix(*options.splitter);
    }
    return h.digest();
}

void save_decomposition(const std::string& path, const SpectralDecomposition& decomp,
                        std::uint64_t hash)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error("cannot write decomposition cache " + path);
    }
    out.write(kMagic.data(), kMagic.size());
    put(out, kVersion);
    put(out, static_cast<std::int64_t>(decomp.d));
    put(out, static_cast<std::int64_t>(decomp.size()));
    put(out, static_cast<std::int32_t>(decomp.normalization));
    put(out, hash);
    for (Index k = 0; k < decomp.size(); ++k) {
        put(out, decomp.eigenvalues(k));
    }
    for (double o : decomp.condition_numbers) {
        put(out, o);
    }
    for (Index c : decomp.cluster_sizes) {
        put(out, static_cast<std::int64_t>(c));
    }
    put_matrix(out, decomp.stationary_state);
    for (Index k = 0; k < decomp.size(); ++k) {
        put_matrix(out, decomp.right_modes[static_cast<size_t>(k)]);
        put_matrix(out, decomp.left_modes[static_cast<size_t>(k)]);
    }
    if (!out) {
        throw Error("failed writing decomposition cache " + path);
    }
}

std::optional<SpectralDecomposition> load_decomposition(const std::string& path,
                                                        std::uint64_t hash)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        return std::nullopt;
    }
    std::array<char, 4> magic{};
    in.read(magic.data(), magic.size());
    std::uint32_t version = 0;
    std::int64_t d = 0;
    std::int64_t n = 0;
    std::int32_t normalization = 0;
    std::uint64_t stored = 0;
    if (!in || magic != kMagic || !get(in, version) || version != kVersion || !get(in, d) ||
        !get(in, n) || !get(in, normalization) || !get(in, stored) || stored != hash || d < 1 ||
        n < 1 || n > d * d) {
        return std::nullopt;
    }
    SpectralDecomposition out;
    out.d = d;
    out.normalization = static_cast<Normalization>(normalization);
    out.eigenvalues.resize(n);
    for (Index k = 0; k < n; ++k) {
        if (!get(in, out.eigenvalues(k))) {
            return std::nullopt;
        }
    }
    out.condition_numbers.resize(static_cast<size_t>(n));
    for (auto& o : out.condition_numbers) {
        if (!get(in, o)) {
            return std::nullopt;
        }
    }
    for (Index k = 0; k < n; ++k) {
        std::int64_t c = 0;
        if (!get(in, c)) {
            return std::nullopt;
        }
        out.cluster_sizes.push_back(c);
    }
    if (!get_matrix(in, out.stationary_state, d)) {
        return std::nullopt;
    }
    out.right_modes.resize(static_cast<size_t>(n));
    out.left_modes.resize(static_cast<size_t>(n));
    for (Index k = 0; k < n; ++k) {
        if (!get_matrix(in, out.right_modes[static_cast<size_t>(k)], d) ||
            !get_matrix(in, out.left_modes[static_cast<size_t>(k)], d)) {
            return std::nullopt;
        }
    }
    return out;
}

} // namespace relaxtyp
