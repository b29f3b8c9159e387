#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace coact {

// Dense row-major matrix, just enough for the analyses here.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

    double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

    std::vector<double> row(std::size_t r) const {
        return std::vector<double>(data.begin() + static_cast<std::ptrdiff_t>(r * cols),
                                   data.begin() + static_cast<std::ptrdiff_t>((r + 1) * cols));
    }
};

struct SvdResult {
    // Right singular vectors as rows (each of length = input cols),
    // ordered by descending singular value. Signs canonical: the entry of
    // largest magnitude in each vector is positive.
    std::vector<std::vector<double>> right_vectors;
    std::vector<double> singular_values;
};

// Thin SVD via one-sided Jacobi; returns min(rows, cols) pairs.
// Deterministic: fixed sweep order, canonical signs, stable ordering.
SvdResult svd_right(const Matrix& x);

double dot(const std::vector<double>& a, const std::vector<double>& b);
double norm(const std::vector<double>& a);

// Extends `basis` (orthonormal rows, each of length dim) with unit vectors
// orthogonal to all previous, derived from the standard basis. Used to pad
// rank-deficient projections.
std::vector<double> orthonormal_complement_vector(const std::vector<std::vector<double>>& basis,
                                                  std::size_t dim);

}  // namespace coact
