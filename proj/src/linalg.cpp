#include "coact/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace coact {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

SvdResult svd_right(const Matrix& x) {
    // Work on columns of A = x when rows >= cols, else columns of x^T, so the
    // Jacobi sweep always orthogonalizes the smaller side.
    const bool transposed = x.rows < x.cols;
    const std::size_t m = transposed ? x.cols : x.rows;  // tall dimension
    const std::size_t n = transposed ? x.rows : x.cols;  // columns being rotated

    // a: m x n column-major working copy
    std::vector<std::vector<double>> a(n, std::vector<double>(m, 0.0));
    for (std::size_t r = 0; r < x.rows; ++r)
        for (std::size_t c = 0; c < x.cols; ++c) {
            if (transposed)
                a[r][c] = x(r, c);
            else
                a[c][r] = x(r, c);
        }

    // v accumulates rotations: n x n, starts as identity
    std::vector<std::vector<double>> v(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) v[i][i] = 1.0;

    const int max_sweeps = 60;
    const double eps = 1e-13;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double alpha = dot(a[p], a[p]);
                const double beta = dot(a[q], a[q]);
                const double gamma = dot(a[p], a[q]);
                if (std::fabs(gamma) <= eps * std::sqrt(alpha * beta) || gamma == 0.0) continue;
                off = std::max(off, std::fabs(gamma) / std::sqrt(std::max(alpha * beta, 1e-300)));
                const double zeta = (beta - alpha) / (2.0 * gamma);
                const double t = (zeta >= 0.0 ? 1.0 : -1.0) /
                                 (std::fabs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;
                for (std::size_t i = 0; i < m; ++i) {
                    const double ap = a[p][i];
                    a[p][i] = c * ap - s * a[q][i];
                    a[q][i] = s * ap + c * a[q][i];
                }
                for (std::size_t i = 0; i < n; ++i) {
                    const double vp = v[p][i];
                    v[p][i] = c * vp - s * v[q][i];
                    v[q][i] = s * vp + c * v[q][i];
                }
            }
        }
        if (off < 1e-14) break;
    }

    // singular values = column norms; the rotated columns of V span the
    // right (if !transposed) or left-as-right (if transposed) space
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> sigma(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) sigma[i] = norm(a[i]);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return sigma[i] > sigma[j]; });

    SvdResult out;
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t idx = order[k];
        std::vector<double> vec;
        if (transposed) {
            // A^T = U S V^T with our V = right vectors of x^T = left of x;
            // right vectors of x are the normalized rotated columns
            if (sigma[idx] > 0.0) {
                vec = a[idx];
                for (double& e : vec) e /= sigma[idx];
            } else {
                vec.assign(m, 0.0);
            }
        } else {
            vec = v[idx];
        }
        // canonical sign: largest-magnitude entry positive
        double best = 0.0;
        for (double e : vec)
            if (std::fabs(e) > std::fabs(best)) best = e;
        if (best < 0.0)
            for (double& e : vec) e = -e;
        out.right_vectors.push_back(std::move(vec));
        out.singular_values.push_back(sigma[idx]);
    }
    return out;
}

std::vector<double> orthonormal_complement_vector(const std::vector<std::vector<double>>& basis,
                                                  std::size_t dim) {
    for (std::size_t e = 0; e < dim; ++e) {
        std::vector<double> cand(dim, 0.0);
        cand[e] = 1.0;
        for (const auto& b : basis) {
            const double proj = dot(cand, b);
            for (std::size_t i = 0; i < dim; ++i) cand[i] -= proj * b[i];
        }
        const double len = norm(cand);
        if (len > 1e-9) {
            for (double& e2 : cand) e2 /= len;
            return cand;
        }
    }
    throw std::invalid_argument("orthonormal_complement_vector: basis already spans the space");
}

}  // namespace coact
