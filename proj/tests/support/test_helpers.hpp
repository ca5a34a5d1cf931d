#pragma once

// Independent reference computations used as test oracles. These deliberately
// avoid the library's own solve/projection paths.

#include "attdet/matcore.hpp"
#include "attdet/measurements.hpp"

#include <cmath>
#include <random>
#include <utility>

namespace testsupport {

using attdet::Index;
using attdet::Mat;
using attdet::Vec;

// Cyclic Jacobi eigensolver for symmetric matrices; returns (values, vectors)
// with columns as eigenvectors, unsorted.
inline std::pair<Vec, Mat> jacobi_eigs(Mat A, int sweeps = 64) {
    const Index n = A.rows();
    Mat V = Mat::Identity(n, n);
    for (int sweep = 0; sweep < sweeps; ++sweep) {
        double off = 0.0;
        for (Index p = 0; p < n; ++p) {
            for (Index q = p + 1; q < n; ++q) off += A(p, q) * A(p, q);
        }
        if (off < 1e-28 * A.squaredNorm()) break;
        for (Index p = 0; p < n; ++p) {
            for (Index q = p + 1; q < n; ++q) {
                if (std::abs(A(p, q)) < 1e-300) continue;
                const double theta = 0.5 * std::atan2(2.0 * A(p, q), A(q, q) - A(p, p));
                const double c = std::cos(theta);
                const double s = std::sin(theta);
                Mat G = Mat::Identity(n, n);
                G(p, p) = c;
                G(q, q) = c;
                G(p, q) = s;
                G(q, p) = -s;
                A = G.transpose() * A * G;
                V = V * G;
            }
        }
    }
    return {A.diagonal(), V};
}

inline std::pair<double, Vec> jacobi_min_eig(const Mat& S) {
    auto [vals, vecs] = jacobi_eigs(0.5 * (S + S.transpose()));
    Index best = 0;
    for (Index i = 1; i < vals.size(); ++i) {
        if (vals(i) < vals(best)) best = i;
    }
    return {vals(best), vecs.col(best)};
}

// Kabsch/Procrustes reference for the weighted Wahba problem: the rotation
// maximizing sum w_i b_i^T R r_i from the SVD of the weighted cross-moment.
inline Mat kabsch_rotation(const attdet::MeasurementSet& ms) {
    const Index n = ms.n;
    Mat cross = Mat::Zero(n, n);
    for (const attdet::VectorPair& p : ms.vectors) {
        cross += p.w * p.b * p.r.transpose();
    }
    Eigen::JacobiSVD<Mat> svd(cross, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Vec d = Vec::Ones(n);
    d(n - 1) = (svd.matrixU() * svd.matrixV().transpose()).determinant() >= 0.0 ? 1.0 : -1.0;
    return svd.matrixU() * d.asDiagonal() * svd.matrixV().transpose();
}

// Stacked dense least squares over the raw overdetermined system; the
// reference route for the closed-form normal-equation solution.
inline Vec stacked_least_squares(const attdet::MeasurementSet& ms) {
    const Index n = ms.n;
    const Index n2 = n * n;
    const Index rows =
        static_cast<Index>(ms.vectors.size()) * n + static_cast<Index>(ms.handeyes.size()) * n2;
    Mat S(rows, n2);
    Vec t = Vec::Zero(rows);
    Index at = 0;
    const Mat eye = Mat::Identity(n, n);
    for (const attdet::VectorPair& p : ms.vectors) {
        const double sw = std::sqrt(p.w);
        S.middleRows(at, n) = sw * attdet::kron(p.r.transpose(), eye);
        t.segment(at, n) = sw * p.b;
        at += n;
    }
    for (const attdet::HandEyePair& p : ms.handeyes) {
        const double sv = std::sqrt(p.v);
        // rows of vec(A X - X B) viewed as a map on vec(X)
        S.middleRows(at, n2) =
            sv * (attdet::kron(eye, p.A) - attdet::kron(p.B.transpose(), eye));
        at += n2;
    }
    return S.colPivHouseholderQr().solve(t);
}

inline Mat random_matrix(Index rows, Index cols, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Mat X(rows, cols);
    for (Index i = 0; i < rows; ++i) {
        for (Index j = 0; j < cols; ++j) X(i, j) = gauss(rng);
    }
    return X;
}

}  // namespace testsupport
