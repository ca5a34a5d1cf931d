#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <random>

namespace attdet {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using Index = Eigen::Index;

// Default truncation tolerance for pseudoinverses (relative to the largest
// singular value) and the looser threshold used for rank decisions.
inline constexpr double kPinvTol = 1e-12;
inline constexpr double kRankTol = 1e-10;

/// Column-stacking vectorization: vec(X) = (x_1^T, x_2^T, ..., x_q^T)^T.
Vec vec(const Mat& X);

/// Inverse of vec. Throws std::invalid_argument on length mismatch.
Mat mat(const Vec& x, Index rows, Index cols);

/// Kronecker product X (x) Y.
Mat kron(const Mat& X, const Mat& Y);

/// Moore-Penrose pseudoinverse via SVD. Singular values below
/// rel_tol * sigma_max are treated as zero.
Mat pinv(const Mat& X, double rel_tol = kPinvTol);

/// Pseudoinverse of a symmetric PSD matrix via eigendecomposition.
/// Cheaper and stabler than SVD for normal-equation matrices.
Mat pinv_psd(const Mat& S, double rel_tol = kPinvTol);

/// Numerical rank: count of singular values >= rel_tol * sigma_max.
int numerical_rank(const Mat& X, double rel_tol = kRankTol);

struct MinEig {
    double value = 0.0;
    Vec vector;
};

/// Smallest eigenvalue and a unit eigenvector of a symmetric matrix.
/// The input is symmetrized as (S + S^T)/2 first. The eigenvector sign is
/// returned as computed; callers disambiguate it. Throws on non-square input.
MinEig min_eigvec(const Mat& S);

/// Cayley/skew parameter vector: g has length n(n-1)/2.
struct SkewParams {
    int n = 0;
    Vec g;
};

/// Linear embedding of g into an n x n skew-symmetric matrix. The upper
/// triangle is filled row-wise with g_1, g_2, ...; the lower triangle is its
/// negation, so the output always satisfies X^T = -X.
Mat skew_embed(const SkewParams& p);

/// Inverse of skew_embed: reads the upper triangle row-wise.
SkewParams skew_extract(const Mat& X);

/// The n x n(n-1)/2 matrix P(tau) defined by skew_embed(g) * tau = P(tau) * g
/// for all g. Built numerically by applying skew_embed to each basis vector.
Mat pmat(const Vec& tau);

/// Commutation matrix K with K * vec(X) = vec(X^T) for X of size rows x cols.
Mat commutation(Index rows, Index cols);

/// Matrix-normal parameters: vec(X) ~ N(vec(M), Y (x) W) with Y the row
/// second moment and W the column second moment (square matrices only).
struct MatrixNormalSpec {
    Mat mean;
    Mat row_moment;  // Y
    Mat col_moment;  // W
};

/// Draw one matrix-normal sample. Y and W must be symmetric PSD; a zero
/// moment collapses the draw onto the mean. Deterministic for a fixed engine
/// state.
Mat sample_matrix_normal(const MatrixNormalSpec& spec, std::mt19937_64& rng);
Mat sample_matrix_normal(const MatrixNormalSpec& spec, std::uint64_t seed);

/// Symmetric PSD square root via eigendecomposition. Eigenvalues below
/// -rel_tol * max|eig| raise std::invalid_argument; small negatives clamp to
/// zero.
Mat psd_sqrt(const Mat& S, double rel_tol = 1e-9);

}  // namespace attdet
