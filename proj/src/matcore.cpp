#include "attdet/matcore.hpp"

#include <cmath>
#include <stdexcept>

namespace attdet {

Vec vec(const Mat& X) {
    // Eigen stores column-major, so vec is a straight copy of the buffer.
    return Eigen::Map<const Vec>(X.data(), X.size());
}

Mat mat(const Vec& x, Index rows, Index cols) {
    if (x.size() != rows * cols) {
        throw std::invalid_argument("mat: vector length " + std::to_string(x.size()) +
                                    " does not equal " + std::to_string(rows) + "x" +
                                    std::to_string(cols));
    }
    return Eigen::Map<const Mat>(x.data(), rows, cols);
}

Mat kron(const Mat& X, const Mat& Y) {
    Mat K(X.rows() * Y.rows(), X.cols() * Y.cols());
    for (Index i = 0; i < X.rows(); ++i) {
        for (Index j = 0; j < X.cols(); ++j) {
            K.block(i * Y.rows(), j * Y.cols(), Y.rows(), Y.cols()) = X(i, j) * Y;
        }
    }
    return K;
}

Mat pinv(const Mat& X, double rel_tol) {
    Eigen::JacobiSVD<Mat> svd(X, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Vec& sv = svd.singularValues();
    if (sv.size() == 0 || sv(0) == 0.0) {
        return Mat::Zero(X.cols(), X.rows());
    }
    const double cutoff = rel_tol * sv(0);
    Vec inv_sv = Vec::Zero(sv.size());
    for (Index i = 0; i < sv.size(); ++i) {
        if (sv(i) > cutoff) inv_sv(i) = 1.0 / sv(i);
    }
    return svd.matrixV() * inv_sv.asDiagonal() * svd.matrixU().transpose();
}

Mat pinv_psd(const Mat& S, double rel_tol) {
    if (S.rows() != S.cols()) {
        throw std::invalid_argument("pinv_psd: input must be square");
    }
    Eigen::SelfAdjointEigenSolver<Mat> eig(0.5 * (S + S.transpose()));
    const Vec& ev = eig.eigenvalues();
    const double emax = ev.cwiseAbs().maxCoeff();
    if (emax == 0.0) return Mat::Zero(S.rows(), S.cols());
    const double cutoff = rel_tol * emax;
    Vec inv_ev = Vec::Zero(ev.size());
    for (Index i = 0; i < ev.size(); ++i) {
        if (std::abs(ev(i)) > cutoff) inv_ev(i) = 1.0 / ev(i);
    }
    return eig.eigenvectors() * inv_ev.asDiagonal() * eig.eigenvectors().transpose();
}

int numerical_rank(const Mat& X, double rel_tol) {
    Eigen::JacobiSVD<Mat> svd(X);
    const Vec& sv = svd.singularValues();
    if (sv.size() == 0 || sv(0) == 0.0) return 0;
    const double cutoff = rel_tol * sv(0);
    int rank = 0;
    for (Index i = 0; i < sv.size(); ++i) {
        if (sv(i) >= cutoff) ++rank;
    }
    return rank;
}

MinEig min_eigvec(const Mat& S) {
    if (S.rows() != S.cols()) {
        throw std::invalid_argument("min_eigvec: input must be square");
    }
    Eigen::SelfAdjointEigenSolver<Mat> eig(0.5 * (S + S.transpose()));
    MinEig out;
    out.value = eig.eigenvalues()(0);  // ascending order
    out.vector = eig.eigenvectors().col(0);
    out.vector.normalize();
    return out;
}

static Index skew_dim(Index n) { return n * (n - 1) / 2; }

Mat skew_embed(const SkewParams& p) {
    if (p.g.size() != skew_dim(p.n)) {
        throw std::invalid_argument("skew_embed: g length must be n(n-1)/2");
    }
    Mat X = Mat::Zero(p.n, p.n);
    Index k = 0;
    for (Index i = 0; i < p.n; ++i) {
        for (Index j = i + 1; j < p.n; ++j) {
            X(i, j) = p.g(k);
            X(j, i) = -p.g(k);
            ++k;
        }
    }
    return X;
}

SkewParams skew_extract(const Mat& X) {
    if (X.rows() != X.cols()) {
        throw std::invalid_argument("skew_extract: input must be square");
    }
    const Index n = X.rows();
    SkewParams p;
    p.n = static_cast<int>(n);
    p.g.resize(skew_dim(n));
    Index k = 0;
    for (Index i = 0; i < n; ++i) {
        for (Index j = i + 1; j < n; ++j) {
            p.g(k++) = X(i, j);
        }
    }
    return p;
}

Mat pmat(const Vec& tau) {
    const Index n = tau.size();
    const Index m = skew_dim(n);
    Mat P(n, m);
    SkewParams basis;
    basis.n = static_cast<int>(n);
    basis.g = Vec::Zero(m);
    for (Index k = 0; k < m; ++k) {
        basis.g(k) = 1.0;
        P.col(k) = skew_embed(basis) * tau;
        basis.g(k) = 0.0;
    }
    return P;
}

Mat commutation(Index rows, Index cols) {
    Mat K = Mat::Zero(rows * cols, rows * cols);
    for (Index i = 0; i < rows; ++i) {
        for (Index j = 0; j < cols; ++j) {
            // vec(X) index of X(i,j) is j*rows+i; vec(X^T) index is i*cols+j.
            K(i * cols + j, j * rows + i) = 1.0;
        }
    }
    return K;
}

Mat psd_sqrt(const Mat& S, double rel_tol) {
    if (S.rows() != S.cols()) {
        throw std::invalid_argument("psd_sqrt: input must be square");
    }
    Eigen::SelfAdjointEigenSolver<Mat> eig(0.5 * (S + S.transpose()));
    Vec ev = eig.eigenvalues();
    const double emax = ev.cwiseAbs().maxCoeff();
    for (Index i = 0; i < ev.size(); ++i) {
        if (ev(i) < -rel_tol * emax) {
            throw std::invalid_argument("psd_sqrt: matrix is not positive semidefinite");
        }
        ev(i) = std::sqrt(std::max(ev(i), 0.0));
    }
    return eig.eigenvectors() * ev.asDiagonal() * eig.eigenvectors().transpose();
}

Mat sample_matrix_normal(const MatrixNormalSpec& spec, std::mt19937_64& rng) {
    const Index p = spec.mean.rows();
    const Index q = spec.mean.cols();
    if (p != q) {
        throw std::invalid_argument("sample_matrix_normal: mean must be square");
    }
    if (spec.row_moment.rows() != p || spec.row_moment.cols() != p ||
        spec.col_moment.rows() != q || spec.col_moment.cols() != q) {
        throw std::invalid_argument("sample_matrix_normal: moment dimensions must conform to mean");
    }
    const Mat ly = psd_sqrt(spec.row_moment);
    const Mat lw = psd_sqrt(spec.col_moment);
    std::normal_distribution<double> gauss(0.0, 1.0);
    // Fixed row-major draw order keeps samples reproducible for a given seed.
    Mat Z(q, p);
    for (Index i = 0; i < q; ++i) {
        for (Index j = 0; j < p; ++j) {
            Z(i, j) = gauss(rng);
        }
    }
    // vec(X - M) = (Ly (x) Lw) vec(Z) = vec(Lw Z Ly^T), so vec-covariance is Y (x) W.
    return spec.mean + lw * Z * ly.transpose();
}

Mat sample_matrix_normal(const MatrixNormalSpec& spec, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    return sample_matrix_normal(spec, rng);
}

}  // namespace attdet
