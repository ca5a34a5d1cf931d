#include "attdet/measurements.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace attdet {

namespace {

void require_finite(const Mat& X, const char* what) {
    if (!X.allFinite()) {
        throw std::invalid_argument(std::string(what) + ": entries must be finite");
    }
}

void require_orthonormal(const Mat& R, const char* what, double tol = 1e-6) {
    if (R.rows() != R.cols()) {
        throw std::invalid_argument(std::string(what) + ": must be square");
    }
    const Mat err = R.transpose() * R - Mat::Identity(R.rows(), R.cols());
    if (err.norm() > tol) {
        throw std::invalid_argument(std::string(what) + ": not orthonormal (||R^T R - I|| = " +
                                    std::to_string(err.norm()) + ")");
    }
}

void check_block_list(const std::vector<Mat>& blocks, std::size_t count, Index dim,
                      const char* name, bool require_psd) {
    if (blocks.empty()) return;
    if (blocks.size() != count) {
        throw std::invalid_argument(std::string("NoiseSpec.") + name +
                                    ": must be empty or one block per pair");
    }
    for (const Mat& B : blocks) {
        if (B.rows() != dim || B.cols() != dim) {
            throw std::invalid_argument(std::string("NoiseSpec.") + name +
                                        ": block dimension mismatch");
        }
        if (require_psd) {
            const double asym = (B - B.transpose()).norm();
            Eigen::SelfAdjointEigenSolver<Mat> eig(0.5 * (B + B.transpose()));
            const double scale = std::max(1e-300, eig.eigenvalues().cwiseAbs().maxCoeff());
            if (asym > 1e-9 * scale || eig.eigenvalues()(0) < -1e-9 * scale) {
                throw std::invalid_argument(std::string("NoiseSpec.") + name +
                                            ": block must be symmetric PSD");
            }
        }
    }
}

}  // namespace

void MeasurementSet::validate() const {
    if (n < 2) throw std::invalid_argument("MeasurementSet: n must be >= 2");
    if (vectors.empty() && handeyes.empty()) {
        throw std::invalid_argument("MeasurementSet: N + M must be >= 1");
    }
    for (const VectorPair& p : vectors) {
        if (p.b.size() != n || p.r.size() != n) {
            throw std::invalid_argument("VectorPair: dimension mismatch with n");
        }
        if (!(p.w > 0.0)) throw std::invalid_argument("VectorPair: weight must be positive");
        if (!p.b.allFinite() || !p.r.allFinite()) {
            throw std::invalid_argument("VectorPair: entries must be finite");
        }
    }
    for (const HandEyePair& p : handeyes) {
        if (p.A.rows() != n || p.A.cols() != n || p.B.rows() != n || p.B.cols() != n) {
            throw std::invalid_argument("HandEyePair: dimension mismatch with n");
        }
        if (!(p.v > 0.0)) throw std::invalid_argument("HandEyePair: weight must be positive");
        require_finite(p.A, "HandEyePair.A");
        require_finite(p.B, "HandEyePair.B");
    }
    if (noise.eps_vector < 0.0 || noise.eps_handeye < 0.0) {
        throw std::invalid_argument("NoiseSpec: scales must be nonnegative");
    }
    check_block_list(noise.sigma_b, vectors.size(), n, "sigma_b", true);
    check_block_list(noise.sigma_r, vectors.size(), n, "sigma_r", true);
    check_block_list(noise.sigma_br, vectors.size(), n, "sigma_br", false);
    const Index n2 = static_cast<Index>(n) * n;
    check_block_list(noise.sigma_vec_a, handeyes.size(), n2, "sigma_vec_a", true);
    check_block_list(noise.sigma_vec_b, handeyes.size(), n2, "sigma_vec_b", true);
    check_block_list(noise.sigma_vec_ab, handeyes.size(), n2, "sigma_vec_ab", false);
}

PQ build_pq(const MeasurementSet& ms) {
    const int N = ms.num_vectors();
    if (N < 1) throw std::invalid_argument("build_pq: at least one vector pair required");
    PQ out;
    out.P.resize(ms.n, N);
    out.Q.resize(ms.n, N);
    for (int i = 0; i < N; ++i) {
        const double sw = std::sqrt(ms.vectors[i].w);
        out.P.col(i) = sw * ms.vectors[i].b;
        out.Q.col(i) = sw * ms.vectors[i].r;
    }
    return out;
}

Mat build_h(const MeasurementSet& ms) {
    const Index n2 = static_cast<Index>(ms.n) * ms.n;
    Mat H = Mat::Zero(n2, n2);
    const Mat eye = Mat::Identity(ms.n, ms.n);
    for (const HandEyePair& p : ms.handeyes) {
        if (p.A.rows() != ms.n || p.B.rows() != ms.n) {
            throw std::invalid_argument("build_h: hand-eye pair dimension mismatch");
        }
        // D vec(R) = vec(A R - R B), so consistent pairs put vec(R) in the
        // null space of H.
        const Mat D = kron(eye, p.A) - kron(p.B.transpose(), eye);
        H += p.v * D.transpose() * D;
    }
    return H;
}

double weight_ratio(const MeasurementSet& ms) {
    if (ms.num_handeyes() < 1) {
        throw std::invalid_argument("weight_ratio: undefined without hand-eye measurements");
    }
    double wsum = 0.0;
    double vsum = 0.0;
    for (const VectorPair& p : ms.vectors) wsum += p.w;
    for (const HandEyePair& p : ms.handeyes) vsum += p.v;
    return wsum / vsum;
}

HandEyePair rigid_from_rotations(const Mat& rga_prev, const Mat& rga_curr,
                                 const Mat& rxb_prev, const Mat& rxb_curr) {
    require_orthonormal(rga_prev, "rigid_from_rotations: rga_prev");
    require_orthonormal(rga_curr, "rigid_from_rotations: rga_curr");
    require_orthonormal(rxb_prev, "rigid_from_rotations: rxb_prev");
    require_orthonormal(rxb_curr, "rigid_from_rotations: rxb_curr");
    HandEyePair pair;
    pair.A = rga_curr * rga_prev.transpose();
    pair.B = rxb_curr.transpose() * rxb_prev;
    pair.v = 1.0;
    return pair;
}

std::vector<VectorPair> vectors_from_rotation(const Mat& r_ext, double w) {
    require_orthonormal(r_ext, "vectors_from_rotation: r_ext");
    if (!(w > 0.0)) throw std::invalid_argument("vectors_from_rotation: weight must be positive");
    const Index n = r_ext.rows();
    std::vector<VectorPair> pairs;
    pairs.reserve(n);
    for (Index i = 0; i < n; ++i) {
        VectorPair p;
        p.b = r_ext.col(i);  // R e_i is just the i-th column
        p.r = Vec::Unit(n, i);
        p.w = w;
        pairs.push_back(std::move(p));
    }
    return pairs;
}

}  // namespace attdet
