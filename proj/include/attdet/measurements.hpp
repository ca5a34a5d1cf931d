#pragma once

#include "attdet/matcore.hpp"

#include <optional>
#include <vector>

namespace attdet {

/// One weighted vector observation pair b = R r. Neither side is required to
/// have unit norm.
struct VectorPair {
    Vec b;  // body-frame observation
    Vec r;  // reference-frame vector
    double w = 1.0;
};

/// One weighted hand-eye pair constrained by A R = R B. A and B are arbitrary
/// square matrices (neither symmetry nor orthogonality is assumed).
struct HandEyePair {
    Mat A;
    Mat B;
    double v = 1.0;
};

/// Per-source noise description. The scalar scales reproduce the simulated
/// case: b_i carries additive N(0, eps_vector * I) noise and A_i carries
/// matrix-normal MN(0, eps_handeye * I, eps_handeye * I) noise (entrywise
/// variance eps_handeye^2). Full per-pair blocks override the scalars when
/// present; each optional list must be empty or match the pair count.
struct NoiseSpec {
    double eps_vector = 0.0;
    double eps_handeye = 0.0;
    std::vector<Mat> sigma_b;       // n x n per vector pair
    std::vector<Mat> sigma_r;       // n x n per vector pair
    std::vector<Mat> sigma_br;      // cross <db dr^T> per vector pair
    std::vector<Mat> sigma_vec_a;   // n^2 x n^2 per hand-eye pair
    std::vector<Mat> sigma_vec_b;   // n^2 x n^2 per hand-eye pair
    std::vector<Mat> sigma_vec_ab;  // cross <d vec(A) d vec(B)^T> per pair
};

/// The unified problem input: N vector pairs and M hand-eye pairs sharing
/// dimension n, with their noise description.
struct MeasurementSet {
    int n = 3;
    std::vector<VectorPair> vectors;
    std::vector<HandEyePair> handeyes;
    NoiseSpec noise;

    int num_vectors() const { return static_cast<int>(vectors.size()); }
    int num_handeyes() const { return static_cast<int>(handeyes.size()); }

    /// Checks dimensions, weight positivity and N + M >= 1. Throws
    /// std::invalid_argument on violation.
    void validate() const;
};

/// Stacked weighted observation matrices: column i of P is sqrt(w_i) b_i and
/// column i of Q is sqrt(w_i) r_i. Requires N >= 1.
struct PQ {
    Mat P;
    Mat Q;
};
PQ build_pq(const MeasurementSet& ms);

/// The hand-eye quadratic form H = sum_i v_i D_i^T D_i with
/// D_i = I (x) A_i - B_i^T (x) I, the vectorized form of A_i R - R B_i.
/// An n^2 x n^2 symmetric PSD matrix with vec(R) in its null space for
/// consistent pairs. M = 0 yields the zero matrix.
Mat build_h(const MeasurementSet& ms);

/// Relative accuracy ratio (sum of w) / (sum of v). Requires M >= 1.
double weight_ratio(const MeasurementSet& ms);

/// Builds a rigid hand-eye pair from two observers' consecutive attitude
/// estimates: A = Rga_curr * Rga_prev^T, B = Rxb_curr^T * Rxb_prev, v = 1.
/// All inputs must be orthonormal to 1e-6 Frobenius.
HandEyePair rigid_from_rotations(const Mat& rga_prev, const Mat& rga_curr,
                                 const Mat& rxb_prev, const Mat& rxb_curr);

/// Reconstructs n vector pairs (R_ext e_i, e_i) with common weight w from an
/// externally estimated rotation. R_ext must be orthonormal to 1e-6.
std::vector<VectorPair> vectors_from_rotation(const Mat& r_ext, double w);

}  // namespace attdet
