#pragma once

#include "attdet/matcore.hpp"
#include "attdet/measurements.hpp"
#include "attdet/solver.hpp"

#include <vector>

namespace attdet {

/// Linear mapping Z(P) = I (x) P satisfying
/// (dQ (x) I) vec(P) = Z(P) vec(dQ^T) for every perturbation dQ.
Mat zmap(const Mat& P);

/// Linear mapping F[vec(C)] = (I (x) C | -C^T (x) I) satisfying
/// (dA^T (x) I - I (x) dB) vec(C) = F[vec(C)] [vec(dA); vec(dB)].
Mat fmap(const Vec& c);

/// Measurement covariance blocks feeding the first-order propagation. Vector
/// blocks are nN x nN (empty when N = 0); hand-eye blocks are 2n^2 x 2n^2 per
/// pair. Cross blocks between different pairs are structurally zero (the
/// no-correlation assumption); transposed counterparts follow from
/// Sigma_{Y,X} = Sigma_{X,Y}^T.
struct BlockCov {
    Mat sigma_vec_p;   // <d vec(P) d vec(P)^T>
    Mat sigma_vec_q;   // <d vec(Q) d vec(Q)^T>
    Mat sigma_vec_pt;  // <d vec(P^T) d vec(P^T)^T>
    Mat sigma_vec_qt;  // <d vec(Q^T) d vec(Q^T)^T>
    Mat sigma_p_q;     // <d vec(P) d vec(Q)^T>
    Mat sigma_qt_p;    // <d vec(Q^T) d vec(P)^T>
    Mat sigma_qt_q;    // <d vec(Q^T) d vec(Q)^T>
    std::vector<Mat> sigma_m;  // [[S_vecA, S_vecA_vecB], [., S_vecB]] per pair
    std::vector<Mat> sigma_n;  // same for the transposed-argument stacking
};

/// Assembles all blocks from the NoiseSpec (scalar scales or per-pair
/// overrides). The weighted columns of P and Q carry sqrt(w_i), so the
/// per-pair covariances enter scaled by w_i. vec(X^T)-oriented blocks come
/// from the vec(X) ones through the commutation matrix.
BlockCov assemble_blocks(const MeasurementSet& ms);

/// Covariance of the unconstrained solution x with the three propagated
/// terms: Sigma_xx = N^+ (S1 + S2 + S3 + S3^T) N^+ for the normal matrix N.
struct SolutionCovariance {
    Mat sigma_xx;
    Mat s1;
    Mat s2;
    Mat s3;
};

SolutionCovariance solution_covariance(const MeasurementSet& ms, const AttitudeSolution& sol,
                                       const BlockCov& blocks);

/// Rotation-space uncertainty via the Cayley registration route.
struct RotationCovariance {
    Mat sigma_g;   // covariance of the Cayley parameter vector
    Mat sigma_r;   // n x n rotation uncertainty
    SkewParams g;  // nominal Cayley parameters of the registration
};

/// Propagates Sigma_xx onto the Cayley parameters of the registration
/// d_i = R e_i (d_i read from sol.x, e_i noise-free) and then onto the
/// rotation. By default the n x n diagonal blocks of Sigma_xx act as
/// independent column covariances; use_full_cross keeps the cross-column
/// blocks. Throws std::domain_error on Cayley singularity (rotation near pi);
/// callers fall back to reporting Sigma_xx alone.
RotationCovariance rotation_covariance(const AttitudeSolution& sol, const Mat& sigma_xx,
                                       const Mat& R, bool use_full_cross = false);

}  // namespace attdet
