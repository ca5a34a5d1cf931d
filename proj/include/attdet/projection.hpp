#pragma once

#include "attdet/matcore.hpp"

namespace attdet {

enum class ProjectionMethod { svd, cayley };

const char* to_string(ProjectionMethod method);

/// A proper rotation recovered from an unconstrained estimate, with its
/// Cayley parameters when the projection route defines them.
struct RotationEstimate {
    Mat R;
    SkewParams g;  // empty (n = 0) for the SVD route
    ProjectionMethod method = ProjectionMethod::svd;
    bool ill_conditioned = false;  // SVD route: sigma_min < 1e-12 * sigma_max
};

/// Nearest rotation in Frobenius norm: R = U diag(1, ..., 1, det(UV)) V^T
/// where U S V^T is the SVD of the input.
RotationEstimate project_svd(const Mat& xm);

/// Cayley-registration projection: treats the columns d_i of the input as
/// measurements of R e_i, solves the linear registration g = G^+ v built from
/// P(tau_i) with tau_i = d_i + e_i, rho_i = e_i - d_i, and maps back through
/// R = (I + g_skew)^-1 (I - g_skew). Throws std::domain_error when I + g_skew
/// is near singular (rotation close to pi); use project_svd there.
RotationEstimate project_cayley(const Mat& xm);

/// Cayley parameters of a rotation: g_skew = (I - R)(I + R)^-1. Throws
/// std::domain_error when R has an eigenvalue at -1.
SkewParams cayley_params(const Mat& R);

/// Registration system matrix G = (1/n) sum_i P^T(tau_i) P(tau_i) and vector
/// v = (1/n) sum_i P^T(tau_i) rho_i for the columns d_i of xm. Shared by
/// project_cayley and the rotation-covariance propagation.
struct CayleySystem {
    Mat G;
    Vec v;
};
CayleySystem cayley_system(const Mat& xm);

/// Rotation error in radians. For n = 3 this is the geodesic angle
/// arccos((tr(R R_true^T) - 1) / 2); for other n the metric
/// ||log(R^T R_true)||_F / sqrt(2), which reduces to the former at n = 3.
double rotation_error(const Mat& R, const Mat& R_true);

}  // namespace attdet
