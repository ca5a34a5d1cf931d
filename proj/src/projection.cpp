#include "attdet/projection.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>

namespace attdet {

const char* to_string(ProjectionMethod method) {
    switch (method) {
        case ProjectionMethod::svd: return "svd";
        case ProjectionMethod::cayley: return "cayley";
    }
    return "unknown";
}

RotationEstimate project_svd(const Mat& xm) {
    if (xm.rows() != xm.cols()) {
        throw std::invalid_argument("project_svd: input must be square");
    }
    if (!xm.allFinite() || xm.norm() == 0.0) {
        throw std::invalid_argument("project_svd: input must be finite and nonzero");
    }
    const Index n = xm.rows();
    Eigen::JacobiSVD<Mat> svd(xm, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Vec& sv = svd.singularValues();

    RotationEstimate est;
    est.method = ProjectionMethod::svd;
    est.ill_conditioned = sv(n - 1) < 1e-12 * sv(0);

    Vec d = Vec::Ones(n);
    d(n - 1) = (svd.matrixU() * svd.matrixV()).determinant() >= 0.0 ? 1.0 : -1.0;
    est.R = svd.matrixU() * d.asDiagonal() * svd.matrixV().transpose();
    return est;
}

CayleySystem cayley_system(const Mat& xm) {
    const Index n = xm.rows();
    const Index m = n * (n - 1) / 2;
    CayleySystem sys;
    sys.G = Mat::Zero(m, m);
    sys.v = Vec::Zero(m);
    for (Index i = 0; i < n; ++i) {
        const Vec d = xm.col(i);
        const Vec e = Vec::Unit(n, i);
        const Mat Pi = pmat(d + e);
        sys.G += Pi.transpose() * Pi / static_cast<double>(n);
        sys.v += Pi.transpose() * (e - d) / static_cast<double>(n);
    }
    return sys;
}

RotationEstimate project_cayley(const Mat& xm) {
    if (xm.rows() != xm.cols()) {
        throw std::invalid_argument("project_cayley: input must be square");
    }
    const Index n = xm.rows();
    const CayleySystem sys = cayley_system(xm);

    // A rotation angle of pi makes tau_i = (R + I) e_i collapse, which shows
    // up as rank deficiency of the registration matrix G.
    Eigen::SelfAdjointEigenSolver<Mat> geig(sys.G);
    if (geig.eigenvalues()(0) < 1e-10 * geig.eigenvalues()(sys.G.rows() - 1)) {
        throw std::domain_error("project_cayley: registration is degenerate "
                                "(rotation near pi); use project_svd");
    }

    RotationEstimate est;
    est.method = ProjectionMethod::cayley;
    est.g.n = static_cast<int>(n);
    est.g.g = pinv_psd(sys.G) * sys.v;

    const Mat skew = skew_embed(est.g);
    const Mat a = Mat::Identity(n, n) + skew;
    Eigen::JacobiSVD<Mat> svd(a);
    if (svd.singularValues()(n - 1) < 1e-8) {
        throw std::domain_error("project_cayley: I + g_skew is near singular "
                                "(rotation near pi); use project_svd");
    }
    est.R = a.partialPivLu().solve(Mat::Identity(n, n) - skew);
    return est;
}

SkewParams cayley_params(const Mat& R) {
    if (R.rows() != R.cols()) {
        throw std::invalid_argument("cayley_params: input must be square");
    }
    const Index n = R.rows();
    const Mat a = Mat::Identity(n, n) + R;
    Eigen::JacobiSVD<Mat> svd(a);
    if (svd.singularValues()(n - 1) < 1e-8 * std::max(1.0, svd.singularValues()(0))) {
        throw std::domain_error("cayley_params: R has an eigenvalue at -1");
    }
    // g_skew = (I - R)(I + R)^-1, solved as (I + R)^T X^T = (I - R)^T.
    const Mat skew = a.transpose().partialPivLu().solve((Mat::Identity(n, n) - R).transpose())
                         .transpose();
    return skew_extract(skew);
}

double rotation_error(const Mat& R, const Mat& R_true) {
    if (R.rows() != R_true.rows() || R.cols() != R_true.cols() || R.rows() != R.cols()) {
        throw std::invalid_argument("rotation_error: conforming square inputs required");
    }
    const Index n = R.rows();
    if (n == 3) {
        // same angle as arccos((tr - 1)/2) but evaluated through atan2 of the
        // skew part, which keeps precision near 0 and pi
        const Mat E = R * R_true.transpose();
        const double c = std::clamp(0.5 * (E.trace() - 1.0), -1.0, 1.0);
        const Eigen::Vector3d s_vec(E(2, 1) - E(1, 2), E(0, 2) - E(2, 0), E(1, 0) - E(0, 1));
        return std::atan2(0.5 * s_vec.norm(), c);
    }
    // ||log(R^T R_true)||_F / sqrt(2): eigenvalues of the relative rotation
    // are e^{+-i theta_k}; the metric is sqrt(sum of theta_k^2 over pairs).
    Eigen::EigenSolver<Mat> eig(R.transpose() * R_true);
    double sum = 0.0;
    for (Index i = 0; i < n; ++i) {
        const double theta = std::arg(eig.eigenvalues()(i));
        sum += theta * theta;
    }
    return std::sqrt(0.5 * sum);
}

}  // namespace attdet
