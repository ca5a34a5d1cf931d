#include "attdet/covariance.hpp"

#include "attdet/projection.hpp"

#include <cmath>
#include <stdexcept>

namespace attdet {

Mat zmap(const Mat& P) {
    return kron(Mat::Identity(P.rows(), P.rows()), P);
}

Mat fmap(const Vec& c) {
    const Index n2 = c.size();
    const Index n = static_cast<Index>(std::lround(std::sqrt(static_cast<double>(n2))));
    if (n * n != n2) throw std::invalid_argument("fmap: argument length must be a square");
    const Mat C = mat(c, n, n);
    Mat F(n2, 2 * n2);
    F.leftCols(n2) = kron(Mat::Identity(n, n), C);
    F.rightCols(n2) = -kron(C.transpose(), Mat::Identity(n, n));
    return F;
}

namespace {

Mat block_or(const std::vector<Mat>& blocks, std::size_t i, const Mat& fallback) {
    return blocks.empty() ? fallback : blocks[i];
}

// Block-diagonal assembly of weighted per-pair blocks.
Mat blockdiag_weighted(const std::vector<Mat>& blocks, const std::vector<double>& weights,
                       Index dim) {
    const Index count = static_cast<Index>(blocks.size());
    Mat out = Mat::Zero(count * dim, count * dim);
    for (Index i = 0; i < count; ++i) {
        out.block(i * dim, i * dim, dim, dim) = weights[i] * blocks[i];
    }
    return out;
}

}  // namespace

BlockCov assemble_blocks(const MeasurementSet& ms) {
    ms.validate();
    const Index n = ms.n;
    const Index N = ms.num_vectors();
    const Index n2 = n * n;
    BlockCov bc;

    std::vector<Mat> sb, sr, sbr;
    std::vector<double> w;
    for (int i = 0; i < N; ++i) {
        sb.push_back(block_or(ms.noise.sigma_b, i, ms.noise.eps_vector * Mat::Identity(n, n)));
        sr.push_back(block_or(ms.noise.sigma_r, i, Mat::Zero(n, n)));
        sbr.push_back(block_or(ms.noise.sigma_br, i, Mat::Zero(n, n)));
        w.push_back(ms.vectors[i].w);
    }
    bc.sigma_vec_p = blockdiag_weighted(sb, w, n);
    bc.sigma_vec_q = blockdiag_weighted(sr, w, n);
    bc.sigma_p_q = blockdiag_weighted(sbr, w, n);

    // vec(X^T)-oriented blocks via the commutation matrix K vec(Q) = vec(Q^T).
    const Mat K = commutation(n, N);
    bc.sigma_vec_pt = K * bc.sigma_vec_p * K.transpose();
    bc.sigma_vec_qt = K * bc.sigma_vec_q * K.transpose();
    bc.sigma_qt_p = K * bc.sigma_p_q.transpose();
    bc.sigma_qt_q = K * bc.sigma_vec_q;

    const Mat Kn = commutation(n, n);
    const double he_var = ms.noise.eps_handeye * ms.noise.eps_handeye;
    for (int i = 0; i < ms.num_handeyes(); ++i) {
        const Mat sa = block_or(ms.noise.sigma_vec_a, i, he_var * Mat::Identity(n2, n2));
        const Mat sbm = block_or(ms.noise.sigma_vec_b, i, Mat::Zero(n2, n2));
        const Mat sab = block_or(ms.noise.sigma_vec_ab, i, Mat::Zero(n2, n2));
        Mat m(2 * n2, 2 * n2);
        m.topLeftCorner(n2, n2) = sa;
        m.topRightCorner(n2, n2) = sab;
        m.bottomLeftCorner(n2, n2) = sab.transpose();
        m.bottomRightCorner(n2, n2) = sbm;
        bc.sigma_m.push_back(m);

        Mat nn(2 * n2, 2 * n2);
        nn.topLeftCorner(n2, n2) = Kn * sa * Kn.transpose();
        nn.topRightCorner(n2, n2) = Kn * sab * Kn.transpose();
        nn.bottomLeftCorner(n2, n2) = nn.topRightCorner(n2, n2).transpose();
        nn.bottomRightCorner(n2, n2) = Kn * sbm * Kn.transpose();
        bc.sigma_n.push_back(nn);
    }
    return bc;
}

SolutionCovariance solution_covariance(const MeasurementSet& ms, const AttitudeSolution& sol,
                                       const BlockCov& blocks) {
    const Index n = ms.n;
    const Index n2 = n * n;
    const Index N = ms.num_vectors();
    if (sol.x.size() != n2) {
        throw std::invalid_argument("solution_covariance: solution dimension mismatch");
    }

    SolutionCovariance out;
    out.s1 = Mat::Zero(n2, n2);
    out.s2 = Mat::Zero(n2, n2);
    out.s3 = Mat::Zero(n2, n2);

    const Mat eye = Mat::Identity(n, n);
    const Mat rt = mat(sol.x, n, n);  // unconstrained R~, not strictly on SO(n)

    if (N > 0) {
        const PQ pq = build_pq(ms);
        const Mat Zp = zmap(pq.P);
        const Mat Zrq = zmap(rt * pq.Q);
        const Mat QI = kron(pq.Q, eye);    // (Q (x) I), n^2 x nN
        const Mat QR = kron(pq.Q, rt);     // (Q (x) R~), n^2 x nN

        out.s1 = Zp * blocks.sigma_vec_qt * Zp.transpose() +
                 QI * blocks.sigma_vec_p * QI.transpose();
        const Mat s1_cross = Zp * blocks.sigma_qt_p * QI.transpose();
        out.s1 += s1_cross + s1_cross.transpose();

        out.s2 += Zrq * blocks.sigma_vec_qt * Zrq.transpose() +
                  QR * blocks.sigma_vec_q * QR.transpose();
        const Mat s2_cross = Zrq * blocks.sigma_qt_q * QR.transpose();
        out.s2 += s2_cross + s2_cross.transpose();

        out.s3 -= Zp * blocks.sigma_vec_qt * Zrq.transpose() +
                  QI * blocks.sigma_p_q * QR.transpose() +
                  Zp * blocks.sigma_qt_q * QR.transpose() +
                  QI * blocks.sigma_qt_p.transpose() * Zrq.transpose();
    }

    // Hand-eye contributions of dH x = sum_i v_i [dD_i^T (D_i x) + D_i^T dD_i x]
    // with D = I (x) A - B^T (x) I. Writing C = mat(D x):
    //   dD^T vec(C) = vec(dA^T C) - vec(C dB^T) = W[C] [vec(dA^T); vec(dB^T)]
    //   dD x       = vec(dA R~) - vec(R~ dB)   = W[R~] [vec(dA); vec(dB)]
    // where W[C] = (C^T (x) I | -I (x) C). Independent pairs sum as per-pair
    // quadratic forms (the summed display collapses to this for M = 1).
    auto wmap = [&eye](const Mat& C) {
        Mat W(C.size(), 2 * C.size());
        W.leftCols(C.size()) = kron(C.transpose(), eye);
        W.rightCols(C.size()) = -kron(eye, C);
        return W;
    };
    for (int i = 0; i < ms.num_handeyes(); ++i) {
        const HandEyePair& he = ms.handeyes[i];
        const double v2 = he.v * he.v;
        const Mat D = kron(eye, he.A) - kron(he.B.transpose(), eye);
        const Mat T1 = wmap(mat(D * sol.x, n, n));
        const Mat T2 = D.transpose() * wmap(rt);
        out.s2 += v2 * T1 * blocks.sigma_n[i] * T1.transpose();
        out.s2 += v2 * T2 * blocks.sigma_m[i] * T2.transpose();
    }

    const Mat np = pinv_psd(sol.normal_matrix);
    const Mat core = out.s1 + out.s2 + out.s3 + out.s3.transpose();
    out.sigma_xx = np * core * np;
    out.sigma_xx = 0.5 * (out.sigma_xx + out.sigma_xx.transpose()).eval();
    return out;
}

RotationCovariance rotation_covariance(const AttitudeSolution& sol, const Mat& sigma_xx,
                                       const Mat& R, bool use_full_cross) {
    const Index n = R.rows();
    const Index n2 = n * n;
    const Index m = n * (n - 1) / 2;
    if (sol.x.size() != n2 || sigma_xx.rows() != n2 || sigma_xx.cols() != n2) {
        throw std::invalid_argument("rotation_covariance: dimension mismatch");
    }

    const Mat xm = mat(sol.x, n, n);
    const CayleySystem sys = cayley_system(xm);
    Eigen::SelfAdjointEigenSolver<Mat> geig(sys.G);
    if (geig.eigenvalues()(0) < 1e-10 * geig.eigenvalues()(m - 1)) {
        throw std::domain_error("rotation_covariance: Cayley registration is "
                                "degenerate (rotation near pi); report Sigma_xx only");
    }
    const Mat gpinv = pinv_psd(sys.G);
    const Vec g_nom = gpinv * sys.v;

    // First-order sensitivity of g = G^+ v to each component of each d_i:
    // dg = G^+ (dv - dG g) with dG, dv linear in the perturbation.
    Mat J(m, n2);
    for (Index i = 0; i < n; ++i) {
        const Vec d = xm.col(i);
        const Vec e = Vec::Unit(n, i);
        const Mat Pt = pmat(d + e);
        const Vec rho = e - d;
        for (Index j = 0; j < n; ++j) {
            const Vec u = Vec::Unit(n, j);
            const Mat Pu = pmat(u);
            const Mat dG = (Pu.transpose() * Pt + Pt.transpose() * Pu) / static_cast<double>(n);
            const Vec dv = (Pu.transpose() * rho - Pt.transpose() * u) / static_cast<double>(n);
            J.col(i * n + j) = gpinv * (dv - dG * g_nom);
        }
    }

    Mat sigma_d;
    if (use_full_cross) {
        sigma_d = sigma_xx;
    } else {
        sigma_d = Mat::Zero(n2, n2);
        for (Index i = 0; i < n; ++i) {
            sigma_d.block(i * n, i * n, n, n) = sigma_xx.block(i * n, i * n, n, n);
        }
    }

    RotationCovariance out;
    out.g.n = static_cast<int>(n);
    out.g.g = g_nom;
    out.sigma_g = J * sigma_d * J.transpose();
    out.sigma_g = 0.5 * (out.sigma_g + out.sigma_g.transpose()).eval();

    const Mat skew = skew_embed(out.g);
    const Mat a = Mat::Identity(n, n) + skew;
    Eigen::JacobiSVD<Mat> svd(a);
    if (svd.singularValues()(n - 1) < 1e-8) {
        throw std::domain_error("rotation_covariance: I + g_skew near singular "
                                "(rotation near pi); report Sigma_xx only");
    }
    const Mat a_inv = a.partialPivLu().solve(Mat::Identity(n, n));
    Mat middle = Mat::Zero(n, n);
    const Mat zeta = R + Mat::Identity(n, n);
    for (Index i = 0; i < n; ++i) {
        const Mat Pz = pmat(zeta.col(i));
        middle += Pz * out.sigma_g * Pz.transpose();
    }
    out.sigma_r = a_inv * middle * a_inv.transpose();
    out.sigma_r = 0.5 * (out.sigma_r + out.sigma_r.transpose()).eval();
    return out;
}

}  // namespace attdet
