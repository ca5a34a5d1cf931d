#include "attdet/solver.hpp"

#include <cmath>
#include <stdexcept>

namespace attdet {

namespace {

// Normal matrix H + (Q (x) I)(Q^T (x) I). The second term collapses to
// (Q Q^T) (x) I through the mixed-product identity.
Mat normal_matrix_of(const MeasurementSet& ms, bool include_h) {
    const Mat eye = Mat::Identity(ms.n, ms.n);
    Mat N = include_h ? build_h(ms) : Mat::Zero(ms.n * ms.n, ms.n * ms.n);
    if (ms.num_vectors() > 0) {
        const PQ pq = build_pq(ms);
        N += kron(pq.Q * pq.Q.transpose(), eye);
    }
    return N;
}

Vec rhs_of(const MeasurementSet& ms) {
    const PQ pq = build_pq(ms);
    return kron(pq.Q, Mat::Identity(ms.n, ms.n)) * vec(pq.P);
}

AttitudeSolution solve_normal_equations(const MeasurementSet& ms, bool include_h,
                                        SolveMode mode) {
    ms.validate();
    if (ms.num_vectors() < 1) {
        throw std::invalid_argument("solver: at least one vector pair required; "
                                    "use solve_handeye_only for M-only problems");
    }
    AttitudeSolution sol;
    sol.mode = mode;
    sol.normal_matrix = normal_matrix_of(ms, include_h);
    const Vec rhs = rhs_of(ms);
    const Mat np = pinv_psd(sol.normal_matrix);
    sol.x = np * rhs;
    // one residual-correction step recovers the digits the normal-equation
    // route loses on ill-conditioned geometries
    sol.x += np * (rhs - sol.normal_matrix * sol.x);
    sol.rank = numerical_rank(sol.normal_matrix);
    sol.degenerate = sol.rank < ms.n * ms.n;
    sol.loss = evaluate_loss(ms, sol.x);
    return sol;
}

}  // namespace

const char* to_string(SolveMode mode) {
    switch (mode) {
        case SolveMode::unified: return "unified";
        case SolveMode::vector_only: return "vector_only";
        case SolveMode::handeye_only: return "handeye_only";
    }
    return "unknown";
}

AttitudeSolution solve_unified(const MeasurementSet& ms) {
    return solve_normal_equations(ms, true, SolveMode::unified);
}

AttitudeSolution solve_vector_only(const MeasurementSet& ms) {
    return solve_normal_equations(ms, false, SolveMode::vector_only);
}

AttitudeSolution solve_handeye_only(const MeasurementSet& ms) {
    ms.validate();
    if (ms.num_handeyes() < 1) {
        throw std::invalid_argument("solve_handeye_only: at least one hand-eye pair required");
    }
    const Index n = ms.n;
    AttitudeSolution sol;
    sol.mode = SolveMode::handeye_only;
    sol.normal_matrix = build_h(ms);

    Eigen::SelfAdjointEigenSolver<Mat> eig(
        0.5 * (sol.normal_matrix + sol.normal_matrix.transpose()));
    const Vec& ev = eig.eigenvalues();
    const double hnorm = sol.normal_matrix.norm();
    // Two-fold (or worse) solution set: the smallest eigenvalue is not
    // separated from the next one.
    sol.ambiguous = (ev(1) - ev(0)) <= 1e-12 * hnorm;

    // Rescale so mat(x) has the Frobenius norm sqrt(n) of a rotation, then
    // pick the sign: det > 0 for odd n, smaller loss otherwise.
    const double scale = std::sqrt(static_cast<double>(n));
    Vec cand = scale * eig.eigenvectors().col(0);
    const double det = mat(cand, n, n).determinant();
    if (n % 2 == 1 && det != 0.0) {
        if (det < 0.0) cand = -cand;
        sol.x = cand;
    } else {
        const double loss_pos = evaluate_loss(ms, cand);
        const double loss_neg = evaluate_loss(ms, -cand);
        sol.x = loss_neg < loss_pos ? Vec(-cand) : cand;
    }
    sol.rank = numerical_rank(sol.normal_matrix);
    sol.degenerate = sol.rank < n * n;
    sol.loss = evaluate_loss(ms, sol.x);
    return sol;
}

double evaluate_loss(const MeasurementSet& ms, const Vec& x) {
    const Index n2 = static_cast<Index>(ms.n) * ms.n;
    if (x.size() != n2) throw std::invalid_argument("evaluate_loss: x must have length n^2");
    double loss = x.dot(build_h(ms) * x);
    if (ms.num_vectors() > 0) {
        const PQ pq = build_pq(ms);
        // (Q^T (x) I) x = vec(R~ Q), so the vector term is ||P - R~ Q||_F^2.
        const Mat rt = mat(x, ms.n, ms.n);
        loss += (pq.P - rt * pq.Q).squaredNorm();
    }
    return std::max(loss, 0.0);
}

}  // namespace attdet
