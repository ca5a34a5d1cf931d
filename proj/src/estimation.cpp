#include "attdet/estimation.hpp"

#include "attdet/covariance.hpp"
#include "attdet/projection.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace attdet {

namespace {

Eigen::Matrix3d cross_mat(const Eigen::Vector3d& v) {
    Eigen::Matrix3d s;
    s << 0.0, -v.z(), v.y(), v.z(), 0.0, -v.x(), -v.y(), v.x(), 0.0;
    return s;
}

Eigen::Matrix3d rotation_exp(const Eigen::Vector3d& w) {
    const double angle = w.norm();
    if (angle < 1e-14) return Eigen::Matrix3d::Identity() + cross_mat(w);
    return Eigen::AngleAxisd(angle, w / angle).toRotationMatrix();
}

// Columns map per-axis rate perturbations into vec(R): column k is
// vec(e_k_x * R).
Mat rate_to_vec_jacobian(const Eigen::Matrix3d& R) {
    Mat gamma(9, 3);
    for (int k = 0; k < 3; ++k) {
        const Eigen::Matrix3d gk = cross_mat(Eigen::Vector3d::Unit(k));
        gamma.col(k) = vec(gk * R);
    }
    return gamma;
}

void symmetrize(Mat& P) { P = (0.5 * (P + P.transpose())).eval(); }

// Numeric Jacobian of vec(project_svd(mat(x))) at x, used to push the
// posterior covariance through the re-projection.
Mat projection_jacobian(const Vec& x) {
    const double step = 1e-6 * std::max(1.0, x.norm());
    Mat J(9, 9);
    Vec xp = x;
    for (Index i = 0; i < 9; ++i) {
        xp(i) = x(i) + step;
        const Vec hi = vec(project_svd(mat(xp, 3, 3)).R);
        xp(i) = x(i) - step;
        const Vec lo = vec(project_svd(mat(xp, 3, 3)).R);
        xp(i) = x(i);
        J.col(i) = (hi - lo) / (2.0 * step);
    }
    return J;
}

}  // namespace

FilterState make_initial_state(const FilterConfig& cfg) {
    FilterState s;
    s.x = vec(Mat::Identity(3, 3));
    s.bias.setZero();
    s.cov = cfg.initial_cov * Mat::Identity(12, 12);
    s.t = 0.0;
    return s;
}

FilterState predict(const FilterState& state, const GyroSample& gyro, double dt,
                    const FilterConfig& cfg) {
    if (dt <= 0.0) throw std::invalid_argument("predict: dt must be positive");
    const Eigen::Vector3d omega_hat = gyro.omega - state.bias;
    const Eigen::Matrix3d R_old = mat(state.x, 3, 3);
    const Eigen::Matrix3d rot = rotation_exp(-omega_hat * dt);
    const Eigen::Matrix3d R_new = rot * R_old;

    FilterState next;
    next.x = vec(R_new);
    next.bias = state.bias;
    next.t = state.t + dt;

    const Mat gamma = rate_to_vec_jacobian(R_new);
    Mat phi = Mat::Identity(12, 12);
    phi.topLeftCorner(9, 9) = kron(Mat::Identity(3, 3), rot);
    phi.topRightCorner(9, 3) = dt * gamma;  // d vec(R+) / d bias

    // The gyro noise is a per-sample rate error of std sigma_omega held over
    // dt, so it enters the attitude as dt * noise through the same channel as
    // the bias; the bias itself is constant in the process model and gets the
    // same dt^2 mapping as a stability floor.
    Mat q = Mat::Zero(12, 12);
    q.topLeftCorner(9, 9) =
        cfg.sigma_omega * cfg.sigma_omega * dt * dt * gamma * gamma.transpose();
    q.bottomRightCorner(3, 3) =
        cfg.sigma_bias * cfg.sigma_bias * dt * dt * Mat::Identity(3, 3);

    next.cov = phi * state.cov * phi.transpose() + q;
    symmetrize(next.cov);
    return next;
}

UpdateResult update(const FilterState& state, const AttitudeSolution& sol,
                    const Mat& sigma_xx) {
    if (sol.x.size() != 9 || sigma_xx.rows() != 9 || sigma_xx.cols() != 9) {
        throw std::invalid_argument("update: attitude measurement must be 3x3 (n = 3)");
    }
    const Mat r_meas = 0.5 * (sigma_xx + sigma_xx.transpose());
    Eigen::SelfAdjointEigenSolver<Mat> eig(r_meas);
    if (eig.eigenvalues()(0) < -1e-12 * std::abs(eig.eigenvalues()(8))) {
        throw std::invalid_argument("update: measurement covariance is not PSD");
    }

    // Informative block only: y = [I 0] state with covariance sigma_xx. The
    // pseudoinverse keeps the zero-noise limit well defined; a numerically
    // zero S (both covariances collapsed) means there is nothing to correct
    // and must not be inverted into roundoff dust.
    const Vec innovation = sol.x - state.x;
    Mat s = state.cov.topLeftCorner(9, 9) + r_meas;
    symmetrize(s);
    const Mat s_inv = s.norm() > 1e-30 ? pinv_psd(s) : Mat::Zero(9, 9);
    const Mat gain = (s_inv * state.cov.topRows(9)).transpose();  // 12 x 9

    UpdateResult out;
    out.nis = innovation.dot(s_inv * innovation);

    Vec dx = gain * innovation;
    FilterState post;
    post.t = state.t;
    post.x = state.x + dx.head(9);
    post.bias = state.bias + dx.tail(3);

    // Joseph form keeps the covariance symmetric PSD. H = [I9 0].
    Mat ikh = Mat::Identity(12, 12);
    ikh.leftCols(9) -= gain;
    post.cov = ikh * state.cov * ikh.transpose() + gain * r_meas * gain.transpose();

    // Re-project the attitude onto SO(3) and carry the covariance through the
    // projection to first order.
    const Mat jproj = projection_jacobian(post.x);
    post.x = vec(project_svd(mat(post.x, 3, 3)).R);
    Mat t = Mat::Identity(12, 12);
    t.topLeftCorner(9, 9) = jproj;
    post.cov = t * post.cov * t.transpose();
    symmetrize(post.cov);

    out.state = std::move(post);
    return out;
}

FilterStudyResult run_filter_study(const FilterStudyConfig& cfg) {
    const std::vector<Mat> truth = gen_trajectory(cfg.trajectory);
    const double dt = 1.0 / cfg.filter.predict_rate_hz;
    const double update_period = 1.0 / cfg.filter.update_rate_hz;

    // True rates from consecutive attitudes: R_{k+1} = exp(-w_x dt) R_k.
    std::vector<Eigen::Vector3d> omega_true(truth.size(), Eigen::Vector3d::Zero());
    for (std::size_t k = 0; k + 1 < truth.size(); ++k) {
        const Eigen::Matrix3d rel = truth[k + 1] * truth[k].transpose();
        const Eigen::AngleAxisd aa(rel);
        omega_true[k] = -(aa.angle() / dt) * aa.axis();
    }

    std::mt19937_64 gyro_rng(derive_seed(cfg.seed, 0xF1));
    std::mt19937_64 meas_rng(derive_seed(cfg.seed, 0xF2));
    std::normal_distribution<double> gauss(0.0, 1.0);

    ScenarioSpec meas_scenario;
    meas_scenario.n = 3;
    meas_scenario.num_vectors = cfg.meas_vectors;
    meas_scenario.num_handeyes = cfg.meas_handeyes;
    meas_scenario.kind = cfg.kind;
    meas_scenario.noise = cfg.noise;

    FilterState state = make_initial_state(cfg.filter);
    state.x = vec(truth.front());  // start aligned; bias still unknown

    FilterStudyResult result;
    result.rows.reserve(truth.size());
    double next_update = update_period;
    int nis_ok = 0;

    for (std::size_t k = 0; k + 1 < truth.size(); ++k) {
        GyroSample gyro;
        gyro.t = state.t;
        gyro.omega = omega_true[k] + cfg.true_bias +
                     cfg.filter.sigma_omega *
                         Eigen::Vector3d(gauss(gyro_rng), gauss(gyro_rng), gauss(gyro_rng));
        state = predict(state, gyro, dt, cfg.filter);

        FilterLogRow row;
        row.nis = std::numeric_limits<double>::quiet_NaN();
        if (state.t + 1e-12 >= next_update) {
            next_update += update_period;
            const Mat& R_true = truth[k + 1];
            const MeasurementSet ms = synth_measurements(R_true, meas_scenario, meas_rng);
            const AttitudeSolution sol = solve_unified(ms);
            const SolutionCovariance cov = solution_covariance(ms, sol, assemble_blocks(ms));
            UpdateResult up = update(state, sol, cov.sigma_xx);
            state = std::move(up.state);
            row.nis = up.nis;
            ++result.updates;
            if (up.nis >= kNisChi9Lower && up.nis <= kNisChi9Upper) ++nis_ok;
        }

        row.t = state.t;
        const Eigen::Quaterniond q(Eigen::Matrix3d(mat(state.x, 3, 3)));
        row.quat << q.w(), q.x(), q.y(), q.z();
        row.bias = state.bias;
        row.eta = rotation_error(project_svd(mat(state.x, 3, 3)).R, truth[k + 1]);
        result.rows.push_back(row);
    }

    result.final_bias = state.bias;
    const double bias_scale = cfg.true_bias.norm();
    result.bias_rel_error = bias_scale > 0.0
                                ? (state.bias - cfg.true_bias).norm() / bias_scale
                                : state.bias.norm();
    result.nis_within_band =
        result.updates > 0 ? static_cast<double>(nis_ok) / result.updates : 0.0;
    result.final_eta = result.rows.empty() ? 0.0 : result.rows.back().eta;
    return result;
}

}  // namespace attdet
