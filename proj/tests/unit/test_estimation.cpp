#include "attdet/estimation.hpp"

#include "attdet/covariance.hpp"
#include "attdet/projection.hpp"
#include "support/test_helpers.hpp"

#include <doctest.h>

#include <cmath>

using namespace attdet;

namespace {

FilterConfig quiet_config() {
    FilterConfig cfg;
    cfg.sigma_omega = 0.0;
    cfg.sigma_bias = 0.0;
    return cfg;
}

}  // namespace

TEST_CASE("predict leaves attitude fixed when rates cancel the bias") {
    FilterConfig cfg;
    FilterState s = make_initial_state(cfg);
    s.bias = Eigen::Vector3d(0.1, -0.2, 0.05);
    GyroSample gyro;
    gyro.omega = s.bias;
    const FilterState next = predict(s, gyro, 1e-3, cfg);
    CHECK((next.x - s.x).norm() <= 1e-15);
    CHECK(next.bias.isApprox(s.bias));
}

TEST_CASE("predict composes an axis rotation") {
    FilterConfig cfg;
    FilterState s = make_initial_state(cfg);
    const double theta = 0.25;
    const double dt = 0.5;
    GyroSample gyro;
    gyro.omega = Eigen::Vector3d(0, 0, theta / dt);
    const FilterState next = predict(s, gyro, dt, cfg);
    const Mat expected =
        Eigen::AngleAxisd(-theta, Eigen::Vector3d::UnitZ()).toRotationMatrix();
    CHECK((mat(next.x, 3, 3) - expected).norm() <= 1e-12);
}

TEST_CASE("predict sub-stepping consistency") {
    FilterConfig cfg;
    FilterState one = make_initial_state(cfg);
    FilterState many = one;
    GyroSample gyro;
    gyro.omega = Eigen::Vector3d(0.3, -0.7, 0.4);
    one = predict(one, gyro, 1.0, cfg);
    for (int i = 0; i < 1000; ++i) many = predict(many, gyro, 1e-3, cfg);
    CHECK((mat(one.x, 3, 3) - mat(many.x, 3, 3)).norm() <= 1e-6);
}

TEST_CASE("update limits") {
    FilterConfig cfg;
    FilterState s = make_initial_state(cfg);
    std::mt19937_64 rng(191);
    const Mat R_meas = random_rotation(3, rng);
    AttitudeSolution sol;
    sol.x = vec(R_meas);
    sol.normal_matrix = Mat::Identity(9, 9);

    // perfect measurement pulls the state onto it
    UpdateResult perfect = update(s, sol, Mat::Zero(9, 9));
    CHECK((perfect.state.x - sol.x).norm() <= 1e-9);

    // uninformative measurement leaves the prior
    UpdateResult vague = update(s, sol, 1e9 * Mat::Identity(9, 9));
    CHECK((vague.state.x - s.x).norm() <= 1e-6);

    Mat bad = -Mat::Identity(9, 9);
    CHECK_THROWS_AS(update(s, sol, bad), std::invalid_argument);
}

TEST_CASE("covariance stays symmetric PSD through predict/update") {
    FilterConfig cfg;
    FilterState s = make_initial_state(cfg);
    std::mt19937_64 rng(193);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int k = 0; k < 50; ++k) {
        GyroSample gyro;
        gyro.omega = Eigen::Vector3d(gauss(rng), gauss(rng), gauss(rng));
        s = predict(s, gyro, 1e-3, cfg);
        if (k % 5 == 0) {
            AttitudeSolution sol;
            sol.x = vec(random_rotation(3, rng));
            UpdateResult up = update(s, sol, 1e-4 * Mat::Identity(9, 9));
            s = up.state;
        }
        CHECK((s.cov - s.cov.transpose()).norm() <= 1e-12 * s.cov.norm());
        Eigen::SelfAdjointEigenSolver<Mat> eig(s.cov);
        CHECK(eig.eigenvalues()(0) >= -1e-12 * s.cov.trace());
    }
}

TEST_CASE("exact tracking with zero noise") {
    TrajectorySpec ts{TrajectoryKind::quat_sinusoid_44, 1000, 1e-3};
    const std::vector<Mat> truth = gen_trajectory(ts);
    const double dt = 1e-3;

    FilterConfig cfg = quiet_config();
    FilterState s = make_initial_state(cfg);
    s.x = vec(truth.front());
    for (std::size_t k = 0; k + 1 < truth.size(); ++k) {
        const Eigen::Matrix3d rel = truth[k + 1] * truth[k].transpose();
        const Eigen::AngleAxisd aa(rel);
        GyroSample gyro;
        gyro.omega = -(aa.angle() / dt) * aa.axis();
        s = predict(s, gyro, dt, cfg);
    }
    CHECK(rotation_error(project_svd(mat(s.x, 3, 3)).R, truth.back()) <= 1e-8);
}

TEST_CASE("filter study shrinks the bias error") {
    FilterStudyConfig cfg;
    cfg.trajectory.length = 4000;  // 4 s at 1 kHz
    cfg.meas_vectors = 10;
    cfg.seed = 99;
    const FilterStudyResult result = run_filter_study(cfg);
    CHECK(result.updates > 100);
    // started at zero bias estimate, so relative error 1.0
    CHECK(result.bias_rel_error < 0.5);
    CHECK(result.rows.size() == 3999);
    CHECK(std::isfinite(result.final_eta));
}

TEST_CASE("constant-attitude bias convergence over 60 s") {
    FilterStudyConfig cfg;
    cfg.trajectory.kind = TrajectoryKind::constant;
    cfg.trajectory.length = 60000;
    cfg.meas_vectors = 10;
    cfg.seed = 314;
    const FilterStudyResult result = run_filter_study(cfg);
    CHECK(result.bias_rel_error <= 0.10);
    CHECK(result.nis_within_band >= 0.90);
}

TEST_CASE("zero-noise filter study is exact") {
    FilterStudyConfig cfg;
    cfg.trajectory.length = 2000;
    cfg.true_bias.setZero();
    cfg.noise.eps_vector = 0.0;
    cfg.noise.eps_handeye = 0.0;
    cfg.filter.sigma_omega = 0.0;
    cfg.filter.sigma_bias = 0.0;
    const FilterStudyResult result = run_filter_study(cfg);
    CHECK(result.final_eta <= 1e-6);
}
