#include "attdet/projection.hpp"

#include "attdet/simulation.hpp"
#include "support/test_helpers.hpp"

#include <doctest.h>

#include <cmath>

using namespace attdet;

TEST_CASE("project_svd basics") {
    const Mat I3 = Mat::Identity(3, 3);
    CHECK(project_svd(I3).R.isApprox(I3, 1e-14));

    std::mt19937_64 rng(101);
    const Mat R = random_rotation(3, rng);
    CHECK(project_svd(2.0 * R).R.isApprox(R, 1e-12));
    // idempotence on the manifold
    CHECK(project_svd(R).R.isApprox(R, 1e-12));

    // determinant correction engages on negated input
    CHECK(project_svd(-R).R.determinant() == doctest::Approx(1.0).epsilon(1e-10));

    // rank-deficient input sets the ill-conditioned flag but still projects
    Mat planar = Mat::Zero(3, 3);
    planar(0, 0) = 1.0;
    planar(1, 1) = 0.5;
    const RotationEstimate flat = project_svd(planar);
    CHECK(flat.ill_conditioned);
    CHECK((flat.R.transpose() * flat.R - I3).norm() <= 1e-12);
    CHECK(flat.R.determinant() == doctest::Approx(1.0));

    CHECK_THROWS_AS(project_svd(Mat::Zero(3, 3)), std::invalid_argument);
}

TEST_CASE("project_svd is the Frobenius-nearest rotation") {
    std::mt19937_64 rng(103);
    std::normal_distribution<double> gauss(0.0, 0.1);
    const Mat R = random_rotation(3, rng);
    Mat xm = R;
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) xm(i, j) += gauss(rng);
    }
    const Mat proj = project_svd(xm).R;
    const double best = (proj - xm).norm();
    for (int trial = 0; trial < 1000; ++trial) {
        CHECK(best <= (random_rotation(3, rng) - xm).norm() + 1e-12);
    }
}

TEST_CASE("project_cayley recovers rotations and matches SVD nearby") {
    const Mat I3 = Mat::Identity(3, 3);
    const RotationEstimate id = project_cayley(I3);
    CHECK(id.R.isApprox(I3, 1e-14));
    CHECK(id.g.g.norm() <= 1e-14);

    std::mt19937_64 rng(107);
    std::normal_distribution<double> gauss(0.0, 1e-3);
    int checked = 0;
    while (checked < 50) {
        const Mat R = random_rotation(3, rng);
        if (rotation_error(R, I3) > M_PI - 0.3) continue;  // Cayley undefined near pi
        ++checked;

        // round-trip against the analytic inverse map
        const RotationEstimate exact = project_cayley(R);
        CHECK((exact.R - R).norm() <= 1e-10);
        CHECK((exact.g.g - cayley_params(R).g).norm() <= 1e-10 * (1.0 + exact.g.g.norm()));

        Mat xm = R;
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) xm(i, j) += gauss(rng);
        }
        CHECK((project_cayley(xm).R - project_svd(xm).R).norm() <= 5e-3);
    }
}

TEST_CASE("project_cayley rejects rotations at pi") {
    Mat flip(3, 3);  // rotation by pi about z
    flip << -1, 0, 0, 0, -1, 0, 0, 0, 1;
    CHECK_THROWS_AS(project_cayley(flip), std::domain_error);
    CHECK_THROWS_AS(cayley_params(flip), std::domain_error);
}

TEST_CASE("cayley involution for large parameters") {
    std::mt19937_64 rng(109);
    std::uniform_real_distribution<double> unif(-10.0, 10.0);
    for (int trial = 0; trial < 50; ++trial) {
        SkewParams g{3, Vec(3)};
        for (int i = 0; i < 3; ++i) g.g(i) = unif(rng);
        const Mat skew = skew_embed(g);
        const Mat R = (Mat::Identity(3, 3) + skew)
                          .partialPivLu()
                          .solve(Mat::Identity(3, 3) - skew);
        CHECK((cayley_params(R).g - g.g).norm() <= 1e-12 * (1.0 + g.g.norm()));
    }
}

TEST_CASE("rotation_error metric") {
    const Mat I3 = Mat::Identity(3, 3);
    CHECK(rotation_error(I3, I3) == doctest::Approx(0.0));

    Mat flip(3, 3);
    flip << -1, 0, 0, 0, -1, 0, 0, 0, 1;
    CHECK(rotation_error(flip, I3) == doctest::Approx(M_PI));

    std::mt19937_64 rng(113);
    const Vec axis = random_unit_vector(3, rng);
    const Mat R = Eigen::AngleAxisd(0.3, Eigen::Vector3d(axis)).toRotationMatrix();
    CHECK(rotation_error(R, I3) == doctest::Approx(0.3).epsilon(1e-12));

    const Mat A = random_rotation(3, rng);
    const Mat B = random_rotation(3, rng);
    CHECK(rotation_error(A, B) == doctest::Approx(rotation_error(B, A)).epsilon(1e-14));

    // n = 4 geodesic metric reduces to the same angle on an embedded rotation
    Mat R4 = Mat::Identity(4, 4);
    R4.topLeftCorner(3, 3) = R;
    CHECK(rotation_error(R4, Mat::Identity(4, 4)) == doctest::Approx(0.3).epsilon(1e-10));
}

TEST_CASE("projections behave for n = 4") {
    std::mt19937_64 rng(127);
    const Mat R = random_rotation(4, rng);
    CHECK(project_svd(1.7 * R).R.isApprox(R, 1e-10));
    if (rotation_error(R, Mat::Identity(4, 4)) < M_PI - 0.3) {
        CHECK((project_cayley(R).R - R).norm() <= 1e-9);
    }
}
