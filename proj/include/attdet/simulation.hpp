#pragma once

#include "attdet/matcore.hpp"
#include "attdet/measurements.hpp"

#include <cstdint>
#include <vector>

namespace attdet {

inline constexpr std::uint64_t kDefaultSeed = 42;

/// Derives an independent substream seed from a base seed and up to three
/// indices (splitmix64 mixing). Trials seeded this way are reproducible
/// regardless of execution order.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0,
                          std::uint64_t c = 0);

enum class TrajectoryKind { quat_sinusoid_41, quat_sinusoid_44, constant, custom };

const char* to_string(TrajectoryKind kind);

/// Attitude profile generator settings. The two sinusoid kinds draw unit
/// quaternions from component-wise sine models with fixed coefficient/phase
/// vectors; custom uses the supplied freq/phase with the sample period.
struct TrajectorySpec {
    TrajectoryKind kind = TrajectoryKind::quat_sinusoid_41;
    int length = 1;
    double sample_period = 1e-3;  // seconds, quat_sinusoid_44 / custom
    Eigen::Vector4d freq = Eigen::Vector4d::Zero();
    Eigen::Vector4d phase = Eigen::Vector4d::Zero();
};

/// Rotation-matrix sequence for the spec; every output is in SO(3).
std::vector<Mat> gen_trajectory(const TrajectorySpec& ts);

enum class HandEyeKind { rigid, symmetric };

const char* to_string(HandEyeKind kind);

/// One Monte Carlo cell: N vector pairs and M hand-eye pairs of a given kind
/// at the given noise, repeated over trials.
struct ScenarioSpec {
    int n = 3;
    int num_vectors = 3;
    int num_handeyes = 0;
    HandEyeKind kind = HandEyeKind::rigid;
    NoiseSpec noise;
    int trials = 1;
    std::uint64_t seed = kDefaultSeed;
};

Vec random_unit_vector(int n, std::mt19937_64& rng);

/// Haar-ish uniform rotation via QR of a Gaussian matrix with determinant fix.
Mat random_rotation(int n, std::mt19937_64& rng);

/// Random symmetric matrix V diag(lambda) V^T with eigenvalues uniform in
/// [eig_lo, eig_hi] (kept away from singular to mimic well-posed conics).
Mat random_symmetric(int n, std::mt19937_64& rng, double eig_lo = 0.5, double eig_hi = 2.0);

/// Synthesizes one measurement set at the given true attitude:
/// r_i uniform on the sphere, b_i = R r_i + eps with eps ~ N(0, eps_vector I);
/// B_i rigid (uniform SO(n)) or symmetric, A_i = R B_i R^T perturbed by
/// Xi R^T with Xi ~ MN(0, eps_handeye I, eps_handeye I) so that
/// A_i R - R B_i = Xi exactly.
MeasurementSet synth_measurements(const Mat& R_true, const ScenarioSpec& scenario,
                                  std::mt19937_64& rng);

/// One trial outcome: truth, estimate, rotation error, 3-sigma diagnostics.
struct TrialRecord {
    int trial = 0;
    Vec x_true;
    Vec x_est;
    double eta = 0.0;
    Vec sigma3;  // 3 sqrt(diag(Sigma_xx))
    double loss = 0.0;
};

struct CellSummary {
    int num_vectors = 0;
    int num_handeyes = 0;
    HandEyeKind kind = HandEyeKind::rigid;
    int trials = 0;
    double mean_eta = 0.0;
    double median_eta = 0.0;
    double mean_loss = 0.0;
    double mean_sigma3_rms = 0.0;
    double coverage = 0.0;  // fraction of components with truth inside +-3 sigma
};

struct CellResult {
    CellSummary summary;
    std::vector<TrialRecord> records;
};

/// Runs the trials of one cell: synthesize, solve, propagate covariance,
/// project (SVD) and score. trajectory supplies the per-trial true attitude
/// (cycled when shorter than trials). Deterministic for a fixed seed.
CellResult run_monte_carlo(const ScenarioSpec& scenario, const std::vector<Mat>& trajectory);

/// Cartesian sweep over vector/hand-eye counts and pair kinds.
struct SweepSpec {
    ScenarioSpec base;
    std::vector<int> vector_counts{1, 2, 3, 4, 5};
    std::vector<int> handeye_counts{1, 2, 3, 4, 5};
    std::vector<HandEyeKind> kinds{HandEyeKind::rigid};
    int jobs = 1;
};

struct SweepResult {
    std::vector<CellResult> cells;
};

/// Runs every cell of the sweep, fanning trials across jobs worker threads.
/// Results are identical for any jobs value.
SweepResult run_sweep(const SweepSpec& spec, const TrajectorySpec& ts);

/// Per-component estimate/truth series with the +-3 sigma envelope.
struct ThreeSigmaSeries {
    Mat estimate;  // trials x n^2
    Mat truth;
    Mat lower;
    Mat upper;
    double coverage = 0.0;
    double mean_width_rms = 0.0;
};

ThreeSigmaSeries three_sigma_series(const std::vector<TrialRecord>& records);

}  // namespace attdet
