#include "attdet/simulation.hpp"

#include "attdet/covariance.hpp"
#include "attdet/projection.hpp"
#include "attdet/solver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace attdet {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b,
                          std::uint64_t c) {
    auto mix = [](std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    };
    std::uint64_t h = mix(seed);
    h = mix(h ^ mix(a + 1));
    h = mix(h ^ mix(b + 2));
    h = mix(h ^ mix(c + 3));
    return h;
}

const char* to_string(TrajectoryKind kind) {
    switch (kind) {
        case TrajectoryKind::quat_sinusoid_41: return "quat_sinusoid_41";
        case TrajectoryKind::quat_sinusoid_44: return "quat_sinusoid_44";
        case TrajectoryKind::constant: return "constant";
        case TrajectoryKind::custom: return "custom";
    }
    return "unknown";
}

const char* to_string(HandEyeKind kind) {
    return kind == HandEyeKind::rigid ? "rigid" : "symmetric";
}

std::vector<Mat> gen_trajectory(const TrajectorySpec& ts) {
    if (ts.length < 1) throw std::invalid_argument("gen_trajectory: length must be >= 1");
    if (ts.sample_period <= 0.0) {
        throw std::invalid_argument("gen_trajectory: sample period must be positive");
    }
    std::vector<Mat> out;
    out.reserve(ts.length);
    if (ts.kind == TrajectoryKind::constant) {
        out.assign(ts.length, Mat::Identity(3, 3));
        return out;
    }

    Eigen::Vector4d rate;
    Eigen::Vector4d phase;
    switch (ts.kind) {
        case TrajectoryKind::quat_sinusoid_41:
            rate << -0.8334, -1.5833, 3.0038, -1.1200;
            rate *= 2e-3;
            phase << 1.3679, -0.1479, 2.0061, -0.0179;
            break;
        case TrajectoryKind::quat_sinusoid_44:
            rate << -0.12352, -0.31294, 0.62993, -0.27127;
            rate *= ts.sample_period;
            phase << -0.74532, -0.24811, 0.66610, -0.54501;
            break;
        default:
            rate = ts.freq * ts.sample_period;
            phase = ts.phase;
            break;
    }
    for (int k = 1; k <= ts.length; ++k) {
        Eigen::Vector4d q = (rate * static_cast<double>(k) + phase).array().sin();
        q.normalize();
        out.push_back(Eigen::Quaterniond(q(0), q(1), q(2), q(3)).toRotationMatrix());
    }
    return out;
}

Vec random_unit_vector(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Vec v(n);
    do {
        for (int i = 0; i < n; ++i) v(i) = gauss(rng);
    } while (v.norm() < 1e-12);
    return v.normalized();
}

Mat random_rotation(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Mat A(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) A(i, j) = gauss(rng);
    }
    Eigen::HouseholderQR<Mat> qr(A);
    Mat Q = qr.householderQ();
    const Mat R = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int i = 0; i < n; ++i) {
        if (R(i, i) < 0.0) Q.col(i) = -Q.col(i);
    }
    if (Q.determinant() < 0.0) Q.col(n - 1) = -Q.col(n - 1);
    return Q;
}

Mat random_symmetric(int n, std::mt19937_64& rng, double eig_lo, double eig_hi) {
    const Mat V = random_rotation(n, rng);
    std::uniform_real_distribution<double> unif(eig_lo, eig_hi);
    Vec lambda(n);
    for (int i = 0; i < n; ++i) lambda(i) = unif(rng);
    return V * lambda.asDiagonal() * V.transpose();
}

MeasurementSet synth_measurements(const Mat& R_true, const ScenarioSpec& scenario,
                                  std::mt19937_64& rng) {
    const int n = scenario.n;
    if (R_true.rows() != n || R_true.cols() != n) {
        throw std::invalid_argument("synth_measurements: R_true dimension mismatch");
    }
    std::normal_distribution<double> gauss(0.0, 1.0);
    MeasurementSet ms;
    ms.n = n;
    ms.noise = scenario.noise;

    const double b_std = std::sqrt(scenario.noise.eps_vector);
    for (int i = 0; i < scenario.num_vectors; ++i) {
        VectorPair p;
        p.r = random_unit_vector(n, rng);
        p.b = R_true * p.r;
        for (int k = 0; k < n; ++k) p.b(k) += b_std * gauss(rng);
        p.w = 1.0;
        ms.vectors.push_back(std::move(p));
    }

    const double he_std = scenario.noise.eps_handeye;  // entrywise MN(0, eps I, eps I)
    for (int i = 0; i < scenario.num_handeyes; ++i) {
        HandEyePair p;
        p.B = scenario.kind == HandEyeKind::rigid ? random_rotation(n, rng)
                                                  : random_symmetric(n, rng);
        p.A = R_true * p.B * R_true.transpose();
        if (he_std > 0.0) {
            Mat xi(n, n);
            for (int r = 0; r < n; ++r) {
                for (int c = 0; c < n; ++c) xi(r, c) = he_std * gauss(rng);
            }
            // A <- A + Xi R^T makes the residual A R - R B equal Xi exactly.
            p.A += xi * R_true.transpose();
        }
        p.v = 1.0;
        ms.handeyes.push_back(std::move(p));
    }
    return ms;
}

namespace {

TrialRecord run_trial(const ScenarioSpec& scenario, const Mat& R_true, int trial) {
    std::mt19937_64 rng(derive_seed(scenario.seed, scenario.num_vectors,
                                    scenario.num_handeyes * 2 + static_cast<int>(scenario.kind),
                                    trial));
    const MeasurementSet ms = synth_measurements(R_true, scenario, rng);

    TrialRecord rec;
    rec.trial = trial;
    rec.x_true = vec(R_true);

    const AttitudeSolution sol =
        ms.num_vectors() > 0 ? solve_unified(ms) : solve_handeye_only(ms);
    const SolutionCovariance cov = solution_covariance(ms, sol, assemble_blocks(ms));

    rec.x_est = sol.x;
    rec.loss = sol.loss;
    rec.sigma3 = 3.0 * cov.sigma_xx.diagonal().cwiseMax(0.0).cwiseSqrt();
    rec.eta = rotation_error(project_svd(mat(sol.x, scenario.n, scenario.n)).R, R_true);
    return rec;
}

CellSummary summarize(const ScenarioSpec& scenario, const std::vector<TrialRecord>& records) {
    CellSummary s;
    s.num_vectors = scenario.num_vectors;
    s.num_handeyes = scenario.num_handeyes;
    s.kind = scenario.kind;
    s.trials = static_cast<int>(records.size());

    std::vector<double> etas;
    etas.reserve(records.size());
    double eta_sum = 0.0;
    double loss_sum = 0.0;
    double s3_sum = 0.0;
    std::int64_t covered = 0;
    std::int64_t total = 0;
    for (const TrialRecord& r : records) {
        etas.push_back(r.eta);
        eta_sum += r.eta;
        loss_sum += r.loss;
        s3_sum += std::sqrt(r.sigma3.squaredNorm() / static_cast<double>(r.sigma3.size()));
        for (Index i = 0; i < r.sigma3.size(); ++i) {
            covered += std::abs(r.x_est(i) - r.x_true(i)) <= r.sigma3(i) ? 1 : 0;
            ++total;
        }
    }
    const double count = static_cast<double>(records.size());
    std::sort(etas.begin(), etas.end());
    s.mean_eta = eta_sum / count;
    s.median_eta = etas[etas.size() / 2];
    s.mean_loss = loss_sum / count;
    s.mean_sigma3_rms = s3_sum / count;
    s.coverage = total > 0 ? static_cast<double>(covered) / static_cast<double>(total) : 0.0;
    return s;
}

}  // namespace

CellResult run_monte_carlo(const ScenarioSpec& scenario, const std::vector<Mat>& trajectory) {
    if (scenario.trials < 1) throw std::invalid_argument("run_monte_carlo: trials must be >= 1");
    if (trajectory.empty()) throw std::invalid_argument("run_monte_carlo: empty trajectory");
    CellResult out;
    out.records.reserve(scenario.trials);
    for (int t = 0; t < scenario.trials; ++t) {
        out.records.push_back(run_trial(scenario, trajectory[t % trajectory.size()], t));
    }
    out.summary = summarize(scenario, out.records);
    return out;
}

SweepResult run_sweep(const SweepSpec& spec, const TrajectorySpec& ts) {
    const std::vector<Mat> trajectory = gen_trajectory(ts);

    std::vector<ScenarioSpec> cells;
    for (HandEyeKind kind : spec.kinds) {
        for (int nv : spec.vector_counts) {
            for (int nh : spec.handeye_counts) {
                ScenarioSpec cell = spec.base;
                cell.num_vectors = nv;
                cell.num_handeyes = nh;
                cell.kind = kind;
                cells.push_back(cell);
            }
        }
    }

    struct Task {
        std::size_t cell;
        int trial;
    };
    std::vector<Task> tasks;
    for (std::size_t c = 0; c < cells.size(); ++c) {
        for (int t = 0; t < cells[c].trials; ++t) tasks.push_back({c, t});
    }

    SweepResult out;
    out.cells.resize(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) {
        out.cells[c].records.resize(cells[c].trials);
    }

    const int jobs = std::max(1, spec.jobs);
    auto worker = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            const Task& task = tasks[i];
            const ScenarioSpec& sc = cells[task.cell];
            out.cells[task.cell].records[task.trial] =
                run_trial(sc, trajectory[task.trial % trajectory.size()], task.trial);
        }
    };
    if (jobs == 1) {
        worker(0, tasks.size());
    } else {
        std::vector<std::thread> pool;
        const std::size_t chunk = (tasks.size() + jobs - 1) / jobs;
        for (int j = 0; j < jobs; ++j) {
            const std::size_t begin = std::min(tasks.size(), j * chunk);
            const std::size_t end = std::min(tasks.size(), begin + chunk);
            if (begin < end) pool.emplace_back(worker, begin, end);
        }
        for (std::thread& th : pool) th.join();
    }

    for (std::size_t c = 0; c < cells.size(); ++c) {
        out.cells[c].summary = summarize(cells[c], out.cells[c].records);
    }
    return out;
}

ThreeSigmaSeries three_sigma_series(const std::vector<TrialRecord>& records) {
    if (records.empty()) throw std::invalid_argument("three_sigma_series: no records");
    const Index trials = static_cast<Index>(records.size());
    const Index dim = records.front().x_est.size();
    ThreeSigmaSeries s;
    s.estimate.resize(trials, dim);
    s.truth.resize(trials, dim);
    s.lower.resize(trials, dim);
    s.upper.resize(trials, dim);
    std::int64_t covered = 0;
    double width_sum = 0.0;
    for (Index t = 0; t < trials; ++t) {
        const TrialRecord& r = records[t];
        s.estimate.row(t) = r.x_est.transpose();
        s.truth.row(t) = r.x_true.transpose();
        s.lower.row(t) = (r.x_est - r.sigma3).transpose();
        s.upper.row(t) = (r.x_est + r.sigma3).transpose();
        for (Index i = 0; i < dim; ++i) {
            covered += (r.x_true(i) >= s.lower(t, i) && r.x_true(i) <= s.upper(t, i)) ? 1 : 0;
        }
        width_sum += std::sqrt(r.sigma3.squaredNorm() / static_cast<double>(dim));
    }
    s.coverage = static_cast<double>(covered) / static_cast<double>(trials * dim);
    s.mean_width_rms = width_sum / static_cast<double>(trials);
    return s;
}

}  // namespace attdet
