#include "attdet/io.hpp"

#include "attdet/version.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace attdet {

namespace {

[[noreturn]] void fail_field(const std::string& what, const std::string& why) {
    throw std::invalid_argument("field '" + what + "': " + why);
}

std::vector<Mat> matrix_list_from_json(const Json& j, const char* what) {
    std::vector<Mat> out;
    for (const Json& item : j) out.push_back(matrix_from_json(item, what));
    return out;
}

Json matrix_list_to_json(const std::vector<Mat>& blocks) {
    Json j = Json::array();
    for (const Mat& b : blocks) j.push_back(matrix_to_json(b));
    return j;
}

}  // namespace

Json matrix_to_json(const Mat& X) {
    Json rows = Json::array();
    for (Index i = 0; i < X.rows(); ++i) {
        Json row = Json::array();
        for (Index j = 0; j < X.cols(); ++j) row.push_back(X(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

Mat matrix_from_json(const Json& j, const char* what) {
    if (!j.is_array() || j.empty() || !j[0].is_array()) {
        fail_field(what, "expected a nested array of rows");
    }
    const Index rows = static_cast<Index>(j.size());
    const Index cols = static_cast<Index>(j[0].size());
    Mat X(rows, cols);
    for (Index r = 0; r < rows; ++r) {
        if (!j[r].is_array() || static_cast<Index>(j[r].size()) != cols) {
            fail_field(what, "ragged rows");
        }
        for (Index c = 0; c < cols; ++c) {
            if (!j[r][c].is_number()) fail_field(what, "non-numeric entry");
            X(r, c) = j[r][c].get<double>();
        }
    }
    return X;
}

Json vector_to_json(const Vec& v) {
    Json j = Json::array();
    for (Index i = 0; i < v.size(); ++i) j.push_back(v(i));
    return j;
}

Vec vector_from_json(const Json& j, const char* what) {
    if (!j.is_array()) fail_field(what, "expected an array");
    Vec v(static_cast<Index>(j.size()));
    for (Index i = 0; i < v.size(); ++i) {
        if (!j[i].is_number()) fail_field(what, "non-numeric entry");
        v(i) = j[i].get<double>();
    }
    return v;
}

Json to_json(const NoiseSpec& noise) {
    Json j;
    j["eps_vector"] = noise.eps_vector;
    j["eps_handeye"] = noise.eps_handeye;
    if (!noise.sigma_b.empty()) j["sigma_b"] = matrix_list_to_json(noise.sigma_b);
    if (!noise.sigma_r.empty()) j["sigma_r"] = matrix_list_to_json(noise.sigma_r);
    if (!noise.sigma_br.empty()) j["sigma_br"] = matrix_list_to_json(noise.sigma_br);
    if (!noise.sigma_vec_a.empty()) j["sigma_vec_a"] = matrix_list_to_json(noise.sigma_vec_a);
    if (!noise.sigma_vec_b.empty()) j["sigma_vec_b"] = matrix_list_to_json(noise.sigma_vec_b);
    if (!noise.sigma_vec_ab.empty()) j["sigma_vec_ab"] = matrix_list_to_json(noise.sigma_vec_ab);
    return j;
}

NoiseSpec noise_from_json(const Json& j) {
    NoiseSpec noise;
    if (j.contains("eps_vector")) {
        if (!j["eps_vector"].is_number()) fail_field("noise.eps_vector", "must be a number");
        noise.eps_vector = j["eps_vector"].get<double>();
    }
    if (j.contains("eps_handeye")) {
        if (!j["eps_handeye"].is_number()) fail_field("noise.eps_handeye", "must be a number");
        noise.eps_handeye = j["eps_handeye"].get<double>();
    }
    if (j.contains("sigma_b")) noise.sigma_b = matrix_list_from_json(j["sigma_b"], "noise.sigma_b");
    if (j.contains("sigma_r")) noise.sigma_r = matrix_list_from_json(j["sigma_r"], "noise.sigma_r");
    if (j.contains("sigma_br")) {
        noise.sigma_br = matrix_list_from_json(j["sigma_br"], "noise.sigma_br");
    }
    if (j.contains("sigma_vec_a")) {
        noise.sigma_vec_a = matrix_list_from_json(j["sigma_vec_a"], "noise.sigma_vec_a");
    }
    if (j.contains("sigma_vec_b")) {
        noise.sigma_vec_b = matrix_list_from_json(j["sigma_vec_b"], "noise.sigma_vec_b");
    }
    if (j.contains("sigma_vec_ab")) {
        noise.sigma_vec_ab = matrix_list_from_json(j["sigma_vec_ab"], "noise.sigma_vec_ab");
    }
    return noise;
}

Json to_json(const MeasurementSet& ms) {
    Json j;
    j["n"] = ms.n;
    Json vectors = Json::array();
    for (const VectorPair& p : ms.vectors) {
        Json v;
        v["b"] = vector_to_json(p.b);
        v["r"] = vector_to_json(p.r);
        v["w"] = p.w;
        vectors.push_back(std::move(v));
    }
    j["vectors"] = std::move(vectors);
    Json handeyes = Json::array();
    for (const HandEyePair& p : ms.handeyes) {
        Json h;
        h["A"] = matrix_to_json(p.A);
        h["B"] = matrix_to_json(p.B);
        h["v"] = p.v;
        handeyes.push_back(std::move(h));
    }
    j["handeyes"] = std::move(handeyes);
    j["noise"] = to_json(ms.noise);
    return j;
}

MeasurementSet measurement_set_from_json(const Json& j) {
    MeasurementSet ms;
    if (!j.contains("n") || !j["n"].is_number_integer()) fail_field("n", "required integer");
    ms.n = j["n"].get<int>();
    if (j.contains("vectors")) {
        if (!j["vectors"].is_array()) fail_field("vectors", "must be an array");
        for (const Json& item : j["vectors"]) {
            VectorPair p;
            if (!item.contains("b") || !item.contains("r")) {
                fail_field("vectors[i]", "needs 'b' and 'r'");
            }
            p.b = vector_from_json(item["b"], "vectors[i].b");
            p.r = vector_from_json(item["r"], "vectors[i].r");
            p.w = item.value("w", 1.0);
            ms.vectors.push_back(std::move(p));
        }
    }
    if (j.contains("handeyes")) {
        if (!j["handeyes"].is_array()) fail_field("handeyes", "must be an array");
        for (const Json& item : j["handeyes"]) {
            HandEyePair p;
            if (!item.contains("A") || !item.contains("B")) {
                fail_field("handeyes[i]", "needs 'A' and 'B'");
            }
            p.A = matrix_from_json(item["A"], "handeyes[i].A");
            p.B = matrix_from_json(item["B"], "handeyes[i].B");
            p.v = item.value("v", 1.0);
            ms.handeyes.push_back(std::move(p));
        }
    }
    if (j.contains("noise")) ms.noise = noise_from_json(j["noise"]);
    ms.validate();
    return ms;
}

Json to_json(const TrajectorySpec& ts) {
    Json j;
    j["kind"] = to_string(ts.kind);
    j["length"] = ts.length;
    j["sample_period"] = ts.sample_period;
    if (ts.kind == TrajectoryKind::custom) {
        j["freq"] = {ts.freq(0), ts.freq(1), ts.freq(2), ts.freq(3)};
        j["phase"] = {ts.phase(0), ts.phase(1), ts.phase(2), ts.phase(3)};
    }
    return j;
}

TrajectorySpec trajectory_from_json(const Json& j) {
    TrajectorySpec ts;
    const std::string kind = j.value("kind", "quat_sinusoid_41");
    if (kind == "quat_sinusoid_41") {
        ts.kind = TrajectoryKind::quat_sinusoid_41;
    } else if (kind == "quat_sinusoid_44") {
        ts.kind = TrajectoryKind::quat_sinusoid_44;
    } else if (kind == "constant") {
        ts.kind = TrajectoryKind::constant;
    } else if (kind == "custom") {
        ts.kind = TrajectoryKind::custom;
    } else {
        fail_field("trajectory.kind", "unknown kind '" + kind + "'");
    }
    ts.length = j.value("length", 1);
    ts.sample_period = j.value("sample_period", 1e-3);
    if (j.contains("freq")) {
        const Vec f = vector_from_json(j["freq"], "trajectory.freq");
        if (f.size() != 4) fail_field("trajectory.freq", "must have 4 entries");
        ts.freq = f;
    }
    if (j.contains("phase")) {
        const Vec p = vector_from_json(j["phase"], "trajectory.phase");
        if (p.size() != 4) fail_field("trajectory.phase", "must have 4 entries");
        ts.phase = p;
    }
    if (ts.length < 1) fail_field("trajectory.length", "must be >= 1");
    return ts;
}

Json to_json(const ScenarioSpec& sc) {
    Json j;
    j["n"] = sc.n;
    j["num_vectors"] = sc.num_vectors;
    j["num_handeyes"] = sc.num_handeyes;
    j["kind"] = to_string(sc.kind);
    j["noise"] = to_json(sc.noise);
    j["trials"] = sc.trials;
    j["seed"] = sc.seed;
    return j;
}

ScenarioSpec scenario_from_json(const Json& j) {
    ScenarioSpec sc;
    sc.n = j.value("n", 3);
    sc.num_vectors = j.value("num_vectors", 3);
    sc.num_handeyes = j.value("num_handeyes", 0);
    const std::string kind = j.value("kind", "rigid");
    if (kind == "rigid") {
        sc.kind = HandEyeKind::rigid;
    } else if (kind == "symmetric") {
        sc.kind = HandEyeKind::symmetric;
    } else {
        fail_field("scenario.kind", "must be 'rigid' or 'symmetric'");
    }
    if (j.contains("noise")) sc.noise = noise_from_json(j["noise"]);
    sc.trials = j.value("trials", 1);
    sc.seed = j.value("seed", kDefaultSeed);
    if (sc.trials < 1) fail_field("scenario.trials", "must be >= 1");
    if (sc.num_vectors + sc.num_handeyes < 1) fail_field("scenario", "N + M must be >= 1");
    return sc;
}

Json to_json(const FilterStudyConfig& fc) {
    Json j;
    j["trajectory"] = to_json(fc.trajectory);
    j["true_bias"] = {fc.true_bias(0), fc.true_bias(1), fc.true_bias(2)};
    j["sigma_omega"] = fc.filter.sigma_omega;
    j["sigma_bias"] = fc.filter.sigma_bias;
    j["predict_rate_hz"] = fc.filter.predict_rate_hz;
    j["update_rate_hz"] = fc.filter.update_rate_hz;
    j["initial_cov"] = fc.filter.initial_cov;
    j["meas_vectors"] = fc.meas_vectors;
    j["meas_handeyes"] = fc.meas_handeyes;
    j["kind"] = to_string(fc.kind);
    j["noise"] = to_json(fc.noise);
    j["seed"] = fc.seed;
    return j;
}

FilterStudyConfig filter_study_from_json(const Json& j) {
    FilterStudyConfig fc;
    if (j.contains("trajectory")) fc.trajectory = trajectory_from_json(j["trajectory"]);
    if (j.contains("true_bias")) {
        const Vec b = vector_from_json(j["true_bias"], "true_bias");
        if (b.size() != 3) fail_field("true_bias", "must have 3 entries");
        fc.true_bias = b;
    }
    fc.filter.sigma_omega = j.value("sigma_omega", 1e-2);
    fc.filter.sigma_bias = j.value("sigma_bias", 1e-3);
    fc.filter.predict_rate_hz = j.value("predict_rate_hz", 1000.0);
    fc.filter.update_rate_hz = j.value("update_rate_hz", 120.0);
    fc.filter.initial_cov = j.value("initial_cov", 1e-1);
    fc.meas_vectors = j.value("meas_vectors", 30);
    fc.meas_handeyes = j.value("meas_handeyes", 1);
    const std::string kind = j.value("kind", "rigid");
    if (kind == "rigid") {
        fc.kind = HandEyeKind::rigid;
    } else if (kind == "symmetric") {
        fc.kind = HandEyeKind::symmetric;
    } else {
        fail_field("filter.kind", "must be 'rigid' or 'symmetric'");
    }
    if (j.contains("noise")) fc.noise = noise_from_json(j["noise"]);
    fc.seed = j.value("seed", kDefaultSeed);
    if (fc.filter.predict_rate_hz <= 0.0 || fc.filter.update_rate_hz <= 0.0 ||
        fc.filter.predict_rate_hz < fc.filter.update_rate_hz) {
        fail_field("filter rates", "need predict_rate_hz >= update_rate_hz > 0");
    }
    return fc;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_sweep_csv(const std::string& path, const std::string& scenario_id,
                     const SweepResult& result, std::uint64_t seed) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    os << "scenario_id,N,M,kind,trial,eta_rad,loss,sigma3_rms,seed\n";
    for (const CellResult& cell : result.cells) {
        for (const TrialRecord& r : cell.records) {
            const double s3rms =
                std::sqrt(r.sigma3.squaredNorm() / static_cast<double>(r.sigma3.size()));
            os << scenario_id << ',' << cell.summary.num_vectors << ','
               << cell.summary.num_handeyes << ',' << to_string(cell.summary.kind) << ','
               << r.trial << ',' << format_double(r.eta) << ',' << format_double(r.loss) << ','
               << format_double(s3rms) << ',' << seed << '\n';
        }
    }
}

void write_summary_csv(const std::string& path, const std::string& scenario_id,
                       const SweepResult& result) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    os << "scenario_id,N,M,kind,trials,mean_eta,median_eta,mean_loss,mean_sigma3_rms,"
          "coverage3s\n";
    for (const CellResult& cell : result.cells) {
        const CellSummary& s = cell.summary;
        os << scenario_id << ',' << s.num_vectors << ',' << s.num_handeyes << ','
           << to_string(s.kind) << ',' << s.trials << ',' << format_double(s.mean_eta) << ','
           << format_double(s.median_eta) << ',' << format_double(s.mean_loss) << ','
           << format_double(s.mean_sigma3_rms) << ',' << format_double(s.coverage) << '\n';
    }
}

void write_filter_csv(const std::string& path, const std::vector<FilterLogRow>& rows) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    os << "t,q0,q1,q2,q3,bias_x,bias_y,bias_z,nis\n";
    for (const FilterLogRow& r : rows) {
        os << format_double(r.t);
        for (int i = 0; i < 4; ++i) os << ',' << format_double(r.quat(i));
        for (int i = 0; i < 3; ++i) os << ',' << format_double(r.bias(i));
        os << ',' << (std::isnan(r.nis) ? std::string() : format_double(r.nis)) << '\n';
    }
}

Json metadata_json(std::uint64_t seed, const Json& resolved_config) {
    Json j;
    j["tool"] = "attdet";
    j["version"] = kVersion;
    j["seed"] = seed;
    j["config"] = resolved_config;
    return j;
}

void write_json_file(const std::string& path, const Json& j) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    os << j.dump(2) << '\n';
}

Json read_json_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open " + path);
    Json j;
    is >> j;
    return j;
}

}  // namespace attdet
