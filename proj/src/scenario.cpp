#include "speckle/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <mutex>
#include <numeric>
#include <thread>

#include <json.hpp>

#include "speckle/classifier.hpp"
#include "speckle/framestore.hpp"
#include "speckle/pipeline.hpp"
#include "speckle/rheocal.hpp"
#include "speckle/stabilizer.hpp"

namespace speckle::scn {

using nlohmann::json;
namespace fs = std::filesystem;

void ScenarioSpec::validate() const {
    if (classes.empty()) throw InvalidArgument("scenario '" + name + "' defines no classes");
    if (train_replicates < 0 || test_replicates < 0 || train_replicates + test_replicates < 1) {
        throw InvalidArgument("scenario needs at least one replicate");
    }
    optics.validate();
    for (const ClassSpec& c : classes) c.liquid.validate();
    if (artifacts) artifacts->validate();
    if (analysis_region < 2) throw InvalidArgument("analysis region too small");
}

namespace {

struct SeedPair {
    std::uint64_t sim;
    std::uint64_t fx;
};

SeedPair sequence_seeds(const ScenarioSpec& scenario, int class_index, int replicate) {
    RngStream s(scenario.seed,
                stream_tag::kScenarioBase + (static_cast<std::uint64_t>(class_index) << 20) + replicate);
    SeedPair p{};
    p.sim = s.next_u64();
    p.fx = s.next_u64();
    return p;
}

// run fn(i) for i in [0, count) on up to `threads` workers
void parallel_for(int count, int threads, const std::function<void(int)>& fn) {
    threads = std::max(1, std::min(threads, count));
    if (threads == 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                }
            }
        });
    }
    for (std::thread& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

std::string replicate_dir(int replicate) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "rep_%03d", replicate);
    return buf;
}

FrameSequence simulate_entry(const ScenarioSpec& scenario, int class_index, int replicate) {
    const SeedPair seeds = sequence_seeds(scenario, class_index, replicate);
    sim::OpticsConfig optics = scenario.optics;
    optics.seed = seeds.sim;
    FrameSequence seq = sim::simulate(scenario.classes[class_index].liquid, optics);
    if (scenario.artifacts) {
        fx::CaptureArtifactConfig cfg = *scenario.artifacts;
        cfg.seed = seeds.fx;
        seq = fx::distort(seq, cfg);
    }
    return seq;
}

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
    const double n = static_cast<double>(a.size());
    const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
    const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
    double cov = 0.0, va = 0.0, vb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        cov += (a[i] - ma) * (b[i] - mb);
        va += (a[i] - ma) * (a[i] - ma);
        vb += (b[i] - mb) * (b[i] - mb);
    }
    if (va == 0.0 || vb == 0.0) return 0.0;
    return cov / std::sqrt(va * vb);
}

} // namespace

std::uint64_t sequence_seed(const ScenarioSpec& scenario, int class_index, int replicate) {
    return sequence_seeds(scenario, class_index, replicate).sim;
}

ScenarioSpec builtin_scenario(const std::string& name) {
    ScenarioSpec s;
    s.name = name;
    s.optics.width = 192;
    s.optics.height = 192;
    s.optics.frames = 12;
    s.optics.seed = 0;
    s.seed = 20240;

    auto add = [&s](const std::string& cls, double eta, double radius, double opacity) {
        ClassSpec c;
        c.name = cls;
        c.label = static_cast<int>(s.classes.size());
        c.liquid.viscosity_pa_s = eta;
        c.liquid.particle_radius_m = radius;
        c.liquid.opacity = opacity;
        s.classes.push_back(c);
    };

    if (name == "blood") {
        // coagulation surrogate: thin vs near-solid
        add("uncoagulated", 4.0e-3, 1.0e-6, 1.0);
        add("coagulated", 10.0, 1.0e-6, 1.0);
        s.train_replicates = 18;
        s.test_replicates = 6;
        s.min_accuracy = 0.95;
        s.require_separation = true;
        s.check_ordering = true;
    } else if (name == "milk") {
        // fat-content ladder; the check is mean-V ordering
        add("skim", 1.4e-3, 1.0e-6, 1.0);
        add("one-percent", 1.8e-3, 1.0e-6, 1.0);
        add("two-percent", 2.4e-3, 1.0e-6, 1.0);
        add("whole", 3.2e-3, 1.0e-6, 1.0);
        add("cream", 8.0e-3, 1.0e-6, 1.0);
        s.train_replicates = 2;
        s.test_replicates = 2;
        s.check_ordering = true;
    } else if (name == "ten-liquids") {
        add("water", 1.0e-3, 0.5e-6, 1.0);
        add("skim-milk", 2.0e-3, 1.0e-6, 1.0);
        add("whole-milk", 4.0e-3, 1.0e-6, 1.0);
        add("cream", 8.0e-3, 1.0e-6, 1.0);
        add("orange-juice", 1.6e-2, 1.0e-6, 0.9);
        add("liquid-soap", 4.0e-2, 1.0e-6, 0.95);
        add("olive-oil", 1.0e-1, 1.2e-6, 1.0);
        add("maple-syrup", 4.0e-1, 1.2e-6, 1.0);
        add("condensed-milk", 2.0, 1.5e-6, 0.85);
        add("honey", 1.0e1, 2.0e-6, 1.0);
        s.train_replicates = 1;
        s.test_replicates = 3;
        s.min_accuracy = 0.90;
    } else if (name == "adulterated-milk") {
        add("pure", 2.4e-3, 1.0e-6, 0.95);
        add("watered", 1.6e-3, 1.0e-6, 0.90);
        add("starch", 4.0e-3, 1.0e-6, 1.0);
        add("detergent", 2.0e-3, 1.0e-6, 0.85);
        s.train_replicates = 2;
        s.test_replicates = 2;
    } else if (name == "dilution") {
        // linear viscosity ramp for calibration; large tracers slow the
        // dynamics into the sensitive part of the V range
        for (int level = 0; level < 8; ++level) {
            const double eta = 2.0e-3 - 1.0e-3 * level / 7.0;
            add("level-" + std::to_string(level), eta, 2.0e-6, 1.0);
        }
        s.train_replicates = 1;
        s.test_replicates = 3;
        s.calibrate = true;
    } else {
        throw InvalidArgument("unknown scenario '" + name + "'");
    }
    return s;
}

std::vector<std::string> builtin_scenario_names() {
    return {"blood", "milk", "ten-liquids", "adulterated-milk", "dilution"};
}

CorpusManifest gen_corpus(const ScenarioSpec& scenario, const fs::path& out_dir, int threads) {
    scenario.validate();

    CorpusManifest manifest;
    manifest.scenario = scenario.name;
    const int replicates = scenario.train_replicates + scenario.test_replicates;
    for (std::size_t ci = 0; ci < scenario.classes.size(); ++ci) {
        for (int rep = 0; rep < replicates; ++rep) {
            CorpusEntry e;
            e.class_name = scenario.classes[ci].name;
            e.label = scenario.classes[ci].label;
            e.replicate = rep;
            e.is_test = rep >= scenario.train_replicates;
            e.seed = sequence_seed(scenario, static_cast<int>(ci), rep);
            e.dir = e.class_name + "/" + replicate_dir(rep);
            manifest.entries.push_back(e);
        }
    }

    fs::create_directories(out_dir);
    const int class_count = static_cast<int>(scenario.classes.size());
    parallel_for(static_cast<int>(manifest.entries.size()), threads, [&](int i) {
        const CorpusEntry& e = manifest.entries[i];
        const int ci = i / replicates;
        (void)class_count;
        const FrameSequence seq = simulate_entry(scenario, ci, e.replicate);
        io::write_sequence(seq, out_dir / e.dir);
    });

    json j;
    j["scenario"] = manifest.scenario;
    j["entries"] = json::array();
    for (const CorpusEntry& e : manifest.entries) {
        j["entries"].push_back({
            {"class", e.class_name},
            {"label", e.label},
            {"replicate", e.replicate},
            {"role", e.is_test ? "test" : "train"},
            {"seed", e.seed},
            {"dir", e.dir},
        });
    }
    std::ofstream out(out_dir / "manifest.json", std::ios::binary);
    out << j.dump(2) << "\n";
    if (!out) throw IoError("failed to write corpus manifest");
    return manifest;
}

ExperimentReport run_experiment(const ScenarioSpec& scenario, const fs::path& out_dir, int threads) {
    scenario.validate();
    fs::create_directories(out_dir);
    const CorpusManifest manifest = gen_corpus(scenario, out_dir / "corpus", threads);

    ExperimentReport report;
    report.scenario = scenario.name;
    report.sequences.resize(manifest.entries.size());
    std::vector<std::vector<std::vector<float>>> features(manifest.entries.size());

    parallel_for(static_cast<int>(manifest.entries.size()), threads, [&](int i) {
        const CorpusEntry& e = manifest.entries[i];
        FrameSequence seq;
        try {
            seq = io::read_sequence(out_dir / "corpus" / e.dir);

            stab::FrameSelection sel;
            if (scenario.artifacts) {
                sel = stab::stabilize(seq);
            } else {
                const int n = std::min<int>(10, static_cast<int>(seq.frames.size()));
                for (int k = 0; k < n; ++k) sel.indices.push_back(k);
            }

            const pipe::CropRegion region = pipe::centered_region(seq.frames[0], scenario.analysis_region);
            const pipe::CorrelationCurve curve = pipe::correlation_curve(seq, sel, region);

            SequenceResult& r = report.sequences[i];
            r.entry = e;
            r.selection = sel.indices;
            r.viscosity_coefficient = curve.viscosity_coefficient;
            r.tau_c = curve.tau_c;
            r.contrast = pipe::speckle_contrast(seq.frames[sel.indices[0]], region);
            r.correlation = curve.coefficients;
            features[i] = svm::featurize(seq, sel, region);
        } catch (const Error& err) {
            throw AnalysisError("sequence " + e.dir + ": " + err.what());
        }
    });

    // per-class V statistics, classes ordered by viscosity
    std::vector<std::size_t> order(scenario.classes.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return scenario.classes[a].liquid.viscosity_pa_s < scenario.classes[b].liquid.viscosity_pa_s;
    });
    std::vector<double> mean_v(scenario.classes.size(), 0.0);
    std::vector<double> min_v(scenario.classes.size(), 1.0);
    std::vector<double> max_v(scenario.classes.size(), -1.0);
    std::vector<int> count_v(scenario.classes.size(), 0);
    const int replicates = scenario.train_replicates + scenario.test_replicates;
    for (std::size_t i = 0; i < report.sequences.size(); ++i) {
        const std::size_t ci = i / replicates;
        const double v = report.sequences[i].viscosity_coefficient;
        mean_v[ci] += v;
        min_v[ci] = std::min(min_v[ci], v);
        max_v[ci] = std::max(max_v[ci], v);
        ++count_v[ci];
    }
    for (std::size_t ci = 0; ci < scenario.classes.size(); ++ci) mean_v[ci] /= count_v[ci];

    if (scenario.check_ordering && scenario.classes.size() >= 2) {
        bool ordered = true;
        for (std::size_t k = 1; k < order.size(); ++k) {
            if (!(mean_v[order[k]] > mean_v[order[k - 1]])) ordered = false;
        }
        report.checks.push_back({"class-v-ordering", ordered,
                                 "class mean V strictly increasing with viscosity"});
    }
    if (scenario.require_separation && scenario.classes.size() == 2) {
        const std::size_t lo = order[0], hi = order[1];
        const bool separated = max_v[lo] < min_v[hi];
        report.checks.push_back({"cluster-separation", separated,
                                 "V clusters do not overlap across replicates"});
    }

    // classifier stage: sequence-disjoint train/test split by replicate
    svm::ConfusionMatrix confusion;
    bool trained = false;
    if (!scenario.calibrate && scenario.classes.size() >= 2 && scenario.train_replicates >= 1 &&
        scenario.test_replicates >= 1) {
        svm::Dataset train_set, test_set;
        for (std::size_t i = 0; i < manifest.entries.size(); ++i) {
            const CorpusEntry& e = manifest.entries[i];
            for (const std::vector<float>& vec : features[i]) {
                svm::FeatureVector fv;
                fv.values = vec;
                fv.label = e.label;
                fv.sequence_id = static_cast<int>(i);
                (e.is_test ? test_set : train_set).items.push_back(std::move(fv));
            }
        }
        const svm::SvmModel model = svm::train_svm(train_set);
        confusion = svm::evaluate(model, test_set);
        report.accuracy = confusion.accuracy;
        trained = true;
        if (scenario.min_accuracy > 0.0) {
            report.checks.push_back({"classifier-accuracy", confusion.accuracy >= scenario.min_accuracy,
                                     "held-out accuracy >= " + std::to_string(scenario.min_accuracy)});
        }
    }

    if (scenario.calibrate) {
        std::vector<std::pair<double, double>> points; // (V, true cP)
        std::vector<double> predicted, truth;
        for (std::size_t i = 0; i < report.sequences.size(); ++i) {
            const std::size_t ci = i / replicates;
            const double true_cp = scenario.classes[ci].liquid.viscosity_pa_s * 1000.0;
            if (!manifest.entries[i].is_test) {
                points.emplace_back(report.sequences[i].viscosity_coefficient, true_cp);
            }
        }
        const cal::CalibrationModel model = cal::fit_calibration(points);
        for (std::size_t i = 0; i < report.sequences.size(); ++i) {
            if (!manifest.entries[i].is_test) continue;
            const std::size_t ci = i / replicates;
            predicted.push_back(
                cal::apply_calibration(model, report.sequences[i].viscosity_coefficient).viscosity_cp);
            truth.push_back(scenario.classes[ci].liquid.viscosity_pa_s * 1000.0);
        }
        const double r = pearson(predicted, truth);
        char detail[96];
        std::snprintf(detail, sizeof(detail), "calibrated vs true viscosity Pearson r = %.6f", r);
        report.checks.push_back({"calibration-linearity", r >= 0.99, detail});
    }

    // report.json
    json j;
    j["scenario"] = report.scenario;
    j["sequences"] = json::array();
    for (const SequenceResult& r : report.sequences) {
        json s{
            {"class", r.entry.class_name},
            {"label", r.entry.label},
            {"replicate", r.entry.replicate},
            {"role", r.entry.is_test ? "test" : "train"},
            {"seed", r.entry.seed},
            {"selection", r.selection},
            {"viscosity_coefficient", r.viscosity_coefficient},
            {"contrast", r.contrast},
            {"correlation", r.correlation},
        };
        if (r.tau_c) {
            s["tau_c"] = *r.tau_c;
        } else {
            s["tau_c"] = nullptr;
        }
        j["sequences"].push_back(std::move(s));
    }
    j["classes"] = json::array();
    for (std::size_t ci = 0; ci < scenario.classes.size(); ++ci) {
        j["classes"].push_back({
            {"name", scenario.classes[ci].name},
            {"label", scenario.classes[ci].label},
            {"viscosity_pa_s", scenario.classes[ci].liquid.viscosity_pa_s},
            {"mean_v", mean_v[ci]},
            {"min_v", min_v[ci]},
            {"max_v", max_v[ci]},
        });
    }
    j["checks"] = json::array();
    for (const ExperimentCheck& c : report.checks) {
        j["checks"].push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
    }
    if (report.accuracy >= 0.0) {
        j["accuracy"] = report.accuracy;
    } else {
        j["accuracy"] = nullptr;
    }
    {
        std::ofstream out(out_dir / "report.json", std::ios::binary);
        out << j.dump(2) << "\n";
        if (!out) throw IoError("failed to write experiment report");
    }

    if (trained) {
        std::ofstream out(out_dir / "confusion.csv", std::ios::binary);
        out << "true\\pred";
        for (int label : confusion.labels) out << "," << label;
        out << "\n";
        for (std::size_t i = 0; i < confusion.labels.size(); ++i) {
            out << confusion.labels[i];
            for (std::size_t k = 0; k < confusion.labels.size(); ++k) out << "," << confusion.counts[i][k];
            out << "\n";
        }
        if (!out) throw IoError("failed to write confusion matrix");
    }
    return report;
}

} // namespace speckle::scn
