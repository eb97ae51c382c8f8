#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "speckle/capturefx.hpp"
#include "speckle/specklesim.hpp"

namespace speckle::scn {

struct ClassSpec {
    std::string name;
    int label = 0;
    sim::LiquidSpec liquid;
};

// One synthetic experiment: a set of liquid classes, each simulated
// train+test times with independent per-sequence seeds.
struct ScenarioSpec {
    std::string name;
    std::vector<ClassSpec> classes;
    int train_replicates = 1;
    int test_replicates = 1;
    std::uint64_t seed = 0;
    sim::OpticsConfig optics;                          // per-sequence geometry/length
    std::optional<fx::CaptureArtifactConfig> artifacts; // when set, sequences are distorted and stabilized
    int analysis_region = 128;  // centered square used for correlation/features
    double min_accuracy = 0.0;  // > 0 adds a classifier accuracy check
    bool require_separation = false; // 2-class V cluster non-overlap check
    bool check_ordering = false;     // class mean V ordered with viscosity
    bool calibrate = false;          // fit cubic on train series, score test series

    void validate() const; // >= 1 class, >= 1 replicate overall
};

struct CorpusEntry {
    std::string class_name;
    int label = 0;
    int replicate = 0;
    bool is_test = false;
    std::uint64_t seed = 0;
    std::string dir; // relative to the corpus root
};

struct CorpusManifest {
    std::string scenario;
    std::vector<CorpusEntry> entries;
};

// Named built-in scenarios: blood, milk, ten-liquids, adulterated-milk,
// dilution. Throws InvalidArgument for unknown names.
ScenarioSpec builtin_scenario(const std::string& name);
std::vector<std::string> builtin_scenario_names();

// Deterministic per-sequence simulation seed.
std::uint64_t sequence_seed(const ScenarioSpec& scenario, int class_index, int replicate);

// Simulates (and distorts, if configured) every sequence into
// out_dir/<class>/<replicate>/ plus out_dir/manifest.json. Deterministic
// for a given spec: running twice produces bit-identical trees.
CorpusManifest gen_corpus(const ScenarioSpec& scenario, const std::filesystem::path& out_dir,
                          int threads = 1);

struct SequenceResult {
    CorpusEntry entry;
    std::vector<int> selection;
    double viscosity_coefficient = 0.0;
    std::optional<double> tau_c;
    double contrast = 0.0;
    std::vector<double> correlation; // full 10-point curve
};

struct ExperimentCheck {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct ExperimentReport {
    std::string scenario;
    std::vector<SequenceResult> sequences;
    std::vector<ExperimentCheck> checks;
    double accuracy = -1.0; // -1 when no classifier was trained
};

// Full pipeline: corpus -> (stabilize) -> correlation analysis ->
// classifier train/eval when both splits are non-empty. Writes
// out_dir/report.json and, when a classifier ran, out_dir/confusion.csv;
// output bytes are a pure function of the scenario spec.
ExperimentReport run_experiment(const ScenarioSpec& scenario, const std::filesystem::path& out_dir,
                                int threads = 1);

} // namespace speckle::scn
