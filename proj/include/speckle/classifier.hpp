#pragma once

#include <string>
#include <vector>

#include "speckle/frame.hpp"
#include "speckle/pipeline.hpp"
#include "speckle/stabilizer.hpp"

namespace speckle::svm {

inline constexpr int kFeatureSide = 64; // downsampled difference image is 64x64

// Flattened absolute inter-frame difference image, block-mean downsampled
// to 64x64. Raw (pre-standardization) values; the model carries the
// train-set standardization vectors.
struct FeatureVector {
    std::vector<float> values;
    int label = 0;
    int sequence_id = 0; // binds the vector to its source sequence for disjoint splits
};

struct Dataset {
    std::vector<FeatureVector> items;

    int dimension() const { return items.empty() ? 0 : static_cast<int>(items[0].values.size()); }
};

// 9 difference features from a 10-frame selection. The region must be at
// least 64x64; upsampling is not allowed.
std::vector<std::vector<float>> featurize(const FrameSequence& seq, const stab::FrameSelection& selection,
                                          const pipe::CropRegion& region);

// One-vs-one binary problem: decision f(x) = sum_i alpha_y[i]*K(sv_i, x) + bias,
// positive means class_a.
struct PairClassifier {
    int class_a = 0;
    int class_b = 0;
    std::vector<int> sv_indices;   // into SvmModel::support_vectors
    std::vector<double> alpha_y;   // alpha_i * y_i, y in {+1 (class_a), -1}
    double bias = 0.0;
};

struct SvmModel {
    double c = 10.0;
    double gamma = 0.0;
    std::vector<int> labels; // sorted distinct class ids
    std::vector<double> mean;     // per-dimension standardization
    std::vector<double> stddev;
    std::vector<std::vector<float>> support_vectors; // standardized
    std::vector<PairClassifier> pairs;
    std::vector<int> training_sequence_ids; // for enforcing disjoint test sets
};

// One-vs-one RBF SVMs trained with sequential minimal optimization to KKT
// tolerance 1e-3. gamma <= 0 selects the 1/(d*var) heuristic.
SvmModel train_svm(const Dataset& dataset, double c = 10.0, double gamma = 0.0);

struct Prediction {
    int label = 0;
    std::vector<int> votes;       // per model.labels entry
    std::vector<double> scores;   // summed |decision| per label, tie-break key
};

// Majority vote across pairs; ties broken by summed decision magnitude,
// then lowest class id. Takes raw (unstandardized) features.
Prediction predict(const SvmModel& model, const std::vector<float>& features);

struct ConfusionMatrix {
    std::vector<int> labels;
    std::vector<std::vector<int>> counts; // counts[true][predicted]
    double accuracy = 0.0;
    std::vector<double> recall; // per class

    int total() const;
};

// Throws ValidationError if the test set shares a sequence id with the
// training set.
ConfusionMatrix evaluate(const SvmModel& model, const Dataset& test_set);

std::string model_to_json(const SvmModel& model);
SvmModel model_from_json(const std::string& text);

} // namespace speckle::svm
