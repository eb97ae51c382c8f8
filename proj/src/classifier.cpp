#include "speckle/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

namespace speckle::svm {

using nlohmann::json;

std::vector<std::vector<float>> featurize(const FrameSequence& seq, const stab::FrameSelection& selection,
                                          const pipe::CropRegion& region) {
    if (selection.indices.size() < 2) throw InvalidArgument("featurize needs at least 2 selected frames");
    if (region.width() < kFeatureSide || region.height() < kFeatureSide) {
        throw InvalidArgument("feature region must be at least 64x64, got " +
                              std::to_string(region.width()) + "x" + std::to_string(region.height()));
    }
    for (int idx : selection.indices) {
        if (idx < 0 || idx >= static_cast<int>(seq.frames.size())) {
            throw InvalidArgument("selection index out of range");
        }
    }

    const int rw = region.width();
    const int rh = region.height();
    std::vector<std::vector<float>> features;
    features.reserve(selection.indices.size() - 1);
    std::vector<float> diff(static_cast<std::size_t>(rw) * rh);

    for (std::size_t k = 0; k + 1 < selection.indices.size(); ++k) {
        const Frame& a = seq.frames[selection.indices[k]];
        const Frame& b = seq.frames[selection.indices[k + 1]];
        for (int y = 0; y < rh; ++y) {
            for (int x = 0; x < rw; ++x) {
                const int va = a.at(region.x0() + x, region.y0() + y);
                const int vb = b.at(region.x0() + x, region.y0() + y);
                diff[static_cast<std::size_t>(y) * rw + x] = static_cast<float>(std::abs(vb - va));
            }
        }
        // block-mean downsample to 64x64 with integer cell boundaries
        std::vector<float> cell(kFeatureSide * kFeatureSide, 0.0f);
        for (int cy = 0; cy < kFeatureSide; ++cy) {
            const int y0 = cy * rh / kFeatureSide;
            const int y1 = (cy + 1) * rh / kFeatureSide;
            for (int cx = 0; cx < kFeatureSide; ++cx) {
                const int x0 = cx * rw / kFeatureSide;
                const int x1 = (cx + 1) * rw / kFeatureSide;
                float acc = 0.0f;
                for (int y = y0; y < y1; ++y) {
                    for (int x = x0; x < x1; ++x) acc += diff[static_cast<std::size_t>(y) * rw + x];
                }
                cell[static_cast<std::size_t>(cy) * kFeatureSide + cx] =
                    acc / static_cast<float>((y1 - y0) * (x1 - x0));
            }
        }
        features.push_back(std::move(cell));
    }
    return features;
}

namespace {

double rbf(const std::vector<float>& a, const std::vector<float>& b, double gamma) {
    double d2 = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = static_cast<double>(a[i]) - b[i];
        d2 += d * d;
    }
    return std::exp(-gamma * d2);
}

// Platt-style SMO on one binary problem. Kernel matrix is precomputed;
// problem sizes here stay in the hundreds.
struct SmoProblem {
    const std::vector<std::vector<double>>& kernel;
    const std::vector<int>& y; // +1 / -1
    double c;
    double tol = 1e-3;

    std::vector<double> alpha;
    std::vector<double> error; // f(i) - y(i)
    double bias = 0.0;

    explicit SmoProblem(const std::vector<std::vector<double>>& k, const std::vector<int>& labels, double box)
        : kernel(k), y(labels), c(box), alpha(labels.size(), 0.0), error(labels.size()) {
        for (std::size_t i = 0; i < y.size(); ++i) error[i] = -y[i];
    }

    double decision(int i) const { return error[i] + y[i]; }

    bool take_step(int i1, int i2) {
        if (i1 == i2) return false;
        const double a1 = alpha[i1], a2 = alpha[i2];
        const int y1 = y[i1], y2 = y[i2];
        const double e1 = error[i1], e2 = error[i2];
        const int s = y1 * y2;
        double lo, hi;
        if (s < 0) {
            lo = std::max(0.0, a2 - a1);
            hi = std::min(c, c + a2 - a1);
        } else {
            lo = std::max(0.0, a1 + a2 - c);
            hi = std::min(c, a1 + a2);
        }
        if (lo >= hi) return false;
        const double eta = kernel[i1][i1] + kernel[i2][i2] - 2.0 * kernel[i1][i2];
        double a2_new;
        if (eta > 0) {
            a2_new = std::clamp(a2 + y2 * (e1 - e2) / eta, lo, hi);
        } else {
            // degenerate curvature: pick the better endpoint
            const double obj_lo = objective_at(i1, i2, a1 + s * (a2 - lo), lo);
            const double obj_hi = objective_at(i1, i2, a1 + s * (a2 - hi), hi);
            a2_new = obj_lo < obj_hi ? lo : hi;
        }
        if (std::abs(a2_new - a2) < 1e-12 * (a2_new + a2 + 1e-12)) return false;
        const double a1_new = a1 + s * (a2 - a2_new);

        // bias update keeping KKT on the changed points
        const double b_old = bias;
        const double d1 = y1 * (a1_new - a1);
        const double d2 = y2 * (a2_new - a2);
        double b1 = e1 + d1 * kernel[i1][i1] + d2 * kernel[i1][i2] + b_old;
        double b2 = e2 + d1 * kernel[i1][i2] + d2 * kernel[i2][i2] + b_old;
        if (a1_new > 0 && a1_new < c) {
            bias = b1;
        } else if (a2_new > 0 && a2_new < c) {
            bias = b2;
        } else {
            bias = 0.5 * (b1 + b2);
        }

        alpha[i1] = a1_new;
        alpha[i2] = a2_new;
        for (std::size_t k = 0; k < y.size(); ++k) {
            error[k] += d1 * kernel[i1][k] + d2 * kernel[i2][k] - (bias - b_old);
        }
        return true;
    }

    double objective_at(int i1, int i2, double a1v, double a2v) const {
        // partial dual objective restricted to i1, i2
        const double f1 = error[i1] + y[i1] - y[i1] * alpha[i1] * kernel[i1][i1] - y[i2] * alpha[i2] * kernel[i1][i2];
        const double f2 = error[i2] + y[i2] - y[i1] * alpha[i1] * kernel[i1][i2] - y[i2] * alpha[i2] * kernel[i2][i2];
        return f1 * y[i1] * a1v + f2 * y[i2] * a2v +
               0.5 * a1v * a1v * kernel[i1][i1] + 0.5 * a2v * a2v * kernel[i2][i2] +
               y[i1] * y[i2] * a1v * a2v * kernel[i1][i2] - a1v - a2v;
    }

    bool examine(int i2) {
        const double e2 = error[i2];
        const double r2 = e2 * y[i2];
        if ((r2 < -tol && alpha[i2] < c) || (r2 > tol && alpha[i2] > 0)) {
            // second-choice heuristic: maximize |e1 - e2| over non-bound points
            int best = -1;
            double best_gap = -1.0;
            for (std::size_t k = 0; k < y.size(); ++k) {
                if (alpha[k] > 0 && alpha[k] < c) {
                    const double gap = std::abs(error[k] - e2);
                    if (gap > best_gap) {
                        best_gap = gap;
                        best = static_cast<int>(k);
                    }
                }
            }
            if (best >= 0 && take_step(best, i2)) return true;
            for (std::size_t k = 0; k < y.size(); ++k) {
                if (alpha[k] > 0 && alpha[k] < c && take_step(static_cast<int>(k), i2)) return true;
            }
            for (std::size_t k = 0; k < y.size(); ++k) {
                if (take_step(static_cast<int>(k), i2)) return true;
            }
        }
        return false;
    }

    void solve() {
        bool examine_all = true;
        int changed = 0;
        int sweeps = 0;
        do {
            changed = 0;
            for (std::size_t i = 0; i < y.size(); ++i) {
                if (examine_all || (alpha[i] > 0 && alpha[i] < c)) {
                    if (examine(static_cast<int>(i))) ++changed;
                }
            }
            if (examine_all) {
                examine_all = false;
            } else if (changed == 0) {
                examine_all = true;
            }
            if (++sweeps > 10000) break; // defensive cap, never hit in practice
        } while (changed > 0 || !examine_all);
    }
};

std::vector<float> standardize(const SvmModel& model, const std::vector<float>& raw) {
    std::vector<float> out(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
        out[i] = static_cast<float>((raw[i] - model.mean[i]) / model.stddev[i]);
    }
    return out;
}

} // namespace

SvmModel train_svm(const Dataset& dataset, double c, double gamma) {
    if (!(c > 0.0)) throw InvalidArgument("C must be > 0");
    const int dim = dataset.dimension();
    if (dim == 0) throw TrainingError("empty dataset");
    for (const FeatureVector& fv : dataset.items) {
        if (static_cast<int>(fv.values.size()) != dim) {
            throw InvalidArgument("inconsistent feature dimensions in dataset");
        }
    }

    std::map<int, std::vector<int>> by_class;
    for (std::size_t i = 0; i < dataset.items.size(); ++i) {
        by_class[dataset.items[i].label].push_back(static_cast<int>(i));
    }
    if (by_class.size() < 2) throw TrainingError("need at least 2 classes");
    for (const auto& [label, idxs] : by_class) {
        if (idxs.size() < 2) {
            throw TrainingError("class " + std::to_string(label) + " has fewer than 2 examples");
        }
    }

    SvmModel model;
    model.c = c;
    for (const auto& [label, idxs] : by_class) model.labels.push_back(label);

    // per-dimension standardization from the training set
    model.mean.assign(dim, 0.0);
    model.stddev.assign(dim, 0.0);
    const double n = static_cast<double>(dataset.items.size());
    for (const FeatureVector& fv : dataset.items) {
        for (int d = 0; d < dim; ++d) model.mean[d] += fv.values[d];
    }
    for (int d = 0; d < dim; ++d) model.mean[d] /= n;
    for (const FeatureVector& fv : dataset.items) {
        for (int d = 0; d < dim; ++d) {
            const double dv = fv.values[d] - model.mean[d];
            model.stddev[d] += dv * dv;
        }
    }
    double total_var = 0.0;
    for (int d = 0; d < dim; ++d) {
        model.stddev[d] = std::sqrt(model.stddev[d] / n);
        total_var += model.stddev[d] * model.stddev[d];
        if (model.stddev[d] == 0.0) model.stddev[d] = 1.0; // constant dimension
    }

    if (gamma > 0.0) {
        model.gamma = gamma;
    } else {
        const double var = total_var / dim;
        model.gamma = var > 0.0 ? 1.0 / (dim * var) : 1.0 / dim;
    }

    std::vector<std::vector<float>> standardized;
    standardized.reserve(dataset.items.size());
    for (const FeatureVector& fv : dataset.items) {
        standardized.push_back(standardize(model, fv.values));
    }

    std::set<int> used; // training vectors that end up as support vectors
    std::vector<PairClassifier> pairs;
    for (std::size_t a = 0; a < model.labels.size(); ++a) {
        for (std::size_t b = a + 1; b < model.labels.size(); ++b) {
            const int label_a = model.labels[a];
            const int label_b = model.labels[b];
            std::vector<int> idx;
            std::vector<int> y;
            for (int i : by_class[label_a]) {
                idx.push_back(i);
                y.push_back(+1);
            }
            for (int i : by_class[label_b]) {
                idx.push_back(i);
                y.push_back(-1);
            }

            const std::size_t m = idx.size();
            std::vector<std::vector<double>> kernel(m, std::vector<double>(m));
            for (std::size_t i = 0; i < m; ++i) {
                for (std::size_t j = i; j < m; ++j) {
                    kernel[i][j] = kernel[j][i] = rbf(standardized[idx[i]], standardized[idx[j]], model.gamma);
                }
            }

            SmoProblem smo(kernel, y, c);
            smo.solve();

            PairClassifier pc;
            pc.class_a = label_a;
            pc.class_b = label_b;
            pc.bias = -smo.bias; // SMO tracks threshold with opposite sign
            for (std::size_t i = 0; i < m; ++i) {
                if (smo.alpha[i] > 1e-10) {
                    pc.sv_indices.push_back(idx[i]);
                    pc.alpha_y.push_back(smo.alpha[i] * y[i]);
                    used.insert(idx[i]);
                }
            }
            if (pc.sv_indices.empty()) {
                throw TrainingError("no support vectors for class pair " + std::to_string(label_a) + "/" +
                                    std::to_string(label_b) + " (degenerate data)");
            }
            pairs.push_back(std::move(pc));
        }
    }

    // compact: store only the vectors some pair actually uses
    std::map<int, int> remap;
    for (int i : used) {
        remap[i] = static_cast<int>(model.support_vectors.size());
        model.support_vectors.push_back(standardized[i]);
    }
    for (PairClassifier& pc : pairs) {
        for (int& i : pc.sv_indices) i = remap[i];
    }
    model.pairs = std::move(pairs);

    std::set<int> seq_ids;
    for (const FeatureVector& fv : dataset.items) seq_ids.insert(fv.sequence_id);
    model.training_sequence_ids.assign(seq_ids.begin(), seq_ids.end());
    return model;
}

Prediction predict(const SvmModel& model, const std::vector<float>& features) {
    if (features.size() != model.mean.size()) {
        throw InvalidArgument("feature dimension mismatch with model");
    }
    const std::vector<float> x = standardize(model, features);

    std::map<int, int> label_pos;
    for (std::size_t i = 0; i < model.labels.size(); ++i) label_pos[model.labels[i]] = static_cast<int>(i);

    Prediction pred;
    pred.votes.assign(model.labels.size(), 0);
    pred.scores.assign(model.labels.size(), 0.0);
    for (const PairClassifier& pc : model.pairs) {
        double f = pc.bias;
        for (std::size_t i = 0; i < pc.sv_indices.size(); ++i) {
            f += pc.alpha_y[i] * rbf(model.support_vectors[pc.sv_indices[i]], x, model.gamma);
        }
        const int winner = f >= 0.0 ? pc.class_a : pc.class_b;
        pred.votes[label_pos[winner]] += 1;
        pred.scores[label_pos[winner]] += std::abs(f);
    }

    int best = 0;
    for (std::size_t i = 1; i < model.labels.size(); ++i) {
        if (pred.votes[i] > pred.votes[best] ||
            (pred.votes[i] == pred.votes[best] && pred.scores[i] > pred.scores[best])) {
            best = static_cast<int>(i);
        }
        // equal votes and scores: keep the lower class id (earlier index)
    }
    pred.label = model.labels[best];
    return pred;
}

int ConfusionMatrix::total() const {
    int t = 0;
    for (const auto& row : counts) {
        for (int v : row) t += v;
    }
    return t;
}

ConfusionMatrix evaluate(const SvmModel& model, const Dataset& test_set) {
    const std::set<int> train_ids(model.training_sequence_ids.begin(), model.training_sequence_ids.end());
    for (const FeatureVector& fv : test_set.items) {
        if (train_ids.count(fv.sequence_id)) {
            throw ValidationError("test set shares sequence id " + std::to_string(fv.sequence_id) +
                                  " with the training set");
        }
    }

    std::map<int, int> label_pos;
    for (std::size_t i = 0; i < model.labels.size(); ++i) label_pos[model.labels[i]] = static_cast<int>(i);

    ConfusionMatrix cm;
    cm.labels = model.labels;
    cm.counts.assign(model.labels.size(), std::vector<int>(model.labels.size(), 0));
    for (const FeatureVector& fv : test_set.items) {
        auto it = label_pos.find(fv.label);
        if (it == label_pos.end()) {
            throw ValidationError("test label " + std::to_string(fv.label) + " unknown to the model");
        }
        const Prediction p = predict(model, fv.values);
        cm.counts[it->second][label_pos[p.label]] += 1;
    }

    int correct = 0;
    cm.recall.assign(model.labels.size(), 0.0);
    for (std::size_t i = 0; i < model.labels.size(); ++i) {
        int row = 0;
        for (std::size_t j = 0; j < model.labels.size(); ++j) row += cm.counts[i][j];
        correct += cm.counts[i][i];
        cm.recall[i] = row > 0 ? static_cast<double>(cm.counts[i][i]) / row : 0.0;
    }
    const int total = cm.total();
    cm.accuracy = total > 0 ? static_cast<double>(correct) / total : 0.0;
    return cm;
}

std::string model_to_json(const SvmModel& model) {
    json j;
    j["c"] = model.c;
    j["gamma"] = model.gamma;
    j["labels"] = model.labels;
    j["mean"] = model.mean;
    j["stddev"] = model.stddev;
    j["support_vectors"] = model.support_vectors;
    j["training_sequence_ids"] = model.training_sequence_ids;
    j["pairs"] = json::array();
    for (const PairClassifier& pc : model.pairs) {
        j["pairs"].push_back({
            {"class_a", pc.class_a},
            {"class_b", pc.class_b},
            {"sv_indices", pc.sv_indices},
            {"alpha_y", pc.alpha_y},
            {"bias", pc.bias},
        });
    }
    return j.dump(2);
}

SvmModel model_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
        SvmModel model;
        model.c = j.at("c").get<double>();
        model.gamma = j.at("gamma").get<double>();
        model.labels = j.at("labels").get<std::vector<int>>();
        model.mean = j.at("mean").get<std::vector<double>>();
        model.stddev = j.at("stddev").get<std::vector<double>>();
        model.support_vectors = j.at("support_vectors").get<std::vector<std::vector<float>>>();
        model.training_sequence_ids = j.at("training_sequence_ids").get<std::vector<int>>();
        for (const json& p : j.at("pairs")) {
            PairClassifier pc;
            pc.class_a = p.at("class_a").get<int>();
            pc.class_b = p.at("class_b").get<int>();
            pc.sv_indices = p.at("sv_indices").get<std::vector<int>>();
            pc.alpha_y = p.at("alpha_y").get<std::vector<double>>();
            pc.bias = p.at("bias").get<double>();
            model.pairs.push_back(std::move(pc));
        }
        return model;
    } catch (const json::exception& e) {
        throw MalformedFileError(std::string("bad model json: ") + e.what());
    }
}

} // namespace speckle::svm
