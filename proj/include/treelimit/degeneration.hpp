#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "treelimit/tree_isometry.hpp"
#include "treelimit/twisted_graph.hpp"

namespace treelimit {

// Pull-back pseudometric on orbit samples, entries divided by sqrt(energy).
struct RescaledMetric {
    std::vector<SampleLabel> labels;
    std::vector<std::vector<double>> dist;
    double energy_used = 1.0;
};

RescaledMetric rescale(std::vector<SampleLabel> labels, const std::vector<std::vector<double>>& m, double energy);

double metric_diameter(const std::vector<std::vector<double>>& m);

struct DeltaReport {
    double delta = 0.0;
    std::array<int, 4> worst{-1, -1, -1, -1};
};

// Four-point hyperbolicity constant: exhaustive for <= 40 points, one
// million seeded random quadruples above.
DeltaReport gromov_delta(const std::vector<std::vector<double>>& m, std::uint64_t seed = 424242);

inline double gromov_delta(const RescaledMetric& m, std::uint64_t seed = 424242) {
    return gromov_delta(m.dist, seed).delta;
}

// Finite realization of a near-additive metric plus the sample locations on
// it; max_error is the re-measured worst per-entry deviation.
struct TreeEmbedding {
    SimplicialTree tree;
    std::vector<TreePoint> location;
    double max_error = 0.0;
};

// Sequential Gromov-product insertion, exact on additive input. Throws
// NotTreeLikeError when gromov_delta(m) > tol * diameter.
TreeEmbedding tree_from_metric(const RescaledMetric& m, double tol);

// Partial action induced on the reconstructed tree by left multiplication of
// sample words by the generators; out-of-range images are dropped.
struct InducedAction {
    std::vector<std::vector<int>> sample_image;  // per generator: sample index or -1
    std::vector<double> distortion;              // per generator: worst pair distortion
    TreeAction action;                           // partial isometries over the embedding tree
};

InducedAction induced_action(const TreeEmbedding& emb, const std::vector<SampleLabel>& labels,
                             const Presentation& pres, double tol);

// Min over samples of the tree distance between a sample and its image under
// left multiplication by w; the tree length of w seen through the window.
double sample_tree_length(const TreeEmbedding& emb, const std::vector<SampleLabel>& labels,
                          const Presentation& pres, const Word& w);

// Max-norm distance between the vectors normalized to unit max entry.
// Throws DegenerateLengthError when either vector is identically zero.
double projective_compare(const std::vector<double>& l1, const std::vector<double>& l2);

// True when the vector is realized by a homomorphism to R within tol:
// length functions determine trees only outside this case, so runs report it.
bool abelian_length_vector(const Presentation& pres, const std::vector<Word>& words,
                           const std::vector<double>& lengths, double tol);

struct DegenerationStep {
    double t = 0.0;
    double energy = 0.0;
    double delta = 0.0;     // of the rescaled metric
    double diameter = 0.0;  // of the rescaled metric
    std::vector<double> lengths;           // rescaled; tree-based when a tree was built
    std::vector<double> rep_lengths;       // translation lengths of rho_t on the word list
    std::vector<double> min_displacement;  // unrescaled sample-min displacement per word
    SolveStatus solve_status = SolveStatus::Converged;
    double gradient_norm = 0.0;
    double lipschitz = 0.0;
    bool tree_built = false;
};

struct DegenerationRun {
    std::vector<Word> length_words;    // canonical word list (CSV columns)
    std::vector<SampleLabel> labels;   // sample set of the final step
    std::vector<DegenerationStep> steps;
    std::optional<TreeEmbedding> final_tree;
    std::optional<InducedAction> final_action;
    bool abelian_limit = false;  // final length vector factors through R
};

struct DegenerationParams {
    std::vector<double> schedule;
    int word_length = 2;         // canonical word list truncation
    int sample_word_length = 3;  // orbit sample truncation
    double tol = 1e-8;
    int max_iter = 100000;
    double delta_threshold = 0.05;  // attempt tree extraction below this ratio
    std::uint64_t seed = 7;
};

// Warm-started sweep over the schedule: solve, pull back, rescale, measure
// hyperbolicity, reconstruct the tree and its action where the metric is
// tree-like. Throws NotTreeLikeError if the final step stays above the
// threshold.
DegenerationRun run_degeneration(const RepresentationFamily& family, const TwistedGraph& graph,
                                 const DegenerationParams& params);

}  // namespace treelimit
