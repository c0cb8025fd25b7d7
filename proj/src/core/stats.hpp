#pragma once

#include "core/erqa.hpp"
#include "core/frame.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace srm {

struct ComparisonRecord {
    std::string item_a;
    std::string item_b;
    long long wins_a = 0;
    long long wins_b = 0;
};

struct BtOptions {
    int max_iterations = 10000;
    double tolerance = 1e-9;
    // Add-alpha smoothing: alpha added to both win counts of every compared
    // pair. Repairs items with zero wins or zero losses; cannot connect a
    // disconnected comparison graph. Off by default.
    double smoothing = 0.0;
};

struct BtResult {
    std::vector<std::string> items; // first-appearance order
    std::vector<double> abilities;  // strictly positive, sum to 1
    // ln(ability) shifted so the weakest item sits at 0. A presentation
    // scale; the abilities are the model parameters.
    std::vector<double> display_scores;
    // Log-likelihood of the uniform start, then after each iteration.
    std::vector<double> log_likelihood_trace;
    int iterations_used = 0;
    bool converged = false;
};

// Maximum-likelihood Bradley-Terry abilities via the minorize-maximize
// update p_i <- W_i / sum_{j!=i} n_ij / (p_i + p_j), renormalized each
// iteration from a uniform start. Requires a connected comparison graph and
// at least one win and one loss per item (see BtOptions::smoothing).
BtResult bt_fit(const std::vector<ComparisonRecord>& records, const BtOptions& opts = {});

// Pearson product-moment correlation. Needs length >= 3 and nonzero
// variance on both sides.
double plcc(const std::vector<double>& x, const std::vector<double>& y);

// 1-based average ranks; ties share the mean of their rank span.
std::vector<double> average_ranks(const std::vector<double>& values);

// Spearman rank correlation: Pearson on average ranks.
double srcc(const std::vector<double>& x, const std::vector<double>& y);

struct FeatureMatrix {
    std::vector<std::string> row_ids;
    std::vector<std::string> col_ids;
    std::vector<double> values; // row-major

    std::size_t rows() const { return row_ids.size(); }
    std::size_t cols() const { return col_ids.size(); }
    double at(std::size_t r, std::size_t c) const { return values[r * cols() + c]; }
    void validate() const;
};

struct KMedoidsResult {
    std::vector<std::size_t> medoids;    // row indices, ascending
    std::vector<std::size_t> assignment; // per row: row index of its medoid
    double cost = 0.0;
    double build_cost = 0.0;
    std::vector<std::size_t> dropped_columns; // indices of numerically constant features
    std::uint64_t seed = 0;
};

// PAM (BUILD, then steepest-descent SWAP until no improving swap) on
// z-scored columns under Euclidean distance. Constant columns are dropped
// and reported. The procedure is deterministic; the seed is echoed into the
// result so runs stay attributable.
KMedoidsResult kmedoids(const FeatureMatrix& features, std::size_t k = 6,
                        std::uint64_t seed = 0);

// 10*log10(1 / MSE) over all samples, peak 1.0. Identical frames give
// +infinity; reports serialize that as the string "inf".
double psnr(const Frame& gt, const Frame& dist);

// Single-scale SSIM on luma: 11x11 Gaussian window sigma 1.5, K1 = 0.01,
// K2 = 0.03, peak 1.0, averaged over fully interior window positions.
double ssim(const Frame& gt, const Frame& dist, const LumaWeights& weights = {});

struct GlobalShift {
    Shift shift;
    double psnr_db = 0.0;
};

// Best whole-frame translation: for every shift in the disk, PSNR of gt
// against the input sampled at p - shift over the overlapping region;
// highest PSNR wins, ties resolved by enumeration order.
GlobalShift global_shift_psnr(const Frame& gt, const Frame& dist, int radius = 5);

struct ShiftHistogram {
    int radius = 0;
    // (2r+1)^2 counts, row-major; index (dy+r)*(2r+1) + (dx+r).
    std::vector<std::size_t> counts;
    std::vector<Shift> per_frame;

    std::size_t& at(int dx, int dy);
    std::size_t at(int dx, int dy) const;
};

ShiftHistogram shift_distribution(const FrameSequence& gt, const FrameSequence& dist,
                                  int radius = 5, unsigned jobs = 1);

} // namespace srm
