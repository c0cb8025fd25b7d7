#include "core/stats.hpp"

#include "core/error.hpp"
#include "core/parallel.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

namespace srm {

namespace {

std::string join_names(const std::vector<std::string>& names) {
    std::string out;
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (i) out += ", ";
        out += names[i];
    }
    return out;
}

} // namespace

BtResult bt_fit(const std::vector<ComparisonRecord>& records, const BtOptions& opts) {
    if (records.empty()) fail(ErrorCode::InvalidArgument, "no comparison records");
    if (opts.max_iterations < 1) fail(ErrorCode::InvalidArgument, "max_iterations must be >= 1");
    if (!(opts.tolerance > 0.0)) fail(ErrorCode::InvalidArgument, "tolerance must be > 0");
    if (opts.smoothing < 0.0) fail(ErrorCode::InvalidArgument, "smoothing must be >= 0");

    std::vector<std::string> items;
    std::map<std::string, std::size_t> index;
    auto intern = [&](const std::string& name) {
        auto [it, inserted] = index.try_emplace(name, items.size());
        if (inserted) items.push_back(name);
        return it->second;
    };

    for (const auto& r : records) {
        if (r.item_a.empty() || r.item_b.empty())
            fail(ErrorCode::InvalidArgument, "empty item name in a comparison record");
        if (r.item_a == r.item_b)
            fail(ErrorCode::InvalidArgument, "item '" + r.item_a + "' compared against itself");
        if (r.wins_a < 0 || r.wins_b < 0)
            fail(ErrorCode::InvalidArgument, "negative win count for pair '" + r.item_a +
                                                 "' vs '" + r.item_b + "'");
        if (r.wins_a + r.wins_b < 1)
            fail(ErrorCode::InvalidArgument,
                 "pair '" + r.item_a + "' vs '" + r.item_b + "' has no votes");
        intern(r.item_a);
        intern(r.item_b);
    }

    const std::size_t k = items.size();
    std::vector<double> wins(k * k, 0.0); // wins[i*k+j]: wins of i over j
    for (const auto& r : records) {
        const std::size_t a = intern(r.item_a), b = intern(r.item_b);
        wins[a * k + b] += static_cast<double>(r.wins_a);
        wins[b * k + a] += static_cast<double>(r.wins_b);
    }
    if (opts.smoothing > 0.0)
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = 0; j < i; ++j)
                if (wins[i * k + j] + wins[j * k + i] > 0.0) {
                    wins[i * k + j] += opts.smoothing;
                    wins[j * k + i] += opts.smoothing;
                }

    // Connectivity of the comparison graph.
    std::vector<std::size_t> parent(k);
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    auto find = [&](std::size_t i) {
        while (parent[i] != i) i = parent[i] = parent[parent[i]];
        return i;
    };
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < i; ++j)
            if (wins[i * k + j] + wins[j * k + i] > 0.0) parent[find(i)] = find(j);
    std::map<std::size_t, std::vector<std::string>> components;
    for (std::size_t i = 0; i < k; ++i) components[find(i)].push_back(items[i]);
    if (components.size() > 1) {
        std::string msg = "comparison graph is disconnected:";
        for (const auto& [root, members] : components) msg += " {" + join_names(members) + "}";
        fail(ErrorCode::DegenerateInput, msg);
    }

    std::vector<double> total_wins(k, 0.0), total_losses(k, 0.0);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) {
            total_wins[i] += wins[i * k + j];
            total_losses[i] += wins[j * k + i];
        }
    std::vector<std::string> no_wins, no_losses;
    for (std::size_t i = 0; i < k; ++i) {
        if (total_wins[i] == 0.0) no_wins.push_back(items[i]);
        if (total_losses[i] == 0.0) no_losses.push_back(items[i]);
    }
    if (!no_wins.empty())
        fail(ErrorCode::DegenerateInput, "items with zero wins: " + join_names(no_wins) +
                                             " (add-alpha smoothing can repair this)");
    if (!no_losses.empty())
        fail(ErrorCode::DegenerateInput, "items with zero losses: " + join_names(no_losses) +
                                             " (add-alpha smoothing can repair this)");

    auto log_likelihood = [&](const std::vector<double>& p) {
        double ll = 0.0;
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = 0; j < k; ++j)
                if (i != j && wins[i * k + j] > 0.0)
                    ll += wins[i * k + j] * (std::log(p[i]) - std::log(p[i] + p[j]));
        return ll;
    };

    BtResult result;
    result.items = items;
    std::vector<double> p(k, 1.0 / static_cast<double>(k)), next(k);
    result.log_likelihood_trace.push_back(log_likelihood(p));
    result.iterations_used = opts.max_iterations;

    for (int iter = 1; iter <= opts.max_iterations; ++iter) {
        for (std::size_t i = 0; i < k; ++i) {
            double denom = 0.0;
            for (std::size_t j = 0; j < k; ++j) {
                if (j == i) continue;
                const double n_ij = wins[i * k + j] + wins[j * k + i];
                if (n_ij > 0.0) denom += n_ij / (p[i] + p[j]);
            }
            next[i] = total_wins[i] / denom;
        }
        const double sum = std::accumulate(next.begin(), next.end(), 0.0);
        for (double& v : next) v /= sum;

        double delta = 0.0;
        for (std::size_t i = 0; i < k; ++i) delta = std::max(delta, std::abs(next[i] - p[i]));
        p = next;
        result.log_likelihood_trace.push_back(log_likelihood(p));
        if (delta < opts.tolerance) {
            result.converged = true;
            result.iterations_used = iter;
            break;
        }
    }

    result.abilities = p;
    double min_log = std::numeric_limits<double>::infinity();
    for (double v : p) min_log = std::min(min_log, std::log(v));
    result.display_scores.reserve(k);
    for (double v : p) result.display_scores.push_back(std::log(v) - min_log);
    return result;
}

double plcc(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) fail(ErrorCode::DimensionMismatch, "vectors differ in length");
    if (x.size() < 3) fail(ErrorCode::InvalidArgument, "need at least 3 samples");
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx, dy = y[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (sxx == 0.0 || syy == 0.0) fail(ErrorCode::DegenerateInput, "zero variance");
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::vector<double> average_ranks(const std::vector<double>& values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        const double avg = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j + 1));
        for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = avg;
        i = j + 1;
    }
    return ranks;
}

double srcc(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) fail(ErrorCode::DimensionMismatch, "vectors differ in length");
    return plcc(average_ranks(x), average_ranks(y));
}

void FeatureMatrix::validate() const {
    if (row_ids.empty() || col_ids.empty())
        fail(ErrorCode::InvalidArgument, "feature matrix is empty");
    if (values.size() != rows() * cols())
        fail(ErrorCode::DimensionMismatch, "feature matrix shape mismatch");
    for (double v : values)
        if (!std::isfinite(v)) fail(ErrorCode::InvalidArgument, "non-finite feature value");
}

KMedoidsResult kmedoids(const FeatureMatrix& features, std::size_t k, std::uint64_t seed) {
    features.validate();
    const std::size_t n = features.rows();
    if (k < 1 || k > n) fail(ErrorCode::InvalidArgument, "k must be in [1, number of rows]");

    KMedoidsResult result;
    result.seed = seed;

    // z-score columns; numerically constant ones carry no distance signal.
    std::vector<std::size_t> kept;
    std::vector<double> mean(features.cols()), sdev(features.cols());
    for (std::size_t c = 0; c < features.cols(); ++c) {
        double m = 0.0;
        for (std::size_t r = 0; r < n; ++r) m += features.at(r, c);
        m /= static_cast<double>(n);
        double var = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            const double d = features.at(r, c) - m;
            var += d * d;
        }
        mean[c] = m;
        sdev[c] = std::sqrt(var / static_cast<double>(n));
        if (sdev[c] < 1e-12 * std::max(1.0, std::abs(m)))
            result.dropped_columns.push_back(c);
        else
            kept.push_back(c);
    }
    if (kept.empty()) fail(ErrorCode::DegenerateInput, "all feature columns are constant");

    const std::size_t m = kept.size();
    std::vector<double> z(n * m);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t t = 0; t < m; ++t)
            z[r * m + t] = (features.at(r, kept[t]) - mean[kept[t]]) / sdev[kept[t]];

    std::vector<double> dist(n * n, 0.0);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a + 1; b < n; ++b) {
            double s = 0.0;
            for (std::size_t t = 0; t < m; ++t) {
                const double d = z[a * m + t] - z[b * m + t];
                s += d * d;
            }
            dist[a * n + b] = dist[b * n + a] = std::sqrt(s);
        }

    auto cost_of = [&](const std::vector<std::size_t>& medoids) {
        double total = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t mi : medoids) best = std::min(best, dist[j * n + mi]);
            total += best;
        }
        return total;
    };

    // BUILD: start with the 1-medoid optimum, then greedily add the point
    // with the largest cost reduction. Ties go to the smallest row index.
    std::vector<std::size_t> medoids;
    std::vector<char> is_medoid(n, 0);
    std::size_t first = 0;
    double first_sum = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) s += dist[i * n + j];
        if (s < first_sum) {
            first_sum = s;
            first = i;
        }
    }
    medoids.push_back(first);
    is_medoid[first] = 1;
    std::vector<double> nearest(n);
    for (std::size_t j = 0; j < n; ++j) nearest[j] = dist[first * n + j];

    while (medoids.size() < k) {
        std::size_t best_h = n;
        double best_gain = -std::numeric_limits<double>::infinity();
        for (std::size_t h = 0; h < n; ++h) {
            if (is_medoid[h]) continue;
            double gain = 0.0;
            for (std::size_t j = 0; j < n; ++j)
                gain += std::max(0.0, nearest[j] - dist[h * n + j]);
            if (gain > best_gain) {
                best_gain = gain;
                best_h = h;
            }
        }
        medoids.push_back(best_h);
        is_medoid[best_h] = 1;
        for (std::size_t j = 0; j < n; ++j)
            nearest[j] = std::min(nearest[j], dist[best_h * n + j]);
    }
    result.build_cost = cost_of(medoids);

    // SWAP: steepest descent until no swap improves the cost.
    double current = result.build_cost;
    for (;;) {
        double best_delta = -1e-12; // improvements below FP noise do not count
        std::size_t best_mi = n, best_h = n;
        for (std::size_t mi = 0; mi < medoids.size(); ++mi) {
            const std::size_t old = medoids[mi];
            for (std::size_t h = 0; h < n; ++h) {
                if (is_medoid[h]) continue;
                medoids[mi] = h;
                const double delta = cost_of(medoids) - current;
                medoids[mi] = old;
                if (delta < best_delta) {
                    best_delta = delta;
                    best_mi = mi;
                    best_h = h;
                }
            }
        }
        if (best_mi == n) break;
        is_medoid[medoids[best_mi]] = 0;
        medoids[best_mi] = best_h;
        is_medoid[best_h] = 1;
        current = cost_of(medoids);
    }

    std::sort(medoids.begin(), medoids.end());
    result.medoids = medoids;
    result.cost = cost_of(medoids);
    result.assignment.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        std::size_t best = medoids[0];
        for (std::size_t mi : medoids)
            if (dist[j * n + mi] < dist[j * n + best]) best = mi;
        result.assignment[j] = best;
    }
    return result;
}

double psnr(const Frame& gt, const Frame& dist) {
    if (!gt.same_shape(dist)) fail(ErrorCode::DimensionMismatch, "frames differ in shape");
    if (gt.data.empty()) fail(ErrorCode::InvalidArgument, "empty frame");
    double se = 0.0;
    for (std::size_t i = 0; i < gt.data.size(); ++i) {
        const double d = static_cast<double>(gt.data[i]) - static_cast<double>(dist.data[i]);
        se += d * d;
    }
    const double mse = se / static_cast<double>(gt.data.size());
    if (mse == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(1.0 / mse);
}

namespace {

std::array<double, 11> ssim_window() {
    std::array<double, 11> w{};
    constexpr double sigma = 1.5;
    double sum = 0.0;
    for (int i = 0; i < 11; ++i) {
        const double d = static_cast<double>(i - 5);
        w[i] = std::exp(-d * d / (2.0 * sigma * sigma));
        sum += w[i];
    }
    for (double& v : w) v /= sum;
    return w;
}

// Valid-region convolution along x: (w, h) -> (w - 10, h).
std::vector<double> window_pass_x(const std::vector<double>& in, int w, int h,
                                  const std::array<double, 11>& k) {
    const int ow = w - 10;
    std::vector<double> out(static_cast<std::size_t>(ow) * h);
    for (int y = 0; y < h; ++y) {
        const double* row = in.data() + static_cast<std::size_t>(y) * w;
        double* out_row = out.data() + static_cast<std::size_t>(y) * ow;
        for (int x = 0; x < ow; ++x) {
            double acc = 0.0;
            for (int t = 0; t < 11; ++t) acc += k[t] * row[x + t];
            out_row[x] = acc;
        }
    }
    return out;
}

// Valid-region convolution along y: (w, h) -> (w, h - 10).
std::vector<double> window_pass_y(const std::vector<double>& in, int w, int h,
                                  const std::array<double, 11>& k) {
    const int oh = h - 10;
    std::vector<double> out(static_cast<std::size_t>(w) * oh);
    for (int y = 0; y < oh; ++y) {
        double* out_row = out.data() + static_cast<std::size_t>(y) * w;
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int t = 0; t < 11; ++t)
                acc += k[t] * in[static_cast<std::size_t>(y + t) * w + x];
            out_row[x] = acc;
        }
    }
    return out;
}

std::vector<double> window_means(const std::vector<double>& plane, int w, int h,
                                 const std::array<double, 11>& k) {
    return window_pass_y(window_pass_x(plane, w, h, k), w - 10, h, k);
}

} // namespace

double ssim(const Frame& gt, const Frame& dist, const LumaWeights& weights) {
    if (gt.width != dist.width || gt.height != dist.height)
        fail(ErrorCode::DimensionMismatch, "frames differ in size");
    if (gt.width < 11 || gt.height < 11)
        fail(ErrorCode::InvalidArgument, "frame too small for the 11x11 window");

    const Frame fx = to_luma(gt, weights);
    const Frame fy = to_luma(dist, weights);
    const int w = fx.width, h = fx.height;
    const std::size_t n = fx.data.size();

    std::vector<double> x(n), y(n), xx(n), yy(n), xy(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = fx.data[i];
        y[i] = fy.data[i];
        xx[i] = x[i] * x[i];
        yy[i] = y[i] * y[i];
        xy[i] = x[i] * y[i];
    }

    const auto k = ssim_window();
    const auto mu_x = window_means(x, w, h, k);
    const auto mu_y = window_means(y, w, h, k);
    const auto mu_xx = window_means(xx, w, h, k);
    const auto mu_yy = window_means(yy, w, h, k);
    const auto mu_xy = window_means(xy, w, h, k);

    constexpr double c1 = 0.01 * 0.01; // (K1 * peak)^2
    constexpr double c2 = 0.03 * 0.03; // (K2 * peak)^2
    double acc = 0.0;
    for (std::size_t i = 0; i < mu_x.size(); ++i) {
        const double mx = mu_x[i], my = mu_y[i];
        const double vx = mu_xx[i] - mx * mx;
        const double vy = mu_yy[i] - my * my;
        const double cv = mu_xy[i] - mx * my;
        const double num = (2.0 * mx * my + c1) * (2.0 * cv + c2);
        const double den = (mx * mx + my * my + c1) * (vx + vy + c2);
        acc += num / den;
    }
    return acc / static_cast<double>(mu_x.size());
}

GlobalShift global_shift_psnr(const Frame& gt, const Frame& dist, int radius) {
    if (!gt.same_shape(dist)) fail(ErrorCode::DimensionMismatch, "frames differ in shape");
    if (radius < 0) fail(ErrorCode::InvalidArgument, "radius must be >= 0");

    const int w = gt.width, h = gt.height, ch = gt.channels;
    GlobalShift best;
    bool have_best = false;
    for (Shift s : enumerate_shifts(radius)) {
        const int y0 = std::max(0, s.dy), y1 = std::min(h, h + s.dy);
        const int x0 = std::max(0, s.dx), x1 = std::min(w, w + s.dx);
        if (y0 >= y1 || x0 >= x1) continue;
        double se = 0.0;
        for (int y = y0; y < y1; ++y) {
            const std::size_t base_g = static_cast<std::size_t>(y) * w * ch;
            // Sample offset of the partner row minus dx pixels; adding
            // x >= x0*ch >= dx*ch keeps the sum non-negative.
            const std::ptrdiff_t base_d =
                (static_cast<std::ptrdiff_t>(y - s.dy) * w - s.dx) * ch;
            for (int x = x0 * ch; x < x1 * ch; ++x) {
                const double d = static_cast<double>(gt.data[base_g + x]) -
                                 static_cast<double>(dist.data[base_d + x]);
                se += d * d;
            }
        }
        const double count =
            static_cast<double>(y1 - y0) * (x1 - x0) * ch;
        const double mse = se / count;
        const double p =
            mse == 0.0 ? std::numeric_limits<double>::infinity() : 10.0 * std::log10(1.0 / mse);
        if (!have_best || p > best.psnr_db) {
            best = {s, p};
            have_best = true;
        }
    }
    return best;
}

std::size_t& ShiftHistogram::at(int dx, int dy) {
    return counts[static_cast<std::size_t>(dy + radius) * (2 * radius + 1) + (dx + radius)];
}

std::size_t ShiftHistogram::at(int dx, int dy) const {
    return counts[static_cast<std::size_t>(dy + radius) * (2 * radius + 1) + (dx + radius)];
}

ShiftHistogram shift_distribution(const FrameSequence& gt, const FrameSequence& dist, int radius,
                                  unsigned jobs) {
    if (gt.frames.size() != dist.frames.size())
        fail(ErrorCode::DimensionMismatch, "sequences differ in length");
    if (gt.frames.empty()) fail(ErrorCode::InvalidArgument, "sequences are empty");
    if (radius < 0) fail(ErrorCode::InvalidArgument, "radius must be >= 0");

    ShiftHistogram hist;
    hist.radius = radius;
    hist.counts.assign(static_cast<std::size_t>(2 * radius + 1) * (2 * radius + 1), 0);
    hist.per_frame.resize(gt.frames.size());
    parallel_for(gt.frames.size(), jobs, [&](std::size_t i) {
        hist.per_frame[i] = global_shift_psnr(gt.frames[i], dist.frames[i], radius).shift;
    });
    for (const Shift& s : hist.per_frame) ++hist.at(s.dx, s.dy);
    return hist;
}

} // namespace srm
