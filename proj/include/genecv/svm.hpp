#pragma once
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "genecv/dataset.hpp"
#include "genecv/error.hpp"
#include "genecv/text.hpp"

namespace genecv {

struct SvmConfig {
    double cost = 1.0;      // soft-margin penalty C
    double tolerance = 1e-6; // relative duality-gap target
    int max_passes = 500;   // cap on outer solver sweeps

    bool operator==(const SvmConfig&) const = default;

    void validate() const {
        require(cost > 0.0, "classifiers", "cost must be positive");
        require(tolerance > 0.0, "classifiers", "tolerance must be positive");
        require(max_passes >= 1, "classifiers", "max_passes must be at least 1");
    }
};

// Fitted separating hyperplane over an active feature subset. Class 1 maps
// to +1 and class 2 to -1 internally, so a positive decision value means
// class 1. `dual_gap` is (primal - dual) / max(1, |primal|) at termination;
// `converged` holds exactly when it is within the configured tolerance.
struct SvmModel {
    double intercept = 0.0;
    std::vector<double> weights;      // parallel to active_features
    std::vector<int> active_features; // ascending column indices
    int n_features_total = 0;
    double cost = 1.0;
    bool converged = false;
    double dual_gap = 0.0;
    std::vector<double> alphas; // dual solution, per training sample; not serialized

    double decision_value(std::span<const double> y) const {
        double s = intercept;
        for (std::size_t v = 0; v < weights.size(); ++v)
            s += weights[v] * y[static_cast<std::size_t>(active_features[v])];
        return s;
    }
};

inline int predict(const SvmModel& model, std::span<const double> y) {
    if (static_cast<int>(y.size()) != model.n_features_total)
        fail("classifiers", "sample vector length " + std::to_string(y.size()) +
                                " does not match feature space " +
                                std::to_string(model.n_features_total));
    return model.decision_value(y) > 0.0 ? 1 : 2; // boundary goes to class 2
}

namespace detail {

// Bias minimizing the total hinge loss for fixed weights. The loss is convex
// piecewise linear in b with slope -n_pos + (#breakpoints passed); the
// minimizing plateau starts after n_pos breakpoints and we take its midpoint,
// which is the canonical max-margin bias in the separable case.
inline double optimal_bias(const std::vector<double>& f, const std::vector<int>& t) {
    std::vector<double> events;
    events.reserve(f.size());
    int n_pos = 0;
    for (std::size_t j = 0; j < f.size(); ++j) {
        if (t[j] > 0) {
            events.push_back(1.0 - f[j]);
            ++n_pos;
        } else {
            events.push_back(-1.0 - f[j]);
        }
    }
    std::sort(events.begin(), events.end());
    return 0.5 * (events[static_cast<std::size_t>(n_pos - 1)] +
                  events[static_cast<std::size_t>(n_pos)]);
}

inline double hinge_total(const std::vector<double>& f, const std::vector<int>& t, double b) {
    double total = 0.0;
    for (std::size_t j = 0; j < f.size(); ++j)
        total += std::max(0.0, 1.0 - t[j] * (f[j] + b));
    return total;
}

// Deterministic SMO on the hinge-loss dual with the equality constraint
// sum_j alpha_j t_j = 0. Each sweep visits samples in fixed index order and
// pairs a violating sample with the extreme sample of the complementary KKT
// set (ties to the lower index), the maximal-violating-pair rule that avoids
// the single-threshold stalls of classic SMO.
class SmoSolver {
  public:
    SmoSolver(const Matrix& x, const std::vector<int>& t, const SvmConfig& cfg)
        : x_(x), t_(t), cfg_(cfg), n_(x.rows) {
        alpha_.assign(n_, 0.0);
        f_.assign(n_, 0.0);
        gram_.assign(n_ * n_, 0.0);
        for (std::size_t a = 0; a < n_; ++a) {
            const auto ra = x_.row(a);
            for (std::size_t b = a; b < n_; ++b) {
                const auto rb = x_.row(b);
                double dot = 0.0;
                for (std::size_t v = 0; v < x_.cols; ++v) dot += ra[v] * rb[v];
                gram_[a * n_ + b] = dot;
                gram_[b * n_ + a] = dot;
            }
        }
    }

    void solve() {
        for (int pass = 0; pass < cfg_.max_passes; ++pass) {
            int steps = 0;
            for (std::size_t j = 0; j < n_; ++j) steps += examine(j);
            bias_ = optimal_bias(f_, t_);
            gap_ = relative_gap();
            if (gap_ <= cfg_.tolerance) {
                converged_ = true;
                return;
            }
            if (steps == 0) return; // pairwise optimal at numerical precision
        }
    }

    const std::vector<double>& alphas() const { return alpha_; }
    double bias() const { return bias_; }
    double gap() const { return gap_; }
    bool converged() const { return converged_; }

  private:
    static constexpr double kPairTol = 1e-10;

    double k(std::size_t a, std::size_t b) const { return gram_[a * n_ + b]; }

    // v_m = t_m - f_m; at the optimum max over the up set <= min over the
    // low set, and the bias lies between them.
    double v(std::size_t m) const { return t_[m] - f_[m]; }

    bool in_up(std::size_t m) const {
        return t_[m] > 0 ? alpha_[m] < cfg_.cost : alpha_[m] > 0.0;
    }
    bool in_low(std::size_t m) const {
        return t_[m] > 0 ? alpha_[m] > 0.0 : alpha_[m] < cfg_.cost;
    }

    double weight_norm_sq() const {
        double wsq = 0.0;
        for (std::size_t j = 0; j < n_; ++j) wsq += alpha_[j] * t_[j] * f_[j];
        return std::max(wsq, 0.0);
    }

    double relative_gap() const {
        const double wsq = weight_norm_sq();
        double dual = -0.5 * wsq;
        for (double a : alpha_) dual += a;
        const double primal = 0.5 * wsq + cfg_.cost * hinge_total(f_, t_, bias_);
        return std::max(primal - dual, 0.0) / std::max(1.0, std::abs(primal));
    }

    int examine(std::size_t j) {
        if (in_up(j)) {
            std::size_t partner = n_;
            double lowest = std::numeric_limits<double>::infinity();
            for (std::size_t m = 0; m < n_; ++m)
                if (m != j && in_low(m) && v(m) < lowest) {
                    lowest = v(m);
                    partner = m;
                }
            if (partner < n_ && v(j) - lowest > kPairTol && take_step(j, partner)) return 1;
        }
        if (in_low(j)) {
            std::size_t partner = n_;
            double highest = -std::numeric_limits<double>::infinity();
            for (std::size_t m = 0; m < n_; ++m)
                if (m != j && in_up(m) && v(m) > highest) {
                    highest = v(m);
                    partner = m;
                }
            if (partner < n_ && highest - v(j) > kPairTol && take_step(partner, j)) return 1;
        }
        return 0;
    }

    bool take_step(std::size_t i1, std::size_t i2) {
        if (i1 == i2) return false;
        const double a1 = alpha_[i1], a2 = alpha_[i2];
        const int y1 = t_[i1], y2 = t_[i2];
        const double e1 = f_[i1] - y1; // decision error with the bias left out;
        const double e2 = f_[i2] - y2; // it cancels in e1 - e2 below
        const double s = y1 * y2;
        const double c = cfg_.cost;

        double lo, hi;
        if (y1 != y2) {
            lo = std::max(0.0, a2 - a1);
            hi = std::min(c, c + a2 - a1);
        } else {
            lo = std::max(0.0, a1 + a2 - c);
            hi = std::min(c, a1 + a2);
        }
        if (hi - lo <= 0.0) return false;

        const double k11 = k(i1, i1), k12 = k(i1, i2), k22 = k(i2, i2);
        const double eta = k11 + k22 - 2.0 * k12;
        double a2new;
        if (eta > 0.0) {
            a2new = std::clamp(a2 + y2 * (e1 - e2) / eta, lo, hi);
        } else {
            // flat or concave direction: evaluate the dual gain at both ends
            const double slope = y2 * (e1 - e2);
            const double gain_lo = slope * (lo - a2) - 0.5 * eta * (lo - a2) * (lo - a2);
            const double gain_hi = slope * (hi - a2) - 0.5 * eta * (hi - a2) * (hi - a2);
            if (gain_lo > gain_hi + 1e-12)
                a2new = lo;
            else if (gain_hi > gain_lo + 1e-12)
                a2new = hi;
            else
                return false;
        }
        if (std::abs(a2new - a2) < 1e-12 * (a2new + a2 + 1e-12)) return false;

        double a1new = a1 + s * (a2 - a2new);
        if (a1new < 0.0) {
            a2new += s * a1new;
            a1new = 0.0;
        } else if (a1new > c) {
            a2new += s * (a1new - c);
            a1new = c;
        }

        const double d1 = y1 * (a1new - a1);
        const double d2 = y2 * (a2new - a2);
        for (std::size_t m = 0; m < n_; ++m) f_[m] += d1 * k(i1, m) + d2 * k(i2, m);
        alpha_[i1] = a1new;
        alpha_[i2] = a2new;
        return true;
    }

    const Matrix& x_;
    const std::vector<int>& t_;
    SvmConfig cfg_;
    std::size_t n_;
    std::vector<double> gram_;
    std::vector<double> alpha_;
    std::vector<double> f_; // f_j = w . x_j, bias excluded
    double bias_ = 0.0;
    double gap_ = std::numeric_limits<double>::infinity();
    bool converged_ = false;
};

} // namespace detail

// Soft-margin linear SVM restricted to `subset`. The subset is treated as a
// set: columns are canonicalized to ascending index order before training so
// the fit depends only on which features are active, never on ranking order.
inline SvmModel train_svm(const LabeledDataset& data, const std::vector<int>& subset,
                          const SvmConfig& config) {
    config.validate();
    require(!subset.empty(), "classifiers", "empty feature subset");
    std::vector<int> cols(subset);
    std::sort(cols.begin(), cols.end());
    require(std::adjacent_find(cols.begin(), cols.end()) == cols.end(), "classifiers",
            "duplicate feature index in subset");
    require(cols.front() >= 0 && cols.back() < data.p(), "classifiers",
            "feature index out of range");

    const std::size_t n = static_cast<std::size_t>(data.n());
    std::vector<int> t(n);
    bool has_pos = false, has_neg = false;
    for (std::size_t j = 0; j < n; ++j) {
        require(data.labels[j] == 1 || data.labels[j] == 2, "classifiers",
                "SVM training requires two-class labels");
        t[j] = data.labels[j] == 1 ? 1 : -1;
        (t[j] > 0 ? has_pos : has_neg) = true;
    }
    require(has_pos && has_neg, "classifiers", "training data contains a single class");

    Matrix xs(n, cols.size());
    for (std::size_t j = 0; j < n; ++j) {
        const auto src = data.x.row(j);
        auto dst = xs.row(j);
        for (std::size_t v = 0; v < cols.size(); ++v)
            dst[v] = src[static_cast<std::size_t>(cols[v])];
    }

    detail::SmoSolver solver(xs, t, config);
    solver.solve();

    SvmModel model;
    model.active_features = cols;
    model.n_features_total = data.p();
    model.cost = config.cost;
    model.intercept = solver.bias();
    model.converged = solver.converged();
    model.dual_gap = solver.gap();
    model.alphas = solver.alphas();
    model.weights.assign(cols.size(), 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        const double coef = model.alphas[j] * t[j];
        if (coef == 0.0) continue;
        const auto row = xs.row(j);
        for (std::size_t v = 0; v < cols.size(); ++v) model.weights[v] += coef * row[v];
    }
    return model;
}

inline void save_model(const std::string& path, const SvmModel& model) {
    std::ofstream out(path);
    require(static_cast<bool>(out), "classifiers", "cannot write file '" + path + "'");
    out << "svm_model v1\n";
    out << "features " << model.n_features_total << "\n";
    out << "cost " << detail::fmt_double(model.cost) << "\n";
    out << "converged " << (model.converged ? 1 : 0) << "\n";
    out << "dual_gap " << detail::fmt_double(model.dual_gap) << "\n";
    out << "intercept " << detail::fmt_double(model.intercept) << "\n";
    out << "weights " << model.weights.size() << "\n";
    for (std::size_t v = 0; v < model.weights.size(); ++v)
        out << model.active_features[v] << " " << detail::fmt_double(model.weights[v]) << "\n";
    require(static_cast<bool>(out), "classifiers", "write failed for '" + path + "'");
}

inline SvmModel load_model(const std::string& path) {
    std::ifstream in(path);
    require(static_cast<bool>(in), "classifiers", "cannot open file '" + path + "'");
    std::string tag, version;
    in >> tag >> version;
    require(tag == "svm_model" && version == "v1", "classifiers",
            "unrecognized model file '" + path + "'");
    SvmModel model;
    std::string key;
    std::size_t count = 0;
    int converged_int = 0;
    in >> key >> model.n_features_total;
    in >> key >> model.cost;
    in >> key >> converged_int;
    in >> key >> model.dual_gap;
    in >> key >> model.intercept;
    in >> key >> count;
    model.converged = converged_int != 0;
    model.active_features.resize(count);
    model.weights.resize(count);
    for (std::size_t v = 0; v < count; ++v) in >> model.active_features[v] >> model.weights[v];
    require(static_cast<bool>(in), "classifiers", "truncated model file '" + path + "'");
    return model;
}

} // namespace genecv
